"""Exception hierarchy shared across the library.

The CLI maps these onto exit codes, so new exceptions should subclass one
of the categories below rather than Exception directly.
"""


class FuzzyTftError(Exception):
    """Base class for all library errors."""


class DomainError(FuzzyTftError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class TreeFormatError(FuzzyTftError):
    """A tree document could not be parsed.

    Carries the source name and a 1-based line number when known.
    """

    def __init__(self, message, source="<string>", line=None):
        self.source = source
        self.line = line
        where = source if line is None else f"{source}:{line}"
        super().__init__(f"{where}: {message}")


class TreeStructureError(FuzzyTftError):
    """A parsed tree failed structural validation.

    ``diagnostics`` holds the machine-readable findings that caused the
    rejection (warnings are kept on the tree instead).
    """

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(str(d) for d in self.diagnostics)
        super().__init__(f"invalid fault tree: {lines}")


class NumericError(FuzzyTftError, ArithmeticError):
    """A numeric evaluation could not produce a trustworthy result."""


class DegeneratePoleError(NumericError):
    """Two poles of a partial-fraction expansion (nearly) coincide."""


class SaturationError(NumericError):
    """A probability reached 1 where a finite failure rate is required."""
