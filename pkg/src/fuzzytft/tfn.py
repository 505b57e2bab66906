"""Triangular fuzzy numbers and the arithmetic used throughout the library.

A triangular fuzzy number (TFN) is an ordered triple ``(lower, peak, upper)``
whose membership function rises linearly from ``lower`` to 1 at ``peak`` and
falls linearly back to zero at ``upper``.  A crisp value ``x`` is the
degenerate triple ``(x, x, x)``.

The arithmetic implemented here is the componentwise approximation commonly
used in fuzzy reliability work (valid for positive operands), not exact
alpha-cut interval arithmetic.  Reproducing published fuzzy fault-tree
numbers requires exactly these rules, so do not "fix" them to be
interval-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

#: Spread percentages conventionally used when fuzzifying a crisp rate.
STANDARD_SPREADS = (15.0, 25.0, 50.0)


@dataclass(frozen=True, slots=True)
class TFN:
    """Triangular fuzzy number with ``lower <= peak <= upper``.

    Construction rejects unordered triples instead of sorting them: an
    unordered triple almost always indicates an upstream bug.
    """

    lower: float
    peak: float
    upper: float

    def __post_init__(self):
        lo, pk, up = float(self.lower), float(self.peak), float(self.upper)
        if not (math.isfinite(lo) and math.isfinite(pk) and math.isfinite(up)):
            raise DomainError(f"TFN components must be finite, got ({lo}, {pk}, {up})")
        if not lo <= pk <= up:
            raise DomainError(f"TFN components must be ordered, got ({lo}, {pk}, {up})")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "peak", pk)
        object.__setattr__(self, "upper", up)

    @classmethod
    def crisp(cls, x: float) -> "TFN":
        return cls(x, x, x)

    @property
    def is_crisp(self) -> bool:
        return self.lower == self.peak == self.upper

    def astuple(self) -> tuple[float, float, float]:
        return (self.lower, self.peak, self.upper)

    def __add__(self, other: "TFN") -> "TFN":
        return TFN(self.lower + other.lower, self.peak + other.peak, self.upper + other.upper)

    def __sub__(self, other: "TFN") -> "TFN":
        # Interval-style subtraction: the only subtraction rule that keeps
        # the result ordered for every ordered pair of operands.
        return TFN(self.lower - other.upper, self.peak - other.peak, self.upper - other.lower)

    def __mul__(self, other: "TFN") -> "TFN":
        if self.lower < 0 or other.lower < 0:
            raise DomainError("componentwise TFN product requires non-negative operands")
        return TFN(self.lower * other.lower, self.peak * other.peak, self.upper * other.upper)

    def __truediv__(self, other: "TFN") -> "TFN":
        if other.lower <= 0:
            raise DomainError("TFN division requires a divisor with strictly positive support")
        return TFN(self.lower / other.upper, self.peak / other.peak, self.upper / other.lower)

    def scale(self, k: float) -> "TFN":
        """Multiply by a crisp scalar (sign-aware)."""
        if k >= 0:
            return TFN(k * self.lower, k * self.peak, k * self.upper)
        return TFN(k * self.upper, k * self.peak, k * self.lower)

    def exp_scaled(self, k: float) -> "TFN":
        """``e**(k * self)`` componentwise, with components reordered for k < 0."""
        if k >= 0:
            return TFN(math.exp(k * self.lower), math.exp(k * self.peak), math.exp(k * self.upper))
        return TFN(math.exp(k * self.upper), math.exp(k * self.peak), math.exp(k * self.lower))

    def centroid(self) -> float:
        """Centroid defuzzification: the mean of the three components.

        Equals the centroid of the triangular membership function.
        """
        return (self.lower + self.peak + self.upper) / 3.0

    def __str__(self):
        return f"({self.lower:.8g}, {self.peak:.8g}, {self.upper:.8g})"


@dataclass(frozen=True, slots=True)
class Spread:
    """Symmetric fuzzification spread, in percent of the crisp value.

    Values outside the conventional set {15, 25, 50} are rejected unless
    ``nonstandard=True``; any spread must stay inside (0, 100) so a
    fuzzified positive rate keeps a positive lower bound.
    """

    percent: float
    nonstandard: bool = False

    def __post_init__(self):
        pct = float(self.percent)
        if not 0.0 < pct < 100.0:
            raise DomainError(f"spread must lie in (0, 100) percent, got {pct}")
        if not self.nonstandard and pct not in STANDARD_SPREADS:
            raise DomainError(
                f"spread {pct}% is not one of the standard values {STANDARD_SPREADS}; "
                f"pass nonstandard=True to allow it"
            )
        object.__setattr__(self, "percent", pct)


def fuzzify(rate: float, spread: Spread | float) -> TFN:
    """Widen a crisp positive rate into a symmetric TFN.

    With spread ``s`` percent the result is ``((1-s/100)*rate, rate,
    (1+s/100)*rate)``.
    """
    if isinstance(spread, (int, float)):
        spread = Spread(spread)
    if not rate > 0:
        raise DomainError(f"fuzzify requires a positive rate, got {rate}")
    frac = spread.percent / 100.0
    return TFN((1.0 - frac) * rate, rate, (1.0 + frac) * rate)


def distance(x: TFN, y: TFN) -> float:
    """Euclidean distance between two TFNs in component space."""
    return math.sqrt(
        (x.lower - y.lower) ** 2 + (x.peak - y.peak) ** 2 + (x.upper - y.upper) ** 2
    )
