"""Bottom-up quantification of a fault tree over a mission-time grid.

The value domain is hybrid, mirroring how temporal fault trees are
quantified in practice: AND/OR gates combine failure *probabilities*, while
PAND/POR gates are closed forms over exponential failure *rates*.  A basic
event feeding an AND/OR is first converted rate -> probability; a gate (or
forced event) feeding a PAND/POR is converted probability -> equivalent
exponential rate at the current mission time.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import gates
from .errors import DomainError, FuzzyTftError
from .model import BasicEvent, FaultTree, GateKind
from .tfn import TFN, Spread, distance

#: FIM values closer than this share a rank.
RANK_TIE_TOL = 1e-6


@dataclass(frozen=True)
class AnalysisConfig:
    """Settings for :func:`sweep`.

    ``importance_time`` must be given explicitly when ``importance`` is
    enabled; there is no universally sensible default mission time for
    ranking.
    """

    times: tuple[float, ...]
    spread: Spread | None = None
    clamp: bool = False
    importance: bool = False
    importance_time: float | None = None

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        if not times:
            raise DomainError("analysis requires at least one time point")
        if any(t < 0 for t in times):
            raise DomainError("mission times must be >= 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise DomainError("mission times must be strictly increasing")
        object.__setattr__(self, "times", times)
        if self.importance and self.importance_time is None:
            raise DomainError("importance analysis requires an explicit importance_time")
        if self.importance_time is not None and self.importance_time < 0:
            raise DomainError("importance_time must be >= 0")


@dataclass(frozen=True)
class TimePointResult:
    t: float
    probability: TFN
    defuzzified: float
    peak: float


@dataclass(frozen=True)
class ImportanceRow:
    event_id: str
    fim: float
    rank: int


@dataclass(frozen=True)
class AnalysisReport:
    entries: tuple[TimePointResult, ...]
    importance: tuple[ImportanceRow, ...] = ()
    importance_time: float | None = None
    diagnostics: tuple[str, ...] = ()

    def to_csv(self) -> str:
        lines = ["t,te_lower,te_peak,te_upper,te_defuzzified"]
        for e in self.entries:
            p = e.probability
            lines.append(
                f"{_fmt(e.t)},{_fmt(p.lower)},{_fmt(p.peak)},{_fmt(p.upper)},{_fmt(e.defuzzified)}"
            )
        return "\n".join(lines) + "\n"

    def importance_to_csv(self) -> str:
        lines = ["event_id,fim,rank"]
        for row in self.importance:
            lines.append(f"{row.event_id},{_fmt(row.fim)},{row.rank}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        obj: dict = {
            "entries": [
                {
                    "t": e.t,
                    "te": list(e.probability.astuple()),
                    "defuzzified": e.defuzzified,
                    "peak": e.peak,
                }
                for e in self.entries
            ]
        }
        if self.importance:
            obj["importance_time"] = self.importance_time
            obj["importance"] = [
                {"event_id": r.event_id, "fim": r.fim, "rank": r.rank} for r in self.importance
            ]
        if self.diagnostics:
            obj["diagnostics"] = list(self.diagnostics)
        return obj


def _fmt(x: float) -> str:
    return f"{x:.8g}"


def _annotate(exc: FuzzyTftError, node_id: str) -> FuzzyTftError:
    # Tag errors with the innermost node they arose at, once.
    if exc.args and isinstance(exc.args[0], str) and "(at node" not in exc.args[0]:
        exc.args = (f"{exc.args[0]} (at node {node_id!r})",) + exc.args[1:]
    return exc


class _Evaluator:
    """Single-time-point evaluation with optional forcing of basic events.

    ``forcing`` maps event ids to 0 (never occurs) or 1 (certain); forcing
    is applied to the event's *probability* before any conversion, per the
    importance-measure definition.
    """

    def __init__(
        self,
        tree: FaultTree,
        t: float,
        clamp: bool = False,
        forcing: dict[str, int] | None = None,
        notes: list | None = None,
    ):
        self.tree = tree
        self.t = float(t)
        self.clamp = clamp
        self.forcing = forcing or {}
        # Forcing an event certain can push upstream probabilities to 1,
        # which has no finite equivalent rate; forced evaluations therefore
        # always saturate conversions feeding temporal gates.
        self.saturate = bool(self.forcing)
        self.notes = notes

    def top_probability(self) -> TFN:
        return self.probability(self.tree.top_id)

    def probability(self, node_id: str) -> TFN:
        node = self.tree.node(node_id)
        if isinstance(node, BasicEvent):
            forced = self.forcing.get(node_id)
            if forced is not None:
                return TFN.crisp(float(forced))
            return gates.rate_to_prob(node.rate, self.t)
        try:
            if node.kind is GateKind.AND:
                return gates.fuzzy_and([self.probability(c) for c in node.children])
            if node.kind is GateKind.OR:
                return gates.fuzzy_or([self.probability(c) for c in node.children])
            return self._temporal(node)
        except FuzzyTftError as exc:
            raise _annotate(exc, node_id)

    def _temporal(self, node) -> TFN:
        if self.t == 0.0:
            # No mission time has elapsed, so an ordered occurrence is
            # impossible regardless of the children (even forced ones).
            return TFN(0.0, 0.0, 0.0)
        rates: list[TFN] = []
        for position, child in enumerate(node.children):
            rate = self._rate(child)
            if rate is None:
                # A child that can never occur kills a PAND outright, and a
                # POR whose priority event never occurs; a POR competitor
                # that never occurs simply drops out of the race.
                if node.kind is GateKind.PAND or position == 0:
                    return TFN(0.0, 0.0, 0.0)
                continue
            rates.append(rate)
        if node.kind is GateKind.PAND:
            return gates.fuzzy_pand(rates, self.t, notes=self.notes, clamp=self.clamp)
        return gates.fuzzy_por(rates, self.t, notes=self.notes, clamp=self.clamp)

    def _rate(self, node_id: str) -> TFN | None:
        node = self.tree.node(node_id)
        if isinstance(node, BasicEvent):
            forced = self.forcing.get(node_id)
            if forced is None:
                return node.rate
            if forced == 0:
                return None
            # A certain event has no finite exponential rate; use the
            # saturated conversion so it behaves as already failed.
            return gates.prob_to_rate(TFN.crisp(1.0), self.t, clamp=True)
        prob = self.probability(node_id)
        return gates.prob_to_rate(prob, self.t, clamp=self.clamp or self.saturate)


def evaluate(tree: FaultTree, t: float, config: AnalysisConfig | None = None) -> TFN:
    """Fuzzy top-event probability at a single mission time."""
    clamp = config.clamp if config is not None else False
    return _Evaluator(tree, t, clamp=clamp).top_probability()


def fuzzy_importance(
    tree: FaultTree, event_id: str, t: float, clamp: bool = False
) -> float:
    """Distance between top-event probabilities with the event forced
    certain versus forced impossible."""
    if event_id not in tree.events:
        raise DomainError(f"unknown basic event {event_id!r}")
    p_one = _Evaluator(tree, t, clamp=clamp, forcing={event_id: 1}).top_probability()
    p_zero = _Evaluator(tree, t, clamp=clamp, forcing={event_id: 0}).top_probability()
    return distance(p_one, p_zero)


def rank_events(fims: list[tuple[str, float]], tie_tol: float = RANK_TIE_TOL) -> tuple[ImportanceRow, ...]:
    """Dense descending ranking; FIMs within ``tie_tol`` share a rank."""
    ordered = sorted(fims, key=lambda item: (-item[1], item[0]))
    rows: list[ImportanceRow] = []
    rank = 0
    group_fim: float | None = None
    for event_id, fim in ordered:
        if group_fim is None or abs(fim - group_fim) >= tie_tol:
            rank += 1
            group_fim = fim
        rows.append(ImportanceRow(event_id, fim, rank))
    return tuple(rows)


def sweep(tree: FaultTree, config: AnalysisConfig) -> AnalysisReport:
    """Evaluate the tree on the configured time grid (plus, optionally, the
    importance ranking at ``config.importance_time``)."""
    notes: list = []
    entries = []
    for t in config.times:
        prob = _Evaluator(tree, t, clamp=config.clamp, notes=notes).top_probability()
        entries.append(
            TimePointResult(
                t=t, probability=prob, defuzzified=prob.centroid(), peak=prob.peak
            )
        )

    importance: tuple[ImportanceRow, ...] = ()
    if config.importance:
        fims = [
            (event_id, fuzzy_importance(tree, event_id, config.importance_time, config.clamp))
            for event_id in tree.events
        ]
        importance = rank_events(fims)

    diagnostics = tuple(str(w) for w in tree.warnings) + tuple(str(n) for n in notes)
    return AnalysisReport(
        entries=tuple(entries),
        importance=importance,
        importance_time=config.importance_time if config.importance else None,
        diagnostics=diagnostics,
    )
