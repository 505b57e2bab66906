"""Fault-tree data model and structural validation.

A :class:`FaultTree` is an id-indexed collection of basic events and gates
with a single top node.  Basic events may be shared between gates (with a
warning: the gate formulas assume independent inputs), but intermediate
gates may not - evaluating a shared subtree as if it were independent would
silently produce wrong numbers, so true DAGs are rejected.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import DomainError, TreeStructureError
from .tfn import TFN, Spread, fuzzify


class GateKind(enum.Enum):
    AND = "AND"
    OR = "OR"
    PAND = "PAND"
    POR = "POR"

    @property
    def is_temporal(self) -> bool:
        return self in (GateKind.PAND, GateKind.POR)


@dataclass(frozen=True)
class BasicEvent:
    """Leaf failure event with an exponential failure rate.

    ``rate`` is always stored as a TFN; ``crisp_rate``/``spread`` record how
    it was produced when the source document gave a crisp rate, so the
    document can be serialized back without loss.
    """

    id: str
    rate: TFN
    description: str = ""
    crisp_rate: float | None = None
    spread: Spread | None = None

    def __post_init__(self):
        if self.rate.lower <= 0:
            raise DomainError(
                f"basic event {self.id!r} requires strictly positive rate components, "
                f"got {self.rate}"
            )

    @classmethod
    def from_crisp(
        cls, id: str, rate: float, spread: Spread | None = None, description: str = ""
    ) -> "BasicEvent":
        if not rate > 0:
            raise DomainError(f"basic event {id!r} requires a positive rate, got {rate}")
        tfn = fuzzify(rate, spread) if spread is not None else TFN.crisp(rate)
        return cls(id=id, rate=tfn, description=description, crisp_rate=rate, spread=spread)


@dataclass(frozen=True)
class GateNode:
    """Gate with an ordered child list (order is semantic for PAND/POR).

    ``inline`` marks gates synthesized by the parser for parenthesized
    subexpressions; the serializer folds them back into their parent's
    expression.
    """

    id: str
    kind: GateKind
    children: tuple[str, ...]
    inline: bool = False


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: Severity
    node_id: str
    message: str

    def __str__(self):
        return f"{self.severity.value} {self.code} [{self.node_id}]: {self.message}"


@dataclass
class FaultTree:
    """Validated fault tree with a single top event."""

    top_id: str
    events: dict[str, BasicEvent]
    gates: dict[str, GateNode]
    name: str = ""
    source: str = ""
    times: tuple[float, ...] = ()
    default_spread: Spread | None = None
    warnings: list[Diagnostic] = field(default_factory=list)

    @property
    def top(self) -> GateNode | BasicEvent:
        return self.node(self.top_id)

    def node(self, node_id: str):
        if node_id in self.gates:
            return self.gates[node_id]
        if node_id in self.events:
            return self.events[node_id]
        raise KeyError(node_id)

    def event_ids(self) -> list[str]:
        return list(self.events)

    def postorder(self) -> list[str]:
        """Node ids with every child listed before its parent."""
        order: list[str] = []
        seen: set[str] = set()

        def walk(node_id: str):
            if node_id in seen:
                return
            seen.add(node_id)
            gate = self.gates.get(node_id)
            if gate is not None:
                for child in gate.children:
                    walk(child)
            order.append(node_id)

        walk(self.top_id)
        return order


def validate(tree: FaultTree) -> list[Diagnostic]:
    """Structural diagnostics for a tree; empty list means fully valid.

    Warnings (shared basic events, single-input AND/OR, unreachable events)
    do not make a tree unusable; errors do.
    """
    diags: list[Diagnostic] = []
    all_ids = set(tree.events) | set(tree.gates)

    if len(tree.events) + len(tree.gates) != len(all_ids):
        shared = set(tree.events) & set(tree.gates)
        for node_id in sorted(shared):
            diags.append(
                Diagnostic(
                    "duplicate-id",
                    Severity.ERROR,
                    node_id,
                    "id is declared both as an event and as a gate",
                )
            )

    if tree.top_id not in all_ids:
        diags.append(
            Diagnostic("unresolved-top", Severity.ERROR, tree.top_id, "top node is not declared")
        )
        return diags

    parents: dict[str, list[str]] = {}
    for gate in tree.gates.values():
        if len(gate.children) == 0:
            diags.append(
                Diagnostic("empty-gate", Severity.ERROR, gate.id, "gate has no inputs")
            )
        elif len(gate.children) == 1:
            severity = Severity.ERROR if gate.kind.is_temporal else Severity.WARNING
            diags.append(
                Diagnostic(
                    "arity",
                    severity,
                    gate.id,
                    f"{gate.kind.value} gate has a single input"
                    + ("" if gate.kind.is_temporal else "; it passes the input through"),
                )
            )
        for child in gate.children:
            if child not in all_ids:
                diags.append(
                    Diagnostic(
                        "unresolved-reference",
                        Severity.ERROR,
                        gate.id,
                        f"child {child!r} is not declared",
                    )
                )
            else:
                parents.setdefault(child, []).append(gate.id)

    for node_id, ps in sorted(parents.items()):
        if len(ps) > 1:
            if node_id in tree.gates:
                diags.append(
                    Diagnostic(
                        "shared-gate",
                        Severity.ERROR,
                        node_id,
                        f"gate feeds multiple parents ({', '.join(sorted(ps))}); "
                        f"shared subtrees are not independent and cannot be quantified",
                    )
                )
            else:
                diags.append(
                    Diagnostic(
                        "shared-event",
                        Severity.WARNING,
                        node_id,
                        f"basic event feeds multiple parents ({', '.join(sorted(ps))}); "
                        f"the gate formulas treat the occurrences as independent",
                    )
                )

    # Cycle detection over gate references (three-colour DFS).
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {node_id: WHITE for node_id in tree.gates}
    stack_msgs: list[tuple[str, str]] = []

    def visit(gate_id: str, trail: tuple[str, ...]):
        colour[gate_id] = GREY
        for child in tree.gates[gate_id].children:
            if child not in tree.gates:
                continue
            if colour[child] == GREY:
                cycle = trail[trail.index(child):] + (child,) if child in trail else (gate_id, child)
                stack_msgs.append((child, " -> ".join(cycle)))
            elif colour[child] == WHITE:
                visit(child, trail + (child,))
        colour[gate_id] = BLACK

    for gate_id in sorted(tree.gates):
        if colour[gate_id] == WHITE:
            visit(gate_id, (gate_id,))
    for node_id, cycle in stack_msgs:
        diags.append(
            Diagnostic("cycle", Severity.ERROR, node_id, f"gate is its own ancestor: {cycle}")
        )

    if not any(d.severity is Severity.ERROR for d in diags):
        reachable = set(tree.postorder())
        for gate_id in sorted(set(tree.gates) - reachable):
            diags.append(
                Diagnostic(
                    "unreachable",
                    Severity.ERROR,
                    gate_id,
                    "gate is not reachable from the top event",
                )
            )
        for event_id in sorted(set(tree.events) - reachable):
            diags.append(
                Diagnostic(
                    "unreachable",
                    Severity.WARNING,
                    event_id,
                    "event is not reachable from the top event",
                )
            )

    return diags


def check_valid(tree: FaultTree) -> FaultTree:
    """Validate a tree, attach warnings, raise on errors."""
    diags = validate(tree)
    errors = [d for d in diags if d.severity is Severity.ERROR]
    if errors:
        raise TreeStructureError(errors)
    tree.warnings = [d for d in diags if d.severity is Severity.WARNING]
    return tree
