"""Textual and structured input formats for fault trees.

Text format (UTF-8, ``#`` starts a comment, one statement per line)::

    directive spread=15 times=100,500,1000 name="AFDS"
    event I-SOV rate=1.65633e-3 desc="Valve inside SOS"
    event E2   rate=1e-4,2e-4,3e-4          # explicit fuzzy triple
    gate  O-SOS = I-SOV OR I-SOL
    top = O-SOS

Expressions use the operators OR, AND, PAND, POR (the glyphs
``∪ ∩ ◁ ≀`` are accepted as aliases) with precedence
``PAND = POR > AND > OR``, left-associative; parentheses override.
Unparenthesized chains of one operator collapse into a single n-ary gate,
which for left-associative chains is semantically exact.

The same schema has a structured (JSON) encoding with fields mirroring the
grammar one-to-one: ``{"name", "spread", "times", "events": [{"id",
"rate", "spread", "desc"}], "gates": [{"id", "expr"}], "top"}``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import DomainError, TreeFormatError
from .model import BasicEvent, FaultTree, GateKind, GateNode, check_valid
from .tfn import TFN, Spread

_GLYPHS = {"∪": "OR", "∩": "AND", "◁": "PAND", "≀": "POR"}
_KEYWORDS = {"AND", "OR", "PAND", "POR"}
_PRECEDENCE = {"OR": 1, "AND": 2, "PAND": 3, "POR": 3}

_TOKEN_RE = re.compile(r"\(|\)|∪|∩|◁|≀|[A-Za-z_][A-Za-z0-9_.\-]*|\S")
_ATTR_RE = re.compile(r'([A-Za-z_]+)=("(?:[^"\\]|\\.)*"|\S+)')


@dataclass(frozen=True)
class Expr:
    """Parsed expression node: either a reference or a gate over children."""

    kind: GateKind | None  # None for a plain reference
    ref: str | None = None
    children: tuple["Expr", ...] = ()

    @property
    def is_ref(self) -> bool:
        return self.kind is None


def _tokenize(text: str) -> list[str]:
    tokens = []
    for tok in _TOKEN_RE.findall(text):
        tokens.append(_GLYPHS.get(tok, tok))
    return tokens


class _ExprParser:
    def __init__(self, text: str, known_ids: set[str] | None):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.known_ids = known_ids

    def fail(self, message: str):
        raise DomainError(f"in expression {self.text!r}: {message}")

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of expression")
        self.pos += 1
        return tok

    def parse(self) -> Expr:
        expr = self.parse_binary(1)
        if self.peek() is not None:
            self.fail(f"unexpected token {self.peek()!r}")
        return expr

    def parse_binary(self, min_prec: int) -> Expr:
        node = self.parse_primary()
        while True:
            op = self.peek()
            if op not in _KEYWORDS or _PRECEDENCE[op] < min_prec:
                return node
            kind = GateKind[op]
            children = [node]
            # Consume the maximal run of this operator at this level; the
            # left-associative chain is collapsed into one n-ary gate.
            while self.peek() == op:
                self.next()
                children.append(self.parse_binary(_PRECEDENCE[op] + 1))
            node = Expr(kind, children=tuple(children))

    def parse_primary(self) -> Expr:
        tok = self.next()
        if tok == "(":
            inner = self.parse_binary(1)
            if self.peek() != ")":
                self.fail("unbalanced parentheses")
            self.next()
            return inner
        if tok == ")":
            self.fail("unbalanced parentheses")
        if tok in _KEYWORDS:
            self.fail(f"operator {tok!r} where an operand was expected")
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.\-]*", tok):
            self.fail(f"invalid token {tok!r}")
        if self.known_ids is not None and tok not in self.known_ids:
            self.fail(f"unknown identifier {tok!r}")
        return Expr(None, ref=tok)


def parse_expression(text: str, known_ids: set[str] | None = None) -> Expr:
    """Parse a gate expression into an :class:`Expr` tree.

    With ``known_ids`` given, references outside the set are rejected.
    """
    return _ExprParser(text, known_ids).parse()


def _unquote(value: str) -> str:
    if value.startswith('"') and value.endswith('"') and len(value) >= 2:
        return re.sub(r"\\(.)", r"\1", value[1:-1])
    return value


def _parse_attrs(text: str, source: str, line_no: int) -> dict[str, str]:
    attrs = {}
    rest = text
    for match in _ATTR_RE.finditer(text):
        attrs[match.group(1)] = _unquote(match.group(2))
        rest = rest.replace(match.group(0), "", 1)
    if rest.strip():
        raise TreeFormatError(
            f"unrecognized text {rest.strip()!r} in statement", source, line_no
        )
    return attrs


def _parse_float(value: str, what: str, source: str, line_no: int) -> float:
    try:
        return float(value)
    except ValueError:
        raise TreeFormatError(f"bad {what} {value!r}", source, line_no) from None


@dataclass
class _EventDecl:
    id: str
    line: int
    rate: float | TFN
    spread_pct: float | None
    desc: str


@dataclass
class _GateDecl:
    id: str
    line: int
    expr_text: str


def parse_tree(
    text: str,
    *,
    source: str = "<string>",
    spread_override: Spread | None = None,
    allow_nonstandard_spread: bool = False,
) -> FaultTree:
    """Parse (and fully validate) a tree document, text or JSON.

    Crisp event rates are fuzzified with, in order of precedence: the
    event's own ``spread``, ``spread_override``, the document's ``spread``
    directive.  With none of those the rate stays crisp.
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TreeFormatError(f"bad JSON document: {exc}", source, exc.lineno) from None
        return load_structured(
            obj,
            source=source,
            spread_override=spread_override,
            allow_nonstandard_spread=allow_nonstandard_spread,
        )

    events: list[_EventDecl] = []
    gates: list[_GateDecl] = []
    top_id: str | None = None
    top_line = 0
    name = ""
    doc_spread_pct: float | None = None
    nonstandard = allow_nonstandard_spread
    times: tuple[float, ...] = ()

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "directive":
            attrs = _parse_attrs(rest, source, line_no)
            if "nonstandard_spread" in attrs:
                nonstandard = attrs.pop("nonstandard_spread").lower() in ("true", "yes", "1", "on")
            if "spread" in attrs:
                doc_spread_pct = _parse_float(attrs.pop("spread"), "spread", source, line_no)
            if "times" in attrs:
                try:
                    times = tuple(float(v) for v in attrs.pop("times").split(","))
                except ValueError:
                    raise TreeFormatError("bad times list", source, line_no) from None
            if "name" in attrs:
                name = attrs.pop("name")
            if attrs:
                raise TreeFormatError(
                    f"unknown directive keys {sorted(attrs)}", source, line_no
                )
        elif head == "event":
            ident, _, attr_text = rest.strip().partition(" ")
            if not ident:
                raise TreeFormatError("event statement requires an id", source, line_no)
            attrs = _parse_attrs(attr_text, source, line_no)
            if "rate" not in attrs:
                raise TreeFormatError(f"event {ident!r} requires rate=", source, line_no)
            rate_text = attrs.pop("rate")
            rate: float | TFN
            if "," in rate_text:
                parts = rate_text.split(",")
                if len(parts) != 3:
                    raise TreeFormatError(
                        f"fuzzy rate requires three components, got {rate_text!r}",
                        source,
                        line_no,
                    )
                components = [_parse_float(p, "rate", source, line_no) for p in parts]
                try:
                    rate = TFN(*components)
                except DomainError as exc:
                    raise TreeFormatError(str(exc), source, line_no) from None
            else:
                rate = _parse_float(rate_text, "rate", source, line_no)
            spread_pct = None
            if "spread" in attrs:
                spread_pct = _parse_float(attrs.pop("spread"), "spread", source, line_no)
            desc = attrs.pop("desc", "")
            if attrs:
                raise TreeFormatError(
                    f"unknown event keys {sorted(attrs)}", source, line_no
                )
            events.append(_EventDecl(ident, line_no, rate, spread_pct, desc))
        elif head == "gate":
            if "=" not in rest:
                raise TreeFormatError("gate statement requires '='", source, line_no)
            ident, _, expr_text = rest.partition("=")
            ident = ident.strip()
            if not ident:
                raise TreeFormatError("gate statement requires an id", source, line_no)
            if not expr_text.strip():
                raise TreeFormatError(f"gate {ident!r} has an empty expression", source, line_no)
            gates.append(_GateDecl(ident, line_no, expr_text.strip()))
        elif head == "top":
            rest = rest.strip()
            if rest.startswith("="):
                rest = rest[1:].strip()
            if not rest:
                raise TreeFormatError("top statement requires a node id", source, line_no)
            if top_id is not None:
                raise TreeFormatError("duplicate top statement", source, line_no)
            top_id = rest
            top_line = line_no
        else:
            raise TreeFormatError(f"unknown statement {head!r}", source, line_no)

    if top_id is None:
        raise TreeFormatError("document declares no top event", source)

    return _assemble(
        events,
        gates,
        top_id,
        top_line,
        name=name,
        source=source,
        times=times,
        doc_spread_pct=doc_spread_pct,
        spread_override=spread_override,
        nonstandard=nonstandard,
    )


def _assemble(
    event_decls: list[_EventDecl],
    gate_decls: list[_GateDecl],
    top_id: str,
    top_line: int,
    *,
    name: str,
    source: str,
    times: tuple[float, ...],
    doc_spread_pct: float | None,
    spread_override: Spread | None,
    nonstandard: bool,
) -> FaultTree:
    def make_spread(pct: float | None, line: int) -> Spread | None:
        if pct is None:
            return None
        try:
            return Spread(pct, nonstandard=nonstandard)
        except DomainError as exc:
            raise TreeFormatError(str(exc), source, line) from None

    doc_spread = make_spread(doc_spread_pct, 0)
    default_spread = spread_override if spread_override is not None else doc_spread

    events: dict[str, BasicEvent] = {}
    declared_lines: dict[str, int] = {}
    for decl in event_decls:
        if decl.id in declared_lines:
            raise TreeFormatError(
                f"duplicate id {decl.id!r} (first declared at line {declared_lines[decl.id]})",
                source,
                decl.line,
            )
        declared_lines[decl.id] = decl.line
        try:
            if isinstance(decl.rate, TFN):
                events[decl.id] = BasicEvent(decl.id, decl.rate, description=decl.desc)
            else:
                spread = make_spread(decl.spread_pct, decl.line) or default_spread
                events[decl.id] = BasicEvent.from_crisp(
                    decl.id, decl.rate, spread=spread, description=decl.desc
                )
        except DomainError as exc:
            raise TreeFormatError(str(exc), source, decl.line) from None

    gates: dict[str, GateNode] = {}
    for decl in gate_decls:
        if decl.id in declared_lines:
            raise TreeFormatError(
                f"duplicate id {decl.id!r} (first declared at line {declared_lines[decl.id]})",
                source,
                decl.line,
            )
        declared_lines[decl.id] = decl.line

    known_ids = set(declared_lines)
    for decl in gate_decls:
        try:
            expr = parse_expression(decl.expr_text, known_ids)
        except DomainError as exc:
            raise TreeFormatError(str(exc), source, decl.line) from None
        _expr_to_gates(decl.id, expr, gates)

    tree = FaultTree(
        top_id=top_id,
        events=events,
        gates=gates,
        name=name,
        source=source,
        times=times,
        default_spread=default_spread,
    )
    try:
        return check_valid(tree)
    except Exception:
        # Point at the top statement for single-statement documents where
        # no better location exists; diagnostics carry node ids regardless.
        raise


def _expr_to_gates(gate_id: str, expr: Expr, gates: dict[str, GateNode]) -> None:
    counter = [0]

    def child_id(node: Expr) -> str:
        if node.is_ref:
            return node.ref
        counter[0] += 1
        sub_id = f"{gate_id}#{counter[0]}"
        gates[sub_id] = GateNode(
            sub_id, node.kind, tuple(child_id(c) for c in node.children), inline=True
        )
        return sub_id

    if expr.is_ref:
        # A bare reference: model as a single-input AND pass-through.
        gates[gate_id] = GateNode(gate_id, GateKind.AND, (expr.ref,))
        return
    gates[gate_id] = GateNode(gate_id, expr.kind, tuple(child_id(c) for c in expr.children))


# ---------------------------------------------------------------------------
# Structured (JSON) encoding
# ---------------------------------------------------------------------------

def load_structured(
    obj: dict,
    *,
    source: str = "<structured>",
    spread_override: Spread | None = None,
    allow_nonstandard_spread: bool = False,
) -> FaultTree:
    """Load the canonical structured document (parsed JSON)."""
    if not isinstance(obj, dict):
        raise TreeFormatError("structured document must be an object", source)
    unknown = set(obj) - {"name", "spread", "nonstandard_spread", "times", "events", "gates", "top"}
    if unknown:
        raise TreeFormatError(f"unknown document keys {sorted(unknown)}", source)
    if "top" not in obj:
        raise TreeFormatError("document declares no top event", source)

    events: list[_EventDecl] = []
    for entry in obj.get("events", []):
        extra = set(entry) - {"id", "rate", "spread", "desc"}
        if extra:
            raise TreeFormatError(f"unknown event keys {sorted(extra)}", source)
        rate = entry.get("rate")
        if isinstance(rate, (list, tuple)):
            if len(rate) != 3:
                raise TreeFormatError("fuzzy rate requires three components", source)
            try:
                rate = TFN(*[float(v) for v in rate])
            except DomainError as exc:
                raise TreeFormatError(str(exc), source) from None
        elif rate is None:
            raise TreeFormatError(f"event {entry.get('id')!r} requires a rate", source)
        else:
            rate = float(rate)
        spread_pct = entry.get("spread")
        events.append(
            _EventDecl(
                str(entry["id"]),
                0,
                rate,
                float(spread_pct) if spread_pct is not None else None,
                str(entry.get("desc", "")),
            )
        )

    gates: list[_GateDecl] = []
    for entry in obj.get("gates", []):
        extra = set(entry) - {"id", "expr"}
        if extra:
            raise TreeFormatError(f"unknown gate keys {sorted(extra)}", source)
        if "id" not in entry or "expr" not in entry:
            raise TreeFormatError("gate entries require id and expr", source)
        gates.append(_GateDecl(str(entry["id"]), 0, str(entry["expr"])))

    times = tuple(float(v) for v in obj.get("times", ()))
    return _assemble(
        events,
        gates,
        str(obj["top"]),
        0,
        name=str(obj.get("name", "")),
        source=source,
        times=times,
        doc_spread_pct=float(obj["spread"]) if obj.get("spread") is not None else None,
        spread_override=spread_override,
        nonstandard=bool(obj.get("nonstandard_spread", False)) or allow_nonstandard_spread,
    )


def _render_float(x: float) -> str:
    return repr(float(x))


def _render_expr(tree: FaultTree, gate: GateNode, parenthesize: bool = False) -> str:
    parts = []
    for child in gate.children:
        sub = tree.gates.get(child)
        if sub is not None and sub.inline:
            parts.append(_render_expr(tree, sub, parenthesize=True))
        else:
            parts.append(child)
    text = f" {gate.kind.value} ".join(parts)
    if parenthesize:
        return f"({text})"
    return text


def serialize_tree(tree: FaultTree) -> str:
    """Render a tree back into the canonical text document."""
    lines = []
    directive = []
    if tree.name:
        directive.append(f'name="{tree.name}"')
    if tree.default_spread is not None:
        directive.append(f"spread={_render_float(tree.default_spread.percent)}")
        if tree.default_spread.nonstandard:
            directive.append("nonstandard_spread=true")
    if tree.times:
        directive.append("times=" + ",".join(_render_float(t) for t in tree.times))
    if directive:
        lines.append("directive " + " ".join(directive))
    for event in tree.events.values():
        attrs = []
        if event.crisp_rate is not None:
            attrs.append(f"rate={_render_float(event.crisp_rate)}")
            if event.spread is not None and event.spread != tree.default_spread:
                attrs.append(f"spread={_render_float(event.spread.percent)}")
        else:
            attrs.append(
                "rate="
                + ",".join(_render_float(v) for v in event.rate.astuple())
            )
        if event.description:
            attrs.append(f'desc="{event.description}"')
        lines.append(f"event {event.id} " + " ".join(attrs))
    for gate in tree.gates.values():
        if gate.inline:
            continue
        lines.append(f"gate {gate.id} = {_render_expr(tree, gate)}")
    lines.append(f"top = {tree.top_id}")
    return "\n".join(lines) + "\n"


def dump_structured(tree: FaultTree) -> dict:
    """Structured-document form of a tree (inverse of :func:`load_structured`)."""
    events = []
    for event in tree.events.values():
        entry: dict = {"id": event.id}
        if event.crisp_rate is not None:
            entry["rate"] = event.crisp_rate
            if event.spread is not None and event.spread != tree.default_spread:
                entry["spread"] = event.spread.percent
        else:
            entry["rate"] = list(event.rate.astuple())
        if event.description:
            entry["desc"] = event.description
        events.append(entry)
    gates = [
        {"id": gate.id, "expr": _render_expr(tree, gate)}
        for gate in tree.gates.values()
        if not gate.inline
    ]
    obj: dict = {"events": events, "gates": gates, "top": tree.top_id}
    if tree.name:
        obj["name"] = tree.name
    if tree.default_spread is not None:
        obj["spread"] = tree.default_spread.percent
        if tree.default_spread.nonstandard:
            obj["nonstandard_spread"] = True
    if tree.times:
        obj["times"] = list(tree.times)
    return obj
