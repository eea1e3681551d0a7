"""Text format for causal diagrams.

Grammar (whitespace and newlines are insignificant outside strings, ``#``
starts a comment that runs to the end of the line)::

    doc       := 'dag' NAME '{' stmt* '}'
    stmt      := nodeDecl | edgeDecl | modDecl | marker | noiseDecl
    nodeDecl  := ID attrs?
    edgeDecl  := ID '->' ID attrs?
    modDecl   := ID '~>' '(' ID '->' ID ')' attrs?
    marker    := ('exposure' | 'outcome' | 'adjusted' | 'latent') ID
    noiseDecl := 'noise' ID REAL
    attrs     := '[' key '=' value (',' key '=' value)* ']'    keys: label, coef

Nodes that appear only in edges or as moderators are declared implicitly. The statement
keywords (``dag``, ``exposure``, ``outcome``, ``adjusted``, ``latent``,
``noise``) are reserved and cannot be used as node names.

Example::

    dag quake {
      R -> E  E -> M  M -> D
      exposure E  outcome D
    }
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import CycleFound, DagError, DuplicateEdge, GraphError, SelfLoop
from .graph import Dag, Edge, Moderation, Node, build_dag
from .paths import CausalQuery

MARKERS = ("exposure", "outcome", "adjusted", "latent")
KEYWORDS = frozenset(MARKERS + ("noise", "dag"))
ATTR_KEYS = ("label", "coef")


class DslError(DagError):
    """Parse failure with a 1-based source location."""

    kind = "error"

    def __init__(self, message: str, line: int, column: int):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{self.kind} at line {line}, column {column}: {message}")


class DslSyntaxError(DslError):
    kind = "syntax error"


class DslSemanticError(DslError):
    kind = "semantic error"

    def __init__(self, message: str, line: int, column: int, cause: Exception | None = None):
        self.cause = cause
        super().__init__(message, line, column)


# -- documents -------------------------------------------------------------

@dataclass(frozen=True)
class DagDocument:
    """A parsed ``.dag`` file: the graph plus optional query markers and model numbers."""

    name: str
    dag: Dag
    exposure: str | None = None
    outcome: str | None = None
    adjusted: frozenset[str] = frozenset()
    coefficients: dict[Edge, float] = field(default_factory=dict)
    noise: dict[str, float] = field(default_factory=dict)
    mod_coefficients: dict[Moderation, float] = field(default_factory=dict)
    edge_labels: dict[Edge, str] = field(default_factory=dict)
    mod_labels: dict[Moderation, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "adjusted", frozenset(self.adjusted))
        dag = self.dag
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", self.name):
            raise ValueError(f"invalid document name {self.name!r}")
        for v in (self.exposure, self.outcome, *self.adjusted):
            if v is not None and v not in dag:
                raise ValueError(f"marker references undeclared node {v!r}")
        if self.exposure is not None and self.exposure == self.outcome:
            raise ValueError("exposure and outcome must differ")
        if self.adjusted & {self.exposure, self.outcome}:
            raise ValueError("adjusted set overlaps the exposure/outcome")
        for e, c in self.coefficients.items():
            if e not in dag.edges:
                raise ValueError(f"coefficient on missing edge {e}")
            _check_finite(c)
        for v, s in self.noise.items():
            if v not in dag:
                raise ValueError(f"noise for undeclared node {v!r}")
            if not (math.isfinite(s) and s > 0):
                raise ValueError(f"noise variance for {v} must be positive, got {s}")
        for m, c in self.mod_coefficients.items():
            if m not in dag.moderations:
                raise ValueError(f"coefficient on missing moderation {m}")
            _check_finite(c)
        for e in self.edge_labels:
            if e not in dag.edges:
                raise ValueError(f"label on missing edge {e}")
        for m in self.mod_labels:
            if m not in dag.moderations:
                raise ValueError(f"label on missing moderation {m}")

    @property
    def query(self) -> CausalQuery | None:
        if self.exposure is None or self.outcome is None:
            return None
        return CausalQuery(self.exposure, self.outcome, self.adjusted)


def _check_finite(x: float) -> None:
    if not math.isfinite(x):
        raise ValueError(f"non-finite number {x}")


# -- lexer -----------------------------------------------------------------

class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<arrow>->)
  | (?P<mod>~>)
  | (?P<number>[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}()\[\]=,])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            if text[pos] == '"':
                raise DslSyntaxError("unterminated string", line, col)
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(chunk if kind == "punct" else kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


def _unquote(tok: Token) -> str:
    body = tok.text[1:-1]
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            nxt = body[i + 1]
            if nxt not in _ESCAPES:
                raise DslSyntaxError(f"unknown escape \\{nxt}", tok.line, tok.column + i + 1)
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t") + '"'


# -- parser ----------------------------------------------------------------

_DESCRIBE = {"eof": "end of input", "ident": "identifier", "number": "number", "string": "string",
             "arrow": "'->'", "mod": "'~>'"}


def _describe(kind: str) -> str:
    return _DESCRIBE.get(kind, repr(kind))


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self, k: int = 0) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos = min(self.pos + 1, len(self.tokens) - 1)
        return tok

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise DslSyntaxError(
                f"expected {what or _describe(kind)}, found {_describe(tok.kind) if tok.kind != 'ident' else repr(tok.text)}",
                tok.line,
                tok.column,
            )
        return self.advance()

    def expect_node(self) -> Token:
        tok = self.expect("ident", "node name")
        if tok.text in KEYWORDS:
            raise DslSyntaxError(f"reserved word {tok.text!r} cannot be a node name", tok.line, tok.column)
        return tok

    def attrs(self) -> dict[str, tuple[object, Token]]:
        out: dict[str, tuple[object, Token]] = {}
        if self.peek().kind != "[":
            return out
        self.advance()
        while True:
            key = self.expect("ident", "attribute name")
            if key.text not in ATTR_KEYS:
                raise DslSyntaxError(
                    f"unknown attribute {key.text!r} (expected one of {', '.join(ATTR_KEYS)})",
                    key.line,
                    key.column,
                )
            if key.text in out:
                raise DslSyntaxError(f"attribute {key.text!r} given twice", key.line, key.column)
            self.expect("=")
            if key.text == "coef":
                val = self.expect("number", "number")
                out["coef"] = (float(val.text), key)
            else:
                val = self.peek()
                if val.kind == "string":
                    out["label"] = (_unquote(self.advance()), key)
                elif val.kind == "ident":
                    out["label"] = (self.advance().text, key)
                else:
                    raise DslSyntaxError("expected string or identifier for label", val.line, val.column)
            sep = self.peek()
            if sep.kind == ",":
                self.advance()
                continue
            self.expect("]", "',' or ']'")
            return out


@dataclass
class _Builder:
    name: str
    nodes: dict[str, dict] = field(default_factory=dict)
    edges: dict[Edge, Token] = field(default_factory=dict)
    coefficients: dict[Edge, float] = field(default_factory=dict)
    edge_labels: dict[Edge, str] = field(default_factory=dict)
    mods: dict[Moderation, Token] = field(default_factory=dict)
    mod_coefficients: dict[Moderation, float] = field(default_factory=dict)
    mod_labels: dict[Moderation, str] = field(default_factory=dict)
    markers: list[tuple[str, Token]] = field(default_factory=list)
    noise: dict[str, tuple[float, Token]] = field(default_factory=dict)

    def declare(self, tok: Token, label: str | None = None, label_tok: Token | None = None) -> None:
        entry = self.nodes.setdefault(tok.text, {"label": None, "latent": False, "tok": tok})
        if label is not None:
            if entry["label"] is not None and entry["label"] != label:
                raise DslSemanticError(f"node {tok.text!r} has two different labels",
                                       label_tok.line, label_tok.column)
            entry["label"] = label


def parse(text: str) -> DagDocument:
    """Parse ``.dag`` source text into a validated :class:`DagDocument`.

    Raises :class:`DslSyntaxError` for malformed text and
    :class:`DslSemanticError` for well-formed text describing an invalid
    graph; both carry ``line`` and ``column``.
    """
    p = _Parser(text)
    kw = p.expect("ident", "'dag'")
    if kw.text != "dag":
        raise DslSyntaxError(f"expected 'dag', found {kw.text!r}", kw.line, kw.column)
    name = p.expect("ident", "graph name")
    p.expect("{")
    b = _Builder(name.text)

    while p.peek().kind != "}":
        tok = p.peek()
        if tok.kind == "eof":
            raise DslSyntaxError("expected '}' before end of input", tok.line, tok.column)
        head = p.expect("ident", "statement")
        if head.text in MARKERS:
            b.markers.append((head.text, p.expect_node()))
        elif head.text == "noise":
            node = p.expect_node()
            val = p.expect("number")
            if node.text in b.noise:
                raise DslSemanticError(f"noise for {node.text!r} given twice", head.line, head.column)
            v = float(val.text)
            if not (math.isfinite(v) and v > 0):
                raise DslSemanticError(f"noise variance must be positive, got {val.text}", val.line, val.column)
            b.noise[node.text] = (v, node)
        elif head.text == "dag":
            raise DslSyntaxError("reserved word 'dag' cannot start a statement", head.line, head.column)
        elif p.peek().kind == "arrow":
            _check_node_name(head)
            p.advance()
            tail = p.expect_node()
            attrs = p.attrs()
            _edge(b, head, tail, attrs)
        elif p.peek().kind == "mod":
            _check_node_name(head)
            p.advance()
            p.expect("(")
            src = p.expect_node()
            p.expect("arrow")
            dst = p.expect_node()
            p.expect(")")
            attrs = p.attrs()
            _moderation(b, head, src, dst, attrs)
        else:
            _check_node_name(head)
            attrs = p.attrs()
            if "coef" in attrs:
                t = attrs["coef"][1]
                raise DslSemanticError("'coef' is not valid on a node declaration", t.line, t.column)
            label = attrs.get("label")
            b.declare(head, *(label if label else (None, None)))
    p.advance()
    tail = p.peek()
    if tail.kind != "eof":
        raise DslSyntaxError(f"unexpected {tail.text!r} after end of graph", tail.line, tail.column)
    return _assemble(b)


def _check_node_name(tok: Token) -> None:
    if tok.text in KEYWORDS:
        raise DslSyntaxError(f"reserved word {tok.text!r} cannot be a node name", tok.line, tok.column)


def _edge(b: _Builder, head: Token, tail: Token, attrs) -> None:
    if head.text == tail.text:
        err = SelfLoop(head.text)
        raise DslSemanticError(str(err), head.line, head.column, err)
    e = (head.text, tail.text)
    if e in b.edges:
        err = DuplicateEdge(e)
        raise DslSemanticError(str(err), head.line, head.column, err)
    b.declare(head)
    b.declare(tail)
    b.edges[e] = head
    if "coef" in attrs:
        b.coefficients[e] = attrs["coef"][0]
    if "label" in attrs:
        b.edge_labels[e] = attrs["label"][0]


def _moderation(b: _Builder, head: Token, src: Token, dst: Token, attrs) -> None:
    m = Moderation(head.text, src.text, dst.text)
    if m in b.mods:
        raise DslSemanticError(f"duplicate moderation {m}", head.line, head.column)
    b.declare(head)
    b.mods[m] = head
    if "coef" in attrs:
        b.mod_coefficients[m] = attrs["coef"][0]
    if "label" in attrs:
        b.mod_labels[m] = attrs["label"][0]


def _assemble(b: _Builder) -> DagDocument:
    exposure = outcome = None
    adjusted: set[str] = set()
    latent: set[str] = set()
    for kind, tok in b.markers:
        if tok.text not in b.nodes:
            raise DslSemanticError(f"{kind} marker references undeclared node {tok.text!r}", tok.line, tok.column)
        if kind == "exposure":
            if exposure is not None and exposure != tok.text:
                raise DslSemanticError("exposure declared twice", tok.line, tok.column)
            exposure = tok.text
        elif kind == "outcome":
            if outcome is not None and outcome != tok.text:
                raise DslSemanticError("outcome declared twice", tok.line, tok.column)
            outcome = tok.text
        elif kind == "adjusted":
            adjusted.add(tok.text)
        else:
            latent.add(tok.text)
    for v, (_, tok) in b.noise.items():
        if v not in b.nodes:
            raise DslSemanticError(f"noise references undeclared node {v!r}", tok.line, tok.column)
    if exposure is not None and exposure == outcome:
        tok = next(t for k, t in b.markers if k == "outcome")
        raise DslSemanticError("exposure and outcome must differ", tok.line, tok.column)
    clash = adjusted & {exposure, outcome}
    if clash:
        tok = next(t for k, t in b.markers if k == "adjusted" and t.text in clash)
        raise DslSemanticError(f"cannot adjust for query endpoint {tok.text!r}", tok.line, tok.column)

    nodes = [Node(v, v in latent, e["label"]) for v, e in b.nodes.items()]
    try:
        dag = build_dag(nodes, list(b.edges), [])
    except CycleFound as exc:
        first = (exc.cycle[0], exc.cycle[1])
        tok = b.edges[first]
        raise DslSemanticError(str(exc), tok.line, tok.column, exc) from exc
    for m, tok in b.mods.items():
        try:
            build_dag(nodes, list(b.edges), [m])
        except GraphError as exc:
            raise DslSemanticError(str(exc), tok.line, tok.column, exc) from exc
    dag = build_dag(nodes, list(b.edges), list(b.mods))
    return DagDocument(
        name=b.name,
        dag=dag,
        exposure=exposure,
        outcome=outcome,
        adjusted=frozenset(adjusted),
        coefficients=dict(b.coefficients),
        noise={v: s for v, (s, _) in b.noise.items()},
        mod_coefficients=dict(b.mod_coefficients),
        edge_labels=dict(b.edge_labels),
        mod_labels=dict(b.mod_labels),
    )


# -- serialization ---------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def _attrs(label: str | None, coef: float | None) -> str:
    parts = []
    if coef is not None:
        parts.append(f"coef={_fmt(coef)}")
    if label is not None:
        parts.append(f"label={_quote(label)}")
    return f" [{', '.join(parts)}]" if parts else ""


def serialize(doc: DagDocument) -> str:
    """Canonical text for ``doc``.

    Statements appear in a fixed order (nodes, edges, moderations, latent
    markers, noise, query markers), each group in canonical node order, one
    statement per line. ``parse(serialize(doc)) == doc``.
    """
    dag = doc.dag
    for v in dag.nodes:
        if v in KEYWORDS:
            raise ValueError(f"node name {v!r} is reserved in the text format")
    lines = [f"dag {doc.name} {{"]
    for v in dag.nodes:
        lines.append(f"  {v}{_attrs(dag.node(v).label, None)}")
    for e in dag.sorted_edges:
        lines.append(f"  {e[0]} -> {e[1]}{_attrs(doc.edge_labels.get(e), doc.coefficients.get(e))}")
    for m in dag.moderations:
        lines.append(
            f"  {m.moderator} ~> ({m.target_from} -> {m.target_to})"
            f"{_attrs(doc.mod_labels.get(m), doc.mod_coefficients.get(m))}"
        )
    for v in dag.nodes:
        if dag.is_latent(v):
            lines.append(f"  latent {v}")
    for v in dag.sort_nodes(doc.noise):
        lines.append(f"  noise {v} {_fmt(doc.noise[v])}")
    if doc.exposure is not None:
        lines.append(f"  exposure {doc.exposure}")
    if doc.outcome is not None:
        lines.append(f"  outcome {doc.outcome}")
    for v in dag.sort_nodes(doc.adjusted):
        lines.append(f"  adjusted {v}")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- DOT -------------------------------------------------------------------

_DOT_KEYWORDS = {"node", "edge", "graph", "digraph", "subgraph", "strict"}

ROLE_COLORS = {
    "exposure": "#a6dba0",
    "outcome": "#92c5de",
    "confounder": "#f4a582",
    "collider": "#ca0020",
    "mediator": "#fddb6d",
    "instrument": "#c2a5cf",
    "moderator": "#bababa",
}


def _dot_id(s: str) -> str:
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", s) and s.lower() not in _DOT_KEYWORDS:
        return s
    return _quote(s)


def _dot_attrs(pairs: list[tuple[str, str]]) -> str:
    if not pairs:
        return ""
    return " [" + ", ".join(f"{k}={v}" for k, v in pairs) + "]"


def to_dot(doc: DagDocument, highlights=None) -> str:
    """Render ``doc`` as a DOT digraph.

    ``highlights`` is an optional :class:`~dagcheck.identify.RoleReport`; when
    given, exposure, outcome and role-carrying nodes are filled with distinct
    colors. A moderated edge is split at a point-shaped midpoint node which the
    moderator reaches by a dashed edge.
    """
    dag = doc.dag
    lines = [f"digraph {_dot_id(doc.name)} {{", "  rankdir=LR;", "  node [shape=ellipse];"]

    roles: dict[str, list[str]] = {}
    if highlights is not None:
        q = highlights.query
        roles.setdefault(q.exposure, []).append("exposure")
        roles.setdefault(q.outcome, []).append("outcome")
        for v in dag.nodes:
            for r in highlights.roles_of(v):
                roles.setdefault(v, []).append(r)

    for v in dag.nodes:
        info = dag.node(v)
        attrs = []
        if info.label is not None:
            attrs.append(("label", _quote(info.label)))
        if info.latent:
            attrs.append(("style", "dashed"))
        if v in roles:
            style = "\"filled,dashed\"" if info.latent else "filled"
            attrs = [a for a in attrs if a[0] != "style"]
            attrs.append(("style", style))
            attrs.append(("fillcolor", _quote(ROLE_COLORS[roles[v][0]])))
            attrs.append(("xlabel", _quote("/".join(roles[v]))))
        lines.append(f"  {_dot_id(v)}{_dot_attrs(attrs)};")

    moderated = {m.target for m in dag.moderations}
    for e in dag.sorted_edges:
        u, v = e
        label = doc.edge_labels.get(e)
        coef = doc.coefficients.get(e)
        text = label if label is not None else (_fmt(coef) if coef is not None else None)
        if e in moderated:
            mid = _quote(f"{u}->{v}")
            lines.append(f"  {mid} [shape=point, width=0.05];")
            first = [("arrowhead", "none")]
            if text is not None:
                first.append(("label", _quote(text)))
            lines.append(f"  {_dot_id(u)} -> {mid}{_dot_attrs(first)};")
            lines.append(f"  {mid} -> {_dot_id(v)};")
        else:
            attrs = [("label", _quote(text))] if text is not None else []
            lines.append(f"  {_dot_id(u)} -> {_dot_id(v)}{_dot_attrs(attrs)};")
    for m in dag.moderations:
        mid = _quote(f"{m.target_from}->{m.target_to}")
        attrs = [("style", "dashed"), ("arrowhead", "odot")]
        c = doc.mod_coefficients.get(m)
        label = doc.mod_labels.get(m)
        if label is not None or c is not None:
            attrs.append(("label", _quote(label if label is not None else _fmt(c))))
        lines.append(f"  {_dot_id(m.moderator)} -> {mid}{_dot_attrs(attrs)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
