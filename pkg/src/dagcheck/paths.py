"""Path enumeration, path classification and d-separation.

Paths are enumerated exhaustively (depth-first over the skeleton), which keeps
the open-path evidence explicit. Graphs are capped at :data:`MAX_NODES` nodes
for these searches.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .errors import LatentConditioned, QueryError, SameNode, SizeLimit, UnknownNode
from .graph import Dag

MAX_NODES = 20


class Traversal(enum.Enum):
    FORWARD = "forward"  # edge walked tail -> head
    BACKWARD = "backward"  # edge walked head -> tail

    @property
    def arrow(self) -> str:
        return "->" if self is Traversal.FORWARD else "<-"


@dataclass(frozen=True)
class Path:
    """A simple route between two nodes.

    ``nodes`` holds the visited nodes in order; ``directions[i]`` says how the
    edge between ``nodes[i]`` and ``nodes[i + 1]`` was traversed.
    """

    nodes: tuple[str, ...]
    directions: tuple[Traversal, ...]

    def __post_init__(self):
        if len(self.nodes) < 2 or len(self.directions) != len(self.nodes) - 1:
            raise ValueError("a path needs at least one edge and one direction per edge")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError(f"path {self} repeats a node")

    @property
    def steps(self) -> list[tuple[str, Traversal | None]]:
        """``(node, traversal used to reach it)`` pairs; the start node has ``None``."""
        return [(self.nodes[0], None)] + list(zip(self.nodes[1:], self.directions))

    @property
    def start(self) -> str:
        return self.nodes[0]

    @property
    def end(self) -> str:
        return self.nodes[-1]

    def edges(self) -> list[tuple[str, str]]:
        """The graph edges used, each as ``(tail, head)``."""
        out = []
        for a, b, d in zip(self.nodes, self.nodes[1:], self.directions):
            out.append((a, b) if d is Traversal.FORWARD else (b, a))
        return out

    def reversed(self) -> Path:
        flip = {Traversal.FORWARD: Traversal.BACKWARD, Traversal.BACKWARD: Traversal.FORWARD}
        return Path(self.nodes[::-1], tuple(flip[d] for d in reversed(self.directions)))

    @property
    def interior(self) -> tuple[str, ...]:
        return self.nodes[1:-1]

    def __str__(self) -> str:
        parts = [self.nodes[0]]
        for node, d in zip(self.nodes[1:], self.directions):
            parts.append(f" {d.arrow} {node}")
        return "".join(parts)

    @classmethod
    def parse(cls, text: str) -> Path:
        """Build a path from its string form, e.g. ``"A <- B -> D"``."""
        tokens = text.split()
        nodes = tokens[0::2]
        arrows = {"->": Traversal.FORWARD, "<-": Traversal.BACKWARD}
        try:
            dirs = tuple(arrows[t] for t in tokens[1::2])
        except KeyError as exc:
            raise ValueError(f"bad arrow in path {text!r}") from exc
        return cls(tuple(nodes), dirs)


class PathKind(enum.Enum):
    CAUSAL = "causal"
    NONCAUSAL = "noncausal"


@dataclass(frozen=True)
class PathClass:
    kind: PathKind
    colliders: frozenset[str] = field(default_factory=frozenset)

    @property
    def is_causal(self) -> bool:
        return self.kind is PathKind.CAUSAL


@dataclass(frozen=True)
class CausalQuery:
    exposure: str
    outcome: str
    conditioned: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "conditioned", frozenset(self.conditioned))
        if self.exposure == self.outcome:
            raise SameNode(self.exposure)
        clash = self.conditioned & {self.exposure, self.outcome}
        if clash:
            raise QueryError(f"cannot condition on query endpoint(s): {', '.join(sorted(clash))}")

    def validate(self, dag: Dag) -> None:
        for v in (self.exposure, self.outcome, *sorted(self.conditioned)):
            if v not in dag:
                raise UnknownNode(v, "query")


def check_size(dag: Dag) -> None:
    if len(dag) > MAX_NODES:
        raise SizeLimit(len(dag), MAX_NODES)


def _check_pair(dag: Dag, x: str, y: str) -> None:
    for v in (x, y):
        if v not in dag:
            raise UnknownNode(v)
    if x == y:
        raise SameNode(x)


def _check_conditioned(dag: Dag, conditioned: Iterable[str]) -> frozenset[str]:
    cond = frozenset(conditioned)
    for v in sorted(cond):
        if v not in dag:
            raise UnknownNode(v, "conditioning set")
    latent = {v for v in cond if dag.is_latent(v)}
    if latent:
        raise LatentConditioned(latent)
    return cond


def enumerate_paths(dag: Dag, x: str, y: str) -> list[Path]:
    """All simple paths between ``x`` and ``y``, ignoring edge direction.

    Ordered lexicographically by node-name sequence.
    """
    _check_pair(dag, x, y)
    check_size(dag)
    found: list[Path] = []
    nodes = [x]
    dirs: list[Traversal] = []
    on_path = {x}

    def visit(u: str) -> None:
        if u == y:
            found.append(Path(tuple(nodes), tuple(dirs)))
            return
        for w in sorted(dag.neighbors(u)):
            if w in on_path:
                continue
            d = Traversal.FORWARD if w in dag.children(u) else Traversal.BACKWARD
            nodes.append(w)
            dirs.append(d)
            on_path.add(w)
            visit(w)
            on_path.discard(w)
            nodes.pop()
            dirs.pop()

    visit(x)
    found.sort(key=lambda p: p.nodes)
    return found


def colliders_on(path: Path) -> frozenset[str]:
    # Interior node i is head-to-head when the edge arriving at it was walked
    # forward and the edge leaving it was walked backward.
    out = set()
    for i in range(1, len(path.nodes) - 1):
        if path.directions[i - 1] is Traversal.FORWARD and path.directions[i] is Traversal.BACKWARD:
            out.add(path.nodes[i])
    return frozenset(out)


def classify_path(path: Path) -> PathClass:
    causal = all(d is Traversal.FORWARD for d in path.directions)
    return PathClass(PathKind.CAUSAL if causal else PathKind.NONCAUSAL, colliders_on(path))


def _check_path(dag: Dag, path: Path) -> None:
    for v in path.nodes:
        if v not in dag:
            raise UnknownNode(v, f"path {path}")
    for e in path.edges():
        if e not in dag.edges:
            raise ValueError(f"path {path} uses {e[0]} -> {e[1]}, which is not an edge")


def is_blocked(dag: Dag, path: Path, conditioned: Iterable[str]) -> bool:
    """Whether ``path`` is blocked by ``conditioned``.

    A path is blocked when some interior non-collider is conditioned on, or
    some collider has neither itself nor any descendant in the conditioning set.
    """
    cond = _check_conditioned(dag, conditioned)
    _check_path(dag, path)
    colliders = colliders_on(path)
    for v in path.interior:
        if v in colliders:
            if v not in cond and not (dag.descendants(v) & cond):
                return True
        elif v in cond:
            return True
    return False


class DSeparation(NamedTuple):
    separated: bool
    open_paths: list[Path]

    def __bool__(self) -> bool:
        return self.separated


def d_separated(dag: Dag, x: str, y: str, conditioned: Iterable[str] = ()) -> DSeparation:
    """Test whether ``x`` and ``y`` are d-separated given ``conditioned``.

    Returns the verdict together with the paths left open; the list is empty
    exactly when the nodes are separated.
    """
    _check_pair(dag, x, y)
    cond = _check_conditioned(dag, conditioned)
    if cond & {x, y}:
        raise QueryError("conditioning set may not contain the endpoints")
    open_paths = [p for p in enumerate_paths(dag, x, y) if not is_blocked(dag, p, cond)]
    return DSeparation(not open_paths, open_paths)
