"""Validated directed acyclic graphs.

A :class:`Dag` is immutable once built. Use :func:`build_dag` to construct one;
it checks names, endpoints, duplicate edges, self-loops and acyclicity, and
caches a deterministic topological order (ties broken by node name).

Moderation annotations ride along as metadata. They never contribute edges, so
path enumeration, d-separation and adjustment ignore them.
"""

from __future__ import annotations

import heapq
import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import (
    CycleFound,
    DuplicateEdge,
    GraphError,
    InvalidModeration,
    InvalidName,
    SelfLoop,
    UnknownNode,
)

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

Edge = tuple[str, str]


@dataclass(frozen=True)
class Node:
    name: str
    latent: bool = False
    label: str | None = None


@dataclass(frozen=True)
class Moderation:
    """``moderator`` changes the strength of the edge ``target_from -> target_to``."""

    moderator: str
    target_from: str
    target_to: str

    @property
    def target(self) -> Edge:
        return (self.target_from, self.target_to)

    def __str__(self) -> str:
        return f"{self.moderator} ~> ({self.target_from} -> {self.target_to})"


def check_name(name) -> str:
    if not isinstance(name, str) or not NAME_RE.match(name):
        raise InvalidName(name)
    return name


class Dag:
    """Immutable DAG with cached adjacency and topological order.

    Node iteration (``dag.nodes``) follows the topological order with ties
    broken lexicographically, so every report built from it is deterministic.
    """

    __slots__ = ("_info", "_edges", "_moderations", "_order", "_index", "_parents", "_children")

    def __init__(self, info, edges, moderations, order, parents, children):
        self._info: dict[str, Node] = info
        self._edges: frozenset[Edge] = edges
        self._moderations: tuple[Moderation, ...] = moderations
        self._order: tuple[str, ...] = order
        self._index = {v: i for i, v in enumerate(order)}
        self._parents: dict[str, frozenset[str]] = parents
        self._children: dict[str, frozenset[str]] = children

    # -- basic accessors -------------------------------------------------
    @property
    def nodes(self) -> tuple[str, ...]:
        return self._order

    @property
    def edges(self) -> frozenset[Edge]:
        return self._edges

    @property
    def sorted_edges(self) -> list[Edge]:
        return sorted(self._edges, key=lambda e: (self._index[e[0]], self._index[e[1]]))

    @property
    def moderations(self) -> tuple[Moderation, ...]:
        return self._moderations

    @property
    def topological_order(self) -> tuple[str, ...]:
        return self._order

    def node(self, v: str) -> Node:
        self._require(v)
        return self._info[v]

    def is_latent(self, v: str) -> bool:
        return self.node(v).latent

    @property
    def latents(self) -> frozenset[str]:
        return frozenset(v for v, n in self._info.items() if n.latent)

    def index(self, v: str) -> int:
        self._require(v)
        return self._index[v]

    def sort_nodes(self, names: Iterable[str]) -> list[str]:
        """Sort ``names`` by the canonical node order."""
        return sorted(names, key=self.index)

    def __len__(self) -> int:
        return len(self._order)

    def __contains__(self, v) -> bool:
        return v in self._info

    def __iter__(self) -> Iterator[str]:
        return iter(self._order)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dag):
            return NotImplemented
        return (
            self._info == other._info
            and self._edges == other._edges
            and set(self._moderations) == set(other._moderations)
        )

    def __hash__(self) -> int:
        return hash((frozenset(self._info.values()), self._edges, frozenset(self._moderations)))

    def __repr__(self) -> str:
        edges = ", ".join(f"{u}->{v}" for u, v in self.sorted_edges)
        return f"Dag(nodes={list(self._order)}, edges=[{edges}])"

    def _require(self, v: str) -> None:
        if v not in self._info:
            raise UnknownNode(v)

    # -- neighbourhoods --------------------------------------------------
    def parents(self, v: str) -> frozenset[str]:
        self._require(v)
        return self._parents[v]

    def children(self, v: str) -> frozenset[str]:
        self._require(v)
        return self._children[v]

    def neighbors(self, v: str) -> frozenset[str]:
        self._require(v)
        return self._parents[v] | self._children[v]

    def ancestors(self, v: str, avoiding: Iterable[str] = ()) -> set[str]:
        """All nodes with a directed path into ``v``, excluding ``v``.

        Paths may not pass through any node in ``avoiding``; those nodes are
        excluded from the result as well.
        """
        return self._closure(v, self._parents, avoiding)

    def descendants(self, v: str, avoiding: Iterable[str] = ()) -> set[str]:
        """All nodes reachable from ``v`` by a directed path, excluding ``v``."""
        return self._closure(v, self._children, avoiding)

    def _closure(self, v, adjacency, avoiding) -> set[str]:
        self._require(v)
        blocked = set(avoiding)
        for b in blocked:
            self._require(b)
        seen: set[str] = set()
        queue = deque([v])
        while queue:
            u = queue.popleft()
            for w in adjacency[u]:
                if w not in seen and w not in blocked and w != v:
                    seen.add(w)
                    queue.append(w)
        return seen

    # -- derived graphs --------------------------------------------------
    def without_edges_out_of(self, v: str) -> Dag:
        """Copy of the graph with every edge leaving ``v`` removed."""
        self._require(v)
        edges = [e for e in self._edges if e[0] != v]
        mods = [m for m in self._moderations if m.target_from != v]
        return build_dag(self._info.values(), edges, mods)

    def relabel(self, mapping: dict[str, str]) -> Dag:
        nodes = [Node(mapping[n.name], n.latent, n.label) for n in self._info.values()]
        edges = [(mapping[u], mapping[v]) for u, v in self._edges]
        mods = [Moderation(mapping[m.moderator], mapping[m.target_from], mapping[m.target_to])
                for m in self._moderations]
        return build_dag(nodes, edges, mods)


def build_dag(
    nodes: Iterable[str | Node],
    edges: Iterable[Edge],
    moderations: Iterable[Moderation | tuple[str, str, str]] = (),
) -> Dag:
    """Validate the inputs and return a :class:`Dag`.

    Raises
    ------
    InvalidName, UnknownNode, SelfLoop, DuplicateEdge, CycleFound, InvalidModeration
    """
    info: dict[str, Node] = {}
    for n in nodes:
        node = n if isinstance(n, Node) else Node(n)
        check_name(node.name)
        if node.name in info:
            raise GraphError(f"node {node.name!r} declared twice")
        info[node.name] = node

    edge_set: set[Edge] = set()
    for u, v in edges:
        for end in (u, v):
            if end not in info:
                raise UnknownNode(end, f"edge {u} -> {v}")
        if u == v:
            raise SelfLoop(u)
        if (u, v) in edge_set:
            raise DuplicateEdge((u, v))
        edge_set.add((u, v))

    parents: dict[str, set[str]] = {v: set() for v in info}
    children: dict[str, set[str]] = {v: set() for v in info}
    for u, v in edge_set:
        parents[v].add(u)
        children[u].add(v)

    order = _topological_order(info, parents, children)

    mods: list[Moderation] = []
    for m in moderations:
        mod = m if isinstance(m, Moderation) else Moderation(*m)
        for end in (mod.moderator, mod.target_from, mod.target_to):
            if end not in info:
                raise UnknownNode(end, f"moderation {mod}")
        if mod.target not in edge_set:
            raise InvalidModeration(f"moderation {mod} targets a missing edge")
        if mod.moderator in mod.target:
            raise InvalidModeration(f"moderation {mod}: moderator is an endpoint of its target")
        if mod in mods:
            raise InvalidModeration(f"moderation {mod} declared twice")
        mods.append(mod)
    index = {v: i for i, v in enumerate(order)}
    mods.sort(key=lambda m: (index[m.target_from], index[m.target_to], index[m.moderator]))

    return Dag(
        info,
        frozenset(edge_set),
        tuple(mods),
        tuple(order),
        {v: frozenset(p) for v, p in parents.items()},
        {v: frozenset(c) for v, c in children.items()},
    )


def _topological_order(info, parents, children) -> list[str]:
    indegree = {v: len(parents[v]) for v in info}
    heap = [v for v, d in indegree.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for w in children[u]:
            indegree[w] -= 1
            if indegree[w] == 0:
                heapq.heappush(heap, w)
    if len(order) < len(info):
        remaining = {v for v in info if indegree[v] > 0}
        raise CycleFound(_witness_cycle(remaining, children))
    return order


def _witness_cycle(remaining: set[str], children) -> list[str]:
    # Kahn's leftovers always contain a cycle, though some leftovers only sit
    # downstream of it, so try each start node until the DFS closes a loop.
    finished: set[str] = set()
    for start in sorted(remaining):
        if start in finished:
            continue
        stack = [start]
        iters = [iter(sorted(c for c in children[start] if c in remaining))]
        while stack:
            w = next(iters[-1], None)
            if w is None:
                finished.add(stack.pop())
                iters.pop()
                continue
            if w in stack:
                return stack[stack.index(w):] + [w]
            if w in finished:
                continue
            stack.append(w)
            iters.append(iter(sorted(c for c in children[w] if c in remaining)))
    raise AssertionError("no cycle among remaining nodes")  # pragma: no cover
