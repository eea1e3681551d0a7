"""Variable roles relative to a causal query, and backdoor adjustment.

Roles are query-relative: the same node can be a confounder for one
exposure/outcome pair and a mediator for another. The definitions used:

* mediator: lies on a directed exposure -> ... -> outcome path;
* confounder: has a directed path to the exposure that avoids the outcome and
  a directed path to the outcome that avoids the exposure (common cause);
* collider: head-to-head node on some exposure-outcome path;
* instrument: see :func:`check_instrument`;
* moderator: declared by annotation only, and only when the moderated edge
  lies on a causal exposure -> outcome path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .errors import QueryError, UnknownNode
from .graph import Dag, Moderation
from .paths import (
    CausalQuery,
    Path,
    Traversal,
    check_size,
    colliders_on,
    d_separated,
    enumerate_paths,
    is_blocked,
)


@dataclass(frozen=True)
class RoleReport:
    query: CausalQuery
    mediators: frozenset[str]
    confounders: frozenset[str]
    colliders: tuple[tuple[str, Path], ...]
    instruments: frozenset[str]
    moderators: frozenset[str]
    unclassified: frozenset[str]
    # Every node with two or more parents, witnessed by a parent -> node <- parent
    # path. Independent of the query.
    common_effects: tuple[tuple[str, Path], ...] = ()

    @property
    def collider_nodes(self) -> frozenset[str]:
        return frozenset(c for c, _ in self.colliders)

    def roles_of(self, v: str) -> list[str]:
        out = []
        for name, members in (
            ("confounder", self.confounders),
            ("collider", self.collider_nodes),
            ("mediator", self.mediators),
            ("instrument", self.instruments),
            ("moderator", self.moderators),
        ):
            if v in members:
                out.append(name)
        return out


@dataclass(frozen=True)
class AdjustmentResult:
    query: CausalQuery
    minimal_sets: tuple[frozenset[str], ...]
    forbidden: frozenset[str]
    backdoor_paths: tuple[Path, ...] = ()

    @property
    def identifiable(self) -> bool:
        return bool(self.minimal_sets)


@dataclass(frozen=True)
class InstrumentCheck:
    name: str
    passed: bool
    reason: str


@dataclass(frozen=True)
class InstrumentVerdict:
    candidate: str
    query: CausalQuery
    conditions: tuple[InstrumentCheck, ...] = field(default_factory=tuple)

    @property
    def is_instrument(self) -> bool:
        return all(c.passed for c in self.conditions)


def _query(dag: Dag, query: CausalQuery) -> CausalQuery:
    query.validate(dag)
    return query


def mediators(dag: Dag, query: CausalQuery) -> set[str]:
    return dag.descendants(query.exposure) & dag.ancestors(query.outcome)


def confounders(dag: Dag, query: CausalQuery) -> set[str]:
    x, y = query.exposure, query.outcome
    to_x = dag.ancestors(x, avoiding={y})
    to_y = dag.ancestors(y, avoiding={x})
    return to_x & to_y


def on_causal_path(dag: Dag, query: CausalQuery, edge: tuple[str, str]) -> bool:
    x, y = query.exposure, query.outcome
    u, v = edge
    return (u == x or u in dag.descendants(x)) and (v == y or v in dag.ancestors(y))


def check_instrument(dag: Dag, z: str, query: CausalQuery) -> InstrumentVerdict:
    """Test the three graphical instrument conditions for ``z``.

    1. relevance: a directed path ``z -> ... -> exposure`` exists;
    2. exclusion: every directed path from ``z`` to the outcome passes through
       the exposure;
    3. no open path from ``z`` to the outcome once the exposure's outgoing edges
       are removed (no backdoor between instrument and outcome).
    """
    _query(dag, query)
    if z not in dag:
        raise UnknownNode(z)
    if z in (query.exposure, query.outcome):
        raise QueryError(f"instrument candidate {z!r} is a query endpoint")
    x, y = query.exposure, query.outcome

    relevant = x in dag.descendants(z)
    c1 = InstrumentCheck(
        "relevance",
        relevant,
        f"{z} has a directed path to {x}" if relevant else f"no directed path from {z} to {x}",
    )

    bypass = y in dag.descendants(z, avoiding={x})
    c2 = InstrumentCheck(
        "exclusion",
        not bypass,
        f"{z} reaches {y} without passing through {x}"
        if bypass
        else f"every directed path from {z} to {y} passes through {x}",
    )

    cut = dag.without_edges_out_of(x)
    sep = d_separated(cut, z, y)
    if sep.separated:
        reason = f"{z} and {y} are d-separated once edges out of {x} are removed"
    else:
        reason = f"open path {sep.open_paths[0]} after removing edges out of {x}"
    c3 = InstrumentCheck("independence", sep.separated, reason)
    return InstrumentVerdict(z, query, (c1, c2, c3))


def _common_effects(dag: Dag) -> list[tuple[str, Path]]:
    out = []
    for v in dag.nodes:
        ps = dag.sort_nodes(dag.parents(v))
        for a, b in combinations(ps, 2):
            out.append((v, Path((a, v, b), (Traversal.FORWARD, Traversal.BACKWARD))))
    return out


def classify_roles(dag: Dag, query: CausalQuery) -> RoleReport:
    """Assign each node its roles relative to ``query``."""
    _query(dag, query)
    x, y = query.exposure, query.outcome
    ends = {x, y}

    med = mediators(dag, query) - ends
    conf = confounders(dag, query) - ends

    colliders: list[tuple[str, Path]] = []
    for p in enumerate_paths(dag, x, y):
        for c in dag.sort_nodes(colliders_on(p)):
            colliders.append((c, p))
    colliders.sort(key=lambda cp: (dag.index(cp[0]), cp[1].nodes))

    inst = set()
    for z in dag.nodes:
        if z in ends:
            continue
        if check_instrument(dag, z, query).is_instrument:
            inst.add(z)

    mods = {m.moderator for m in dag.moderations if on_causal_path(dag, query, m.target)}

    classified = med | conf | inst | mods | {c for c, _ in colliders}
    rest = set(dag.nodes) - classified - ends
    return RoleReport(
        query=query,
        mediators=frozenset(med),
        confounders=frozenset(conf),
        colliders=tuple(colliders),
        instruments=frozenset(inst),
        moderators=frozenset(mods),
        unclassified=frozenset(rest),
        common_effects=tuple(_common_effects(dag)),
    )


def moderations_on_query(dag: Dag, query: CausalQuery) -> list[Moderation]:
    return [m for m in dag.moderations if on_causal_path(dag, query, m.target)]


def backdoor_paths(dag: Dag, query: CausalQuery) -> list[Path]:
    """Exposure-outcome paths that start with an arrow into the exposure."""
    _query(dag, query)
    return [
        p
        for p in enumerate_paths(dag, query.exposure, query.outcome)
        if p.directions[0] is Traversal.BACKWARD
    ]


def satisfies_backdoor(dag: Dag, query: CausalQuery, adjust) -> bool:
    """Backdoor criterion: no descendant of the exposure, no latent, every backdoor path blocked."""
    _query(dag, query)
    adjust = frozenset(adjust)
    if adjust & {query.exposure, query.outcome}:
        return False
    if adjust & (dag.descendants(query.exposure) | dag.latents):
        return False
    return all(is_blocked(dag, p, adjust) for p in backdoor_paths(dag, query))


def find_adjustment_sets(dag: Dag, query: CausalQuery) -> AdjustmentResult:
    """Enumerate all minimal backdoor adjustment sets.

    Candidate subsets are visited in increasing size; supersets of a set that
    already qualifies are skipped, so every returned set is minimal. When the
    query has no backdoor path the only minimal set is the empty set. An empty
    ``minimal_sets`` means no valid set exists among the observed nodes.
    """
    _query(dag, query)
    check_size(dag)
    x, y = query.exposure, query.outcome
    forbidden = frozenset(dag.latents | dag.descendants(x))
    bd = backdoor_paths(dag, query)
    if not bd:
        return AdjustmentResult(query, (frozenset(),), forbidden, ())

    candidates = [v for v in dag.nodes if v not in forbidden and v not in (x, y)]
    found: list[frozenset[str]] = []
    for k in range(len(candidates) + 1):
        for combo in combinations(candidates, k):
            s = frozenset(combo)
            if any(f <= s for f in found):
                continue
            if all(is_blocked(dag, p, s) for p in bd):
                found.append(s)
    found.sort(key=lambda s: (len(s), sorted(s)))
    return AdjustmentResult(query, tuple(found), forbidden, tuple(bd))
