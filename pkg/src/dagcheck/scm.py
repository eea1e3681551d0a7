"""Linear-Gaussian structural causal models.

Each node is a weighted sum of its parents plus independent Gaussian noise.
A moderation ``T ~> (G -> Y)`` adds the interaction term ``mod_coef * T * G``
to the equation for ``Y``; models with moderation are no longer Gaussian, so
the closed-form covariance routines refuse them.

Two independent covariance routes are provided: matrix algebra
(:func:`implied_covariance`) and explicit path tracing over treks
(:func:`path_tracing_covariance`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.linalg import solve_triangular

from .dataset import Dataset
from .errors import ModelError, ModerationPresent, SingularMatrix, UnknownNode
from .graph import Dag, Edge, Moderation, build_dag


@dataclass(frozen=True, eq=False)
class Scm:
    dag: Dag
    coef: Mapping[Edge, float]
    noise_var: Mapping[str, float]
    mod_coef: Mapping[Moderation, float] = field(default_factory=dict)

    def __post_init__(self):
        dag = self.dag
        object.__setattr__(self, "coef", {tuple(e): float(c) for e, c in self.coef.items()})
        object.__setattr__(self, "noise_var", {v: float(s) for v, s in self.noise_var.items()})
        object.__setattr__(self, "mod_coef", {m: float(c) for m, c in self.mod_coef.items()})
        if set(self.coef) != set(dag.edges):
            missing = sorted(set(dag.edges) - set(self.coef))
            extra = sorted(set(self.coef) - set(dag.edges))
            raise ModelError(f"coefficients must match the edge set (missing {missing}, extra {extra})")
        if set(self.noise_var) != set(dag.nodes):
            raise ModelError("every node needs exactly one noise variance")
        for v, s in self.noise_var.items():
            if not (math.isfinite(s) and s > 0):
                raise ModelError(f"noise variance of {v} must be positive, got {s}")
        if set(self.mod_coef) != set(dag.moderations):
            raise ModelError("every moderation needs exactly one interaction coefficient")
        for m in dag.moderations:
            # The moderator enters the equation of target_to, so it must be
            # generated first.
            if m.moderator in dag.descendants(m.target_to):
                raise ModelError(f"moderator in {m} is a descendant of the moderated child")

    @classmethod
    def from_dag(
        cls,
        dag: Dag,
        coef: Mapping[Edge, float] | None = None,
        noise_var: Mapping[str, float] | None = None,
        mod_coef: Mapping[Moderation, float] | None = None,
        default_coef: float = 1.0,
        default_noise: float = 1.0,
        default_mod_coef: float = 1.0,
    ) -> Scm:
        """Fill unspecified parameters with defaults (unit values unless overridden)."""
        coef = dict(coef or {})
        noise_var = dict(noise_var or {})
        mod_coef = dict(mod_coef or {})
        return cls(
            dag,
            {e: coef.get(e, default_coef) for e in dag.edges},
            {v: noise_var.get(v, default_noise) for v in dag.nodes},
            {m: mod_coef.get(m, default_mod_coef) for m in dag.moderations},
        )

    @classmethod
    def from_document(cls, doc, **defaults) -> Scm:
        return cls.from_dag(doc.dag, doc.coefficients, doc.noise, doc.mod_coefficients, **defaults)

    def replace(self, **changes) -> Scm:
        kw = dict(dag=self.dag, coef=self.coef, noise_var=self.noise_var, mod_coef=self.mod_coef)
        kw.update(changes)
        return Scm(**kw)

    def coefficient_matrix(self) -> np.ndarray:
        """``A[j, i] = coef(i -> j)`` in canonical node order (strictly lower triangular)."""
        nodes = self.dag.nodes
        idx = {v: i for i, v in enumerate(nodes)}
        a = np.zeros((len(nodes), len(nodes)))
        for (u, v), c in self.coef.items():
            a[idx[v], idx[u]] = c
        return a


@dataclass(frozen=True, eq=False)
class CovMatrix:
    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "values", vals)
        if vals.shape != (len(self.labels), len(self.labels)):
            raise ValueError("covariance shape does not match labels")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate covariance labels")
        if not np.allclose(vals, vals.T, rtol=0, atol=1e-12 * max(1.0, np.abs(vals).max(initial=0))):
            raise ValueError("covariance matrix is not symmetric")
        if vals.size and np.linalg.eigvalsh(vals).min() < -1e-9 * max(1.0, np.abs(vals).max()):
            raise ValueError("covariance matrix is not positive semi-definite")
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.labels)})

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise UnknownNode(v, "covariance labels") from None

    def __getitem__(self, pair: tuple[str, str]) -> float:
        x, y = pair
        return float(self.values[self.index(x), self.index(y)])

    def sub(self, rows, cols=None) -> np.ndarray:
        cols = rows if cols is None else cols
        r = [self.index(v) for v in rows]
        c = [self.index(v) for v in cols]
        return self.values[np.ix_(r, c)]


def _require_gaussian(scm: Scm) -> None:
    if scm.dag.moderations:
        raise ModerationPresent()


def implied_covariance(scm: Scm) -> CovMatrix:
    """Population covariance ``(I - A)^-1 Omega (I - A)^-T`` of all nodes."""
    _require_gaussian(scm)
    nodes = scm.dag.nodes
    n = len(nodes)
    lower = np.eye(n) - scm.coefficient_matrix()
    # Rows of `total` hold the total effect of each noise term on each node.
    total = solve_triangular(lower, np.eye(n), lower=True, unit_diagonal=True)
    omega = np.diag([scm.noise_var[v] for v in nodes])
    sigma = total @ omega @ total.T
    return CovMatrix(nodes, (sigma + sigma.T) / 2)


def _directed_path_weights(scm: Scm, target: str) -> dict[str, float]:
    """For every node ``s``, the sum over directed paths ``s -> ... -> target``
    of coefficient products; the trivial path gives ``target`` weight 1."""
    dag = scm.dag
    weights: dict[str, float] = {}

    def walk(u: str, product: float) -> None:
        weights[u] = weights.get(u, 0.0) + product
        for p in sorted(dag.parents(u)):
            walk(p, product * scm.coef[(p, u)])

    walk(target, 1.0)
    return weights


def path_tracing_covariance(scm: Scm, x: str, y: str) -> float:
    """Covariance of ``x`` and ``y`` by tracing treks.

    Every trek has a top node ``s`` and two directed paths from ``s`` down to
    ``x`` and ``y``. Its contribution is the product of coefficients along both
    sides times the noise variance of ``s``.
    """
    _require_gaussian(scm)
    for v in (x, y):
        if v not in scm.dag:
            raise UnknownNode(v)
    to_x = _directed_path_weights(scm, x)
    to_y = _directed_path_weights(scm, y)
    return float(sum(scm.noise_var[s] * to_x[s] * to_y[s] for s in sorted(to_x.keys() & to_y.keys())))


def total_effect(scm: Scm, x: str, y: str) -> float:
    """Sum over directed paths ``x -> ... -> y`` of coefficient products."""
    for v in (x, y):
        if v not in scm.dag:
            raise UnknownNode(v)
    if x == y:
        return 1.0
    return _directed_path_weights(scm, y).get(x, 0.0)


def partial_correlation(cov: CovMatrix, x: str, y: str, given=()) -> float:
    """Partial correlation of ``x`` and ``y`` given ``given``, by Schur complement."""
    given = list(given)
    pair = [x, y]
    s = cov.sub(pair)
    if given:
        s_gg = cov.sub(given)
        s_pg = cov.sub(pair, given)
        try:
            s = s - s_pg @ np.linalg.solve(s_gg, s_pg.T)
        except np.linalg.LinAlgError as exc:
            raise SingularMatrix("conditioning block is singular") from exc
    if s[0, 0] <= 1e-12 or s[1, 1] <= 1e-12:
        raise SingularMatrix(
            f"residual variance {min(s[0, 0], s[1, 1]):.3g} after conditioning is not positive"
        )
    r = s[0, 1] / math.sqrt(s[0, 0] * s[1, 1])
    return float(min(1.0, max(-1.0, r)))


def simulation_order(scm: Scm) -> list[str]:
    """Topological order that also places each moderator before the moderated child."""
    dag = scm.dag
    extra = {(m.moderator, m.target_to) for m in dag.moderations}
    if not extra:
        return list(dag.nodes)
    aug = build_dag([dag.node(v) for v in dag.nodes], set(dag.edges) | extra)
    return list(aug.nodes)


def simulate(scm: Scm, n: int, seed: int, interventions: Mapping[str, float] | None = None) -> Dataset:
    """Draw ``n`` rows by ancestral sampling.

    Output is a pure function of ``(scm, n, seed, interventions)``. Intervened
    nodes are held at the given constant (their noise is still drawn so the
    remaining noise stream is unchanged).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    interventions = dict(interventions or {})
    for v in interventions:
        if v not in scm.dag:
            raise UnknownNode(v, "intervention")
    dag = scm.dag
    columns = list(dag.nodes)
    col = {v: i for i, v in enumerate(columns)}
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((n, len(columns)))
    values = np.empty((n, len(columns)))
    mods_by_child: dict[str, list[Moderation]] = {}
    for m in dag.moderations:
        mods_by_child.setdefault(m.target_to, []).append(m)

    for v in simulation_order(scm):
        j = col[v]
        if v in interventions:
            values[:, j] = interventions[v]
            continue
        acc = math.sqrt(scm.noise_var[v]) * noise[:, j]
        for p in sorted(dag.parents(v)):
            acc = acc + scm.coef[(p, v)] * values[:, col[p]]
        for m in mods_by_child.get(v, ()):
            acc = acc + scm.mod_coef[m] * values[:, col[m.moderator]] * values[:, col[m.target_from]]
        values[:, j] = acc
    return Dataset(tuple(columns), values, seed=seed, latent=dag.latents)
