"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py``; a PASS/FAIL line per criterion is
printed in the terminal summary.
"""

import itertools
import math
import random

import mpmath
import numpy as np
import pytest

from dagcheck import corpus
from dagcheck.dataset import Dataset
from dagcheck.demos import bias_demo
from dagcheck.diagnostics import Verdict, check_assumptions, shear_dataset, shear_strength, vif
from dagcheck.dsl import DslError, parse, serialize
from dagcheck.estimate import iv_estimate, ols, population_ols
from dagcheck.identify import check_instrument, classify_roles, find_adjustment_sets
from dagcheck.paths import CausalQuery, Path, classify_path, d_separated
from dagcheck.scm import (
    Scm,
    implied_covariance,
    partial_correlation,
    path_tracing_covariance,
    total_effect,
)

from .conftest import random_dag, random_document

criterion = pytest.mark.criterion


def _unit(entry):
    return Scm.from_document(corpus.load(entry).document)


def _random_scm(rng, max_nodes=8, p=0.35):
    dag = random_dag(rng, rng.randint(2, max_nodes), p)
    return Scm(dag, {e: rng.uniform(0.5, 2.0) for e in dag.edges}, {v: 1.0 for v in dag.nodes})


@criterion(1, "d-separation agrees with vanishing partial correlation on 200+ random DAGs")
def test_criterion_1_dsep_vs_partial_correlation():
    rng = random.Random(20240601)
    mismatches = []
    checked = 0
    for _ in range(220):
        scm = _random_scm(rng)
        cov = implied_covariance(scm)
        nodes = scm.dag.nodes
        for x, y in itertools.combinations(nodes, 2):
            rest = [v for v in nodes if v not in (x, y)]
            for k in range(min(3, len(rest)) + 1):
                for s in itertools.combinations(rest, k):
                    sep = d_separated(scm.dag, x, y, s).separated
                    vanishes = abs(partial_correlation(cov, x, y, s)) < 1e-9
                    checked += 1
                    if sep != vanishes:
                        mismatches.append((nodes, x, y, s))
    assert checked > 1000
    assert mismatches == []


@criterion(2, "collider case: pcorr(L,P) = 0 and pcorr(L,P|S) = -0.5")
def test_criterion_2_collider():
    cov = implied_covariance(_unit("bridges"))
    assert partial_correlation(cov, "L", "P") == 0.0
    assert abs(partial_correlation(cov, "L", "P", ["S"]) - (-0.5)) <= 1e-9


@criterion(3, "confounder case: slopes 1.5 / 1.0 and minimal set {Z}")
def test_criterion_3_confounder():
    e = corpus.load("flood")
    cov = implied_covariance(Scm.from_document(e.document))
    assert abs(population_ols(cov, "F", ["N"])["N"] - 1.5) <= 1e-9
    assert abs(population_ols(cov, "F", ["N", "Z"])["N"] - 1.0) <= 1e-9
    assert find_adjustment_sets(e.document.dag, e.default_query).minimal_sets == (frozenset({"Z"}),)


@criterion(4, "mediator/instrument case: total effect 1.0, R is an instrument, IV = 1.0")
def test_criterion_4_mediator_instrument():
    scm = _unit("quake")
    q = CausalQuery("E", "D")
    assert abs(total_effect(scm, "E", "D") - 1.0) <= 1e-9
    verdict = check_instrument(scm.dag, "R", q)
    assert verdict.is_instrument and len(verdict.conditions) == 3
    assert abs(iv_estimate(implied_covariance(scm), "R", "E", "D") - 1.0) <= 1e-9


@criterion(5, "moderator case: stratified slope difference 0.8 +- 0.05 at n = 1e5")
def test_criterion_5_moderator():
    report = bias_demo("fire", n=100_000, seed=0)
    diff = report.row("slope difference (T=1 minus T=0)").observed
    assert abs(diff - 0.8) <= 0.05


@criterion(6, "teaching-graph reconstruction: adjustment, roles, collider, d-separation")
def test_criterion_6_fig1():
    dag = corpus.load("fig1").document.dag
    q = CausalQuery("A", "C")
    assert set(find_adjustment_sets(dag, q).minimal_sets) == {frozenset({"B"}), frozenset({"D"})}
    assert "B" in classify_roles(dag, q).confounders
    assert classify_path(Path.parse("A <- B -> D <- E")).colliders == {"D"}
    assert d_separated(dag, "A", "E", set()).separated
    assert not d_separated(dag, "A", "E", {"D"}).separated


@criterion(7, "path tracing equals matrix covariance within 1e-9")
def test_criterion_7_path_tracing():
    scms = [_unit(e) for e in corpus.CORPUS_IDS if e != "fire"]
    rng = random.Random(7)
    scms += [_random_scm(rng) for _ in range(100)]
    worst = 0.0
    for scm in scms:
        cov = implied_covariance(scm)
        for x, y in itertools.combinations_with_replacement(scm.dag.nodes, 2):
            worst = max(worst, abs(path_tracing_covariance(scm, x, y) - cov[x, y]))
    assert worst <= 1e-9


@criterion(8, "parser round-trip on 500 random documents; errors carry line/column")
def test_criterion_8_round_trip():
    rng = random.Random(8)
    for _ in range(500):
        doc = random_document(rng, max_nodes=12)
        assert parse(serialize(doc)) == doc
    for bad in ["dag g { A -> }", "dag g {\n A -> A\n}", "dag g { A [x=1] }", "dag", "dag g { A -> B  B -> A }"]:
        with pytest.raises(DslError) as info:
            parse(bad)
        assert info.value.line >= 1 and info.value.column >= 1


@criterion(9, "shear formula value 1.168e5 N within 0.1% and monotone in every argument")
def test_criterion_9_shear():
    mpmath.mp.dps = 30
    oracle = float(mpmath.mpf("0.66") * mpmath.cbrt(mpmath.mpf("0.01")) * mpmath.sqrt(30) * 300 * 500)
    value = shear_strength(0.01, 30, 300, 500)
    assert abs(value - 1.168e5) / 1.168e5 <= 1e-3
    assert value == pytest.approx(oracle, rel=1e-12)
    rng = np.random.default_rng(9)
    lows = {"rho": 0.005, "fc": 20.0, "bw": 200.0, "d": 300.0}
    highs = {"rho": 0.03, "fc": 60.0, "bw": 600.0, "d": 900.0}
    names = list(lows)
    for i in range(1000):
        args = {k: rng.uniform(lows[k], highs[k]) for k in names}
        k = names[i % 4]
        bumped = dict(args)
        bumped[k] = args[k] * (1 + rng.uniform(1e-6, 0.5))
        assert shear_strength(**bumped) > shear_strength(**args)


@criterion(10, "diagnostics: log-log exponents, raw-linear linearity fail, orthogonal VIF = 1")
def test_criterion_10_diagnostics():
    data = shear_dataset(2000, seed=0)
    logged = Dataset(data.columns, np.log(data.values))
    fit = ols(logged, "Vc", ["rho", "fc", "bw", "d"])
    assert max(abs(a - b) for a, b in zip(fit.coefficients, (1 / 3, 1 / 2, 1.0, 1.0))) <= 1e-6
    raw = check_assumptions(data, ols(data, "Vc", ["rho", "fc", "bw", "d"]))
    assert raw["linearity"].verdict is Verdict.FAIL
    levels = np.array([[i, j, k] for i in (-1, 1) for j in (-1, 1) for k in (-1, 1)], float)
    out = vif(Dataset(("a", "b", "c"), levels), ["a", "b", "c"])
    assert all(abs(v - 1.0) <= 0.05 for v in out.values())
    rng = np.random.default_rng(10)
    m = rng.normal(size=(10_000, 3))
    out = vif(Dataset(("a", "b", "c"), m), ["a", "b", "c"])
    assert all(abs(v - 1.0) <= 0.05 for v in out.values())
    assert math.isfinite(raw["collinearity"].statistic)
