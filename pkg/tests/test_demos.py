import pytest

from dagcheck.demos import CASES, bias_demo
from dagcheck.errors import UnknownCase


def test_bridges():
    r = bias_demo("bridges")
    assert r.passed
    assert [row.observed for row in r.rows] == pytest.approx([0.0, -0.5], abs=1e-9)


def test_flood():
    r = bias_demo("flood")
    assert r.passed
    assert [row.observed for row in r.rows] == pytest.approx([1.5, 1.0, 1.0], abs=1e-9)


def test_quake():
    r = bias_demo("quake")
    assert r.passed
    assert r.row("total effect E->D (path tracing)").observed == pytest.approx(1.0, abs=1e-9)
    assert r.row("IV estimate via R").observed == pytest.approx(1.0, abs=1e-9)


def test_fire():
    r = bias_demo("fire", n=100_000, seed=0)
    assert r.passed
    diff = r.row("slope difference (T=1 minus T=0)").observed
    assert diff == pytest.approx(0.8, abs=0.05)


def test_fire_is_seed_deterministic():
    a = bias_demo("fire", n=5000, seed=4)
    b = bias_demo("fire", n=5000, seed=4)
    assert a.as_dict() == b.as_dict()


def test_render_lists_every_row():
    for case in CASES:
        r = bias_demo(case, n=2000)
        text = r.render()
        assert all(row.quantity in text for row in r.rows)
        assert text.splitlines()[-1] in ("overall: PASS", "overall: FAIL")


def test_unknown_case():
    with pytest.raises(UnknownCase):
        bias_demo("tsunami")
