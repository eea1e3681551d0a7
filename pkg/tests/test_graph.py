import itertools
import random

import pytest

from dagcheck import corpus
from dagcheck.errors import (
    CycleFound,
    DuplicateEdge,
    InvalidModeration,
    InvalidName,
    SelfLoop,
    UnknownNode,
)
from dagcheck.graph import Moderation, Node, build_dag

from .conftest import random_dag

FIG1_EDGES = [("A", "C"), ("B", "A"), ("B", "D"), ("D", "C"), ("E", "D")]


def test_two_node_chain():
    dag = build_dag(["A", "C"], [("A", "C")])
    assert dag.topological_order == ("A", "C")


def test_minimal_cycle_has_witness():
    with pytest.raises(CycleFound) as info:
        build_dag(["A", "B"], [("A", "B"), ("B", "A")])
    assert info.value.cycle == ("A", "B", "A")


def test_longer_cycle_witness_is_a_real_cycle():
    edges = [("X", "A"), ("A", "B"), ("B", "C"), ("C", "A"), ("C", "D")]
    with pytest.raises(CycleFound) as info:
        build_dag("XABCD", edges)
    cyc = info.value.cycle
    assert cyc[0] == cyc[-1]
    assert all((u, v) in edges for u, v in zip(cyc, cyc[1:]))


def test_fig1_reconstruction_is_valid():
    dag = build_dag("ABCDE", FIG1_EDGES)
    assert set(dag.edges) == set(FIG1_EDGES)
    assert dag.topological_order == ("B", "A", "E", "D", "C")


@pytest.mark.parametrize(
    "node, parents",
    [("D", {"B", "E"}), ("A", {"B"}), ("B", set()), ("E", set()), ("C", {"A", "D"})],
)
def test_fig1_parents(fig1, node, parents):
    assert fig1.parents(node) == parents


def test_fig1_children(fig1):
    assert fig1.children("B") == {"A", "D"}
    assert fig1.children("C") == set()


def test_fig1_closures(fig1):
    assert fig1.ancestors("C") == {"A", "B", "D", "E"}
    assert fig1.descendants("B") == {"A", "C", "D"}
    assert fig1.descendants("C") == set()


def test_avoiding_blocks_routes(fig1):
    # B reaches C through A and through D; avoiding both leaves nothing.
    assert fig1.descendants("B", avoiding={"A"}) == {"C", "D"}
    assert fig1.descendants("B", avoiding={"A", "D"}) == set()


@pytest.mark.parametrize("op", ["parents", "children", "ancestors", "descendants"])
def test_unknown_node(fig1, op):
    with pytest.raises(UnknownNode):
        getattr(fig1, op)("Q")


def test_validation_errors():
    with pytest.raises(SelfLoop):
        build_dag(["A"], [("A", "A")])
    with pytest.raises(DuplicateEdge):
        build_dag(["A", "B"], [("A", "B"), ("A", "B")])
    with pytest.raises(UnknownNode):
        build_dag(["A"], [("A", "B")])
    with pytest.raises(InvalidName):
        build_dag(["1A"], [])
    with pytest.raises(InvalidName):
        build_dag([""], [])


def test_names_are_case_sensitive():
    dag = build_dag(["a", "A"], [("a", "A")])
    assert dag.parents("A") == {"a"}


def test_moderation_validation():
    dag = build_dag(["G", "T", "Y"], [("G", "Y")], [Moderation("T", "G", "Y")])
    assert dag.moderations == (Moderation("T", "G", "Y"),)
    # metadata only: no edge from T
    assert dag.children("T") == set()
    with pytest.raises(InvalidModeration):
        build_dag(["G", "T", "Y"], [("G", "Y")], [("T", "Y", "G")])
    with pytest.raises(InvalidModeration):
        build_dag(["G", "Y"], [("G", "Y")], [("G", "G", "Y")])
    with pytest.raises(UnknownNode):
        build_dag(["G", "Y"], [("G", "Y")], [("T", "G", "Y")])


def test_latent_flag_and_equality():
    a = build_dag([Node("U", latent=True), "X"], [("U", "X")])
    b = build_dag(["X", Node("U", latent=True)], [("U", "X")])
    assert a == b
    assert a.latents == {"U"}
    assert a != build_dag(["U", "X"], [("U", "X")])


def test_topological_ties_are_lexicographic():
    dag = build_dag(["c", "b", "a"], [])
    assert dag.nodes == ("a", "b", "c")


@pytest.mark.parametrize("seed", range(60))
def test_closure_properties_on_random_dags(seed):
    rng = random.Random(seed)
    dag = random_dag(rng, rng.randint(1, 10), rng.uniform(0.1, 0.6))
    pos = {v: i for i, v in enumerate(dag.topological_order)}
    for u, v in dag.edges:
        assert pos[u] < pos[v]
    anc = {v: dag.ancestors(v) for v in dag.nodes}
    desc = {v: dag.descendants(v) for v in dag.nodes}
    for v in dag.nodes:
        assert v not in anc[v] and v not in desc[v]
    for u, v in itertools.product(dag.nodes, repeat=2):
        assert (u in anc[v]) == (v in desc[u])


@pytest.mark.parametrize("entry", corpus.CORPUS_IDS)
def test_corpus_graphs_build_and_reversal_creates_cycle(entry):
    dag = corpus.load(entry).document.dag
    rebuilt = build_dag([dag.node(v) for v in dag.nodes], dag.edges, dag.moderations)
    assert rebuilt == dag
    for u, v in dag.sorted_edges:
        with pytest.raises(CycleFound) as info:
            build_dag([dag.node(x) for x in dag.nodes], list(dag.edges) + [(v, u)])
        assert {u, v} <= set(info.value.cycle)


def test_without_edges_out_of(fig1):
    cut = fig1.without_edges_out_of("D")
    assert cut.children("D") == set()
    assert cut.parents("D") == {"B", "E"}
