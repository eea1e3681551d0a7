import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dagcheck import corpus
from dagcheck.dsl import DslError, DslSemanticError, DslSyntaxError, parse, serialize, to_dot
from dagcheck.errors import CycleFound, SelfLoop
from dagcheck.graph import Moderation
from dagcheck.identify import classify_roles

from .conftest import random_document


def test_parse_quake_one_liner():
    doc = parse("dag quake { R -> E  E -> M  M -> D  exposure E  outcome D }")
    assert len(doc.dag.nodes) == 4
    assert len(doc.dag.edges) == 3
    assert (doc.query.exposure, doc.query.outcome) == ("E", "D")


def test_self_loop_is_rejected_with_location():
    with pytest.raises(DslError) as info:
        parse("dag bad { A -> A }")
    assert info.value.line == 1
    assert info.value.column == 11
    assert isinstance(info.value, DslSemanticError)
    assert isinstance(info.value.cause, SelfLoop)


def test_coefficients_and_noise():
    doc = parse("dag scm { L -> S [coef=1.0]  P -> S [coef=1.0]  noise S 1.0 }")
    assert doc.coefficients == {("L", "S"): 1.0, ("P", "S"): 1.0}
    assert doc.noise == {"S": 1.0}


def test_cycle_error_points_at_an_edge():
    text = "dag c {\n  A -> B\n  B -> A\n}\n"
    with pytest.raises(DslSemanticError) as info:
        parse(text)
    assert isinstance(info.value.cause, CycleFound)
    assert info.value.line in (2, 3)
    assert info.value.column == 3


def test_moderation_and_labels():
    doc = parse('dag f { G [label="load"] G -> Y  T ~> (G -> Y) [coef=0.8, label="heat"] }')
    m = Moderation("T", "G", "Y")
    assert doc.dag.moderations == (m,)
    assert doc.mod_coefficients == {m: 0.8}
    assert doc.mod_labels == {m: "heat"}
    assert doc.dag.node("G").label == "load"
    assert ("T", "Y") not in doc.dag.edges


def test_comments_and_whitespace_are_ignored():
    a = parse("dag g { A -> B }")
    b = parse("# header\ndag g {\n\n  A   ->\n B # trailing\n}\n")
    assert a == b


def test_numeric_literals():
    doc = parse("dag g { A -> B [coef=-1.5e-3] noise A +2 noise B .5 }")
    assert doc.coefficients[("A", "B")] == -1.5e-3
    assert doc.noise == {"A": 2.0, "B": 0.5}


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("dag g { A -> }", 1, 14),
        ("dag g {\n  A -> B [weight=2]\n}", 2, 11),
        ("dag g { A -> B", 1, 15),
        ("dag { A }", 1, 5),
        ("dag g { A $ B }", 1, 11),
        ('dag g { A [label="open }', 1, 18),
        ("dag g { A -> B [coef=x] }", 1, 22),
        ("graph g { }", 1, 1),
        ("dag g { exposure exposure }", 1, 18),
    ],
)
def test_syntax_errors_carry_location(text, line, col):
    with pytest.raises(DslSyntaxError) as info:
        parse(text)
    assert (info.value.line, info.value.column) == (line, col)


@pytest.mark.parametrize(
    "text",
    [
        "dag g { A -> B  exposure A  outcome A }",
        "dag g { A -> B  exposure Q }",
        "dag g { A -> B  noise A -1 }",
        "dag g { A [coef=1] }",
        "dag g { A -> B  A -> B }",
        "dag g { A -> B  T ~> (B -> A) }",
        "dag g { A -> B  exposure A  exposure B }",
    ],
)
def test_semantic_errors_carry_location(text):
    with pytest.raises(DslSemanticError) as info:
        parse(text)
    err = info.value
    lines = text.split("\n")
    assert 1 <= err.line <= len(lines)
    assert 1 <= err.column <= len(lines[err.line - 1]) + 1


@pytest.mark.parametrize("entry", corpus.CORPUS_IDS)
def test_corpus_round_trip(entry):
    doc = corpus.load(entry).document
    assert parse(serialize(doc)) == doc
    assert serialize(parse(serialize(doc))) == serialize(doc)


@pytest.mark.parametrize("seed", range(80))
def test_random_round_trip(seed):
    doc = random_document(random.Random(seed))
    text = serialize(doc)
    assert parse(text) == doc
    assert serialize(parse(text)) == text


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet="dag{}->~()[]=,#\"ABxy01.e \n", max_size=40))
def test_parse_errors_point_inside_input(text):
    try:
        parse(text)
    except DslError as err:
        lines = text.split("\n")
        assert 1 <= err.line <= len(lines)
        assert 1 <= err.column <= len(lines[err.line - 1]) + 1


def test_serialize_rejects_reserved_names():
    from dagcheck.dsl import DagDocument
    from dagcheck.graph import build_dag

    doc = DagDocument("g", build_dag(["latent", "B"], [("latent", "B")]))
    with pytest.raises(ValueError):
        serialize(doc)


def test_dot_bridges_and_plain():
    doc = corpus.load("bridges").document
    dot = to_dot(doc)
    assert dot.startswith("digraph bridges {")
    assert "  L -> S;" in dot and "  P -> S;" in dot
    assert "fillcolor" not in dot
    assert to_dot(doc) == dot


def test_dot_fire_moderation_edge():
    dot = to_dot(corpus.load("fire").document)
    assert '"G->Y" [shape=point' in dot
    assert 'G -> "G->Y" [arrowhead=none];' in dot
    assert '"G->Y" -> Y;' in dot
    assert 'T -> "G->Y" [style=dashed, arrowhead=odot, label="0.8"];' in dot


def test_dot_highlights_roles():
    e = corpus.load("quake")
    report = classify_roles(e.document.dag, e.default_query)
    dot = to_dot(e.document, report)
    assert 'xlabel="mediator"' in dot
    assert 'xlabel="instrument"' in dot
    assert 'xlabel="exposure"' in dot
