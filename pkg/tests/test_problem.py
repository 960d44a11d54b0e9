import pytest
from hypothesis import given, strategies as st

from mixmult.corpus import ideal_instances, random_graded_document, types_between
from mixmult.errors import ParseError
from mixmult.problem import Task, emit_problem, parse_problem

GRADED = """\
# two blocks, one cross relation
ring char=0 blocks=(2,2)
module quotient=[x1_1*x2_1]   # trailing comment
task mixedmult k=(1,0)
task three-routes k=(0,1) seed=4 window=2
"""


def test_parse_graded_document():
    doc = parse_problem(GRADED)
    assert doc.kind == "graded" and doc.blocks == (2, 2) and doc.characteristic == 0
    assert doc.quotients == (("x1_1*x2_1",),)
    assert [t.name for t in doc.tasks] == ["mixedmult", "three-routes"]
    assert doc.tasks[1].get("seed") == "4" and doc.tasks[1].get("missing", "-") == "-"
    assert doc.module().rank == 1


def test_repeated_quotients_form_a_direct_sum():
    doc = parse_problem("ring char=7 blocks=(1)\nmodule quotient=[] quotient=[x1_1^2]\n")
    assert doc.module().rank == 2 and doc.characteristic == 7


def test_parse_ideal_document():
    doc = parse_problem("ideals vars=(x,y) J=[x,y] I1=[x^2,y] I2=[x] N=quotient[x*y]+quotient[]\n"
                        "task idealmult k0=0 k=(1,0)\n")
    assert doc.kind == "ideals" and doc.I == (("x^2", "y"), ("x",))
    assert doc.family().d == 2 and doc.family().N.rank == 2


@pytest.mark.parametrize("text, line, column", [
    ("ring char=0 blocks=(2)\nmodule quotient=[x1_1+x1_2^2]\n", 2, 18),
    ("ring char=0 blocks=(2)\nmodule quotient=[x1_1]\ntask mixedmult k=(1\n", 3, 16),
    ("ring char=0 blocks=(2)\nmodule quotient=[]\ntask frobnicate\n", 3, 6),
    ("ring char=0 blocks=(2)\nmodule quotient=[]\ntask dim bogus=1\n", 3, 10),
    ("ring char=4 blocks=(2)\nmodule quotient=[]\n", 1, 1),
    ("ring char=0 blocks=(2)\n", 1, 1),
    ("module quotient=[]\n", 1, 1),
    ("ideals vars=(x,y) J=[x] I1=[y]\n", 1, 21),
    ("ideals vars=(x,y) J=[x,y] I2=[y]\n", 1, 1),
    ("shape circle\n", 1, 1),
])
def test_parse_errors_carry_positions(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_problem(text)
    assert info.value.line == line
    assert info.value.column == column


def test_emit_is_canonical():
    doc = parse_problem(GRADED)
    text = emit_problem(doc)
    assert "#" not in text
    assert parse_problem(text) == doc
    assert emit_problem(parse_problem(text)) == text


@given(st.integers(0, 10 ** 6))
def test_round_trip_of_random_documents(seed):
    blocks = random_graded_document(seed).blocks
    doc = random_graded_document(seed, tasks=[
        Task("mixedmult", (("k", "(" + ",".join(map(str, k)) + ")"),))
        for k in types_between(len(blocks), 1, 1)])
    text = emit_problem(doc)
    again = parse_problem(text)
    assert again == doc
    assert emit_problem(again) == text


def test_round_trip_of_ideal_instances():
    for _, doc in ideal_instances():
        once = parse_problem(emit_problem(doc))
        assert parse_problem(emit_problem(once)) == once
        assert once.family().d == doc.family().d
