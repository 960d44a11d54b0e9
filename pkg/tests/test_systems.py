import random
from itertools import permutations

import pytest
from hypothesis import given, strategies as st

from mixmult.algebra import GradedRing
from mixmult.errors import (
    DimDropFails,
    GenericityExhausted,
    HypothesisFailed,
    NotMMSystem,
    TypeTooSmall,
)
from mixmult.hilbert import dim_supp_pp, mixed_multiplicity
from mixmult.koszul import euler_characteristic
from mixmult.modules import cyclic_quotient, direct_sum, free_module
from mixmult.systems import (
    ElementSequence,
    build_filter_regular_sequence,
    certify_mm_system,
    decomposition_formula_check,
    filter_regular_length_formula,
    filter_regularity,
    is_filter_regular,
    multiplicity_symbol,
    reduction_formula_check,
    sample_generic,
    sample_mm_system,
    verify_equality_theorem,
)

from oracles import small_modules

S = GradedRing(0, (2, 2))
FREE = free_module(S)
CROSS = cyclic_quotient(S, [S.parse("x1_1*x2_1")])
POINT = cyclic_quotient(S, [S.parse(v) for v in ("x1_1", "x1_2", "x2_1", "x2_2")])
SKEW = S.parse("x1_1 + x1_2")


def _dim(M):
    s = dim_supp_pp(M)
    return 0 if s == float("-inf") else int(s)


def _types(d, total):
    out = []
    def go(prefix, left):
        if len(prefix) == d - 1:
            out.append(tuple(prefix) + (left,))
            return
        for v in range(left + 1):
            go(prefix + [v], left - v)
    go([], total)
    return out


def test_sample_generic_is_seeded_and_linear_in_one_block():
    a = sample_generic(S, 1, 42)
    assert a == sample_generic(S, 1, 42)
    assert a != sample_generic(S, 1, 43)
    assert a.multidegree() == (0, 1) and len(a.terms) == 2
    assert all(c != 0 for c in a.terms.values())


def test_element_sequence_records_type():
    seq = ElementSequence.of(S, [S.parse("x2_1"), SKEW, S.parse("x2_2")])
    assert seq.type == (1, 2) and len(seq) == 3


def test_filter_regular_examples():
    assert is_filter_regular(FREE, S.parse("x1_1"))
    assert is_filter_regular(CROSS, SKEW)
    assert not is_filter_regular(CROSS, S.parse("x1_1"))
    # the colon is nonzero but of finite length, so it does not count
    padded = direct_sum(FREE, POINT)
    fr = filter_regularity(padded, S.parse("x1_1"))
    assert fr.regular and fr.saturation_contained and not fr.vacuous
    assert filter_regularity(POINT, S.parse("x1_1")).vacuous


def test_certify_examples():
    assert not certify_mm_system(FREE, [S.parse("x1_1")]).is_mm_system
    cert = certify_mm_system(FREE, [S.parse("x1_1"), S.parse("x2_1")], with_flags=True)
    assert cert.is_mm_system and cert.dim_after == 0 and cert.filter_regular_flags == (True, True)
    assert certify_mm_system(CROSS, [SKEW]).is_mm_system
    assert certify_mm_system(POINT, []).dim_after == float("-inf")


def test_symbol_examples():
    assert multiplicity_symbol(FREE, [S.parse("x1_1"), S.parse("x2_2")]) == 1
    assert multiplicity_symbol(CROSS, [SKEW]) == 1
    assert multiplicity_symbol(CROSS, [S.parse("x2_1 - x2_2")]) == 1
    assert multiplicity_symbol(POINT, []) == 0  # finite length: P vanishes
    with pytest.raises(NotMMSystem):
        multiplicity_symbol(FREE, [S.parse("x1_1")])


def test_build_filter_regular_sequence():
    seq = build_filter_regular_sequence(FREE, (1, 1), 5)
    assert seq.type == (1, 1)
    assert certify_mm_system(FREE, seq, with_flags=True).filter_regular_flags == (True, True)


def test_genericity_exhausted_when_type_is_too_small():
    with pytest.raises(GenericityExhausted):
        sample_mm_system(FREE, (1, 0), 0, retries=3)


def test_equality_theorem_desk_values():
    out = verify_equality_theorem(FREE, (1, 1), 3)
    assert out["holds"] and out["E"] == 1 and out["form"] == "e"
    out = verify_equality_theorem(CROSS, (1, 1), 3)
    assert out["holds"] and out["E"] == 0 and out["form"] == "E"
    with pytest.raises(TypeTooSmall):
        verify_equality_theorem(FREE, (1, 0))


def test_filter_regular_length_examples():
    out = filter_regular_length_formula(CROSS, (1, 0), 1)
    assert out["holds"] and out["length"] == 1 and out["dim_quotient"] == 0
    out = filter_regular_length_formula(CROSS, (2, 0), 1)
    assert out["holds"] and out["E"] == 0 and out["dim_quotient"] == float("-inf")


def test_reduction_formula_examples():
    out = reduction_formula_check(CROSS, SKEW, (1, 0))
    assert out["holds"] and out["filter_regular"] and (out["E"], out["E_quotient"], out["E_colon"]) == (1, 1, 0)
    with pytest.raises(DimDropFails):
        reduction_formula_check(CROSS, S.parse("x1_1"), (1, 0))
    with pytest.raises(ValueError):
        reduction_formula_check(CROSS, SKEW, (0, 1))


def test_reduction_formula_with_torsion_colon():
    # x1_1 kills a copy of the residue field, which carries no multiplicity
    M = direct_sum(CROSS, POINT)
    out = reduction_formula_check(M, SKEW, (1, 0))
    assert out["holds"] and out["E"] == 1


def test_decomposition_examples():
    out = decomposition_formula_check(CROSS, [SKEW])
    assert out["holds"] and out["e"] == 1 and out["corrections"] == [0] and out["prefix_dims"] == [1, 0]
    with pytest.raises(HypothesisFailed):
        decomposition_formula_check(CROSS, [SKEW, S.parse("x2_1")])
    with pytest.raises(NotMMSystem):
        decomposition_formula_check(CROSS, [S.parse("x1_1")])


def test_decomposition_with_a_non_regular_step():
    # the element x1_1 + x1_2 has a nonzero colon on the second summand
    M = direct_sum(CROSS, cyclic_quotient(S, [S.parse("x1_1 + x1_2"), S.parse("x2_1")]))
    out = decomposition_formula_check(M, [SKEW])
    assert out["holds"]
    assert out["e"] == mixed_multiplicity(M, (1, 0)).value


@given(small_modules(summands=True), st.integers(0, 10 ** 6), st.integers(0, 1))
def test_three_routes_agree(M, seed, extra):
    for k in _types(M.ring.d, _dim(M) + extra):
        assert verify_equality_theorem(M, k, seed)["holds"]


@given(small_modules(), st.integers(0, 10 ** 6))
def test_filter_regular_length_route(M, seed):
    for k in _types(M.ring.d, _dim(M)):
        assert filter_regular_length_formula(M, k, seed)["holds"]


@given(small_modules(), st.integers(0, 10 ** 6))
def test_order_of_the_system_does_not_matter(M, seed):
    k = _types(M.ring.d, _dim(M) + 1)[-1]
    xs = list(sample_mm_system(M, k, seed))
    chis = set()
    syms = set()
    rng = random.Random(seed)
    orders = list(permutations(range(len(xs))))
    for perm in rng.sample(orders, min(4, len(orders))):
        ys = [xs[i] for i in perm]
        if certify_mm_system(M, ys).is_mm_system:
            chis.add(euler_characteristic(M, ys).value)
            syms.add(multiplicity_symbol(M, ys))
    assert len(chis) <= 1 and chis == syms


@given(small_modules(), st.integers(0, 10 ** 6))
def test_chi_depends_only_on_type(M, seed):
    k = _types(M.ring.d, _dim(M))[0]
    values = {euler_characteristic(M, sample_mm_system(M, k, seed + j)).value for j in range(3)}
    assert values == {mixed_multiplicity(M, k).value}


@given(small_modules(), st.integers(0, 10 ** 6))
def test_reduction_formula_random(M, seed):
    s = _dim(M)
    if s == 0:
        return
    rng = random.Random(seed)
    k = rng.choice(_types(M.ring.d, s))
    i = rng.choice([j for j, v in enumerate(k) if v])
    a = sample_generic(M.ring, i, rng)
    try:
        out = reduction_formula_check(M, a, k)
    except DimDropFails:
        return
    assert out["holds"]
