import pytest
from hypothesis import given, settings, strategies as st

from mixmult.errors import (
    HypothesisFailed,
    NotPrimary,
    StabilizationUncertain,
    TypeTooSmall,
)
from mixmult.ideals import (
    IdealFamily,
    associated_length,
    expected_degree,
    grid_fit,
    has_zero_leading_form,
    ideal_mixed_multiplicity,
    is_filter_regular_for,
    is_rees_superficial,
    is_weak_fc,
    lattice_oracle,
    samuel_multiplicity,
    verify_fc_length_route,
    verify_ideal_decomposition,
    verify_ideal_main_theorem,
    verify_primary_case,
)
from mixmult.problem import parse_problem


def family(line: str) -> IdealFamily:
    return parse_problem(f"ideals char=0 {line}\n").family()


def e(fam, k0, *k):
    return ideal_mixed_multiplicity(fam, k0, k).value


M_M = family("vars=(x,y) J=[x,y] I1=[x,y]")
M_X = family("vars=(x,y) J=[x,y] I1=[x]")
M_X2Y = family("vars=(x,y) J=[x,y] I1=[x^2,y]")
CUSP = family("vars=(x,y) J=[x,y] I1=[x^2,y^2] N=quotient[x^3-y^3]")
LINES = family("vars=(x,y) J=[x,y] I1=[x] N=quotient[x*y]")


def test_maximal_ideal_twice():
    assert (e(M_M, 1, 0), e(M_M, 0, 1)) == (1, 1)
    assert associated_length(M_M, 2, (3,)) == 6


def test_non_primary_second_ideal():
    assert (e(M_X2Y, 0, 1), e(M_X2Y, 1, 0)) == (1, 1)
    assert samuel_multiplicity(family("vars=(x,y) J=[x^2,y]"), family("vars=(x,y) J=[x^2,y]").N) == 2


def test_principal_ideal_value_is_zero():
    # ℓ(m^{n0}(x)^n / m^{n0+1}(x)^n) = n0 + 1 does not depend on n
    assert e(M_X, 0, 1) == 0
    assert e(M_X, 1, 0) == 1
    for n0 in range(4):
        for n in range(4):
            assert associated_length(M_X, n0, (n,)) == n0 + 1 == lattice_oracle(M_X, n0, (n,))


def test_samuel_values():
    assert samuel_multiplicity(M_M, M_M.N) == 1
    assert samuel_multiplicity(CUSP, CUSP.N) == 3
    assert samuel_multiplicity(LINES, LINES.N) == 2


def test_cusp_values():
    assert expected_degree(CUSP) == 0
    assert e(CUSP, 0, 0) == 3


def test_dimension_bridge_matches_fitted_degree():
    for fam in (M_M, M_X, M_X2Y, LINES):
        assert grid_fit(fam, None, expected_degree(fam)).degree == expected_degree(fam)
    assert expected_degree(M_M) == 1
    assert expected_degree(family("vars=(x,y,z) J=[x,y,z] I1=[x,y]")) == 2


def test_type_too_small_and_extension():
    with pytest.raises(TypeTooSmall):
        ideal_mixed_multiplicity(M_M, 0, (0,))
    big = ideal_mixed_multiplicity(M_M, 1, (1,))
    assert big.value == 0 and big.extended


def test_non_primary_J_is_rejected():
    with pytest.raises(NotPrimary):
        IdealFamily(M_M.ring, [M_M.ring.parse("x")], [], M_M.N)


def test_superficial_and_weak_fc_examples():
    R = M_M.ring
    x, y = R.parse("x"), R.parse("y")
    assert is_rees_superficial(M_M, x, 1)
    assert is_weak_fc(M_M, x + y, 0)
    assert has_zero_leading_form(M_M, x * y, 1)
    assert not has_zero_leading_form(M_M, x, 1)
    # on the line pair x kills y, which is (x)-torsion but not m-torsion
    assert is_filter_regular_for(LINES, x)
    lines_m = family("vars=(x,y) J=[x,y] I1=[x,y] N=quotient[x*y]")
    assert not is_filter_regular_for(lines_m, x)
    assert is_filter_regular_for(lines_m, x + y)


def test_three_routes_on_desk_instances():
    assert verify_ideal_main_theorem(M_M, 0, (1,), 1)["holds"]
    assert verify_ideal_main_theorem(M_X2Y, 1, (0,), 1)["holds"]
    out = verify_fc_length_route(M_X, 0, (1,), 1)
    assert out["holds"] and out["e"] == 0 and out["dim_after"] != 1


def test_decomposition_and_primary_case():
    out = verify_ideal_decomposition(M_X2Y, 0, (1,), 1)
    assert out["holds"] and out["e"] == 1
    with pytest.raises(HypothesisFailed):
        verify_ideal_decomposition(M_X, 0, (1,), 1)
    with pytest.raises(HypothesisFailed):
        verify_primary_case(M_X, 1, (0,), 1)
    out = verify_primary_case(M_M, 0, (1,), 1)
    assert out["holds"] and out["parameter_part"]


def test_undersized_grid_is_uncertain():
    fam = family("vars=(x,y) J=[x,y] I1=[x] N=quotient[]+quotient[x^3]")
    with pytest.raises(StabilizationUncertain):
        ideal_mixed_multiplicity(fam, 1, (0,), offset=0)
    # the x^3 summand is I-torsion and drops out
    assert e(fam, 1, 0) == 1


def _mono(a, b):
    return "1" if a == b == 0 else "*".join(s for s in (a and f"x^{a}", b and f"y^{b}") if s)


monomials = st.tuples(st.integers(0, 2), st.integers(0, 2)).filter(lambda t: t != (0, 0))


@settings(max_examples=15)
@given(st.integers(1, 3), st.integers(1, 3), st.lists(monomials, min_size=1, max_size=2),
       st.lists(monomials, max_size=1), st.tuples(st.integers(0, 3), st.integers(0, 3)))
def test_associated_length_matches_lattice_count(a, b, I1, rels, point):
    I1s = ",".join(_mono(*m) for m in I1)
    N = ",".join(_mono(*m) for m in rels)
    fam = family(f"vars=(x,y) J=[x^{a},y^{b}] I1=[{I1s}] N=quotient[{N}]")
    n0, n = point
    assert associated_length(fam, n0, (n,)) == lattice_oracle(fam, n0, (n,))


def test_sequence_search_on_undersized_grid_is_uncertain():
    fam = family("vars=(x,y) J=[x,y] I1=[y] N=quotient[]+quotient[x^3]")
    with pytest.raises(StabilizationUncertain):
        verify_ideal_main_theorem(fam, 1, (0,), 0, offset=0)
    assert verify_ideal_main_theorem(fam, 1, (0,), 0)["holds"]
