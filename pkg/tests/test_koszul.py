import random

import pytest
from hypothesis import given, strategies as st

from mixmult.algebra import GradedRing
from mixmult.errors import NotMMSystem
from mixmult.hilbert import dim_supp_pp
from mixmult.koszul import (
    euler_characteristic,
    euler_sum_of_pieces,
    homology_lengths,
    koszul_differentials,
    koszul_slice,
)
from mixmult.modules import (
    build_ses,
    colon_submodule,
    cyclic_quotient,
    direct_sum,
    free_module,
    graded_piece_dim,
    quotient_by_elements,
)
from mixmult.systems import sample_mm_system

from oracles import euler_piece_sum, random_linear_form, small_modules

S = GradedRing(0, (2, 2))
CROSS = cyclic_quotient(S, [S.parse("x1_1*x2_1")])


def _compose(upper, lower, p):
    """Rows of d_{j-1} ∘ d_j from sparse row matrices."""
    out = []
    for row in upper:
        acc = {}
        for k, c in row.items():
            for col, v in lower[k].items():
                acc[col] = acc.get(col, 0) + c * v
        out.append({c: v for c, v in acc.items() if (v % p if p else v)})
    return out


def test_empty_sequence_is_the_piece():
    sl = koszul_slice(CROSS, [], (2, 1))
    assert sl.chain_dims == (graded_piece_dim(CROSS, (2, 1)),)
    assert sl.differential_ranks == ()


def test_regular_element_on_a_line():
    k = GradedRing(0, (1,))
    sl = koszul_slice(free_module(k), [k.parse("x1_1")], (3,))
    assert sl.chain_dims == (1, 1) and sl.differential_ranks == (1,)
    assert sl.homology() == (0, 0)


def test_zero_multiplication_slice():
    k = GradedRing(0, (2,))
    M = cyclic_quotient(k, [k.parse("x1_1")])
    a = k.parse("x1_1")
    sl = koszul_slice(M, [a], (2,))
    assert sl.differential_ranks == (0,)
    assert sl.homology() == (graded_piece_dim(M, (2,)), graded_piece_dim(M, (1,)))


def test_stabilized_homology_of_cross_quotient():
    chi = euler_characteristic(CROSS, [S.parse("x1_2 + x1_1")])
    assert chi.homology_lengths == (1, 0)
    assert chi.value == 1


def test_regular_sequence_is_acyclic():
    xs = [S.parse("x1_1"), S.parse("x1_2")]
    lengths = homology_lengths(free_module(S), xs, (4, 3))
    assert lengths[1:] == (0, 0)


def test_chi_desk_values():
    one = GradedRing(0, (1, 1))
    assert euler_characteristic(free_module(one), []).value == 1
    xs = [S.parse("3*x1_1 - 5*x1_2")]
    assert euler_characteristic(CROSS, xs).value == 1
    nil = cyclic_quotient(S, [S.parse("x1_1^2")])
    assert euler_characteristic(nil, [S.parse("x1_1"), S.parse("x2_1 + x2_2")]).value == 0


def test_chi_refuses_non_systems():
    with pytest.raises(NotMMSystem):
        euler_characteristic(free_module(S), [S.parse("x1_1")])


def test_zero_module_has_zero_chi():
    zero = cyclic_quotient(S, [S.one()])
    assert euler_characteristic(zero, [S.parse("x1_1")]).value == 0


@given(small_modules(summands=True), st.integers(0, 10 ** 6))
def test_differentials_square_to_zero(M, seed):
    rng = random.Random(seed)
    xs = [random_linear_form(rng, M.ring, rng.randrange(M.ring.d)) for _ in range(3)]
    n = tuple(rng.randint(1, 3) for _ in range(M.ring.d))
    dims, mats = koszul_differentials(M, xs, n)
    p = M.ring.field.p
    for j in range(1, len(mats)):
        assert not any(_compose(mats[j], mats[j - 1], p))


@given(small_modules(summands=True), st.integers(0, 10 ** 6))
def test_euler_identity_on_every_slice(M, seed):
    rng = random.Random(seed)
    blocks = [rng.randrange(M.ring.d) for _ in range(rng.randint(0, 3))]
    xs = [random_linear_form(rng, M.ring, b) for b in blocks]
    n = tuple(rng.randint(0, 3) for _ in range(M.ring.d))
    h = homology_lengths(M, xs, n)
    assert all(v >= 0 for v in h)
    alt = sum((-1) ** i * v for i, v in enumerate(h))
    assert alt == euler_sum_of_pieces(M, xs, n) == euler_piece_sum(M, blocks, n)


def _type_for(M, extra=0):
    s = dim_supp_pp(M)
    s = 0 if s == float("-inf") else int(s)
    k = [0] * M.ring.d
    for t in range(s + extra):
        k[t % M.ring.d] += 1
    return tuple(k)


@given(small_modules(), st.integers(0, 10 ** 6))
def test_chi_is_additive_on_short_exact_sequences(M, seed):
    rng = random.Random(seed)
    xs = sample_mm_system(M, _type_for(M), rng)
    b = rng.randrange(M.ring.d)
    g = random_linear_form(rng, M.ring, b) * M.ring.var(b, 0)
    sub, mid, quo = build_ses(M, [{(0, e): c for e, c in g.terms.items()}])
    chi = lambda N: euler_characteristic(N, xs).value
    assert chi(mid) == chi(sub) + chi(quo)


@given(small_modules(), st.integers(0, 10 ** 6))
def test_chi_recursion_and_regular_case(M, seed):
    rng = random.Random(seed)
    xs = list(sample_mm_system(M, _type_for(M, extra=1), rng))
    a, rest = xs[0], xs[1:]
    colon = colon_submodule(M, a)
    quotient = quotient_by_elements(M, [a])
    whole = euler_characteristic(M, xs).value
    assert whole == euler_characteristic(quotient, rest).value - euler_characteristic(colon, rest).value
    if colon.rank == 0:
        assert whole == euler_characteristic(quotient, rest).value


@given(small_modules(), st.integers(0, 10 ** 6))
def test_chi_vanishes_when_first_element_is_nilpotent(M, seed):
    rng = random.Random(seed)
    ring = M.ring
    b = rng.randrange(ring.d)
    nil = ring.var(b, 0)
    N = quotient_by_elements(M, [nil * nil], check_degree=False)
    rest_type = list(_type_for(quotient_by_elements(N, [nil])))
    rest = list(sample_mm_system(quotient_by_elements(N, [nil]), tuple(rest_type), rng))
    assert euler_characteristic(N, [nil] + rest).value == 0
