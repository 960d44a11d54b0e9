import random

import sympy
from hypothesis import given, strategies as st

from math import comb

from mixmult.algebra import GradedRing, enumerate_monomials
from mixmult.groebner import (
    NEG_INF,
    FreeModule,
    GroebnerBasis,
    buchberger,
    colon,
    combine,
    intersect,
    krull_dim_gb,
    mul_poly_vec,
    normal_form,
    poly_from_vec,
    saturate_submodule,
    syzygies,
    vec_from_poly,
)
from mixmult.modules import Presentation, graded_piece_dim

from oracles import SMALL_PRIME, random_homogeneous, span_piece_dim

Q3 = GradedRing(0, (3,), names=("x", "y", "z"))
F1 = FreeModule(Q3, [(0,)])


def gb_of(ring, texts):
    return buchberger([ring.parse(t) for t in texts], FreeModule(ring, [(0,) * ring.d]))


def _sympy_ideal_gb(ring, polys):
    syms = sympy.symbols(ring.names)
    exprs = [sympy.sympify(str(f).replace("^", "**")) for f in polys]
    return sympy.groebner(exprs, *syms, order="grevlex", domain="QQ"), syms


def test_matches_sympy_on_a_fixed_ideal():
    polys = [Q3.parse(t) for t in ["x^2 - y*z", "x*y - z^2", "y^3 - 2*x*z^2"]]
    gb = buchberger(polys, F1)
    ref, syms = _sympy_ideal_gb(Q3, polys)
    ours = [sympy.sympify(str(poly_from_vec(Q3, v)).replace("^", "**")) for v in gb.elements]
    assert all(ref.contains(f) for f in ours)
    for g in ref.exprs:
        integral = sympy.Poly(g, *syms).clear_denoms()[1].as_expr()
        f = Q3.parse(str(sympy.expand(integral)).replace("**", "^"))
        assert normal_form(f, gb).is_zero()


@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_generators_reduce_to_zero_and_basis_stays_inside(seed, count):
    rng = random.Random(seed)
    ring = GradedRing(SMALL_PRIME, (3,))
    F = FreeModule(ring, [(0,)])
    gens = [random_homogeneous(rng, ring, (rng.randint(1, 3),), rng.randint(1, 3)) for _ in range(count)]
    gb = buchberger(gens, F)
    assert all(normal_form(g, gb).is_zero() for g in gens)
    M = Presentation(ring, [(0,)], [vec_from_poly(g) for g in gens])
    for v in gb.elements:
        deg = F.vec_degree(v)
        bigger = Presentation(ring, [(0,)], list(M.relations) + [v])
        assert span_piece_dim(bigger, deg) == span_piece_dim(M, deg)


@given(st.integers(0, 10 ** 6))
def test_normal_forms_are_unique_representatives(seed):
    rng = random.Random(seed)
    ring = GradedRing(SMALL_PRIME, (2, 1))
    gens = [random_homogeneous(rng, ring, (1, 1), 2), random_homogeneous(rng, ring, (2, 0), 2)]
    gb = buchberger(gens, FreeModule(ring, [(0, 0)]))
    f = random_homogeneous(rng, ring, (2, 1), 3)
    g = f + gens[0] * ring.var(0, 0) - gens[1] * ring.var(1, 0)
    assert normal_form(f, gb) == normal_form(g, gb)


def test_syzygies_of_monomials():
    polys = [Q3.parse(t) for t in ["x*y", "y*z", "x*z"]]
    vecs = [vec_from_poly(f) for f in polys]
    _, syz = syzygies(F1, vecs)
    assert syz
    for s in syz:
        assert not combine(s, vecs, 0)


def test_colon_by_linear_algebra():
    U = [vec_from_poly(Q3.parse(t)) for t in ["x^2*y", "x*z^2", "y^3"]]
    a = Q3.parse("x + y")
    C = colon(F1, U, a)
    UM = Presentation(Q3, [(0,)], U)
    for v in C.elements:
        assert not UM.gb.nf(mul_poly_vec(a, v, 0))
    # dim (U : a)_n = dim F_n - rank of v -> a*v in (F/U)_{n+1}
    CM = Presentation(Q3, [(0,)], list(C.elements))
    for n in range(5):
        free = comb(n + 2, 2)
        images = [mul_poly_vec(a, {(0, e): 1}, 0) for e in enumerate_monomials(Q3, (n,))]
        with_images = Presentation(Q3, [(0,)], U + images)
        img_rank = span_piece_dim(UM, (n + 1,)) - span_piece_dim(with_images, (n + 1,))
        assert free - graded_piece_dim(CM, (n,)) == free - img_rank


def test_saturation_strips_embedded_component():
    R = GradedRing(0, (2,), names=("x", "y"))
    F = FreeModule(R, [(0,)])
    sat = saturate_submodule(F, [vec_from_poly(R.parse(t)) for t in ["x^2", "x*y"]], [R.parse("x"), R.parse("y")])
    assert sat == buchberger([R.parse("x")], F)


def test_intersection_of_principal_ideals_is_lcm():
    R = GradedRing(0, (2,), names=("x", "y"))
    F = FreeModule(R, [(0,)])
    got = intersect(F, [R.parse("x^2*y")], [R.parse("x*y^2")])
    assert got == buchberger([R.parse("x^2*y^2")], F)


def test_krull_dimensions():
    assert krull_dim_gb(gb_of(Q3, [])) == 3
    assert krull_dim_gb(gb_of(Q3, ["x*y", "x*z"])) == 2
    assert krull_dim_gb(gb_of(Q3, ["x", "y", "z"])) == 0
    assert krull_dim_gb(gb_of(Q3, ["1"])) == NEG_INF
    assert krull_dim_gb(gb_of(Q3, ["x^2 - y*z", "y^2 - x*z", "z^2 - x*y"])) == 1


def test_module_basis_in_two_positions():
    R = GradedRing(0, (2,), names=("x", "y"))
    F = FreeModule(R, [(0,), (1,)])
    v = {(0, (1, 0)): 1, (1, (0, 0)): -1}
    w = {(0, (0, 1)): 1}
    gb = GroebnerBasis.compute(F, [v, w])
    assert not gb.nf(mul_poly_vec(R.parse("y"), v, 0))
    assert gb.nf({(1, (0, 0)): 1}) == {(0, (1, 0)): 1} or gb.nf({(0, (1, 0)): 1}) == {(1, (0, 0)): 1}


XY = GradedRing(0, (2,), names=("x", "y"))
FXY = FreeModule(XY, [(0,)])
S22 = GradedRing(0, (2, 2))
F22 = FreeModule(S22, [(0, 0)])


def _polys(gb, ring):
    return sorted(str(poly_from_vec(ring, v)) for v in gb.elements)


def test_small_bases_by_hand():
    x = GradedRing(0, (1,), names=("x",))
    assert _polys(buchberger([x.parse("x^2")], FreeModule(x, [(0,)])), x) == ["x^2"]
    assert _polys(buchberger([XY.parse("x+y"), XY.parse("x")], FXY), XY) == ["x", "y"]
    gens = [S22.parse("x1_1*x2_1"), S22.parse("x1_1^2")]
    assert _polys(buchberger(gens, F22), S22) == sorted(str(g) for g in gens)


def test_normal_form_examples():
    gx = buchberger([XY.parse("x")], FXY)
    assert normal_form(XY.parse("x^2"), gx).is_zero()
    assert normal_form(XY.parse("x+y"), gx) == XY.parse("y")
    g = buchberger([S22.parse("x1_1*x2_1")], F22)
    assert normal_form(S22.parse("x1_1*x2_1 + x1_2*x2_2"), g) == S22.parse("x1_2*x2_2")


def test_intersection_examples():
    assert intersect(FXY, [XY.parse("x")], [XY.parse("y")]) == buchberger([XY.parse("x*y")], FXY)
    got = intersect(FXY, [XY.parse("x^2"), XY.parse("y")], [XY.parse("x")])
    assert got == buchberger([XY.parse("x^2"), XY.parse("x*y")], FXY)
    U = [XY.parse("x^2"), XY.parse("x*y + y^2")]
    assert intersect(FXY, U, U) == buchberger(U, FXY)


@given(st.integers(0, 10 ** 6))
def test_intersection_is_symmetric_and_inside_both(seed):
    rng = random.Random(seed)
    ring = GradedRing(SMALL_PRIME, (2,))
    F = FreeModule(ring, [(0,)])
    U = [random_homogeneous(rng, ring, (rng.randint(1, 3),), 2) for _ in range(2)]
    V = [random_homogeneous(rng, ring, (rng.randint(1, 3),), 2) for _ in range(2)]
    W = intersect(F, U, V)
    assert W == intersect(F, V, U)
    gu, gv = buchberger(U, F), buchberger(V, F)
    assert all(not gu.nf(w) and not gv.nf(w) for w in W.elements)


def test_saturation_examples_and_idempotence():
    m = [XY.parse("x"), XY.parse("y")]
    assert saturate_submodule(FXY, [], m).elements == ()
    one = saturate_submodule(FXY, [vec_from_poly(XY.parse("x"))], [XY.parse("x")])
    assert one == buchberger([XY.one()], FXY)
    first = saturate_submodule(FXY, [vec_from_poly(XY.parse(t)) for t in ["x^3", "x^2*y^2"]], m)
    again = saturate_submodule(FXY, list(first.elements), m)
    assert first == again == buchberger([XY.parse("x^2")], FXY)


def test_krull_dimension_examples():
    assert krull_dim_gb(buchberger([], FXY)) == 2
    assert krull_dim_gb(buchberger([XY.parse("x"), XY.parse("y")], FXY)) == 0
    assert krull_dim_gb(buchberger([XY.parse("x*y")], FXY)) == 1
