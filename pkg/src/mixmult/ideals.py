"""Mixed multiplicities of a module N with respect to ideals J, I_1..I_d.

Everything lives in a standard graded polynomial ring R = k[y_1..y_m] with
homogeneous ideals, so lengths are total k-dimensions of finite-length
graded quotients.  The associated (d+1)-graded module

    𝒩 = ⊕ J^{n0} 𝕀^n N / J^{n0+1} 𝕀^n N

has no exact series engine here: its Hilbert polynomial is fitted on a box
of grid points, and the fit is reported "uncertain" when the box does not
look polynomial.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb, factorial

import numpy as np

from .algebra import GradedRing, Polynomial, count_monomials, enumerate_monomials
from .errors import (
    BoxOverflow,
    GenericityExhausted,
    HypothesisFailed,
    InfiniteLength,
    InternalConsistencyError,
    NotMMSystem,
    NotPrimary,
    NotSuperficialSequence,
    RingMismatch,
    StabilizationUncertain,
    TypeTooSmall,
    ZeroLeadingForm,
    NonHomogeneous,
)
from .groebner import (
    NEG_INF,
    FreeModule,
    GroebnerBasis,
    colon_generators,
    krull_dim_gb,
    mul_poly_vec,
    poly_from_vec,
    saturate_submodule,
    vec_from_poly,
)
from .hilbert import QPoly, hilbert_series, module_hilbert_polynomial
from .linalg import Echelon, rank
from .modules import Presentation, colon_submodule, quotient_by_elements

DEFAULT_RETRIES = 32
SUPERFICIAL_SPAN = 3
FIT_MARGIN = 2
CHI_WINDOW = 1
ORACLE_LIMIT = 2_000_000


# -- the family ------------------------------------------------------------------

class _ProductCache:
    """Gröbner bases of the products J^{v_0} I_1^{v_1} ... I_d^{v_d}."""

    def __init__(self, ring, ideals):
        self.ring = ring
        self.F1 = FreeModule(ring, [(0,)])
        self.ideals = ideals
        self.gbs = [GroebnerBasis.compute(self.F1, [vec_from_poly(g) for g in I if not g.is_zero()])
                    for I in ideals]
        self.memo = {}

    def get(self, v) -> GroebnerBasis:
        v = tuple(v)
        hit = self.memo.get(v)
        if hit is not None:
            return hit
        if not any(v):
            out = GroebnerBasis.compute(self.F1, [vec_from_poly(self.ring.one())])
        else:
            i = max(k for k, x in enumerate(v) if x)
            prev = self.get(v[:i] + (v[i] - 1,) + v[i + 1:])
            out = self.multiply(prev, self.gbs[i])
        self.memo[v] = out
        return out

    def multiply(self, A: GroebnerBasis, B: GroebnerBasis) -> GroebnerBasis:
        p = self.ring.field.p
        if len(B.elements) == 1:
            # f·G is already a Gröbner basis of f·A (leading terms multiply)
            f = poly_from_vec(self.ring, B.elements[0])
            return GroebnerBasis(self.F1, [mul_poly_vec(f, a, p) for a in A.elements])
        if len(A.elements) == 1:
            return self.multiply(B, A)
        gens = []
        for a in A.elements:
            fa = poly_from_vec(self.ring, a)
            for b in B.elements:
                gens.append(mul_poly_vec(fa, b, p))
        return GroebnerBasis.compute(self.F1, gens)

    def polys(self, gb: GroebnerBasis):
        return [poly_from_vec(self.ring, v) for v in gb.elements]


class IdealFamily:
    """J (𝔫-primary), I_1..I_d and a graded module N over a one-block ring.

    Index 0 of the family is J, so a "block" i ranges over 0..d.
    """

    def __init__(self, ring: GradedRing, J, I, N: Presentation, _products=None):
        if ring.d != 1:
            raise ValueError("ideal families live in a singly graded ring")
        if N.ring != ring:
            raise RingMismatch("module over a different ring")
        ideals = (tuple(J),) + tuple(tuple(g) for g in I)
        for gens in ideals:
            for g in gens:
                if g.ring != ring:
                    raise RingMismatch("ideal generator from a different ring")
                if not g.is_zero() and not g.is_homogeneous():
                    raise NonHomogeneous(f"ideal generator {g} is not homogeneous")
        self.ring = ring
        self.J = ideals[0]
        self.I = ideals[1:]
        self.N = N
        self.d = len(self.I)
        self.products = _products or _ProductCache(ring, ideals)
        if _products is None:
            self._check_primary()

    def _check_primary(self):
        gb = self.products.gbs[0]
        if krull_dim_gb(gb) > 0:
            raise NotPrimary("J is not primary to the maximal ideal")
        hs = hilbert_series(Presentation(self.ring, [(0,)], gb.elements))
        self.primary_power = hs.threshold()[0]  # 𝔫^t ⊆ J for t at the threshold

    def with_module(self, N: Presentation) -> "IdealFamily":
        out = IdealFamily(self.ring, self.J, self.I, N, _products=self.products)
        out.primary_power = getattr(self, "primary_power", None)
        return out

    @property
    def ideals(self):
        return (self.J,) + self.I

    def max_generator_degree(self) -> int:
        return max((g.multidegree()[0] for gens in self.ideals for g in gens if not g.is_zero()), default=1)

    def default_offset(self) -> int:
        return 3 * self.max_generator_degree()

    def is_monomial(self) -> bool:
        if not all(g.is_monomial() or g.is_zero() for gens in self.ideals for g in gens):
            return False
        return all(len(r) == 1 for r in self.N.relations)

    def big_I(self):
        """Generators of I = J·I_1⋯I_d."""
        return self.products.polys(self.products.get((1,) * (self.d + 1)))


def ideal_products(fam: IdealFamily, n0: int, n) -> list:
    """Reduced generators of J^{n0}·𝕀^n."""
    v = (int(n0),) + tuple(int(x) for x in n)
    if min(v) < 0:
        raise ValueError("exponents must be non-negative")
    return fam.products.polys(fam.products.get(v))


# -- lengths ---------------------------------------------------------------------

def _product_submodule(fam: IdealFamily, v, N: Presentation = None) -> list:
    """Generators of P_v F + U for the presentation F/U of N."""
    N = N if N is not None else fam.N
    p = fam.ring.field.p
    gens = list(N.gb.elements)
    for g in fam.products.get(v).elements:
        f = poly_from_vec(fam.ring, g)
        for q in range(N.rank):
            gens.append(mul_poly_vec(f, N.F.basis_vector(q), p))
    return gens


def _layer(fam: IdealFamily, v) -> Presentation:
    """F/(P_v F + U), cached on N."""
    v = tuple(v)
    N = fam.N
    return N.cached(("rees_layer", fam.products.ideals, v),
                    lambda: Presentation(fam.ring, N.shifts, _product_submodule(fam, v), label="layer"))


def _series_sum(hs) -> int:
    """Σ_n H(n) for a series whose Hilbert polynomial vanishes."""
    top = max(hs.threshold()[0], 0)
    lo = min([0] + [a[0] for a in hs.numerator])
    return sum(hs.coefficient((n,)) for n in range(lo, top + 1))


def finite_length(M: Presentation) -> int:
    if not module_hilbert_polynomial(M).poly.is_zero():
        raise InfiniteLength("module does not have finite length")
    return _series_sum(hilbert_series(M))


def _length_between(big: Presentation, small: Presentation) -> int:
    """ℓ(A/B) for F/A = big-quotient ⊆-wise: A ⊇ B given as F/A and F/B."""
    ha, hb = hilbert_series(big), hilbert_series(small)
    if module_hilbert_polynomial(big).poly != module_hilbert_polynomial(small).poly:
        raise InfiniteLength("quotient of grid layers has infinite length (is J primary?)")
    top = max(ha.threshold()[0], hb.threshold()[0], 0)
    lo = min([0] + [a[0] for a in ha.numerator] + [a[0] for a in hb.numerator])
    return sum(hb.coefficient((n,)) - ha.coefficient((n,)) for n in range(lo, top + 1))


def grid_length(fam: IdealFamily, v) -> int:
    """ℓ(J^{v0}𝕀^v N / J^{v0+1}𝕀^v N) for v = (v0, v1..vd)."""
    v = tuple(v)
    if min(v) < 0:
        return 0

    def compute():
        w = (v[0] + 1,) + v[1:]
        return _length_between(_layer(fam, v), _layer(fam, w))
    return fam.N.cached(("rees_length", fam.products.ideals, v), compute)


def associated_length(fam: IdealFamily, n0: int, n) -> int:
    return grid_length(fam, (int(n0),) + tuple(int(x) for x in n))


# -- lattice-point oracle (monomial instances) --------------------------------------

def _monomial_exps(gens):
    out = []
    for g in gens:
        if g.is_zero():
            continue
        if not g.is_monomial():
            raise ValueError("lattice oracle needs monomial ideals")
        out.append(next(iter(g.terms)))
    return out


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _raw_product(A, B):
    prods = {tuple(x + y for x, y in zip(a, b)) for a in A for b in B}
    return [g for g in prods if not any(h != g and _divides(h, g) for h in prods)]


def lattice_oracle(fam: IdealFamily, n0: int, n) -> int:
    """Count monomials of J^{n0}𝕀^n N outside J^{n0+1}𝕀^n N by divisibility scans.

    N must be a direct sum of cyclic quotients by monomial ideals.
    """
    ring = fam.ring
    m = ring.nvars
    v = (int(n0),) + tuple(int(x) for x in n)
    ideals = [_monomial_exps(gens) for gens in fam.ideals]
    P = [ring.zero_exp]
    for i, k in enumerate(v):
        for _ in range(k):
            P = _raw_product(P, ideals[i])
    Pp = _raw_product(P, ideals[0])
    pure = []
    for k in range(m):
        powers = [g[k] for g in ideals[0] if sum(g) == g[k] and g[k] > 0]
        if not powers:
            raise NotPrimary("monomial J has no pure power of some variable")
        pure.append(min(powers))
    U = {q: [] for q in range(fam.N.rank)}
    for r in fam.N.relations:
        if len(r) != 1:
            raise ValueError("lattice oracle needs monomial relations")
        ((q, e), _), = r.items()
        U[q].append(e)
    bound = max(sum(g) for g in P) + sum(a - 1 for a in pure) + 1
    if sum(count_monomials((m,), (t,)) for t in range(bound)) * fam.N.rank > ORACLE_LIMIT:
        raise BoxOverflow(f"lattice box of total degree {bound} is too large")
    total = 0
    for q in range(fam.N.rank):
        shift = fam.N.shifts[q][0]
        for t in range(max(bound - shift, 0)):
            for e in enumerate_monomials(ring, (t,)):
                if any(_divides(u, e) for u in U[q]):
                    continue
                if any(_divides(g, e) for g in P) and not any(_divides(g, e) for g in Pp):
                    total += 1
    return total


# -- saturation and dimensions ----------------------------------------------------

def saturation_gb(fam: IdealFamily, extra=(), N: Presentation = None) -> GroebnerBasis:
    """Gröbner basis of (U + extra) : I^∞ in the ambient free module of N."""
    N = N if N is not None else fam.N
    gens = list(N.gb.elements) + [dict(v) for v in extra]
    key = ("saturation", fam.products.ideals, frozenset(frozenset(v.items()) for v in gens))
    return N.cached(key, lambda: saturate_submodule(N.F, gens, fam.big_I()))


def _element_submodule(N: Presentation, xs) -> list:
    p = N.ring.field.p
    return [mul_poly_vec(a, N.F.basis_vector(q), p) for a in xs if not a.is_zero() for q in range(N.rank)]


def saturated_dim(fam: IdealFamily, xs=(), N: Presentation = None):
    """dim N/(xN : I^∞)."""
    N = N if N is not None else fam.N
    return krull_dim_gb(saturation_gb(fam, _element_submodule(N, xs), N))


def saturated_quotient(fam: IdealFamily, xs=(), N: Presentation = None) -> Presentation:
    N = N if N is not None else fam.N
    gb = saturation_gb(fam, _element_submodule(N, xs), N)
    return Presentation(fam.ring, N.shifts, gb.elements, label="saturated")


def expected_degree(fam: IdealFamily):
    """dim Supp++ 𝒩 = dim N/(0_N : I^∞) - 1."""
    s = saturated_dim(fam)
    return s - 1 if s != NEG_INF else NEG_INF


def module_dim(N: Presentation):
    return krull_dim_gb(N.gb)


# -- grid fit --------------------------------------------------------------------

@dataclass(frozen=True)
class GridFit:
    base: tuple
    span: int
    expected_degree: object
    degree: object
    differences: dict      # β -> Δ^β at the base, |β| <= expected degree
    verdict: str           # "pass" or "uncertain"
    values: dict = field(repr=False, default_factory=dict)

    def polynomial(self) -> QPoly:
        """Newton form Σ Δ^β f(w0) Π C(n_i - w0_i, β_i)."""
        dim = len(self.base)
        total = QPoly(dim)
        for beta, c in self.differences.items():
            term = QPoly.constant(dim, c)
            for i, b in enumerate(beta):
                for j in range(b):
                    lin = QPoly(dim, {tuple(1 if k == i else 0 for k in range(dim)): 1,
                                      (0,) * dim: -(self.base[i] + j)})
                    term = term * lin
                term = term * Fraction(1, factorial(b))
            total = total + term
        return total

    def coefficient(self, k) -> int:
        return self.differences.get(tuple(k), 0)


def _exps_upto(dim, total):
    for t in range(total + 1):
        for c in _compositions(t, dim):
            yield c


def _compositions(t, parts):
    if parts == 1:
        yield (t,)
        return
    for first in range(t + 1):
        for rest in _compositions(t - first, parts - 1):
            yield (first,) + rest


def grid_fit(fam: IdealFamily, offset: int = None, expected=None) -> GridFit:
    """Fit the Hilbert polynomial of 𝒩 on the box [w0, w0 + s + 2]^{d+1}.

    The fit passes when every forward difference of total order s+1 vanishes
    inside the box, i.e. the table is a polynomial of degree <= s there.
    """
    s = expected_degree(fam) if expected is None else expected
    w0 = fam.default_offset() if offset is None else int(offset)
    dim = fam.d + 1
    base = (w0,) * dim
    sd = 0 if s == NEG_INF else s
    D = sd + FIT_MARGIN
    shape = (D + 1,) * dim
    table = np.empty(shape, dtype=object)
    values = {}
    for idx in product(range(D + 1), repeat=dim):
        v = tuple(w0 + i for i in idx)
        table[idx] = grid_length(fam, v)
        values[v] = table[idx]
    ok = True
    if s == NEG_INF:
        ok = all(x == 0 for x in table.flat)
        diffs = {}
    else:
        for gamma in _compositions(s + 1, dim):
            if max(gamma) > D:
                continue
            arr = table
            for i, g in enumerate(gamma):
                for _ in range(g):
                    arr = np.diff(arr, axis=i)
            if any(x != 0 for x in arr.flat):
                ok = False
                break
        diffs = {}
        for beta in _exps_upto(dim, s):
            arr = table
            for i, b in enumerate(beta):
                for _ in range(b):
                    arr = np.diff(arr, axis=i)
            c = int(arr[(0,) * dim])
            if c:
                diffs[beta] = c
    degree = max((sum(b) for b in diffs), default=NEG_INF)
    return GridFit(base, D, s, degree, diffs, "pass" if ok else "uncertain", values)


@dataclass(frozen=True)
class IdealMixedMultiplicity:
    k0: int
    k: tuple
    value: int
    extended: bool
    fit: GridFit = None
    vacuous: bool = False

    @property
    def verdict(self):
        return self.fit.verdict if self.fit is not None else "pass"


def _check_type(fam, k0, k):
    k = tuple(int(x) for x in k)
    if len(k) != fam.d or int(k0) < 0 or min(k, default=0) < 0:
        raise ValueError(f"type must be (k0, k) with k of length {fam.d}, all non-negative")
    return int(k0), k


def ideal_mixed_multiplicity(fam: IdealFamily, k0, k, offset: int = None) -> IdealMixedMultiplicity:
    """E(J^[k0+1], I^[k]; N) read off the fitted grid polynomial of 𝒩."""
    k0, k = _check_type(fam, k0, k)
    s = expected_degree(fam)
    if s == NEG_INF:
        return IdealMixedMultiplicity(k0, k, 0, True, None, True)
    if k0 + sum(k) < s:
        raise TypeTooSmall(f"k0 + |k| = {k0 + sum(k)} < dim N/(0:I^inf) - 1 = {s}")
    if k0 + sum(k) > s:
        return IdealMixedMultiplicity(k0, k, 0, True)
    fit = grid_fit(fam, offset, s)
    if fit.verdict != "pass":
        raise StabilizationUncertain(
            f"grid values on [{fit.base[0]}, {fit.base[0] + fit.span}]^{fam.d + 1} are not a polynomial of degree {s}")
    if fit.degree != s:
        raise InternalConsistencyError(f"fitted degree {fit.degree} differs from dim N/(0:I^inf) - 1 = {s}")
    return IdealMixedMultiplicity(k0, k, fit.coefficient((k0,) + k), False, fit)


def samuel_multiplicity(J, N: Presentation, offset: int = None) -> int:
    """e(J; N) from the fitted Hilbert–Samuel function ℓ(N/J^{n+1}N)."""
    ring = N.ring
    fam = J if isinstance(J, IdealFamily) else IdealFamily(ring, J, [], N)
    fam = fam.with_module(N) if fam.N is not N else fam
    dim = module_dim(N)
    if dim == NEG_INF:
        return 0
    if dim == 0:
        return finite_length(N)
    w0 = fam.default_offset() if offset is None else int(offset)
    pts = list(range(w0, w0 + dim + FIT_MARGIN + 1))
    vals = []
    for n in pts:
        layer = _layer(fam, (n + 1,) + (0,) * fam.d)
        vals.append(finite_length(layer))
    arr = np.array(vals, dtype=object)
    for _ in range(dim):
        arr = np.diff(arr)
    if any(x != arr[0] for x in arr):
        raise StabilizationUncertain(f"Hilbert–Samuel values on [{w0}, {pts[-1]}] are not a polynomial of degree {dim}")
    return int(arr[0])


# -- superficial elements -----------------------------------------------------------

def _series_key(M: Presentation):
    return hilbert_series(M).numerator


def _same_series(lhs: list, rhs: list) -> bool:
    acc = {}
    for sign, M in lhs:
        for a, c in _series_key(M).items():
            acc[a] = acc.get(a, 0) + sign * c
    for sign, M in rhs:
        for a, c in _series_key(M).items():
            acc[a] = acc.get(a, 0) - sign * c
    return not any(acc.values())


def _check_member(fam: IdealFamily, a: Polynomial, i: int):
    if a.is_zero():
        return
    gb = fam.products.gbs[i]
    if gb.nf(vec_from_poly(a)):
        raise ValueError(f"{a} is not in the ideal of block {i}")


def has_zero_leading_form(fam: IdealFamily, a: Polynomial, i: int) -> bool:
    """a ∈ J·I_i, so its image in T_i vanishes."""
    v = tuple(2 if (k == 0 and i == 0) else (1 if k in (0, i) else 0) for k in range(fam.d + 1))
    return not fam.products.get(v).nf(vec_from_poly(a))


def is_rees_superficial(fam: IdealFamily, a: Polynomial, i: int, offset: int = None,
                        span: int = SUPERFICIAL_SPAN) -> bool:
    """aN ∩ 𝕀^n I_i N = a 𝕀^n N on the box [w0, w0+span]^{d+1} (𝕀 includes J).

    The left side always contains the right one, so equality is tested on
    Hilbert series through H(A∩B) = H(A) + H(B) - H(A+B); no intersection
    is computed.
    """
    _check_member(fam, a, i)
    N = fam.N
    if a.is_zero() or hilbert_series(N).is_zero():
        return True
    w0 = fam.default_offset() if offset is None else int(offset)
    dim = fam.d + 1
    aF = _element_submodule(N, [a])
    A = Presentation(fam.ring, N.shifts, list(N.gb.elements) + aF)
    p = fam.ring.field.p
    for idx in product(range(span + 1), repeat=dim):
        v = tuple(w0 + t for t in idx)
        vi = tuple(x + (1 if k == i else 0) for k, x in enumerate(v))
        B_gens = _product_submodule(fam, vi)
        B = _layer(fam, vi)
        AB = Presentation(fam.ring, N.shifts, B_gens + aF)
        C_gens = list(N.gb.elements)
        for g in fam.products.get(v).elements:
            f = poly_from_vec(fam.ring, g) * a
            for q in range(N.rank):
                C_gens.append(mul_poly_vec(f, N.F.basis_vector(q), p))
        C = Presentation(fam.ring, N.shifts, C_gens)
        # F/(A∩B) has series H(F/A) + H(F/B) - H(F/(A+B)); compare with F/C
        if not _same_series([(1, A), (1, B), (-1, AB)], [(1, C)]):
            return False
    return True


def is_filter_regular_for(fam: IdealFamily, a: Polynomial) -> bool:
    """0_N : a ⊆ 0_N : I^∞."""
    N = fam.N
    gens = colon_generators(N.F, list(N.gb.elements), a)
    sat = saturation_gb(fam)
    return all(not sat.nf(v) for v in gens)


def is_weak_fc(fam: IdealFamily, a: Polynomial, i: int, offset: int = None,
               span: int = SUPERFICIAL_SPAN) -> bool:
    return is_filter_regular_for(fam, a) and is_rees_superficial(fam, a, i, offset, span)


# -- sequences -------------------------------------------------------------------

@dataclass(frozen=True)
class IdealSequence:
    elements: tuple
    blocks: tuple

    @property
    def type(self):
        d = max(self.blocks, default=0) + 1
        out = [0] * d
        for b in self.blocks:
            out[b] += 1
        return tuple(out)

    def __len__(self):
        return len(self.elements)


def _type_blocks(k0, k):
    return [0] * k0 + [i + 1 for i, ki in enumerate(k) for _ in range(ki)]


def _layers(gens):
    by = {}
    for g in gens:
        if not g.is_zero():
            by.setdefault(g.multidegree()[0], []).append(g)
    return [by[t] for t in sorted(by)]


def sample_ideal_element(fam: IdealFamily, i: int, rng, attempt: int = 0, bound: int = 1000) -> Polynomial:
    """Generic combination of the generators of one degree layer of the i-th ideal."""
    layers = _layers(fam.ideals[i])
    if not layers:
        return fam.ring.zero()
    layer = layers[attempt % len(layers)]
    p = fam.ring.field.p
    out = fam.ring.zero()
    for g in layer:
        if p:
            c = rng.randrange(1, p)
        else:
            c = 0
            while c == 0:
                c = rng.randint(-bound, bound)
        out = out + g.scale(fam.ring.field(c))
    return out


def build_ideal_sequence(fam: IdealFamily, k0, k, rng_seed=0, retries: int = DEFAULT_RETRIES,
                         weak_fc: bool = True, offset: int = None) -> IdealSequence:
    """Weak-(FC) (or only superficial) sequence of type (k0, k), J-elements first."""
    k0, k = _check_type(fam, k0, k)
    rng = rng_seed if isinstance(rng_seed, random.Random) else random.Random(rng_seed)
    cur = fam
    xs, blocks = [], []
    for i in _type_blocks(k0, k):
        for attempt in range(retries):
            a = sample_ideal_element(fam, i, rng, attempt)
            if a.is_zero() or has_zero_leading_form(fam, a, i):
                continue
            good = is_weak_fc(cur, a, i, offset) if weak_fc else is_rees_superficial(cur, a, i, offset)
            if good:
                xs.append(a)
                blocks.append(i)
                cur = cur.with_module(quotient_by_elements(cur.N, [a], check_degree=False))
                break
        else:
            if _undersized(cur, offset):
                raise StabilizationUncertain(
                    f"grid offset {offset} is below {cur.default_offset()}; no element of ideal {i} "
                    f"passed the superficial test on that window")
            raise GenericityExhausted(f"no suitable element of ideal {i} after {retries} draws")
    return IdealSequence(tuple(xs), tuple(blocks))


def _undersized(fam: IdealFamily, offset) -> bool:
    return offset is not None and int(offset) < fam.default_offset()


@dataclass(frozen=True)
class IdealSystemCertificate:
    is_mm_system: bool
    dim: object
    superficial_steps: tuple
    grid_verified: bool = True


def certify_ideal_mm_system(fam: IdealFamily, xs, blocks, offset: int = None) -> IdealSystemCertificate:
    """Stepwise superficial (grid) test plus dim N/(xN : I^∞) <= 1."""
    xs, blocks = list(xs), list(blocks)
    cur = fam
    steps = []
    for a, i in zip(xs, blocks):
        if a.is_zero() or has_zero_leading_form(fam, a, i):
            raise ZeroLeadingForm(f"{a} has zero image in the associated graded piece of ideal {i}")
        ok = is_rees_superficial(cur, a, i, offset)
        steps.append(ok)
        if not ok:
            if _undersized(cur, offset):
                raise StabilizationUncertain(f"{a} fails the superficial test on the under-sized offset {offset}")
            raise NotSuperficialSequence(f"{a} is not superficial on the grid window")
        cur = cur.with_module(quotient_by_elements(cur.N, [a], check_degree=False))
    dim = saturated_dim(fam, xs)
    return IdealSystemCertificate(dim <= 1, dim, tuple(steps))


# -- the associated module: Koszul side ----------------------------------------------

class AssociatedModule:
    """Linear algebra on the finite-dimensional pieces 𝒩_v of the associated module."""

    def __init__(self, fam: IdealFamily):
        self.fam = fam
        self.spaces = {}
        self.maps = {}

    def space(self, v):
        """(Echelon basis of 𝒩_v as normal forms modulo P_{v+e0}F + U, its GB)."""
        v = tuple(v)
        hit = self.spaces.get(v)
        if hit is not None:
            return hit
        fam = self.fam
        N = fam.N
        ech = Echelon(fam.ring.field, N.F.key)
        gb_next = None
        if min(v) >= 0:
            top = _layer(fam, v)
            nxt = _layer(fam, (v[0] + 1,) + v[1:])
            gb_top, gb_next = top.gb, nxt.gb
            T = max(hilbert_series(top).threshold()[0], hilbert_series(nxt).threshold()[0])
            for n in range(0, T + 1):
                for t in nxt.piece_basis((n,)):
                    if gb_top.is_standard(t):
                        continue
                    vec = {t: 1}
                    p = fam.ring.field.p
                    for s, c in gb_top.nf_term(t).items():
                        w = vec.get(s, 0) - c
                        if p:
                            w %= p
                        if w:
                            vec[s] = w
                        else:
                            vec.pop(s, None)
                    ech.add(gb_next.nf(vec))
            if len(ech) != grid_length(fam, v):
                raise InternalConsistencyError(f"basis of the associated piece at {v} has the wrong size")
        out = (ech, gb_next)
        self.spaces[v] = out
        return out

    def dim(self, v) -> int:
        return len(self.space(v)[0])

    def multiplication(self, a: Polynomial, i: int, v):
        """Rows (one per basis vector of 𝒩_v) of a*: 𝒩_v -> 𝒩_{v+e_i}."""
        v = tuple(v)
        key = (a, i, v)
        hit = self.maps.get(key)
        if hit is not None:
            return hit
        src, _ = self.space(v)
        w = tuple(x + (1 if k == i else 0) for k, x in enumerate(v))
        dst, gb = self.space(w)
        p = self.fam.ring.field.p
        rows = []
        for piv in src.order:
            if not len(dst):
                rows.append({})
                continue
            img = gb.nf(mul_poly_vec(a, src.rows[piv], p))
            coords = dst.coordinates(img)
            if coords is None:
                raise InternalConsistencyError("image of the multiplication map left the target piece")
            rows.append({j: c for j, c in enumerate(coords) if c})
        self.maps[key] = rows
        return rows

    def koszul_ranks(self, xs, blocks, v):
        """(chain dims, differential ranks) of K(x*, 𝒩) in degree v."""
        r = len(xs)
        p = self.fam.ring.field.p
        dims, layouts = [], []
        for j in range(r + 1):
            off, lay = 0, {}
            for T in combinations(range(r), j):
                w = list(v)
                for t in T:
                    w[blocks[t]] -= 1
                w = tuple(w)
                lay[T] = (off, w)
                off += self.dim(w) if min(w) >= 0 else 0
            layouts.append(lay)
            dims.append(off)
        ranks = []
        for j in range(1, r + 1):
            rows = []
            for T, (off, w) in layouts[j].items():
                if min(w) < 0:
                    continue
                n = self.dim(w)
                parts = []
                for idx, t in enumerate(T):
                    sign = 1 if idx % 2 == 0 else -1
                    Tp = T[:idx] + T[idx + 1:]
                    toff, _ = layouts[j - 1][Tp]
                    parts.append((sign, toff, self.multiplication(xs[t], blocks[t], w)))
                for b in range(n):
                    row = {}
                    for sign, toff, M in parts:
                        for c, x in M[b].items():
                            val = row.get(toff + c, 0) + sign * x
                            if p:
                                val %= p
                            if val:
                                row[toff + c] = val
                            else:
                                row.pop(toff + c, None)
                    rows.append(row)
            ranks.append(rank(rows, dims[j - 1], p))
        return tuple(dims), tuple(ranks)

    def homology(self, xs, blocks, v):
        dims, ranks = self.koszul_ranks(xs, blocks, v)
        rr = (0,) + ranks + (0,)
        return tuple(dims[i] - rr[i] - rr[i + 1] for i in range(len(dims)))

    def quotient_dim(self, a, i, v) -> int:
        """dim (𝒩/a*𝒩)_v."""
        u = tuple(x - (1 if k == i else 0) for k, x in enumerate(v))
        if min(u) < 0:
            return self.dim(v)
        M = self.multiplication(a, i, u)
        return self.dim(v) - rank(M, self.dim(v), self.fam.ring.field.p)


@dataclass(frozen=True)
class ReesEuler:
    value: int
    degree: tuple
    homology_lengths: tuple
    window: tuple


def rees_euler_characteristic(fam: IdealFamily, xs, blocks, offset: int = None,
                              window: int = CHI_WINDOW, assoc: AssociatedModule = None) -> ReesEuler:
    """χ(x*, 𝒩) from Koszul homology of the associated module at a large degree."""
    assoc = assoc or AssociatedModule(fam)
    w0 = fam.default_offset() if offset is None else int(offset)
    typ = [0] * (fam.d + 1)
    for b in blocks:
        typ[b] += 1
    v = tuple(w0 + t for t in typ)
    lengths = assoc.homology(xs, blocks, v)
    chi = sum((-1) ** i * h for i, h in enumerate(lengths))
    euler = 0
    for j in range(len(xs) + 1):
        for T in combinations(range(len(xs)), j):
            w = list(v)
            for t in T:
                w[blocks[t]] -= 1
            euler += (-1) ** j * grid_length(fam, w)
    if chi != euler:
        raise InternalConsistencyError("Euler identity failed on the associated module")
    pts = []
    for i in range(fam.d + 1):
        for s in range(1, window + 1):
            pts.append(tuple(x + (s if k == i else 0) for k, x in enumerate(v)))
    for q in pts:
        if assoc.homology(xs, blocks, q) != lengths:
            raise StabilizationUncertain(f"Koszul homology of the associated module not constant near {v}")
    return ReesEuler(chi, v, lengths, tuple(pts))


def rees_symbol(fam: IdealFamily, xs, offset: int = None) -> int:
    """ẽ(x*, 𝒩) through the module-level recursion N/aN and 0_N : a."""
    xs = tuple(xs)
    memo = {}

    def rec(N: Presentation, j: int) -> int:
        key = (N.F.shifts, N.gb._canon(), j)
        if key in memo:
            return memo[key]
        sub = fam.with_module(N)
        if hilbert_series(N).is_zero():
            val = 0
        elif j == len(xs):
            s = expected_degree(sub)
            if s == NEG_INF:
                val = 0
            elif s > 0:
                raise NotMMSystem("dim N/(xN : I^inf) > 1 at a recursion leaf")
            else:
                val = ideal_mixed_multiplicity(sub, 0, (0,) * fam.d, offset).value
        else:
            a = xs[j]
            val = rec(quotient_by_elements(N, [a], check_degree=False), j + 1) - rec(colon_submodule(N, a), j + 1)
        memo[key] = val
        return val

    return rec(fam.N, 0)


# -- verifiers --------------------------------------------------------------------

def _prefix_modules(fam, xs):
    mods = [fam.N]
    for a in xs:
        mods.append(quotient_by_elements(mods[-1], [a], check_degree=False))
    return mods


def _require_dimension_type(fam, k0, k):
    k0, k = _check_type(fam, k0, k)
    s = expected_degree(fam)
    if s != NEG_INF and k0 + sum(k) != s:
        raise HypothesisFailed(f"k0 + |k| = {k0 + sum(k)} must equal dim N/(0:I^inf) - 1 = {s}")
    return k0, k, s


def _routes(fam, k0, k, xs, blocks, offset, check_quotients=True):
    e = ideal_mixed_multiplicity(fam, k0, k, offset)
    assoc = AssociatedModule(fam)
    chi = rees_euler_characteristic(fam, xs, blocks, offset, assoc=assoc)
    sym = rees_symbol(fam, xs, offset)
    bridge = []
    if check_quotients and xs:
        # associated module of N/aN versus 𝒩/a*𝒩, piece by piece at the χ degree
        a, i = xs[0], blocks[0]
        q = fam.with_module(quotient_by_elements(fam.N, [a], check_degree=False))
        v = chi.degree
        bridge.append(assoc.quotient_dim(a, i, v) == grid_length(q, v))
    return e, chi, sym, all(bridge)


def _given_or_built(fam, k0, k, xs, rng_seed, retries, offset, weak_fc=True):
    if xs is None:
        return build_ideal_sequence(fam, k0, k, rng_seed, retries, weak_fc=weak_fc, offset=offset)
    xs = tuple(xs)
    blocks = []
    for a in xs:
        for i in range(fam.d + 1):
            if not a.is_zero() and not fam.products.gbs[i].nf(vec_from_poly(a)):
                blocks.append(i)
                break
        else:
            raise ValueError(f"{a} lies in none of the ideals")
    seq = IdealSequence(xs, tuple(blocks))
    typ = [0] * (fam.d + 1)
    for b in blocks:
        typ[b] += 1
    if tuple(typ) != (k0,) + k:
        raise ValueError(f"sequence type {tuple(typ)} differs from {(k0,) + k}")
    return seq


def verify_ideal_main_theorem(fam: IdealFamily, k0, k, rng_seed=0, retries: int = DEFAULT_RETRIES,
                              offset: int = None, xs=None) -> dict:
    """e(J^[k0+1], I^[k]; N) = χ(x*, 𝒩) = ẽ(x*, 𝒩) for a mixed multiplicity system x."""
    k0, k, s = _require_dimension_type(fam, k0, k)
    seq = _given_or_built(fam, k0, k, xs, rng_seed, retries, offset)
    cert = certify_ideal_mm_system(fam, seq.elements, seq.blocks, offset)
    if not cert.is_mm_system:
        raise NotMMSystem(f"dim N/(xN : I^inf) = {cert.dim} > 1")
    e, chi, sym, bridge = _routes(fam, k0, k, seq.elements, seq.blocks, offset)
    return {
        "k0": k0,
        "k": k,
        "expected_degree": s,
        "fit_degree": e.fit.degree if e.fit else NEG_INF,
        "e": e.value,
        "chi": chi.value,
        "symbol": sym,
        "homology_lengths": chi.homology_lengths,
        "chi_degree": chi.degree,
        "system": [str(a) for a in seq.elements],
        "system_blocks": list(seq.blocks),
        "dim_after": cert.dim,
        "quotient_bridge": bridge,
        "vacuous": s == NEG_INF,
        "grid_verified": True,
        "holds": e.value == chi.value == sym and bridge,
    }


def verify_fc_length_route(fam: IdealFamily, k0, k, rng_seed=0, retries: int = DEFAULT_RETRIES,
                           offset: int = None, xs=None) -> dict:
    """ẽ = χ = e = E(J^[1], I^[0]; N/xN), and e != 0 iff dim N/(xN : I^∞) = 1,
    in which case e = e(J; N/(xN : I^∞))."""
    k0, k, s = _require_dimension_type(fam, k0, k)
    seq = _given_or_built(fam, k0, k, xs, rng_seed, retries, offset)
    if xs is not None:
        cur = fam
        for a, i in zip(seq.elements, seq.blocks):
            if not is_weak_fc(cur, a, i, offset):
                raise HypothesisFailed(f"{a} is not a weak-(FC) element")
            cur = cur.with_module(quotient_by_elements(cur.N, [a], check_degree=False))
    if s == NEG_INF:
        return {"k0": k0, "k": k, "e": 0, "chi": 0, "symbol": 0, "length_route": 0,
                "dim_after": NEG_INF, "vacuous": True, "holds": True,
                "system": [str(a) for a in seq.elements]}
    e, chi, sym, bridge = _routes(fam, k0, k, seq.elements, seq.blocks, offset)
    Q = quotient_by_elements(fam.N, seq.elements, check_degree=False)
    length = ideal_mixed_multiplicity(fam.with_module(Q), 0, (0,) * fam.d, offset).value
    dim_after = saturated_dim(fam, seq.elements)
    criterion = (e.value != 0) == (dim_after == 1)
    samuel = None
    if dim_after == 1:
        samuel = samuel_multiplicity(fam, saturated_quotient(fam, seq.elements), offset)
    holds = e.value == chi.value == sym == length and criterion and bridge
    if samuel is not None:
        holds = holds and samuel == e.value
    return {
        "k0": k0,
        "k": k,
        "e": e.value,
        "chi": chi.value,
        "symbol": sym,
        "length_route": length,
        "dim_after": dim_after,
        "samuel": samuel,
        "nonvanishing_criterion": criterion,
        "system": [str(a) for a in seq.elements],
        "vacuous": False,
        "holds": holds,
    }


def _decomposition(fam, k0, k, seq, offset):
    """Correction terms E(J^[k0-m_i+1], I^[k-h_i]; N_i)."""
    mods = _prefix_modules(fam, seq.elements)
    corr = []
    h = [0] * (fam.d + 1)
    for idx, (a, b) in enumerate(zip(seq.elements, seq.blocks)):
        h[b] += 1
        Ni = colon_submodule(mods[idx], a)
        sub = fam.with_module(Ni)
        corr.append(ideal_mixed_multiplicity(sub, k0 - h[0], tuple(x - y for x, y in zip(k, h[1:])), offset).value)
    return mods, corr


def verify_ideal_decomposition(fam: IdealFamily, k0, k, rng_seed=0, retries: int = DEFAULT_RETRIES, xs=None,
                               offset: int = None) -> dict:
    """dim N/((x_1..x_i)N : I^∞) drops by one per step, and
    e = e(J; N/(xN : I^∞)) - Σ E(J^[k0-m_i+1], I^[k-h_i]; N_i)."""
    k0, k, s = _require_dimension_type(fam, k0, k)
    if s == NEG_INF:
        raise HypothesisFailed("I is contained in the radical of Ann N")
    e = ideal_mixed_multiplicity(fam, k0, k, offset).value
    if e == 0:
        raise HypothesisFailed("e(J^[k0+1], I^[k]; N) = 0")
    seq = _given_or_built(fam, k0, k, xs, rng_seed, retries, offset)
    if xs is not None:
        cert = certify_ideal_mm_system(fam, seq.elements, seq.blocks, offset)
        if not cert.is_mm_system:
            raise NotMMSystem(f"dim N/(xN : I^inf) = {cert.dim} > 1")
    dims = [saturated_dim(fam, seq.elements[:i]) for i in range(len(seq) + 1)]
    drops = all(dims[i] == dims[0] - i for i in range(len(dims)))
    samuel = samuel_multiplicity(fam, saturated_quotient(fam, seq.elements), offset)
    _, corr = _decomposition(fam, k0, k, seq, offset)
    return {
        "k0": k0,
        "k": k,
        "e": e,
        "samuel": samuel,
        "corrections": corr,
        "prefix_dims": dims,
        "dims_drop": drops,
        "system": [str(a) for a in seq.elements],
        "holds": drops and e == samuel - sum(corr),
    }


def is_primary_ideal(fam: IdealFamily, i: int) -> bool:
    return krull_dim_gb(fam.products.gbs[i]) <= 0


def verify_primary_case(fam: IdealFamily, k0, k, rng_seed=0, retries: int = DEFAULT_RETRIES, xs=None,
                        offset: int = None) -> dict:
    """All ideals primary: x is part of a system of parameters and
    e = e(J; N/xN) - Σ E(J^[k0-m_i+1], I^[k-h_i]; N_i)."""
    if not all(is_primary_ideal(fam, i) for i in range(fam.d + 1)):
        raise HypothesisFailed("some I_i is not primary to the maximal ideal")
    dim_n = module_dim(fam.N)
    if dim_n == NEG_INF or dim_n <= 0:
        raise HypothesisFailed("dim N must be positive")
    k0, k, s = _require_dimension_type(fam, k0, k)
    e = ideal_mixed_multiplicity(fam, k0, k, offset).value
    seq = _given_or_built(fam, k0, k, xs, rng_seed, retries, offset)
    if xs is not None:
        cert = certify_ideal_mm_system(fam, seq.elements, seq.blocks, offset)
        if not cert.is_mm_system:
            raise NotMMSystem(f"dim N/(xN : I^inf) = {cert.dim} > 1")
    mods, corr = _decomposition(fam, k0, k, seq, offset)
    dims = [module_dim(M) for M in mods]
    params = all(dims[i] == dim_n - i for i in range(len(dims)))
    samuel = samuel_multiplicity(fam, mods[-1], offset)
    return {
        "k0": k0,
        "k": k,
        "e": e,
        "samuel": samuel,
        "corrections": corr,
        "prefix_dims": dims,
        "parameter_part": params,
        "system": [str(a) for a in seq.elements],
        "holds": params and e == samuel - sum(corr),
    }
