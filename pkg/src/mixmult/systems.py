"""Filter-regular sequences, mixed multiplicity systems, the recursive
multiplicity symbol and the verifiers for the graded equality theorems."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product

from .algebra import GradedRing, Polynomial
from .errors import (
    DimDropFails,
    GenericityExhausted,
    HypothesisFailed,
    InternalConsistencyError,
    NotMMSystem,
    TypeTooSmall,
)
from .groebner import NEG_INF, saturate_submodule
from .hilbert import (
    dim_supp_pp,
    hilbert_series,
    mixed_multiplicity,
    module_hilbert_polynomial,
)
from .koszul import euler_characteristic
from .modules import (
    Presentation,
    colon_submodule,
    element_block,
    graded_piece_dim,
    quotient_by_elements,
)

DEFAULT_BOUND = 1000
DEFAULT_RETRIES = 32


@dataclass(frozen=True)
class ElementSequence:
    elements: tuple
    type: tuple

    @classmethod
    def of(cls, ring: GradedRing, elements) -> "ElementSequence":
        elements = tuple(elements)
        typ = [0] * ring.d
        for a in elements:
            typ[element_block(ring, a)] += 1
        return cls(elements, tuple(typ))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


@dataclass(frozen=True)
class SystemCertificate:
    is_mm_system: bool
    dim_after: object
    filter_regular_flags: tuple = ()


def _rng(seed):
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def sample_generic(ring: GradedRing, block: int, rng_seed=0, bound: int = DEFAULT_BOUND) -> Polynomial:
    """Random combination of the block variables with nonzero coefficients."""
    rng = _rng(rng_seed)
    p = ring.field.p
    terms = {}
    for j in range(ring.blocks[block]):
        if p:
            c = rng.randrange(1, p)
        else:
            c = 0
            while c == 0:
                c = rng.randint(-bound, bound)
        e = [0] * ring.nvars
        e[ring.block_start[block] + j] = 1
        terms[tuple(e)] = c
    return Polynomial(ring, terms)


def s_pp_generators(ring: GradedRing):
    """Monomial generators of S_1: one variable from each block."""
    out = []
    for choice in product(*[range(m) for m in ring.blocks]):
        f = ring.one()
        for i, j in enumerate(choice):
            f = f * ring.var(i, j)
        out.append(f)
    return out


def s_pp_saturation(M: Presentation):
    """Gröbner basis of U : S_++^∞ inside the ambient free module of M."""
    return M.cached("spp_saturation",
                    lambda: saturate_submodule(M.F, list(M.gb.elements), s_pp_generators(M.ring)))


@dataclass(frozen=True)
class FilterRegularity:
    regular: bool
    polynomial_zero: bool
    saturation_contained: bool
    vacuous: bool  # M itself has empty ++-support


def filter_regularity(M: Presentation, a: Polynomial) -> FilterRegularity:
    C = colon_submodule(M, a)
    poly_zero = dim_supp_pp(C) == NEG_INF
    if C.rank == 0 or hilbert_series(C).is_zero():
        contained = True
    else:
        sat = s_pp_saturation(M)
        contained = all(not sat.nf(v) for v in C.embedding)
    if poly_zero != contained:
        raise InternalConsistencyError("filter-regularity criteria disagree")
    return FilterRegularity(poly_zero, poly_zero, contained, dim_supp_pp(M) == NEG_INF)


def is_filter_regular(M: Presentation, a: Polynomial) -> bool:
    return filter_regularity(M, a).regular


def _type_order(k):
    return [i for i, ki in enumerate(k) for _ in range(ki)]


def build_filter_regular_sequence(M: Presentation, k, rng_seed=0, retries: int = DEFAULT_RETRIES,
                                  bound: int = DEFAULT_BOUND) -> ElementSequence:
    rng = _rng(rng_seed)
    cur = M
    xs = []
    for i in _type_order(k):
        for _ in range(retries):
            a = sample_generic(M.ring, i, rng, bound)
            if is_filter_regular(cur, a):
                xs.append(a)
                cur = quotient_by_elements(cur, [a])
                break
        else:
            raise GenericityExhausted(f"no filter-regular element in block {i + 1} after {retries} draws")
    return ElementSequence.of(M.ring, xs)


def certify_mm_system(M: Presentation, xs, with_flags: bool = False) -> SystemCertificate:
    xs = list(xs)
    d = dim_supp_pp(quotient_by_elements(M, xs))
    flags = ()
    if with_flags:
        cur, out = M, []
        for a in xs:
            out.append(is_filter_regular(cur, a))
            cur = quotient_by_elements(cur, [a])
        flags = tuple(out)
    return SystemCertificate(d <= 0, d, flags)


def sample_mm_system(M: Presentation, k, rng_seed=0, retries: int = DEFAULT_RETRIES,
                     bound: int = DEFAULT_BOUND) -> ElementSequence:
    """Generic elements of type k, resampled until they form an mm-system."""
    rng = _rng(rng_seed)
    order = _type_order(k)
    for _ in range(retries):
        xs = [sample_generic(M.ring, i, rng, bound) for i in order]
        if certify_mm_system(M, xs).is_mm_system:
            return ElementSequence.of(M.ring, xs)
    raise GenericityExhausted(f"no mixed multiplicity system of type {tuple(k)} after {retries} draws")


def _module_key(M: Presentation):
    return (M.F.shifts, M.gb._canon())


def multiplicity_symbol(M: Presentation, xs) -> int:
    """ẽ(x, M) = ẽ(x', M/x_1 M) - ẽ(x', 0_M : x_1); base case the constant length."""
    xs = tuple(xs)
    memo = {}

    def rec(N: Presentation, j: int) -> int:
        key = (_module_key(N), j)
        if key in memo:
            return memo[key]
        rest = xs[j:]
        if hilbert_series(N).is_zero():
            val = 0
        else:
            if dim_supp_pp(quotient_by_elements(N, rest)) > 0:
                raise NotMMSystem("sequence is not a mixed multiplicity system at a recursion node")
            if not rest:
                P = module_hilbert_polynomial(N).poly
                c = P.constant_value()
                if c.denominator != 1:
                    raise InternalConsistencyError("non-integral constant Hilbert polynomial")
                val = int(c)
            else:
                a = rest[0]
                val = rec(quotient_by_elements(N, [a]), j + 1) - rec(colon_submodule(N, a), j + 1)
        memo[key] = val
        return val

    return rec(M, 0)


def _check_type(M, k):
    k = tuple(int(v) for v in k)
    if len(k) != M.ring.d or min(k, default=0) < 0:
        raise ValueError("k must be a non-negative vector with one entry per block")
    return k


def verify_equality_theorem(M: Presentation, k, rng_seed=0, retries: int = DEFAULT_RETRIES,
                            window: int = 3, xs=None) -> dict:
    """E(M;k) = χ(x, M) = ẽ(x, M) for an mm-system x of type k."""
    k = _check_type(M, k)
    s = dim_supp_pp(M)
    if sum(k) < s:
        raise TypeTooSmall(f"|k| = {sum(k)} < dim Supp++ = {s}")
    E = mixed_multiplicity(M, k)
    if xs is None:
        xs = sample_mm_system(M, k, rng_seed, retries)
    else:
        xs = ElementSequence.of(M.ring, xs)
    chi = euler_characteristic(M, xs, window=window)
    sym = multiplicity_symbol(M, xs)
    return {
        "k": k,
        "dim": s,
        "E": E.value,
        "extended": E.extended,
        "chi": chi.value,
        "symbol": sym,
        "witness_degree": chi.witness_degree,
        "homology_lengths": chi.homology_lengths,
        "system": [str(a) for a in xs],
        "form": "e" if sum(k) == s else "E",
        "vacuous": s == NEG_INF,
        "holds": E.value == chi.value == sym,
    }


def stabilized_length(M: Presentation) -> int:
    """Eventual constant value of dim M_n (requires dim Supp++ <= 0)."""
    thr = hilbert_series(M).threshold()
    val = graded_piece_dim(M, thr)
    P = module_hilbert_polynomial(M).poly
    if P.degree() > 0:
        raise ValueError("Hilbert function is not eventually constant")
    if P(thr) != val or graded_piece_dim(M, tuple(t + 1 for t in thr)) != val:
        raise InternalConsistencyError("stabilized length disagrees with Hilbert polynomial")
    return val


def filter_regular_length_formula(M: Presentation, k, rng_seed=0, retries: int = DEFAULT_RETRIES) -> dict:
    """E(M;k) = ℓ(M/xM)_n for large n with x filter-regular of type k, plus the
    criterion e(M;k) != 0 iff dim Supp++(M/xM) = 0."""
    k = _check_type(M, k)
    s = dim_supp_pp(M)
    if sum(k) < s:
        raise TypeTooSmall(f"|k| = {sum(k)} < dim Supp++ = {s}")
    E = mixed_multiplicity(M, k)
    xs = build_filter_regular_sequence(M, k, rng_seed, retries)
    Q = quotient_by_elements(M, xs)
    dq = dim_supp_pp(Q)
    length = stabilized_length(Q)
    e0 = mixed_multiplicity(Q, (0,) * M.ring.d).value
    positivity = (E.value != 0) == (dq == 0)
    return {
        "k": k,
        "dim": s,
        "E": E.value,
        "length": length,
        "E_quotient_zero_type": e0,
        "dim_quotient": dq,
        "system": [str(a) for a in xs],
        "positivity": positivity,
        "vacuous": s == NEG_INF,
        "holds": E.value == length == e0 and positivity,
    }


def reduction_formula_check(M: Presentation, a: Polynomial, k) -> dict:
    """E(M;k) = E(M/aM; k-e_i) - E(0_M:a; k-e_i) when the dimension drops."""
    k = _check_type(M, k)
    i = element_block(M.ring, a)
    if k[i] == 0:
        raise ValueError(f"k_{i + 1} must be positive for an element of block {i + 1}")
    s = dim_supp_pp(M)
    if sum(k) < s:
        raise TypeTooSmall(f"|k| = {sum(k)} < dim Supp++ = {s}")
    Q = quotient_by_elements(M, [a])
    dq = dim_supp_pp(Q)
    if not dq <= s - 1:
        raise DimDropFails(f"dim Supp++(M/aM) = {dq} > {s} - 1")
    C = colon_submodule(M, a)
    km = tuple(v - (1 if j == i else 0) for j, v in enumerate(k))
    E = mixed_multiplicity(M, k).value
    Eq = mixed_multiplicity(Q, km).value
    Ec = mixed_multiplicity(C, km).value
    fr = is_filter_regular(M, a)
    out = {
        "k": k,
        "E": E,
        "E_quotient": Eq,
        "E_colon": Ec,
        "dim_quotient": dq,
        "dim_colon": dim_supp_pp(C),
        "filter_regular": fr,
        "holds": E == Eq - Ec,
    }
    if fr:
        out["filter_regular_branch"] = E == Eq
        out["holds"] = out["holds"] and E == Eq
    return out


def decomposition_formula_check(M: Presentation, xs, k=None) -> dict:
    """e(M;k) = e(M/xM;0) - Σ_i E(((x_1..x_{i-1})M : x_i)/(x_1..x_{i-1})M; k - h_i)."""
    seq = ElementSequence.of(M.ring, xs)
    if k is None:
        k = seq.type
    k = _check_type(M, k)
    if k != seq.type:
        raise ValueError(f"sequence type {seq.type} differs from k = {k}")
    s = dim_supp_pp(M)
    if sum(k) != s:
        raise HypothesisFailed(f"|k| = {sum(k)} must equal dim Supp++ = {s}")
    e = mixed_multiplicity(M, k).value
    if e == 0:
        raise HypothesisFailed("e(M;k) = 0; the decomposition is only claimed for nonzero e")
    if not certify_mm_system(M, seq).is_mm_system:
        raise NotMMSystem("x is not a mixed multiplicity system")
    d = M.ring.d
    cur = M
    h = [0] * d
    prefix_dims = [s]
    corrections = []
    for a in seq:
        i = element_block(M.ring, a)
        h[i] += 1
        N_i = colon_submodule(cur, a)
        km = tuple(kv - hv for kv, hv in zip(k, h))
        corrections.append(mixed_multiplicity(N_i, km).value)
        cur = quotient_by_elements(cur, [a])
        prefix_dims.append(dim_supp_pp(cur))
    e0 = mixed_multiplicity(cur, (0,) * d).value
    drops = all(prefix_dims[j] == s - j for j in range(len(prefix_dims)))
    return {
        "k": k,
        "e": e,
        "e_quotient": e0,
        "corrections": corrections,
        "prefix_dims": prefix_dims,
        "dims_drop": drops,
        "holds": drops and e == e0 - sum(corrections),
    }
