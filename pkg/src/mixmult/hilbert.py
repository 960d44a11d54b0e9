"""Multigraded Hilbert series, Hilbert polynomials and mixed multiplicities."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .errors import NonIntegralMultiplicity, TypeTooSmall
from .groebner import NEG_INF
from .modules import Presentation, colon_submodule, element_block, quotient_by_elements


# -- rational polynomials in the degree variables n_1..n_d -------------------

class QPoly:
    """Polynomial in d variables with Fraction coefficients: {exp: coeff}."""

    __slots__ = ("d", "c")

    def __init__(self, d: int, coeffs=None):
        self.d = d
        self.c = {tuple(e): Fraction(v) for e, v in (coeffs or {}).items() if v}

    @classmethod
    def constant(cls, d, v):
        return cls(d, {(0,) * d: v})

    def __call__(self, n) -> Fraction:
        total = Fraction(0)
        for e, v in self.c.items():
            term = v
            for x, k in zip(n, e):
                term *= x ** k
            total += term
        return total

    def degree(self):
        return max((sum(e) for e in self.c), default=NEG_INF)

    def is_zero(self) -> bool:
        return not self.c

    def __add__(self, other):
        out = dict(self.c)
        for e, v in other.c.items():
            out[e] = out.get(e, 0) + v
        return QPoly(self.d, out)

    def __neg__(self):
        return QPoly(self.d, {e: -v for e, v in self.c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, QPoly):
            return QPoly(self.d, {e: v * other for e, v in self.c.items()})
        out = {}
        for e1, v1 in self.c.items():
            for e2, v2 in other.c.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + v1 * v2
        return QPoly(self.d, out)

    def __eq__(self, other):
        return isinstance(other, QPoly) and self.d == other.d and self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def shift(self, i: int, s: int) -> "QPoly":
        """n ↦ P(n + s e_i)."""
        out = {}
        for e, v in self.c.items():
            k = e[i]
            for j in range(k + 1):
                f = v * comb(k, j) * Fraction(s) ** (k - j)
                if f:
                    ne = e[:i] + (j,) + e[i + 1:]
                    out[ne] = out.get(ne, 0) + f
        return QPoly(self.d, out)

    def backward_difference(self, i: int) -> "QPoly":
        return self - self.shift(i, -1)

    def difference(self, k) -> "QPoly":
        out = self
        for i, ki in enumerate(k):
            for _ in range(ki):
                out = out.backward_difference(i)
        return out

    def coefficient(self, e) -> Fraction:
        return self.c.get(tuple(e), Fraction(0))

    def constant_value(self) -> Fraction:
        if any(sum(e) for e in self.c):
            raise ValueError("polynomial is not constant")
        return self.c.get((0,) * self.d, Fraction(0))

    def to_json(self):
        return [{"exp": list(e), "coeff": str(v)} for e, v in sorted(self.c.items(), reverse=True)]

    def __repr__(self):
        if not self.c:
            return "0"
        parts = []
        for e, v in sorted(self.c.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True):
            mono = "*".join(f"n{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            parts.append(f"{v}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


# -- Hilbert series -------------------------------------------------------------

@dataclass(frozen=True)
class HilbertSeries:
    """Σ numerator[a] t^a / Π (1 - t_i)^{m_i}."""

    numerator: dict
    blocks: tuple

    def coefficient(self, n) -> int:
        total = 0
        for a, c in self.numerator.items():
            term = c
            for ni, ai, m in zip(n, a, self.blocks):
                if ni < ai:
                    term = 0
                    break
                term *= comb(ni - ai + m - 1, m - 1)
            total += term
        return total

    def threshold(self) -> tuple:
        d = len(self.blocks)
        if not self.numerator:
            return (0,) * d
        return tuple(max(a[i] for a in self.numerator) for i in range(d))

    def is_zero(self) -> bool:
        return not self.numerator

    def to_json(self):
        return [{"deg": list(a), "coeff": c} for a, c in sorted(self.numerator.items())]


def _add_into(acc: dict, other: dict, shift=None, sign=1):
    for a, c in other.items():
        if shift is not None:
            a = tuple(x + y for x, y in zip(a, shift))
        v = acc.get(a, 0) + sign * c
        if v:
            acc[a] = v
        else:
            acc.pop(a, None)


def _minimalize(gens):
    gens = sorted(set(gens), key=sum)
    out = []
    for g in gens:
        if not any(all(x <= y for x, y in zip(h, g)) for h in out):
            out.append(g)
    return tuple(sorted(out))


@lru_cache(maxsize=200000)
def _numerator(var_block: tuple, d: int, gens: tuple) -> tuple:
    """Numerator of the multigraded series of k[x]/(monomials gens), as
    a sorted tuple of (degree, coeff) pairs.  `gens` must be minimal."""
    zero = (0,) * d

    def mdeg(e):
        out = [0] * d
        for x, b in zip(e, var_block):
            out[b] += x
        return tuple(out)

    if not gens:
        return ((zero, 1),)
    if any(not any(g) for g in gens):
        return ()
    # pairwise coprime generators: Π (1 - t^deg g)
    used = [0] * len(var_block)
    coprime = True
    for g in gens:
        for k, x in enumerate(g):
            if x:
                if used[k]:
                    coprime = False
                    break
                used[k] = 1
        if not coprime:
            break
    if coprime:
        acc = {zero: 1}
        for g in gens:
            dg = mdeg(g)
            new = dict(acc)
            _add_into(new, acc, shift=dg, sign=-1)
            acc = new
        return tuple(sorted(acc.items()))
    # pivot on the variable occurring in most mixed generators; the pivot
    # power stays below any pure power of that variable so both branches shrink
    counts = [0] * len(var_block)
    for g in gens:
        if sum(1 for x in g if x) > 1:
            for k, x in enumerate(g):
                if x:
                    counts[k] += 1
    v = max(range(len(var_block)), key=lambda k: counts[k])
    exps = sorted(g[v] for g in gens if g[v] and sum(1 for x in g if x) > 1)
    e = exps[len(exps) // 2]
    pivot = tuple(e if k == v else 0 for k in range(len(var_block)))
    plus = _minimalize(gens + (pivot,))
    colon = _minimalize(tuple(
        tuple(max(0, x - (e if k == v else 0)) for k, x in enumerate(g)) for g in gens
    ))
    acc = dict(_numerator(var_block, d, plus))
    _add_into(acc, dict(_numerator(var_block, d, colon)), shift=mdeg(pivot))
    return tuple(sorted(acc.items()))


def monomial_numerator(ring, gens) -> dict:
    return dict(_numerator(ring.var_block, ring.d, _minimalize(tuple(tuple(g) for g in gens))))


def hilbert_series(M: Presentation) -> HilbertSeries:
    def compute():
        acc = {}
        for pos, exps in M.gb.lead_ideals().items():
            _add_into(acc, monomial_numerator(M.ring, exps), shift=M.shifts[pos])
        return HilbertSeries(acc, M.ring.blocks)
    return M.cached("hilbert_series", compute)


# -- Hilbert polynomial -------------------------------------------------------------

@dataclass(frozen=True)
class HilbertPolynomial:
    poly: QPoly
    threshold: tuple

    def __call__(self, n):
        return self.poly(n)

    def degree(self):
        return self.poly.degree()


@lru_cache(maxsize=None)
def _binomial_factor(m: int, a: int) -> tuple:
    """Coefficients (ascending) of C(x - a + m - 1, m - 1) as a polynomial in x."""
    coeffs = [Fraction(1)]
    for j in range(1, m):
        shift = j - a  # factor (x + shift)
        new = [Fraction(0)] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            new[k] += c * shift
            new[k + 1] += c
        coeffs = new
    f = factorial(m - 1)
    return tuple(c / f for c in coeffs)


def hilbert_polynomial(hs: HilbertSeries) -> HilbertPolynomial:
    d = len(hs.blocks)
    total = {}
    for a, c in hs.numerator.items():
        term = {(): Fraction(c)}
        for i in range(d):
            fac = _binomial_factor(hs.blocks[i], a[i])
            new = {}
            for e, v in term.items():
                for k, fc in enumerate(fac):
                    if fc:
                        ne = e + (k,)
                        new[ne] = new.get(ne, 0) + v * fc
            term = new
        for e, v in term.items():
            total[e] = total.get(e, 0) + v
    return HilbertPolynomial(QPoly(d, total), hs.threshold())


def module_hilbert_polynomial(M: Presentation) -> HilbertPolynomial:
    return M.cached("hilbert_polynomial", lambda: hilbert_polynomial(hilbert_series(M)))


def dim_supp_pp(M: Presentation):
    """Degree of the Hilbert polynomial; -inf when it vanishes."""
    return module_hilbert_polynomial(M).degree()


@dataclass(frozen=True)
class MixedMultiplicity:
    k: tuple
    value: int
    extended: bool


def _as_int(v: Fraction, what: str) -> int:
    if v.denominator != 1:
        raise NonIntegralMultiplicity(f"{what} = {v} is not an integer")
    return int(v)


def mixed_multiplicity(M: Presentation, k) -> MixedMultiplicity:
    """E(M;k): Δ^k P_M when |k| = dim, 0 when |k| > dim."""
    k = tuple(int(x) for x in k)
    if len(k) != M.ring.d or min(k, default=0) < 0:
        raise ValueError("k must be a non-negative vector with one entry per block")
    P = module_hilbert_polynomial(M).poly
    s = P.degree()
    if sum(k) < s:
        raise TypeTooSmall(f"|k| = {sum(k)} < dim Supp++ = {s}")
    if sum(k) > s:
        return MixedMultiplicity(k, 0, True)
    D = P.difference(k)
    if D.degree() > 0:
        raise NonIntegralMultiplicity("k-difference of the Hilbert polynomial is not constant")
    val = _as_int(D.constant_value(), f"e(M;{k})")
    lead = P.coefficient(k)
    for x in k:
        lead *= factorial(x)
    if lead != val:
        raise NonIntegralMultiplicity(f"difference {val} disagrees with k!*coefficient {lead}")
    if val < 0:
        raise NonIntegralMultiplicity(f"negative mixed multiplicity {val}")
    return MixedMultiplicity(k, val, False)


def difference_formula_check(M: Presentation, a) -> dict:
    """Δ^{e_i} P_M(n) = P_{M/aM}(n) - P_{0_M:a}(n - e_i), all exact."""
    i = element_block(M.ring, a)
    PM = module_hilbert_polynomial(M).poly
    Pq = module_hilbert_polynomial(quotient_by_elements(M, [a])).poly
    Pc = module_hilbert_polynomial(colon_submodule(M, a)).poly
    lhs = PM.backward_difference(i)
    rhs = Pq - Pc.shift(i, -1)
    return {
        "block": i,
        "holds": lhs == rhs,
        "delta_P": lhs,
        "P_quotient": Pq,
        "P_colon": Pc,
    }
