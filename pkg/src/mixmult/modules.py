"""Finitely presented multigraded modules carried as presentations F/U."""

from __future__ import annotations

from .algebra import GradedRing, Polynomial, enumerate_monomials
from .errors import NonHomogeneous, RingMismatch
from .groebner import (
    FreeModule,
    GroebnerBasis,
    ModuleElement,
    colon_generators,
    mul_poly_vec,
    syzygies,
    vec_from_poly,
)


class Presentation:
    """coker of relations inside the shifted free module F.

    The Gröbner basis of the relation submodule is computed on first use and
    cached; everything else is immutable.
    """

    def __init__(self, ring: GradedRing, shifts, relations=(), label: str = ""):
        self.ring = ring
        self.F = FreeModule(ring, shifts)
        rels = []
        for r in relations:
            if isinstance(r, ModuleElement):
                r = r.to_vector()
            r = dict(r)
            if r:
                self.F.vec_degree(r)
                rels.append(r)
        self.relations = tuple(rels)
        self.label = label
        self._gb = None
        self._cache = {}

    @property
    def gb(self) -> GroebnerBasis:
        if self._gb is None:
            self._gb = GroebnerBasis.compute(self.F, self.relations)
        return self._gb

    @property
    def rank(self) -> int:
        return self.F.rank

    @property
    def shifts(self):
        return self.F.shifts

    def is_zero(self) -> bool:
        zero = self.ring.zero_exp
        return all(not self.gb.is_standard((p, zero)) for p in range(self.rank))

    def piece_basis(self, n) -> list:
        """Standard monomials (pos, exp) spanning M_n, in decreasing term order."""
        n = tuple(n)
        out = []
        gb = self.gb
        for pos, sh in enumerate(self.F.shifts):
            m = tuple(a - b for a, b in zip(n, sh))
            if min(m) < 0:
                continue
            for e in enumerate_monomials(self.ring, m):
                t = (pos, e)
                if gb.is_standard(t):
                    out.append(t)
        out.sort(key=self.F.key, reverse=True)
        return out

    def cached(self, name, fn):
        if name not in self._cache:
            self._cache[name] = fn()
        return self._cache[name]

    def __repr__(self):
        tag = f" {self.label}" if self.label else ""
        return f"<Presentation{tag} rank={self.rank} relations={len(self.relations)}>"


def _check_ring(ring, polys):
    for f in polys:
        if f.ring != ring:
            raise RingMismatch("polynomial from a different ring")


def free_module(ring: GradedRing, shifts=None) -> Presentation:
    if shifts is None:
        shifts = [(0,) * ring.d]
    return Presentation(ring, shifts, (), label="free")


def cyclic_quotient(ring: GradedRing, ideal_gens) -> Presentation:
    """S/I with zero shift."""
    gens = list(ideal_gens)
    _check_ring(ring, gens)
    for g in gens:
        if not g.is_zero() and not g.is_homogeneous():
            raise NonHomogeneous(f"generator {g} is not homogeneous")
    return Presentation(ring, [(0,) * ring.d], [vec_from_poly(g) for g in gens if not g.is_zero()],
                        label="cyclic")


def direct_sum(*mods: Presentation) -> Presentation:
    ring = mods[0].ring
    shifts, rels, off = [], [], 0
    for M in mods:
        if M.ring != ring:
            raise RingMismatch("direct sum of modules over different rings")
        shifts.extend(M.shifts)
        for r in M.relations:
            rels.append({(p + off, e): c for (p, e), c in r.items()})
        off += M.rank
    return Presentation(ring, shifts, rels, label="sum")


def element_block(ring: GradedRing, a: Polynomial) -> int:
    """Block index i when a is homogeneous of degree e_i."""
    if a.is_zero():
        raise NonHomogeneous("zero element has no degree")
    deg = a.multidegree()
    if sum(deg) != 1:
        raise NonHomogeneous(f"{a} has degree {deg}, expected some e_i")
    return deg.index(1)


def quotient_by_elements(M: Presentation, xs, check_degree: bool = True) -> Presentation:
    """M/xM.  Elements must be homogeneous of some degree e_i (zero allowed)."""
    xs = list(xs)
    if not xs:
        return M
    _check_ring(M.ring, xs)
    p = M.ring.field.p
    rels = list(M.relations)
    for a in xs:
        if a.is_zero():
            continue
        if check_degree:
            element_block(M.ring, a)
        elif not a.is_homogeneous():
            raise NonHomogeneous(f"{a} is not homogeneous")
        for q in range(M.rank):
            rels.append(mul_poly_vec(a, M.F.basis_vector(q), p))
    return Presentation(M.ring, M.shifts, rels, label="quotient")


def quotient_by_submodule(M: Presentation, gens) -> Presentation:
    gens = [dict(g) for g in gens if g]
    return Presentation(M.ring, M.shifts, list(M.relations) + gens, label="quotient")


def _minimize(M: Presentation, gens) -> list:
    """Drop generators already in U + (earlier generators), processing by degree."""
    gb = M.gb
    cands = []
    for g in gens:
        r = gb.nf(g)
        if r:
            cands.append(r)
    cands.sort(key=lambda v: (M.F.total_degree(next(iter(v))), M.F.key(max(v, key=M.F.key))))
    kept = []
    cur = gb
    for v in cands:
        if cur.nf(v):
            kept.append(v)
            cur = GroebnerBasis.compute(M.F, list(gb.elements) + kept)
    return kept


def submodule_presentation(M: Presentation, gens, minimize: bool = True) -> Presentation:
    """The submodule of M generated by `gens` (vectors of M.F), as its own
    presentation.  The generating vectors are kept in `.embedding`."""
    gens = _minimize(M, gens) if minimize else [dict(g) for g in gens if g]
    if not gens:
        out = Presentation(M.ring, [], (), label="zero")
        out.embedding = []
        return out
    degrees = [M.F.vec_degree(g) for g in gens]
    U = list(M.gb.elements)
    allg = gens + U
    alldeg = degrees + [M.F.vec_degree(u) for u in U]
    _, syz = syzygies(M.F, allg, alldeg)
    t = len(gens)
    rels = []
    for s in syz:
        v = {(j, e): c for (j, e), c in s.items() if j < t}
        if v:
            rels.append(v)
    out = Presentation(M.ring, degrees, rels, label="submodule")
    out.embedding = gens
    return out


def colon_submodule(M: Presentation, a: Polynomial) -> Presentation:
    """Presentation of 0_M : a, with generators recorded in `.embedding`."""
    _check_ring(M.ring, [a])
    if not a.is_zero() and not a.is_homogeneous():
        raise NonHomogeneous(f"{a} is not homogeneous")
    key = ("colon", a)
    if key in M._cache:
        return M._cache[key]
    gens = colon_generators(M.F, list(M.gb.elements), a)
    out = submodule_presentation(M, gens)
    out.label = "colon"
    M._cache[key] = out
    return out


def graded_piece_dim(M: Presentation, n) -> int:
    """dim_k M_n by counting standard monomials."""
    n = tuple(n)
    gb = M.gb
    count = 0
    for pos, sh in enumerate(M.F.shifts):
        m = tuple(a - b for a, b in zip(n, sh))
        if min(m) < 0:
            continue
        for e in enumerate_monomials(M.ring, m):
            if gb.is_standard((pos, e)):
                count += 1
    return count


def build_ses(M: Presentation, U_gens):
    """(U as a module, M, M/U) for a homogeneous submodule U of M."""
    U_gens = [g.to_vector() if isinstance(g, ModuleElement) else dict(g) for g in U_gens]
    sub = submodule_presentation(M, U_gens)
    quo = quotient_by_submodule(M, U_gens)
    return sub, M, quo
