"""Gröbner bases for homogeneous submodules of shifted free modules.

A module vector is a dict ``{(pos, exp): coeff}``.  The term order is
degree-compatible term-over-position: shifted total degree, then grevlex on
the exponent, then position (lower position is larger).
"""

from __future__ import annotations

import heapq
import sys
from itertools import combinations
from operator import add, le, sub

from .algebra import GradedRing, Polynomial
from .errors import NonHomogeneous, RingMismatch

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

NEG_INF = float("-inf")


class FreeModule:
    """Graded free module ⊕ S·e_p with deg e_p = shifts[p]."""

    def __init__(self, ring: GradedRing, shifts):
        self.ring = ring
        self.shifts = tuple(tuple(int(v) for v in s) for s in shifts)
        if any(len(s) != ring.d for s in self.shifts):
            raise ValueError("shift length must equal number of blocks")
        self.rank = len(self.shifts)
        self._tot = tuple(sum(s) for s in self.shifts)
        self._keys = {}
        self._nkeys = {}

    def neg_key(self, t):
        """Key whose ascending order is the descending term order (for heaps)."""
        k = self._nkeys.get(t)
        if k is None:
            pos, exp = t
            sd = sum(exp)
            k = (-sd - self._tot[pos], -sd, tuple(reversed(exp)), pos)
            self._nkeys[t] = k
        return k

    def key(self, t):
        k = self._keys.get(t)
        if k is None:
            pos, exp = t
            sd = sum(exp)
            k = (sd + self._tot[pos], sd, tuple(-e for e in reversed(exp)), -pos)
            self._keys[t] = k
        return k

    def term_degree(self, t) -> tuple:
        pos, exp = t
        return tuple(a + b for a, b in zip(self.ring.mdeg(exp), self.shifts[pos]))

    def total_degree(self, t) -> int:
        return sum(t[1]) + self._tot[t[0]]

    def vec_degree(self, v):
        degs = {self.term_degree(t) for t in v}
        if len(degs) != 1:
            raise NonHomogeneous("vector is zero or not homogeneous")
        return degs.pop()

    def basis_vector(self, p: int) -> dict:
        return {(p, self.ring.zero_exp): 1}

    def __eq__(self, other):
        return isinstance(other, FreeModule) and self.ring == other.ring and self.shifts == other.shifts

    def __hash__(self):
        return hash((self.ring, self.shifts))

    def __repr__(self):
        return f"FreeModule(rank={self.rank}, shifts={self.shifts})"


class ModuleElement:
    """Public wrapper: a tuple of polynomial coordinates."""

    __slots__ = ("module", "coords")

    def __init__(self, module: FreeModule, coords):
        coords = tuple(coords)
        if len(coords) != module.rank:
            raise ValueError("coordinate count must equal rank")
        for c in coords:
            if c.ring != module.ring:
                raise RingMismatch("coordinate ring differs from module ring")
        self.module = module
        self.coords = coords

    def to_vector(self) -> dict:
        return {(p, e): c for p, f in enumerate(self.coords) for e, c in f.terms.items()}

    @classmethod
    def from_vector(cls, module: FreeModule, v: dict) -> "ModuleElement":
        parts = [dict() for _ in range(module.rank)]
        for (p, e), c in v.items():
            parts[p][e] = c
        return cls(module, [Polynomial._raw(module.ring, d) for d in parts])

    def __eq__(self, other):
        return isinstance(other, ModuleElement) and self.module == other.module and self.coords == other.coords

    def __hash__(self):
        return hash((self.module, self.coords))

    def __repr__(self):
        return f"ModuleElement({', '.join(str(c) for c in self.coords)})"


# -- vector helpers --------------------------------------------------------

def vec_from_poly(f: Polynomial, pos: int = 0) -> dict:
    return {(pos, e): c for e, c in f.terms.items()}


def poly_from_vec(ring: GradedRing, v: dict, pos: int = 0) -> Polynomial:
    return Polynomial._raw(ring, {e: c for (p, e), c in v.items() if p == pos})


def addmul(target: dict, src: dict, c, u, p: int, posmap=None):
    """target += c * x^u * src (in place).  `posmap` relabels positions."""
    for (pos, e), sc in src.items():
        if posmap is not None:
            pos = posmap[pos]
        m = (pos, tuple(map(add, e, u)) if u is not None else e)
        v = target.get(m, 0) + c * sc
        if p:
            v %= p
        if v:
            target[m] = v
        else:
            target.pop(m, None)


def scale_vec(v: dict, c, p: int) -> dict:
    if p:
        return {t: x * c % p for t, x in v.items()}
    return {t: x * c for t, x in v.items()}


def mul_poly_vec(f: Polynomial, v: dict, p: int) -> dict:
    out = {}
    for e, c in f.terms.items():
        addmul(out, v, c, e, p)
    return out


def combine(coeffs: dict, images, p: int) -> dict:
    """Σ coeffs[(j, e)] x^e images[j]."""
    out = {}
    for (j, e), c in coeffs.items():
        addmul(out, images[j], c, e, p)
    return out


def _divides(a, b) -> bool:
    return all(map(le, a, b))


def _lcm(a, b):
    return tuple(map(max, a, b))


def _sub(a, b):
    return tuple(map(sub, a, b))


# -- core Buchberger ---------------------------------------------------------

class _State:
    __slots__ = ("F", "p", "inv", "elems", "by_pos")

    def __init__(self, F: FreeModule):
        self.F = F
        self.p = F.ring.field.p
        self.inv = F.ring.field.inv
        self.elems = []          # [lt, vec, trace]
        self.by_pos = {}

    def find(self, t):
        pos, e = t
        for a, idx in self.by_pos.get(pos, ()):
            if all(map(le, a, e)):
                return idx
        return None

    def reduce(self, v: dict, tr, skip=None):
        """Full reduction; `skip` excludes one element index."""
        nkey = self.F.neg_key
        p = self.p
        v = dict(v)
        heap = [(nkey(t), t) for t in v]
        heapq.heapify(heap)
        out = {}
        while heap:
            _, t = heapq.heappop(heap)
            c = v.get(t)
            if c is None:
                continue
            pos, e = t
            r = None
            for a, idx in self.by_pos.get(pos, ()):
                if idx != skip and all(map(le, a, e)):
                    r = idx
                    break
            if r is None:
                out[t] = v.pop(t)
                continue
            lt, gv, gtr = self.elems[r]
            f = (-c) % p if p else -c
            u = _sub(e, lt[1])
            for (gp, ge), gc in gv.items():
                m = (gp, tuple(map(add, ge, u)))
                old = v.get(m)
                w = (old or 0) + f * gc
                if p:
                    w %= p
                if w:
                    v[m] = w
                    if old is None:
                        heapq.heappush(heap, (nkey(m), m))
                elif old is not None:
                    del v[m]
            if tr is not None:
                addmul(tr, gtr, f, u, p)
        return out, tr

    def add(self, lt, vec, tr):
        idx = len(self.elems)
        self.elems.append([lt, vec, tr])
        self.by_pos.setdefault(lt[0], []).append((lt[1], idx))
        return idx


def _monic(state, v, tr):
    key = state.F.key
    lt = max(v, key=key)
    c = v[lt]
    if c != 1:
        ci = state.inv(c)
        v = scale_vec(v, ci, state.p)
        if tr is not None:
            tr = scale_vec(tr, ci, state.p)
    return lt, v, tr


def _run_buchberger(F: FreeModule, gens, trace: bool):
    """Returns (state, syzygy traces).  Traces live in a free module whose
    basis is indexed by the input generators."""
    state = _State(F)
    p = state.p
    syz = []
    queue = []
    zero_exp = F.ring.zero_exp
    for idx, g in enumerate(gens):
        if not g:
            if trace:
                syz.append({(idx, zero_exp): 1})
            continue
        t0 = next(iter(g))
        heapq.heappush(queue, (F.total_degree(t0), 0, idx, -1))
    alive = set()
    ideal_case = (F.rank == 1 and not trace)

    while queue:
        deg, kind, i, j = heapq.heappop(queue)
        if kind == 0:
            v = gens[i]
            tr = {(i, zero_exp): 1} if trace else None
        else:
            if (i, j) not in alive:
                continue
            alive.discard((i, j))
            lti, vi, tri = state.elems[i]
            ltj, vj, trj = state.elems[j]
            L = _lcm(lti[1], ltj[1])
            ui, uj = _sub(L, lti[1]), _sub(L, ltj[1])
            v = {}
            addmul(v, vi, 1, ui, p)
            addmul(v, vj, (-1) % p if p else -1, uj, p)
            tr = None
            if trace:
                tr = {}
                addmul(tr, tri, 1, ui, p)
                addmul(tr, trj, (-1) % p if p else -1, uj, p)
        v, tr = state.reduce(v, tr)
        if not v:
            if trace and tr:
                syz.append(tr)
            continue
        lt, v, tr = _monic(state, v, tr)
        t = state.add(lt, v, tr)
        _update_pairs(state, t, alive, queue, ideal_case)
    return state, syz


def _update_pairs(state, t, alive, queue, ideal_case):
    F = state.F
    lt_t = state.elems[t][0]
    pos, a_t = lt_t
    # B criterion on existing pairs
    for (i, j) in list(alive):
        lti = state.elems[i][0]
        if lti[0] != pos:
            continue
        ltj = state.elems[j][0]
        L = _lcm(lti[1], ltj[1])
        if _divides(a_t, L) and _lcm(lti[1], a_t) != L and _lcm(ltj[1], a_t) != L:
            alive.discard((i, j))
    new = []
    for i in range(t):
        lti = state.elems[i][0]
        if lti[0] == pos:
            L = _lcm(lti[1], a_t)
            coprime = all(x == 0 or y == 0 for x, y in zip(lti[1], a_t))
            new.append((L, i, coprime))
    # M criterion: drop pairs whose lcm is a proper multiple of another new lcm
    kept = []
    for L, i, cp in new:
        if any(L2 != L and _divides(L2, L) for L2, _, _ in new):
            continue
        kept.append((L, i, cp))
    # F criterion (one per lcm class), product criterion for ideals only
    classes = {}
    for L, i, cp in kept:
        classes.setdefault(L, []).append((i, cp))
    for L, members in classes.items():
        if ideal_case and any(cp for _, cp in members):
            continue
        i = members[0][0]
        alive.add((i, t))
        heapq.heappush(queue, (sum(L) + F._tot[pos], 1, i, t))


def _interreduce(state) -> list:
    elems = state.elems
    n = len(elems)
    minimal = []
    for idx in range(n):
        pos, a = elems[idx][0]
        if any(j != idx and elems[j][0][0] == pos and _divides(elems[j][0][1], a) for j in range(n)):
            continue
        minimal.append(idx)
    mstate = _State(state.F)
    for idx in minimal:
        lt, v, _ = elems[idx]
        mstate.add(lt, v, None)
    out = []
    for k, idx in enumerate(minimal):
        lt, v, _ = elems[idx]
        tail = dict(v)
        c = tail.pop(lt)
        red, _ = mstate.reduce(tail, None, skip=k)
        red[lt] = c
        out.append(red)
    out.sort(key=lambda w: state.F.key(max(w, key=state.F.key)))
    return out


def _is_monomial_input(gens) -> bool:
    return all(len(g) <= 1 for g in gens)


def buchberger_vectors(F: FreeModule, gens) -> list:
    """Reduced Gröbner basis (list of monic vectors) of the submodule spanned by gens."""
    gens = [g for g in gens if g]
    if _is_monomial_input(gens):
        terms = sorted({next(iter(g)) for g in gens}, key=F.key)
        out = []
        for t in terms:
            if not any(s[0] == t[0] and _divides(s[1], t[1]) for s in out):
                out.append(t)
        return [{t: 1} for t in out]
    state, _ = _run_buchberger(F, gens, trace=False)
    return _interreduce(state)


class GroebnerBasis:
    """Reduced Gröbner basis with cached normal forms of monomials."""

    def __init__(self, F: FreeModule, elements):
        self.F = F
        self.elements = tuple(elements)
        self.leads = tuple(max(v, key=F.key) for v in self.elements)
        self.by_pos = {}
        for idx, (pos, e) in enumerate(self.leads):
            self.by_pos.setdefault(pos, []).append((e, idx))
        self._nf_cache = {}
        self.reduced = True

    @classmethod
    def compute(cls, F: FreeModule, gens) -> "GroebnerBasis":
        return cls(F, buchberger_vectors(F, gens))

    def reducer(self, t):
        pos, e = t
        for a, idx in self.by_pos.get(pos, ()):
            if all(map(le, a, e)):
                return idx
        return None

    def is_standard(self, t) -> bool:
        return self.reducer(t) is None

    def nf_term(self, t) -> dict:
        """Normal form of the monomial vector t (memoized)."""
        hit = self._nf_cache.get(t)
        if hit is not None:
            return hit
        idx = self.reducer(t)
        if idx is None:
            out = {t: 1}
        else:
            p = self.F.ring.field.p
            lt = self.leads[idx]
            u = _sub(t[1], lt[1])
            out = {}
            for (pos, e), c in self.elements[idx].items():
                if (pos, e) == lt:
                    continue
                m = (pos, tuple(map(add, e, u)))
                f = (-c) % p if p else -c
                addmul(out, self.nf_term(m), f, None, p)
        self._nf_cache[t] = out
        return out

    def nf(self, v: dict) -> dict:
        p = self.F.ring.field.p
        out = {}
        for t, c in v.items():
            addmul(out, self.nf_term(t), c, None, p)
        return out

    def contains(self, v: dict) -> bool:
        return not self.nf(v)

    def contains_all(self, vs) -> bool:
        return all(self.contains(v) for v in vs)

    def lead_ideals(self) -> dict:
        """Position -> list of leading exponents at that position."""
        out = {p: [] for p in range(self.F.rank)}
        for pos, e in self.leads:
            out[pos].append(e)
        return out

    def _canon(self):
        return frozenset(frozenset(v.items()) for v in self.elements)

    def __eq__(self, other):
        return isinstance(other, GroebnerBasis) and self.F == other.F and self._canon() == other._canon()

    def __hash__(self):
        return hash(self._canon())

    def __len__(self):
        return len(self.elements)


# -- public operations ----------------------------------------------------------

def _as_vectors(gens):
    out = []
    for g in gens:
        if isinstance(g, ModuleElement):
            out.append(g.to_vector())
        elif isinstance(g, Polynomial):
            out.append(vec_from_poly(g))
        else:
            out.append(dict(g))
    return out


def buchberger(gens, free: FreeModule) -> GroebnerBasis:
    """Reduced Gröbner basis of the submodule generated by `gens`."""
    vecs = _as_vectors(gens)
    for v in vecs:
        if v:
            free.vec_degree(v)
    return GroebnerBasis.compute(free, vecs)


def normal_form(v, gb: GroebnerBasis):
    vec = _as_vectors([v])[0]
    out = gb.nf(vec)
    if isinstance(v, Polynomial):
        return poly_from_vec(gb.F.ring, out)
    if isinstance(v, ModuleElement):
        return ModuleElement.from_vector(gb.F, out)
    return out


def syzygies(F: FreeModule, gens, degrees=None):
    """Generators of the syzygy module of `gens` (vectors in F).

    Returns (F', syz) where F' has one basis vector per generator, placed in
    the generator's degree.  Uses cofactor tracking during Buchberger; the
    traces of pairs reducing to zero generate the syzygies.
    """
    gens = list(gens)
    if degrees is None:
        degrees = [F.vec_degree(g) for g in gens]
    Fp = FreeModule(F.ring, degrees)
    _, syz = _run_buchberger(F, gens, trace=True)
    return Fp, syz


def colon_generators(F: FreeModule, U_gens, a: Polynomial) -> list:
    """Generators of (U :_F a) = {v in F : a v in U}."""
    r = F.rank
    p = F.ring.field.p
    if a.is_zero():
        return [F.basis_vector(q) for q in range(r)]
    da = a.multidegree()
    gens = [mul_poly_vec(a, F.basis_vector(q), p) for q in range(r)] + list(U_gens)
    degrees = [tuple(x + y for x, y in zip(F.shifts[q], da)) for q in range(r)]
    degrees += [F.vec_degree(u) for u in U_gens]
    _, syz = syzygies(F, gens, degrees)
    out = []
    for s in syz:
        v = {(j, e): c for (j, e), c in s.items() if j < r}
        if v:
            out.append(v)
    return out


def intersect_generators(F: FreeModule, U_gens, V_gens) -> list:
    """Generators of U ∩ V inside F."""
    U_gens = [u for u in U_gens if u]
    V_gens = [v for v in V_gens if v]
    if not U_gens or not V_gens:
        return []
    p = F.ring.field.p
    _, syz = syzygies(F, U_gens + V_gens)
    nu = len(U_gens)
    out = []
    for s in syz:
        part = {(j, e): c for (j, e), c in s.items() if j < nu}
        w = combine(part, U_gens, p)
        if w:
            out.append(w)
    return out


def intersect(F: FreeModule, U_gens, V_gens) -> GroebnerBasis:
    return GroebnerBasis.compute(F, intersect_generators(F, _as_vectors(U_gens), _as_vectors(V_gens)))


def colon(F: FreeModule, U_gens, a: Polynomial) -> GroebnerBasis:
    return GroebnerBasis.compute(F, colon_generators(F, _as_vectors(U_gens), a))


def saturate_by_element(F: FreeModule, U: GroebnerBasis, b: Polynomial) -> GroebnerBasis:
    cur = U
    while True:
        nxt = GroebnerBasis.compute(F, colon_generators(F, list(cur.elements), b))
        if nxt == cur:
            return cur
        cur = nxt


def saturate_submodule(F: FreeModule, U_gens, ideal_gens) -> GroebnerBasis:
    """U :_F 𝔟^∞, computed as the intersection of the U : b^∞ over generators b."""
    U = GroebnerBasis.compute(F, _as_vectors(U_gens))
    ideal_gens = [b for b in ideal_gens if not b.is_zero()]
    if not ideal_gens:
        return U
    if any(b.multidegree() == (0,) * F.ring.d for b in ideal_gens):
        return U  # unit ideal: U : (1) = U
    result = None
    for b in ideal_gens:
        sat = saturate_by_element(F, U, b)
        if result is None:
            result = sat
        elif _contains_gb(result, sat):
            result = sat
        elif not _contains_gb(sat, result):
            result = GroebnerBasis.compute(F, intersect_generators(F, list(result.elements), list(sat.elements)))
    return result


def _contains_gb(big: GroebnerBasis, small: GroebnerBasis) -> bool:
    return all(not big.nf(v) for v in small.elements)


def monomial_ideal_dim(nvars: int, gens) -> int | float:
    """Krull dimension of k[x]/(monomials): size of a maximal independent set."""
    supports = [frozenset(k for k, e in enumerate(g) if e) for g in gens]
    if any(not s for s in supports):
        return NEG_INF
    supports = [s for s in supports if not any(t < s for t in supports)]
    # search complements: smallest vertex cover hitting every support
    for size in range(0, nvars + 1):
        for cover in combinations(range(nvars), size):
            cs = set(cover)
            if all(s & cs for s in supports):
                return nvars - size
    return 0


def krull_dim_gb(gb: GroebnerBasis) -> int | float:
    """Krull dimension of F/U from the leading-term module."""
    n = gb.F.ring.nvars
    best = NEG_INF
    for pos, exps in gb.lead_ideals().items():
        d = monomial_ideal_dim(n, exps)
        if d > best:
            best = d
    return best
