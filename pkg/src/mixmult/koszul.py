"""Degreewise Koszul complexes K(x, M)_n and the Euler characteristic χ(x, M)."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import InternalConsistencyError, NotMMSystem, StabilizationError
from .groebner import addmul
from .hilbert import dim_supp_pp, hilbert_series
from .linalg import rank
from .modules import Presentation, element_block, graded_piece_dim, quotient_by_elements


@dataclass(frozen=True)
class KoszulSlice:
    degree: tuple
    chain_dims: tuple        # dim K_i at degree n, i = 0..len(x)
    differential_ranks: tuple  # rank d_i : K_i -> K_{i-1}, i = 1..len(x)

    def homology(self) -> tuple:
        r = (0,) + self.differential_ranks + (0,)
        return tuple(self.chain_dims[i] - r[i] - r[i + 1] for i in range(len(self.chain_dims)))


@dataclass(frozen=True)
class EulerCharacteristic:
    value: int
    witness_degree: tuple
    homology_lengths: tuple
    window: tuple


def _subset_degree(ring, blocks, T):
    deg = [0] * ring.d
    for t in T:
        deg[blocks[t]] += 1
    return tuple(deg)


def _basis(M: Presentation, n):
    def compute():
        if min(n) < 0:
            return [], {}
        b = M.piece_basis(n)
        return b, {t: k for k, t in enumerate(b)}
    return M.cached(("basis", n), compute)


def koszul_differentials(M: Presentation, xs, n):
    """Chain groups and sparse matrices of the degree-n slice.

    Returns (dims, mats) with mats[j-1] the rows (one per basis element of
    K_j) of d_j : K_j -> K_{j-1}.
    """
    ring = M.ring
    p = ring.field.p
    n = tuple(n)
    xs = list(xs)
    blocks = [element_block(ring, a) for a in xs]
    r = len(xs)
    layout = []   # per j: dict T -> (offset, basis, index)
    dims = []
    for j in range(r + 1):
        off = 0
        lay = {}
        for T in combinations(range(r), j):
            dT = _subset_degree(ring, blocks, T)
            deg = tuple(a - b for a, b in zip(n, dT))
            basis, index = _basis(M, deg)
            lay[T] = (off, basis, index)
            off += len(basis)
        layout.append(lay)
        dims.append(off)
    gb = M.gb
    mats = []
    for j in range(1, r + 1):
        rows = []
        for T, (off, basis, _) in layout[j].items():
            for b in basis:
                pos, e = b
                row = {}
                for idx, t in enumerate(T):
                    sign = 1 if idx % 2 == 0 else -1
                    Tp = T[:idx] + T[idx + 1:]
                    toff, _, tindex = layout[j - 1][Tp]
                    img = {}
                    for ea, ca in xs[t].terms.items():
                        m = (pos, tuple(x + y for x, y in zip(e, ea)))
                        addmul(img, gb.nf_term(m), ca * sign, None, p)
                    for s, c in img.items():
                        col = toff + tindex[s]
                        w = row.get(col, 0) + c
                        if p:
                            w %= p
                        if w:
                            row[col] = w
                        else:
                            row.pop(col, None)
                rows.append(row)
        mats.append(rows)
    return tuple(dims), mats


def koszul_slice(M: Presentation, xs, n) -> KoszulSlice:
    dims, mats = koszul_differentials(M, xs, n)
    p = M.ring.field.p
    ranks = tuple(rank(mats[j - 1], dims[j - 1], p) for j in range(1, len(dims)))
    return KoszulSlice(tuple(n), dims, ranks)


def homology_lengths(M: Presentation, xs, n) -> tuple:
    return koszul_slice(M, xs, n).homology()


def euler_sum_of_pieces(M: Presentation, xs, n) -> int:
    """Σ_T (-1)^|T| dim M_{n - deg T} (the difference-route side of the Euler identity)."""
    ring = M.ring
    blocks = [element_block(ring, a) for a in xs]
    total = 0
    for j in range(len(xs) + 1):
        for T in combinations(range(len(xs)), j):
            deg = tuple(a - b for a, b in zip(n, _subset_degree(ring, blocks, T)))
            if min(deg) >= 0:
                total += (-1) ** j * graded_piece_dim(M, deg)
    return total


def validation_window(w, window: int):
    """Axis walk of length `window` in every block direction plus one diagonal step."""
    d = len(w)
    pts = []
    for i in range(d):
        for j in range(1, window + 1):
            pts.append(tuple(w[k] + (j if k == i else 0) for k in range(d)))
    if d > 1:
        pts.append(tuple(v + 1 for v in w))
    return pts


def euler_characteristic(M: Presentation, xs, window: int = 3, max_bumps: int = 4) -> EulerCharacteristic:
    """χ(x, M) from stabilized degreewise Koszul homology lengths."""
    xs = list(xs)
    ring = M.ring
    if dim_supp_pp(quotient_by_elements(M, xs)) > 0:
        raise NotMMSystem("dim Supp++(M/xM) > 0")
    blocks = [element_block(ring, a) for a in xs]
    typ = [0] * ring.d
    for b in blocks:
        typ[b] += 1
    thr = hilbert_series(M).threshold()
    w = tuple(a + b for a, b in zip(thr, typ))
    for _ in range(max_bumps + 1):
        base = koszul_slice(M, xs, w)
        lengths = base.homology()
        chi = sum((-1) ** i * a for i, a in enumerate(lengths))
        if chi != euler_sum_of_pieces(M, xs, w):
            raise InternalConsistencyError("Euler identity failed on a Koszul slice")
        pts = validation_window(w, window)
        if all(homology_lengths(M, xs, q) == lengths for q in pts):
            return EulerCharacteristic(chi, w, lengths, tuple(pts))
        w = tuple(v + 1 for v in w)
    raise StabilizationError(f"Koszul homology lengths not constant near {w}")
