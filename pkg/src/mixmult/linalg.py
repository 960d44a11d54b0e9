"""Exact rank and echelon computations over Q and F_p.

Rows are sparse dicts ``{column: value}``.  Over Q, rows are scaled to
primitive integer vectors and eliminated fraction-free (cross multiplication
followed by content removal).  Over F_p, dense numpy elimination in int64 is
used when p < 2^31 so products stay below 2^62.
"""

from __future__ import annotations

from math import gcd

import numpy as np
from gmpy2 import mpz

try:
    import flint
except ImportError:  # pure-Python elimination still works, only slower
    flint = None

FLINT_MIN_ENTRIES = 2_500


def _primitive(row: dict) -> dict:
    """Scale a rational row to a primitive integer row (same span)."""
    den = 1
    for v in row.values():
        d = int(v.denominator) if hasattr(v, "denominator") else 1
        den = den * d // gcd(den, d)
    ints = {c: mpz(v * den) for c, v in row.items() if v}
    g = 0
    for v in ints.values():
        g = gcd(g, int(v))
        if g == 1:
            break
    if g > 1:
        ints = {c: v // g for c, v in ints.items()}
    return ints


def _rank_integer(rows) -> int:
    pivots = {}
    for r in rows:
        r = _primitive(r)
        while r:
            c = min(r)
            pr = pivots.get(c)
            if pr is None:
                pivots[c] = r
                break
            a, b = pr[c], r[c]
            g = gcd(int(a), int(b))
            a //= g
            b //= g
            new = {k: a * v for k, v in r.items()}
            for k, v in pr.items():
                w = new.get(k, 0) - b * v
                if w:
                    new[k] = w
                else:
                    new.pop(k, None)
            cont = 0
            for v in new.values():
                cont = gcd(cont, int(v))
                if cont == 1:
                    break
            if cont > 1:
                new = {k: v // cont for k, v in new.items()}
            r = new
    return len(pivots)


def _rank_modp_dense(rows, ncols: int, p: int) -> int:
    nrows = len(rows)
    if nrows == 0 or ncols == 0:
        return 0
    A = np.zeros((nrows, ncols), dtype=np.int64)
    for i, r in enumerate(rows):
        for c, v in r.items():
            A[i, c] = int(v) % p
    rank = 0
    for c in range(ncols):
        if rank == nrows:
            break
        col = A[rank:, c]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            A[[rank, piv]] = A[[piv, rank]]
        inv = pow(int(A[rank, c]), -1, p)
        A[rank, c:] = (A[rank, c:] * inv) % p
        below = rank + 1 + np.flatnonzero(A[rank + 1:, c])
        if below.size:
            f = A[below, c].reshape(-1, 1)
            A[below, c:] = (A[below, c:] - f * A[rank, c:]) % p
        rank += 1
    return rank


def _rank_modp_sparse(rows, p: int) -> int:
    pivots = {}
    for r in rows:
        r = {c: int(v) % p for c, v in r.items() if int(v) % p}
        while r:
            c = min(r)
            pr = pivots.get(c)
            if pr is None:
                inv = pow(r[c], -1, p)
                pivots[c] = {k: v * inv % p for k, v in r.items()}
                break
            f = r[c]
            for k, v in pr.items():
                w = (r.get(k, 0) - f * v) % p
                if w:
                    r[k] = w
                else:
                    r.pop(k, None)
    return len(pivots)


def _rank_flint(rows, ncols: int, p: int) -> int:
    if p:
        M = flint.nmod_mat(len(rows), ncols, p)
        for i, r in enumerate(rows):
            for c, v in r.items():
                M[i, c] = int(v) % p
        return M.rank()
    M = flint.fmpz_mat(len(rows), ncols)
    for i, r in enumerate(_primitive(r) for r in rows):
        for c, v in r.items():
            M[i, c] = int(v)
    return M.rank()


def rank(rows, ncols: int, p: int, backend: str = "auto") -> int:
    """Rank of sparse rows; backend "auto", "flint" or "python"."""
    rows = [r for r in rows if r]
    if not rows:
        return 0
    use_flint = backend == "flint" or (
        backend == "auto" and flint is not None and len(rows) * ncols >= FLINT_MIN_ENTRIES)
    if use_flint:
        return _rank_flint(rows, ncols, p)
    if p:
        if p < 2 ** 31 and len(rows) * ncols <= 4_000_000:
            return _rank_modp_dense(rows, ncols, p)
        return _rank_modp_sparse(rows, p)
    return _rank_integer(rows)


class Echelon:
    """Reduced row echelon basis of a growing subspace; columns are arbitrary
    hashable labels ordered by `key` (pivot = largest column)."""

    def __init__(self, field, key):
        self.field = field
        self.p = field.p
        self.key = key
        self.rows = {}   # pivot column -> row with pivot coefficient 1
        self.order = []  # pivots in insertion order

    def reduce(self, v: dict) -> dict:
        p = self.p
        v = {c: x for c, x in v.items() if x}
        for piv, row in self.rows.items():
            f = v.get(piv)
            if f:
                for c, x in row.items():
                    w = v.get(c, 0) - f * x
                    if p:
                        w %= p
                    if w:
                        v[c] = w
                    else:
                        v.pop(c, None)
        return v

    def add(self, v: dict) -> bool:
        r = self.reduce(v)
        if not r:
            return False
        p = self.p
        piv = max(r, key=self.key)
        inv = self.field.inv(r[piv])
        r = {c: (x * inv % p if p else x * inv) for c, x in r.items()}
        for q, row in self.rows.items():
            f = row.get(piv)
            if f:
                for c, x in r.items():
                    w = row.get(c, 0) - f * x
                    if p:
                        w %= p
                    if w:
                        row[c] = w
                    else:
                        row.pop(c, None)
        self.rows[piv] = r
        self.order.append(piv)
        return True

    def coordinates(self, v: dict):
        """Coefficients of v on the basis (indexed like `order`); None if v is
        not in the span."""
        if self.reduce(v):
            return None
        return [v.get(piv, 0) for piv in self.order]

    def __len__(self):
        return len(self.rows)
