import random

import sympy
from hypothesis import given, strategies as st

from mixmult.algebra import Field
from mixmult.linalg import Echelon, rank


def _rows(seed, n, m, density=0.4, lo=-4, hi=4):
    rng = random.Random(seed)
    return [{c: rng.randint(lo, hi) for c in range(m) if rng.random() < density} for _ in range(n)]


@given(st.integers(0, 10 ** 6), st.integers(1, 9), st.integers(1, 9))
def test_rational_rank_matches_sympy(seed, n, m):
    rows = _rows(seed, n, m)
    dense = sympy.Matrix([[r.get(c, 0) for c in range(m)] for r in rows])
    assert rank(rows, m, 0, backend="python") == dense.rank()
    assert rank(rows, m, 0, backend="flint") == dense.rank()


@given(st.integers(0, 10 ** 6), st.integers(1, 30), st.integers(1, 30), st.sampled_from([2, 3, 101, 32003]))
def test_modular_backends_agree(seed, n, m, p):
    rows = _rows(seed, n, m)
    assert rank(rows, m, p, backend="python") == rank(rows, m, p, backend="flint")


def test_rank_depends_on_characteristic():
    rows = [{0: 1, 1: 1}, {0: 1, 1: -1}]
    assert rank(rows, 2, 0) == 2
    assert rank(rows, 2, 2) == 1


def test_large_modular_matrix_uses_dense_path():
    rows = _rows(5, 120, 90, density=0.05)
    assert rank(rows, 90, 32003, backend="python") == rank(rows, 90, 32003, backend="flint")


@given(st.integers(0, 10 ** 6), st.sampled_from([0, 101]))
def test_echelon_coordinates_rebuild_vectors(seed, p):
    field = Field(p)
    rows = [{c: field(v) for c, v in r.items()} for r in _rows(seed, 6, 5)]
    ech = Echelon(field, key=lambda c: c)
    added = sum(ech.add(r) for r in rows)
    assert added == len(ech) == rank(rows, 5, p)
    for r in rows:
        coords = ech.coordinates(r)
        assert coords is not None
        rebuilt = {}
        for piv, a in zip(ech.order, coords):
            for c, x in ech.rows[piv].items():
                rebuilt[c] = rebuilt.get(c, 0) + a * x
        clean = lambda v: {c: (x % p if p else x) for c, x in v.items() if (x % p if p else x)}
        assert clean(rebuilt) == clean(r)
