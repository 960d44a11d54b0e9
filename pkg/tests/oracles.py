"""Independent reference computations and hypothesis strategies for the tests.

None of these touch Gröbner bases: graded pieces are spanned directly by
monomial multiples of the relations and ranked with plain elimination.
"""

from __future__ import annotations

import random
from itertools import combinations, product

from hypothesis import strategies as st

from mixmult.algebra import GradedRing, Polynomial, enumerate_monomials
from mixmult.linalg import rank
from mixmult.modules import Presentation, cyclic_quotient, direct_sum

SMALL_PRIME = 101


def span_piece_dim(M: Presentation, n) -> int:
    """dim M_n = dim F_n - dim U_n, with U_n spanned by monomial multiples of relations."""
    ring = M.ring
    n = tuple(n)
    cols = {}
    for pos, sh in enumerate(M.shifts):
        m = tuple(a - b for a, b in zip(n, sh))
        for e in enumerate_monomials(ring, m) if min(m) >= 0 else []:
            cols[(pos, e)] = len(cols)
    rows = []
    for r in M.relations:
        (pos0, e0), = [next(iter(r))]
        deg = tuple(a + b for a, b in zip(ring.mdeg(e0), M.shifts[pos0]))
        mult = tuple(a - b for a, b in zip(n, deg))
        if min(mult) < 0:
            continue
        for u in enumerate_monomials(ring, mult):
            row = {}
            for (pos, e), c in r.items():
                t = (pos, tuple(a + b for a, b in zip(e, u)))
                row[cols[t]] = c
            rows.append(row)
    return len(cols) - rank(rows, len(cols), ring.field.p, backend="python")


def euler_piece_sum(M, blocks, n) -> int:
    """Σ_T (-1)^|T| dim M_{n - deg T} from span counts."""
    total = 0
    r = len(blocks)
    for j in range(r + 1):
        for T in combinations(range(r), j):
            deg = list(n)
            for t in T:
                deg[blocks[t]] -= 1
            if min(deg) >= 0:
                total += (-1) ** j * span_piece_dim(M, deg)
    return total


def random_homogeneous(rng: random.Random, ring: GradedRing, deg, terms: int = 2) -> Polynomial:
    monos = enumerate_monomials(ring, deg)
    picked = rng.sample(monos, min(len(monos), terms))
    p = ring.field.p or 7
    return Polynomial(ring, {e: rng.randrange(1, p) for e in picked})


def random_linear_form(rng: random.Random, ring: GradedRing, block: int) -> Polynomial:
    p = ring.field.p or 50
    return sum((ring.var(block, j).scale(ring.field(rng.randrange(1, p))) for j in range(ring.blocks[block])),
               ring.zero())


@st.composite
def small_rings(draw, char=SMALL_PRIME, max_blocks=2, max_block=2):
    d = draw(st.integers(1, max_blocks))
    blocks = tuple(draw(st.integers(1, max_block)) for _ in range(d))
    return GradedRing(char, blocks)


@st.composite
def small_modules(draw, char=SMALL_PRIME, max_blocks=2, max_block=2, max_rels=3, max_deg=3, summands=False):
    """Cyclic quotients (or sums of two) of a small multigraded ring."""
    ring = draw(small_rings(char, max_blocks, max_block))
    seed = draw(st.integers(0, 10 ** 6))
    rng = random.Random(seed)

    def quotient():
        gens = []
        for _ in range(draw(st.integers(0, max_rels))):
            deg = [0] * ring.d
            for _ in range(rng.randint(1, max_deg)):
                deg[rng.randrange(ring.d)] += 1
            gens.append(random_homogeneous(rng, ring, deg, rng.randint(1, 3)))
        return cyclic_quotient(ring, gens)

    M = quotient()
    if summands and draw(st.booleans()):
        M = direct_sum(M, quotient())
    return M


def degrees_up_to(d: int, top: int):
    return list(product(range(top + 1), repeat=d))
