"""Exact coefficients, multigraded polynomial rings and polynomials.

Coefficients over Q are gmpy2 ``mpq`` values (always in lowest terms);
over F_p they are Python ints in ``[0, p)``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb

import gmpy2
from gmpy2 import mpq

from .errors import NonHomogeneous, ParseError, RingMismatch

_MPQ = type(mpq(0))


class Field:
    """Q (characteristic 0) or the prime field F_p."""

    __slots__ = ("p",)

    def __init__(self, characteristic: int = 0):
        p = int(characteristic)
        if p < 0 or p == 1 or (p and not gmpy2.is_prime(p)):
            raise ValueError(f"characteristic must be 0 or a prime, got {characteristic}")
        self.p = p

    def __call__(self, x):
        p = self.p
        if p:
            if isinstance(x, (Fraction, _MPQ)):
                return int(x.numerator) * pow(int(x.denominator), -1, p) % p
            return int(x) % p
        if isinstance(x, Fraction):
            return mpq(x.numerator, x.denominator)
        return mpq(x)

    def inv(self, a):
        if self.p:
            return pow(int(a), -1, self.p)
        return mpq(1) / a

    def to_python(self, a):
        """Int for integral values, Fraction otherwise (JSON friendly)."""
        if self.p:
            return int(a)
        if a.denominator == 1:
            return int(a.numerator)
        return Fraction(int(a.numerator), int(a.denominator))

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "QQ" if not self.p else f"GF({self.p})"


def compositions(total: int, parts: int):
    """All tuples of `parts` non-negative ints summing to `total` (lex descending)."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


class GradedRing:
    """k[x_{i,j}] with deg x_{i,j} = e_i, blocks of sizes m_1..m_d."""

    def __init__(self, characteristic: int = 0, blocks=(1,), names=None):
        blocks = tuple(int(b) for b in blocks)
        if not blocks or any(b < 1 for b in blocks):
            raise ValueError(f"block sizes must be positive, got {blocks}")
        self.field = Field(characteristic)
        self.characteristic = self.field.p
        self.blocks = blocks
        self.d = len(blocks)
        self.nvars = sum(blocks)
        self.var_block = tuple(i for i, m in enumerate(blocks) for _ in range(m))
        starts, s = [], 0
        for m in blocks:
            starts.append(s)
            s += m
        self.block_start = tuple(starts)
        if names is None:
            names = [f"x{i + 1}_{j + 1}" for i, m in enumerate(blocks) for j in range(m)]
        names = tuple(names)
        if len(names) != self.nvars or len(set(names)) != self.nvars:
            raise ValueError("variable names must be distinct, one per variable")
        self.names = names
        self._index = {n: k for k, n in enumerate(names)}
        self.zero_exp = (0,) * self.nvars

    # -- identity -----------------------------------------------------
    def _ident(self):
        return (self.characteristic, self.blocks, self.names)

    def __eq__(self, other):
        return isinstance(other, GradedRing) and self._ident() == other._ident()

    def __hash__(self):
        return hash(self._ident())

    def __repr__(self):
        return f"GradedRing(char={self.characteristic}, blocks={self.blocks})"

    # -- degrees ------------------------------------------------------
    def mdeg(self, exp) -> tuple:
        out = [0] * self.d
        for e, b in zip(exp, self.var_block):
            out[b] += e
        return tuple(out)

    def unit_degree(self, i: int) -> tuple:
        return tuple(1 if j == i else 0 for j in range(self.d))

    # -- constructors ---------------------------------------------------
    def poly(self, terms) -> "Polynomial":
        return Polynomial(self, terms)

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return Polynomial(self, {self.zero_exp: 1})

    def var(self, i: int, j: int) -> "Polynomial":
        """Variable x_{i,j} with 0-based block i and 0-based index j."""
        k = self.block_start[i] + j
        e = [0] * self.nvars
        e[k] = 1
        return Polynomial(self, {tuple(e): 1})

    def gens(self):
        out = []
        for k in range(self.nvars):
            e = [0] * self.nvars
            e[k] = 1
            out.append(Polynomial(self, {tuple(e): 1}))
        return out

    def block_vars(self, i: int):
        return [self.var(i, j) for j in range(self.blocks[i])]

    def parse(self, text: str) -> "Polynomial":
        return parse_polynomial(self, text)


def grevlex_key(exp):
    """Sort key: larger key means larger monomial."""
    return (sum(exp), tuple(-e for e in reversed(exp)))


class Polynomial:
    """Immutable polynomial; `terms` maps exponent tuples to nonzero coefficients."""

    __slots__ = ("ring", "terms", "_sorted", "_hash")

    def __init__(self, ring: GradedRing, terms):
        F = ring.field
        clean = {}
        for e, c in dict(terms).items():
            e = tuple(int(v) for v in e)
            if len(e) != ring.nvars or min(e, default=0) < 0:
                raise ValueError(f"bad exponent {e}")
            c = F(c)
            if c:
                clean[e] = clean.get(e, 0) + c
        if F.p:
            clean = {e: c % F.p for e, c in clean.items()}
        self.ring = ring
        self.terms = {e: c for e, c in clean.items() if c}
        self._sorted = None
        self._hash = None

    @classmethod
    def _raw(cls, ring, terms):
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.terms = terms
        obj._sorted = None
        obj._hash = None
        return obj

    # -- structure ------------------------------------------------------
    def sorted_terms(self):
        """Terms in strictly decreasing grevlex order."""
        if self._sorted is None:
            self._sorted = tuple(sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True))
        return self._sorted

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def leading_term(self):
        return self.sorted_terms()[0] if self.terms else None

    def degrees(self) -> set:
        return {self.ring.mdeg(e) for e in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def multidegree(self):
        """Multidegree of a nonzero homogeneous polynomial."""
        degs = self.degrees()
        if len(degs) != 1:
            raise NonHomogeneous(f"{self} is not homogeneous (or is zero)")
        return next(iter(degs))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def homogeneous_component(self, n) -> "Polynomial":
        n = tuple(n)
        mdeg = self.ring.mdeg
        return Polynomial._raw(self.ring, {e: c for e, c in self.terms.items() if mdeg(e) == n})

    # -- arithmetic -------------------------------------------------------
    def _check(self, other):
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other
        return Polynomial(self.ring, {self.ring.zero_exp: other}) if other else self.ring.zero()

    def __add__(self, other):
        other = self._check(other)
        p = self.ring.field.p
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if p:
                v %= p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.field.p
        return Polynomial._raw(self.ring, {e: (-c % p if p else -c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def scale(self, c) -> "Polynomial":
        F = self.ring.field
        c = F(c)
        if not c:
            return self.ring.zero()
        p = F.p
        return Polynomial._raw(self.ring, {e: (v * c % p if p else v * c) for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        other = self._check(other)
        p = self.ring.field.p
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if p:
                    v %= p
                out[e] = v
        return Polynomial._raw(self.ring, {e: c for e, c in out.items() if c})

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __str__(self):
        if not self.terms:
            return "0"
        F = self.ring.field
        parts = []
        for e, c in self.sorted_terms():
            c = F.to_python(c)
            if F.p and c > F.p // 2:
                c -= F.p
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(self.ring.names, e) if k
            )
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            parts.append(("-" if neg else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"Polynomial({self})"


def poly_arith(op: str, f: Polynomial, g) -> Polynomial:
    """Dispatch helper: op in {"add", "mul", "scale"}."""
    if op == "add":
        return f + g
    if op == "mul":
        if not isinstance(g, Polynomial):
            raise TypeError("mul expects a polynomial; use scale for scalars")
        return f * g
    if op == "scale":
        return f.scale(g)
    raise ValueError(f"unknown op {op!r}")


def homogeneous_component(f: Polynomial, n) -> Polynomial:
    return f.homogeneous_component(n)


@lru_cache(maxsize=None)
def _monomials_cached(blocks, n):
    per_block = [list(compositions(ni, m)) for ni, m in zip(n, blocks)]
    return tuple(sum(parts, ()) for parts in product(*per_block))


def enumerate_monomials(ring: GradedRing, n) -> list:
    """Exponent tuples of all monomials of multidegree n."""
    n = tuple(int(v) for v in n)
    if len(n) != ring.d:
        raise ValueError("degree length must equal the number of blocks")
    if min(n) < 0:
        return []
    return list(_monomials_cached(ring.blocks, n))


def count_monomials(blocks, n) -> int:
    out = 1
    for ni, m in zip(n, blocks):
        if ni < 0:
            return 0
        out *= comb(ni + m - 1, m - 1)
    return out


# -- polynomial text parser ---------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\^)|(\*)|(\+)|(-)|(\S))")


def parse_polynomial(ring: GradedRing, text: str, line: int = 0, col0: int = 0) -> Polynomial:
    """Parse `c*x1_1^2*x2_1 - x1_2 + ...` with integer coefficients."""
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        col = m.start() + len(m.group(0)) - len(m.group(0).lstrip())
        kind = m.lastindex
        toks.append((kind, m.group(kind), col))
        pos = m.end()
    i = 0
    F = ring.field
    terms = {}

    def err(msg, col):
        raise ParseError(msg, line, col0 + col + 1)

    def peek():
        return toks[i] if i < len(toks) else (None, None, len(text))

    if not toks:
        err("empty polynomial", 0)
    sign = 1
    expect_term = True
    while i < len(toks):
        kind, val, col = peek()
        if expect_term:
            if kind in (5, 6):
                sign = sign * (-1 if kind == 6 else 1)
                i += 1
                continue
            coeff = 1
            exp = [0] * ring.nvars
            factor_seen = False
            while True:
                kind, val, col = peek()
                if kind == 1:
                    coeff *= int(val)
                    i += 1
                elif kind == 2:
                    if val not in ring._index:
                        err(f"unknown variable {val!r}", col)
                    k = ring._index[val]
                    i += 1
                    power = 1
                    if peek()[0] == 3:
                        i += 1
                        pk, pv, pc = peek()
                        if pk != 1:
                            err("malformed exponent: expected a non-negative integer after '^'", pc)
                        power = int(pv)
                        i += 1
                    exp[k] += power
                else:
                    err("expected a coefficient or variable", col)
                factor_seen = True
                if peek()[0] == 4:
                    i += 1
                    continue
                break
            if not factor_seen:
                err("empty term", col)
            e = tuple(exp)
            terms[e] = terms.get(e, 0) + sign * coeff
            sign = 1
            expect_term = False
        else:
            if kind in (5, 6):
                sign = -1 if kind == 6 else 1
                i += 1
                expect_term = True
                continue
            err(f"unexpected token {val!r}", col)
    if expect_term:
        err("dangling operator", len(text))
    return Polynomial(ring, {e: F(c) for e, c in terms.items()})
