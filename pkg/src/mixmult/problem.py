"""Line-oriented problem documents: parsing, validation and canonical emission.

    ring char=0 blocks=(2,2)
    module quotient=[x1_1*x2_1]
    task mixedmult k=(1,0)

or, for ideal families,

    ideals vars=(x,y) J=[x,y] I1=[x^2,y] N=quotient[]
    task idealmult k0=0 k=(1)

Blank lines and text after `#` are ignored.  Repeating `quotient=` on the
module line (or joining `quotient[..]+quotient[..]` for N) forms a direct sum.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .algebra import GradedRing, parse_polynomial
from .errors import MixMultError, NonHomogeneous, NotPrimary, ParseError
from .modules import Presentation, cyclic_quotient, direct_sum

GRADED_TASKS = {
    "hilbert", "dim", "mixedmult", "chi", "symbol",
    "difference-formula", "three-routes", "filter-regular-length",
    "reduction-formula", "decomposition-formula", "oracle",
}
IDEAL_TASKS = {
    "idealmult", "samuel", "oracle", "ideal-three-routes", "fc-length-route",
    "ideal-decomposition", "primary-decomposition",
}
TASK_KEYS = {"k", "k0", "a", "x", "n", "n0", "seed", "window", "retries", "points", "expect_error"}
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class Task:
    name: str
    params: tuple          # ((key, raw text), ...) in document order
    line: int = field(default=0, compare=False)

    def get(self, key, default=None):
        for k, v in self.params:
            if k == key:
                return v
        return default


@dataclass(frozen=True)
class ProblemDocument:
    kind: str                      # "graded" or "ideals"
    characteristic: int
    blocks: tuple = ()
    quotients: tuple = ()          # tuple of tuples of generator strings (one per summand)
    variables: tuple = ()
    J: tuple = ()
    I: tuple = ()                  # tuple of tuples
    tasks: tuple = ()

    # -- construction of the mathematical objects --------------------------------
    def ring(self) -> GradedRing:
        if self.kind == "graded":
            return GradedRing(self.characteristic, self.blocks)
        return GradedRing(self.characteristic, (len(self.variables),), names=self.variables)

    def module(self, ring=None) -> Presentation:
        ring = ring or self.ring()
        parts = [cyclic_quotient(ring, [ring.parse(g) for g in gens]) for gens in self.quotients]
        if not parts:
            parts = [cyclic_quotient(ring, [])]
        return parts[0] if len(parts) == 1 else direct_sum(*parts)

    def family(self):
        from .ideals import IdealFamily
        ring = self.ring()
        J = [ring.parse(g) for g in self.J]
        I = [[ring.parse(g) for g in gens] for gens in self.I]
        return IdealFamily(ring, J, I, self.module(ring))


# -- lexing ---------------------------------------------------------------------

def _split_fields(text: str, line: int):
    """Split on whitespace outside brackets; returns [(token, column)]."""
    out = []
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        start, depth = i, 0
        while i < n and (depth > 0 or not text[i].isspace()):
            c = text[i]
            if c in "([":
                depth += 1
            elif c in ")]":
                depth -= 1
                if depth < 0:
                    raise ParseError(f"unbalanced {c!r}", line, i + 1)
            i += 1
        if depth != 0:
            raise ParseError("unclosed bracket", line, start + 1)
        out.append((text[start:i], start))
    return out


def _key_value(tok: str, col: int, line: int):
    if "=" not in tok:
        raise ParseError(f"expected key=value, got {tok!r}", line, col + 1)
    k, v = tok.split("=", 1)
    if not _IDENT.match(k):
        raise ParseError(f"bad key {k!r}", line, col + 1)
    return k, v, col + len(k) + 1


def _int(v: str, line: int, col: int) -> int:
    try:
        return int(v)
    except ValueError:
        raise ParseError(f"expected an integer, got {v!r}", line, col + 1) from None


def _int_tuple(v: str, line: int, col: int) -> tuple:
    if not (v.startswith("(") and v.endswith(")")):
        raise ParseError(f"expected a tuple like (1,0), got {v!r}", line, col + 1)
    body = v[1:-1].strip()
    if not body:
        return ()
    return tuple(_int(x.strip(), line, col) for x in body.split(","))


def _split_list(v: str, line: int, col: int, open_="[", close="]"):
    """Items of '[a, b, c]' with their absolute columns."""
    if not (v.startswith(open_) and v.endswith(close)):
        raise ParseError(f"expected a list in {open_}{close}, got {v!r}", line, col + 1)
    body = v[1:-1]
    items = []
    pos = 0
    for part in body.split(","):
        stripped = part.strip()
        lead = len(part) - len(part.lstrip())
        if stripped:
            items.append((stripped, col + 1 + pos + lead))
        pos += len(part) + 1
    return items


def _name_tuple(v: str, line: int, col: int) -> tuple:
    names = tuple(s for s, _ in _split_list(v, line, col, "(", ")"))
    for s in names:
        if not _IDENT.match(s):
            raise ParseError(f"bad variable name {s!r}", line, col + 1)
    return names


def _check_polys(ring, items, line, what):
    out = []
    for text, col in items:
        f = parse_polynomial(ring, text, line, col)
        if not f.is_zero() and not f.is_homogeneous():
            raise ParseError(f"{what} generator {text!r} is not homogeneous", line, col + 1)
        out.append(str(f) if not f.is_zero() else "0")
    return tuple(out)


# -- parsing --------------------------------------------------------------------

def parse_problem(text: str) -> ProblemDocument:
    ring_line = module_line = ideals_line = None
    tasks = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        fields = _split_fields(body, ln)
        head, hcol = fields[0]
        if head == "ring":
            if ring_line is not None:
                raise ParseError("duplicate ring line", ln, hcol + 1)
            ring_line = (ln, fields[1:])
        elif head == "module":
            if module_line is not None:
                raise ParseError("duplicate module line", ln, hcol + 1)
            module_line = (ln, fields[1:])
        elif head == "ideals":
            if ideals_line is not None:
                raise ParseError("duplicate ideals line", ln, hcol + 1)
            ideals_line = (ln, fields[1:])
        elif head == "task":
            tasks.append((ln, fields[1:], hcol))
        else:
            raise ParseError(f"unknown line kind {head!r}", ln, hcol + 1)

    if ideals_line is not None and (ring_line is not None or module_line is not None):
        raise ParseError("a document has either ring/module lines or an ideals line", ideals_line[0], 1)
    if ideals_line is not None:
        doc = _parse_ideals(*ideals_line)
        allowed = IDEAL_TASKS
    else:
        if ring_line is None:
            raise ParseError("missing ring line", 1, 1)
        if module_line is None:
            raise ParseError("missing module line", ring_line[0], 1)
        doc = _parse_graded(ring_line, module_line)
        allowed = GRADED_TASKS
    parsed = []
    for ln, fields, hcol in tasks:
        if not fields:
            raise ParseError("task needs a name", ln, hcol + 1)
        name, ncol = fields[0]
        if name not in allowed:
            raise ParseError(f"unknown task {name!r} for a {doc.kind} document", ln, ncol + 1)
        params = []
        seen = set()
        for tok, col in fields[1:]:
            k, v, vcol = _key_value(tok, col, ln)
            if k not in TASK_KEYS:
                raise ParseError(f"unknown task parameter {k!r}", ln, col + 1)
            if k in seen:
                raise ParseError(f"repeated task parameter {k!r}", ln, col + 1)
            seen.add(k)
            params.append((k, _normalize_param(doc, k, v, ln, vcol)))
        parsed.append(Task(name, tuple(params), ln))
    return ProblemDocument(**{**doc.__dict__, "tasks": tuple(parsed)})


def _normalize_param(doc, k, v, ln, col):
    if k in ("k", "n"):
        return "(" + ",".join(str(x) for x in _int_tuple(v, ln, col)) + ")"
    if k in ("k0", "n0", "seed", "window", "retries", "points"):
        return str(_int(v, ln, col))
    if k in ("a", "x"):
        ring = doc.ring()
        if k == "a":
            return _check_polys(ring, [(v, col)], ln, "element")[0]
        return "[" + ",".join(_check_polys(ring, _split_list(v, ln, col), ln, "sequence")) + "]"
    if k == "expect_error":
        if not _IDENT.match(v):
            raise ParseError(f"bad error code {v!r}", ln, col + 1)
        return v
    return v


def _parse_graded(ring_line, module_line) -> ProblemDocument:
    ln, fields = ring_line
    char = blocks = None
    for tok, col in fields:
        k, v, vcol = _key_value(tok, col, ln)
        if k == "char":
            char = _int(v, ln, vcol)
        elif k == "blocks":
            blocks = _int_tuple(v, ln, vcol)
        else:
            raise ParseError(f"unknown ring field {k!r}", ln, col + 1)
    if char is None or blocks is None:
        raise ParseError("ring line needs char= and blocks=", ln, 1)
    if not blocks or min(blocks) < 1:
        raise ParseError("block sizes must be positive", ln, 1)
    _check_char(char, ln)
    ring = GradedRing(char, blocks)
    mln, mfields = module_line
    quotients = []
    for tok, col in mfields:
        k, v, vcol = _key_value(tok, col, mln)
        if k != "quotient":
            raise ParseError(f"unknown module field {k!r}", mln, col + 1)
        quotients.append(_check_polys(ring, _split_list(v, mln, vcol), mln, "relation"))
    if not quotients:
        raise ParseError("module line needs quotient=[...]", mln, 1)
    return ProblemDocument("graded", char, tuple(blocks), tuple(quotients))


def _check_char(char, ln):
    if char < 0 or (char and (char < 2 or any(char % q == 0 for q in range(2, int(char ** 0.5) + 1)))):
        raise ParseError(f"characteristic {char} is not 0 or a prime", ln, 1)


def _parse_ideals(ln, fields) -> ProblemDocument:
    char = 0
    names = None
    raw = {}
    for tok, col in fields:
        k, v, vcol = _key_value(tok, col, ln)
        if k == "char":
            char = _int(v, ln, vcol)
        elif k == "vars":
            names = _name_tuple(v, ln, vcol)
        elif k == "J" or k == "N" or re.fullmatch(r"I[1-9][0-9]*", k):
            raw[k] = (v, vcol)
        else:
            raise ParseError(f"unknown ideals field {k!r}", ln, col + 1)
    if not names:
        raise ParseError("ideals line needs vars=(...)", ln, 1)
    if "J" not in raw:
        raise ParseError("ideals line needs J=[...]", ln, 1)
    _check_char(char, ln)
    ring = GradedRing(char, (len(names),), names=names)
    J = _check_polys(ring, _split_list(raw["J"][0], ln, raw["J"][1]), ln, "J")
    idx = sorted(int(k[1:]) for k in raw if k.startswith("I"))
    if idx != list(range(1, len(idx) + 1)):
        raise ParseError("ideals must be numbered I1, I2, ... without gaps", ln, 1)
    I = tuple(_check_polys(ring, _split_list(raw[f"I{i}"][0], ln, raw[f"I{i}"][1]), ln, f"I{i}") for i in idx)
    quotients = []
    if "N" in raw:
        v, vcol = raw["N"]
        pos = 0
        for part in v.split("+quotient"):
            text = part if pos == 0 else "quotient" + part
            if not text.startswith("quotient"):
                raise ParseError("N must be quotient[...] or a sum of them", ln, vcol + pos + 1)
            quotients.append(_check_polys(ring, _split_list(text[len("quotient"):], ln, vcol + pos + 8), ln, "relation"))
            pos += len(text) + (1 if pos else 0)
    else:
        quotients.append(())
    doc = ProblemDocument("ideals", char, (), tuple(quotients), names, J, I)
    try:
        doc.family()
    except NotPrimary as exc:
        raise ParseError(exc.message, ln, raw["J"][1] + 1) from None
    except NonHomogeneous as exc:
        raise ParseError(exc.message, ln, 1) from None
    return doc


# -- emission -------------------------------------------------------------------

def emit_problem(doc: ProblemDocument) -> str:
    """Canonical text; parse_problem(emit_problem(d)) == d."""
    lines = []
    if doc.kind == "graded":
        lines.append(f"ring char={doc.characteristic} blocks=({','.join(map(str, doc.blocks))})")
        lines.append("module " + " ".join(f"quotient=[{', '.join(q)}]" for q in doc.quotients))
    else:
        parts = [f"ideals char={doc.characteristic}", f"vars=({','.join(doc.variables)})",
                 f"J=[{', '.join(doc.J)}]".replace(" ", "")]
        for i, gens in enumerate(doc.I, start=1):
            parts.append(f"I{i}=[{','.join(g.replace(' ', '') for g in gens)}]")
        parts.append("N=" + "+".join(f"quotient[{','.join(g.replace(' ', '') for g in q)}]" for q in doc.quotients))
        lines.append(" ".join(parts))
    for t in doc.tasks:
        params = " ".join(f"{k}={v.replace(' ', '')}" for k, v in t.params)
        lines.append(f"task {t.name}" + (f" {params}" if params else ""))
    return "\n".join(lines) + "\n"
