"""Randomized graded modules and hand-picked ideal families for the verification corpus."""

from __future__ import annotations

import random
from itertools import product
from pathlib import Path

from .algebra import GradedRing, Polynomial, enumerate_monomials
from .problem import ProblemDocument, Task, emit_problem

CORPUS_PRIME = 32003


def _weighted(rng, choices, weights):
    return rng.choices(choices, weights=weights, k=1)[0]


def random_relation(rng: random.Random, ring: GradedRing, max_total: int = 4) -> Polynomial:
    """A homogeneous polynomial with one to three terms, biased toward low degree."""
    d = ring.d
    while True:
        total = _weighted(rng, [1, 2, 3, 4][:max_total], [3, 4, 2, 1][:max_total])
        deg = [0] * d
        for _ in range(total):
            deg[rng.randrange(d)] += 1
        monos = enumerate_monomials(ring, tuple(deg))
        if monos:
            break
    picked = rng.sample(monos, min(len(monos), _weighted(rng, [1, 2, 3], [4, 3, 1])))
    p = ring.field.p
    return Polynomial(ring, {e: rng.randrange(1, p) if p else rng.randint(1, 5) for e in picked})


def random_graded_document(seed: int, char: int = CORPUS_PRIME, tasks=()) -> ProblemDocument:
    """d <= 3 blocks of at most 3 variables, <= 6 variables in all,
    <= 4 relations of total degree <= 4.  Small sizes are the likely ones."""
    rng = random.Random(seed)
    d = _weighted(rng, [1, 2, 3], [2, 5, 3])
    blocks = [1] * d
    for _ in range(_weighted(rng, [0, 1, 2, 3], [1, 3, 3, 2])):
        room = [i for i in range(d) if blocks[i] < 3]
        if room and sum(blocks) < 6:
            blocks[rng.choice(room)] += 1
    ring = GradedRing(char, tuple(blocks))
    nrel = _weighted(rng, [0, 1, 2, 3, 4], [2, 5, 3, 1, 1])
    rels = [random_relation(rng, ring) for _ in range(nrel)]
    quotients = (tuple(str(f) for f in rels),)
    if rng.random() < 0.15:
        quotients += ((str(random_relation(rng, ring)),),)
    return ProblemDocument("graded", char, tuple(blocks), quotients, tasks=tuple(tasks))


def types_between(d: int, lo: int, hi: int):
    """All k in N^d with lo <= |k| <= hi."""
    return [k for k in product(range(hi + 1), repeat=d) if lo <= sum(k) <= hi]


def _ideal(vars_, J, I, N=((),), tasks=()):
    return ProblemDocument("ideals", 0, (), tuple(tuple(q) for q in N), tuple(vars_), tuple(J),
                           tuple(tuple(g) for g in I), tuple(tasks))


def _t(name, **params):
    return Task(name, tuple((k, v) for k, v in params.items()))


def ideal_instances():
    """(name, document) pairs; every J is primary to the maximal ideal."""
    xy, xyz = ("x", "y"), ("x", "y", "z")
    m2, m3 = ("x", "y"), ("x", "y", "z")
    routes = lambda k0, k: [_t("idealmult", k0=str(k0), k=k), _t("ideal-three-routes", k0=str(k0), k=k),
                            _t("fc-length-route", k0=str(k0), k=k)]
    out = [
        ("m_m_10", _ideal(xy, m2, [m2], tasks=routes(1, "(0)") + routes(0, "(1)")
                          + [_t("samuel"), _t("oracle"), _t("primary-decomposition", k0="0", k="(1)"),
                             _t("ideal-decomposition", k0="1", k="(0)")])),
        ("m_x_principal", _ideal(xy, m2, [("x",)], tasks=[
            _t("idealmult", k0="0", k="(1)"), _t("idealmult", k0="1", k="(0)"), _t("oracle"),
            _t("ideal-three-routes", k0="1", k="(0)"), _t("fc-length-route", k0="0", k="(1)"),
            _t("ideal-decomposition", k0="0", k="(1)", expect_error="HypothesisFailed"),
            _t("ideal-decomposition", k0="1", k="(0)")])),
        ("m_x2y", _ideal(xy, m2, [("x^2", "y")], tasks=routes(0, "(1)") + routes(1, "(0)") + [
            _t("oracle"), _t("primary-decomposition", k0="0", k="(1)"),
            _t("ideal-decomposition", k0="0", k="(1)")])),
        ("x2y_m", _ideal(xy, ("x^2", "y"), [m2], tasks=routes(0, "(1)") + routes(1, "(0)") + [
            _t("samuel"), _t("oracle"), _t("primary-decomposition", k0="1", k="(0)")])),
        ("x2y_alone", _ideal(xy, ("x^2", "y"), [], tasks=[_t("samuel"), _t("idealmult", k0="1", k="()"),
                                                             _t("oracle")])),
        ("m_x2_xy_y3", _ideal(xy, m2, [("x^2", "x*y", "y^3")], tasks=routes(0, "(1)") + routes(1, "(0)") + [
            _t("oracle"), _t("primary-decomposition", k0="0", k="(1)")])),
        ("x2_y2_xy", _ideal(xy, ("x^2", "y^2"), [("x*y",)], tasks=routes(0, "(1)") + [_t("oracle")])),
        ("m_on_quotient_x", _ideal(xy, m2, [m2], N=[("x",)], tasks=routes(0, "(0)") + [
            _t("samuel"), _t("oracle")])),
        ("m_x_on_quotient_x", _ideal(xy, m2, [("x",)], N=[("x",)], tasks=[
            _t("idealmult", k0="0", k="(0)"), _t("fc-length-route", k0="0", k="(0)"), _t("oracle")])),
        ("m_x_on_quotient_y", _ideal(xy, m2, [("x",)], N=[("y",)], tasks=routes(0, "(0)") + [
            _t("samuel"), _t("oracle")])),
        ("m_y_torsion_sum", _ideal(xy, m2, [("y",)], N=[(), ("x^3",)], tasks=routes(1, "(0)") + [
            _t("samuel"), _t("oracle"), _t("ideal-decomposition", k0="1", k="(0)")])),
        ("m_m_m_d2", _ideal(xy, m2, [m2, m2], tasks=routes(1, "(0,0)") + routes(0, "(1,0)") + [
            _t("oracle", points="2")])),
        ("m_x_y_d2", _ideal(xy, m2, [("x",), ("y",)], tasks=[
            _t("idealmult", k0="0", k="(1,0)"), _t("idealmult", k0="0", k="(0,1)"),
            _t("idealmult", k0="1", k="(0,0)"), _t("oracle", points="2")])),
        ("m3_m3", _ideal(xyz, m3, [m3], tasks=routes(2, "(0)") + routes(1, "(1)") + [
            _t("primary-decomposition", k0="1", k="(1)")])),
        ("m3_x", _ideal(xyz, m3, [("x",)], tasks=[
            _t("idealmult", k0="1", k="(1)"), _t("idealmult", k0="2", k="(0)"), _t("oracle", points="2"),
            _t("ideal-three-routes", k0="1", k="(1)")])),
        ("m3_xy", _ideal(xyz, m3, [("x", "y")], tasks=routes(1, "(1)") + [_t("oracle", points="2")])),
        ("m3_xz_yz", _ideal(xyz, m3, [m3], N=[("x*z", "y*z")], tasks=[
            _t("idealmult", k0="1", k="(0)"), _t("samuel"), _t("oracle", points="2"),
            _t("ideal-decomposition", k0="1", k="(0)", x="[x]")])),
        ("m3_x2_y_z", _ideal(xyz, m3, [("x^2", "y", "z")], tasks=[
            _t("idealmult", k0="2", k="(0)"), _t("idealmult", k0="1", k="(1)"),
            _t("idealmult", k0="0", k="(2)"), _t("oracle", points="2")])),
        ("m3_on_xy_plane", _ideal(xyz, m3, [("x", "y")], N=[("z",)], tasks=routes(0, "(1)") + [
            _t("samuel"), _t("oracle", points="2")])),
        ("m_linear_form", _ideal(xy, m2, [("x+y",)], tasks=[
            _t("idealmult", k0="0", k="(1)"), _t("ideal-three-routes", k0="0", k="(1)"),
            _t("fc-length-route", k0="0", k="(1)")])),
        ("m_on_cusp", _ideal(xy, m2, [("x^2", "y^2")], N=[("x^3-y^3",)], tasks=[
            _t("idealmult", k0="1", k="(0)"), _t("idealmult", k0="0", k="(0)"), _t("samuel"),
            _t("ideal-three-routes", k0="0", k="(0)")])),
        ("m_on_line_pair", _ideal(xy, m2, [("x",)], N=[("x*y",)], tasks=routes(0, "(0)") + [
            _t("samuel"), _t("oracle")])),
    ]
    return out


def write_corpus(root, graded_count: int = 50) -> list:
    """Write graded and ideal .prob files under root; returns the paths."""
    root = Path(root)
    (root / "graded").mkdir(parents=True, exist_ok=True)
    (root / "ideals").mkdir(parents=True, exist_ok=True)
    paths = []
    for seed in range(graded_count):
        doc = random_graded_document(seed)
        doc = ProblemDocument(**{**doc.__dict__, "tasks": _graded_tasks(doc)})
        path = root / "graded" / f"module_{seed:03d}.prob"
        path.write_text(f"# random module, seed {seed}\n" + emit_problem(doc), encoding="utf-8")
        paths.append(path)
    for name, doc in ideal_instances():
        path = root / "ideals" / f"{name}.prob"
        path.write_text(emit_problem(doc), encoding="utf-8")
        paths.append(path)
    return paths


def _graded_tasks(doc: ProblemDocument):
    from .hilbert import dim_supp_pp
    M = doc.module()
    s = dim_supp_pp(M)
    s = 0 if s == float("-inf") else int(s)
    d = doc.ring().d
    fmt = lambda k: "(" + ",".join(map(str, k)) + ")"
    k = fmt(types_between(d, s, s)[-1])
    k_up = fmt(types_between(d, s + 1, s + 1)[0])
    return (Task("hilbert", ()), Task("dim", ()), Task("oracle", (("points", "20"),)),
            Task("mixedmult", (("k", k),)), Task("mixedmult", (("k", k_up),)),
            Task("chi", (("k", k),)), Task("symbol", (("k", k), ("seed", "1"))),
            Task("three-routes", (("k", k),)), Task("three-routes", (("k", k_up), ("seed", "2"))),
            Task("filter-regular-length", (("k", k),)))
