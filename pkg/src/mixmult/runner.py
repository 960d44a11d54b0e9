"""Task dispatch and JSON reports for problem documents."""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import ideals as I
from . import systems as S
from .errors import StabilizationUncertain
from .hilbert import (
    QPoly,
    difference_formula_check,
    dim_supp_pp,
    hilbert_series,
    mixed_multiplicity,
    module_hilbert_polynomial,
)
from .koszul import euler_characteristic
from .modules import graded_piece_dim
from .problem import ProblemDocument, Task, emit_problem, parse_problem

EXIT_PASS, EXIT_FAIL, EXIT_PARSE, EXIT_UNCERTAIN = 0, 1, 2, 3


@dataclass(frozen=True)
class Overrides:
    seed: int = None
    window: int = None
    retries: int = None


def jsonable(x):
    """Plain JSON values; -inf becomes the string "-inf"."""
    if isinstance(x, float) and x == float("-inf"):
        return "-inf"
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, QPoly):
        return x.to_json()
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return x.to_json()
    return str(x)


def _tuple(text):
    return tuple(int(v) for v in text.strip("()").split(",") if v.strip())


def _int_param(task: Task, key, override, default):
    if override is not None:
        return override
    v = task.get(key)
    return int(v) if v is not None else default


def _polys(ring, text):
    return [ring.parse(s) for s in text.strip("[]").split(",") if s.strip()]


def _require(task, *keys):
    for k in keys:
        if task.get(k) is None:
            raise ValueError(f"task {task.name} needs {k}=")


# -- graded tasks ----------------------------------------------------------------

def _graded_system(M, task, k, seed, retries):
    if task.get("x") is not None:
        return S.ElementSequence.of(M.ring, _polys(M.ring, task.get("x")))
    return S.sample_mm_system(M, k, seed, retries)


def _run_graded(doc: ProblemDocument, task: Task, seed, window, retries):
    ring = doc.ring()
    M = doc.module(ring)
    name = task.name
    chi_window = window if window is not None else 3
    if name == "hilbert":
        hs = hilbert_series(M)
        P = module_hilbert_polynomial(M)
        return {"numerator": hs.to_json(), "threshold": hs.threshold(), "polynomial": P.poly,
                "polynomial_text": repr(P.poly)}, None
    if name == "dim":
        return {"dim_supp_pp": dim_supp_pp(M)}, None
    if name == "mixedmult":
        _require(task, "k")
        mm = mixed_multiplicity(M, _tuple(task.get("k")))
        return {"k": mm.k, "value": mm.value, "extended": mm.extended}, None
    if name in ("chi", "symbol"):
        k = _tuple(task.get("k")) if task.get("k") else None
        if k is None and task.get("x") is None:
            raise ValueError(f"task {name} needs k= or x=")
        xs = _graded_system(M, task, k, seed, retries)
        if name == "chi":
            chi = euler_characteristic(M, xs, window=chi_window)
            return {"system": [str(a) for a in xs], "type": xs.type, "value": chi.value,
                    "witness_degree": chi.witness_degree, "homology_lengths": chi.homology_lengths,
                    "window": chi.window}, None
        return {"system": [str(a) for a in xs], "type": xs.type,
                "value": S.multiplicity_symbol(M, xs)}, None
    if name == "difference-formula":
        _require(task, "a")
        out = difference_formula_check(M, ring.parse(task.get("a")))
        return out, out["holds"]
    if name == "three-routes":
        _require(task, "k")
        xs = _polys(ring, task.get("x")) if task.get("x") else None
        out = S.verify_equality_theorem(M, _tuple(task.get("k")), seed, retries, chi_window, xs)
        return out, out["holds"]
    if name == "filter-regular-length":
        _require(task, "k")
        out = S.filter_regular_length_formula(M, _tuple(task.get("k")), seed, retries)
        return out, out["holds"]
    if name == "reduction-formula":
        _require(task, "a", "k")
        out = S.reduction_formula_check(M, ring.parse(task.get("a")), _tuple(task.get("k")))
        return out, out["holds"]
    if name == "decomposition-formula":
        k = _tuple(task.get("k")) if task.get("k") else None
        if task.get("x") is not None:
            xs = _polys(ring, task.get("x"))
        elif k is not None:
            xs = list(S.sample_mm_system(M, k, seed, retries))
        else:
            raise ValueError("task decomposition-formula needs k= or x=")
        out = S.decomposition_formula_check(M, xs, k)
        return out, out["holds"]
    if name == "oracle":
        return _graded_oracle(M, task, seed)
    raise ValueError(f"unknown task {name}")


def _graded_oracle(M, task, seed):
    """Series coefficients and Hilbert polynomial against standard-monomial counts."""
    points = int(task.get("points") or 50)
    rng = random.Random(seed)
    hs = hilbert_series(M)
    thr = hs.threshold()
    d = M.ring.d
    top = [t + 4 for t in thr]
    series_bad = []
    for _ in range(points):
        n = tuple(rng.randint(0, t) for t in top)
        if hs.coefficient(n) != graded_piece_dim(M, n):
            series_bad.append(n)
    P = module_hilbert_polynomial(M).poly
    poly_bad = []
    for off in product(range(5), repeat=d):
        n = tuple(t + o for t, o in zip(thr, off))
        if P(n) != graded_piece_dim(M, n):
            poly_bad.append(n)
    ok = not series_bad and not poly_bad
    return {"points": points, "threshold": thr, "series_mismatches": series_bad,
            "polynomial_mismatches": poly_bad, "holds": ok}, ok


# -- ideal tasks -------------------------------------------------------------------

def _ideal_xs(fam, task):
    return _polys(fam.ring, task.get("x")) if task.get("x") is not None else None


def _run_ideals(doc: ProblemDocument, task: Task, seed, window, retries):
    fam = doc.family()
    name = task.name
    offset = window
    if name == "idealmult":
        _require(task, "k0", "k")
        mm = I.ideal_mixed_multiplicity(fam, int(task.get("k0")), _tuple(task.get("k")), offset)
        out = {"k0": mm.k0, "k": mm.k, "value": mm.value, "extended": mm.extended, "vacuous": mm.vacuous}
        if mm.fit is not None:
            out.update({"fit_base": mm.fit.base, "fit_span": mm.fit.span, "fit_degree": mm.fit.degree,
                        "grid_verified": True})
        return out, None
    if name == "samuel":
        return {"value": I.samuel_multiplicity(fam, fam.N, offset), "dim": I.module_dim(fam.N)}, None
    if name == "oracle":
        return _ideal_oracle(fam, task, offset)
    _require(task, "k0", "k")
    k0, k = int(task.get("k0")), _tuple(task.get("k"))
    xs = _ideal_xs(fam, task)
    if name == "ideal-three-routes":
        out = I.verify_ideal_main_theorem(fam, k0, k, seed, retries, offset, xs)
    elif name == "fc-length-route":
        out = I.verify_fc_length_route(fam, k0, k, seed, retries, offset, xs)
    elif name == "ideal-decomposition":
        out = I.verify_ideal_decomposition(fam, k0, k, seed, retries, xs, offset)
    elif name == "primary-decomposition":
        out = I.verify_primary_case(fam, k0, k, seed, retries, xs, offset)
    else:
        raise ValueError(f"unknown task {name}")
    return out, out["holds"]


def _ideal_oracle(fam, task, offset):
    """associated_length against the lattice count, on one point or a whole box."""
    if task.get("n") is not None:
        pts = [(int(task.get("n0") or 0),) + _tuple(task.get("n"))]
    else:
        w0 = fam.default_offset() if offset is None else offset
        span = int(task.get("points") or 3)
        pts = [tuple(w0 + i for i in idx) for idx in product(range(span), repeat=fam.d + 1)]
    bad = []
    for v in pts:
        if I.associated_length(fam, v[0], v[1:]) != I.lattice_oracle(fam, v[0], v[1:]):
            bad.append(v)
    return {"points": len(pts), "mismatches": bad, "holds": not bad}, not bad


# -- report assembly ---------------------------------------------------------------

def run_task(doc: ProblemDocument, index: int, overrides: Overrides = Overrides()) -> dict:
    task = doc.tasks[index]
    seed = _int_param(task, "seed", overrides.seed, 0)
    window = _int_param(task, "window", overrides.window, None)
    retries = _int_param(task, "retries", overrides.retries, S.DEFAULT_RETRIES)
    entry = {"index": index, "task": task.name, "params": dict(task.params),
             "seed": seed, "window": window, "retries": retries}
    expect_error = task.get("expect_error")
    start = time.perf_counter()
    try:
        fn = _run_graded if doc.kind == "graded" else _run_ideals
        result, holds = fn(doc, task, seed, window, retries)
        entry["result"] = jsonable(result)
        if expect_error:
            entry["verdict"] = "fail"
            entry["error"] = {"code": "ExpectedErrorMissing", "message": f"expected {expect_error}"}
        else:
            entry["verdict"] = "pass" if holds is None or holds else "fail"
    except Exception as exc:  # embedded per task, siblings keep running
        code = getattr(exc, "code", type(exc).__name__)
        entry["error"] = {"code": code, "message": getattr(exc, "message", str(exc))}
        if expect_error and code == expect_error:
            entry["verdict"] = "pass"
        elif isinstance(exc, StabilizationUncertain):
            entry["verdict"] = "uncertain"
        else:
            entry["verdict"] = "fail"
    entry["seconds"] = round(time.perf_counter() - start, 4)
    return entry


def _worker(args):
    text, index, overrides = args
    return run_task(parse_problem(text), index, overrides)


def exit_code(entries) -> int:
    verdicts = {e["verdict"] for e in entries}
    if "fail" in verdicts:
        return EXIT_FAIL
    if "uncertain" in verdicts:
        return EXIT_UNCERTAIN
    return EXIT_PASS


def run(doc: ProblemDocument, overrides: Overrides = Overrides(), jobs: int = 1) -> dict:
    n = len(doc.tasks)
    if jobs > 1 and n > 1:
        text = emit_problem(doc)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = list(pool.map(_worker, [(text, i, overrides) for i in range(n)]))
    else:
        entries = [run_task(doc, i, overrides) for i in range(n)]
    summary = {v: sum(1 for e in entries if e["verdict"] == v) for v in ("pass", "fail", "uncertain")}
    return {
        "document": emit_problem(doc),
        "kind": doc.kind,
        "tasks": entries,
        "summary": summary,
        "exit_code": exit_code(entries),
    }


def strip_timing(report: dict) -> dict:
    out = dict(report)
    out["tasks"] = [{k: v for k, v in e.items() if k != "seconds"} for e in report["tasks"]]
    return out
