"""Command line: `mixmult run`, `mixmult verify-corpus`, `mixmult oracle`."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ParseError
from .problem import ProblemDocument, Task, parse_problem
from .runner import EXIT_FAIL, EXIT_PARSE, EXIT_PASS, Overrides, run, strip_timing


def _load(path: str) -> ProblemDocument:
    return parse_problem(Path(path).read_text(encoding="utf-8"))


def _dump(obj):
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _cmd_run(args) -> int:
    doc = _load(args.file)
    report = run(doc, Overrides(args.seed, args.window, args.retries), jobs=args.jobs)
    _dump(report)
    return report["exit_code"]


def _oracle_document(doc: ProblemDocument) -> ProblemDocument:
    """Same instance, with the task list replaced by one oracle task."""
    if doc.kind == "ideals" and not doc.family().is_monomial():
        raise ParseError("the lattice oracle needs monomial ideals and relations", 1, 1)
    return ProblemDocument(**{**doc.__dict__, "tasks": (Task("oracle", ()),)})


def _cmd_oracle(args) -> int:
    doc = _oracle_document(_load(args.file))
    report = run(doc, Overrides(args.seed, args.window, None))
    _dump(report)
    return report["exit_code"]


def verify_corpus(directory, update: bool = False, jobs: int = 1) -> dict:
    """Run every .prob in a directory and compare against its .expected.json."""
    results = []
    for prob in sorted(Path(directory).glob("*.prob")):
        expected_path = prob.with_suffix(".expected.json")
        report = strip_timing(run(parse_problem(prob.read_text(encoding="utf-8")), jobs=jobs))
        if update:
            expected_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        if not expected_path.exists():
            results.append({"name": prob.stem, "match": False, "reason": "missing expected file"})
            continue
        expected = json.loads(expected_path.read_text(encoding="utf-8"))
        current = json.loads(json.dumps(report, sort_keys=True))
        entry = {"name": prob.stem, "match": current == expected, "exit_code": report["exit_code"]}
        if not entry["match"]:
            entry["reason"] = "report differs from golden file"
        results.append(entry)
    mismatches = sum(1 for r in results if not r["match"])
    return {"entries": results, "count": len(results), "mismatches": mismatches}


def _cmd_verify_corpus(args) -> int:
    summary = verify_corpus(args.directory, update=args.update, jobs=args.jobs)
    _dump(summary)
    return EXIT_PASS if summary["mismatches"] == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixmult", description="Exact mixed multiplicities of graded modules.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run every task of a problem document")
    p.add_argument("file")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--window", type=int, help="Koszul validation window (graded) or grid offset (ideals)")
    p.add_argument("--retries", type=int)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("verify-corpus", help="compare a corpus directory against its golden reports")
    p.add_argument("directory")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--update", action="store_true", help="rewrite the golden files first")
    p.set_defaults(func=_cmd_verify_corpus)

    p = sub.add_parser("oracle", help="check the engine against brute-force counting")
    p.add_argument("file")
    p.add_argument("--seed", type=int)
    p.add_argument("--window", type=int)
    p.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"mixmult: parse error: {exc.message}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"mixmult: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
