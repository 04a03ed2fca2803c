"""Command-line entry point: ``fairmarket solve|check|gen|bench``.

Exit codes: 0 success, 1 a ``check`` verdict failed, 2 parse or validation
error, 3 a solver result refuted by its own oracles, 4 safety budget hit.
Errors go to stderr as a JSON object.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import format_table, generated_corpus, load_corpus, run_bench
from .errors import BudgetExceeded, FairMarketError, InstanceTooLarge, InvalidInstance, InvalidParams, ParseError
from .generate import FAMILIES, generate
from .io import ResultFile, parse_instance_file, parse_result, serialize_instance, serialize_result
from .model import Allocation
from .pipeline import FAIRNESS, METHODS, checks_json, run_checks, solve

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_REFUTED, EXIT_BUDGET = 0, 1, 2, 3, 4
ORACLES = ("ef1", "eq1", "pef1", "fpo-certificate", "fpo-lp", "po-bruteforce")


class Refuted(FairMarketError):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(exc.strerror or str(exc), path) from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_solve(args) -> int:
    f = parse_instance_file(_read(args.instance))
    rf, refuted = solve(f.instance, args.fairness, args.method, args.check, args.objective,
                        name=f.metadata.get("name"))
    _emit(serialize_result(rf), args.output)
    if refuted:
        raise Refuted(f"oracles refuted {', '.join(refuted)}")
    return EXIT_OK


def _load_allocation(text: str, m: int) -> tuple[Allocation, tuple | None]:
    doc = json.loads(text) if text.lstrip().startswith("[") else None
    if doc is not None:
        return Allocation.from_bundles(doc, m), None
    rf = parse_result(text)
    return Allocation.from_bundles(rf.bundles, m), rf.prices


def _cmd_check(args) -> int:
    inst = parse_instance_file(_read(args.instance)).instance
    try:
        alloc, prices = _load_allocation(_read(args.allocation), inst.m)
    except (InvalidInstance, json.JSONDecodeError) as exc:
        raise ParseError(str(exc), args.allocation) from None
    which = args.oracles.split(",") if args.oracles else ["ef1", "eq1", "fpo-certificate", "pef1", "fpo-lp",
                                                          "po-bruteforce"]
    unknown = set(which) - set(ORACLES)
    if unknown:
        raise InvalidParams(f"unknown oracles {sorted(unknown)}")
    checks = run_checks(inst, alloc, prices, fairness="ef1", which=which)
    rf = ResultFile(bundles=alloc.as_lists(), prices=prices, checks=checks_json(checks))
    _emit(serialize_result(rf), args.output)
    return EXIT_OK if all(v.holds for v in checks.values()) else EXIT_CHECK_FAILED


def _cmd_gen(args) -> int:
    inst = generate(args.family, args.n, args.m, args.vmax, args.seed, k=args.k)
    meta = {"name": args.name or f"{args.family}-{args.n}x{args.m}-{args.seed}", "seed": args.seed,
            "family": args.family}
    _emit(serialize_instance(inst, meta), args.output)
    return EXIT_OK


def _cmd_bench(args) -> int:
    if args.corpus:
        corpus = load_corpus(Path(args.corpus))
    else:
        corpus = generated_corpus(args.generate, seed=args.seed)
    rows = run_bench(corpus, args.fairness, args.method, args.check, args.out, args.jobs)
    print(format_table(rows))
    statuses = {r.status for r in rows}
    if "refuted" in statuses:
        return EXIT_REFUTED
    if "budget" in statuses:
        return EXIT_BUDGET
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fairmarket", description="Fair and efficient allocation of indivisible goods.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve an instance file and emit a result file")
    s.add_argument("instance", help="instance JSON path, or - for stdin")
    s.add_argument("--fairness", choices=FAIRNESS, default="ef1")
    s.add_argument("--method", choices=METHODS, default="market")
    s.add_argument("--check", choices=("auto", "full"), default="auto")
    s.add_argument("--objective", choices=("mnw", "leximin"), default=None,
                   help="objective for --method constant-nk with ef1")
    s.add_argument("-o", "--output")
    s.set_defaults(func=_cmd_solve)

    c = sub.add_parser("check", help="run oracles on an allocation")
    c.add_argument("instance")
    c.add_argument("allocation", help="result JSON, or a JSON list of bundles")
    c.add_argument("--oracles", help=f"comma-separated subset of {','.join(ORACLES)}")
    c.add_argument("-o", "--output")
    c.set_defaults(func=_cmd_check)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("--family", choices=FAMILIES, default="random")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--vmax", type=int, default=10)
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--name")
    g.add_argument("-o", "--output")
    g.set_defaults(func=_cmd_gen)

    b = sub.add_parser("bench", help="sweep a corpus and tabulate event counts")
    src = b.add_mutually_exclusive_group(required=True)
    src.add_argument("--corpus", help="directory of instance JSON files")
    src.add_argument("--generate", type=int, metavar="COUNT", help="generate a mixed corpus of COUNT instances")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--fairness", choices=FAIRNESS, default="ef1")
    b.add_argument("--method", choices=METHODS, default="market")
    b.add_argument("--check", choices=("auto", "full"), default="auto")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--out", help="directory for per-instance result files and summary.json")
    b.set_defaults(func=_cmd_bench)
    return p


def _error(exc: BaseException, code: int) -> int:
    obj = {"error": {"type": type(exc).__name__, "message": str(exc), "exitCode": code}}
    locus = getattr(exc, "locus", None)
    if locus is not None:
        obj["error"]["locus"] = locus
    sys.stderr.write(json.dumps(obj) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Refuted as exc:
        return _error(exc, EXIT_REFUTED)
    except BudgetExceeded as exc:
        return _error(exc, EXIT_BUDGET)
    except (ParseError, InvalidInstance, InvalidParams, InstanceTooLarge) as exc:
        return _error(exc, EXIT_INPUT)
    except FairMarketError as exc:
        return _error(exc, EXIT_INPUT)


if __name__ == "__main__":
    sys.exit(main())
