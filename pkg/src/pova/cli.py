"""``pova`` command line: run, validate, ingest, compare, report.

Exit codes are a stable contract: 0 success, 1 I/O failure, 2 validation
failure, 3 when a compare run finds the twins' supply diverging.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import NoHolders, ScenarioInvalid
from .outputs import (build_report, compare_twins, dumps, report_text, supply_column,
                      write_run)
from .scenario import Scenario, load_scenario
from .sim import floor_price, format_decimal, run
from .verification import ProofRegistry

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2
EXIT_MISMATCH = 3


def _err(msg: str) -> None:
    print(f"pova: {msg}", file=sys.stderr)


def _default_out() -> str:
    return os.environ.get("POVA_OUT", "pova-out")


def _load(path: str, seed: int | None) -> Scenario:
    sc = load_scenario(path)
    return sc.with_seed(seed) if seed is not None else sc


def _run_one(scenario: Scenario, out_dir: Path) -> dict:
    result = run(scenario)
    write_run(result, out_dir)
    try:
        floor = format_decimal(floor_price(result.final))
    except NoHolders:
        floor = ""
    return {"seed": scenario.seed, "dir": out_dir.name,
            "final_supply": supply_column(result)[-1],
            "cumulative_prime_alienated": result.final.cumulative_prime_alienated,
            "floor_price": floor}


def cmd_run(args: argparse.Namespace) -> int:
    scenario = _load(args.scenario, args.seed)
    out = Path(args.out)
    if not args.sweep or args.sweep <= 1:
        _run_one(scenario, out)
        return EXIT_OK
    seeds = [(scenario.seed + i) % 2**64 for i in range(args.sweep)]
    variants = [scenario.with_seed(s) for s in seeds]
    dirs = [out / f"seed-{s}" for s in seeds]
    with ProcessPoolExecutor() as pool:
        rows = list(pool.map(_run_one, variants, dirs))
    lines = ["seed,dir,final_supply,cumulative_prime_alienated,floor_price"]
    lines += [f"{r['seed']},{r['dir']},{r['final_supply']},{r['cumulative_prime_alienated']},"
              f"{r['floor_price']}" for r in rows]
    (out / "sweep.csv").write_text("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    sc = _load(args.scenario, None)
    print(f"ok: {sc.mode} scenario, {sc.epochs} epochs, {len(sc.agents)} agents")
    return EXIT_OK


def cmd_ingest(args: argparse.Namespace) -> int:
    if args.records == "-":
        lines = sys.stdin.read().splitlines()
    else:
        lines = Path(args.records).read_text().splitlines()
    registry = ProofRegistry(fiat_currency=args.currency)
    proofs, errors = registry.ingest_fiat_records(lines, epoch=args.epoch)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "proofs.jsonl").write_text(
        "".join(json.dumps(p.to_dict()) + "\n" for p in proofs))
    (out / "ingest_errors.jsonl").write_text(
        "".join(json.dumps(e.to_dict()) + "\n" for e in errors))
    print(f"{len(proofs)} proofs, {len(errors)} errors")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    scenario = _load(args.scenario, args.seed)
    pova, pob, report = compare_twins(scenario)
    out = Path(args.out)
    write_run(pova, out / "pova")
    write_run(pob, out / "pob")
    (out / "compare.json").write_text(dumps(report))
    if not report["supply_identical"]:
        _err(f"twin supply diverges at epoch {report['first_mismatch_epoch']}")
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    try:
        report = build_report(args.dir)
    except (KeyError, ValueError) as exc:
        _err(f"malformed run directory {args.dir}: {exc}")
        return EXIT_INVALID
    sys.stdout.write(report_text(report, args.format))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pova", description="Proof-of-Value-Alienation simulator")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario and write events, metrics and summary")
    r.add_argument("scenario")
    r.add_argument("--out", default=_default_out())
    r.add_argument("--seed", type=int)
    r.add_argument("--sweep", type=int, default=0, help="run N seed variants in parallel")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("validate", help="check a scenario without running it")
    v.add_argument("scenario")
    v.set_defaults(func=cmd_validate)

    i = sub.add_parser("ingest", help="turn fiat transfer records (JSON Lines) into proofs")
    i.add_argument("records", help="record file, or - for standard input")
    i.add_argument("--out", default=_default_out())
    i.add_argument("--currency", help="reject records in any other currency")
    i.add_argument("--epoch", type=int, default=0)
    i.set_defaults(func=cmd_ingest)

    c = sub.add_parser("compare", help="run PoVA and Proof-of-Burn twins of a direct scenario")
    c.add_argument("scenario")
    c.add_argument("--out", default=_default_out())
    c.add_argument("--seed", type=int)
    c.set_defaults(func=cmd_compare)

    rep = sub.add_parser("report", help="summarize a run directory")
    rep.add_argument("dir")
    rep.add_argument("--format", choices=("csv", "json"), default="csv")
    rep.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioInvalid as exc:
        _err(f"invalid scenario: {exc}")
        return EXIT_INVALID
    except OSError as exc:
        _err(str(exc))
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
