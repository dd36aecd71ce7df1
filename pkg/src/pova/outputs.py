"""Run artifacts on disk: events.jsonl, metrics.csv, summary.json, twin reports."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any

from .errors import ScenarioInvalid
from .ledger import BURN_ACCOUNT, dump_jsonl
from .scenario import Scenario
from .sim import METRICS_FIELDS, RunResult, destination_total, run, summary

EVENTS_FILE = "events.jsonl"
METRICS_FILE = "metrics.csv"
SUMMARY_FILE = "summary.json"


def metrics_csv(result: RunResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(METRICS_FIELDS)
    for row in result.metrics:
        w.writerow(row.to_strings())
    return buf.getvalue()


def events_jsonl(result: RunResult) -> str:
    return dump_jsonl(result.log)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def write_run(result: RunResult, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        EVENTS_FILE: events_jsonl(result),
        METRICS_FILE: metrics_csv(result),
        SUMMARY_FILE: dumps(summary(result)),
    }
    paths = []
    for name, text in files.items():
        p = out / name
        p.write_text(text)
        paths.append(p)
    return paths


def supply_column(result: RunResult) -> list[int]:
    return [row.total_derivative_supply for row in result.metrics]


def compare_twins(scenario: Scenario) -> tuple[RunResult, RunResult, dict[str, Any]]:
    """Run a Direct scenario as PoVA (on-ledger, routed) and as Proof-of-Burn.

    The report states whether Derivative supply matched epoch by epoch and
    where the Prime Assets ended up in each twin.
    """
    if scenario.mode != "direct":
        raise ScenarioInvalid("mode", "compare supports direct mode only")
    pova = run(scenario.with_alienation("onledger"))
    pob = run(scenario.with_alienation("burn"))
    a, b = supply_column(pova), supply_column(pob)
    mismatch = next((i for i, (x, y) in enumerate(zip(a, b)) if x != y), None)
    pova_burn = pova.final.balance(BURN_ACCOUNT)
    pob_burn = pob.final.balance(BURN_ACCOUNT)
    report = {
        "supply_identical": a == b,
        "first_mismatch_epoch": mismatch,
        "final_supply": {"pova": str(a[-1]), "pob": str(b[-1])},
        "prime_destinations": {
            "pova": {"routed": str(destination_total(pova) - pova_burn),
                     "burned": str(pova_burn)},
            "pob": {"routed": str(destination_total(pob) - pob_burn),
                    "burned": str(pob_burn)},
        },
        "cumulative_prime_alienated": {
            "pova": str(pova.final.cumulative_prime_alienated),
            "pob": str(pob.final.cumulative_prime_alienated),
        },
    }
    return pova, pob, report


def read_metrics(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def build_report(run_dir: str | Path) -> dict[str, Any]:
    """Digest of a run directory; a pure function of metrics.csv and summary.json."""
    d = Path(run_dir)
    rows = read_metrics(d / METRICS_FILE)
    summ = json.loads((d / SUMMARY_FILE).read_text())
    changes = [int(r["epoch"]) for prev, r in zip(rows, rows[1:])
               if r["current_ratio"] != prev["current_ratio"]]
    gaps = sorted({b - a for a, b in zip(changes, changes[1:])})
    minutes = int(summ["totals"]["epoch_minutes"])
    last = rows[-1] if rows else {}
    return {
        "epochs": len(rows),
        "final_derivative_supply": last.get("total_derivative_supply", "0"),
        "cumulative_prime_alienated": last.get("cumulative_prime_alienated", "0"),
        "final_ratio": last.get("current_ratio", ""),
        "floor_price": summ.get("floor_price"),
        "ratio_change_epochs": changes,
        "ratio_change_interval_epochs": gaps[0] if len(gaps) == 1 else None,
        "ratio_change_interval_days": (
            f"{gaps[0] * minutes / 1440:.4f}" if len(gaps) == 1 else None),
        "forgone_emission": summ["totals"]["forgone_emission"],
        "reservation_violations": summ["totals"]["reservation_violations"],
        "policy_balances": summ["policy_balances"],
    }


def report_text(report: dict[str, Any], fmt: str) -> str:
    if fmt == "json":
        return dumps(report)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for key, value in report.items():
        if isinstance(value, dict):
            for sub, v in value.items():
                w.writerow([f"{key}.{sub}", json.dumps(v) if isinstance(v, dict) else v])
        elif isinstance(value, list):
            w.writerow([key, " ".join(map(str, value))])
        else:
            w.writerow([key, "" if value is None else value])
    return buf.getvalue()
