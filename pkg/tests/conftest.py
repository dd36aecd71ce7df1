import random

import pytest

from pova.ledger import Ledger
from pova.routing import CharitySink, Router
from pova.scenario import scenario_from_dict
from pova.verification import ProofRegistry

SCHEDULE_KINDS = ("constant", "halving", "log_cost", "participant_scaled", "influx_scaled")
POLICY_KINDS = ("charity_sink", "fund_accumulate", "budget_split", "lottery_pot")


@pytest.fixture
def ledger():
    return Ledger()


@pytest.fixture
def registry():
    return ProofRegistry()


@pytest.fixture
def router(ledger):
    return Router(ledger, CharitySink())


def random_schedule(rng: random.Random) -> dict:
    kind = rng.choice(SCHEDULE_KINDS)
    r0 = f"{rng.randint(1, 4)}.{rng.randint(0, 999):03d}"
    if kind == "constant":
        return {"kind": kind, "r0": r0}
    if kind == "halving":
        return {"kind": kind, "r0": r0, "interval_epochs": rng.randint(1, 40)}
    if kind == "log_cost":
        return {"kind": kind, "a": rng.uniform(0.2, 3.0), "b": rng.uniform(0.0, 3.0),
                "s0": rng.randint(1, 5000)}
    if kind == "participant_scaled":
        return {"kind": kind, "r0": r0}
    return {"kind": kind, "r0": r0, "s_ref": rng.randint(1, 5000)}


def random_policy(rng: random.Random) -> dict:
    kind = rng.choice(POLICY_KINDS)
    if kind == "budget_split":
        n = rng.randint(1, 4)
        names = ["charity", "fund", "schools", "roads"][:n]
        cuts = sorted(rng.sample(range(1, 60), n - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [60])]
        return {"kind": kind, "weights": [{"account": nm, "weight": f"{p}/60"}
                                          for nm, p in zip(names, parts)]}
    if kind == "lottery_pot":
        return {"kind": kind, "draw_interval_epochs": rng.randint(1, 12)}
    return {"kind": kind}


def random_agent(rng: random.Random, aid: int, mode: str) -> dict:
    choices = {"direct": ["deposit_every_n", "deposit_every_n", "idle"],
               "rigs": ["buy_rig_once", "lapse_after", "idle"],
               "mixed": ["deposit_every_n", "buy_rig_once", "lapse_after", "idle"]}[mode]
    kind = rng.choice(choices)
    if kind == "deposit_every_n":
        strategy = {"kind": kind, "n": rng.randint(1, 5), "amount": rng.randint(1, 500)}
    elif kind == "buy_rig_once":
        strategy = {"kind": kind, "amount": rng.randint(1, 1000)}
    elif kind == "lapse_after":
        strategy = {"kind": kind, "epochs": rng.randint(1, 30), "amount": rng.randint(1, 1000)}
    else:
        strategy = {"kind": "idle"}
    return {"id": aid, "initial_prime": rng.randint(0, 20000),
            "reservation_pricing": rng.random() < 0.6, "strategy": strategy}


def random_scenario_dict(rng: random.Random, mode: str | None = None,
                         epochs: int | None = None) -> dict:
    mode = mode or rng.choice(("direct", "rigs", "mixed"))
    ids = rng.sample(range(1, 100), rng.randint(1, 6))
    d = {
        "mode": mode,
        "epochs": epochs or rng.randint(1, 80),
        "seed": rng.getrandbits(64),
        "schedule": random_schedule(rng),
        "policy": random_policy(rng),
        "constants": {
            "k": rng.randint(1, 3),
            "forbid_self_benefit": rng.random() < 0.5,
            "decay": rng.choice(["1", "0.95", "0.5", "0.999"]),
            "maintenance_fee": rng.choice([0, 0, 1, 5]),
        },
        "agents": [random_agent(rng, i, mode) for i in ids],
    }
    if mode != "direct":
        d["emission"] = {"e0": rng.randint(1, 1000),
                         "halving_interval": rng.choice(["inf", rng.randint(1, 50)])}
    return d


def random_scenario(rng: random.Random, **kw):
    return scenario_from_dict(random_scenario_dict(rng, **kw))


def direct_scenario(epochs=5, schedule=None, policy=None, agents=None, **constants):
    return scenario_from_dict({
        "mode": "direct",
        "epochs": epochs,
        "seed": 1,
        "schedule": schedule or {"kind": "constant", "r0": "1.0"},
        "policy": policy or {"kind": "charity_sink"},
        "constants": constants,
        "agents": agents or [{"id": 1, "initial_prime": 10_000,
                              "strategy": {"kind": "deposit_every_n", "n": 1, "amount": 100}}],
    })


# -- acceptance reporting ----------------------------------------------------------

ACCEPTANCE_RESULTS: list[tuple[int, str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, name, ok, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num:2d}. {name}: {detail}")
