"""Scenario model, validation and loading (TOML or JSON).

A scenario fixes everything a run depends on: issuance mode, schedules,
routing policy, agent population and the seed. Validation reports the first
violated constraint as :class:`ScenarioInvalid` with a dotted field path.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Union

from .errors import InvalidPolicy, ScenarioInvalid, ScheduleError
from .issuance import Constant, IssuanceSchedule, Ratio, schedule_from_dict, schedule_to_dict
from .ledger import CHARITY_SINK, FIRST_USER_ACCOUNT, FUND_ACCOUNT, MAX_AMOUNT
from .rigs import DECAY_SCALE, EmissionSchedule
from .routing import BudgetSplit, RoutePolicy, policy_from_dict, policy_to_dict

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

MODES = ("direct", "rigs", "mixed")
ALIENATION = ("onledger", "burn")


@dataclass(frozen=True)
class DepositEveryN:
    n: int
    amount: int
    kind = "deposit_every_n"


@dataclass(frozen=True)
class BuyRigOnce:
    amount: int
    kind = "buy_rig_once"


@dataclass(frozen=True)
class LapseAfter:
    """Buy a rig at epoch 0 and stop paying upkeep after ``epochs`` epochs."""

    epochs: int
    amount: int
    kind = "lapse_after"


@dataclass(frozen=True)
class Idle:
    kind = "idle"


Strategy = Union[DepositEveryN, BuyRigOnce, LapseAfter, Idle]
RIG_STRATEGIES = (BuyRigOnce, LapseAfter)


@dataclass(frozen=True)
class AgentSpec:
    id: int
    initial_prime: int
    strategy: Strategy
    reservation_pricing: bool = False


@dataclass(frozen=True)
class Constants:
    k: int = 1
    forbid_self_benefit: bool = False
    epoch_minutes: int = 10
    decay_factor_scaled: int = DECAY_SCALE
    maintenance_fee: int = 0
    alienation: str = "onledger"


@dataclass(frozen=True)
class Scenario:
    mode: str
    schedule: IssuanceSchedule
    policy: RoutePolicy
    epochs: int
    seed: int
    agents: tuple[AgentSpec, ...]
    emission: EmissionSchedule | None = None
    constants: Constants = field(default_factory=Constants)
    # names of budget-split beneficiaries, opened after the agents in this order
    beneficiaries: tuple[str, ...] = ()

    def agent_accounts(self) -> dict[int, int]:
        """Ledger account of each agent id (ascending ids get ascending accounts)."""
        return {a.id: FIRST_USER_ACCOUNT + i
                for i, a in enumerate(sorted(self.agents, key=lambda a: a.id))}

    def with_seed(self, seed: int) -> Scenario:
        return replace(self, seed=seed)

    def with_alienation(self, alienation: str) -> Scenario:
        return replace(self, constants=replace(self.constants, alienation=alienation))


# -- parsing ------------------------------------------------------------------

def _int(d: dict, key: str, path: str, minimum: int | None = None, default: Any = ...) -> int:
    if key not in d:
        if default is ...:
            raise ScenarioInvalid(f"{path}{key}", "is required")
        return default
    v = d[key]
    if isinstance(v, str) and v.isdigit():
        v = int(v)
    if not isinstance(v, int) or isinstance(v, bool):
        raise ScenarioInvalid(f"{path}{key}", f"must be an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ScenarioInvalid(f"{path}{key}", f"must be >= {minimum}, got {v}")
    if v > MAX_AMOUNT:
        raise ScenarioInvalid(f"{path}{key}", "is out of range")
    return v


def _strategy(d: Any, path: str) -> Strategy:
    if not isinstance(d, dict):
        raise ScenarioInvalid(path, "must be a table with a 'kind'")
    kind = d.get("kind")
    p = path + "."
    if kind == "deposit_every_n":
        return DepositEveryN(_int(d, "n", p, 1), _int(d, "amount", p, 1))
    if kind == "buy_rig_once":
        return BuyRigOnce(_int(d, "amount", p, 1))
    if kind == "lapse_after":
        return LapseAfter(_int(d, "epochs", p, 1), _int(d, "amount", p, 1))
    if kind == "idle":
        return Idle()
    raise ScenarioInvalid(f"{path}.kind", f"unknown strategy {kind!r}")


def _decay(v: Any) -> int:
    try:
        r = Ratio.parse(v)
    except ScheduleError as exc:
        raise ScenarioInvalid("constants.decay", str(exc)) from None
    if not 0 < r.scaled <= DECAY_SCALE:
        raise ScenarioInvalid("constants.decay", "must be in (0, 1]")
    return r.scaled


def _emission(d: Any) -> EmissionSchedule:
    if not isinstance(d, dict):
        raise ScenarioInvalid("emission", "must be a table")
    e0 = _int(d, "e0", "emission.", 1)
    hi = d.get("halving_interval")
    if hi in (None, "inf", "infinity", 0):
        hi = None
    else:
        hi = _int(d, "halving_interval", "emission.", 1)
    return EmissionSchedule(e0, hi)


def _policy(d: Any, n_agents: int) -> tuple[RoutePolicy, tuple[str, ...]]:
    if not isinstance(d, dict):
        raise ScenarioInvalid("policy", "must be a table with a 'kind'")
    beneficiaries: list[str] = []
    if d.get("kind") == "budget_split":
        raw = d.get("weights")
        if not isinstance(raw, list) or not raw:
            raise ScenarioInvalid("policy.weights", "must be a non-empty list")
        weights = []
        agent_accounts = {FIRST_USER_ACCOUNT + i for i in range(n_agents)}
        for i, w in enumerate(raw):
            if not isinstance(w, dict) or "account" not in w or "weight" not in w:
                raise ScenarioInvalid(f"policy.weights[{i}]", "needs 'account' and 'weight'")
            acct = w["account"]
            if acct == "charity":
                acct = CHARITY_SINK
            elif acct == "fund":
                acct = FUND_ACCOUNT
            elif isinstance(acct, str) and not acct.isdigit():
                if acct not in beneficiaries:
                    beneficiaries.append(acct)
                acct = FIRST_USER_ACCOUNT + n_agents + beneficiaries.index(acct)
            else:
                acct = int(acct)
                if acct in agent_accounts:
                    raise ScenarioInvalid(f"policy.weights[{i}].account",
                                          "targets an agent account (value loop)")
                if acct >= FIRST_USER_ACCOUNT:
                    raise ScenarioInvalid(f"policy.weights[{i}].account",
                                          "numeric targets must be reserved accounts; name beneficiaries instead")
            weights.append({"account": acct, "weight": str(w["weight"])})
        d = {"kind": "budget_split", "weights": weights}
    try:
        return policy_from_dict(d), tuple(beneficiaries)
    except InvalidPolicy as exc:
        raise ScenarioInvalid("policy", str(exc)) from None


def scenario_from_dict(d: dict[str, Any]) -> Scenario:
    if not isinstance(d, dict):
        raise ScenarioInvalid("scenario", "must be a table")
    mode = d.get("mode")
    if mode not in MODES:
        raise ScenarioInvalid("mode", f"must be one of {', '.join(MODES)}, got {mode!r}")
    epochs = _int(d, "epochs", "", 1)
    seed = _int(d, "seed", "", 0, default=0)

    raw_agents = d.get("agents")
    if not isinstance(raw_agents, list) or not raw_agents:
        raise ScenarioInvalid("agents", "at least one agent is required")
    agents = []
    seen = set()
    for i, a in enumerate(raw_agents):
        path = f"agents[{i}]."
        if not isinstance(a, dict):
            raise ScenarioInvalid(f"agents[{i}]", "must be a table")
        aid = _int(a, "id", path, 0)
        if aid in seen:
            raise ScenarioInvalid(f"{path}id", f"duplicate agent id {aid}")
        seen.add(aid)
        strategy = _strategy(a.get("strategy", {"kind": "idle"}), f"{path}strategy")
        if mode == "direct" and isinstance(strategy, RIG_STRATEGIES):
            raise ScenarioInvalid(f"{path}strategy", "rig strategies need mode rigs or mixed")
        if mode == "rigs" and isinstance(strategy, DepositEveryN):
            raise ScenarioInvalid(f"{path}strategy", "deposit strategies need mode direct or mixed")
        rp = a.get("reservation_pricing", False)
        if not isinstance(rp, bool):
            raise ScenarioInvalid(f"{path}reservation_pricing", "must be a boolean")
        agents.append(AgentSpec(aid, _int(a, "initial_prime", path, 0, default=0), strategy, rp))

    if "schedule" in d:
        try:
            schedule = schedule_from_dict(d["schedule"])
        except (ScheduleError, KeyError, TypeError) as exc:
            raise ScenarioInvalid("schedule", str(exc)) from None
    elif mode == "rigs":
        schedule = Constant(Ratio.parse("1"))
    else:
        raise ScenarioInvalid("schedule", "is required for direct and mixed modes")

    emission = None
    if mode in ("rigs", "mixed"):
        if "emission" not in d:
            raise ScenarioInvalid("emission", "is required for rigs and mixed modes")
        emission = _emission(d["emission"])

    policy, beneficiaries = _policy(d.get("policy", {"kind": "charity_sink"}), len(agents))

    c = d.get("constants", {})
    if not isinstance(c, dict):
        raise ScenarioInvalid("constants", "must be a table")
    fsb = c.get("forbid_self_benefit", False)
    if not isinstance(fsb, bool):
        raise ScenarioInvalid("constants.forbid_self_benefit", "must be a boolean")
    alienation = c.get("alienation", "onledger")
    if alienation not in ALIENATION:
        raise ScenarioInvalid("constants.alienation", f"must be one of {', '.join(ALIENATION)}")
    constants = Constants(
        k=_int(c, "k", "constants.", 1, default=1),
        forbid_self_benefit=fsb,
        epoch_minutes=_int(c, "epoch_minutes", "constants.", 1, default=10),
        decay_factor_scaled=_decay(c.get("decay", "1")),
        maintenance_fee=_int(c, "maintenance_fee", "constants.", 0, default=0),
        alienation=alienation,
    )
    return Scenario(mode, schedule, policy, epochs, seed, tuple(agents), emission,
                    constants, beneficiaries)


def _strategy_to_dict(s: Strategy) -> dict[str, Any]:
    if isinstance(s, DepositEveryN):
        return {"kind": s.kind, "n": s.n, "amount": s.amount}
    if isinstance(s, BuyRigOnce):
        return {"kind": s.kind, "amount": s.amount}
    if isinstance(s, LapseAfter):
        return {"kind": s.kind, "epochs": s.epochs, "amount": s.amount}
    return {"kind": "idle"}


def scenario_to_dict(s: Scenario) -> dict[str, Any]:
    """JSON-ready form; loading it back yields an equal scenario."""
    policy = policy_to_dict(s.policy)
    if isinstance(s.policy, BudgetSplit) and s.beneficiaries:
        base = FIRST_USER_ACCOUNT + len(s.agents)
        for w in policy["weights"]:
            if w["account"] >= base:
                w["account"] = s.beneficiaries[w["account"] - base]
    out: dict[str, Any] = {
        "mode": s.mode,
        "epochs": s.epochs,
        "seed": s.seed,
        "schedule": schedule_to_dict(s.schedule),
        "policy": policy,
    }
    if s.emission is not None:
        out["emission"] = {"e0": s.emission.e0,
                           "halving_interval": s.emission.halving_interval or "inf"}
    c = s.constants
    out["constants"] = {
        "k": c.k,
        "forbid_self_benefit": c.forbid_self_benefit,
        "epoch_minutes": c.epoch_minutes,
        "decay": str(Ratio(c.decay_factor_scaled)),
        "maintenance_fee": c.maintenance_fee,
        "alienation": c.alienation,
    }
    out["agents"] = [
        {"id": a.id, "initial_prime": a.initial_prime,
         "reservation_pricing": a.reservation_pricing,
         "strategy": _strategy_to_dict(a.strategy)}
        for a in s.agents
    ]
    return out


def load_scenario(path: str | Path) -> Scenario:
    """Read a TOML or JSON scenario file.

    JSON is detected by a ``.json`` suffix or a leading ``{``; everything else
    is parsed as TOML. Parse errors surface as ``ScenarioInvalid``;
    ``OSError`` propagates.
    """
    text = Path(path).read_text()
    try:
        if str(path).endswith(".json") or text.lstrip().startswith("{"):
            data = json.loads(text)
        else:
            data = tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ScenarioInvalid("scenario", f"cannot parse {path}: {exc}") from None
    return scenario_from_dict(data)
