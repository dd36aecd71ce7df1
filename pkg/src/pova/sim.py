"""Deterministic epoch-driven simulation of both issuance modes.

Agents act in ascending id order and every epoch runs the same phases:

1. ratio adjustment for the new epoch
2. alienation and proof verification, then the mint or rig purchase it backs
   (per agent; a direct deposit that would mint nothing is skipped)
3. rig maintenance payments
4. rig emission tick
5. lottery draw, when one is scheduled
6. end-of-epoch ratio adjustment
7. reservation-priced asks
8. one metrics row

Every state change is written to the ledger's record log (transfer events
plus annotations), so :func:`replay` rebuilds the final state from the log.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Any, Iterable, Iterator

from .errors import CorruptLog, NoHolders, UnknownHolder
from .issuance import IssuanceState, Ratio, adjust_ratio, mint_direct, preview_mint
from .ledger import (BURN_ACCOUNT, CHARITY_SINK, DAO_TREASURY, FUND_ACCOUNT, LOTTERY_POT,
                     Annotation, AssetKind, EventKind, Ledger, Record, TransferEvent)
from .prng import SplitMix64
from .rigs import Rig, RigParams, RigRegistry, RigStatus
from .routing import BudgetSplit, LotteryPot, LotteryState, Router, policy_targets
from .scenario import (AgentSpec, BuyRigOnce, DepositEveryN, LapseAfter, Scenario,
                       scenario_to_dict)
from .verification import ProofKind, ProofRegistry, ProofStatus

GRID = 10**9

METRICS_FIELDS = (
    "epoch",
    "total_derivative_supply",
    "cumulative_prime_alienated",
    "current_ratio",
    "pool_emitted",
    "active_rigs",
    "min_cost_basis",
    "mean_cost_basis",
    "lottery_pot",
    "implied_floor_price",
)


def format_decimal(x: Fraction | None) -> str:
    """Nine-digit decimal, rounded half-even; empty for ``None``."""
    if x is None:
        return ""
    q = round(x * GRID)
    sign = "-" if q < 0 else ""
    whole, frac = divmod(abs(q), GRID)
    return f"{sign}{whole}.{frac:09d}"


def parse_decimal(text: str) -> Fraction | None:
    return Fraction(text) if text else None


def ceil_to_grid(x: Fraction) -> Fraction:
    return Fraction(math.ceil(x * GRID), GRID)


@dataclass
class Holdings:
    """Per-holder Prime alienated and Derivative received, across both modes."""

    alienated: dict[int, int] = field(default_factory=dict)
    minted: dict[int, int] = field(default_factory=dict)
    direct_alienated: dict[int, int] = field(default_factory=dict)
    direct_minted: dict[int, int] = field(default_factory=dict)
    cheapest_lot: dict[int, Fraction] = field(default_factory=dict)

    def add_alienation(self, holder: int, amount: int) -> None:
        self.alienated[holder] = self.alienated.get(holder, 0) + amount

    def add_mint(self, holder: int, amount: int) -> None:
        self.minted[holder] = self.minted.get(holder, 0) + amount

    def add_direct_lot(self, holder: int, prime: int, minted: int) -> None:
        self.direct_alienated[holder] = self.direct_alienated.get(holder, 0) + prime
        self.direct_minted[holder] = self.direct_minted.get(holder, 0) + minted
        lot = Fraction(prime, minted)
        if holder not in self.cheapest_lot or lot < self.cheapest_lot[holder]:
            self.cheapest_lot[holder] = lot

    def holders(self) -> list[int]:
        return sorted(h for h, m in self.minted.items() if m > 0)

    def cost_basis(self, holder: int) -> Fraction:
        """Average Prime paid per Derivative received by ``holder``."""
        m = self.minted.get(holder, 0)
        if not m:
            raise UnknownHolder(f"account {holder} holds no minted tokens")
        return Fraction(self.alienated.get(holder, 0), m)

    def position_floor(self, holder: int) -> Fraction | None:
        """Cheapest production cost among the holder's positions.

        Each direct mint is its own lot; all rig income of a holder is one
        position whose cost is rig spend over rig emission so far.
        """
        best = self.cheapest_lot.get(holder)
        rig_minted = self.minted.get(holder, 0) - self.direct_minted.get(holder, 0)
        if rig_minted > 0:
            rig_cost = self.alienated.get(holder, 0) - self.direct_alienated.get(holder, 0)
            rb = Fraction(rig_cost, rig_minted)
            best = rb if best is None or rb < best else best
        return best


@dataclass
class FinalState:
    epoch: int = -1
    balances: dict[int, tuple[int, int]] = field(default_factory=dict)
    issuance: IssuanceState = field(default_factory=IssuanceState)
    holdings: Holdings = field(default_factory=Holdings)
    rigs: dict[int, Rig] = field(default_factory=dict)
    lottery: LotteryState | None = None
    proofs: dict[int, str] = field(default_factory=dict)
    forgone_emission: int = 0
    cumulative_prime_alienated: int = 0

    def balance(self, account: int, asset: AssetKind = AssetKind.PRIME) -> int:
        b = self.balances.get(account, (0, 0))
        return b[0] if asset is AssetKind.PRIME else b[1]

    def to_dict(self) -> dict[str, Any]:
        h = self.holdings
        return {
            "epoch": self.epoch,
            "balances": {str(a): {"prime": str(p), "derivative": str(d)}
                         for a, (p, d) in self.balances.items()},
            "issuance": self.issuance.to_dict(),
            "holders": {
                str(a): {"alienated": str(h.alienated.get(a, 0)), "minted": str(h.minted[a]),
                         "cost_basis": format_decimal(h.cost_basis(a))}
                for a in h.holders()
            },
            "rigs": [r.to_dict() for _, r in sorted(self.rigs.items())],
            "lottery": None if self.lottery is None else {
                "pot": str(self.lottery.pot),
                "next_draw_epoch": self.lottery.next_draw_epoch,
                "draw_history": [{"epoch": e, "winner": w, "payout": str(p)}
                                 for e, w, p in self.lottery.draw_history],
            },
            "proofs": {str(k): v for k, v in self.proofs.items()},
            "forgone_emission": str(self.forgone_emission),
            "cumulative_prime_alienated": str(self.cumulative_prime_alienated),
        }


@dataclass
class MetricsRow:
    epoch: int
    total_derivative_supply: int
    cumulative_prime_alienated: int
    current_ratio: Ratio | None
    pool_emitted: int
    active_rigs: int
    min_cost_basis: Fraction | None
    mean_cost_basis: Fraction | None
    lottery_pot: int
    implied_floor_price: Fraction | None

    def to_strings(self) -> list[str]:
        return [
            str(self.epoch),
            str(self.total_derivative_supply),
            str(self.cumulative_prime_alienated),
            "" if self.current_ratio is None else str(self.current_ratio),
            str(self.pool_emitted),
            str(self.active_rigs),
            format_decimal(self.min_cost_basis),
            format_decimal(self.mean_cost_basis),
            str(self.lottery_pot),
            format_decimal(self.implied_floor_price),
        ]


@dataclass(frozen=True)
class Ask:
    epoch: int
    holder: int
    price: Fraction


@dataclass(frozen=True)
class Violation:
    holder: int
    price: Fraction
    cost_basis: Fraction


@dataclass
class RunResult:
    log: list[Record]
    metrics: list[MetricsRow]
    final: FinalState
    scenario: Scenario
    asks: list[Ask] = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)

    def __iter__(self) -> Iterator[Any]:
        return iter((self.log, self.metrics, self.final))


# -- floor and reservation ------------------------------------------------------

def _holdings(state: FinalState | Holdings) -> Holdings:
    return state.holdings if isinstance(state, FinalState) else state


def floor_price(state: FinalState | Holdings) -> Fraction:
    """Lowest production cost of any held position; no holder sells below it."""
    h = _holdings(state)
    floors = [f for f in (h.position_floor(a) for a in h.holders()) if f is not None]
    if not floors:
        raise NoHolders("no account has received minted tokens")
    return min(floors)


def mean_cost_basis(state: FinalState | Holdings) -> Fraction | None:
    h = _holdings(state)
    holders = h.holders()
    if not holders:
        return None
    return sum((h.cost_basis(a) for a in holders), Fraction(0)) / len(holders)


def reservation_check(state: FinalState | Holdings,
                      asks: Iterable[Ask | tuple[int, Fraction]]) -> list[Violation]:
    """Asks priced below the asker's own cost basis (empty list means none)."""
    h = _holdings(state)
    out = []
    for ask in asks:
        holder, price = (ask.holder, ask.price) if isinstance(ask, Ask) else ask
        basis = h.cost_basis(holder)
        if Fraction(price) < basis:
            out.append(Violation(holder, Fraction(price), basis))
    return out


# -- run ---------------------------------------------------------------------------

class _Runner:
    def __init__(self, scenario: Scenario):
        self.sc = scenario
        self.ledger = Ledger()
        self.proofs = ProofRegistry()
        self.router = Router(self.ledger, scenario.policy)
        self.rigs = RigRegistry(self.ledger, self.proofs, self.router)
        self.state = IssuanceState()
        self.holdings = Holdings()
        self.rng = SplitMix64(scenario.seed)
        self.agents = sorted(scenario.agents, key=lambda a: a.id)
        self.account: dict[int, int] = {}
        self.spent: dict[int, int] = {}
        self.agent_rigs: dict[int, list[int]] = {}
        self.eligible: list[int] = []
        self.round_alienators: set[int] = set()
        self.cum_alienated = 0
        self.metrics: list[MetricsRow] = []
        self.asks: list[Ask] = []
        self.violations: list[Violation] = []
        self._noted_ratio: Ratio | None = None
        self.rig_params = RigParams(scenario.constants.k,
                                    scenario.constants.decay_factor_scaled,
                                    scenario.constants.maintenance_fee)

    # helpers

    def _note_ratio(self) -> None:
        r = self.state.current_ratio
        if r != self._noted_ratio:
            self.ledger.annotate("ratio", ratio=str(r))
            self._noted_ratio = r

    def _budget(self, agent: AgentSpec) -> int:
        # agents only ever alienate out of their initial endowment
        return agent.initial_prime - self.spent[agent.id]

    def _record_alienation(self, agent: AgentSpec, amount: int) -> None:
        acct = self.account[agent.id]
        self.spent[agent.id] += amount
        self.cum_alienated += amount
        self.holdings.add_alienation(acct, amount)
        self.round_alienators.add(acct)

    def _alienate(self, agent: AgentSpec, amount: int):
        L = self.ledger
        acct = self.account[agent.id]
        if self.sc.constants.alienation == "burn":
            ev = L.burn(acct, AssetKind.PRIME, amount)
            proof = self.proofs.new_proof(ProofKind.BURN, acct, amount, L.epoch, event_seq=ev.seq)
            self.proofs.verify_burn(proof, L)
        else:
            ev = L.transfer(acct, DAO_TREASURY, AssetKind.PRIME, amount)
            proof = self.proofs.new_proof(ProofKind.ON_LEDGER, acct, amount, L.epoch,
                                          event_seq=ev.seq)
            self.proofs.verify_onledger(proof, L)
        L.annotate("proof", proof_id=proof.proof_id, kind=proof.kind.value, payer=acct,
                   amount=str(amount), event_seq=ev.seq, status=proof.status.value,
                   reason=proof.reason)
        if proof.status is not ProofStatus.VERIFIED:
            raise RuntimeError(f"engine produced an unverifiable proof: {proof.reason}")
        return proof

    def _consumed(self, agent: AgentSpec, proof, mode: str, minted: int | None = None) -> None:
        acct = self.account[agent.id]
        data = dict(proof_id=proof.proof_id, miner=acct, mode=mode, prime=str(proof.amount))
        if minted is not None:
            data["minted"] = str(minted)
        self.ledger.annotate("consume", **data)
        self._record_alienation(agent, proof.amount)
        if acct not in self.eligible:
            self.eligible.append(acct)

    # phases

    def _act(self, agent: AgentSpec, t: int) -> None:
        s = agent.strategy
        acct = self.account[agent.id]
        if isinstance(s, DepositEveryN):
            if t % s.n or self._budget(agent) < s.amount:
                return
            if preview_mint(s.amount, self.state, self.sc.schedule) < 1:
                return
            proof = self._alienate(agent, s.amount)
            minted, _ = mint_direct(self.ledger, self.proofs, self.router, acct, proof,
                                    self.state, self.sc.schedule)
            self._consumed(agent, proof, "direct", minted)
            self.holdings.add_mint(acct, minted)
            self.holdings.add_direct_lot(acct, proof.amount, minted)
            self._note_ratio()
        elif isinstance(s, (BuyRigOnce, LapseAfter)):
            if t != 0 or self._budget(agent) < s.amount:
                return
            proof = self._alienate(agent, s.amount)
            rig = self.rigs.purchase_rig(acct, proof, self.rig_params, t)
            self._consumed(agent, proof, "rig")
            self.ledger.annotate("rig", **rig.to_dict())
            self.agent_rigs[agent.id].append(rig.rig_id)

    def _maintain(self, agent: AgentSpec, t: int) -> None:
        s = agent.strategy
        if isinstance(s, LapseAfter) and t >= s.epochs:
            return
        acct = self.account[agent.id]
        for rig_id in self.agent_rigs[agent.id]:
            rig = self.rigs.rigs[rig_id]
            fee = rig.maintenance_fee
            while fee and rig.paid_through_epoch < t and self._budget(agent) >= fee:
                self.rigs.pay_maintenance(acct, rig_id, t)
                self._record_alienation(agent, fee)
                self.ledger.annotate("maintenance", rig_id=rig_id, owner=acct, fee=str(fee),
                                     paid_through=rig.paid_through_epoch)

    def _tick(self, t: int) -> int:
        emission = self.sc.emission
        shares = self.rigs.tick_epoch(t, emission)
        for rig_id, status in self.rigs.transitions:
            self.ledger.annotate("rig_status", rig_id=rig_id, status=status.value)
        emitted = 0
        for owner, share in shares:
            self.holdings.add_mint(owner, share)
            emitted += share
        self.ledger.annotate("emission", pool=str(emission.pool(t)), emitted=str(emitted))
        return emitted

    def _draw(self, t: int) -> None:
        if self.sc.constants.forbid_self_benefit:
            eligible = [a for a in self.eligible if a not in self.round_alienators]
        else:
            eligible = list(self.eligible)
        winner, payout = self.router.run_draw(eligible, t, self.sc.seed)
        self.ledger.annotate("draw", winner=winner, payout=str(payout),
                             eligible=len(eligible),
                             next_draw_epoch=self.router.lottery.next_draw_epoch)
        self.round_alienators.clear()

    def _post_asks(self, t: int) -> None:
        new = []
        for agent in self.agents:
            acct = self.account[agent.id]
            if not agent.reservation_pricing or not self.holdings.minted.get(acct):
                continue
            if not self.ledger.balance(acct, AssetKind.DERIVATIVE):
                continue
            markup = self.rng.below(1001)  # per mille over own basis
            price = ceil_to_grid(self.holdings.cost_basis(acct) * Fraction(1000 + markup, 1000))
            ask = Ask(t, acct, price)
            new.append(ask)
            self.ledger.annotate("ask", holder=acct, price=format_decimal(price))
        self.asks.extend(new)
        self.violations.extend(reservation_check(self.holdings, new))

    def _metrics(self, t: int, emitted: int) -> None:
        holders = self.holdings.holders()
        floor = floor_price(self.holdings) if holders else None
        self.metrics.append(MetricsRow(
            epoch=t,
            total_derivative_supply=self.ledger.supply(AssetKind.DERIVATIVE),
            cumulative_prime_alienated=self.cum_alienated,
            current_ratio=None if self.sc.mode == "rigs" else self.state.current_ratio,
            pool_emitted=emitted,
            active_rigs=len(self.rigs.active_rigs()),
            min_cost_basis=floor,
            mean_cost_basis=mean_cost_basis(self.holdings),
            lottery_pot=self.ledger.balance(LOTTERY_POT, AssetKind.PRIME),
            implied_floor_price=floor,
        ))

    def _epoch(self, t: int) -> None:
        L = self.ledger
        L.epoch = t
        self.state.epoch = t
        L.annotate("epoch")
        adjust_ratio(self.state, self.sc.schedule)
        self._note_ratio()
        for agent in self.agents:
            self._act(agent, t)
        for agent in self.agents:
            self._maintain(agent, t)
        emitted = self._tick(t) if self.sc.mode != "direct" else 0
        if isinstance(self.sc.policy, LotteryPot) and t == self.router.lottery.next_draw_epoch:
            self._draw(t)
        adjust_ratio(self.state, self.sc.schedule)
        self._note_ratio()
        self._post_asks(t)
        self._metrics(t, emitted)

    def run(self) -> RunResult:
        L = self.ledger
        for agent in self.agents:
            self.account[agent.id] = L.open_account()
            self.spent[agent.id] = 0
            self.agent_rigs[agent.id] = []
        for _ in self.sc.beneficiaries:
            L.open_account()
        lottery = self.router.lottery if isinstance(self.sc.policy, LotteryPot) else None
        L.annotate("setup", agents={str(a.id): self.account[a.id] for a in self.agents},
                   lottery_next_draw=None if lottery is None else lottery.next_draw_epoch)
        for agent in self.agents:
            if agent.initial_prime:
                L.external_deposit(self.account[agent.id], AssetKind.PRIME, agent.initial_prime)
        for t in range(self.sc.epochs):
            self._epoch(t)
        return RunResult(list(L.records), self.metrics, self._final(), self.sc,
                         self.asks, self.violations)

    def _final(self) -> FinalState:
        return FinalState(
            epoch=self.sc.epochs - 1,
            balances=self.ledger.snapshot(),
            issuance=copy.deepcopy(self.state),
            holdings=copy.deepcopy(self.holdings),
            rigs={i: copy.copy(r) for i, r in sorted(self.rigs.rigs.items())},
            lottery=self.router.lottery if isinstance(self.sc.policy, LotteryPot) else None,
            proofs={i: p.status.value for i, p in sorted(self.proofs.proofs.items())},
            forgone_emission=self.rigs.forgone,
            cumulative_prime_alienated=self.cum_alienated,
        )


def run(scenario: Scenario) -> RunResult:
    """Run ``scenario`` to completion. Same scenario and seed, same bytes out."""
    return _Runner(scenario).run()


# -- replay ------------------------------------------------------------------------

def replay(log: Iterable[Record]) -> FinalState:
    """Rebuild the final state of a run from its record log alone.

    Raises :class:`CorruptLog` at the first sequence gap or impossible event.
    """
    fs = FinalState()
    bal: dict[int, list[int]] = {}
    h = fs.holdings
    iss = fs.issuance
    expected = 0
    for rec in log:
        if rec.seq != expected:
            raise CorruptLog(expected, f"expected seq {expected}, found {rec.seq}")
        expected += 1
        if isinstance(rec, TransferEvent):
            _replay_transfer(rec, bal, h)
            continue
        d = rec.data
        note = rec.note
        try:
            if note == "epoch":
                fs.epoch = iss.epoch = rec.epoch
            elif note == "setup":
                nd = d.get("lottery_next_draw")
                if nd is not None:
                    fs.lottery = LotteryState(0, nd, ())
            elif note == "ratio":
                iss.current_ratio = Ratio.parse(d["ratio"])
            elif note == "proof":
                fs.proofs[d["proof_id"]] = d["status"]
            elif note == "consume":
                if fs.proofs.get(d["proof_id"]) != ProofStatus.VERIFIED.value:
                    raise CorruptLog(rec.seq, f"proof {d['proof_id']} consumed without verification")
                fs.proofs[d["proof_id"]] = ProofStatus.CONSUMED.value
                miner, prime = d["miner"], int(d["prime"])
                h.add_alienation(miner, prime)
                fs.cumulative_prime_alienated += prime
                if d["mode"] == "direct":
                    minted = int(d["minted"])
                    h.add_direct_lot(miner, prime, minted)
                    iss.cumulative_prime_in += prime
                    iss.cumulative_derivative_out += minted
                    if miner not in iss.minted_to:
                        iss.miner_count += 1
                        iss.minted_to[miner] = 0
                        iss.alienated_by[miner] = 0
                    iss.minted_to[miner] += minted
                    iss.alienated_by[miner] += prime
            elif note == "rig":
                rig = Rig.from_dict(d)
                fs.rigs[rig.rig_id] = rig
            elif note == "maintenance":
                fee = int(d["fee"])
                h.add_alienation(d["owner"], fee)
                fs.cumulative_prime_alienated += fee
                fs.rigs[d["rig_id"]].paid_through_epoch = d["paid_through"]
            elif note == "rig_status":
                fs.rigs[d["rig_id"]].status = RigStatus(d["status"])
            elif note == "emission":
                fs.forgone_emission += int(d["pool"]) - int(d["emitted"])
            elif note == "draw":
                if fs.lottery is None:
                    raise CorruptLog(rec.seq, "draw without a lottery")
                hist = fs.lottery.draw_history + ((rec.epoch, d["winner"], int(d["payout"])),)
                fs.lottery = LotteryState(0, d["next_draw_epoch"], hist)
            elif note == "ask":
                pass
            else:
                raise CorruptLog(rec.seq, f"unknown annotation {note!r}")
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptLog(rec.seq, f"malformed {note} annotation: {exc}") from None
    if fs.lottery is not None:
        pot = bal.get(LOTTERY_POT, [0, 0])[0]
        fs.lottery = LotteryState(pot, fs.lottery.next_draw_epoch, fs.lottery.draw_history)
    fs.balances = {a: (b[0], b[1]) for a, b in sorted(bal.items()) if b[0] or b[1]}
    return fs


def _replay_transfer(ev: TransferEvent, bal: dict[int, list[int]], h: Holdings) -> None:
    if ev.amount <= 0:
        raise CorruptLog(ev.seq, "non-positive amount")
    i = 0 if ev.asset is AssetKind.PRIME else 1
    creates = ev.kind in (EventKind.MINT, EventKind.EXTERNAL_DEPOSIT)
    if creates != (ev.from_ is None):
        raise CorruptLog(ev.seq, f"{ev.kind.value} event with from={ev.from_}")
    if ev.kind is EventKind.MINT and ev.asset is not AssetKind.DERIVATIVE:
        raise CorruptLog(ev.seq, "mint of a non-Derivative asset")
    if ev.from_ is not None:
        if ev.from_ == BURN_ACCOUNT:
            raise CorruptLog(ev.seq, "debit from the burn account")
        src = bal.setdefault(ev.from_, [0, 0])
        if src[i] < ev.amount:
            raise CorruptLog(ev.seq, f"account {ev.from_} would go negative")
        src[i] -= ev.amount
    bal.setdefault(ev.to, [0, 0])[i] += ev.amount
    if ev.kind is EventKind.MINT:
        h.add_mint(ev.to, ev.amount)


# -- reporting helpers -------------------------------------------------------------

def policy_balances(result: RunResult) -> dict[str, Any]:
    """Where all alienated Prime ended up, by destination."""
    fs = result.final
    sc = result.scenario
    payouts = sum(p for _, _, p in fs.lottery.draw_history) if fs.lottery else 0
    out: dict[str, Any] = {
        "charity": str(fs.balance(CHARITY_SINK)),
        "fund": str(fs.balance(FUND_ACCOUNT)),
        "burn": str(fs.balance(BURN_ACCOUNT)),
        "lottery_pot": str(fs.balance(LOTTERY_POT)),
        "lottery_payouts": str(payouts),
        "treasury": str(fs.balance(DAO_TREASURY)),
    }
    if isinstance(sc.policy, BudgetSplit):
        budget = {}
        base = len(sc.agents) + 5
        for acct in policy_targets(sc.policy):
            name = sc.beneficiaries[acct - base] if acct >= base else str(acct)
            budget[name] = str(fs.balance(acct))
        out["budget"] = budget
    return out


def destination_total(result: RunResult) -> int:
    """Sum of every beneficiary balance, burn, pot and lottery payouts."""
    fs = result.final
    sc = result.scenario
    accounts = {CHARITY_SINK, FUND_ACCOUNT, BURN_ACCOUNT, LOTTERY_POT}
    if isinstance(sc.policy, BudgetSplit):
        accounts.update(policy_targets(sc.policy))
    payouts = sum(p for _, _, p in fs.lottery.draw_history) if fs.lottery else 0
    return sum(fs.balance(a) for a in accounts) + payouts


def summary(result: RunResult) -> dict[str, Any]:
    fs = result.final
    try:
        floor = format_decimal(floor_price(fs))
    except NoHolders:
        floor = None
    return {
        "scenario": scenario_to_dict(result.scenario),
        "final_state": fs.to_dict(),
        "floor_price": floor,
        "totals": {
            "derivative_supply": str(sum(b[1] for b in fs.balances.values())),
            "cumulative_prime_alienated": str(fs.cumulative_prime_alienated),
            "routed_or_burned": str(destination_total(result)),
            "forgone_emission": str(fs.forgone_emission),
            "epochs": result.scenario.epochs,
            "epoch_minutes": result.scenario.constants.epoch_minutes,
            "asks": len(result.asks),
            "reservation_violations": len(result.violations),
        },
        "policy_balances": policy_balances(result),
    }


def metrics_field_names() -> list[str]:
    return [f.name for f in fields(MetricsRow)]
