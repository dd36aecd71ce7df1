"""Where alienated Prime Assets go once the treasury has received them.

Four policies are supported: a charity sink, an accumulating fund, a
weighted budget split, and a lottery pot that is periodically paid out in full
to one past depositor. Outside the lottery, routed value must never return to
the account that alienated it.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Sequence, Union

from .apportion import largest_remainder
from .errors import InvalidAmount, InvalidPolicy, ValueLoop, WrongEpoch
from .ledger import (BURN_ACCOUNT, CHARITY_SINK, DAO_TREASURY, FUND_ACCOUNT, LOTTERY_POT,
                     AssetKind, EventKind, Ledger, TransferEvent)
from .prng import MASK64, splitmix64
from .verification import AlienationProof, ProofKind


@dataclass(frozen=True)
class CharitySink:
    kind = "charity_sink"


@dataclass(frozen=True)
class FundAccumulate:
    kind = "fund_accumulate"


@dataclass(frozen=True)
class BudgetSplit:
    weights: tuple[tuple[int, Fraction], ...]
    kind = "budget_split"

    def __post_init__(self):
        if not self.weights:
            raise InvalidPolicy("budget split needs at least one target")
        accounts = [a for a, _ in self.weights]
        if len(set(accounts)) != len(accounts):
            raise InvalidPolicy("budget split targets must be distinct")
        if any(a in (DAO_TREASURY, BURN_ACCOUNT) for a in accounts):
            raise InvalidPolicy("budget split cannot target the treasury or burn account")
        if any(w <= 0 for _, w in self.weights):
            raise InvalidPolicy("budget split weights must be positive")
        if sum((w for _, w in self.weights), Fraction(0)) != 1:
            raise InvalidPolicy("budget split weights must sum to exactly 1")


@dataclass(frozen=True)
class LotteryPot:
    draw_interval_epochs: int
    kind = "lottery_pot"

    def __post_init__(self):
        if not isinstance(self.draw_interval_epochs, int) or self.draw_interval_epochs < 1:
            raise InvalidPolicy("draw_interval_epochs must be an integer >= 1")


RoutePolicy = Union[CharitySink, FundAccumulate, BudgetSplit, LotteryPot]


@dataclass(frozen=True)
class LotteryState:
    pot: int = 0
    next_draw_epoch: int = 1
    draw_history: tuple[tuple[int, int | None, int], ...] = ()


def policy_targets(policy: RoutePolicy) -> list[int]:
    if isinstance(policy, CharitySink):
        return [CHARITY_SINK]
    if isinstance(policy, FundAccumulate):
        return [FUND_ACCOUNT]
    if isinstance(policy, BudgetSplit):
        return sorted(a for a, _ in policy.weights)
    if isinstance(policy, LotteryPot):
        return [LOTTERY_POT]
    raise InvalidPolicy(f"unknown policy {policy!r}")


def route(ledger: Ledger, amount: int, source_miner: int | None,
          policy: RoutePolicy) -> list[TransferEvent]:
    """Move ``amount`` Prime out of the treasury according to ``policy``."""
    if not isinstance(amount, int) or amount <= 0:
        raise InvalidAmount(f"route amount must be positive, got {amount!r}")
    if isinstance(policy, (CharitySink, FundAccumulate, LotteryPot)):
        target = policy_targets(policy)[0]
        return [ledger.transfer(DAO_TREASURY, target, AssetKind.PRIME, amount, EventKind.ROUTE)]
    if isinstance(policy, BudgetSplit):
        targets = sorted(policy.weights)
        if source_miner is not None and any(a == source_miner for a, _ in targets):
            raise ValueLoop(f"budget split would route value back to miner {source_miner}")
        shares = largest_remainder(amount, [w for _, w in targets])
        return [ledger.transfer(DAO_TREASURY, a, AssetKind.PRIME, s, EventKind.ROUTE)
                for (a, _), s in zip(targets, shares) if s]
    raise InvalidPolicy(f"unknown policy {policy!r}")


def lottery_index(seed: int, epoch: int, n: int) -> int:
    return splitmix64((seed ^ epoch) & MASK64) % n


def draw_lottery(state: LotteryState, eligible: Sequence[int], epoch: int, seed: int,
                 interval: int) -> tuple[int | None, int, LotteryState]:
    """Pick a winner for the scheduled draw at ``epoch``.

    With no eligible accounts the pot carries over and the schedule still
    advances. Pure: paying the winner is the caller's job.
    """
    if epoch != state.next_draw_epoch:
        raise WrongEpoch(f"draw scheduled for epoch {state.next_draw_epoch}, not {epoch}")
    nxt = state.next_draw_epoch + interval
    if not eligible:
        hist = state.draw_history + ((epoch, None, 0),)
        return None, 0, replace(state, next_draw_epoch=nxt, draw_history=hist)
    winner = eligible[lottery_index(seed, epoch, len(eligible))]
    payout = state.pot
    hist = state.draw_history + ((epoch, winner, payout),)
    return winner, payout, LotteryState(0, nxt, hist)


@dataclass
class Router:
    """Routes alienations for one ledger under one policy, tracking the lottery pot."""

    ledger: Ledger
    policy: RoutePolicy
    lottery: LotteryState = field(default_factory=LotteryState)
    routed_total: int = 0

    def __post_init__(self):
        if isinstance(self.policy, LotteryPot) and self.lottery == LotteryState():
            self.lottery = LotteryState(0, self.policy.draw_interval_epochs, ())

    def route(self, amount: int, source_miner: int | None) -> list[TransferEvent]:
        events = route(self.ledger, amount, source_miner, self.policy)
        if isinstance(self.policy, LotteryPot):
            self.lottery = replace(self.lottery, pot=self.lottery.pot + amount)
        self.routed_total += amount
        return events

    def settle(self, proof: AlienationProof, miner: int | None) -> list[TransferEvent]:
        """Bring a proof's Prime into the treasury if needed and route it.

        Burned value is already in the burn account and is left there.
        """
        if proof.kind is ProofKind.BURN:
            return []
        events = []
        if proof.kind is ProofKind.FIAT_RECORD:
            events.append(self.ledger.external_deposit(DAO_TREASURY, AssetKind.PRIME, proof.amount))
        events.extend(self.route(proof.amount, miner))
        return events

    def check_no_loop(self, miner: int) -> None:
        if isinstance(self.policy, BudgetSplit) and any(a == miner for a, _ in self.policy.weights):
            raise ValueLoop(f"budget split would route value back to miner {miner}")

    def run_draw(self, eligible: Sequence[int], epoch: int, seed: int) -> tuple[int | None, int]:
        if not isinstance(self.policy, LotteryPot):
            raise InvalidPolicy("no lottery under this policy")
        winner, payout, self.lottery = draw_lottery(
            self.lottery, eligible, epoch, seed, self.policy.draw_interval_epochs)
        if winner is not None and payout:
            self.ledger.transfer(LOTTERY_POT, winner, AssetKind.PRIME, payout,
                                 EventKind.LOTTERY_PAYOUT)
        return winner, payout


# -- serialization ------------------------------------------------------------

def policy_to_dict(policy: RoutePolicy) -> dict[str, Any]:
    if isinstance(policy, BudgetSplit):
        return {"kind": policy.kind,
                "weights": [{"account": a, "weight": str(w)} for a, w in policy.weights]}
    if isinstance(policy, LotteryPot):
        return {"kind": policy.kind, "draw_interval_epochs": policy.draw_interval_epochs}
    return {"kind": policy.kind}


def policy_from_dict(d: dict[str, Any]) -> RoutePolicy:
    kind = d.get("kind")
    if kind == "charity_sink":
        return CharitySink()
    if kind == "fund_accumulate":
        return FundAccumulate()
    if kind == "budget_split":
        try:
            weights = tuple((int(w["account"]), Fraction(str(w["weight"])))
                            for w in d["weights"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise InvalidPolicy(f"bad budget split weights: {exc}") from None
        return BudgetSplit(weights)
    if kind == "lottery_pot":
        return LotteryPot(d.get("draw_interval_epochs", 0))
    raise InvalidPolicy(f"unknown policy kind {kind!r}")
