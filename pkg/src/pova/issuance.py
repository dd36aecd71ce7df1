"""Direct issuance: Derivative Tokens minted against verified alienation.

The mint ratio is a fixed-point number with nine fractional digits. Each
schedule maps the public counters (epoch, cumulative Prime influx, distinct
miners) to a ratio that never increases, rounded half-even onto the 1e-9
grid. Minting always uses the frozen ratio held in :class:`IssuanceState`,
so the arithmetic inside an epoch is exact integer math.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Any, Union

from .errors import NoMints, ProofAlreadyConsumed, ProofNotVerified, ScheduleError, ZeroMint
from .ledger import Ledger, TransferEvent
from .routing import Router
from .verification import AlienationProof, ProofRegistry, ProofStatus

RATIO_SCALE = 10**9
# 2**64 - 1 minor units at ratio <= 2**64 / 1e9 keeps products within 128 bits
MAX_RATIO_SCALED = 2**64 - 1


@dataclass(frozen=True, order=True)
class Ratio:
    """Derivative units per Prime unit, stored as ``scaled / 10**9``."""

    scaled: int

    def __post_init__(self):
        if not isinstance(self.scaled, int) or not 0 <= self.scaled <= MAX_RATIO_SCALED:
            raise ScheduleError(f"ratio out of range: {self.scaled!r}")

    @classmethod
    def parse(cls, text: str | int | float | Decimal) -> Ratio:
        """Parse a decimal string with at most nine fractional digits."""
        try:
            d = Decimal(str(text))
        except InvalidOperation:
            raise ScheduleError(f"not a decimal ratio: {text!r}") from None
        if not d.is_finite():
            raise ScheduleError(f"not a finite ratio: {text!r}")
        scaled = d * RATIO_SCALE
        if scaled != scaled.to_integral_value():
            raise ScheduleError(f"ratio {text!r} has more than 9 fractional digits")
        return cls(int(scaled))

    @classmethod
    def from_fraction(cls, value: Fraction) -> Ratio:
        """Round an exact value half-even onto the fixed-point grid."""
        return cls(round(value * RATIO_SCALE))

    def as_fraction(self) -> Fraction:
        return Fraction(self.scaled, RATIO_SCALE)

    def __float__(self) -> float:
        return self.scaled / RATIO_SCALE

    def __str__(self) -> str:
        whole, frac = divmod(self.scaled, RATIO_SCALE)
        return f"{whole}.{frac:09d}"

    def apply(self, amount: int) -> int:
        """floor(amount * ratio)"""
        return amount * self.scaled // RATIO_SCALE


def _positive_ratio(name: str, r: Ratio) -> None:
    if not isinstance(r, Ratio) or r.scaled <= 0:
        raise ScheduleError(f"{name} must be a positive ratio")


def _positive_int(name: str, v: Any) -> None:
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise ScheduleError(f"{name} must be an integer >= 1, got {v!r}")


@dataclass
class IssuanceState:
    epoch: int = 0
    cumulative_prime_in: int = 0
    cumulative_derivative_out: int = 0
    miner_count: int = 0
    current_ratio: Ratio | None = None
    # per-miner totals behind cost_basis
    alienated_by: dict[int, int] = field(default_factory=dict)
    minted_to: dict[int, int] = field(default_factory=dict)

    @classmethod
    def initial(cls, schedule: IssuanceSchedule) -> IssuanceState:
        return adjust_ratio(cls(), schedule)

    def to_dict(self) -> dict[str, Any]:
        return {
            "epoch": self.epoch,
            "cumulative_prime_in": str(self.cumulative_prime_in),
            "cumulative_derivative_out": str(self.cumulative_derivative_out),
            "miner_count": self.miner_count,
            "current_ratio": None if self.current_ratio is None else str(self.current_ratio),
        }


# -- schedules -----------------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    r0: Ratio
    kind = "constant"

    def __post_init__(self):
        _positive_ratio("r0", self.r0)

    def ratio(self, state: IssuanceState) -> Ratio:
        return self.r0


@dataclass(frozen=True)
class Halving:
    """PoW analogue: the ratio halves every ``interval_epochs`` epochs."""

    r0: Ratio
    interval_epochs: int = 2016
    kind = "halving"

    def __post_init__(self):
        _positive_ratio("r0", self.r0)
        _positive_int("interval_epochs", self.interval_epochs)

    def ratio(self, state: IssuanceState) -> Ratio:
        halvings = state.epoch // self.interval_epochs
        if halvings > self.r0.scaled.bit_length() + 1:
            return Ratio(0)
        return Ratio.from_fraction(Fraction(self.r0.scaled, RATIO_SCALE << halvings))


@dataclass(frozen=True)
class LogCost:
    """ratio(s) = 1 / (a + b*ln(1 + s/s0)) with s the cumulative Prime influx.

    Evaluated in binary64 and then rounded half-even to the 1e-9 grid.
    """

    a: float
    b: float
    s0: int
    kind = "log_cost"

    def __post_init__(self):
        if not (isinstance(self.a, (int, float)) and math.isfinite(self.a) and self.a > 0):
            raise ScheduleError(f"a must be a positive real, got {self.a!r}")
        if not (isinstance(self.b, (int, float)) and math.isfinite(self.b) and self.b >= 0):
            raise ScheduleError(f"b must be a non-negative real, got {self.b!r}")
        _positive_int("s0", self.s0)
        if 1.0 / float(self.a) * RATIO_SCALE > MAX_RATIO_SCALED:
            raise ScheduleError("a is too small: initial ratio out of range")

    def ratio(self, state: IssuanceState) -> Ratio:
        s = state.cumulative_prime_in
        x = 1.0 / (float(self.a) + float(self.b) * math.log1p(s / self.s0))
        return Ratio.from_fraction(Fraction(x))


@dataclass(frozen=True)
class ParticipantScaled:
    """ratio(m) = r0 / max(1, m), m = distinct miners who have minted."""

    r0: Ratio
    kind = "participant_scaled"

    def __post_init__(self):
        _positive_ratio("r0", self.r0)

    def ratio(self, state: IssuanceState) -> Ratio:
        return Ratio.from_fraction(Fraction(self.r0.scaled, RATIO_SCALE * max(1, state.miner_count)))


@dataclass(frozen=True)
class InfluxScaled:
    """ratio(s) = r0 * s_ref / (s_ref + s)."""

    r0: Ratio
    s_ref: int
    kind = "influx_scaled"

    def __post_init__(self):
        _positive_ratio("r0", self.r0)
        _positive_int("s_ref", self.s_ref)

    def ratio(self, state: IssuanceState) -> Ratio:
        s = state.cumulative_prime_in
        return Ratio.from_fraction(
            Fraction(self.r0.scaled * self.s_ref, RATIO_SCALE * (self.s_ref + s)))


IssuanceSchedule = Union[Constant, Halving, LogCost, ParticipantScaled, InfluxScaled]


def schedule_to_dict(schedule: IssuanceSchedule) -> dict[str, Any]:
    if isinstance(schedule, Constant):
        return {"kind": "constant", "r0": str(schedule.r0)}
    if isinstance(schedule, Halving):
        return {"kind": "halving", "r0": str(schedule.r0),
                "interval_epochs": schedule.interval_epochs}
    if isinstance(schedule, LogCost):
        return {"kind": "log_cost", "a": schedule.a, "b": schedule.b, "s0": schedule.s0}
    if isinstance(schedule, ParticipantScaled):
        return {"kind": "participant_scaled", "r0": str(schedule.r0)}
    if isinstance(schedule, InfluxScaled):
        return {"kind": "influx_scaled", "r0": str(schedule.r0), "s_ref": schedule.s_ref}
    raise ScheduleError(f"unknown schedule {schedule!r}")


def _real(d: dict, key: str) -> float:
    v = d.get(key)
    if isinstance(v, str):
        try:
            return float(v)
        except ValueError:
            raise ScheduleError(f"{key} is not a number: {v!r}") from None
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return float(v)
    raise ScheduleError(f"{key} must be a number, got {v!r}")


def schedule_from_dict(d: dict[str, Any]) -> IssuanceSchedule:
    kind = d.get("kind")
    r0 = Ratio.parse(d["r0"]) if "r0" in d else None
    if kind in ("constant", "halving", "participant_scaled", "influx_scaled") and r0 is None:
        raise ScheduleError(f"{kind} schedule needs r0")
    if kind == "constant":
        return Constant(r0)
    if kind == "halving":
        return Halving(r0, d.get("interval_epochs", 2016))
    if kind == "log_cost":
        return LogCost(_real(d, "a"), _real(d, "b"), d.get("s0"))
    if kind == "participant_scaled":
        return ParticipantScaled(r0)
    if kind == "influx_scaled":
        return InfluxScaled(r0, d.get("s_ref"))
    raise ScheduleError(f"unknown schedule kind {kind!r}")


# -- operations ----------------------------------------------------------------

def current_ratio(state: IssuanceState, schedule: IssuanceSchedule) -> Ratio:
    return schedule.ratio(state)


def adjust_ratio(state: IssuanceState, schedule: IssuanceSchedule) -> IssuanceState:
    """Re-evaluate the schedule at the state's counters; the ratio never rises."""
    new = schedule.ratio(state)
    if state.current_ratio is None or new < state.current_ratio:
        state.current_ratio = new
    return state


def preview_mint(amount: int, state: IssuanceState, schedule: IssuanceSchedule) -> int:
    """What a deposit of ``amount`` would mint right now."""
    if state.current_ratio is None:
        adjust_ratio(state, schedule)
    return state.current_ratio.apply(amount)


def mint_direct(ledger: Ledger, registry: ProofRegistry, router: Router, miner: int,
                proof: AlienationProof, state: IssuanceState,
                schedule: IssuanceSchedule) -> tuple[int, list[TransferEvent]]:
    """Mint against one verified proof and route the alienated Prime.

    Minted amount is ``floor(proof.amount * ratio)``; the remainder is not
    banked. A deposit too small to mint a single unit is refused before
    anything is routed or consumed.
    """
    if not registry.is_registered(proof):
        raise ProofNotVerified(f"proof {proof.proof_id} is not registered")
    if proof.status is ProofStatus.CONSUMED:
        raise ProofAlreadyConsumed(f"proof {proof.proof_id} already consumed")
    if proof.status is not ProofStatus.VERIFIED:
        raise ProofNotVerified(f"proof {proof.proof_id} is {proof.status.value}")
    minted = preview_mint(proof.amount, state, schedule)
    if minted <= 0:
        raise ZeroMint(f"deposit of {proof.amount} mints nothing at ratio {state.current_ratio}")
    router.check_no_loop(miner)

    events = [ledger.mint(miner, minted)]
    events.extend(router.settle(proof, miner))
    registry.consume(proof)

    state.cumulative_prime_in += proof.amount
    state.cumulative_derivative_out += minted
    if miner not in state.minted_to:
        state.miner_count += 1
        state.minted_to[miner] = 0
        state.alienated_by[miner] = 0
    state.minted_to[miner] += minted
    state.alienated_by[miner] += proof.amount
    adjust_ratio(state, schedule)
    return minted, events


def cost_basis(miner: int, state: IssuanceState) -> Fraction:
    """Prime alienated per Derivative minted for ``miner``, exactly."""
    minted = state.minted_to.get(miner, 0)
    if not minted:
        raise NoMints(f"miner {miner} has no direct mints")
    return Fraction(state.alienated_by[miner], minted)
