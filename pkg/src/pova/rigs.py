"""Virtual mining: rigs bought with alienated Prime share a per-epoch pool.

Each epoch the pool ``e0 >> (epoch // halving_interval)`` is split among
active rigs in proportion to their effective hashpower, using largest-remainder
apportionment so shares sum exactly to the pool. A pool with no active rig is
forgone, like an unmined block. Rigs with a maintenance fee lapse at the tick
of any epoch they have not paid for.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

from .apportion import largest_remainder
from .errors import (EpochOutOfOrder, InsufficientFunds, NotOwner, ProofAlreadyConsumed,
                     ProofNotVerified, UnknownRig)
from .ledger import DAO_TREASURY, AssetKind, EventKind, Ledger, TransferEvent
from .routing import Router
from .verification import AlienationProof, ProofRegistry, ProofStatus

DECAY_SCALE = 10**9


class RigStatus(str, enum.Enum):
    ACTIVE = "Active"
    LAPSED = "Lapsed"


@dataclass
class Rig:
    rig_id: int
    owner: int
    hashpower0: int
    decay_factor_scaled: int
    maintenance_fee: int
    status: RigStatus
    purchased_epoch: int
    paid_through_epoch: int
    # hashpower * 1e9 by age, filled lazily
    _trail: list[int] = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        if self.hashpower0 <= 0:
            raise ValueError("hashpower0 must be positive")
        if not 0 < self.decay_factor_scaled <= DECAY_SCALE:
            raise ValueError("decay factor must be in (0, 1]")
        if self.maintenance_fee < 0:
            raise ValueError("maintenance fee must be non-negative")

    def to_dict(self) -> dict[str, Any]:
        return {
            "rig_id": self.rig_id,
            "owner": self.owner,
            "hashpower0": self.hashpower0,
            "decay_factor_scaled": self.decay_factor_scaled,
            "maintenance_fee": str(self.maintenance_fee),
            "status": self.status.value,
            "purchased_epoch": self.purchased_epoch,
            "paid_through_epoch": self.paid_through_epoch,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Rig:
        return cls(int(d["rig_id"]), int(d["owner"]), int(d["hashpower0"]),
                   int(d["decay_factor_scaled"]), int(d["maintenance_fee"]),
                   RigStatus(d["status"]), int(d["purchased_epoch"]),
                   int(d["paid_through_epoch"]))


@dataclass(frozen=True)
class RigParams:
    k: int = 1
    decay_factor_scaled: int = DECAY_SCALE
    maintenance_fee: int = 0

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError("k must be an integer >= 1")
        if not 0 < self.decay_factor_scaled <= DECAY_SCALE:
            raise ValueError("decay_factor_scaled must be in (0, 1e9]")
        if self.maintenance_fee < 0:
            raise ValueError("maintenance_fee must be non-negative")


@dataclass(frozen=True)
class EmissionSchedule:
    e0: int
    halving_interval: int | None = None  # None means never halve

    def __post_init__(self):
        if not isinstance(self.e0, int) or self.e0 <= 0:
            raise ValueError("e0 must be a positive integer")
        if self.halving_interval is not None and (
                not isinstance(self.halving_interval, int) or self.halving_interval < 1):
            raise ValueError("halving_interval must be an integer >= 1 or None")

    def pool(self, epoch: int) -> int:
        if self.halving_interval is None:
            return self.e0
        return self.e0 >> (epoch // self.halving_interval)

    def to_dict(self) -> dict[str, Any]:
        return {"e0": str(self.e0), "halving_interval": self.halving_interval}


def effective_hashpower(rig: Rig, epoch: int) -> int:
    """floor(hashpower0 * decay**age) by iterated fixed-point products; 0 if lapsed."""
    if rig.status is RigStatus.LAPSED:
        return 0
    if rig.decay_factor_scaled == DECAY_SCALE and epoch >= rig.purchased_epoch:
        return rig.hashpower0
    age = epoch - rig.purchased_epoch
    if age < 0:
        raise ValueError(f"rig {rig.rig_id} was bought after epoch {epoch}")
    d = rig.decay_factor_scaled
    trail = rig._trail
    if not trail:
        trail.append(rig.hashpower0 * DECAY_SCALE)
    while len(trail) <= age:
        last = trail[-1]
        if last == 0:
            return 0
        trail.append(last * d // DECAY_SCALE)
    return trail[age] // DECAY_SCALE


def _spent(rig: Rig) -> bool:
    """True once a decaying rig's hashpower has floored to zero for good."""
    return bool(rig._trail) and rig._trail[-1] == 0


class RigRegistry:
    """All rigs of one run plus their emission bookkeeping."""

    def __init__(self, ledger: Ledger, proofs: ProofRegistry, router: Router):
        self.ledger = ledger
        self.proofs = proofs
        self.router = router
        self.rigs: dict[int, Rig] = {}  # insertion order is rig-id order
        self._fee_rigs: list[Rig] = []
        # active rigs that can still earn, in rig-id order
        self._earning: dict[int, Rig] = {}
        self._earning_dirty = True
        self._seen = 0
        self.next_rig_id = 0
        self.last_tick: int | None = None
        self.forgone = 0
        self.emitted = 0
        self.transitions: list[tuple[int, RigStatus]] = []

    def _get(self, rig_id: int) -> Rig:
        try:
            return self.rigs[rig_id]
        except KeyError:
            raise UnknownRig(f"no rig {rig_id}") from None

    def purchase_rig(self, miner: int, proof: AlienationProof, params: RigParams,
                     epoch: int | None = None) -> Rig:
        if not self.proofs.is_registered(proof):
            raise ProofNotVerified(f"proof {proof.proof_id} is not registered")
        if proof.status is ProofStatus.CONSUMED:
            raise ProofAlreadyConsumed(f"proof {proof.proof_id} already consumed")
        if proof.status is not ProofStatus.VERIFIED:
            raise ProofNotVerified(f"proof {proof.proof_id} is {proof.status.value}")
        self.router.check_no_loop(miner)
        epoch = self.ledger.epoch if epoch is None else epoch
        if self.last_tick is not None and epoch <= self.last_tick:
            raise EpochOutOfOrder(f"epoch {epoch} has already been ticked")
        rig = Rig(
            rig_id=self.next_rig_id,
            owner=miner,
            hashpower0=proof.amount * params.k,
            decay_factor_scaled=params.decay_factor_scaled,
            maintenance_fee=params.maintenance_fee,
            status=RigStatus.ACTIVE,
            purchased_epoch=epoch,
            paid_through_epoch=epoch - 1,
        )
        self.router.settle(proof, miner)
        self.proofs.consume(proof)
        self.rigs[rig.rig_id] = rig
        if rig.maintenance_fee:
            self._fee_rigs.append(rig)
        self.next_rig_id += 1
        return rig

    def pay_maintenance(self, miner: int, rig_id: int, epoch: int | None = None) -> TransferEvent | None:
        """Pay one epoch of upkeep; the fee is alienated and routed like a deposit.

        Returns ``None`` for fee-free rigs, which never lapse.
        """
        rig = self._get(rig_id)
        if rig.owner != miner:
            raise NotOwner(f"rig {rig_id} belongs to {rig.owner}, not {miner}")
        if rig.maintenance_fee == 0:
            return None
        fee = rig.maintenance_fee
        if self.ledger.balance(miner, AssetKind.PRIME) < fee:
            raise InsufficientFunds(f"miner {miner} cannot pay fee {fee} for rig {rig_id}")
        self.router.check_no_loop(miner)
        ev = self.ledger.transfer(miner, DAO_TREASURY, AssetKind.PRIME, fee, EventKind.MAINTENANCE)
        self.router.route(fee, miner)
        rig.paid_through_epoch += 1
        return ev

    def active_rigs(self) -> list[Rig]:
        return [r for r in self.rigs.values() if r.status is RigStatus.ACTIVE]

    def _refresh_earning(self) -> None:
        if self._earning_dirty:
            self._earning = {r.rig_id: r for r in self.active_rigs() if not _spent(r)}
        else:  # only new purchases since the last tick; ids only grow
            for rig_id in list(self.rigs)[self._seen:]:
                rig = self.rigs[rig_id]
                if rig.status is RigStatus.ACTIVE and not _spent(rig):
                    self._earning[rig_id] = rig
        self._earning_dirty = False
        self._seen = len(self.rigs)

    def tick_epoch(self, epoch: int, schedule: EmissionSchedule) -> list[tuple[int, int]]:
        """Update rig status and mint this epoch's pool to active rigs.

        Returns ``(owner, minted)`` per rig that received a positive share,
        in rig-id order.
        """
        if self.last_tick is not None and epoch != self.last_tick + 1:
            raise EpochOutOfOrder(f"expected epoch {self.last_tick + 1}, got {epoch}")
        if self.last_tick is None and epoch < 0:
            raise EpochOutOfOrder("epochs start at 0")
        self.last_tick = epoch
        self.transitions = []
        # fee-free rigs never change status
        for rig in self._fee_rigs:
            status = RigStatus.ACTIVE if rig.paid_through_epoch >= epoch else RigStatus.LAPSED
            if status is not rig.status:
                rig.status = status
                self.transitions.append((rig.rig_id, status))
                if status is RigStatus.LAPSED:
                    self._earning.pop(rig.rig_id, None)
                else:
                    self._earning_dirty = True  # re-insert in id order
        self.transitions.sort()

        if self._earning_dirty or len(self.rigs) != self._seen:
            self._refresh_earning()
        active = list(self._earning.values())
        weights = [r.hashpower0 if r.decay_factor_scaled == DECAY_SCALE
                   else effective_hashpower(r, epoch) for r in active]
        for rig, w in zip(active, weights):
            if w == 0:  # a decayed rig that reaches zero stays at zero
                del self._earning[rig.rig_id]
        pool = schedule.pool(epoch)
        if pool == 0 or sum(weights) == 0:
            self.forgone += pool
            return []
        shares = largest_remainder(pool, weights)
        out = []
        for rig, share in zip(active, shares):
            if share:
                self.ledger.mint(rig.owner, share)
                out.append((rig.owner, share))
        self.emitted += pool
        return out
