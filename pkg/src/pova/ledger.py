"""Exact-integer ledger for Prime Assets and Derivative Tokens.

Balances are unsigned integers in minor units. Every mutation appends a
:class:`TransferEvent`; nothing ever leaves the ledger, so for each asset the
sum of all balances equals the sum of mints and external deposits. Burning is
a move into the reserved burn account, which can never be debited.

Ids ``0..4`` are reserved (treasury, burn, charity, fund, lottery pot) and
user accounts are allocated densely from ``FIRST_USER_ACCOUNT`` upward.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Union

from .errors import InsufficientFunds, InvalidAmount, NonSpendable, Overflow, UnknownAccount

DAO_TREASURY = 0
BURN_ACCOUNT = 1
CHARITY_SINK = 2
FUND_ACCOUNT = 3
LOTTERY_POT = 4
RESERVED_ACCOUNTS = (DAO_TREASURY, BURN_ACCOUNT, CHARITY_SINK, FUND_ACCOUNT, LOTTERY_POT)
FIRST_USER_ACCOUNT = 5

MAX_AMOUNT = 2**64 - 1
# amounts at or above this are not exactly representable as JSON doubles
JSON_SAFE_INT = 2**53


class AssetKind(str, enum.Enum):
    PRIME = "Prime"
    DERIVATIVE = "Derivative"


class EventKind(str, enum.Enum):
    TRANSFER = "Transfer"
    MINT = "Mint"
    EXTERNAL_DEPOSIT = "ExternalDeposit"
    BURN = "Burn"
    ROUTE = "Route"
    MAINTENANCE = "Maintenance"
    LOTTERY_PAYOUT = "LotteryPayout"


# kinds that create supply; everything else only moves it
SOURCE_KINDS = frozenset({EventKind.MINT, EventKind.EXTERNAL_DEPOSIT})


@dataclass(frozen=True)
class TransferEvent:
    seq: int
    epoch: int
    from_: int | None
    to: int
    asset: AssetKind
    amount: int
    kind: EventKind

    def to_dict(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "epoch": self.epoch,
            "from": self.from_,
            "to": self.to,
            "asset": self.asset.value,
            "amount": str(self.amount),
            "kind": self.kind.value,
        }


@dataclass(frozen=True)
class Annotation:
    """Non-monetary log record (proof, draw, lapse, ...) sharing the event sequence."""

    seq: int
    epoch: int
    note: str
    data: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"seq": self.seq, "epoch": self.epoch, "note": self.note, **self.data}


Record = Union[TransferEvent, Annotation]


def _index(asset: AssetKind) -> int:
    return 0 if asset is AssetKind.PRIME else 1


def _check_amount(amount: int) -> None:
    if not isinstance(amount, int) or isinstance(amount, bool):
        raise InvalidAmount(f"amount must be an integer, got {amount!r}")
    if amount <= 0:
        raise InvalidAmount(f"amount must be positive, got {amount}")
    if amount > MAX_AMOUNT:
        raise Overflow(f"amount {amount} exceeds {MAX_AMOUNT}")


class Ledger:
    """Single-writer ledger with an append-only, seq-ordered record log."""

    def __init__(self) -> None:
        self._balances: dict[int, list[int]] = {a: [0, 0] for a in RESERVED_ACCOUNTS}
        self._next_account = FIRST_USER_ACCOUNT
        self._supply = [0, 0]
        self.events: list[TransferEvent] = []
        self.records: list[Record] = []
        self._by_seq: dict[int, TransferEvent] = {}
        self.next_seq = 0
        self.epoch = 0

    # -- accounts -----------------------------------------------------------

    def open_account(self) -> int:
        account = self._next_account
        self._next_account += 1
        self._balances[account] = [0, 0]
        return account

    def accounts(self) -> list[int]:
        return sorted(self._balances)

    def has_account(self, account: int) -> bool:
        return account in self._balances

    def balance(self, account: int, asset: AssetKind) -> int:
        try:
            return self._balances[account][_index(asset)]
        except KeyError:
            raise UnknownAccount(f"unknown account {account}") from None

    def supply(self, asset: AssetKind) -> int:
        """Total ever created (minted or deposited) of ``asset``."""
        return self._supply[_index(asset)]

    def total_balances(self, asset: AssetKind) -> int:
        i = _index(asset)
        return sum(b[i] for b in self._balances.values())

    # -- mutations ----------------------------------------------------------

    def _row(self, account: int) -> list[int]:
        try:
            return self._balances[account]
        except KeyError:
            raise UnknownAccount(f"unknown account {account}") from None

    def _append(self, frm: int | None, to: int, asset: AssetKind, amount: int,
                kind: EventKind) -> TransferEvent:
        ev = TransferEvent(self.next_seq, self.epoch, frm, to, asset, amount, kind)
        self.next_seq += 1
        self.events.append(ev)
        self.records.append(ev)
        self._by_seq[ev.seq] = ev
        return ev

    def _create(self, to: int, asset: AssetKind, amount: int, kind: EventKind) -> TransferEvent:
        _check_amount(amount)
        row = self._row(to)
        i = _index(asset)
        if self._supply[i] + amount > MAX_AMOUNT:
            raise Overflow(f"{asset.value} supply would exceed {MAX_AMOUNT}")
        row[i] += amount
        self._supply[i] += amount
        return self._append(None, to, asset, amount, kind)

    def _move(self, frm: int, to: int, asset: AssetKind, amount: int,
              kind: EventKind) -> TransferEvent:
        _check_amount(amount)
        if frm == BURN_ACCOUNT:
            raise NonSpendable("the burn account cannot be debited")
        src = self._row(frm)
        dst = self._row(to)
        i = _index(asset)
        if src[i] < amount:
            raise InsufficientFunds(
                f"account {frm} holds {src[i]} {asset.value}, needs {amount}")
        src[i] -= amount
        dst[i] += amount
        return self._append(frm, to, asset, amount, kind)

    def external_deposit(self, to: int, asset: AssetKind, amount: int) -> TransferEvent:
        return self._create(to, asset, amount, EventKind.EXTERNAL_DEPOSIT)

    def mint(self, to: int, amount: int) -> TransferEvent:
        # only issuance and rigs call this
        return self._create(to, AssetKind.DERIVATIVE, amount, EventKind.MINT)

    def transfer(self, frm: int, to: int, asset: AssetKind, amount: int,
                 kind: EventKind = EventKind.TRANSFER) -> TransferEvent:
        if kind in SOURCE_KINDS or kind is EventKind.BURN:
            raise ValueError(f"transfer cannot record kind {kind.value}")
        return self._move(frm, to, asset, amount, kind)

    def burn(self, frm: int, asset: AssetKind, amount: int) -> TransferEvent:
        return self._move(frm, BURN_ACCOUNT, asset, amount, EventKind.BURN)

    def annotate(self, note: str, **data: Any) -> Annotation:
        rec = Annotation(self.next_seq, self.epoch, note, data)
        self.next_seq += 1
        self.records.append(rec)
        return rec

    # -- queries ------------------------------------------------------------

    def event(self, seq: int) -> TransferEvent | None:
        return self._by_seq.get(seq)

    def snapshot(self) -> dict[int, tuple[int, int]]:
        """Accounts with a nonzero balance, as ``{id: (prime, derivative)}``."""
        return {a: (b[0], b[1]) for a, b in sorted(self._balances.items()) if b[0] or b[1]}


# -- JSON Lines ---------------------------------------------------------------

def record_to_json(rec: Record) -> str:
    return json.dumps(rec.to_dict(), separators=(", ", ": "))


def dump_jsonl(records: Iterable[Record]) -> str:
    return "".join(record_to_json(r) + "\n" for r in records)


def _int_field(value: Any) -> int:
    if isinstance(value, bool):
        raise ValueError("boolean is not an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and value.isdigit():
        return int(value)
    raise ValueError(f"not an integer: {value!r}")


def record_from_dict(d: dict[str, Any]) -> Record:
    if "note" in d:
        data = {k: v for k, v in d.items() if k not in ("seq", "epoch", "note")}
        return Annotation(int(d["seq"]), int(d["epoch"]), d["note"], data)
    frm = d["from"]
    return TransferEvent(
        seq=int(d["seq"]),
        epoch=int(d["epoch"]),
        from_=None if frm is None else int(frm),
        to=int(d["to"]),
        asset=AssetKind(d["asset"]),
        amount=_int_field(d["amount"]),
        kind=EventKind(d["kind"]),
    )


def load_jsonl(lines: Iterable[str]) -> Iterator[Record]:
    for line in lines:
        line = line.strip()
        if line:
            yield record_from_dict(json.loads(line))
