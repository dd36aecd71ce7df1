"""Alienation proofs: creation, verification against the ledger, fiat ingestion.

A proof is the evidence that Prime Assets were given up: an on-ledger transfer
into the issuer treasury, a burn, or a trusted bank record. The registry
claims each underlying event or external reference at verification time, so a
transfer, burn or fiat record backs at most one proof, and a proof can be
consumed (minted against) only once.

Status moves ``Pending -> Verified -> Consumed`` or ``Pending -> Rejected``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Any, Iterable

from .errors import AlreadyConsumed, NotVerified
from .ledger import BURN_ACCOUNT, DAO_TREASURY, AssetKind, EventKind, Ledger


class ProofKind(str, enum.Enum):
    ON_LEDGER = "OnLedger"
    FIAT_RECORD = "FiatRecord"
    BURN = "Burn"


class ProofStatus(str, enum.Enum):
    PENDING = "Pending"
    VERIFIED = "Verified"
    REJECTED = "Rejected"
    CONSUMED = "Consumed"


@dataclass
class AlienationProof:
    proof_id: int
    kind: ProofKind
    payer_ref: int | str
    amount: int
    epoch: int
    status: ProofStatus = ProofStatus.PENDING
    reason: str | None = None
    event_seq: int | None = None
    external_ref: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "proof_id": self.proof_id,
            "kind": self.kind.value,
            "payer_ref": self.payer_ref,
            "amount": str(self.amount),
            "epoch": self.epoch,
            "status": self.status.value,
            "reason": self.reason,
            "event_seq": self.event_seq,
            "external_ref": self.external_ref,
        }


@dataclass(frozen=True)
class FiatRecord:
    external_ref: str
    payer: str
    amount: int
    currency: str
    timestamp: int


@dataclass(frozen=True)
class IngestError:
    index: int
    code: str  # MalformedRecord | DuplicateExternalRef
    detail: str
    external_ref: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {"index": self.index, "code": self.code, "detail": self.detail,
                "external_ref": self.external_ref}


_FIAT_FIELDS = ("external_ref", "payer", "amount", "currency", "timestamp")


def parse_fiat_record(raw: str | dict) -> FiatRecord:
    """Parse one JSON object (or JSON text) into a :class:`FiatRecord`.

    Raises ``ValueError`` describing the first problem found.
    """
    if isinstance(raw, str):
        try:
            raw = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid JSON: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ValueError("record must be a JSON object")
    missing = [f for f in _FIAT_FIELDS if f not in raw]
    if missing:
        raise ValueError(f"missing field(s): {', '.join(missing)}")
    for name in ("external_ref", "payer", "currency"):
        if not isinstance(raw[name], str) or not raw[name]:
            raise ValueError(f"{name} must be a non-empty string")
    amount = raw["amount"]
    if isinstance(amount, str) and amount.isdigit():
        amount = int(amount)
    if not isinstance(amount, int) or isinstance(amount, bool) or amount <= 0:
        raise ValueError("amount must be a positive integer in minor units")
    ts = raw["timestamp"]
    if not isinstance(ts, int) or isinstance(ts, bool):
        raise ValueError("timestamp must be an integer")
    return FiatRecord(raw["external_ref"], raw["payer"], amount, raw["currency"], ts)


class ProofRegistry:
    """Single-writer store of proofs and of the evidence they have claimed."""

    def __init__(self, fiat_currency: str | None = None):
        self.fiat_currency = fiat_currency
        self.proofs: dict[int, AlienationProof] = {}
        self.next_proof_id = 0
        self._claimed_events: dict[int, int] = {}
        self._seen_refs: set[str] = set()

    def new_proof(self, kind: ProofKind, payer_ref: int | str, amount: int, epoch: int,
                  event_seq: int | None = None, external_ref: str | None = None) -> AlienationProof:
        proof = AlienationProof(self.next_proof_id, kind, payer_ref, amount, epoch,
                                event_seq=event_seq, external_ref=external_ref)
        self.proofs[proof.proof_id] = proof
        self.next_proof_id += 1
        return proof

    def is_registered(self, proof: AlienationProof) -> bool:
        return self.proofs.get(proof.proof_id) is proof

    def _reject(self, proof: AlienationProof, reason: str) -> ProofStatus:
        proof.status = ProofStatus.REJECTED
        proof.reason = reason
        return proof.status

    def _claim(self, proof: AlienationProof) -> ProofStatus:
        assert proof.event_seq is not None
        self._claimed_events[proof.event_seq] = proof.proof_id
        proof.status = ProofStatus.VERIFIED
        return proof.status

    def _check_pending(self, proof: AlienationProof, kind: ProofKind) -> bool:
        if not self.is_registered(proof):
            raise ValueError(f"proof {proof.proof_id} is not registered here")
        if proof.kind is not kind:
            raise ValueError(f"expected a {kind.value} proof, got {proof.kind.value}")
        return proof.status is ProofStatus.PENDING

    def verify_onledger(self, proof: AlienationProof, ledger: Ledger) -> ProofStatus:
        """Verify against the cited payer -> treasury Prime transfer.

        Non-pending proofs are returned unchanged, so re-verification can never
        claim a second event.
        """
        if not self._check_pending(proof, ProofKind.ON_LEDGER):
            return proof.status
        ev = ledger.event(proof.event_seq) if proof.event_seq is not None else None
        if ev is None:
            return self._reject(proof, "NoSuchEvent")
        if ev.kind is not EventKind.TRANSFER:
            return self._reject(proof, "NotATransfer")
        if ev.to != DAO_TREASURY:
            return self._reject(proof, "NotToTreasury")
        if ev.asset is not AssetKind.PRIME:
            return self._reject(proof, "WrongAsset")
        if ev.from_ != proof.payer_ref:
            return self._reject(proof, "PayerMismatch")
        if ev.amount != proof.amount:
            return self._reject(proof, "AmountMismatch")
        if ev.epoch != proof.epoch:
            return self._reject(proof, "EpochMismatch")
        if ev.seq in self._claimed_events:
            return self._reject(proof, "AlreadyClaimed")
        return self._claim(proof)

    def verify_burn(self, proof: AlienationProof, ledger: Ledger) -> ProofStatus:
        if not self._check_pending(proof, ProofKind.BURN):
            return proof.status
        ev = ledger.event(proof.event_seq) if proof.event_seq is not None else None
        if ev is None:
            return self._reject(proof, "NoSuchEvent")
        if ev.to != BURN_ACCOUNT or ev.kind is not EventKind.BURN:
            return self._reject(proof, "NotBurnAddress")
        if ev.asset is not AssetKind.PRIME:
            return self._reject(proof, "WrongAsset")
        if ev.from_ != proof.payer_ref:
            return self._reject(proof, "PayerMismatch")
        if ev.amount != proof.amount:
            return self._reject(proof, "AmountMismatch")
        if ev.epoch != proof.epoch:
            return self._reject(proof, "EpochMismatch")
        if ev.seq in self._claimed_events:
            return self._reject(proof, "AlreadyClaimed")
        return self._claim(proof)

    def ingest_fiat_records(self, records: Iterable[str | dict],
                            epoch: int = 0) -> tuple[list[AlienationProof], list[IngestError]]:
        """Turn bank records into Verified proofs; bad records become errors.

        Blank lines are skipped. Well-formed records are trusted as-is.
        """
        proofs: list[AlienationProof] = []
        errors: list[IngestError] = []
        for index, raw in enumerate(records):
            if isinstance(raw, str) and not raw.strip():
                continue
            try:
                rec = parse_fiat_record(raw)
                if self.fiat_currency is not None and rec.currency != self.fiat_currency:
                    raise ValueError(
                        f"currency {rec.currency!r} is not the accepted {self.fiat_currency!r}")
            except ValueError as exc:
                errors.append(IngestError(index, "MalformedRecord", str(exc)))
                continue
            if rec.external_ref in self._seen_refs:
                errors.append(IngestError(index, "DuplicateExternalRef",
                                          f"external_ref {rec.external_ref!r} already ingested",
                                          rec.external_ref))
                continue
            self._seen_refs.add(rec.external_ref)
            proof = self.new_proof(ProofKind.FIAT_RECORD, rec.payer, rec.amount, epoch,
                                   external_ref=rec.external_ref)
            proof.status = ProofStatus.VERIFIED
            proofs.append(proof)
        return proofs, errors

    def consume(self, proof: AlienationProof) -> ProofStatus:
        if not self.is_registered(proof):
            raise NotVerified(f"proof {proof.proof_id} is not registered here")
        if proof.status is ProofStatus.CONSUMED:
            raise AlreadyConsumed(f"proof {proof.proof_id} already consumed")
        if proof.status is not ProofStatus.VERIFIED:
            raise NotVerified(f"proof {proof.proof_id} is {proof.status.value}")
        proof.status = ProofStatus.CONSUMED
        return proof.status
