"""Exception hierarchy shared by every pova module."""


class PovaError(Exception):
    """Base class for all engine errors."""


# ledger
class InvalidAmount(PovaError):
    pass


class Overflow(PovaError):
    pass


class InsufficientFunds(PovaError):
    pass


class NonSpendable(PovaError):
    pass


class UnknownAccount(PovaError):
    pass


# issuance
class ScheduleError(PovaError, ValueError):
    """Raised at construction time for invalid schedule parameters."""


class ProofNotVerified(PovaError):
    pass


class ProofAlreadyConsumed(PovaError):
    pass


class ZeroMint(PovaError):
    pass


class NoMints(PovaError):
    pass


# rigs
class NotOwner(PovaError):
    pass


class UnknownRig(PovaError):
    pass


class EpochOutOfOrder(PovaError):
    pass


# routing
class ValueLoop(PovaError):
    pass


class InvalidPolicy(PovaError, ValueError):
    pass


class WrongEpoch(PovaError):
    pass


# verification
class NotVerified(PovaError):
    pass


class AlreadyConsumed(PovaError):
    pass


# sim
class ScenarioInvalid(PovaError, ValueError):
    """A scenario failed validation; ``field`` names the first bad field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


class CorruptLog(PovaError):
    def __init__(self, seq: int, message: str):
        super().__init__(f"corrupt log at seq {seq}: {message}")
        self.seq = seq


class NoHolders(PovaError):
    pass


class UnknownHolder(PovaError):
    pass
