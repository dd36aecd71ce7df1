"""Proof-of-Value-Alienation issuance engine and simulator."""

from .apportion import largest_remainder
from .errors import *  # noqa: F401,F403
from .issuance import (Constant, Halving, InfluxScaled, IssuanceState, LogCost,
                       ParticipantScaled, Ratio, adjust_ratio, cost_basis, current_ratio,
                       mint_direct)
from .ledger import (BURN_ACCOUNT, CHARITY_SINK, DAO_TREASURY, FUND_ACCOUNT, LOTTERY_POT,
                     AssetKind, EventKind, Ledger, TransferEvent)
from .outputs import compare_twins, write_run
from .prng import SplitMix64, splitmix64
from .rigs import EmissionSchedule, Rig, RigParams, RigRegistry, effective_hashpower
from .routing import (BudgetSplit, CharitySink, FundAccumulate, LotteryPot, LotteryState,
                      Router, draw_lottery, route)
from .scenario import Scenario, load_scenario, scenario_from_dict
from .sim import FinalState, floor_price, replay, reservation_check, run
from .verification import AlienationProof, ProofKind, ProofRegistry, ProofStatus

__version__ = "0.1.0"
