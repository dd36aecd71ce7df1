# coding: utf-8

# # Virtual rigs
#
# Instead of minting on deposit, a miner can buy a virtual rig. Every epoch a
# fixed pool is shared between active rigs in proportion to their hashpower.
# Rigs can lose efficiency over time and can require an upkeep fee.

from pathlib import Path

from pova import load_scenario, run
from pova.ledger import FUND_ACCOUNT

HERE = Path(__file__).resolve().parent
scenario = load_scenario(HERE.parent / "scenarios" / "rigs_maintenance.toml")
result = run(scenario)


# Pool size, active rigs and supply at a few checkpoints. Agent 2 stops paying
# upkeep after epoch 120, so its rig lapses and only one rig shares the pool.

for row in result.metrics:
    if row.epoch in (0, 119, 120, 209, 210, 499):
        print(f"epoch {row.epoch:3d}  pool {row.pool_emitted:5d}  active {row.active_rigs}"
              f"  supply {row.total_derivative_supply}")


# Rig purchases and upkeep fees all end up in the fund.

print("fund balance:     ", result.final.balance(FUND_ACCOUNT))
print("prime alienated:  ", result.final.cumulative_prime_alienated)
print("forgone emission: ", result.final.forgone_emission)
for rig in result.final.rigs.values():
    print(f"rig {rig.rig_id}: owner {rig.owner}, hashpower0 {rig.hashpower0}, {rig.status.value}")
