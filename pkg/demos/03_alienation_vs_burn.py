# coding: utf-8

# # Redirecting value versus burning it
#
# The same direct scenario is run twice. In one twin every deposit is an
# on-ledger transfer to the treasury, routed to a beneficiary. In the other it
# is a burn. Token supply is identical in both, only the fate of the Prime
# Assets differs.

from pathlib import Path

from pova import compare_twins, load_scenario

HERE = Path(__file__).resolve().parent
scenario = load_scenario(HERE.parent / "scenarios" / "direct_halving.toml")
pova, pob, report = compare_twins(scenario)

print("supply identical:   ", report["supply_identical"])
print("final supply:       ", report["final_supply"])
print("prime destinations: ", report["prime_destinations"])


# Supply trajectories around the first halving.

for twin, result in (("alienation", pova), ("burn", pob)):
    tail = [row.total_derivative_supply for row in result.metrics[2014:2018]]
    print(f"{twin:10s}", tail)
