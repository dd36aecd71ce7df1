# coding: utf-8

# # Direct issuance by hand
#
# A miner moves Prime Assets to the issuer treasury, the transfer is turned
# into a verified proof, and the issuer mints Derivative tokens at the ratio
# in force. The Prime does not come back: it is routed on to a beneficiary.

from pova import (CharitySink, Halving, IssuanceState, Ledger, ProofKind, ProofRegistry, Ratio,
                  Router, adjust_ratio, cost_basis, mint_direct)
from pova.ledger import CHARITY_SINK, DAO_TREASURY, AssetKind

P, D = AssetKind.PRIME, AssetKind.DERIVATIVE

ledger = Ledger()
proofs = ProofRegistry()
router = Router(ledger, CharitySink())
schedule = Halving(Ratio.parse("1.0"), interval_epochs=10)
state = IssuanceState.initial(schedule)

alice = ledger.open_account()
ledger.external_deposit(alice, P, 1_000)


# One alienation: transfer, proof, verification, mint.

def alienate_and_mint(miner, amount):
    ev = ledger.transfer(miner, DAO_TREASURY, P, amount)
    proof = proofs.new_proof(ProofKind.ON_LEDGER, miner, amount, ledger.epoch, event_seq=ev.seq)
    proofs.verify_onledger(proof, ledger)
    minted, _ = mint_direct(ledger, proofs, router, miner, proof, state, schedule)
    return minted


# Deposit 100 at epochs 0, 10 and 20. The ratio halves every 10 epochs.

for epoch in (0, 10, 20):
    ledger.epoch = state.epoch = epoch
    adjust_ratio(state, schedule)
    minted = alienate_and_mint(alice, 100)
    print(f"epoch {epoch:2d}  ratio {state.current_ratio}  minted {minted}")


# Alice spent 300 Prime for 175 tokens. The charity holds every unit she gave up.

print("derivative balance:", ledger.balance(alice, D))
print("charity balance:   ", ledger.balance(CHARITY_SINK, P))
print("average cost basis:", float(cost_basis(alice, state)))


# Trying to mint twice from one proof is refused.

ev = ledger.transfer(alice, DAO_TREASURY, P, 50)
proof = proofs.new_proof(ProofKind.ON_LEDGER, alice, 50, ledger.epoch, event_seq=ev.seq)
proofs.verify_onledger(proof, ledger)
mint_direct(ledger, proofs, router, alice, proof, state, schedule)
try:
    mint_direct(ledger, proofs, router, alice, proof, state, schedule)
except Exception as exc:
    print("second mint:", type(exc).__name__)
