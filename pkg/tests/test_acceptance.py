"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Lines are shown in the pytest terminal summary (section "acceptance
criteria") and also printed directly when run with ``-s``.
"""

import copy
import itertools
import random
import time
from contextlib import contextmanager
from fractions import Fraction

from scipy.stats import chisquare

from conftest import ACCEPTANCE_RESULTS, random_scenario, random_scenario_dict
from pova.apportion import largest_remainder
from pova.cli import main
from pova.errors import (InsufficientFunds, ProofAlreadyConsumed, ProofNotVerified, ValueLoop,
                         ZeroMint)
from pova.issuance import (Constant, Halving, InfluxScaled, IssuanceState, LogCost,
                           ParticipantScaled, Ratio, adjust_ratio, current_ratio, mint_direct,
                           preview_mint)
from pova.ledger import (BURN_ACCOUNT, DAO_TREASURY, AssetKind, EventKind, Ledger)
from pova.outputs import compare_twins, events_jsonl, metrics_csv, read_metrics
from pova.prng import splitmix64
from pova.rigs import (DECAY_SCALE, EmissionSchedule, Rig, RigParams, RigRegistry, RigStatus,
                       effective_hashpower)
from pova.routing import (BudgetSplit, CharitySink, FundAccumulate, LotteryPot, LotteryState,
                          Router, draw_lottery, lottery_index)
from pova.scenario import scenario_from_dict
from pova.sim import run
from pova.verification import ProofKind, ProofRegistry, ProofStatus

P, D = AssetKind.PRIME, AssetKind.DERIVATIVE


@contextmanager
def criterion(num, name):
    box = {"detail": ""}
    try:
        yield box
    except BaseException as exc:
        detail = box["detail"] or f"{type(exc).__name__}: {exc}".splitlines()[0]
        ACCEPTANCE_RESULTS.append((num, name, False, detail))
        print(f"[FAIL] {num}. {name}: {detail}")
        raise
    ACCEPTANCE_RESULTS.append((num, name, True, box["detail"]))
    print(f"[PASS] {num}. {name}: {box['detail']}")


# -- 1. conservation ---------------------------------------------------------------

def _random_operations(rng, n_ops, policy_kind):
    """Drive every module with ``n_ops`` random valid operations on one ledger."""
    ledger, registry = Ledger(), ProofRegistry(fiat_currency="EUR")
    users = [ledger.open_account() for _ in range(6)]
    if policy_kind == "split":
        targets = [ledger.open_account() for _ in range(3)]
        policy = BudgetSplit(((targets[0], Fraction(1, 2)), (targets[1], Fraction(1, 3)),
                              (targets[2], Fraction(1, 6))))
    else:
        policy = {"charity": CharitySink(), "fund": FundAccumulate(),
                  "lottery": LotteryPot(3)}.get(policy_kind, CharitySink())
    router = Router(ledger, policy)
    rigs = RigRegistry(ledger, registry, router)
    schedule = rng.choice([Halving(Ratio.parse("1"), 50), LogCost(1.0, 0.3, 5000),
                           InfluxScaled(Ratio.parse("2"), 10**5)])
    state = IssuanceState.initial(schedule)
    emission = EmissionSchedule(rng.randint(1, 100), rng.choice([None, 40]))
    eligible = []
    fiat_ref = 0
    done = 0

    def alienate(user, amount, burn=False):
        if burn:
            ev = ledger.burn(user, P, amount)
            proof = registry.new_proof(ProofKind.BURN, user, amount, ledger.epoch, event_seq=ev.seq)
            registry.verify_burn(proof, ledger)
        else:
            ev = ledger.transfer(user, DAO_TREASURY, P, amount)
            proof = registry.new_proof(ProofKind.ON_LEDGER, user, amount, ledger.epoch,
                                       event_seq=ev.seq)
            registry.verify_onledger(proof, ledger)
        return proof

    while done < n_ops:
        op = rng.random()
        user = rng.choice(users)
        prime = ledger.balance(user, P)
        if op < 0.15:
            ledger.external_deposit(user, P, rng.randint(1, 10_000))
        elif op < 0.30:
            if prime:
                ledger.transfer(user, rng.choice(users), P, rng.randint(1, prime))
        elif op < 0.35:
            deriv = ledger.balance(user, D)
            if deriv:
                ledger.transfer(user, rng.choice(users), D, rng.randint(1, deriv))
        elif op < 0.40:
            if prime:
                ledger.burn(user, P, rng.randint(1, min(prime, 50)))
        elif op < 0.62:
            if prime:
                amount = rng.randint(1, min(prime, 5000))
                if preview_mint(amount, state, schedule) >= 1:
                    proof = alienate(user, amount, burn=rng.random() < 0.3)
                    mint_direct(ledger, registry, router, user, proof, state, schedule)
                    if user not in eligible:
                        eligible.append(user)
        elif op < 0.68:
            fiat_ref += 1
            rec = {"external_ref": f"r{fiat_ref}", "payer": f"bank-{user}",
                   "amount": rng.randint(1, 3000), "currency": "EUR", "timestamp": fiat_ref}
            proofs, _ = registry.ingest_fiat_records([rec], epoch=ledger.epoch)
            if proofs and preview_mint(proofs[0].amount, state, schedule) >= 1:
                mint_direct(ledger, registry, router, user, proofs[0], state, schedule)
        elif op < 0.74:
            if prime:
                proof = alienate(user, rng.randint(1, min(prime, 2000)))
                rigs.purchase_rig(user, proof, RigParams(rng.randint(1, 3),
                                                         rng.choice([DECAY_SCALE, 950_000_000]),
                                                         rng.choice([0, 1, 3])))
        elif op < 0.80:
            owned = [r for r in rigs.rigs.values() if r.owner == user and r.maintenance_fee]
            if owned:
                try:
                    rigs.pay_maintenance(user, rng.choice(owned).rig_id)
                except InsufficientFunds:
                    pass
        else:
            # close the epoch: emission tick, lottery draw, ratio adjustment
            t = ledger.epoch
            rigs.tick_epoch(t, emission)
            if isinstance(policy, LotteryPot) and t == router.lottery.next_draw_epoch:
                router.run_draw(eligible, t, seed=rng.getrandbits(64))
            ledger.epoch = state.epoch = t + 1
            adjust_ratio(state, schedule)
        done += 1
    return ledger


def _fold(ledger):
    """Independent oracle: balances, mints and deposits from the raw event log."""
    bal = {}
    minted = {P: 0, D: 0}
    deposited = {P: 0, D: 0}
    for ev in ledger.events:
        if ev.from_ is None:
            (minted if ev.kind is EventKind.MINT else deposited)[ev.asset] += ev.amount
        else:
            key = (ev.from_, ev.asset)
            bal[key] = bal.get(key, 0) - ev.amount
            assert bal[key] >= 0, f"negative balance at seq {ev.seq}"
        key = (ev.to, ev.asset)
        bal[key] = bal.get(key, 0) + ev.amount
    return bal, minted, deposited


def test_c01_conservation():
    with criterion(1, "Conservation, 100,000 random operations") as c:
        rng = random.Random(20240601)
        start = time.perf_counter()
        ledgers = [_random_operations(rng, 20_000, kind)
                   for kind in ("charity", "fund", "split", "lottery", "charity")]
        elapsed = time.perf_counter() - start
        for ledger in ledgers:
            bal, minted, deposited = _fold(ledger)
            for asset in (P, D):
                total = sum(ledger.balance(a, asset) for a in ledger.accounts())
                assert total == minted[asset] + deposited[asset]
                assert total == sum(v for (_, a), v in bal.items() if a is asset)
            assert minted[P] == 0 and deposited[D] == 0
            for acct in ledger.accounts():
                assert ledger.balance(acct, P) == bal.get((acct, P), 0)
                assert ledger.balance(acct, D) == bal.get((acct, D), 0)
        n_events = sum(len(lg.events) for lg in ledgers)
        c["detail"] = f"{n_events} events, exact, {elapsed:.2f}s"
        assert elapsed < 10


# -- 2. determinism ----------------------------------------------------------------

def test_c02_determinism():
    with criterion(2, "Determinism, 20 scenarios run twice") as c:
        rng = random.Random(2)
        start = time.perf_counter()
        for _ in range(20):
            sc = random_scenario(rng)
            a, b = run(sc), run(sc)
            assert events_jsonl(a) == events_jsonl(b)
            assert metrics_csv(a) == metrics_csv(b)
        elapsed = time.perf_counter() - start
        c["detail"] = f"byte-identical, {elapsed:.2f}s"
        assert elapsed < 30


# -- 3. cadence --------------------------------------------------------------------

CADENCE = """\
mode = "direct"
epochs = 10080
seed = 1

[schedule]
kind = "halving"
r0 = "1.0"
interval_epochs = 2016

[constants]
epoch_minutes = 10

[[agents]]
id = 1
initial_prime = 1000000000
strategy = { kind = "deposit_every_n", n = 1, amount = 1000 }
"""


def test_c03_pow_cadence(tmp_path):
    with criterion(3, "Halving cadence, 2016 epochs at 10 minutes") as c:
        path = tmp_path / "cadence.toml"
        path.write_text(CADENCE)
        out = tmp_path / "out"
        assert main(["run", str(path), "--out", str(out)]) == 0
        rows = read_metrics(out / "metrics.csv")
        assert len(rows) == 10080
        changes = [i for i in range(1, len(rows))
                   if rows[i]["current_ratio"] != rows[i - 1]["current_ratio"]]
        assert changes == [2016, 4032, 6048, 8064]
        assert [rows[i]["current_ratio"] for i in [0] + changes] == [
            "1.000000000", "0.500000000", "0.250000000", "0.125000000", "0.062500000"]
        minutes = 2016 * 10
        assert minutes == 14 * 24 * 60
        c["detail"] = f"changes at rows {changes}, {minutes} minutes = 14 days"


# -- 4. monotonicity ---------------------------------------------------------------

def _random_schedule(rng, kind):
    r0 = Ratio(rng.randint(1, 5 * 10**9))
    if kind == 0:
        return Constant(r0)
    if kind == 1:
        return Halving(r0, rng.randint(1, 3000))
    if kind == 2:
        return LogCost(rng.uniform(0.01, 10), rng.uniform(0, 10), rng.randint(1, 10**7))
    if kind == 3:
        return ParticipantScaled(r0)
    return InfluxScaled(r0, rng.randint(1, 10**7))


def test_c04_schedule_monotonicity():
    with criterion(4, "Schedule monotonicity, 1,000 parameterizations") as c:
        rng = random.Random(4)
        violations = steps = 0
        for i in range(1000):
            schedule = _random_schedule(rng, i % 5)
            state = IssuanceState.initial(schedule)
            prev = state.current_ratio
            for _ in range(200):
                state.epoch += rng.choice([0, 1, 1, rng.randint(0, 5000)])
                state.cumulative_prime_in += rng.choice([0, rng.randint(1, 10**6)])
                state.miner_count += rng.choice([0, 0, 1])
                raw = current_ratio(state, schedule)
                adjust_ratio(state, schedule)
                violations += raw > prev or state.current_ratio > prev
                prev = state.current_ratio
                steps += 1
        c["detail"] = f"{violations} violations over {steps} steps"
        assert violations == 0


# -- 5. twin equivalence -----------------------------------------------------------

def test_c05_twin_equivalence():
    with criterion(5, "PoVA/PoB twin equivalence, 10 direct scenarios") as c:
        rng = random.Random(5)
        for _ in range(10):
            sc = scenario_from_dict(random_scenario_dict(rng, mode="direct"))
            pova, pob, report = compare_twins(sc)
            assert report["supply_identical"]
            assert metrics_csv(pova).splitlines()[1:] and \
                [r.split(",")[1] for r in metrics_csv(pova).splitlines()] == \
                [r.split(",")[1] for r in metrics_csv(pob).splitlines()]
            total = pova.final.cumulative_prime_alienated
            assert total == pob.final.cumulative_prime_alienated
            dest = report["prime_destinations"]
            assert dest["pova"] == {"routed": str(total), "burned": "0"}
            assert dest["pob"] == {"routed": "0", "burned": str(total)}
            assert pob.final.balance(BURN_ACCOUNT) == total
        c["detail"] = "supply identical, Prime routed vs burned, exact"


# -- 6. rigs closed form -----------------------------------------------------------

def test_c06_rigs_closed_form():
    with criterion(6, "Rigs closed form and decay bound") as c:
        ledger, registry = Ledger(), ProofRegistry()
        rigs = RigRegistry(ledger, registry, Router(ledger, CharitySink()))
        e0 = 12_345
        for amount in (1, 77, 1000):
            m = ledger.open_account()
            ledger.external_deposit(m, P, amount)
            ev = ledger.transfer(m, DAO_TREASURY, P, amount)
            proof = registry.new_proof(ProofKind.ON_LEDGER, m, amount, 0, event_seq=ev.seq)
            registry.verify_onledger(proof, ledger)
            rigs.purchase_rig(m, proof, RigParams())
        sched = EmissionSchedule(e0)
        for t in range(10_000):
            rigs.tick_epoch(t, sched)
            assert ledger.supply(D) == (t + 1) * e0
        rng = random.Random(6)
        worst = Fraction(0)
        for _ in range(300):
            h0, d = rng.randint(1, 10**7), rng.randint(1, DECAY_SCALE - 1)
            horizon = rng.randint(1, 2000)
            rig = Rig(0, 5, h0, d, 0, RigStatus.ACTIVE, 0, -1)
            x, brute = h0 * DECAY_SCALE, 0
            for t in range(horizon):
                assert effective_hashpower(rig, t) == x // DECAY_SCALE
                brute += x // DECAY_SCALE
                x = x * d // DECAY_SCALE
            bound = Fraction(h0) / (1 - Fraction(d, DECAY_SCALE)) + horizon
            assert brute <= bound
            worst = max(worst, brute / bound)
        c["detail"] = f"supply(T) = T*e0 for T <= 10000; max lifetime/bound {float(worst):.4f}"


# -- 7. apportionment --------------------------------------------------------------

def _exhaustive(total, weights):
    wsum = sum(weights)
    quotas = [Fraction(total * w, wsum) for w in weights]
    floors = [q.numerator // q.denominator for q in quotas]
    extra = total - sum(floors)
    best = None
    for ups in itertools.combinations(range(len(weights)), extra):
        alloc = [f + (i in ups) for i, f in enumerate(floors)]
        key = (sum(abs(a - q) for a, q in zip(alloc, quotas)), ups)
        if best is None or key < best[0]:
            best = (key, alloc)
    return best[1]


def test_c07_apportionment():
    with criterion(7, "Apportionment exactness, 10,000 rig sets") as c:
        rng = random.Random(7)
        checked = 0
        for _ in range(10_000):
            ledger = Ledger()
            rigs = RigRegistry(ledger, ProofRegistry(), Router(ledger, CharitySink()))
            n = rng.randint(1, 9)
            epoch = rng.randint(0, 30)
            for i in range(n):
                owner = ledger.open_account()
                rigs.rigs[i] = Rig(i, owner, rng.randint(1, 10**6),
                                   rng.choice([DECAY_SCALE, 900_000_000, 500_000_000]),
                                   0, RigStatus.ACTIVE, rng.randint(0, epoch), -1)
            rigs.last_tick = epoch - 1
            pool = EmissionSchedule(rng.randint(1, 10**9)).pool(epoch)
            weights = [effective_hashpower(r, epoch) for _, r in sorted(rigs.rigs.items())]
            out = rigs.tick_epoch(epoch, EmissionSchedule(pool))
            if sum(weights) == 0:
                assert out == [] and rigs.forgone == pool
                continue
            assert sum(s for _, s in out) == pool == ledger.supply(D)
            if n <= 6:
                shares = largest_remainder(pool, weights)
                assert shares == _exhaustive(pool, weights)
                assert [(rigs.rigs[i].owner, s) for i, s in enumerate(shares) if s] == out
                checked += 1
        c["detail"] = f"all sums exact; {checked} sets of size <= 6 match the exhaustive oracle"


# -- 8. lottery --------------------------------------------------------------------

def test_c08_lottery():
    with criterion(8, "Lottery pins and uniformity") as c:
        # seed 1234567 at epoch 0 hits the first published splitmix64 output
        assert splitmix64(1234567) == 6457827717110365317
        assert lottery_index(1234567, 0, 10) == 7
        assert lottery_index(1234567, 0, 4) == 1
        assert splitmix64(1 ^ 5) == 7958955049054603978
        state = LotteryState(pot=100, next_draw_epoch=5)
        winner, payout, _ = draw_lottery(state, [11, 12, 13, 14], 5, seed=1, interval=5)
        assert (winner, payout) == (13, 100)
        counts = [0] * 10
        for seed in range(10_000):
            st = LotteryState(pot=1, next_draw_epoch=9)
            w, _, _ = draw_lottery(st, list(range(10)), 9, seed=seed, interval=1)
            counts[w] += 1
        p = chisquare(counts).pvalue
        c["detail"] = f"pins hold; chi-square p = {p:.4f}"
        assert p > 0.001


# -- 9. floor property -------------------------------------------------------------

def test_c09_floor_property():
    with criterion(9, "Floor property") as c:
        rng = random.Random(9)
        asks = direct_runs = 0
        for i in range(60):
            d = random_scenario_dict(rng, mode=("direct", "rigs", "mixed")[i % 3])
            for a in d["agents"]:
                a["reservation_pricing"] = True
            result = run(scenario_from_dict(d))
            assert result.violations == []
            # streaming oracle: per-holder basis rebuilt from the log, each ask checked in turn
            spent, got = {}, {}
            for rec in result.log:
                note = getattr(rec, "note", None)
                if note == "consume":
                    who = rec.data["miner"]
                    spent[who] = spent.get(who, 0) + int(rec.data["prime"])
                elif note == "maintenance":
                    who = rec.data["owner"]
                    spent[who] = spent.get(who, 0) + int(rec.data["fee"])
                elif note is None and rec.kind is EventKind.MINT:
                    got[rec.to] = got.get(rec.to, 0) + rec.amount
                elif note == "ask":
                    h = rec.data["holder"]
                    assert Fraction(rec.data["price"]) >= Fraction(spent[h], got[h])
                    asks += 1
            if d["mode"] == "direct":
                floors = [m.min_cost_basis for m in result.metrics if m.min_cost_basis is not None]
                assert len(set(floors)) <= 1
                direct_runs += 1
        c["detail"] = f"{asks} asks, 0 below basis; floor constant in {direct_runs} direct runs"


# -- 10. double-mint guard ---------------------------------------------------------

def test_c10_double_mint_guard():
    with criterion(10, "Double-mint guard, 10,000 adversarial attempts") as c:
        rng = random.Random(10)
        ledger, registry = Ledger(), ProofRegistry()
        router = Router(ledger, CharitySink())
        rigs = RigRegistry(ledger, registry, router)
        schedule = Constant(Ratio.parse("1"))
        state = IssuanceState.initial(schedule)
        miners = [ledger.open_account() for _ in range(4)]
        for m in miners:
            ledger.external_deposit(m, P, 10**12)
        backing = {}  # evidence key -> mints it backed
        spent_proofs = []
        fiat_refs = []
        blocked = 0

        def mint(proof, miner, key):
            minted, _ = mint_direct(ledger, registry, router, miner, proof, state, schedule)
            backing[key] = backing.get(key, 0) + 1
            spent_proofs.append((proof, miner, key))
            return minted

        def fresh(kind):
            m = rng.choice(miners)
            amount = rng.randint(1, 1000)
            if kind is ProofKind.BURN:
                ev = ledger.burn(m, P, amount)
            else:
                ev = ledger.transfer(m, DAO_TREASURY, P, amount)
            proof = registry.new_proof(kind, m, amount, ledger.epoch, event_seq=ev.seq)
            (registry.verify_burn if kind is ProofKind.BURN else registry.verify_onledger)(
                proof, ledger)
            return proof, m, ev

        for _ in range(200):  # seed some legitimately consumed evidence
            kind = rng.choice([ProofKind.ON_LEDGER, ProofKind.BURN])
            proof, m, ev = fresh(kind)
            mint(proof, m, ("event", ev.seq))
        ref0 = "seed-ref"
        (fp,), _ = registry.ingest_fiat_records([{"external_ref": ref0, "payer": "x",
                                                 "amount": 10, "currency": "EUR",
                                                 "timestamp": 0}])
        mint(fp, miners[0], ("fiat", ref0))
        fiat_refs.append(ref0)

        attempts = 10_000
        for _ in range(attempts):
            attack = rng.randrange(6)
            proof, miner, key = rng.choice(spent_proofs)
            try:
                if attack == 0:  # replay a consumed proof
                    mint(proof, miner, key)
                elif attack == 1:  # new proof citing a claimed event
                    if key[0] != "event":
                        continue
                    ev = ledger.event(key[1])
                    kind = ProofKind.BURN if ev.kind is EventKind.BURN else ProofKind.ON_LEDGER
                    dup = registry.new_proof(kind, ev.from_, ev.amount, ev.epoch, event_seq=ev.seq)
                    (registry.verify_burn if kind is ProofKind.BURN else registry.verify_onledger)(
                        dup, ledger)
                    assert dup.status is ProofStatus.REJECTED
                    mint(dup, ev.from_, key)
                elif attack == 2:  # duplicate fiat external_ref
                    ref = rng.choice(fiat_refs)
                    proofs, errors = registry.ingest_fiat_records(
                        [{"external_ref": ref, "payer": "x", "amount": 10, "currency": "EUR",
                          "timestamp": 0}])
                    assert proofs == [] and errors[0].code == "DuplicateExternalRef"
                    blocked += 1
                    continue
                elif attack == 3:  # forged copy of a consumed proof, status reset
                    forged = copy.copy(proof)
                    forged.status = ProofStatus.VERIFIED
                    mint(forged, miner, key)
                elif attack == 4:  # spend a consumed proof on a rig instead
                    rigs.purchase_rig(miner, proof, RigParams())
                    backing[key] = backing.get(key, 0) + 1
                else:  # re-verify a consumed proof, then replay
                    verify = (registry.verify_burn if proof.kind is ProofKind.BURN
                              else registry.verify_onledger)
                    if proof.kind is not ProofKind.FIAT_RECORD:
                        assert verify(proof, ledger) is ProofStatus.CONSUMED
                    mint(proof, miner, key)
            except (ProofAlreadyConsumed, ProofNotVerified, ZeroMint, ValueLoop):
                blocked += 1
        doubles = sum(1 for v in backing.values() if v > 1)
        mints = sum(1 for e in ledger.events if e.kind is EventKind.MINT)
        c["detail"] = f"{blocked} attempts blocked, {doubles} double mints"
        assert doubles == 0
        assert mints == len(backing) == len(spent_proofs)
