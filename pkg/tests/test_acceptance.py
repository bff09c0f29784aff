"""Acceptance gate: ten criteria, one PASS/FAIL line each.

Every check is exact (no sampling) and uses the stated tolerance.
"""
import itertools
import math
import time

import numpy as np
import pytest

from qcommit import attacks, commit, efi, hashfam, qla, zk
from qcommit.commit import (CommitterStrategy, ProductCommitment, SchemeParams, envelope,
                            honest_commit, ideal_experiment, output_distance, real_experiment,
                            sum_binding_probe, swap_test_circuit, uhlmann_attacker, verify_prob)
from qcommit.qla import (RegisterLayout, fidelity, partial_trace, purify, random_density,
                         random_state, random_unitary, trace_distance)


@pytest.fixture
def report(capsys):
    """report(n, ok, detail) prints the criterion line past pytest's capture, then asserts."""
    t0 = time.perf_counter()

    def _report(n, ok, detail):
        dt = time.perf_counter() - t0
        with capsys.disabled():
            print(f"\nCRITERION {n}: {'PASS' if ok else 'FAIL'} ({dt:.1f}s) {detail}")
        assert ok, detail
    return _report


# --------------------------------------------------------------------------- 1

def test_criterion_01_correctness(report):
    worst, n_keys, n_tables = 0.0, 0, 0
    for lam, n_out, m in itertools.product((1, 2), (2, 4), (1, 2, 3)):
        p = SchemeParams(lam, n_out, m)
        td = hashfam.table_distribution(p.family)  # every key, grouped by its table
        assert abs(td.weights.sum() - 1) < 1e-12
        n_keys += p.family.n_keys
        for table in td.tables:
            inst = commit.crqs_from_table(p, table)
            for b in (0, 1):
                worst = max(worst, abs(verify_prob(honest_commit(inst, b), b, inst) - 1))
            n_tables += 1
    report(1, worst <= 1e-9,
           f"max |accept - 1| = {worst:.2e} over {n_keys} keys ({n_tables} distinct tables)")


# --------------------------------------------------------------------------- 2

def test_criterion_02_fidelity_bound(report):
    p = SchemeParams(2, 4, 1)
    td = hashfam.table_distribution(p.family)
    worst_excess, inj_dev, n_inj, closed_dev = -1.0, 0.0, 0, 0.0
    for table in td.tables:
        inst = commit.crqs_from_table(p, table)
        f = fidelity(*inst.reduced)
        worst_excess = max(worst_excess, f - 0.25)
        pair = efi.efi_pair(efi.dist_from_hash(hashfam.FunctionTable(2, 4, tuple(table))))
        closed_dev = max(closed_dev, abs(efi.efi_metrics(pair)["fidelity"] - f))
        if len(set(int(v) for v in table)) == 4:
            inj_dev = max(inj_dev, abs(f - 0.25))
            n_inj += 1
    ok = worst_excess <= 1e-9 and inj_dev <= 1e-9 and n_inj > 0 and closed_dev <= 1e-9
    report(2, ok, f"max F - 1/4 = {worst_excess:.2e}; injective tables {n_inj}, "
                  f"max |F - 1/4| = {inj_dev:.2e}; closed form dev {closed_dev:.2e}")


# --------------------------------------------------------------------------- 3

def test_criterion_03_swap_closed_form(report):
    rng = np.random.default_rng(3)
    worst, count = 0.0, 0
    for m in (1, 2):
        p = SchemeParams(1, 2, m)
        inst = commit.crqs(p, p.family.key_from_index(5))
        lay = commit.commit_layout(inst)
        for _ in range(20):  # joint states: entangled across copies for m = 2
            s = random_state(lay, rng)
            b = int(rng.integers(2))
            worst = max(worst, abs(verify_prob(s, b, inst) - swap_test_circuit(s, b, inst)))
            count += 1
        for _ in range(5):
            s = ProductCommitment(tuple(random_state(inst.psi0.layout, rng) for _ in range(m)))
            for b in (0, 1):
                worst = max(worst, abs(verify_prob(s, b, inst) - swap_test_circuit(s, b, inst)))
                count += 1
        if m == 2:
            continue  # two-bit blocks at m = 2 exceed the circuit simulator's qubit cap
        lay2 = commit.commit_layout(inst, nbits=2)
        for _ in range(6):
            s = random_state(lay2, rng)
            bits = tuple(int(v) for v in rng.integers(2, size=2))
            worst = max(worst, abs(verify_prob(s, bits, inst) - swap_test_circuit(s, bits, inst)))
            count += 1
    report(3, worst <= 1e-9 and count >= 50,
           f"max |closed form - circuit| = {worst:.2e} over {count} states")


# --------------------------------------------------------------------------- 4

def test_criterion_04_binding_envelope(report):
    worst_by_m, slack = {}, math.inf
    for m in (1, 2, 3):
        p = SchemeParams(1, 2, m)
        worst = 0.0
        for _, inst in commit.key_instances(p):
            p0, p1 = sum_binding_probe(*uhlmann_attacker(inst), inst)
            slack = min(slack, 1 + envelope(m, inst.epsilon) + 1e-7 - (p0 + p1))
            worst = max(worst, p0 + p1)
        worst_by_m[m] = worst
    decreasing = worst_by_m[1] > worst_by_m[2] > worst_by_m[3]
    vals = ", ".join(f"m={m}: {v:.6f}" for m, v in worst_by_m.items())
    report(4, slack >= 0 and decreasing,
           f"max p0+p1 {vals}; min slack to envelope {slack:.3e} (envelope vacuous at eps=1/2)")


# --------------------------------------------------------------------------- 5

def _random_strategy(inst, rng):
    lay = commit.commit_layout(inst, 1)
    ys = [f"Y{i}" for i in range(1, inst.m + 1)] + ["W"]
    return CommitterStrategy(random_state(lay, rng), int(rng.integers(2)),
                             random_unitary(lay.sub(ys), rng))


def test_criterion_05_extractor_binding(report):
    rng = np.random.default_rng(5)
    p = SchemeParams(1, 2, 2)
    insts = [inst for _, inst in commit.key_instances(p)]
    makers = [lambda inst: uhlmann_attacker(inst)[1]]
    seeds = [int(s) for s in rng.integers(1 << 31, size=10)]
    makers += [lambda inst, s=s: _random_strategy(inst, np.random.default_rng(s)) for s in seeds]
    worst_gap = worst_fail = 0.0
    slack = math.inf
    for make in makers:
        for inst in insts:
            s = make(inst)
            real, ideal = real_experiment(s, inst), ideal_experiment(s, inst)
            gap, fail = output_distance(real, ideal), ideal.prob(commit.FAIL)
            bound = envelope(2, inst.epsilon) + 1e-7
            slack = min(slack, bound - gap, bound - fail)
            worst_gap, worst_fail = max(worst_gap, gap), max(worst_fail, fail)
    report(5, slack >= 0,
           f"{len(makers)} strategies x {len(insts)} tables: max gap {worst_gap:.4f}, "
           f"max fail {worst_fail:.4f}, min slack {slack:.3e}")


# --------------------------------------------------------------------------- 6

def test_criterion_06_family_matches_random_functions(report):
    p = SchemeParams(3, 2, 1, 1)
    assert p.family.n_keys == 4096 and hashfam.n_functions_bits(3, 2) == 16
    td = max(commit.view_distance(commit.hiding_view(p, b, "family"),
                                  commit.hiding_view(p, b, "all-functions")) for b in (0, 1))
    # discriminating power: a pairwise family is distinguishable from random functions
    weak = SchemeParams(3, 2, 1, 1, k_override=2)
    td_weak = commit.view_distance(commit.hiding_view(weak, 0, "family"),
                                   commit.hiding_view(weak, 0, "all-functions"))
    report(6, td <= 1e-9 and td_weak > 1e-3,
           f"TD(family, all functions) = {td:.2e} (4096 keys vs 65536 tables); "
           f"pairwise family TD = {td_weak:.4f}")


# --------------------------------------------------------------------------- 7

def test_criterion_07_crs_tradeoff(report):
    rng = np.random.default_rng(7)
    corpus = [("efi-lambda1", attacks.efi_crs_scheme(SchemeParams(1, 2, 1)))]
    corpus += [(f"random{i}", attacks.random_crs_scheme(rng, n_keys=int(rng.integers(1, 6))))
               for i in range(10)]
    fid_dev, lin_slack = 0.0, math.inf
    for _, sch in corpus:
        tr = attacks.crs_tradeoff(sch)
        favg = sum(p * fidelity(*sch.reduced(k)) for k, p in enumerate(sch.probs))
        fid_dev = max(fid_dev, abs(tr["success"] - favg))
        lin_slack = min(lin_slack, tr["success"] - (1 - tr["advantage"]))
    report(7, fid_dev <= 1e-9 and lin_slack >= -1e-9,
           f"{len(corpus)} schemes: max |success - sum p F| = {fid_dev:.2e}, "
           f"min success - (1 - adv) = {lin_slack:.3e}")


# --------------------------------------------------------------------------- 8

def test_criterion_08_correlated(report):
    rng = np.random.default_rng(8)
    cases = [(0.0, attacks.exclusion_scheme(20, rng, exclude_shift=False)),
             (0.05, attacks.exclusion_scheme(40, rng)),
             (0.10, attacks.exclusion_scheme(20, rng))]
    ok, parts = True, []
    for target, sch in cases:
        r = attacks.correlated_attack(sch)
        e = r["eps_product"]
        b0 = 1 - 2 * e - 1e-7
        b1 = 1 - math.sqrt(2 * e - e * e) - 2 * e - 1e-7
        ok &= abs(e - target) < 1e-12 and r["p0"] >= b0 and r["p1"] >= b1
        parts.append(f"eps'={e:.2f}: p0={r['p0']:.4f}>={b0:.4f}, p1={r['p1']:.4f}>={b1:.4f}")
    th = attacks.CORRELATION_THRESHOLD
    ok &= abs(th - (5 - 2 * math.sqrt(2)) / 17) < 1e-12 and abs(th - 0.12774) <= 1e-5
    report(8, ok, "; ".join(parts) + f"; threshold {th:.6f}")


# --------------------------------------------------------------------------- 9

def test_criterion_09_zk(report):
    rng = np.random.default_rng(9)
    comp_dev = 0.0
    for lam, m in ((1, 1), (1, 2), (2, 1)):
        p = SchemeParams(lam, 2, m)
        inst = commit.crqs(p, p.family.key_from_index(1))
        for n in (3, 4):
            G = zk.Graph.complete(n)
            for order in G.hamiltonian_cycles():
                res = zk.completeness(G, zk.HamiltonianCycle(order), inst, rng=rng)
                comp_dev = max(comp_dev, abs(res[0] - 1), abs(res[1] - 1))

    G4 = zk.Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 2)])
    assert not G4.hamiltonian_cycles()
    perm = (2, 0, 3, 1)
    sound_slack = math.inf
    n_provers = 0
    for m in (1, 2):
        p = SchemeParams(1, 2, m)
        inst = commit.crqs(p, p.family.key_from_index(0))
        provers = [zk.honest_style_prover(G4, inst, perm), zk.fake_graph_prover(G4, inst, perm),
                   zk.uhlmann_prover(G4, inst, perm)]
        provers += [zk.random_prover(G4, inst, perm, rng) for _ in range(3)]
        provers.append(zk.random_prover(G4, inst, perm, rng, joint=(0, 1)))
        for prover in provers:
            r = zk.soundness_experiment(prover, G4, inst)
            sound_slack = min(sound_slack, 0.5 + r["gap_sum"] + 1e-7 - r["acceptance"])
            n_provers += 1

    p = SchemeParams(1, 2, 1)
    inst = commit.crqs(p, p.family.key_from_index(0))
    K4, H = zk.Graph.complete(4), zk.HamiltonianCycle((0, 1, 2, 3))
    tdb = 0.5 * np.abs(np.linalg.eigvalsh(inst.reduced[0].matrix - inst.reduced[1].matrix)).sum()
    halt_slack = 1e-9 - abs(zk.simulator(zk.ChallengeVerifier(0.5), K4, H, inst)["halt"] - 0.5)
    d = len(inst.reduced[0].matrix)
    for j in range(6):
        A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        _, v = np.linalg.eigh(A + A.conj().T)
        E = (v * rng.uniform(size=d)) @ v.conj().T
        r = zk.simulator(zk.ChallengeVerifier(position=j, effect=E), K4, H, inst)
        halt_slack = min(halt_slack, 0.5 * tdb + 1e-9 - abs(r["halt"] - 0.5))
    ok = comp_dev <= 1e-9 and sound_slack >= 0 and halt_slack >= 0
    report(9, ok, f"completeness dev {comp_dev:.2e}; {n_provers} provers, min soundness slack "
                  f"{sound_slack:.3e}; min halt slack {halt_slack:.3e} (hiding term {0.5 * tdb:.4f})")


# --------------------------------------------------------------------------- 10

N_INVARIANT = 100


def _random_pair(rng):
    q = int(rng.integers(1, 4))
    lay = RegisterLayout.of(("A", q))
    return (random_density(lay, rng, rank=int(rng.integers(1, 2 ** q + 1))),
            random_density(lay, rng, rank=int(rng.integers(1, 2 ** q + 1))))


def test_criterion_10_invariants(report):
    rng = np.random.default_rng(10)
    tol = 1e-9
    fails = {}

    def check(name, ok):
        fails.setdefault(name, 0)
        fails[name] += not ok

    for _ in range(N_INVARIANT):
        # Fuchs-van de Graaf sandwich
        rho, sigma = _random_pair(rng)
        F, T = fidelity(rho, sigma), trace_distance(rho, sigma)
        check("fvdg", 1 - math.sqrt(F) - tol <= T <= math.sqrt(max(0.0, 1 - F)) + tol)

        # purification round trip
        psi = purify(rho, "P")
        check("purify", np.max(np.abs(partial_trace(psi, ["A"]).matrix - rho.matrix)) <= tol)

        # Uhlmann optimality: achieved overlap^2 = F and no random unitary beats it
        p0, p1 = purify(rho, "P"), purify(sigma, "P")
        U = qla.uhlmann_unitary(p0, p1, ["P"])
        ach = abs(np.vdot(p1.vector, qla.apply(U, p0).vector)) ** 2
        rand = abs(np.vdot(p1.vector, qla.apply(random_unitary(p0.layout.sub(["P"]), rng),
                                                 p0).vector)) ** 2
        check("uhlmann", abs(ach - F) <= tol and rand <= ach + tol)

        # k-wise exactness: outputs on k distinct inputs are jointly uniform over keys
        lam = int(rng.integers(1, 4))
        n_out = int(rng.integers(1, 4))
        k = int(rng.integers(1, 4))
        fam = hashfam.KWiseFamily(lam, n_out, k)
        if fam.key_bits <= 16:
            tabs = fam.eval_keys(fam.keys_range(0, fam.n_keys))
            kk = min(k, 1 << lam)
            xs = rng.choice(1 << lam, size=kk, replace=False)
            codes = np.zeros(len(tabs), dtype=np.int64)
            for x in xs:
                codes = (codes << n_out) | tabs[:, x].astype(np.int64)
            counts = np.bincount(codes, minlength=1 << (n_out * kk))
            check("kwise", np.all(counts == fam.n_keys >> (n_out * kk)))
        else:
            check("kwise", hashfam.verify_kwise(fam, "exhaustive").passed)

        # EFI pair: closed forms agree with the dense functionals and respect the ceiling
        elam, eno = int(rng.integers(1, 3)), int(rng.integers(2, 5))
        table = hashfam.FunctionTable(elam, eno, tuple(int(v) for v in
                                                      rng.integers(1 << eno, size=1 << elam)))
        pair = efi.efi_pair(efi.dist_from_hash(table))
        met = efi.efi_metrics(pair)
        check("efi", abs(met["fidelity"] - fidelity(pair.xi0, pair.xi1)) <= tol and
              abs(met["td"] - trace_distance(pair.xi0, pair.xi1)) <= tol and
              met["fidelity"] <= efi.fidelity_bound(elam, eno) + tol)

    ok = all(v == 0 for v in fails.values())
    report(10, ok, f"{N_INVARIANT} instances each; failures: " +
           ", ".join(f"{k}={v}" for k, v in fails.items()))
