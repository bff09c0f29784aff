import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcommit.attacks import (CORRELATION_THRESHOLD, CopyScheme, CorrelatedScheme, CrsScheme,
                             classical_counterexample_scheme, classical_crs_correlated,
                             correlated_attack, crqs_copy_scheme, crs_binding_attack,
                             crs_hiding_attack, crs_tradeoff, efi_crs_scheme,
                             epsilon_correlation, exclusion_scheme, product_distance,
                             random_crs_scheme, sigma_close, unbounded_copy_attack)
from qcommit.commit import SchemeParams
from qcommit.qla import (PureState, RegisterLayout, fidelity, partial_trace, random_state,
                         trace_distance)

CR = RegisterLayout.of(("C", 1), ("R", 1))


def _basis(i, lay=CR):
    v = np.zeros(lay.dim)
    v[i] = 1
    return PureState(v, lay)


# --------------------------------------------------------------------------- CRS

def test_identical_states_trivial(rng):
    s = tuple((random_state(CR, rng),) * 2 for _ in range(3))
    sch = CrsScheme(np.full(3, 1 / 3), s)
    assert abs(crs_hiding_attack(sch)) < 1e-12
    assert abs(crs_binding_attack(sch) - 1) < 1e-9


def test_orthogonal_states_trivial():
    sch = CrsScheme(np.array([1.0]), ((_basis(0), _basis(3)),))
    assert abs(crs_hiding_attack(sch) - 1) < 1e-12
    assert abs(crs_binding_attack(sch)) < 1e-12


def test_efi_scheme_advantage_matches_per_key_oracle():
    sch = efi_crs_scheme(SchemeParams(1, 2, 1))
    ref = sum(p * trace_distance(*sch.reduced(k)) for k, p in enumerate(sch.probs))
    assert abs(crs_hiding_attack(sch) - ref) < 1e-12


@given(st.integers(0, 2**32 - 1))
def test_binding_attack_equals_average_fidelity(seed):
    sch = random_crs_scheme(np.random.default_rng(seed), n_keys=3, qc=2, qr=1)
    ref = sum(p * fidelity(*sch.reduced(k)) for k, p in enumerate(sch.probs))
    assert abs(crs_binding_attack(sch) - ref) < 1e-9
    tr = crs_tradeoff(sch)
    assert tr["certified_holds"]


@given(st.integers(0, 2**32 - 1))
def test_linear_tradeoff_on_qubit_commitments(seed):
    tr = crs_tradeoff(random_crs_scheme(np.random.default_rng(seed)))
    assert tr["linear_holds"] and tr["certified_holds"]


def test_linear_tradeoff_counterexample():
    tr = crs_tradeoff(classical_counterexample_scheme())
    assert abs(tr["success"] - 0.25) < 1e-12
    assert abs(tr["advantage"] - 0.5) < 1e-12
    assert not tr["linear_holds"]
    assert tr["certified_holds"] and abs(tr["certified_rhs"] - 0.25) < 1e-12


def test_crs_scheme_validation(rng):
    with pytest.raises(ValueError):
        CrsScheme(np.array([0.5, 0.6]), ((_basis(0), _basis(1)),) * 2)
    with pytest.raises(ValueError):
        CrsScheme(np.array([1.0]), ())


# --------------------------------------------------------------------------- correlations

def test_epsilon_trivial_cases():
    n = 4
    assert abs(epsilon_correlation(np.eye(n) / n)[0] - 1) < 1e-15
    assert abs(epsilon_correlation(np.full((n, n), 1 / n ** 2))[0] - 1 / n) < 1e-15
    assert list(epsilon_correlation(np.full((n, n), 1 / n ** 2))[1]) == [0] * n


@given(st.integers(0, 2**32 - 1))
def test_epsilon_exhaustive_guess_map_oracle(seed):
    rng = np.random.default_rng(seed)
    D = rng.dirichlet(np.ones(9)).reshape(3, 3)
    best = max(sum(D[g[y], y] for y in range(3)) for g in itertools.product(range(3), repeat=3))
    eps, guess = epsilon_correlation(D)
    assert abs(eps - best) < 1e-12
    assert abs(sum(D[guess[y], y] for y in range(3)) - best) < 1e-12


@given(st.integers(0, 2**32 - 1))
def test_epsilon_invariant_under_relabeling_y(seed):
    rng = np.random.default_rng(seed)
    D = rng.dirichlet(np.ones(12)).reshape(3, 4)
    perm = rng.permutation(4)
    assert abs(epsilon_correlation(D)[0] - epsilon_correlation(D[:, perm])[0]) < 1e-12


def test_product_distance_values():
    assert product_distance(np.full((3, 3), 1 / 9)) < 1e-15
    assert abs(product_distance(np.eye(2) / 2) - 1) < 1e-15


def test_threshold_constant():
    assert abs(CORRELATION_THRESHOLD - (5 - 2 * math.sqrt(2)) / 17) < 1e-15
    assert abs(CORRELATION_THRESHOLD - 0.12774) < 1e-5
    # smaller root of 17 e^2 - 10 e + 1
    assert abs(17 * CORRELATION_THRESHOLD ** 2 - 10 * CORRELATION_THRESHOLD + 1) < 1e-12


def test_correlated_attack_product_limit(rng):
    r = correlated_attack(exclusion_scheme(6, rng, exclude_shift=False))
    assert r["eps_product"] < 1e-12
    assert r["p0"] >= 1 - 1e-7 and r["p1"] >= 1 - 1e-7
    assert r["hiding_adv"] < 1e-9


@pytest.mark.parametrize("n", [8, 12])
def test_exclusion_scheme_properties(n, rng):
    sch = exclusion_scheme(n, rng)
    assert abs(product_distance(sch.dist) - 2 / n) < 1e-12
    r = correlated_attack(sch)
    assert r["correctness"][0] > 1 - 1e-9 and r["correctness"][1] > 1 - 1e-9
    assert r["hiding_adv"] < 1e-9
    assert r["holds_p0"] and r["holds_p1"] and r["certified_holds"]


def test_classical_crs_case_matches_crs_attack(rng):
    sch = classical_crs_correlated(3, rng)
    r = correlated_attack(sch)
    ref = crs_binding_attack(sch.as_crs())
    assert abs(r["p1"] - ref) < 1e-9


def test_correlated_scheme_validation(rng):
    good = exclusion_scheme(4, rng)
    bad_povm = tuple((2 * a, b) for a, b in good.povm)
    with pytest.raises(ValueError):
        CorrelatedScheme(good.dist, good.states, bad_povm)
    with pytest.raises(ValueError):
        good.as_crs()


def test_support_povm_is_projective(rng):
    sch = exclusion_scheme(5, rng)
    for pair in sch.povm:
        for L in pair:
            assert np.allclose(L @ L, L, atol=1e-12)


# --------------------------------------------------------------------------- unbounded copies

def _copy_scheme(refs, commits, rng):
    K = len(refs)
    G = np.array([[abs(np.vdot(a, b)) ** 2 for b in refs] for a in refs])
    accepts = tuple(tuple(np.outer(s.vector, s.vector.conj()) for s in pair) for pair in commits)
    return CopyScheme(np.full(K, 1 / K), G, tuple(commits), accepts)


def test_identical_reference_states(rng):
    pair = (random_state(CR, rng), random_state(CR, rng))
    ref = random_state(CR, rng).vector
    sch = _copy_scheme([ref] * 3, [pair] * 3, rng)
    r = unbounded_copy_attack(sch)
    assert r["kstar"] == [0, 0, 0]
    assert abs(r["identification"] - 1) < 1e-12
    f = fidelity(partial_trace(pair[0], ["C"]), partial_trace(pair[1], ["C"]))
    assert abs(r["p1"] - f) < 1e-9


def test_orthogonal_reference_states(rng):
    refs = [np.eye(4)[i] for i in range(4)]
    commits = [(random_state(CR, rng), random_state(CR, rng)) for _ in range(4)]
    r = unbounded_copy_attack(_copy_scheme(refs, commits, rng))
    assert r["kstar"] == [0, 1, 2, 3]
    tds = [trace_distance(partial_trace(a, ["C"]), partial_trace(b, ["C"])) for a, b in commits]
    assert abs(r["hiding_adv"] - np.mean(tds)) < 1e-9
    assert abs(r["avg_td"] - np.mean(tds)) < 1e-12


def test_hash_scheme_dichotomy():
    r = unbounded_copy_attack(crqs_copy_scheme(SchemeParams(1, 2, 1)))
    assert r["tradeoff_holds"]
    assert abs(r["identification"] - 1) < 1e-12


def test_close_references_give_close_commitments(rng):
    sch = crqs_copy_scheme(SchemeParams(1, 2, 1))
    K = len(sch.weights)
    for _ in range(20):
        k1, k2 = (int(v) for v in rng.integers(0, K, size=2))
        r = sigma_close(sch, k1, k2)
        assert max(r["td"]) <= r["bound"] + 1e-9
