import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcommit.efi import (ClassicalDist, dist_from_hash, efi_metrics, efi_pair,
                         fidelity_bound, protocol_state, sparse_prg_bound, sparseness)
from qcommit.hashfam import FunctionTable, KWiseFamily, table_distribution
from qcommit.qla import DensityOp, fidelity, partial_trace, trace_distance

INJ = FunctionTable(2, 4, (0, 3, 5, 9))


def test_constant_hash_point_mass():
    D = dist_from_hash(FunctionTable(2, 3, (5, 5, 5, 5)))
    assert D[5] == 1 and sparseness(D) == 1 / 8
    m = efi_metrics(efi_pair(D))
    assert abs(m["td"] - (1 - 1 / 8)) < 1e-15


def test_injective_hash_uniform_on_image():
    D = dist_from_hash(INJ)
    assert list(D.support) == [0, 3, 5, 9]
    assert np.allclose(D.probs[D.support], 0.25)
    assert sparseness(D) == 0.25


def test_injective_fidelity_equals_bound():
    m = efi_metrics(efi_pair(dist_from_hash(INJ)))
    assert abs(m["fidelity"] - 0.25) < 1e-15
    assert fidelity_bound(2, 4) == 0.25


def test_uniform_distribution_metrics():
    m = efi_metrics(efi_pair(ClassicalDist(np.full(8, 1 / 8), 3)))
    assert abs(m["td"]) < 1e-15 and abs(m["fidelity"] - 1) < 1e-12


def test_dist_from_family_key():
    fam = KWiseFamily(2, 3, 2)
    key = (3, 5)
    a = dist_from_hash(fam, key).probs
    b = dist_from_hash((fam, key)).probs
    assert np.array_equal(a, b)


@given(st.integers(0, 2**32 - 1))
def test_histogram_counting_oracle(seed):
    rng = np.random.default_rng(seed)
    out = tuple(int(v) for v in rng.integers(0, 8, size=4))
    D = dist_from_hash(FunctionTable(2, 3, out))
    for y in range(8):
        assert D[y] == sum(1 for v in out if v == y) / 4
    assert sparseness(D) == len(set(out)) / 8


@given(st.integers(0, 2**32 - 1))
def test_sparseness_counting_oracle_lambda3(seed):
    rng = np.random.default_rng(seed)
    out = rng.integers(0, 16, size=8)
    assert sparseness(dist_from_hash(FunctionTable(3, 4, out))) == len(set(out.tolist())) / 16


@given(st.integers(0, 2**32 - 1))
def test_metrics_match_qla_functionals(seed):
    rng = np.random.default_rng(seed)
    out = rng.integers(0, 8, size=4)
    pair = efi_pair(dist_from_hash(FunctionTable(2, 3, out)))
    m = efi_metrics(pair)
    assert abs(m["td"] - trace_distance(pair.xi0, pair.xi1)) < 1e-12
    assert abs(m["fidelity"] - fidelity(pair.xi0, pair.xi1)) < 1e-9


@pytest.mark.parametrize("lam,n_out", [(1, 2), (2, 3), (2, 4), (3, 4)])
def test_fidelity_bound_every_key(lam, n_out):
    fam = KWiseFamily(lam, n_out, 2)
    for tab in table_distribution(fam).tables:
        f = efi_metrics(efi_pair(dist_from_hash(FunctionTable(lam, n_out, tab))))["fidelity"]
        assert f <= fidelity_bound(lam, n_out) + 1e-12


def test_pair_validation():
    from qcommit.efi import EfiPair
    from qcommit.qla import RegisterLayout
    lay = RegisterLayout.of(("X", 1))
    with pytest.raises(ValueError):
        EfiPair(DensityOp(np.full((2, 2), 0.5), lay), DensityOp(np.eye(2) / 2, lay))
    with pytest.raises(ValueError):
        EfiPair(DensityOp(np.eye(2) / 2, lay), DensityOp(np.diag([1.0, 0.0]), lay))


def test_classical_dist_validation():
    with pytest.raises(ValueError):
        ClassicalDist(np.array([0.5, 0.6]), 1)
    with pytest.raises(ValueError):
        ClassicalDist(np.array([1.0]), 1)


def test_protocol_state_b1_maximally_entangled():
    s = protocol_state(INJ, b=1)
    red = partial_trace(s, ["X"]).matrix
    assert np.allclose(red, np.eye(16) / 16)


def test_protocol_state_injective_b0_rank():
    s = protocol_state(INJ, b=0)
    w = np.linalg.eigvalsh(partial_trace(s, ["X"]).matrix)
    nz = w[w > 1e-12]
    assert len(nz) == 4 and np.allclose(nz, 0.25)


@given(st.integers(0, 2**32 - 1))
def test_protocol_state_reduces_to_efi_pair(seed):
    rng = np.random.default_rng(seed)
    fam = KWiseFamily(2, 3, 2)
    key = tuple(int(c) for c in rng.integers(0, 1 << fam.w, size=2))
    pair = efi_pair(dist_from_hash(fam, key))
    for b, xi in ((0, pair.xi0), (1, pair.xi1)):
        red = partial_trace(protocol_state(fam, key, b), ["X"])
        assert np.max(np.abs(red.matrix - xi.matrix)) < 1e-12


def test_protocol_state_y_register_width():
    # Y must hold both x (lam bits) and y (n_out bits)
    s = protocol_state(FunctionTable(3, 2, (0, 1, 2, 3, 0, 1, 2, 3)), b=0)
    assert s.layout.qubits("Y") == 3
    assert protocol_state(INJ, b=0).layout.qubits("Y") == 4


def test_protocol_state_n_out_mismatch():
    with pytest.raises(ValueError):
        protocol_state(INJ, b=0, n_out=3)


def test_sparse_prg_reference_number():
    assert abs(sparse_prg_bound(1, 8) - 16 * np.sqrt(2) / 2) < 1e-12
