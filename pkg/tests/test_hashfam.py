import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcommit.config import CapExceeded
from qcommit.hashfam import (IRREDUCIBLE, FunctionTable, KWiseFamily, all_tables,
                             enumerate_functions, gf_mul, table_distribution,
                             uniform_function_distribution, verify_kwise)


def _poly_mod(a, b):
    """Remainder of GF(2)[x] polynomials given as ints."""
    db = b.bit_length() - 1
    while a and a.bit_length() - 1 >= db:
        a ^= b << (a.bit_length() - 1 - db)
    return a


def log_tables(w):
    """Antilog/log tables from repeated multiplication by x (x primitive for these w)."""
    poly = IRREDUCIBLE[w]
    n = (1 << w) - 1
    antilog = [1]
    for _ in range(n - 1):
        v = antilog[-1] << 1
        if v >> w:
            v ^= poly
        antilog.append(v)
    assert sorted(antilog) == list(range(1, n + 1)), "x must be primitive"
    log = {v: i for i, v in enumerate(antilog)}
    return antilog, log


def oracle_mul(a, b, w, tables):
    if a == 0 or b == 0:
        return 0
    antilog, log = tables
    return antilog[(log[a] + log[b]) % ((1 << w) - 1)]


@pytest.mark.parametrize("w", sorted(IRREDUCIBLE))
def test_reduction_polynomials_are_irreducible(w):
    p = IRREDUCIBLE[w]
    assert p.bit_length() - 1 == w
    for d in range(1, w // 2 + 1):
        for q in range(1 << d, 1 << (d + 1)):
            assert _poly_mod(p, q) != 0


@pytest.mark.parametrize("w", [2, 3, 4, 5, 6, 7])
def test_gf_mul_matches_log_antilog_oracle(w):
    tabs = log_tables(w)
    a, b = np.meshgrid(np.arange(1 << w), np.arange(1 << w))
    got = gf_mul(a, b, w)
    ref = np.vectorize(lambda x, y: oracle_mul(int(x), int(y), w, tabs))(a, b)
    assert np.array_equal(got, ref)


def test_gf4_evaluation_table_pinned():
    fam = KWiseFamily(2, 2, 2)
    # c0 + c1 x over GF(4) with x^2 = x + 1: key (1, 2) maps 0,1,2,3 -> 1,3,2,0
    assert fam.table((1, 2)).outputs == (1, 3, 2, 0)
    tabs = log_tables(2)
    for key in itertools.product(range(4), repeat=2):
        ref = tuple(key[0] ^ oracle_mul(key[1], x, 2, tabs) for x in range(4))
        assert fam.table(key).outputs == ref


def test_zero_key_and_constant_key():
    fam = KWiseFamily(3, 2, 3)
    assert set(fam.table((0, 0, 0)).outputs) == {0}
    assert set(fam.table((6, 0, 0)).outputs) == {6 & 3}


def test_eval_wrong_input_length():
    fam = KWiseFamily(2, 2, 2)
    with pytest.raises(ValueError):
        fam.eval((1, 2), "101")
    with pytest.raises(ValueError):
        fam.eval((1, 2), 4)
    assert fam.eval((1, 2), "10") == fam.eval((1, 2), 2)


@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.data())
def test_eval_consistent_with_materialized_table(lam, n_out, k, data):
    fam = KWiseFamily(lam, n_out, k)
    key = tuple(data.draw(st.integers(0, (1 << fam.w) - 1)) for _ in range(k))
    tab = fam.table(key)
    for x in range(1 << lam):
        assert tab(x) == fam.eval(key, x)
    assert fam.key_from_index(fam.key_index(key)) == key


def test_key_record_round_trip():
    fam = KWiseFamily(3, 2, 4)
    key = (5, 0, 7, 1)
    fam2, key2 = KWiseFamily.from_record(fam.key_json(key))
    assert fam2 == fam and key2 == key
    rec = fam.key_record(key)
    assert rec["poly"] == "b" and rec["w"] == 3


def test_kwise_k1_uniform_marginals():
    assert verify_kwise(KWiseFamily(2, 2, 1)).passed


def test_kwise_exhaustive_gf8_k4_truncated():
    rep = verify_kwise(KWiseFamily(3, 2, 4))
    assert rep.passed and rep.n_keys == 8 ** 4 and rep.n_subsets == 70


@pytest.mark.parametrize("lam,n_out,k", [(1, 2, 2), (2, 2, 2), (2, 4, 3), (3, 3, 2), (2, 2, 4)])
def test_kwise_exhaustive_small(lam, n_out, k):
    assert verify_kwise(KWiseFamily(lam, n_out, k)).passed


def test_kwise_corrupted_family_reports_violation():
    fam = KWiseFamily(2, 2, 2)
    keys = np.array([(c, c) for c in range(4)] * 4)  # duplicated coefficient
    rep = verify_kwise(fam, keys=keys)
    assert not rep.passed and rep.violations


def test_kwise_sample_mode_needs_seed():
    with pytest.raises(ValueError):
        verify_kwise(KWiseFamily(2, 2, 2), mode="sample")
    rep = verify_kwise(KWiseFamily(3, 2, 2), mode="sample", seed=1, samples=20000)
    assert rep.passed and rep.min_pvalue is not None


def test_kwise_budget(monkeypatch):
    monkeypatch.setenv("QCOMMIT_MAX_KEY_BITS", "8")
    with pytest.raises(CapExceeded):
        verify_kwise(KWiseFamily(3, 2, 4))


@pytest.mark.parametrize("lam,n_out,count", [(1, 1, 4), (2, 2, 256), (3, 2, 65536)])
def test_enumerate_functions_counts(lam, n_out, count):
    tabs = all_tables(lam, n_out)
    assert len(tabs) == count
    assert len({tuple(r) for r in tabs}) == count
    if count <= 256:
        items = list(enumerate_functions(lam, n_out))
        assert len(items) == count
        assert abs(sum(w for _, w in items) - 1) < 1e-12
    assert abs(uniform_function_distribution(lam, n_out).weights.sum() - 1) < 1e-12


def test_enumerate_functions_budget(monkeypatch):
    monkeypatch.setenv("QCOMMIT_MAX_KEY_BITS", "10")
    with pytest.raises(CapExceeded):
        all_tables(3, 2)


def test_table_distribution_groups_keys():
    fam = KWiseFamily(1, 2, 2)
    dist = table_distribution(fam)
    assert abs(dist.weights.sum() - 1) < 1e-12
    # every key's table is listed with its first key index
    for i, k0 in enumerate(dist.first_key):
        assert tuple(dist.tables[i]) == fam.table(fam.key_from_index(int(k0))).outputs
    counts = {}
    for idx in range(fam.n_keys):
        t = fam.table(fam.key_from_index(idx)).outputs
        counts[t] = counts.get(t, 0) + 1
    assert len(counts) == len(dist)
    for t, w in zip(map(tuple, dist.tables), dist.weights):
        assert abs(counts[t] / fam.n_keys - w) < 1e-15


def test_function_table_validation():
    with pytest.raises(ValueError):
        FunctionTable(2, 2, (0, 1, 2))
    with pytest.raises(ValueError):
        FunctionTable(1, 1, (0, 2))
