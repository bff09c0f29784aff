"""k-wise independent hash families over GF(2^w) and exhaustive function spaces.

A key is a coefficient vector (c_0, ..., c_{k-1}) over GF(2^w) and the hash of
an input x is the low ``n_out`` bits of c_0 + c_1 x + ... + c_{k-1} x^{k-1},
with x embedded into the field by zero padding. Keys are indexed by the
integer sum_i c_i 2^{w i}, so index order is lexicographic with c_0 fastest.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import chisquare

from .config import check_keys

# x^w + ... reduction polynomials, one fixed irreducible per width
IRREDUCIBLE = {
    1: 0b11,          # x + 1
    2: 0b111,         # x^2 + x + 1
    3: 0b1011,        # x^3 + x + 1
    4: 0b10011,       # x^4 + x + 1
    5: 0b100101,      # x^5 + x^2 + 1
    6: 0b1000011,     # x^6 + x + 1
    7: 0b10000011,    # x^7 + x + 1
    8: 0x11B,         # x^8 + x^4 + x^3 + x + 1
    9: 0x211,         # x^9 + x^4 + 1
    10: 0x409,        # x^10 + x^3 + 1
    11: 0x805,        # x^11 + x^2 + 1
    12: 0x1053,       # x^12 + x^6 + x^4 + x + 1
    13: 0x201B,       # x^13 + x^4 + x^3 + x + 1
    14: 0x4443,       # x^14 + x^10 + x^6 + x + 1
    15: 0x8003,       # x^15 + x + 1
    16: 0x1100B,      # x^16 + x^12 + x^3 + x + 1
}


def gf_mul(a, b, w: int):
    """Carry-less multiply then reduce modulo the width-w polynomial.

    Works elementwise on integers or integer arrays.
    """
    poly = IRREDUCIBLE[w]
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    acc = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
    top = 1 << w
    for _ in range(w):
        acc ^= np.where(b & 1, a, 0)
        b = b >> 1
        a = a << 1
        a = np.where(a & top, a ^ poly, a)
    return acc if acc.ndim else int(acc)


@lru_cache(maxsize=None)
def _mul_by(w: int, x: int) -> np.ndarray:
    """Lookup table a -> a * x over GF(2^w)."""
    t = gf_mul(np.arange(1 << w), x, w)
    t = np.asarray(t, dtype=np.int64)
    t.setflags(write=False)
    return t


@dataclass(frozen=True)
class FunctionTable:
    lam: int
    n_out: int
    outputs: tuple

    def __post_init__(self):
        out = tuple(int(v) for v in self.outputs)
        if len(out) != 1 << self.lam:
            raise ValueError(f"table needs {1 << self.lam} entries, got {len(out)}")
        if any(v < 0 or v >= 1 << self.n_out for v in out):
            raise ValueError("table output out of range")
        object.__setattr__(self, "outputs", out)

    def __call__(self, x) -> int:
        return self.outputs[_parse_input(x, self.lam)]

    @property
    def code(self) -> int:
        return table_code(np.array(self.outputs), self.n_out)


def _parse_input(x, nbits: int) -> int:
    if isinstance(x, str):
        if len(x) != nbits or set(x) - {"0", "1"}:
            raise ValueError(f"expected a {nbits}-bit string, got {x!r}")
        return int(x, 2)
    x = int(x)
    if not 0 <= x < 1 << nbits:
        raise ValueError(f"input {x} does not fit in {nbits} bits")
    return x


def table_code(outputs: np.ndarray, n_out: int):
    """Pack table rows into integers: sum_x out[x] << (n_out * x)."""
    outputs = np.asarray(outputs, dtype=np.int64)
    shifts = n_out * np.arange(outputs.shape[-1], dtype=np.int64)
    return np.bitwise_or.reduce(outputs << shifts, axis=-1)


def decode_tables(codes: np.ndarray, lam: int, n_out: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    shifts = n_out * np.arange(1 << lam, dtype=np.int64)
    return (codes[..., None] >> shifts) & ((1 << n_out) - 1)


@dataclass(frozen=True)
class KWiseFamily:
    lam: int
    n_out: int
    k: int

    def __post_init__(self):
        if self.lam < 1 or self.n_out < 1 or self.k < 1:
            raise ValueError("lam, n_out and k must be positive")
        if self.w > 16:
            raise ValueError("field widths above 16 bits are not supported")

    @property
    def w(self) -> int:
        return max(self.lam, self.n_out)

    @property
    def poly(self) -> int:
        return IRREDUCIBLE[self.w]

    @property
    def key_bits(self) -> int:
        return self.w * self.k

    @property
    def n_keys(self) -> int:
        return 1 << self.key_bits

    @property
    def domain(self) -> int:
        return 1 << self.lam

    def key_from_index(self, idx: int) -> tuple:
        if not 0 <= idx < self.n_keys:
            raise ValueError("key index out of range")
        mask = (1 << self.w) - 1
        return tuple((idx >> (self.w * i)) & mask for i in range(self.k))

    def key_index(self, key) -> int:
        key = self._check_key(key)
        return sum(c << (self.w * i) for i, c in enumerate(key))

    def _check_key(self, key) -> tuple:
        key = tuple(int(c) for c in key)
        if len(key) != self.k or any(c < 0 or c >= 1 << self.w for c in key):
            raise ValueError(f"key must be {self.k} coefficients below 2^{self.w}")
        return key

    def eval(self, key, x) -> int:
        key = self._check_key(key)
        x = _parse_input(x, self.lam)
        acc = 0
        for c in reversed(key):
            acc = gf_mul(acc, x, self.w) ^ c
        return acc & ((1 << self.n_out) - 1)

    def table(self, key) -> FunctionTable:
        key = self._check_key(key)
        return FunctionTable(self.lam, self.n_out,
                             self.eval_keys(np.array([key]))[0])

    def eval_keys(self, keys: np.ndarray) -> np.ndarray:
        """Vectorized tables for a (N, k) coefficient array -> (N, 2^lam)."""
        keys = np.asarray(keys, dtype=np.int64)
        out = np.empty((len(keys), self.domain), dtype=np.int64)
        mask = (1 << self.n_out) - 1
        for x in range(self.domain):
            mul = _mul_by(self.w, x)
            acc = keys[:, -1].copy()
            for i in range(self.k - 2, -1, -1):
                acc = mul[acc] ^ keys[:, i]
            out[:, x] = acc & mask
        return out

    def keys_range(self, start: int, stop: int) -> np.ndarray:
        idx = np.arange(start, stop, dtype=np.int64)
        mask = (1 << self.w) - 1
        return np.stack([(idx >> (self.w * i)) & mask for i in range(self.k)], axis=1)

    def iter_key_chunks(self, chunk: int = 1 << 20):
        """All keys in index order, as (start, coefficient array) chunks."""
        check_keys(self.key_bits)
        for s in range(0, self.n_keys, chunk):
            yield s, self.keys_range(s, min(s + chunk, self.n_keys))

    # serialization -------------------------------------------------------
    def key_record(self, key) -> dict:
        idx = self.key_index(key)
        width = max(1, (self.key_bits + 3) // 4)
        return {"lambda_in": self.lam, "n_out": self.n_out, "w": self.w, "k": self.k,
                "key": format(idx, f"0{width}x"), "poly": format(self.poly, "x")}

    def key_json(self, key) -> str:
        return json.dumps(self.key_record(key), sort_keys=True)

    @classmethod
    def from_record(cls, rec) -> tuple:
        if isinstance(rec, str):
            rec = json.loads(rec)
        fam = cls(int(rec["lambda_in"]), int(rec["n_out"]), int(rec["k"]))
        if int(rec["w"]) != fam.w or int(rec["poly"], 16) != fam.poly:
            raise ValueError("record field parameters do not match this implementation")
        return fam, fam.key_from_index(int(rec["key"], 16))


@dataclass(frozen=True)
class TableDistribution:
    """Distinct function tables reached by a key distribution, with weights.

    ``first_key`` holds the smallest key index producing each table.
    """
    lam: int
    n_out: int
    tables: np.ndarray
    weights: np.ndarray
    first_key: np.ndarray

    def __len__(self):
        return len(self.weights)

    def table(self, i) -> FunctionTable:
        return FunctionTable(self.lam, self.n_out, self.tables[i])


@lru_cache(maxsize=32)
def table_distribution(family: KWiseFamily) -> TableDistribution:
    """Exhaustive key enumeration grouped by the function table each key induces."""
    check_keys(family.key_bits)
    counts: dict = {}
    first: dict = {}
    for start, keys in family.iter_key_chunks():
        codes = table_code(family.eval_keys(keys), family.n_out)
        uniq, idx, cnt = np.unique(codes, return_index=True, return_counts=True)
        for c, i, n in zip(uniq.tolist(), idx.tolist(), cnt.tolist()):
            counts[c] = counts.get(c, 0) + n
            if c not in first:
                first[c] = start + i
    codes = np.array(sorted(counts), dtype=np.int64)
    w = np.array([counts[c] for c in codes.tolist()], dtype=float) / family.n_keys
    fk = np.array([first[c] for c in codes.tolist()], dtype=np.int64)
    return TableDistribution(family.lam, family.n_out,
                             decode_tables(codes, family.lam, family.n_out), w, fk)


def n_functions_bits(lam: int, n_out: int) -> int:
    return n_out * (1 << lam)


def all_tables(lam: int, n_out: int) -> np.ndarray:
    """Every table {0,1}^lam -> {0,1}^n_out as rows, in code order."""
    bits = n_functions_bits(lam, n_out)
    check_keys(bits, "function space")
    return decode_tables(np.arange(1 << bits, dtype=np.int64), lam, n_out)


def enumerate_functions(lam: int, n_out: int):
    """Yield (FunctionTable, weight) over the whole function space, uniform weight."""
    tabs = all_tables(lam, n_out)
    wt = 1.0 / len(tabs)
    for row in tabs:
        yield FunctionTable(lam, n_out, row), wt


def uniform_function_distribution(lam: int, n_out: int) -> TableDistribution:
    tabs = all_tables(lam, n_out)
    n = len(tabs)
    return TableDistribution(lam, n_out, tabs, np.full(n, 1.0 / n), np.arange(n))


@dataclass
class KWiseReport:
    passed: bool
    mode: str
    subset_size: int
    n_subsets: int
    n_keys: int
    violations: list
    min_pvalue: float | None = None

    def to_dict(self):
        return {"passed": self.passed, "mode": self.mode, "subset_size": self.subset_size,
                "n_subsets": self.n_subsets, "n_keys": self.n_keys,
                "violations": self.violations, "min_pvalue": self.min_pvalue}


def verify_kwise(family: KWiseFamily, mode: str = "exhaustive", keys=None,
                 samples: int = 4096, seed=None, max_report: int = 5) -> KWiseReport:
    """Check that every k-subset of inputs has exactly uniform joint outputs.

    ``keys`` overrides the key multiset (an (N, k) coefficient array), which is
    how corrupted families are fed in. When k exceeds the domain size the whole
    domain is the only subset checked.
    """
    r = min(family.k, family.domain)
    subsets = list(itertools.combinations(range(family.domain), r))
    nbins = 1 << (family.n_out * r)
    counts = np.zeros((len(subsets), nbins), dtype=np.int64)

    if keys is not None:
        chunks = [np.asarray(keys, dtype=np.int64)]
    elif mode == "exhaustive":
        chunks = (c for _, c in family.iter_key_chunks())
    elif mode == "sample":
        if seed is None:
            raise ValueError("sample mode requires a seed")
        rng = np.random.default_rng(seed)
        chunks = [rng.integers(0, 1 << family.w, size=(samples, family.k))]
    else:
        raise ValueError(f"unknown mode {mode!r}")

    shifts = family.n_out * np.arange(r, dtype=np.int64)
    n = 0
    for ch in chunks:
        out = family.eval_keys(ch)
        n += len(ch)
        for j, s in enumerate(subsets):
            code = np.bitwise_or.reduce(out[:, list(s)] << shifts, axis=1)
            counts[j] += np.bincount(code, minlength=nbins)

    violations = []
    if mode == "sample" and keys is None:
        pvals = [float(chisquare(c).pvalue) for c in counts]
        pmin = min(pvals)
        passed = pmin > 1e-3 / len(subsets)
        return KWiseReport(passed, mode, r, len(subsets), n, violations, pmin)
    for j, s in enumerate(subsets):
        c = counts[j]
        if c.min() != c.max():
            if len(violations) < max_report:
                violations.append({"inputs": list(s), "min_count": int(c.min()),
                                   "max_count": int(c.max())})
    bad = int(np.sum(counts.min(axis=1) != counts.max(axis=1)))
    return KWiseReport(bad == 0, "exhaustive" if keys is None else "keys", r,
                       len(subsets), n, violations)
