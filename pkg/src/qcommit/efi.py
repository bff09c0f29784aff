"""Sparse hash-image distributions, EFI pairs and the protocol's purified states.

For a table H : {0,1}^lam -> {0,1}^n_out the image distribution is
D(y) = |H^{-1}(y)| / 2^lam. The pair is xi_0 = diag(D) against the maximally
mixed xi_1, and the protocol states purify them on registers X (n_out qubits)
and Y (``y_width`` qubits, holding the zero-padded input).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL, check_pure
from .hashfam import FunctionTable, KWiseFamily
from .qla import DensityOp, PureState, RegisterLayout


@dataclass(frozen=True)
class ClassicalDist:
    probs: np.ndarray
    n_out: int

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (1 << self.n_out,):
            raise ValueError("distribution length must be 2^n_out")
        if p.min() < 0 or abs(p.sum() - 1) > 1e-12:
            raise ValueError("probabilities must be non-negative and sum to 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    def __getitem__(self, y):
        return float(self.probs[y])

    @property
    def support(self):
        return np.flatnonzero(self.probs > 0)


@dataclass(frozen=True)
class EfiPair:
    xi0: DensityOp
    xi1: DensityOp

    def __post_init__(self):
        d0 = self.xi0.matrix
        if np.max(np.abs(d0 - np.diag(np.diag(d0)))) > TOL.structural:
            raise ValueError("xi0 must be diagonal")
        d = len(d0)
        if np.max(np.abs(self.xi1.matrix - np.eye(d) / d)) > TOL.structural:
            raise ValueError("xi1 must be maximally mixed")

    @property
    def n_out(self) -> int:
        return self.xi0.layout.nqubits

    @property
    def dist(self) -> ClassicalDist:
        return ClassicalDist(np.clip(np.diag(self.xi0.matrix).real, 0, None), self.n_out)


def _as_table(H, key=None) -> FunctionTable:
    if isinstance(H, FunctionTable):
        return H
    if isinstance(H, KWiseFamily):
        return H.table(key)
    fam, key = H
    return fam.table(key)


def dist_from_hash(H, key=None) -> ClassicalDist:
    """Image distribution of a table, a (family, key) pair, or family plus ``key``."""
    t = _as_table(H, key)
    counts = np.bincount(np.array(t.outputs), minlength=1 << t.n_out)
    return ClassicalDist(counts / (1 << t.lam), t.n_out)


def sparseness(D: ClassicalDist) -> float:
    return len(D.support) / (1 << D.n_out)


def efi_pair(D: ClassicalDist, name: str = "X") -> EfiPair:
    lay = RegisterLayout.of((name, D.n_out))
    n = 1 << D.n_out
    return EfiPair(DensityOp(np.diag(D.probs), lay), DensityOp(np.eye(n) / n, lay))


def efi_metrics(pair: EfiPair) -> dict:
    """Closed-form trace distance and fidelity for a diagonal pair."""
    p = pair.dist.probs
    u = 1.0 / len(p)
    return {"td": 0.5 * float(np.sum(np.abs(p - u))),
            "fidelity": float(np.sum(np.sqrt(p * u)) ** 2)}


def fidelity_bound(lam: int, n_out: int) -> float:
    """Cauchy-Schwarz ceiling on the pair's fidelity: 2^(lam - n_out)."""
    return 2.0 ** (lam - n_out)


def sparse_prg_bound(size: float, n: float) -> float:
    """Reference number 16 sqrt(2) (S/N)^(1/3); reported only, never asserted."""
    return 16 * np.sqrt(2) * (size / n) ** (1 / 3)


def y_width(lam: int, n_out: int) -> int:
    """Width of the Y register: it must hold both the input x and a copy of y."""
    return max(lam, n_out)


def pair_layout(n_out: int, yw: int, x: str = "X", y: str = "Y") -> RegisterLayout:
    return RegisterLayout.of((x, n_out), (y, yw))


def state_vector_from_table(outputs, lam: int, n_out: int, b: int, yw: int | None = None):
    """Amplitude vector of the protocol state on (X, Y) for a table."""
    yw = y_width(lam, n_out) if yw is None else yw
    dy = 1 << yw
    v = np.zeros((1 << n_out) * dy, dtype=complex)
    if b == 0:
        outputs = np.asarray(outputs, dtype=np.int64)
        v[outputs * dy + np.arange(len(outputs))] = 2.0 ** (-lam / 2)
    elif b == 1:
        y = np.arange(1 << n_out)
        v[y * dy + y] = 2.0 ** (-n_out / 2)
    else:
        raise ValueError("b must be 0 or 1")
    return v


def protocol_state(family_or_table, key=None, b: int = 0, n_out: int | None = None,
                   names=("X", "Y")) -> PureState:
    """The purified commitment state for bit ``b``.

    b = 0: 2^{-lam/2} sum_x |H(x)>_X |x>_Y;  b = 1: 2^{-n_out/2} sum_y |y>_X |y>_Y.
    """
    t = _as_table(family_or_table, key)
    if n_out is not None and n_out != t.n_out:
        raise ValueError("n_out does not match the table")
    yw = y_width(t.lam, t.n_out)
    check_pure(t.n_out + yw)
    lay = pair_layout(t.n_out, yw, *names)
    return PureState(state_vector_from_table(t.outputs, t.lam, t.n_out, b, yw), lay)
