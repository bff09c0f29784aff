"""Exact finite-dimensional quantum linear algebra on named registers.

States carry a :class:`RegisterLayout`. Amplitude indices follow numpy C order
over the registers in declaration order, so the first declared register is the
slowest-varying axis and ``tensor(a, b)`` is ``np.kron(a, b)``. Inside a
register the computational basis state ``|v>`` sits at index ``v``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.stats import unitary_group

from .config import TOL, check_dense, check_pure


# --------------------------------------------------------------------------- #
# layouts

@dataclass(frozen=True)
class RegisterLayout:
    registers: tuple

    def __post_init__(self):
        regs = tuple((str(n), int(q)) for n, q in self.registers)
        object.__setattr__(self, "registers", regs)
        names = [n for n, _ in regs]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate register names in {names}")
        for n, q in regs:
            if q < 1:
                raise ValueError(f"register {n!r} must have at least one qubit")

    @classmethod
    def of(cls, *pairs) -> "RegisterLayout":
        return cls(tuple(pairs))

    @property
    def names(self) -> tuple:
        return tuple(n for n, _ in self.registers)

    @property
    def nqubits(self) -> int:
        return sum(q for _, q in self.registers)

    @property
    def dim(self) -> int:
        return 1 << self.nqubits

    @property
    def dims(self) -> tuple:
        return tuple(1 << q for _, q in self.registers)

    def qubits(self, name: str) -> int:
        return dict(self.registers)[self._check(name)]

    def index(self, name: str) -> int:
        return self.names.index(self._check(name))

    def _check(self, name):
        if name not in self.names:
            raise KeyError(f"unknown register {name!r}; layout has {self.names}")
        return name

    def sub(self, names: Iterable[str]) -> "RegisterLayout":
        """Sub-layout with the given registers, in the order given."""
        names = list(names)
        for n in names:
            self._check(n)
        q = dict(self.registers)
        return RegisterLayout(tuple((n, q[n]) for n in names))

    def ordered(self, names: Iterable[str]) -> list:
        """The given names sorted into declaration order."""
        names = set(names)
        for n in names:
            self._check(n)
        return [n for n in self.names if n in names]

    def without(self, names: Iterable[str]) -> "RegisterLayout":
        drop = set(names)
        for n in drop:
            self._check(n)
        return RegisterLayout(tuple(r for r in self.registers if r[0] not in drop))

    def __add__(self, other: "RegisterLayout") -> "RegisterLayout":
        clash = set(self.names) & set(other.names)
        if clash:
            raise ValueError(f"register name collision: {sorted(clash)}")
        return RegisterLayout(self.registers + other.registers)


# --------------------------------------------------------------------------- #
# value types

def _as_complex(a):
    return np.ascontiguousarray(np.asarray(a, dtype=complex))


@dataclass(frozen=True)
class PureState:
    """Amplitude vector on a layout. ``subnormalized`` marks branch vectors."""
    vector: np.ndarray
    layout: RegisterLayout
    subnormalized: bool = False

    def __post_init__(self):
        check_pure(self.layout.nqubits)
        v = _as_complex(self.vector)
        if v.shape != (self.layout.dim,):
            raise ValueError(f"vector shape {v.shape} does not match layout dim {self.layout.dim}")
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)
        if not self.subnormalized:
            nrm = np.linalg.norm(v)
            if abs(nrm - 1) > TOL.structural:
                raise ValueError(f"state norm {nrm!r} is not 1")

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.vector, self.vector).real)

    def density(self) -> "DensityOp":
        check_dense(self.layout.nqubits)
        return DensityOp(np.outer(self.vector, self.vector.conj()), self.layout,
                         subnormalized=self.subnormalized)

    def reorder(self, names: Sequence[str]) -> "PureState":
        """Same state with registers permuted into the order ``names``."""
        names = list(names)
        if sorted(names) != sorted(self.layout.names):
            raise ValueError("reorder needs a permutation of all registers")
        t = self.vector.reshape(self.layout.dims)
        t = np.transpose(t, [self.layout.index(n) for n in names])
        return PureState(t.reshape(-1), self.layout.sub(names), self.subnormalized)


@dataclass(frozen=True)
class DensityOp:
    """Hermitian operator on a layout; unit trace unless ``subnormalized``.

    Construction checks hermiticity and trace. Positivity is checked by the
    functionals that diagonalize anyway (``fidelity``, ``purify``) and by
    :meth:`check_psd`.
    """
    matrix: np.ndarray
    layout: RegisterLayout
    subnormalized: bool = False

    def __post_init__(self):
        check_dense(self.layout.nqubits)
        a = _as_complex(self.matrix)
        d = self.layout.dim
        if a.shape != (d, d):
            raise ValueError(f"matrix shape {a.shape} does not match layout dim {d}")
        if np.max(np.abs(a - a.conj().T), initial=0.0) > TOL.structural:
            raise ValueError("density operator is not Hermitian")
        a = (a + a.conj().T) / 2
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)
        if not self.subnormalized:
            tr = np.trace(a).real
            if abs(tr - 1) > TOL.structural:
                raise ValueError(f"trace {tr!r} is not 1")

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def check_psd(self) -> "DensityOp":
        w = np.linalg.eigvalsh(self.matrix)
        if w[0] < -TOL.structural:
            raise ValueError(f"operator is not PSD (min eigenvalue {w[0]:.3e})")
        return self


@dataclass(frozen=True)
class Projector:
    matrix: np.ndarray
    layout: RegisterLayout

    def __post_init__(self):
        p = _as_complex(self.matrix)
        if p.shape != (self.layout.dim, self.layout.dim):
            raise ValueError("projector shape does not match layout")
        if np.max(np.abs(p - p.conj().T), initial=0.0) > TOL.structural:
            raise ValueError("projector is not Hermitian")
        if np.max(np.abs(p @ p - p), initial=0.0) > TOL.structural:
            raise ValueError("projector is not idempotent")
        p.setflags(write=False)
        object.__setattr__(self, "matrix", p)


@dataclass(frozen=True)
class ThreeOutcomeMeasurement:
    """Projective measurement {P0, P1, Pbot} on ``layout``."""
    p0: Projector
    p1: Projector
    pbot: Projector

    def __post_init__(self):
        if not (self.p0.layout == self.p1.layout == self.pbot.layout):
            raise ValueError("outcome projectors act on different registers")
        tot = self.p0.matrix + self.p1.matrix + self.pbot.matrix
        if np.max(np.abs(tot - np.eye(len(tot)))) > TOL.structural:
            raise ValueError("measurement is not complete")

    @property
    def layout(self) -> RegisterLayout:
        return self.p0.layout

    def outcome(self, o) -> Projector:
        return {0: self.p0, 1: self.p1, None: self.pbot, "bot": self.pbot}[o]


@dataclass(frozen=True)
class Unitary:
    matrix: np.ndarray
    layout: RegisterLayout

    def __post_init__(self):
        u = _as_complex(self.matrix)
        d = self.layout.dim
        if u.shape != (d, d):
            raise ValueError("unitary shape does not match layout")
        if np.max(np.abs(u.conj().T @ u - np.eye(d))) > TOL.structural:
            raise ValueError("matrix is not unitary")
        u.setflags(write=False)
        object.__setattr__(self, "matrix", u)

    @classmethod
    def identity(cls, layout: RegisterLayout) -> "Unitary":
        return cls(np.eye(layout.dim), layout)


State = Union[PureState, DensityOp]


# --------------------------------------------------------------------------- #
# construction helpers

def basis_state(layout: RegisterLayout, values=None) -> PureState:
    """|v_1>|v_2>... with ``values`` a mapping name -> int (missing = 0)."""
    values = dict(values or {})
    idx = np.ravel_multi_index([values.get(n, 0) for n in layout.names], layout.dims)
    v = np.zeros(layout.dim, dtype=complex)
    v[idx] = 1
    return PureState(v, layout)


def maximally_mixed(layout: RegisterLayout) -> DensityOp:
    return DensityOp(np.eye(layout.dim) / layout.dim, layout)


def random_state(layout: RegisterLayout, rng) -> PureState:
    v = rng.normal(size=layout.dim) + 1j * rng.normal(size=layout.dim)
    return PureState(v / np.linalg.norm(v), layout)


def random_density(layout: RegisterLayout, rng, rank=None) -> DensityOp:
    d = layout.dim
    r = d if rank is None else rank
    g = rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r))
    rho = g @ g.conj().T
    return DensityOp(rho / np.trace(rho).real, layout)


def random_unitary(layout: RegisterLayout, rng) -> Unitary:
    d = layout.dim
    if d == 1:
        return Unitary(np.eye(1), layout)
    return Unitary(unitary_group.rvs(d, random_state=rng), layout)


def as_density(s: State) -> DensityOp:
    return s.density() if isinstance(s, PureState) else s


# --------------------------------------------------------------------------- #
# structural operations

def tensor(a: State, b: State) -> State:
    layout = a.layout + b.layout
    sub = a.subnormalized or b.subnormalized
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(a.vector, b.vector), layout, sub)
    a, b = as_density(a), as_density(b)
    return DensityOp(np.kron(a.matrix, b.matrix), layout, sub)


def apply_matrix(vec: np.ndarray, layout: RegisterLayout, names: Sequence[str],
                 mat: np.ndarray) -> np.ndarray:
    """Apply ``mat`` (ordered as ``names``) to the registers ``names`` of ``vec``.

    ``vec`` may carry extra trailing axes (e.g. columns of a matrix); they are
    left untouched.
    """
    names = list(names)
    axes = [layout.index(n) for n in names]
    extra = vec.shape[1:] if vec.ndim > 1 else ()
    t = vec.reshape(layout.dims + tuple(extra))
    t = np.moveaxis(t, axes, list(range(len(axes))))
    shp = t.shape
    dt = int(np.prod([layout.dims[a] for a in axes]))
    if mat.shape != (dt, dt):
        raise ValueError(f"operator of shape {mat.shape} does not act on {names}")
    t = (mat @ t.reshape(dt, -1)).reshape(shp)
    t = np.moveaxis(t, list(range(len(axes))), axes)
    return t.reshape((layout.dim,) + tuple(extra))


def conjugate_matrix(rho: np.ndarray, layout: RegisterLayout, names, mat) -> np.ndarray:
    """``M rho M^dagger`` with ``M`` acting on ``names``."""
    half = apply_matrix(rho, layout, names, mat)
    return apply_matrix(half.conj().T, layout, names, mat).conj().T


def apply(U: Unitary, s: State) -> State:
    names = list(U.layout.names)
    if s.layout.sub(names) != U.layout:
        raise ValueError("unitary register sizes do not match the state")
    if isinstance(s, PureState):
        return PureState(apply_matrix(s.vector, s.layout, names, U.matrix), s.layout,
                         s.subnormalized)
    return DensityOp(conjugate_matrix(s.matrix, s.layout, names, U.matrix), s.layout,
                     s.subnormalized)


def measure_prob(P: Projector, s: State):
    """Probability of ``P`` on ``s`` and the subnormalized post-measurement branch."""
    names = list(P.layout.names)
    if isinstance(s, PureState):
        branch = apply_matrix(s.vector, s.layout, names, P.matrix)
        return float(np.vdot(branch, branch).real), PureState(branch, s.layout, True)
    br = conjugate_matrix(s.matrix, s.layout, names, P.matrix)
    return float(np.trace(br).real), DensityOp(br, s.layout, True)


def partial_trace(op: State, keep: Iterable[str]) -> DensityOp:
    """Trace out everything except ``keep``; kept registers stay in layout order."""
    lay = op.layout
    keep = lay.ordered(keep)
    gone = [n for n in lay.names if n not in keep]
    ka = [lay.index(n) for n in keep]
    ga = [lay.index(n) for n in gone]
    dk = int(np.prod([lay.dims[a] for a in ka]))
    dg = int(np.prod([lay.dims[a] for a in ga]))
    check_dense(sum(lay.qubits(n) for n in keep))
    new = lay.sub(keep)
    if isinstance(op, PureState):
        a = np.transpose(op.vector.reshape(lay.dims), ka + ga).reshape(dk, dg)
        return DensityOp(a @ a.conj().T, new, op.subnormalized)
    n = len(lay.dims)
    t = op.matrix.reshape(lay.dims + lay.dims)
    t = np.transpose(t, ka + ga + [n + a for a in ka] + [n + a for a in ga])
    t = t.reshape(dk, dg, dk, dg)
    return DensityOp(np.einsum("ajbj->ab", t), new, op.subnormalized)


# --------------------------------------------------------------------------- #
# functionals

def _clamp_eigs(w: np.ndarray) -> np.ndarray:
    """Zero round-off eigenvalues (relative to the largest) of a PSD spectrum."""
    if w[0] < -TOL.structural * max(1.0, abs(w[-1])):
        raise ValueError(f"operator is not PSD (min eigenvalue {w[0]:.3e})")
    return np.where(w > TOL.eig_clamp * max(1.0, abs(w[-1])), w, 0.0)


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(a)
    return (v * np.sqrt(_clamp_eigs(w))) @ v.conj().T


def _same_space(rho, sigma):
    if rho.layout.dims != sigma.layout.dims:
        raise ValueError(f"dimension mismatch: {rho.layout} vs {sigma.layout}")


def fidelity(rho: State, sigma: State) -> float:
    """Squared fidelity (Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2."""
    _same_space(rho, sigma)
    if isinstance(rho, PureState) and isinstance(sigma, PureState):
        return float(min(1.0, abs(np.vdot(rho.vector, sigma.vector)) ** 2))
    rho, sigma = as_density(rho), as_density(sigma)
    # nuclear norm of sqrt(rho) sqrt(sigma): no square roots of round-off eigenvalues
    sv = np.linalg.svd(_psd_sqrt(rho.matrix) @ _psd_sqrt(sigma.matrix), compute_uv=False)
    f = float(np.sum(sv) ** 2)
    return min(max(f, 0.0), 1.0) if not (rho.subnormalized or sigma.subnormalized) else f


def trace_norm(a: np.ndarray) -> float:
    """Schatten 1-norm of a Hermitian matrix."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(a))))


def trace_distance(rho: State, sigma: State) -> float:
    """Half the trace norm of rho - sigma; subnormalized inputs allowed."""
    _same_space(rho, sigma)
    rho, sigma = as_density(rho), as_density(sigma)
    return 0.5 * trace_norm(rho.matrix - sigma.matrix)


def positive_part_gain(rho: State, sigma: State):
    """max_P Tr(P(rho - sigma)) with the maximizing projector (positive eigenspace)."""
    rho, sigma = as_density(rho), as_density(sigma)
    w, v = np.linalg.eigh(rho.matrix - sigma.matrix)
    pos = w > TOL.kernel
    P = v[:, pos] @ v[:, pos].conj().T
    return float(np.trace(P @ (rho.matrix - sigma.matrix)).real), P


def purify(rho: DensityOp, purifier: str = "P") -> PureState:
    """Canonical purification sum_i sqrt(w_i) |v_i>|i> on layout + purifier."""
    if rho.subnormalized:
        raise ValueError("purify needs a unit-trace operator")
    w, v = np.linalg.eigh(rho.matrix)
    w = _clamp_eigs(w)
    q = rho.layout.nqubits
    vec = (v * np.sqrt(w)).reshape(-1)  # vec[a * d + i] = v[a, i] sqrt(w_i)
    return PureState(vec / np.linalg.norm(vec), rho.layout + RegisterLayout.of((purifier, q)))


def _split(state: PureState, act_on):
    lay = state.layout
    act = list(act_on)
    comp = [n for n in lay.names if n not in act]
    for n in act:
        lay._check(n)
    st = state.reorder(comp + act)
    dA = lay.sub(act).dim
    return st.vector.reshape(-1, dA), comp, act


def uhlmann_unitary(psi0: PureState, psi1: PureState, act_on: Iterable[str]) -> Unitary:
    """Unitary U on ``act_on`` maximizing |<psi1|(I x U)|psi0>|.

    With A_b the (complement x act_on) coefficient matrices, the overlap is
    Tr(U M) for M = A0^T conj(A1); the SVD M = V S W^dagger gives U = W V^dagger.
    """
    if psi0.layout != psi1.layout:
        raise ValueError("uhlmann_unitary needs both states on the same layout")
    act_on = list(act_on)
    a0, _, act = _split(psi0, act_on)
    a1, _, _ = _split(psi1, act_on)
    M = a0.T @ a1.conj()
    V, _, Wh = np.linalg.svd(M)
    return Unitary(Wh.conj().T @ V.conj().T, psi0.layout.sub(act))


def uhlmann_overlap(psi0: PureState, psi1: PureState, act_on: Iterable[str]) -> float:
    """Largest |<psi1|(I x U)|psi0>| = sum of singular values of the cross operator."""
    a0, _, _ = _split(psi0, act_on)
    a1, _, _ = _split(psi1, act_on)
    return float(np.sum(np.linalg.svd(a0.T @ a1.conj(), compute_uv=False)))


def helstrom_three_outcome(xi0: State, xi1: State) -> ThreeOutcomeMeasurement:
    """Projectors onto the positive, negative and null eigenspaces of xi0 - xi1."""
    _same_space(xi0, xi1)
    xi0, xi1 = as_density(xi0), as_density(xi1)
    diff = xi0.matrix - xi1.matrix
    if np.max(np.abs(diff - diff.conj().T)) > TOL.structural:
        raise ValueError("helstrom_three_outcome needs Hermitian inputs")
    w, v = np.linalg.eigh(diff)
    pos, neg = w > TOL.kernel, w < -TOL.kernel
    zer = ~(pos | neg)

    def proj(mask):
        return Projector(v[:, mask] @ v[:, mask].conj().T, xi0.layout)

    return ThreeOutcomeMeasurement(proj(pos), proj(neg), proj(zer))


def expectation(op: np.ndarray, s: State, names=None) -> float:
    """Tr(op s) with ``op`` acting on ``names`` (default: all registers)."""
    names = list(names) if names is not None else list(s.layout.names)
    if isinstance(s, PureState):
        return float(np.vdot(s.vector, apply_matrix(s.vector, s.layout, names, op)).real)
    return float(np.trace(apply_matrix(s.matrix, s.layout, names, op)).real)
