"""Commitment engine: honest execution, parallel SWAP-test verification, the
Helstrom-majority extractor, exact Real/Ideal binding experiments and the
key-averaged hiding view.

Register naming. A single-bit commitment with ``m`` repetitions lives on
pairs (X1, Y1), ..., (Xm, Ym); the X registers are sent at commit time and the
Y registers at reveal time. Every other register of a committer state is the
committer's private workspace. A block of several committed bits (used by the
zero-knowledge prover) names its pairs X{j}.{i} / Y{j}.{i} for bit j.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from . import efi, hashfam
from .config import TOL, check_dense, check_pure
from .qla import (DensityOp, PureState, RegisterLayout, Unitary, apply, apply_matrix,
                  conjugate_matrix, fidelity, helstrom_three_outcome,
                  trace_norm, uhlmann_unitary)

BOT = "bot"
FAIL = "fail"


# --------------------------------------------------------------------------- #
# parameters and reference states

@dataclass(frozen=True)
class SchemeParams:
    lam: int
    n_out: int
    m: int
    t: int = 0
    k_override: int | None = None

    def __post_init__(self):
        if self.lam < 1 or self.n_out < 1:
            raise ValueError("lam and n_out must be positive")
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.t < 0:
            raise ValueError("t must be non-negative")
        if self.k_override is not None and self.k_override < 1:
            raise ValueError("k must be positive")

    @property
    def k(self) -> int:
        """Independence degree 2m(t+1) unless overridden."""
        return self.k_override if self.k_override is not None else 2 * self.m * (self.t + 1)

    @property
    def family(self) -> hashfam.KWiseFamily:
        return hashfam.KWiseFamily(self.lam, self.n_out, self.k)

    @property
    def y_width(self) -> int:
        return efi.y_width(self.lam, self.n_out)

    @property
    def pair_qubits(self) -> int:
        return self.n_out + self.y_width

    def with_m(self, m: int) -> "SchemeParams":
        return replace(self, m=m)


@dataclass(frozen=True)
class CrqsDescription:
    """The two reference pair states of one key (or one fixed auxiliary pair).

    ``key`` is a coefficient tuple, the string "truly-random" when the states
    come from a table of the full function space, or None in auxiliary-input
    mode. ``copies`` counts unconsumed copies of the full reference state.
    """
    psi0: PureState
    psi1: PureState
    m: int
    key: object = None
    copies: int = 2
    params: SchemeParams | None = None

    def __post_init__(self):
        if self.psi0.layout != self.psi1.layout or len(self.psi0.layout.names) != 2:
            raise ValueError("reference states must share a two-register (X, Y) layout")
        if self.m < 1:
            raise ValueError("m must be at least 1")

    @property
    def x_qubits(self) -> int:
        return self.psi0.layout.registers[0][1]

    @property
    def y_qubits(self) -> int:
        return self.psi0.layout.registers[1][1]

    @property
    def pair_dim(self) -> int:
        return self.psi0.layout.dim

    def ref(self, b: int) -> np.ndarray:
        return (self.psi0, self.psi1)[_bit(b)].vector

    @cached_property
    def reduced(self) -> tuple:
        """(xi_0, xi_1): the reference states reduced to X."""
        out = []
        for s in (self.psi0, self.psi1):
            a = s.vector.reshape(1 << self.x_qubits, -1)
            out.append(DensityOp(a @ a.conj().T, s.layout.sub([s.layout.names[0]])))
        return tuple(out)

    @cached_property
    def measurement(self):
        return helstrom_three_outcome(*self.reduced)

    @cached_property
    def epsilon(self) -> float:
        """Fidelity of the two reduced states."""
        return fidelity(*self.reduced)

    def take(self) -> "CrqsDescription":
        if self.copies < 1:
            raise ValueError("no unconsumed reference copy left")
        return replace(self, copies=self.copies - 1)


def _bit(b) -> int:
    if b not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {b!r}")
    return int(b)


def crqs_from_table(params: SchemeParams, outputs, key=None) -> CrqsDescription:
    yw = params.y_width
    check_pure(params.pair_qubits)
    lay = efi.pair_layout(params.n_out, yw)
    vs = [efi.state_vector_from_table(outputs, params.lam, params.n_out, b, yw) for b in (0, 1)]
    return CrqsDescription(PureState(vs[0], lay), PureState(vs[1], lay), params.m,
                           key=key, params=params)


def crqs(params: SchemeParams, key) -> CrqsDescription:
    """Reference description for one family key."""
    fam = params.family
    key = fam._check_key(key)
    return crqs_from_table(params, fam.eval_keys(np.array([key]))[0], key)


def aux_input_mode(psi0: PureState, psi1: PureState, m: int) -> CrqsDescription:
    """Keyless instance for a fixed pair of states on two registers."""
    names = ("X", "Y")
    lay = RegisterLayout(tuple(zip(names, (q for _, q in psi0.layout.registers))))
    if len(psi0.layout.names) != 2 or psi0.layout.dims != psi1.layout.dims:
        raise ValueError("auxiliary pair must be two states on the same two registers")
    return CrqsDescription(PureState(psi0.vector, lay), PureState(psi1.vector, lay), m)


def key_instances(params: SchemeParams, averaging: str = "family"):
    """(weight, description) over the distinct tables reached by the key distribution."""
    if averaging == "family":
        dist = hashfam.table_distribution(params.family)
        fam = params.family
        for tab, w, k0 in zip(dist.tables, dist.weights, dist.first_key):
            yield float(w), crqs_from_table(params, tab, fam.key_from_index(int(k0)))
    elif averaging == "all-functions":
        dist = hashfam.uniform_function_distribution(params.lam, params.n_out)
        for tab, w in zip(dist.tables, dist.weights):
            yield float(w), crqs_from_table(params, tab, "truly-random")
    else:
        raise ValueError(f"unknown averaging {averaging!r}")


def epsilon_stats(params: SchemeParams) -> dict:
    """Max and key-average of the reduced-state fidelity over the family."""
    dist = hashfam.table_distribution(params.family)
    u = 2.0 ** -params.n_out
    fs = []
    for tab in dist.tables:
        p = np.bincount(tab, minlength=1 << params.n_out) / len(tab)
        fs.append(float(np.sum(np.sqrt(p * u)) ** 2))
    fs = np.array(fs)
    return {"max": float(fs.max()), "avg": float(np.dot(dist.weights, fs))}


def envelope(m: int, eps: float) -> float:
    """2^{-m/3} + 2 eps."""
    return 2.0 ** (-m / 3) + 2 * eps


# --------------------------------------------------------------------------- #
# committed states

def pair_names(m: int, nbits: int | None = None) -> list:
    """Per committed bit, the list of (X, Y) register names of its copies."""
    if nbits is None:
        return [[(f"X{i}", f"Y{i}") for i in range(1, m + 1)]]
    return [[(f"X{j}.{i}", f"Y{j}.{i}") for i in range(1, m + 1)] for j in range(nbits)]


def commit_layout(inst: CrqsDescription, w_qubits: int = 0, nbits: int | None = None,
                  w_name: str = "W") -> RegisterLayout:
    regs = []
    for group in pair_names(inst.m, nbits):
        for x, y in group:
            regs += [(x, inst.x_qubits), (y, inst.y_qubits)]
    if w_qubits:
        regs.append((w_name, w_qubits))
    return RegisterLayout(tuple(regs))


@dataclass(frozen=True)
class ProductCommitment:
    """A committed state that is a product over copies: factor i on (Xi, Yi)."""
    factors: tuple

    @property
    def m(self) -> int:
        return len(self.factors)

    def joint(self) -> PureState:
        check_pure(sum(f.layout.nqubits for f in self.factors))
        v = np.ones(1, dtype=complex)
        regs = []
        sub = False
        for i, f in enumerate(self.factors, 1):
            v = np.kron(v, f.vector)
            x, y = f.layout.registers
            regs += [(f"X{i}", x[1]), (f"Y{i}", y[1])]
            sub = sub or f.subnormalized
        return PureState(v, RegisterLayout(tuple(regs)), subnormalized=sub)

    @property
    def norm2(self) -> float:
        return float(np.prod([f.norm2 for f in self.factors]))


Committed = Union[PureState, DensityOp, ProductCommitment]


def honest_commit(inst: CrqsDescription, b: int) -> ProductCommitment:
    """psi_b^{(x)m}: the committer's share of one reference copy, per repetition."""
    _bit(b)
    if inst.copies < 1:
        raise ValueError("reference copies exhausted")
    s = (inst.psi0, inst.psi1)[b]
    return ProductCommitment(tuple(s for _ in range(inst.m)))


def _contract(vec, layout: RegisterLayout, pair, ref):
    """<ref|_pair applied to vec; returns (vector on the rest, rest layout)."""
    axes = [layout.index(n) for n in pair]
    t = np.moveaxis(vec.reshape(layout.dims), axes, [0, 1])
    out = ref.conj() @ t.reshape(len(ref), -1)
    return out.reshape(-1), layout.without(pair)


def _pair_list(state_layout, groups):
    for g in groups:
        for x, y in g:
            state_layout._check(x)
            state_layout._check(y)


def verify_prob(state: Committed, b, inst: CrqsDescription, pairs=None) -> float:
    """Acceptance of m parallel SWAP tests against psi_b^{(x)m}.

    Evaluates (1/2^m) sum_{S subset [m]} Tr[rho_S sigma_S] directly, with
    sigma the receiver's pure reference. ``b`` may be a tuple (one bit per
    group of ``pairs``) for multi-bit blocks.
    """
    if isinstance(state, ProductCommitment):
        _bit(b)
        ref = inst.ref(b)
        val = 1.0
        for f in state.factors:
            if f.layout.dim != len(ref):
                raise ValueError("committed factor width does not match the reference")
            val *= (f.norm2 + abs(np.vdot(ref, f.vector)) ** 2) / 2
        return float(val)
    groups, bits = _groups_and_bits(inst, b, pairs)
    flat = [(p, inst.ref(bt)) for g, bt in zip(groups, bits) for p in g]
    _pair_list(state.layout, groups)
    for p, _ in flat:
        if state.layout.sub(p).dims != inst.psi0.layout.dims:
            raise ValueError(f"registers {p} do not match the reference width")
    total = 0.0
    for r in range(len(flat) + 1):
        for S in itertools.combinations(flat, r):
            total += _subset_term(state, S)
    return float(total / 2 ** len(flat))


def _subset_term(state, S) -> float:
    """Tr[rho_S sigma_S] for pure reference sigma."""
    if isinstance(state, PureState):
        v, lay = state.vector, state.layout
        for p, ref in S:
            v, lay = _contract(v, lay, p, ref)
        return float(np.vdot(v, v).real)
    rho, lay = state.matrix, state.layout
    for p, ref in S:
        rows, new = _contract_rows(rho, lay, p, ref)      # <ref| rho
        cols, _ = _contract_rows(rows.conj().T, lay, p, ref)  # (<ref| rho |ref>)^dagger
        rho, lay = cols.conj().T, new
    return float(np.trace(rho).real)


def _contract_rows(mat, layout, pair, ref):
    """Contract <ref| on the row index of a matrix whose rows follow ``layout``."""
    axes = [layout.index(n) for n in pair]
    ncols = mat.shape[1]
    t = mat.reshape(layout.dims + (ncols,))
    t = np.moveaxis(t, axes, [0, 1])
    out = ref.conj() @ t.reshape(len(ref), -1)
    new = layout.without(pair)
    return out.reshape(new.dim, ncols), new


def _groups_and_bits(inst, b, pairs):
    if pairs is None:
        if isinstance(b, tuple):
            pairs = pair_names(inst.m, len(b))
        else:
            pairs = pair_names(inst.m)
    bits = tuple(b) if isinstance(b, tuple) else (b,)
    if len(bits) != len(pairs):
        raise ValueError("one announced bit is needed per committed group")
    for bt in bits:
        _bit(bt)
    return pairs, bits


def accept_operator(inst: CrqsDescription, b: int) -> np.ndarray:
    """Per-copy effective acceptance operator (I + |psi_b><psi_b|)/2."""
    r = inst.ref(b)
    return (np.eye(len(r)) + np.outer(r, r.conj())) / 2


def _apply_accept(vec, layout, groups, bits, inst):
    for g, bt in zip(groups, bits):
        A = accept_operator(inst, bt)
        for p in g:
            vec = apply_matrix(vec, layout, list(p), A)
    return vec


def swap_test_circuit(state: Committed, b, inst: CrqsDescription, pairs=None) -> float:
    """Gate-level simulation of the parallel SWAP test.

    Appends the receiver's reference copies and one ancilla per test, applies
    H, controlled-SWAP of the two pairs, H, and returns the probability that
    every ancilla reads 0.
    """
    if isinstance(state, ProductCommitment):
        state = state.joint()
    if not isinstance(state, PureState):
        raise TypeError("circuit simulation takes pure committer states")
    groups, bits = _groups_and_bits(inst, b, pairs)
    flat = [(p, inst.ref(bt)) for g, bt in zip(groups, bits) for p in g]
    m = len(flat)
    nq = state.layout.nqubits + m * (inst.psi0.layout.nqubits + 1)
    check_pure(nq, "SWAP-test circuit")
    regs = list(state.layout.registers)
    v = state.vector
    for j, (p, ref) in enumerate(flat):
        regs += [(f"_rx{j}", inst.x_qubits), (f"_ry{j}", inst.y_qubits)]
        v = np.kron(v, ref)
    for j in range(m):
        regs.append((f"_a{j}", 1))
        v = np.kron(v, np.array([1, 0], dtype=complex))
    lay = RegisterLayout(tuple(regs))
    H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    for j in range(m):
        v = apply_matrix(v, lay, [f"_a{j}"], H)
    t = v.reshape(lay.dims)
    for j, (p, _) in enumerate(flat):
        a = lay.index(f"_a{j}")
        x, y = lay.index(p[0]), lay.index(p[1])
        rx, ry = lay.index(f"_rx{j}"), lay.index(f"_ry{j}")
        one = np.take(t, 1, axis=a)
        # positions shift by one for axes after the removed ancilla axis
        sh = lambda k: k - (k > a)
        one = np.swapaxes(np.swapaxes(one, sh(x), sh(rx)), sh(y), sh(ry))
        t = np.stack([np.take(t, 0, axis=a), one], axis=a)
    v = t.reshape(-1)
    for j in range(m):
        v = apply_matrix(v, lay, [f"_a{j}"], H)
    t = v.reshape(lay.dims)
    idx = [slice(None)] * len(lay.dims)
    for j in range(m):
        idx[lay.index(f"_a{j}")] = 0
    kept = t[tuple(idx)]
    return float(np.vdot(kept, kept).real)


# --------------------------------------------------------------------------- #
# extractor

def majority(outcomes: Sequence, m: int):
    """b* = 0 (or 1) if that bit appears strictly more than 2m/3 times, else bot."""
    n0 = sum(1 for o in outcomes if o == 0)
    n1 = sum(1 for o in outcomes if o == 1)
    if 3 * n0 > 2 * m:
        return 0
    if 3 * n1 > 2 * m:
        return 1
    return BOT


_OUTCOMES = (0, 1, BOT)


def _proj(inst, o):
    meas = inst.measurement
    return {0: meas.p0, 1: meas.p1, BOT: meas.pbot}[o].matrix


@dataclass
class ExtractionResult:
    probs: dict
    branches: dict  # b* -> list of (per-copy outcome pattern, subnormalized state)

    def prob(self, b) -> float:
        return self.probs.get(b, 0.0)


def _patterns(vec, layout, xnames, inst, conj=False):
    """Recursively project each X register onto the three outcomes, pruning zeros."""
    out = []

    def rec(i, v, pat):
        if i == len(xnames):
            out.append((tuple(pat), v))
            return
        for o in _OUTCOMES:
            P = _proj(inst, o)
            if not P.any():
                continue
            w = (conjugate_matrix(v, layout, [xnames[i]], P) if conj
                 else apply_matrix(v, layout, [xnames[i]], P))
            nrm = np.trace(w).real if conj else np.vdot(w, w).real
            if nrm > TOL.eig_clamp ** 2:
                rec(i + 1, w, pat + [o])

    rec(0, vec, [])
    return out


def extractor(inst: CrqsDescription, commitment: Committed, xnames=None) -> ExtractionResult:
    """Helstrom three-outcome measurement on every X register, then majority."""
    m = inst.m
    probs = {0: 0.0, 1: 0.0, BOT: 0.0}
    branches = {0: [], 1: [], BOT: []}
    if isinstance(commitment, ProductCommitment):
        per = []
        for f in commitment.factors:
            a = f.vector.reshape(1 << inst.x_qubits, -1)
            per.append({o: _proj(inst, o) @ a for o in _OUTCOMES})
        for pat in itertools.product(_OUTCOMES, repeat=commitment.m):
            ps = [per[i][o] for i, o in enumerate(pat)]
            p = float(np.prod([np.vdot(x, x).real for x in ps]))
            if p <= 0:
                continue
            bstar = majority(pat, commitment.m)
            probs[bstar] += p
            fac = tuple(PureState(x.reshape(-1), f.layout, True)
                        for x, f in zip(ps, commitment.factors))
            branches[bstar].append((pat, ProductCommitment(fac)))
        return ExtractionResult(probs, branches)
    xnames = xnames or [f"X{i}" for i in range(1, m + 1)]
    m = len(xnames)
    if isinstance(commitment, PureState):
        pats = _patterns(commitment.vector, commitment.layout, xnames, inst)
        for pat, v in pats:
            bstar = majority(pat, m)
            probs[bstar] += float(np.vdot(v, v).real)
            branches[bstar].append((pat, PureState(v, commitment.layout, True)))
    else:
        pats = _patterns(commitment.matrix, commitment.layout, xnames, inst, conj=True)
        for pat, r in pats:
            bstar = majority(pat, m)
            probs[bstar] += float(np.trace(r).real)
            branches[bstar].append((pat, DensityOp(r, commitment.layout, True)))
    return ExtractionResult(probs, branches)


# --------------------------------------------------------------------------- #
# strategies and experiments

@dataclass(frozen=True)
class CommitterStrategy:
    """A malicious (or honest) committer given as data.

    ``initial`` is the joint state after the commit phase on the X/Y pairs and
    any workspace registers; ``bit`` is the announced bit (a tuple for
    multi-bit blocks) and ``reveal`` a unitary on Y and workspace registers
    applied before the Y registers are sent.
    """
    initial: PureState
    bit: object
    reveal: Unitary | None = None

    @property
    def nbits(self):
        return len(self.bit) if isinstance(self.bit, tuple) else None

    def groups(self, m: int):
        return pair_names(m, self.nbits)

    def check(self, inst: CrqsDescription):
        lay = self.initial.layout
        groups = self.groups(inst.m)
        xs = {p[0] for g in groups for p in g}
        for g in groups:
            for x, y in g:
                if lay.qubits(x) != inst.x_qubits or lay.qubits(y) != inst.y_qubits:
                    raise ValueError(f"pair ({x}, {y}) has the wrong width")
        if self.reveal is not None and set(self.reveal.layout.names) & xs:
            raise ValueError("reveal unitaries may not touch the sent X registers")
        bits = self.bit if isinstance(self.bit, tuple) else (self.bit,)
        for b in bits:
            _bit(b)

    def workspace(self, inst) -> list:
        used = {n for g in self.groups(inst.m) for p in g for n in p}
        return [n for n in self.initial.layout.names if n not in used]

    def revealed_state(self) -> PureState:
        return self.initial if self.reveal is None else apply(self.reveal, self.initial)


def honest_strategy(inst: CrqsDescription, b: int) -> CommitterStrategy:
    return CommitterStrategy(honest_commit(inst, b).joint(), b)


def uhlmann_attacker(inst: CrqsDescription) -> tuple:
    """Honest commitment to 0, then either open 0, or rotate Y toward psi_1 and open 1."""
    c0 = honest_commit(inst, 0).joint()
    c1 = honest_commit(inst, 1).joint()
    ys = [f"Y{i}" for i in range(1, inst.m + 1)]
    U = uhlmann_unitary(c0, c1, ys)
    return CommitterStrategy(c0, 0), CommitterStrategy(c0, 1, U)


@dataclass
class ExperimentOutput:
    """Outcome label -> subnormalized residual on the committer workspace.

    Labels: the announced bit (int, or tuple for blocks), "bot", "fail".
    ``layout`` is the workspace layout (None when the workspace is empty, in
    which case residuals are 1x1 weights).
    """
    branches: dict
    layout: RegisterLayout | None

    @property
    def probs(self) -> dict:
        return {k: float(np.trace(v).real) for k, v in self.branches.items()}

    def prob(self, label) -> float:
        v = self.branches.get(label)
        return 0.0 if v is None else float(np.trace(v).real)

    def residual(self, label):
        v = self.branches[label]
        if self.layout is None:
            return float(v[0, 0].real)
        return DensityOp(v, self.layout, subnormalized=True)

    @staticmethod
    def mix(items) -> "ExperimentOutput":
        """Weighted sum of outputs sharing a workspace layout."""
        branches, layout = {}, None
        for w, out in items:
            layout = out.layout
            for k, v in out.branches.items():
                branches[k] = branches.get(k, 0) + w * v
        return ExperimentOutput(branches, layout)


def _residual(acc, vec, layout, workspace):
    """Tr_{pairs}(A |vec><vec|) as a matrix on the workspace registers."""
    pairs_names = [n for n in layout.names if n not in workspace]
    order = pairs_names + list(workspace)
    ax = [layout.index(n) for n in order]
    dW = layout.sub(workspace).dim if workspace else 1
    a = np.transpose(acc.reshape(layout.dims), ax).reshape(-1, dW)
    v = np.transpose(vec.reshape(layout.dims), ax).reshape(-1, dW)
    r = a.T @ v.conj()
    return (r + r.conj().T) / 2


def _label(bits):
    return bits if len(bits) > 1 else bits[0]


def real_experiment(strategy: CommitterStrategy, inst: CrqsDescription) -> ExperimentOutput:
    strategy.check(inst)
    st = strategy.revealed_state()
    groups, bits = _groups_and_bits(inst, strategy.bit, strategy.groups(inst.m))
    ws = strategy.workspace(inst)
    lay = st.layout
    acc = _apply_accept(st.vector, lay, groups, bits, inst)
    r_acc = _residual(acc, st.vector, lay, ws)
    r_all = _residual(st.vector, st.vector, lay, ws)
    return ExperimentOutput({_label(bits): r_acc, BOT: r_all - r_acc},
                            lay.sub(ws) if ws else None)


def ideal_experiment(strategy: CommitterStrategy, inst: CrqsDescription) -> ExperimentOutput:
    """Extractor measures every X register between commit and reveal.

    A branch where the receiver accepts an announced bit differing from the
    extracted b* (for any bit of a block) is reported as fail.
    """
    strategy.check(inst)
    st = strategy.revealed_state()  # reveal acts on Y/workspace only, so it commutes
    groups, bits = _groups_and_bits(inst, strategy.bit, strategy.groups(inst.m))
    ws = strategy.workspace(inst)
    lay = st.layout
    xnames = [p[0] for g in groups for p in g]
    m = inst.m
    label = _label(bits)
    out = {label: 0, BOT: 0, FAIL: 0}
    for pat, v in _patterns(st.vector, lay, xnames, inst):
        bstars = [majority(pat[j * m:(j + 1) * m], m) for j in range(len(groups))]
        acc = _apply_accept(v, lay, groups, bits, inst)
        r_acc = _residual(acc, v, lay, ws)
        r_all = _residual(v, v, lay, ws)
        ok = all(bs == bt for bs, bt in zip(bstars, bits))
        out[label if ok else FAIL] = out[label if ok else FAIL] + r_acc
        out[BOT] = out[BOT] + (r_all - r_acc)
    dW = lay.sub(ws).dim if ws else 1
    out = {k: (v if isinstance(v, np.ndarray) else np.zeros((dW, dW), complex))
           for k, v in out.items()}
    return ExperimentOutput(out, lay.sub(ws) if ws else None)


def output_distance(a: ExperimentOutput, b: ExperimentOutput) -> float:
    """Trace distance of two classical-quantum outputs (subnormalized blocks)."""
    labels = set(a.branches) | set(b.branches)
    tot = 0.0
    for k in labels:
        x = a.branches.get(k)
        y = b.branches.get(k)
        if x is None:
            x = np.zeros_like(y)
        if y is None:
            y = np.zeros_like(x)
        tot += 0.5 * trace_norm(x - y)
    return float(tot)


def binding_gap(strategy: CommitterStrategy, inst: CrqsDescription) -> float:
    return output_distance(real_experiment(strategy, inst), ideal_experiment(strategy, inst))


def averaged_experiments(strategy_fn, params: SchemeParams, averaging="family"):
    """Key-averaged (real, ideal) outputs for ``strategy_fn(description)``."""
    reals, ideals = [], []
    for w, inst in key_instances(params, averaging):
        s = strategy_fn(inst)
        reals.append((w, real_experiment(s, inst)))
        ideals.append((w, ideal_experiment(s, inst)))
    return ExperimentOutput.mix(reals), ExperimentOutput.mix(ideals)


def averaged_binding_gap(strategy_fn, params: SchemeParams, averaging="family") -> float:
    return output_distance(*averaged_experiments(strategy_fn, params, averaging))


def sum_binding_probe(s0: CommitterStrategy, s1: CommitterStrategy,
                      inst: CrqsDescription) -> tuple:
    if s0.initial.layout != s1.initial.layout or \
            np.max(np.abs(s0.initial.vector - s1.initial.vector)) > TOL.structural:
        raise ValueError("the two strategies must share their commit phase")
    if s0.bit != 0 or s1.bit != 1:
        raise ValueError("expected strategies opening 0 and 1 respectively")
    return (real_experiment(s0, inst).prob(0), real_experiment(s1, inst).prob(1))


# --------------------------------------------------------------------------- #
# hiding view

@dataclass(frozen=True)
class HidingView:
    """Key-averaged view of a hiding adversary, stored block-diagonally.

    The adversary holds t copies of the reference state and the sent X
    registers. The key-independent factors psi_1^{(x) m t} are dropped (they
    tensor identically onto both views). The X registers are diagonal in the
    computational basis, so ``blocks[c]`` is the operator on the t*m pair
    registers accompanying X = c.
    """
    params: SchemeParams
    blocks: np.ndarray

    @property
    def layout(self) -> RegisterLayout:
        p = self.params
        regs = []
        for s in range(1, p.t + 1):
            for i in range(1, p.m + 1):
                regs += [(f"A{s}.{i}.X", p.n_out), (f"A{s}.{i}.Y", p.y_width)]
        regs += [(f"X{i}", p.n_out) for i in range(1, p.m + 1)]
        return RegisterLayout(tuple(regs))

    @property
    def trace(self) -> float:
        return float(np.einsum("cii->", self.blocks).real)

    def to_density(self) -> DensityOp:
        lay = self.layout
        check_dense(lay.nqubits, "hiding view")
        nc, D, _ = self.blocks.shape
        full = np.zeros((D, nc, D, nc))
        for c in range(nc):
            full[:, c, :, c] = self.blocks[c]
        return DensityOp(full.reshape(D * nc, D * nc), lay)


def view_distance(a: HidingView, b: HidingView) -> float:
    return 0.5 * float(sum(trace_norm(x - y) for x, y in zip(a.blocks, b.blocks)))


def _view_accumulate(params: SchemeParams, tables: np.ndarray, weights: np.ndarray, b: int,
                     chunk: int = 2048) -> np.ndarray:
    p = params
    ncopy = p.m * p.t
    npair = p.pair_qubits
    D = 1 << (npair * ncopy)
    nc = 1 << (p.n_out * p.m)
    check_dense(npair * ncopy + p.n_out * p.m, "hiding view")
    dom = 1 << p.lam
    amp2 = 2.0 ** (-p.lam * ncopy)
    xs = np.array(list(itertools.product(range(dom), repeat=ncopy)), dtype=np.int64)
    if ncopy == 0:
        xs = np.zeros((1, 0), dtype=np.int64)
    acc = np.zeros(nc * D * D)
    for s in range(0, len(tables), chunk):
        tab = np.asarray(tables[s:s + chunk], dtype=np.int64)
        w = np.asarray(weights[s:s + chunk], dtype=float)
        T = len(tab)
        # support indices of psi_{H,0}^{(x) ncopy}
        sup = np.zeros((T, len(xs)), dtype=np.int64)
        for c in range(ncopy):
            xc = xs[:, c]
            sup = (sup << npair) | (tab[:, xc] << p.y_width) | xc[None, :]
        # commitment diagonal over X1..Xm
        if b == 0:
            D1 = np.zeros((T, 1 << p.n_out))
            np.add.at(D1, (np.repeat(np.arange(T), dom), tab.reshape(-1)), 1.0 / dom)
            d = np.ones((T, 1))
            for _ in range(p.m):
                d = (d[:, :, None] * D1[:, None, :]).reshape(T, -1)
        else:
            d = np.full((T, nc), 1.0 / nc)
        ij = (sup[:, :, None] * D + sup[:, None, :]).reshape(T, -1)
        cs, js = np.nonzero(d)  # only nonzero commitment entries contribute
        idx = (js[:, None] * D * D + ij[cs]).reshape(-1)
        val = np.repeat(w[cs] * d[cs, js] * amp2, ij.shape[1])
        acc += np.bincount(idx, weights=val, minlength=nc * D * D)
    return acc.reshape(nc, D, D)


def hiding_view(params: SchemeParams, b: int, averaging: str = "family") -> HidingView:
    """E_key[ psi_k^{(x) t} (x) Tr_Y(commitment_b) ] (key-independent factors dropped)."""
    _bit(b)
    if averaging == "family":
        dist = hashfam.table_distribution(params.family)
    elif averaging == "all-functions":
        dist = hashfam.uniform_function_distribution(params.lam, params.n_out)
    else:
        raise ValueError(f"unknown averaging {averaging!r}")
    return HidingView(params, _view_accumulate(params, dist.tables, dist.weights, b))


def hiding_advantage(params: SchemeParams, averaging: str = "family") -> float:
    return view_distance(hiding_view(params, 0, averaging), hiding_view(params, 1, averaging))
