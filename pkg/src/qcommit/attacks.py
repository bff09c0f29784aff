"""No-go attacks: classical common reference string, correlated randomness and
unbounded reference copies, plus the toy schemes they are exercised on.

Schemes are in canonical form: the committer prepares a pure state on
(C, R), sends C, later sends R, and the receiver applies a two-outcome
measurement on (C, R).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import TOL, check_pure
from .qla import (PureState, RegisterLayout, apply, expectation,
                  fidelity, helstrom_three_outcome, partial_trace, purify,
                  random_density, random_state, random_unitary, trace_distance,
                  uhlmann_unitary)

# smaller root of 17 e^2 - 10 e + 1 = 0, where the two success bounds sum to 1
CORRELATION_THRESHOLD = (5 - 2 * math.sqrt(2)) / 17


def _qubits_for(n: int) -> int:
    return max(1, (n - 1).bit_length())


def _check_dist(p, what):
    p = np.asarray(p, dtype=float)
    if p.min() < 0 or abs(p.sum() - 1) > 1e-12:
        raise ValueError(f"{what} must be a probability distribution")
    return p


def _check_cr(s: PureState):
    if s.layout.names != ("C", "R"):
        raise ValueError("committed states must live on registers (C, R)")


# --------------------------------------------------------------------------- #
# classical common reference string

@dataclass(frozen=True)
class CrsScheme:
    """Key distribution and the committed pure state |Psi_{k,b}> per key."""
    probs: np.ndarray
    states: tuple  # states[k] = (Psi_k0, Psi_k1)

    def __post_init__(self):
        p = _check_dist(self.probs, "key distribution")
        object.__setattr__(self, "probs", p)
        if len(self.states) != len(p):
            raise ValueError("one state pair per key is required")
        for s0, s1 in self.states:
            _check_cr(s0)
            if s0.layout != s1.layout:
                raise ValueError("state pair must share a layout")

    def reduced(self, k):
        return tuple(partial_trace(s, ["C"]) for s in self.states[k])


def crs_hiding_attack(scheme: CrsScheme) -> float:
    """Advantage of measuring the per-key Helstrom projector on C."""
    adv = 0.0
    for k, p in enumerate(scheme.probs):
        r0, r1 = scheme.reduced(k)
        P = helstrom_three_outcome(r0, r1).p0.matrix
        adv += p * float(np.trace(P @ (r0.matrix - r1.matrix)).real)
    return adv


def crs_binding_attack(scheme: CrsScheme) -> float:
    """Honestly commit 0, apply the per-key Uhlmann unitary on R, open 1."""
    succ = 0.0
    for k, p in enumerate(scheme.probs):
        s0, s1 = scheme.states[k]
        U = uhlmann_unitary(s0, s1, ["R"])
        succ += p * abs(np.vdot(s1.vector, apply(U, s0).vector)) ** 2
    return float(succ)


def crs_tradeoff(scheme: CrsScheme) -> dict:
    """Binding success against hiding advantage.

    ``linear_holds`` is success >= 1 - advantage, which needs 1 - F <= TD per
    key; that step fails for some mixed states of dimension three or more.
    ``certified_holds`` is success >= (1 - advantage)^2, which always holds
    (1 - sqrt(F) <= TD per key, then Jensen).
    """
    succ = crs_binding_attack(scheme)
    adv = crs_hiding_attack(scheme)
    per_key = []
    for k in range(len(scheme.probs)):
        r0, r1 = scheme.reduced(k)
        per_key.append({"fidelity": fidelity(r0, r1), "td": trace_distance(r0, r1)})
    return {
        "success": succ, "advantage": adv,
        "residual": succ - (1 - adv),
        "linear_holds": succ >= 1 - adv - TOL.structural,
        "certified_rhs": (1 - adv) ** 2,
        "certified_holds": succ >= (1 - adv) ** 2 - TOL.structural,
        "per_key": per_key,
    }


# --------------------------------------------------------------------------- #
# correlated randomness

@dataclass(frozen=True)
class CorrelatedScheme:
    """Joint distribution D[x, y]; committer states per x; receiver effects per y.

    ``povm[y][b]`` is the accepting effect on (C, R) for opening b given y.
    """
    dist: np.ndarray
    states: tuple   # states[x] = (Psi_x0, Psi_x1)
    povm: tuple     # povm[y] = (Lambda_y0, Lambda_y1)

    def __post_init__(self):
        D = np.asarray(self.dist, dtype=float)
        if D.ndim != 2:
            raise ValueError("joint distribution must be a matrix")
        _check_dist(D.reshape(-1), "joint distribution")
        object.__setattr__(self, "dist", D)
        if len(self.states) != D.shape[0] or len(self.povm) != D.shape[1]:
            raise ValueError("state and effect lists must match the distribution shape")
        lay = self.states[0][0].layout
        for s0, s1 in self.states:
            _check_cr(s0)
            if s0.layout != lay or s1.layout != lay:
                raise ValueError("all committed states must share a layout")
        for pair in self.povm:
            for L in pair:
                L = np.asarray(L)
                w = np.linalg.eigvalsh((L + L.conj().T) / 2)
                if L.shape != (lay.dim, lay.dim) or w[0] < -TOL.structural or \
                        w[-1] > 1 + TOL.structural:
                    raise ValueError("receiver effects must satisfy 0 <= L <= I on (C, R)")

    @property
    def layout(self) -> RegisterLayout:
        return self.states[0][0].layout

    def correctness(self, b: int) -> float:
        D = self.dist
        return float(sum(D[x, y] * expectation(np.asarray(self.povm[y][b]), self.states[x][b])
                         for x in range(D.shape[0]) for y in range(D.shape[1]) if D[x, y] > 0))

    def as_crs(self) -> CrsScheme:
        """The x = y special case as a plain CRS scheme."""
        D = self.dist
        if D.shape[0] != D.shape[1] or np.any(D - np.diag(np.diag(D))):
            raise ValueError("only diagonal joint distributions are CRS schemes")
        return CrsScheme(np.diag(D), self.states)


def product_distance(D) -> float:
    """l1 distance between D and the product of its marginals."""
    D = np.asarray(D, dtype=float)
    return float(np.abs(D - np.outer(D.sum(1), D.sum(0))).sum())


def epsilon_correlation(D) -> tuple:
    """Best probability of guessing x from y, and the maximizing guess map."""
    D = np.asarray(D, dtype=float)
    guess = np.argmax(D, axis=0)  # first maximum = smallest x on ties
    return float(D.max(axis=0).sum()), guess


def correlated_hiding_advantage(scheme: CorrelatedScheme) -> float:
    """TD of the receiver's (y, C) views; the view is block diagonal in y."""
    D = scheme.dist
    red = [[partial_trace(s[b], ["C"]).matrix for s in scheme.states] for b in (0, 1)]
    tot = 0.0
    for y in range(D.shape[1]):
        diff = sum(D[x, y] * (red[0][x] - red[1][x]) for x in range(D.shape[0]))
        tot += float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
    return 0.5 * tot


def correlated_attack(scheme: CorrelatedScheme) -> dict:
    """Commit with the x-marginal in superposition and open via Uhlmann on (A, R).

    The receiver's y is drawn from the true joint distribution; the attacker
    never sees x. Reports the success probabilities, the bounds from the
    product distance and the general certified forms.
    """
    D = scheme.dist
    e, f = D.sum(1), D.sum(0)
    eps = product_distance(D)
    nx = D.shape[0]
    qa = _qubits_for(nx)
    lay = RegisterLayout.of(("A", qa)) + scheme.layout
    check_pure(lay.nqubits, "attack state")
    phis = []
    for b in (0, 1):
        v = np.zeros(lay.dim, dtype=complex)
        dCR = scheme.layout.dim
        for x in range(nx):
            v[x * dCR:(x + 1) * dCR] = math.sqrt(e[x]) * scheme.states[x][b].vector
        phis.append(PureState(v, lay))
    U = uhlmann_unitary(phis[0], phis[1], ["A", "R"])
    opened = [phis[0], apply(U, phis[0])]
    rho = [partial_trace(s, ["C", "R"]).matrix for s in opened]
    p = [float(sum(f[y] * np.trace(np.asarray(scheme.povm[y][b]) @ rho[b]).real
                   for y in range(D.shape[1]))) for b in (0, 1)]
    FE = fidelity(partial_trace(phis[0], ["C"]), partial_trace(phis[1], ["C"]))
    c = [scheme.correctness(b) for b in (0, 1)]
    hid = correlated_hiding_advantage(scheme)
    b0 = 1 - 2 * eps
    b1 = 1 - math.sqrt(max(2 * eps - eps ** 2, 0.0)) - 2 * eps
    cb0 = c[0] - eps / 2
    cb1 = c[1] - eps / 2 - math.sqrt(max(1 - FE, 0.0))
    tol = TOL.end_to_end
    return {
        "eps_product": eps, "eps_note": "distance to the product of marginals (upper bound)",
        "p0": p[0], "p1": p[1], "hiding_adv": hid,
        "correctness": c, "marginal_fidelity": FE,
        "bound_p0": b0, "bound_p1": b1,
        "holds_p0": p[0] >= b0 - tol, "holds_p1": p[1] >= b1 - tol,
        "certified_p0": cb0, "certified_p1": cb1,
        "certified_holds": p[0] >= cb0 - tol and p[1] >= cb1 - tol,
        "threshold": CORRELATION_THRESHOLD,
        "below_threshold": eps < CORRELATION_THRESHOLD,
    }


# --------------------------------------------------------------------------- #
# unbounded reference copies

@dataclass(frozen=True)
class CopyScheme:
    """A keyed reference-state scheme given by explicit per-key data.

    ``overlaps[k1, k2] = |<psi_k1|psi_k2>|^2`` for the full reference states;
    ``commits[k] = (Psi_k0, Psi_k1)`` the honest committed states on (C, R);
    ``accepts[k] = (Lambda_k0, Lambda_k1)`` the receiver's accepting effects.
    Keys are listed in lexicographic order.
    """
    weights: np.ndarray
    overlaps: np.ndarray
    commits: tuple
    accepts: tuple
    labels: tuple = ()

    def __post_init__(self):
        w = _check_dist(self.weights, "key distribution")
        object.__setattr__(self, "weights", w)
        K = len(w)
        if self.overlaps.shape != (K, K) or len(self.commits) != K or len(self.accepts) != K:
            raise ValueError("per-key data does not match the key count")


def crqs_copy_scheme(params) -> CopyScheme:
    """The hash-based scheme as a CopyScheme, keys grouped by their table.

    Keys inducing the same table have identical reference states, so the
    attacker's lexicographically first match is the first key of that table.
    """
    from . import commit
    from .hashfam import table_distribution
    dist = table_distribution(params.family)
    order = np.argsort(dist.first_key)
    insts = [commit.crqs_from_table(params, dist.tables[i]) for i in order]
    G = np.array([[abs(np.vdot(a.psi0.vector, b.psi0.vector)) ** 2 for b in insts]
                  for a in insts])
    overl = G ** params.m  # the psi_1 halves are key-independent
    commits, accepts = [], []
    for inst in insts:
        pair = []
        for b in (0, 1):
            j = commit.honest_commit(inst, b).joint()
            pair.append(_to_cr(j, inst.m))
        commits.append(tuple(pair))
        acc = []
        for b in (0, 1):
            A1 = commit.accept_operator(inst, b)
            acc.append(_to_cr_operator(A1, inst))
        accepts.append(tuple(acc))
    fam = params.family
    labels = tuple(fam.key_from_index(int(dist.first_key[i])) for i in order)
    return CopyScheme(dist.weights[order], overl, tuple(commits), tuple(accepts), labels)


def _to_cr(state: PureState, m: int) -> PureState:
    xs = [f"X{i}" for i in range(1, m + 1)]
    ys = [f"Y{i}" for i in range(1, m + 1)]
    st = state.reorder(xs + ys)
    qc = sum(st.layout.qubits(n) for n in xs)
    qr = sum(st.layout.qubits(n) for n in ys)
    return PureState(st.vector, RegisterLayout.of(("C", qc), ("R", qr)))


def _to_cr_operator(A1: np.ndarray, inst) -> np.ndarray:
    """(A1)^{(x) m} reordered from (X1 Y1 X2 Y2 ...) to (X1..Xm, Y1..Ym)."""
    m = inst.m
    A = np.ones((1, 1))
    for _ in range(m):
        A = np.kron(A, A1)
    dx, dy = 1 << inst.x_qubits, 1 << inst.y_qubits
    shape = [dx, dy] * m
    perm = list(range(0, 2 * m, 2)) + list(range(1, 2 * m, 2))
    t = A.reshape(shape + shape)
    t = np.transpose(t, perm + [2 * m + p for p in perm])
    return t.reshape(A.shape)


def unbounded_copy_attack(scheme: CopyScheme, r: float = 1e6, threshold: float = 0.1) -> dict:
    """Identify the key from exact overlaps, then attack binding and hiding.

    For each true key k the attacker picks the first k* whose reference state
    has overlap at least 1 - 1/r with psi_k, commits Psi_{k*,0}, and opens 1
    through the Uhlmann unitary between Psi_{k*,0} and Psi_{k*,1}; its hiding
    distinguisher is the Helstrom projector of the k* reduced pair.
    """
    K = len(scheme.weights)
    kstar = np.empty(K, dtype=int)
    for k in range(K):
        ok = np.flatnonzero(scheme.overlaps[:, k] >= 1 - 1 / r)
        kstar[k] = ok[0]
    sig = [[partial_trace(s, ["C"]) for s in pair] for pair in scheme.commits]
    Us = {}
    p0 = p1 = adv = td = ident = sqrt_infid = 0.0
    for k, w in enumerate(scheme.weights):
        ks = int(kstar[k])
        c0, c1 = scheme.commits[ks]
        if ks not in Us:
            Us[ks] = uhlmann_unitary(c0, c1, ["R"])
        L0, L1 = scheme.accepts[k]
        p0 += w * expectation(L0, c0)
        p1 += w * expectation(L1, apply(Us[ks], c0))
        P = helstrom_three_outcome(*sig[ks]).p0.matrix
        adv += w * float(np.trace(P @ (sig[k][0].matrix - sig[k][1].matrix)).real)
        td += w * trace_distance(*sig[k])
        ident += w * scheme.overlaps[ks, k]
        sqrt_infid += w * math.sqrt(max(0.0, 1 - fidelity(*sig[ks])))
    d = 1 / math.sqrt(r)
    p0_floor = 1 - d
    p1_floor = 1 - d - sqrt_infid
    hid_floor = td - 4 * d
    tol = TOL.end_to_end
    return {
        "kstar": kstar.tolist(), "identification": float(ident),
        "p0": float(p0), "p1": float(p1), "p0_plus_p1": float(p0 + p1),
        "hiding_adv": float(adv), "avg_td": float(td), "slack": 4 * d,
        "p0_floor": p0_floor, "p1_floor": float(p1_floor), "hiding_floor": float(hid_floor),
        "tradeoff_holds": bool(p0 >= p0_floor - tol and p1 >= p1_floor - tol
                               and adv >= hid_floor - tol),
        "branch": "binding broken" if td < threshold else "hiding broken",
    }


def sigma_close(scheme: CopyScheme, k1: int, k2: int) -> dict:
    """Overlap deficit of two keys against the TD of their committed views."""
    delta = 1 - scheme.overlaps[k1, k2]
    tds = [trace_distance(partial_trace(scheme.commits[k1][b], ["C"]),
                          partial_trace(scheme.commits[k2][b], ["C"])) for b in (0, 1)]
    return {"delta": float(delta), "td": tds, "bound": math.sqrt(max(delta, 0.0))}


# --------------------------------------------------------------------------- #
# toy schemes

def random_crs_scheme(rng, n_keys: int = 4, qc: int = 1, qr: int = 1) -> CrsScheme:
    lay = RegisterLayout.of(("C", qc), ("R", qr))
    p = rng.dirichlet(np.ones(n_keys))
    return CrsScheme(p, tuple((random_state(lay, rng), random_state(lay, rng))
                              for _ in range(n_keys)))


def efi_crs_scheme(params) -> CrsScheme:
    """Hash-based commitment with the key published: one state pair per table."""
    from . import commit
    from .hashfam import table_distribution
    dist = table_distribution(params.family)
    states = []
    for tab in dist.tables:
        inst = commit.crqs_from_table(params, tab)
        states.append(tuple(_to_cr(commit.honest_commit(inst, b).joint(), params.m)
                            for b in (0, 1)))
    return CrsScheme(dist.weights, tuple(states))


def classical_counterexample_scheme() -> CrsScheme:
    """One key whose C marginals are (1/2,1/2,0,0) and (0,1/2,1/2,0): 1 - F > TD."""
    lay = RegisterLayout.of(("C", 2), ("R", 2))

    def st(p):
        v = np.zeros(16, dtype=complex)
        for c, pc in enumerate(p):
            v[4 * c + c] = math.sqrt(pc)
        return PureState(v, lay)

    return CrsScheme(np.array([1.0]), ((st([.5, .5, 0, 0]), st([0, .5, .5, 0])),))


def _hiding_pair(rng, qc2: int, qr: int, label: int, qlab: int):
    """Two purifications of the same state |label><label| (x) rho on (C, R)."""
    rho = random_density(RegisterLayout.of(("M", qc2)), rng)
    base = purify(rho, "R").vector.reshape(1 << qc2, -1)
    dR = base.shape[1]
    if (1 << qr) != dR:
        raise ValueError("purifier width must match qr")
    out = []
    for _ in (0, 1):
        V = random_unitary(RegisterLayout.of(("R", qr)), rng).matrix
        a = base @ V.T
        v = np.zeros((1 << qlab, 1 << qc2, dR), dtype=complex)
        v[label] = a
        out.append(v.reshape(-1))
    return out


def exclusion_scheme(n: int, rng, exclude_shift: bool = True) -> CorrelatedScheme:
    """Perfectly hiding, perfectly correct scheme over x, y in [n].

    With ``exclude_shift`` the pair distribution is uniform over x != y + 1
    (mod n), whose distance to the product of its (uniform) marginals is 2/n;
    otherwise D is the uniform product. Committed states are |x> on a label
    register times a random purification (different for b = 0, 1) of the same
    random qubit state, so the reduced C states never depend on b. The receiver
    projects onto the span of the committed states of every x compatible with y.
    """
    qlab = _qubits_for(n)
    qc2, qr = 1, 1
    lay = RegisterLayout.of(("C", qlab + qc2), ("R", qr))
    D = np.ones((n, n))
    if exclude_shift:
        for y in range(n):
            D[(y + 1) % n, y] = 0
    D /= D.sum()
    states = []
    for x in range(n):
        v0, v1 = _hiding_pair(rng, qc2, qr, x, qlab)
        states.append((PureState(v0, lay), PureState(v1, lay)))
    return CorrelatedScheme(D, tuple(states), support_povm(D, states))


def support_povm(D, states) -> tuple:
    """Per y and b, the sum of projectors onto Psi_{x,b} over x compatible with y.

    A valid effect (and a projector) when committed states of distinct x are
    orthogonal, as with a classical label register.
    """
    D = np.asarray(D)
    povm = []
    for y in range(D.shape[1]):
        pair = []
        for b in (0, 1):
            L = sum(np.outer(states[x][b].vector, states[x][b].vector.conj())
                    for x in range(D.shape[0]) if D[x, y] > 0)
            pair.append(L)
        povm.append(tuple(pair))
    return tuple(povm)


def classical_crs_correlated(n: int, rng) -> CorrelatedScheme:
    """x = y with a point mass: the receiver projects onto the committed state."""
    lay = RegisterLayout.of(("C", 1), ("R", 1))
    D = np.zeros((n, n))
    D[0, 0] = 1.0
    states = tuple((random_state(lay, rng), random_state(lay, rng)) for _ in range(n))
    povm = tuple(tuple(np.outer(s.vector, s.vector.conj()) for s in pair) for pair in states)
    return CorrelatedScheme(D, states, povm)
