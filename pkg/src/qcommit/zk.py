"""Blum's Hamiltonicity protocol on top of the bit commitment, at tiny scale.

The prover commits to the upper triangle of pi(G), bit by bit, one
commitment per position (u, v), u < v, in row-major order. Challenge 0 opens
every bit and pi; challenge 1 opens the bits on the image of the cycle.

Cheating provers are given as blocks of positions with a joint committed
state and, per challenge, announced bits and a reveal unitary; single-position
blocks give product-mode provers.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from . import commit
from .config import TOL
from .qla import PureState, RegisterLayout, Unitary, trace_norm

MAX_VERTICES = 6


# --------------------------------------------------------------------------- #
# graphs

def positions(n: int) -> list:
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


@dataclass(frozen=True)
class Graph:
    n: int
    adj: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adj, dtype=bool)
        if not 1 <= self.n <= MAX_VERTICES:
            raise ValueError(f"graphs are limited to 1..{MAX_VERTICES} vertices")
        if a.shape != (self.n, self.n) or np.any(a != a.T) or np.any(np.diag(a)):
            raise ValueError("adjacency must be symmetric with an empty diagonal")
        a.setflags(write=False)
        object.__setattr__(self, "adj", a)

    @classmethod
    def from_edges(cls, n, edges) -> "Graph":
        a = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"bad edge ({u}, {v})")
            a[u, v] = a[v, u] = True
        return cls(n, a)

    @classmethod
    def complete(cls, n) -> "Graph":
        return cls.from_edges(n, positions(n))

    @property
    def edges(self) -> list:
        return [(u, v) for u, v in positions(self.n) if self.adj[u, v]]

    def bits(self) -> tuple:
        return tuple(int(self.adj[u, v]) for u, v in positions(self.n))

    @classmethod
    def from_bits(cls, n, bits) -> "Graph":
        return cls.from_edges(n, [p for p, b in zip(positions(n), bits) if b])

    def permute(self, perm) -> "Graph":
        """pi(G): vertex v is renamed perm[v]."""
        return Graph.from_edges(self.n, [(perm[u], perm[v]) for u, v in self.edges])

    def hamiltonian_cycles(self) -> list:
        """All Hamiltonian cycles, each once, as vertex orders starting at 0."""
        out = []
        if self.n < 3:
            return out
        for rest in itertools.permutations(range(1, self.n)):
            if rest[0] > rest[-1]:
                continue
            order = (0,) + rest
            if all(self.adj[order[i], order[(i + 1) % self.n]] for i in range(self.n)):
                out.append(order)
        return out

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "edges": [list(e) for e in self.edges]})


def parse_graph(text: str) -> Graph:
    """JSON {"n": N, "edges": [[u, v], ...]} or an edge list.

    Edge-list text: one "u v" pair per line, '#' comments, and an optional
    "n N" line giving the vertex count (default: largest label + 1).
    """
    text = text.strip()
    if text.startswith("{"):
        d = json.loads(text)
        return Graph.from_edges(int(d["n"]), [tuple(map(int, e)) for e in d["edges"]])
    n, edges = None, []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n" and len(parts) == 2:
            n = int(parts[1])
            continue
        if len(parts) != 2:
            raise ValueError(f"cannot parse edge line {line!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    return Graph.from_edges(n, edges)


@dataclass(frozen=True)
class HamiltonianCycle:
    order: tuple

    def edge_positions(self, n: int) -> tuple:
        idx = {p: i for i, p in enumerate(positions(n))}
        out = []
        for i in range(n):
            u, v = self.order[i], self.order[(i + 1) % n]
            out.append(idx[(min(u, v), max(u, v))])
        return tuple(sorted(out))

    def check(self, g: Graph):
        if sorted(self.order) != list(range(g.n)):
            raise ValueError("cycle must visit every vertex once")
        for i in range(g.n):
            if not g.adj[self.order[i], self.order[(i + 1) % g.n]]:
                raise ValueError("cycle uses a non-edge")


def is_hamiltonian_position_set(n: int, pos_idx) -> bool:
    """Do these upper-triangle positions form a single n-vertex cycle?"""
    ps = positions(n)
    pos_idx = sorted(set(pos_idx))
    if len(pos_idx) != n or n < 3:
        return False
    deg = np.zeros(n, dtype=int)
    nbr = {v: [] for v in range(n)}
    for i in pos_idx:
        u, v = ps[i]
        deg[u] += 1
        deg[v] += 1
        nbr[u].append(v)
        nbr[v].append(u)
    if np.any(deg != 2):
        return False
    seen, prev, cur = {0}, None, 0
    for _ in range(n - 1):
        nxt = [w for w in nbr[cur] if w != prev][0]
        if nxt in seen:
            return False
        seen.add(nxt)
        prev, cur = cur, nxt
    return len(seen) == n


# --------------------------------------------------------------------------- #
# honest protocol

@dataclass(frozen=True)
class RoundOne:
    graph_bits: tuple          # committed bits of pi(G)
    commitments: tuple         # per position: ProductCommitment


@dataclass(frozen=True)
class ZkTranscript:
    commitments: tuple
    challenge: int
    perm: tuple | None         # opened for c = 0
    revealed: dict             # position index -> announced bit
    accept_prob: float | None = None


def prove_commit(G: Graph, H: HamiltonianCycle, inst: commit.CrqsDescription,
                 rng=None, perm=None) -> tuple:
    """Commit to pi(G) bit by bit. ``perm`` forces pi (test hook)."""
    H.check(G)
    if perm is None:
        rng = rng if rng is not None else np.random.default_rng()
        perm = tuple(int(v) for v in rng.permutation(G.n))
    perm = tuple(perm)
    if sorted(perm) != list(range(G.n)):
        raise ValueError("perm must be a permutation of the vertices")
    bits = G.permute(perm).bits()
    coms = tuple(commit.honest_commit(inst, b) for b in bits)
    return RoundOne(bits, coms), perm


def prove_respond(r1: RoundOne, perm, G: Graph, H: HamiltonianCycle, c: int) -> ZkTranscript:
    if c == 0:
        return ZkTranscript(r1.commitments, 0, tuple(perm), dict(enumerate(r1.graph_bits)))
    cyc = HamiltonianCycle(tuple(perm[v] for v in H.order)).edge_positions(G.n)
    return ZkTranscript(r1.commitments, 1, None, {j: 1 for j in cyc})


def structural_ok(G: Graph, c: int, perm, revealed: dict) -> bool:
    B = len(positions(G.n))
    if c == 0:
        if perm is None or sorted(perm) != list(range(G.n)) or sorted(revealed) != list(range(B)):
            return False
        return tuple(revealed[j] for j in range(B)) == G.permute(perm).bits()
    return all(v == 1 for v in revealed.values()) and \
        is_hamiltonian_position_set(G.n, list(revealed))


def verify(tr: ZkTranscript, inst: commit.CrqsDescription, G: Graph) -> float:
    """Exact acceptance probability of a transcript."""
    if not structural_ok(G, tr.challenge, tr.perm, tr.revealed):
        return 0.0
    p = 1.0
    for j, b in tr.revealed.items():
        p *= commit.verify_prob(tr.commitments[j], b, inst)
    return float(p)


def completeness(G: Graph, H: HamiltonianCycle, inst, perm=None, rng=None) -> dict:
    out = {}
    r1, perm = prove_commit(G, H, inst, rng=rng, perm=perm)
    for c in (0, 1):
        out[c] = verify(prove_respond(r1, perm, G, H, c), inst, G)
    return out


# --------------------------------------------------------------------------- #
# cheating provers

def _block_names(m: int, nbits: int) -> list:
    return commit.pair_names(m, nbits)


@dataclass(frozen=True)
class BlockStrategy:
    """Joint committed state for the positions ``positions``.

    ``initial`` lives on X{j}.{i}, Y{j}.{i} for j indexing ``positions`` plus
    any workspace. ``responses[c] = (announced, reveal)`` with ``announced``
    a dict position -> bit for the block's revealed positions and ``reveal`` a
    unitary on Y and workspace registers (or None).
    """
    positions: tuple
    initial: PureState
    responses: dict

    def as_committer(self, m: int, c: int):
        """Relabel to a CommitterStrategy over the revealed positions only."""
        announced, reveal = self.responses[c]
        rev = [j for j, p in enumerate(self.positions) if p in announced]
        if not rev:
            return None
        ren = {}
        for r, j in enumerate(rev):
            for i in range(1, m + 1):
                ren[f"X{j}.{i}"] = f"X{r}.{i}"
                ren[f"Y{j}.{i}"] = f"Y{r}.{i}"
        for j, p in enumerate(self.positions):
            if j not in rev:
                for i in range(1, m + 1):
                    ren[f"X{j}.{i}"] = f"_uX{j}.{i}"
                    ren[f"Y{j}.{i}"] = f"_uY{j}.{i}"

        def relabel(layout):
            return RegisterLayout(tuple((ren.get(n, n), q) for n, q in layout.registers))

        init = PureState(self.initial.vector, relabel(self.initial.layout))
        U = None if reveal is None else Unitary(reveal.matrix, relabel(reveal.layout))
        bits = tuple(int(announced[self.positions[j]]) for j in rev)
        return commit.CommitterStrategy(init, bits, U)


@dataclass(frozen=True)
class ProverStrategy:
    blocks: tuple
    perm: tuple            # announced at c = 0
    label: str = ""

    def announced(self, c: int) -> dict:
        out = {}
        for b in self.blocks:
            out.update(b.responses[c][0])
        return out


def block_from_states(inst, pos, bit_states, responses, w_qubits=0) -> BlockStrategy:
    """Block over ``pos`` from a joint vector on its pairs (+ workspace)."""
    m = inst.m
    regs = []
    for g in _block_names(m, len(pos)):
        for x, y in g:
            regs += [(x, inst.x_qubits), (y, inst.y_qubits)]
    if w_qubits:
        regs.append(("W", w_qubits))
    lay = RegisterLayout(tuple(regs))
    return BlockStrategy(tuple(pos), PureState(bit_states, lay), responses)


def _honest_vec(inst, bit):
    return commit.honest_commit(inst, bit).joint().vector


def honest_style_prover(G: Graph, inst, perm) -> ProverStrategy:
    """Commit pi(G) honestly; at c=1 open every committed edge (never a cycle)."""
    bits = G.permute(perm).bits()
    blocks = []
    for j, b in enumerate(bits):
        r1 = ({j: 1}, None) if b else ({}, None)
        blocks.append(block_from_states(inst, (j,), _honest_vec(inst, b), {0: ({j: b}, None), 1: r1}))
    return ProverStrategy(tuple(blocks), tuple(perm), "honest-style")


def fake_graph_prover(G: Graph, inst, perm) -> ProverStrategy:
    """Commit a bare Hamiltonian cycle graph; open it fully at c=0, its cycle at c=1."""
    n = G.n
    fake = Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)]).permute(perm)
    bits = fake.bits()
    blocks = []
    for j, b in enumerate(bits):
        r1 = ({j: 1}, None) if b else ({}, None)
        blocks.append(block_from_states(inst, (j,), _honest_vec(inst, b), {0: ({j: b}, None), 1: r1}))
    return ProverStrategy(tuple(blocks), tuple(perm), "fake-hamiltonian")


def uhlmann_prover(G: Graph, inst, perm, cycle=None) -> ProverStrategy:
    """Commit pi(G) honestly; at c=1 claim a cycle, opening committed 0s as 1 via Uhlmann."""
    n = G.n
    cycle = cycle or HamiltonianCycle(tuple(range(n)))
    cyc = set(cycle.edge_positions(n))
    bits = G.permute(perm).bits()
    s0, s1 = commit.uhlmann_attacker(inst)
    Uy = s1.reveal
    blocks = []
    for j, b in enumerate(bits):
        r1 = ({}, None)
        if j in cyc:
            U = None
            if b == 0:
                names = [f"Y0.{i}" for i in range(1, inst.m + 1)]
                U = Unitary(Uy.matrix, RegisterLayout(tuple(
                    (nm, inst.y_qubits) for nm in names)))
            r1 = ({j: 1}, U)
        blocks.append(block_from_states(inst, (j,), _honest_vec(inst, b), {0: ({j: b}, None), 1: r1}))
    return ProverStrategy(tuple(blocks), tuple(perm), "uhlmann")


def random_prover(G: Graph, inst, perm, rng, w_qubits=1, joint=(), cycle=None) -> ProverStrategy:
    """Random committed states and reveal unitaries with protocol-shaped announcements.

    Positions in ``joint`` share one entangled block; all others are single.
    """
    from .qla import random_state, random_unitary
    n = G.n
    B = len(positions(n))
    cycle = cycle or HamiltonianCycle(tuple(range(n)))
    cyc = set(cycle.edge_positions(n))
    bits = G.permute(perm).bits()
    groups = [tuple(joint)] if joint else []
    groups += [(j,) for j in range(B) if j not in joint]
    blocks = []
    for pos in groups:
        regs = []
        for g in _block_names(inst.m, len(pos)):
            for x, y in g:
                regs += [(x, inst.x_qubits), (y, inst.y_qubits)]
        regs.append(("W", w_qubits))
        lay = RegisterLayout(tuple(regs))
        st = random_state(lay, rng)
        ynames = [y for g in _block_names(inst.m, len(pos)) for _, y in g] + ["W"]
        resp = {}
        for c in (0, 1):
            ann = {p: bits[p] for p in pos} if c == 0 else {p: 1 for p in pos if p in cyc}
            U = random_unitary(lay.sub(ynames), rng)
            resp[c] = (ann, U)
        blocks.append(BlockStrategy(pos, st, resp))
    return ProverStrategy(tuple(blocks), tuple(perm), "random" + ("-joint" if joint else ""))


def _block_accept(block: BlockStrategy, inst, c: int):
    s = block.as_committer(inst.m, c)
    if s is None:
        return 1.0, 0.0, None
    real = commit.real_experiment(s, inst)
    ideal = commit.ideal_experiment(s, inst)
    lab = s.bit if len(s.bit) > 1 else s.bit[0]
    return real.prob(lab), commit.output_distance(real, ideal), ideal.prob(lab)


def soundness_experiment(prover: ProverStrategy, G: Graph, inst) -> dict:
    """Exact acceptance of a cheating prover and the extractor certificate."""
    if G.hamiltonian_cycles():
        raise ValueError("soundness is only defined for non-Hamiltonian graphs")
    B = len(positions(G.n))
    covered = sorted(p for b in prover.blocks for p in b.positions)
    if covered != list(range(B)):
        raise ValueError("blocks must partition the committed positions")
    acc, ideal_acc, gaps = {}, {}, []
    per_block = [{c: _block_accept(b, inst, c) for c in (0, 1)} for b in prover.blocks]
    for c in (0, 1):
        ann = prover.announced(c)
        ok = structural_ok(G, c, prover.perm if c == 0 else None, ann)
        acc[c] = float(ok * np.prod([pb[c][0] for pb in per_block]))
        ideal_acc[c] = float(ok * np.prod([pb[c][2] if pb[c][2] is not None else 1.0
                                            for pb in per_block]))
    gaps = [max(pb[0][1], pb[1][1]) for pb in per_block]
    gap_sum = float(sum(gaps))
    acceptance = 0.5 * (acc[0] + acc[1])
    bound = 0.5 + gap_sum

    # extracted graph: per-position extractor marginals on the committed X registers
    marg = np.zeros((B, 3))
    for blk in prover.blocks:
        for j, p in enumerate(blk.positions):
            xn = [f"X{j}.{i}" for i in range(1, inst.m + 1)]
            ext = commit.extractor(inst, blk.initial, xnames=xn)
            marg[p] = [ext.prob(0), ext.prob(1), ext.prob(commit.BOT)]
    likely = tuple(int(np.argmax(r[:2])) for r in marg)
    a0 = prover.announced(0)
    a1 = prover.announced(1)
    zeros_on_cycle = [j for j in a1 if a0.get(j, 1) == 0]
    return {
        "acceptance": acceptance, "accept_by_challenge": acc,
        "ideal_accept_by_challenge": ideal_acc,
        "gap_sum": gap_sum, "block_gaps": gaps, "bound": bound,
        "holds": acceptance <= bound + TOL.end_to_end,
        "certificate": {
            "extracted_marginals": marg.tolist(),
            "most_likely_graph": likely,
            "c0_structural": structural_ok(G, 0, prover.perm, a0),
            "c1_structural": structural_ok(G, 1, None, a1),
            "cycle_positions_opened_as_zero_at_c0": zeros_on_cycle,
            "argument": ("an accepted c=0 opening equals pi(G), which has no Hamiltonian "
                         "cycle, so some claimed cycle position is extracted as 0 whenever "
                         "c=0 would pass; the two ideal acceptance events are disjoint"),
        },
    }


# --------------------------------------------------------------------------- #
# simulator for measurable-challenge verifiers

@dataclass(frozen=True)
class ChallengeVerifier:
    """Challenge rule of a malicious verifier.

    Either commitment-independent with Pr[c=0] = ``bias``, or a two-outcome
    measurement with effect ``effect`` (for c=0) on the X registers of the
    commitment at position ``position``.
    """
    bias: float = 0.5
    position: int | None = None
    effect: np.ndarray | None = None

    def __post_init__(self):
        if self.effect is not None:
            E = np.asarray(self.effect, dtype=complex)
            w = np.linalg.eigvalsh((E + E.conj().T) / 2)
            if w[0] < -TOL.structural or w[-1] > 1 + TOL.structural:
                raise ValueError("effect must satisfy 0 <= E <= I")
            object.__setattr__(self, "effect", (E + E.conj().T) / 2)
        elif not 0 <= self.bias <= 1:
            raise ValueError("bias must be a probability")

    @property
    def measured(self) -> bool:
        return self.effect is not None

    def kraus(self, c: int) -> np.ndarray:
        E = self.effect if c == 0 else np.eye(len(self.effect)) - self.effect
        w, v = np.linalg.eigh(E)
        return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def _xi_power(inst, a: int) -> np.ndarray:
    xi = inst.reduced[a].matrix
    out = np.ones((1, 1))
    for _ in range(inst.m):
        out = np.kron(out, xi)
    return out


def _c_state(inst, a, verifier, c, here):
    """X-register state of one commitment after the challenge measurement."""
    xi = _xi_power(inst, a)
    if here and verifier.measured:
        K = verifier.kraus(c)
        return K @ xi @ K.conj().T
    return xi


def _q(inst, verifier, c, a):
    if verifier.measured:
        p0 = float(np.trace(verifier.effect @ _xi_power(inst, a)).real)
    else:
        p0 = verifier.bias
    return p0 if c == 0 else 1 - p0


def _unrevealed_norm_diff(terms_a, terms_b) -> float:
    """|| sum_a X_a (x) diag(v_a) - sum_b Y_b (x) diag(w_b) ||_1.

    Terms are (matrix on the measured slot or None, diagonal vector on the
    other unrevealed slots).
    """
    terms = [(X, v) for X, v in terms_a] + [(X, -w) for X, w in terms_b]
    if not terms:
        return 0.0
    if all(X is None for X, _ in terms):
        return float(np.sum(np.abs(sum(v for _, v in terms))))
    d = next(len(X) for X, _ in terms if X is not None)
    tot = 0.0
    R = len(terms[0][1])
    for r in range(R):
        M = np.zeros((d, d), dtype=complex)
        for X, v in terms:
            M += v[r] * (X if X is not None else np.eye(d))
        tot += trace_norm(M)
    return tot


def _c1_view(G: Graph, inst, verifier, graph_perms, weight):
    """Per revealed cycle position-set: (trace of revealed factor, terms, mass)."""
    B = len(positions(G.n))
    j0 = verifier.position if verifier.measured else None
    out = {}
    for perm, cyc_pos, bits in graph_perms:
        rev = set(cyc_pos)
        unrev = [j for j in range(B) if j not in rev]
        tr_rev = 1.0
        if j0 is not None and j0 in rev:
            tr_rev = _q(inst, verifier, 1, 1)
        X = None
        diag = np.ones(1)
        for j in unrev:
            st = _c_state(inst, bits[j], verifier, 1, j == j0)
            if j == j0 and verifier.measured:
                X = st
            else:
                diag = np.kron(diag, np.real(np.diag(st)))
        if j0 is None:
            tr_rev = _q(inst, verifier, 1, 0)
        key = tuple(sorted(rev))
        ent = out.setdefault(key, {"tr_rev": tr_rev, "terms": []})
        ent["terms"].append((X, weight * diag))
    return out


def _merge_terms(terms):
    """Sum terms sharing the same (identical) measured-slot matrix."""
    merged = []
    for X, v in terms:
        for i, (Y, w) in enumerate(merged):
            if (X is None and Y is None) or (X is not None and Y is not None and
                                             np.allclose(X, Y, atol=1e-14)):
                merged[i] = (Y, w + v)
                break
        else:
            merged.append((X, v.copy()))
    return merged


def _real_perms(G: Graph, H: HamiltonianCycle):
    for perm in itertools.permutations(range(G.n)):
        cyc = HamiltonianCycle(tuple(perm[v] for v in H.order)).edge_positions(G.n)
        yield perm, cyc, G.permute(perm).bits()


def _sim_perms(n: int):
    base = Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    H0 = HamiltonianCycle(tuple(range(n)))
    for perm in itertools.permutations(range(n)):
        cyc = HamiltonianCycle(tuple(perm[v] for v in H0.order)).edge_positions(n)
        yield perm, cyc, base.permute(perm).bits()


def _c0_mass(G, inst, verifier):
    nf = math.factorial(G.n)
    j0 = verifier.position
    tot = 0.0
    for perm in itertools.permutations(range(G.n)):
        bits = G.permute(perm).bits()
        tot += _q(inst, verifier, 0, bits[j0] if verifier.measured else 0) / nf
    return tot


def _views_distance(va, vb, scale_b=1.0) -> float:
    keys = set(va) | set(vb)
    tot = 0.0
    for k in keys:
        ea = va.get(k, {"tr_rev": 0.0, "terms": []})
        eb = vb.get(k, {"tr_rev": 0.0, "terms": []})
        tr = ea["tr_rev"] if k in va else eb["tr_rev"]
        ta = _merge_terms(ea["terms"])
        tb = _merge_terms([(X, scale_b * v) for X, v in eb["terms"]])
        tot += 0.5 * tr * _unrevealed_norm_diff(ta, tb)
    return tot


def commitment_view_td(inst) -> float:
    """TD between the sent X registers of commitments to 0 and to 1."""
    return 0.5 * trace_norm(_xi_power(inst, 0) - _xi_power(inst, 1))


def simulator(verifier: ChallengeVerifier, G: Graph, H: HamiltonianCycle, inst,
              loops: int = 20) -> dict:
    """Guess-the-challenge simulator; exact halt/fail probabilities and TD to the real view.

    The verifier's output is its challenge, the opened classical data, and its
    quantum registers: every commitment's X registers and the opened
    commitments' Y registers (these are identical pure factors in both
    worlds, so they enter only through their trace).
    """
    H.check(G)
    n, B = G.n, len(positions(G.n))
    if verifier.measured and not 0 <= verifier.position < B:
        raise ValueError("verifier position out of range")
    nf = math.factorial(n)
    # halting: c~ = 0 commits pi(G), c~ = 1 commits sigma(cycle)
    e_g = sum(G.bits()) / B
    cyc_frac = n / B
    if verifier.measured:
        h0 = e_g * _q(inst, verifier, 0, 1) + (1 - e_g) * _q(inst, verifier, 0, 0)
        h1 = cyc_frac * _q(inst, verifier, 1, 1) + (1 - cyc_frac) * _q(inst, verifier, 1, 0)
    else:
        h0, h1 = verifier.bias, 1 - verifier.bias
    halt = 0.5 * h0 + 0.5 * h1
    fail = (1 - halt) ** loops
    s = (1 - fail) / halt if halt > 0 else 0.0
    # c = 0 branch: identical operators, scaled by s/2 in the simulation
    real_c0 = _c0_mass(G, inst, verifier)
    td = 0.5 * abs(1 - s / 2) * real_c0
    # c = 1 branch
    real_v = _c1_view(G, inst, verifier, _real_perms(G, H), 1.0 / nf)
    sim_v = _c1_view(G, inst, verifier, _sim_perms(n), 1.0 / nf)
    td += _views_distance(real_v, sim_v, scale_b=s / 2)
    td += 0.5 * fail
    tdb = commitment_view_td(inst)
    bound = (B - n) * tdb + abs(1 - s / 2) + 0.5 * fail
    return {
        "halt": halt, "halt_deviation": abs(halt - 0.5),
        "halt_bound": 0.5 * tdb if verifier.measured else 0.0,
        "fail": fail, "loops": loops, "td_real_sim": td,
        "bit_view_td": tdb, "td_bound": bound,
        "holds": td <= bound + TOL.end_to_end,
        "verifier_class": "measurable challenge (commitment-independent or one-position POVM)",
    }


def witness_views_td(G: Graph, Ha: HamiltonianCycle, Hb: HamiltonianCycle, inst,
                     verifier: ChallengeVerifier | None = None) -> dict:
    """TD between verifier views of honest runs with two different witnesses."""
    verifier = verifier or ChallengeVerifier()
    Ha.check(G)
    Hb.check(G)
    n, B = G.n, len(positions(G.n))
    nf = math.factorial(n)
    va = _c1_view(G, inst, verifier, _real_perms(G, Ha), 1.0 / nf)
    vb = _c1_view(G, inst, verifier, _real_perms(G, Hb), 1.0 / nf)
    td = _views_distance(va, vb)
    bound = (B - n) * commitment_view_td(inst)
    return {"td": td, "bound": bound, "holds": td <= bound + TOL.end_to_end}
