"""Hamiltonicity proof with the keyed-state commitment."""
# %%
import numpy as np

from qcommit import zk
from qcommit.commit import SchemeParams, crqs

p = SchemeParams(1, 2, 1)
inst = crqs(p, p.family.key_from_index(0))
K4 = zk.Graph.complete(4)
H = zk.HamiltonianCycle(K4.hamiltonian_cycles()[0])
print("completeness", zk.completeness(K4, H, inst, rng=np.random.default_rng(0)))

# %% soundness on a graph with no Hamiltonian cycle
with open(__file__.rsplit("/", 1)[0] + "/graphs/paw_minus.txt") as f:
    G = zk.parse_graph(f.read())
perm = (2, 0, 3, 1)
for prover in (zk.honest_style_prover(G, inst, perm), zk.fake_graph_prover(G, inst, perm),
               zk.uhlmann_prover(G, inst, perm)):
    r = zk.soundness_experiment(prover, G, inst)
    print(f"{prover.label:18s} accept {r['acceptance']:.4f} <= {r['bound']:.4f}")

# %% the guess-the-challenge simulator
for v in (zk.ChallengeVerifier(0.5), zk.ChallengeVerifier(1.0),
          zk.ChallengeVerifier(position=0, effect=np.diag([1.0, 0, 0, 0]))):
    r = zk.simulator(v, K4, H, inst, loops=10)
    print(f"halt {r['halt']:.4f}, TD {r['td_real_sim']:.3e} <= {r['td_bound']:.3e}")
