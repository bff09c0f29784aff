"""Walk through the keyed-state commitment: commit, verify, attack, extract."""
# %%
import numpy as np

from qcommit import commit
from qcommit.commit import SchemeParams
from qcommit.qla import random_state

params = SchemeParams(lam=1, n_out=2, m=2)
fam = params.family
print(f"{fam.k}-wise family over GF(2^{fam.w}), {fam.n_keys} keys")
inst = commit.crqs(params, fam.key_from_index(3))
print("reduced-state fidelity epsilon =", inst.epsilon)

# %% honest parties always succeed
for b in (0, 1):
    c = commit.honest_commit(inst, b)
    print(f"b={b}: accept = {commit.verify_prob(c, b, inst):.12f}")

# %% closed-form SWAP acceptance agrees with the gate-level circuit
rng = np.random.default_rng(0)
s = random_state(commit.commit_layout(inst), rng)
print("closed form", commit.verify_prob(s, 1, inst), "circuit", commit.swap_test_circuit(s, 1, inst))

# %% the Uhlmann attacker opens a commitment to 0 as 1; more copies make it harder
for m in (1, 2, 3):
    p = SchemeParams(1, 2, m)
    i = commit.crqs(p, p.family.key_from_index(3))
    p0, p1 = commit.sum_binding_probe(*commit.uhlmann_attacker(i), i)
    print(f"m={m}: p0+p1 = {p0 + p1:.6f}, envelope 1+{commit.envelope(m, i.epsilon):.4f}")

# %% the extractor predicts the only bit the receiver will accept
s0, s1 = commit.uhlmann_attacker(inst)
real, ideal = commit.real_experiment(s1, inst), commit.ideal_experiment(s1, inst)
print("Real/Ideal gap", commit.output_distance(real, ideal), "fail mass", ideal.prob(commit.FAIL))
