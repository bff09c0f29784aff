"""The three attacks that rule out classical setups, on small toy schemes."""
# %%
import numpy as np

from qcommit import attacks
from qcommit.commit import SchemeParams

# %% common reference string: Uhlmann per key beats hiding
sch = attacks.efi_crs_scheme(SchemeParams(1, 2, 1))
tr = attacks.crs_tradeoff(sch)
print(f"success {tr['success']:.4f}, hiding advantage {tr['advantage']:.4f}")

# the linear form success >= 1 - advantage needs qubit-sized commitments
tr = attacks.crs_tradeoff(attacks.classical_counterexample_scheme())
print("qutrit counterexample: linear holds?", tr["linear_holds"],
      "squared form holds?", tr["certified_holds"])

# %% correlated randomness: success degrades gracefully with the correlation
rng = np.random.default_rng(1)
for n in (40, 20):
    r = attacks.correlated_attack(attacks.exclusion_scheme(n, rng))
    print(f"eps'={r['eps_product']:.2f}: p0={r['p0']:.4f} p1={r['p1']:.4f} "
          f"(floors {r['bound_p0']:.4f}, {r['bound_p1']:.4f})")
print("threshold", attacks.CORRELATION_THRESHOLD)

# %% unbounded copies: identify the key, then run the matching attack
r = attacks.unbounded_copy_attack(attacks.crqs_copy_scheme(SchemeParams(1, 2, 1)))
print("identification", r["identification"], "branch", r["branch"], "tradeoff", r["tradeoff_holds"])
