# %% [markdown]
# # From an asymptotic protocol to a single-copy catalytic one
#
# Given a channel that maps n copies of rho (with a catalyst tau) close to
# n copies of sigma, the simulator builds the larger catalyst tau', runs
# the three steps (read the counter, shift it, rotate the copies) and
# measures how far the output is from sigma (x) tau'.

# %%
import numpy as np

from entcat import catalysim as cs
from entcat import channels as chn
from entcat import linalg as la

for name in ("identity", "permute_depolarize"):
    res = cs.run_scenario(cs.preset_scenario(name, n=3, eps=0.1))
    print(name, {k: (None if v is None else round(v, 6)) for k, v in res.report().items()})

# %% [markdown]
# ## Reusing one catalyst
#
# Applying the same catalytic map to fresh copies lets errors add up at
# most linearly in the number of uses.

# %%
rng = np.random.default_rng(2021)
rho = la.random_density_matrix((2,), seed=rng)
sigma = la.random_density_matrix((2,), seed=rng)
tau = la.DensityMatrix(np.diag([0.7, 0.3]))
lam = cs.controlled_channel([chn.replacement_channel(sigma, 2), chn.unitary_channel(la.haar_unitary(2, rng))])
eps = cs.catalytic_error(rho, sigma, lam, tau)
for n in (1, 2, 3):
    _, dist = cs.sequential_reuse(rho, sigma, lam, tau, n)
    print(f"n={n}: distance {dist:.4f}  (n * eps = {n * eps:.4f})")
