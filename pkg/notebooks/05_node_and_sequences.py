# %% [markdown]
# # Distribution through a lossy fibre, and non-identical sources
#
# A depolarizing fibre of length l keeps a Bell pair entangled only while
# alpha * l < ln 3. Filtering at an intermediate node cannot beat that
# bound: the partial-transpose determinant stays nonnegative everywhere at
# the critical length. Catalytic distillation at the midpoint doubles the
# reach.

# %%
import math

import numpy as np

from entcat import nodedist as nd
from entcat import noniid as ni

sp, be, det = nd.det_grid(200, 200)
print(f"smallest determinant on the grid: {det.min():.3e}")
for x in (0.5, 1.5, 2.5):
    print(f"alpha*l = {x} ln3: {nd.feasibility(1.0, x * math.log(3)).value}")
print("boundaries:", nd.verdict_boundary(1.0, 0.5, 1.5), nd.verdict_boundary(1.0, 1.5, 2.5))

# %% [markdown]
# ## A sequence with tiny singlet probability and unbounded entropy
#
# The minor Schmidt weights p_i shrink so fast that the chance of reaching
# a good singlet stays below eps, yet their entropies sum to infinity, so
# catalysis extracts arbitrarily many singlets.

# %%
seq = ni.build_sequence(0.9, 0.01, 1.0)
print(f"delta = {seq.delta}, log2 N = {seq.log2_N:.2f}")
for n in (10, 10**3, 10**6):
    total, lo, hi = ni.entropy_budget(seq, n)
    print(f"n={n:>7}: P_f={ni.singlet_probability(seq, n):.2e}  entropy={total:.3e} in [{lo:.3e}, {hi:.3e}]")
