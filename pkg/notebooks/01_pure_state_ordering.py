# %% [markdown]
# # Pure-state ordering under catalysis
#
# With a catalyst, one pure state converts into another exactly when its
# entanglement entropy is at least as large. Logarithmic negativity can
# rank the same pair the other way round, which rules it out as the
# monotone for catalytic conversion. This script shows such a qutrit pair,
# checks that no qubit pair behaves like this, and builds the finite net of
# Schmidt vectors used for approximate targets.

# %%
import numpy as np

from entcat import convertibility as cv
from entcat import linalg as la
from entcat import measures as ms

psi, phi = cv.ordering_example()
for name, v in (("psi", psi), ("phi", phi)):
    print(f"{name}: schmidt={np.round(v, 4)}  E={ms.shannon_entropy(v):.4f}  E_N={cv.pure_log_negativity(v):.4f}")
print("catalytic psi -> phi allowed:", cv.catalytic_convertible(psi, phi))
print("plain LOCC psi -> phi allowed:", cv.nielsen_convertible(psi, phi))

# %% [markdown]
# The closed-form negativity agrees with the dense partial transpose.

# %%
v = np.zeros(9)
v[[0, 4, 8]] = np.sqrt(psi)
print("dense E_N:", ms.log_negativity(la.DensityMatrix.from_ket(v, (3, 3))))

# %% [markdown]
# For two qubits both quantities are increasing functions of the smaller
# Schmidt weight, so an exhaustive grid finds no reversal.

# %%
top = np.arange(500, 1001) / 1000
vecs = np.column_stack([top, 1 - top])
ent = np.array([ms.shannon_entropy(x) for x in vecs])
neg = 2 * np.log2(np.sqrt(vecs).sum(axis=1))
reversal = (ent[:, None] >= ent[None, :] - 1e-12) & (neg[:, None] < neg[None, :] - 1e-12)
print("qubit reversals on the grid:", int(reversal.sum()))

# %% [markdown]
# ## Schmidt-vector net
#
# Every target is replaced by a nearby net point that majorizes it
# strictly. The nonzero entropies of the net points are separated by at
# least the gap L.

# %%
net = cv.build_eps_net(3, 0.5)
print(f"points={len(net)}  gap L={net.pairwise_gap:.3e}  delta={net.delta:.3e}")
rng = np.random.default_rng(2021)
worst = 0.0
for _ in range(200):
    target = np.sort(rng.dirichlet(np.ones(3)))[::-1]
    g = cv.select_target(target, net)
    worst = max(worst, cv.pure_trace_distance(target, g))
print(f"largest trace distance to the chosen point: {worst:.4f} (limit {net.eps / 4})")
