# %% [markdown]
# # Single-use transmission thresholds
#
# A channel carries m qubits with catalytic help when the Choi-state
# entropy leaves room for m bits of hashing. For n Pauli channels in
# parallel this gives the largest admissible weight of the identity term.
# The entanglement-of-formation converse gives the value below which
# transmission is impossible.

# %%
import numpy as np

from entcat import capacity as cap
from entcat import channels as chn

rows = cap.fig2_curves(range(1, 11))
print(" n  transmit  converse")
for n, solid, dashed in rows:
    print(f"{n:2d}  {solid:.4f}    {dashed:.4f}")
print(f"transmit threshold as n grows: {cap.pauli_transmit_limit():.4f}")

# %% [markdown]
# ## Generalised amplitude damping
#
# The hashing bound of the Choi state stays above one qubit up to a
# dimension-dependent damping strength.

# %%
for d in range(3, 9):
    p = cap.adc_transmit_range(d, 1)
    print(f"d={d}: p <= {p:.4f}")

# %% [markdown]
# The bracket for a concrete channel combines the Kraus-count lower bound
# with the hashing-based upper bound.

# %%
rep = cap.capacity_report(chn.gad_channel(4, 0.2))
print(rep.to_json())
