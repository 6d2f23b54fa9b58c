# %% [markdown]
# # Sampled upper bound on squashed entanglement
#
# For the dephased Bell pair p|phi+><phi+| + (1-p)|phi-><phi-| we purify on
# two environment qubits, rotate them with a random unitary, drop one and
# evaluate I(A;B|E)/2. The minimum over the draws bounds the squashed
# entanglement from above. Entanglement of formation is printed alongside.

# %%
import numpy as np

from entcat import capacity as cap
from entcat import measures as ms

SAMPLES = 20_000  # raise to 10**5 or 10**6 for a sharper curve
print("   p     E_f    sampled")
for p in np.linspace(0.5, 1.0, 11):
    ef = ms.eof_bell_diagonal(p)
    mc = ms.squashed_ub_mc(ms.bell_mixture_71(p), SAMPLES, seed=ms.DEFAULT_SEED)
    print(f"{p:.3f}  {ef:.4f}  {mc:.4f}")

# %% [markdown]
# Random search converges slowly where the optimum sits on a thin set of
# unitaries. Near p = 1/2 the state is separable, yet the sampled minimum
# stays a few hundredths above zero at these sample sizes.
#
# ## Two copies of the dephasing channel
#
# Two uses of the channel transmit a qubit once the Choi entropy allows it.
# The converse needs the sampled bound below one half.

# %%
print("two copies transmit at p=0.89:", cap.choi_entropy_transmit(cap.two_copy_dephasing(0.89), 1))
verdict, bound = cap.pauli_converse_esq_mc(0.817, 2, 1, samples=SAMPLES)
print(f"converse at p=0.817 with {SAMPLES} draws: {verdict.value} (bound {bound:.5f})")
