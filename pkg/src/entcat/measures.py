"""Entropies and entanglement measures (all logarithms base 2)."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Sequence

import numpy as np

from .channels import QuantumChannel, apply, apply_to_half
from .errors import InvalidArgument, InvalidDistribution, UnsupportedRank
from .linalg import (
    DensityMatrix,
    eigvalsh,
    haar_unitaries,
    partial_trace,
    partial_transpose,
    trace_norm,
)

EIG_CUTOFF = 1e-12
DEFAULT_SEED = 2021
MC_CHUNK = 8192

_SY = np.array([[0, -1j], [1j, 0]])
_SYSY = np.kron(_SY, _SY)


def _entropy_of_spectrum(w: np.ndarray) -> np.ndarray:
    # works on stacks along the last axis; entries below the cutoff count as 0
    w = np.asarray(w, dtype=float)
    safe = np.where(w > EIG_CUTOFF, w, 1.0)
    return -np.sum(np.where(w > EIG_CUTOFF, w * np.log2(safe), 0.0), axis=-1)


def check_distribution(p, tol: float = 1e-9) -> np.ndarray:
    p = np.asarray(p, dtype=float).ravel()
    if p.size == 0:
        raise InvalidDistribution("empty distribution")
    if np.any(p < 0):
        raise InvalidDistribution(f"negative entry {p.min():.3e} in distribution")
    if abs(p.sum() - 1.0) > tol:
        raise InvalidDistribution(f"distribution sums to {p.sum()!r}")
    return p


def shannon_entropy(p) -> float:
    """Shannon entropy in bits of a probability vector."""
    p = check_distribution(p)
    q = p[p > 0]
    return float(max(0.0, -np.sum(q * np.log2(q))))


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise InvalidArgument(f"binary entropy argument {x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    return float(max(0.0, _entropy_of_spectrum(eigvalsh(rho.mat))))


def _subsystem_list(cut, n: int) -> list[int]:
    if isinstance(cut, (int, np.integer)):
        cut = [cut]
    out = [int(k) for k in cut]
    if any(not 0 <= k < n for k in out):
        raise InvalidArgument(f"subsystems {out} out of range for {n} subsystems")
    return out


def log_negativity(rho: DensityMatrix, cut: int | Iterable[int] = 0) -> float:
    """``log2 ||rho^{T_A}||_1`` where A is the subsystem (or list) ``cut``."""
    idx = _subsystem_list(cut, len(rho.dims))
    m = rho
    for k in idx:
        m = DensityMatrix._trusted(partial_transpose(m, k), rho.dims)
    return float(max(0.0, np.log2(trace_norm(m.mat))))


def negativity_continuity_bound(d: int, eps: float) -> float:
    """Bound on ``|E_N(rho) - E_N(sigma)|`` for states with ``||rho - sigma||_1 <= eps``."""
    if d < 2 or eps < 0:
        raise InvalidArgument("need d >= 2 and eps >= 0")
    return float(np.sqrt(d) * eps / np.log(2))


def concurrence(rho: DensityMatrix) -> float:
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are the square roots of the eigenvalues of
    ``sqrt(rho) rho~ sqrt(rho)``. Writing ``rho = B B^dag`` they are the
    singular values of ``B^dag (sy sy) B^*``, which avoids taking square roots
    of eigenvalues that are zero up to rounding. Eigenvalues of ``rho`` below
    ``1e-14`` are treated as exact zeros.
    """
    if rho.dim != 4:
        raise InvalidArgument(f"concurrence needs a two-qubit state, got dimension {rho.dim}")
    w, v = np.linalg.eigh(rho.mat)
    w = np.where(w > 1e-14, w, 0.0)
    b = v * np.sqrt(w)
    lam = np.linalg.svd(b.conj().T @ _SYSY @ b.conj(), compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def eof_two_qubit(rho: DensityMatrix) -> float:
    """Entanglement of formation of a two-qubit state from its concurrence."""
    c = min(1.0, concurrence(rho))
    return binary_entropy(0.5 * (1 + np.sqrt(max(0.0, 1 - c * c))))


def eof_bell_diagonal(pmax: float) -> float:
    """Entanglement of formation of a Bell-diagonal state with largest weight ``pmax``."""
    if not 0 <= pmax <= 1:
        raise InvalidArgument(f"pmax {pmax} outside [0, 1]")
    if pmax <= 0.5:
        return 0.0
    return binary_entropy(min(1.0, 0.5 + np.sqrt(pmax * (1 - pmax))))


def purification(rho: DensityMatrix, ref_unitary=None) -> DensityMatrix:
    """Purification on R (x) S with R first; ``ref_unitary`` rotates R."""
    w, v = np.linalg.eigh(rho.mat)
    w = np.clip(w, 0, None)
    d = rho.dim
    # |psi> = sum_i sqrt(w_i) |i>_R |v_i>_S
    psi = (np.sqrt(w)[:, None] * v.T).reshape(d, d)
    if ref_unitary is not None:
        psi = np.asarray(ref_unitary) @ psi
    return DensityMatrix.from_ket(psi.ravel(), (d, d))


def coherent_information(rho: DensityMatrix, ch: QuantumChannel, ref_unitary=None) -> float:
    """``S(ch(rho)) - S((1 (x) ch)(psi_rho))``."""
    if ch.dim_in != rho.dim:
        raise InvalidArgument(f"channel input dimension {ch.dim_in} does not match state dimension {rho.dim}")
    single = rho.with_dims((rho.dim,))
    psi = purification(single, ref_unitary)
    return von_neumann_entropy(apply(ch, single)) - von_neumann_entropy(apply_to_half(ch, psi))


def _check_partition(parts: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    out = [_subsystem_list(p, n) for p in parts]
    flat = [k for p in out for k in p]
    if len(set(flat)) != len(flat):
        raise InvalidArgument(f"partition {out} has overlapping parts")
    if sorted(flat) != list(range(n)):
        raise InvalidArgument(f"partition {out} does not cover all {n} subsystems")
    if any(not p for p in out[:2]):
        raise InvalidArgument("partition parts A and B must be nonempty")
    return out


def _marginal_entropy(rho: DensityMatrix, keep: list[int]) -> float:
    if not keep:
        return 0.0
    return von_neumann_entropy(partial_trace(rho, keep))


def mutual_information(rho: DensityMatrix, cut_a, cut_b) -> float:
    a, b = _check_partition([cut_a, cut_b], len(rho.dims))
    return _marginal_entropy(rho, a) + _marginal_entropy(rho, b) - von_neumann_entropy(rho)


def conditional_mutual_information(rho: DensityMatrix, a, b, e=()) -> float:
    """``I(A;B|E) = S(AE) + S(BE) - S(ABE) - S(E)``."""
    a, b, e = _check_partition([a, b, e], len(rho.dims))
    return (
        _marginal_entropy(rho, a + e)
        + _marginal_entropy(rho, b + e)
        - _marginal_entropy(rho, a + b + e)
        - _marginal_entropy(rho, e)
    )


# ---------------------------------------------------------------------------
# Monte-Carlo upper bound on squashed entanglement


def _rank2_purification(rho: DensityMatrix) -> np.ndarray:
    """Columns ``sqrt(w_i) v_i`` (i = 0, 1) for the two largest eigenpairs."""
    if rho.dims != (2, 2):
        raise InvalidArgument(f"squashed bound needs a two-qubit state with dims (2, 2), got {rho.dims}")
    w, v = np.linalg.eigh(rho.mat)
    w, v = w[::-1], v[:, ::-1]
    rank = int(np.sum(w > 1e-10))
    if rank > 2:
        raise UnsupportedRank(f"state has rank {rank}; the two-qubit environment extension needs rank <= 2")
    return v[:, :2] * np.sqrt(np.clip(w[:2], 0, None))


def squashed_cmi_batch(psi2: np.ndarray, u: np.ndarray) -> np.ndarray:
    """``I(A;B|E1)/2`` for each unitary in the stack ``u`` acting on E1E2.

    ``psi2`` holds the purification: the global pure state is
    ``sum_f psi2[:, f] (x) |f>_{E1E2}`` with ``f`` ranging over |00>, |01>.
    """
    n = u.shape[0]
    # amplitudes T[n, ab, e] = sum_f U[n, e, f] psi2[ab, f]
    t = np.einsum("nef,xf->nxe", u[:, :, :2], psi2).reshape(n, 2, 2, 2, 2)  # (a, b, e1, e2)

    def spec(m):
        return _entropy_of_spectrum(eigvalsh(m @ np.conj(np.swapaxes(m, -1, -2))))

    s_ae1 = spec(t.transpose(0, 1, 3, 2, 4).reshape(n, 4, 4))
    s_be1 = spec(t.transpose(0, 2, 3, 1, 4).reshape(n, 4, 4))
    s_e1 = spec(t.transpose(0, 3, 1, 2, 4).reshape(n, 2, 8))
    s_abe1 = spec(t.transpose(0, 4, 1, 2, 3).reshape(n, 2, 8))  # S(ABE1) = S(E2)
    return 0.5 * (s_ae1 + s_be1 - s_abe1 - s_e1)


def _chunk_min(psi2: np.ndarray, seed: int, chunk: int, count: int) -> float:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))
    return float(np.min(squashed_cmi_batch(psi2, haar_unitaries(count, 4, rng))))


def squashed_ub_mc(rho: DensityMatrix, samples: int, seed: int = DEFAULT_SEED, threads: int = 1) -> float:
    """Monte-Carlo upper bound on the squashed entanglement of a rank-2 two-qubit state.

    Extensions ``rho^{ABE1}`` come from the purification on two environment
    qubits followed by a Haar-random unitary on E1E2 and discarding E2. The
    result is the minimum of ``I(A;B|E1)/2`` over ``samples`` draws.

    Parameters
    ----------
    rho : DensityMatrix
        Two-qubit state of rank at most 2.
    samples : int
        Number of random unitaries.
    seed : int
        Root seed. Samples are drawn in fixed-size chunks, chunk ``c`` from
        the substream ``SeedSequence(seed, spawn_key=(c,))``, so the sample
        sequence does not depend on ``threads`` and a larger ``samples``
        extends a smaller one.
    threads : int
        Worker threads; the result is identical for any value.

    Returns
    -------
    float
        The bound in ebits, never negative.
    """
    if samples < 1:
        raise InvalidArgument("samples must be at least 1")
    if threads < 1:
        raise InvalidArgument("threads must be at least 1")
    psi2 = _rank2_purification(rho)
    nchunks = -(-samples // MC_CHUNK)
    counts = [min(MC_CHUNK, samples - c * MC_CHUNK) for c in range(nchunks)]
    if threads == 1:
        mins = [_chunk_min(psi2, seed, c, k) for c, k in enumerate(counts)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            mins = list(pool.map(lambda ck: _chunk_min(psi2, seed, *ck), enumerate(counts)))
    return max(0.0, min(mins))


def bell_mixture_71(p: float) -> DensityMatrix:
    """``p |phi+><phi+| + (1 - p) |phi-><phi-|``."""
    if not 0 <= p <= 1:
        raise InvalidArgument(f"p = {p} outside [0, 1]")
    s = 1 / np.sqrt(2)
    phi_p = np.array([s, 0, 0, s])
    phi_m = np.array([s, 0, 0, -s])
    m = p * np.outer(phi_p, phi_p) + (1 - p) * np.outer(phi_m, phi_m)
    return DensityMatrix._trusted(m.astype(np.complex128), (2, 2))
