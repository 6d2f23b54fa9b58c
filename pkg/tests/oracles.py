"""Independent reference implementations used only by the tests.

Each oracle avoids the code path it checks: explicit index loops instead of
reshapes, unshifted-then-shifted QR iteration instead of Jacobi rotations,
and basis-by-basis Choi construction instead of Kraus vectorisation.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def qr_eigenvalues(m: np.ndarray, iters: int = 10_000, tol: float = 1e-13) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix by Wilkinson-shifted QR iteration with deflation."""
    a = np.array(m, dtype=np.complex128)
    n = a.shape[0]
    out = []
    while n > 0:
        if n == 1:
            out.append(a[0, 0].real)
            break
        for _ in range(iters):
            if abs(a[n - 1, n - 2]) < tol * (abs(a[n - 1, n - 1]) + abs(a[n - 2, n - 2]) + 1e-300):
                break
            # Wilkinson shift from the trailing 2x2 block
            x, y, z = a[n - 2, n - 2].real, a[n - 1, n - 1].real, abs(a[n - 1, n - 2]) ** 2
            dd = (x - y) / 2
            mu = y - z / (dd + math.copysign(math.sqrt(dd * dd + z), dd if dd != 0 else 1.0))
            q, r = np.linalg.qr(a[:n, :n] - mu * np.eye(n))
            a[:n, :n] = r @ q + mu * np.eye(n)
        out.append(a[n - 1, n - 1].real)
        n -= 1
    return np.sort(np.array(out))[::-1]


def partial_trace_loops(mat: np.ndarray, dims, keep) -> np.ndarray:
    """Reduced matrix by summing over basis labels of the traced subsystems."""
    dims = list(dims)
    keep = sorted(keep)
    traced = [k for k in range(len(dims)) if k not in keep]
    kd = [dims[k] for k in keep]
    td = [dims[k] for k in traced]
    dk = int(np.prod(kd)) if kd else 1
    out = np.zeros((dk, dk), dtype=np.complex128)

    def flat(labels):
        idx = 0
        for lab, d in zip(labels, dims):
            idx = idx * d + lab
        return idx

    for ki in itertools.product(*[range(d) for d in kd]):
        for kj in itertools.product(*[range(d) for d in kd]):
            s = 0j
            for t in itertools.product(*[range(d) for d in td]):
                li = [0] * len(dims)
                lj = [0] * len(dims)
                for pos, k in enumerate(keep):
                    li[k], lj[k] = ki[pos], kj[pos]
                for pos, k in enumerate(traced):
                    li[k] = lj[k] = t[pos]
                s += mat[flat(li), flat(lj)]
            out[flat_small(ki, kd), flat_small(kj, kd)] = s
    return out


def flat_small(labels, dims) -> int:
    idx = 0
    for lab, d in zip(labels, dims):
        idx = idx * d + lab
    return idx


def partial_transpose_loops(mat: np.ndarray, dims, k: int) -> np.ndarray:
    """Swap the row and column labels of subsystem ``k`` entry by entry."""
    dims = list(dims)
    n = mat.shape[0]
    out = np.zeros_like(mat, dtype=np.complex128)
    labels = list(itertools.product(*[range(d) for d in dims]))
    for i, li in enumerate(labels):
        for j, lj in enumerate(labels):
            ni, nj = list(li), list(lj)
            ni[k], nj[k] = lj[k], li[k]
            out[flat_small(ni, dims), flat_small(nj, dims)] = mat[i, j]
    assert out.shape == (n, n)
    return out


def choi_explicit(kraus, d: int) -> np.ndarray:
    """``(1/d) sum_ij |i><j| (x) Lambda(|i><j|)`` built basis element by basis element."""
    d_out = kraus[0].shape[0]
    out = np.zeros((d * d_out, d * d_out), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            eij = np.zeros((d, d))
            eij[i, j] = 1.0
            img = sum(k @ eij @ k.conj().T for k in kraus)
            out += np.kron(eij, img) / d
    return out


def concurrence_nonhermitian(rho: np.ndarray) -> float:
    """Concurrence from the eigenvalues of the non-Hermitian product rho (sy sy) rho* (sy sy)."""
    sy = np.array([[0, -1j], [1j, 0]])
    yy = np.kron(sy, sy)
    r = rho @ yy @ rho.conj() @ yy
    lam = np.sqrt(np.clip(np.sort(np.linalg.eigvals(r).real)[::-1], 0, None))
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def werner_pt_eigenvalues(v: float) -> np.ndarray:
    """Partial-transpose spectrum of ``v |phi+><phi+| + (1-v) I/4``: three of (1+v)/4 and one (1-3v)/4."""
    return np.array([(1 + v) / 4] * 3 + [(1 - 3 * v) / 4])


def entropy_bits(w) -> float:
    w = np.asarray(w, dtype=float)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))
