"""Dense complex linear algebra on small multipartite Hilbert spaces.

States are carried by :class:`DensityMatrix`, a validated Hermitian,
unit-trace, positive semidefinite matrix tagged with the dimensions of its
subsystems. Subsystems are addressed by their position in ``dims``.
"""
from __future__ import annotations

import json
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgument, InvalidMatrix

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
MAX_DIM = 256


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite complex 2-D array or raise InvalidMatrix."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise InvalidMatrix(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidMatrix("matrix has non-finite entries")
    return a


def _square(m) -> np.ndarray:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {a.shape}")
    return a


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


class DensityMatrix:
    """Hermitian, unit-trace, PSD matrix with subsystem dimensions.

    Parameters
    ----------
    mat : array_like
        Square complex matrix.
    dims : sequence of int, optional
        Subsystem dimensions, product must equal ``mat.shape[0]``.
        Defaults to a single subsystem.
    """

    __slots__ = ("_mat", "_dims")

    def __init__(self, mat, dims: Sequence[int] | None = None):
        a = _square(mat).copy()
        n = a.shape[0]
        dims = (n,) if dims is None else tuple(int(d) for d in dims)
        if any(d < 1 for d in dims) or int(np.prod(dims)) != n:
            raise InvalidArgument(f"dims {dims} do not multiply to matrix dimension {n}")
        herm = hermiticity_error(a)
        if herm > HERMITIAN_TOL:
            raise InvalidMatrix(f"not Hermitian: max |rho_ij - conj(rho_ji)| = {herm:.3e}")
        a = 0.5 * (a + a.conj().T)
        tr = float(np.trace(a).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidMatrix(f"trace is {tr!r}, deviates from 1 by {abs(tr - 1):.3e}")
        lam_min = float(np.linalg.eigvalsh(a)[0])
        if lam_min < -PSD_TOL:
            raise InvalidMatrix(f"not positive semidefinite: minimum eigenvalue {lam_min:.3e}")
        a.setflags(write=False)
        self._mat = a
        self._dims = dims

    @classmethod
    def _trusted(cls, mat: np.ndarray, dims: Sequence[int]) -> "DensityMatrix":
        # internal constructor for results of operations that preserve validity
        obj = cls.__new__(cls)
        m = np.array(mat, dtype=np.complex128)
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        obj._mat = m
        obj._dims = tuple(int(d) for d in dims)
        return obj

    @classmethod
    def from_ket(cls, psi, dims: Sequence[int] | None = None) -> "DensityMatrix":
        v = np.asarray(psi, dtype=np.complex128).ravel()
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise InvalidArgument("zero vector is not a state")
        v = v / nrm
        dims = (v.size,) if dims is None else tuple(dims)
        if int(np.prod(dims)) != v.size:
            raise InvalidArgument(f"dims {dims} do not match ket length {v.size}")
        return cls._trusted(np.outer(v, v.conj()), dims)

    @classmethod
    def maximally_mixed(cls, dims: Sequence[int]) -> "DensityMatrix":
        n = int(np.prod(dims))
        return cls._trusted(np.eye(n) / n, dims)

    @property
    def mat(self) -> np.ndarray:
        return self._mat

    @property
    def dims(self) -> tuple[int, ...]:
        return self._dims

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    def eigvals(self) -> np.ndarray:
        """Eigenvalues in nonincreasing order."""
        return np.linalg.eigvalsh(self._mat)[::-1]

    def with_dims(self, dims: Sequence[int]) -> "DensityMatrix":
        if int(np.prod(dims)) != self.dim:
            raise InvalidArgument(f"dims {tuple(dims)} do not match dimension {self.dim}")
        return DensityMatrix._trusted(self._mat, dims)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self._mat, dtype=dtype)

    def __repr__(self) -> str:
        return f"DensityMatrix(dims={self._dims})"


def clamp_psd(mat: np.ndarray, dims: Sequence[int]) -> DensityMatrix:
    """Turn a numerically near-physical matrix into a DensityMatrix.

    Eigenvalues in (-1e-9, 0) are rounding noise and are set to zero before
    renormalising; anything more negative is rejected.
    """
    a = _square(mat)
    a = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(a)
    if w[0] < -PSD_TOL:
        raise InvalidMatrix(f"not positive semidefinite: minimum eigenvalue {w[0]:.3e}")
    if w[0] < 0:
        w = np.clip(w, 0.0, None)
        a = (v * w) @ v.conj().T
    tr = float(np.trace(a).real)
    if tr <= 0:
        raise InvalidMatrix("matrix has zero trace")
    return DensityMatrix._trusted(a / tr, dims)


# ---------------------------------------------------------------------------
# eigendecomposition


def _round_robin(n: int) -> list[list[tuple[int, int]]]:
    """Pairings for one parallel Jacobi sweep (circle method)."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                pairs.append((min(p, q), max(p, q)))
        rounds.append(pairs)
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def hermitian_eig(m, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pair once; pairs are grouped into
    disjoint rounds so a whole round is applied as one vectorised update.
    Iteration stops once the off-diagonal Frobenius mass drops below
    ``1e-14 * ||m||_F``.

    Returns
    -------
    w : ndarray
        Real eigenvalues sorted nonincreasing.
    v : ndarray
        Unitary matrix whose columns are the matching eigenvectors.
    """
    a = _square(m).copy()
    herm = hermiticity_error(a)
    if herm > 1e-8:
        raise InvalidMatrix(f"not Hermitian: max |m_ij - conj(m_ji)| = {herm:.3e}")
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    if n > 1:
        norm = np.linalg.norm(a)
        tol = 1e-14 * norm
        rounds = [np.array(r, dtype=np.intp).T for r in _round_robin(n)]
        for _ in range(max_sweeps):
            off = np.linalg.norm(a - np.diag(np.diag(a)))
            if off <= tol:
                break
            for p, q in rounds:
                apq = a[p, q]
                r = np.abs(apq)
                active = r > 1e-300
                if not np.any(active):
                    continue
                phase = np.where(active, apq / np.where(active, r, 1.0), 1.0)
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * np.where(active, r, 1.0))
                # for |theta| beyond 1e150 the squared term would overflow; t ~ 1/(2 theta)
                big = np.abs(theta) > 1e150
                th = np.where(big, 1.0, theta)
                t = np.where(big, 0.5 / np.where(big, theta, 1.0),
                             np.sign(th) / (np.abs(th) + np.sqrt(th * th + 1.0)))
                t = np.where(theta == 0, 1.0, t)
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # 2x2 block G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                g00, g01 = c, s
                g10, g11 = -s * np.conj(phase), c * np.conj(phase)
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = ap * g00 + aq * g10
                a[:, q] = ap * g01 + aq * g11
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = np.conj(g00)[:, None] * ap + np.conj(g10)[:, None] * aq
                a[q, :] = np.conj(g01)[:, None] * ap + np.conj(g11)[:, None] * aq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = vp * g00 + vq * g10
                v[:, q] = vp * g01 + vq * g11
    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def eigvalsh(m) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix (or stack), nonincreasing.

    LAPACK-backed; used on hot paths where the Jacobi solver is too slow.
    """
    return np.linalg.eigvalsh(np.asarray(m))[..., ::-1]


# ---------------------------------------------------------------------------
# subsystem manipulation


def _check_index(k: int, n: int) -> int:
    if not isinstance(k, (int, np.integer)) or not 0 <= k < n:
        raise InvalidArgument(f"subsystem index {k!r} out of range for {n} subsystems")
    return int(k)


def permute_subsystems(rho: DensityMatrix, perm: Sequence[int]) -> DensityMatrix:
    """Reorder subsystems; new subsystem ``i`` is old subsystem ``perm[i]``."""
    n = len(rho.dims)
    perm = [_check_index(k, n) for k in perm]
    if sorted(perm) != list(range(n)):
        raise InvalidArgument(f"{perm} is not a permutation of {n} subsystems")
    t = rho.mat.reshape(rho.dims + rho.dims)
    axes = perm + [n + k for k in perm]
    new_dims = [rho.dims[k] for k in perm]
    return DensityMatrix._trusted(t.transpose(axes).reshape(rho.dim, rho.dim), new_dims)


def permutation_unitary(dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Unitary P with P rho P^dag equal to ``permute_subsystems(rho, perm)``."""
    dims = tuple(dims)
    n = int(np.prod(dims))
    basis = np.eye(n).reshape(dims + (n,))
    axes = list(perm) + [len(dims)]
    return basis.transpose(axes).reshape(n, n)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems stay in their original order regardless of how ``keep``
    is ordered.
    """
    n = len(rho.dims)
    keep = sorted({_check_index(k, n) for k in keep})
    if not keep:
        raise InvalidArgument("keep set is empty")
    if len(keep) == n:
        return rho
    drop = [k for k in range(n) if k not in keep]
    t = rho.mat.reshape(rho.dims + rho.dims)
    t = t.transpose(keep + drop + [n + k for k in keep] + [n + k for k in drop])
    dk = int(np.prod([rho.dims[k] for k in keep]))
    dd = int(np.prod([rho.dims[k] for k in drop]))
    t = t.reshape(dk, dd, dk, dd)
    return DensityMatrix._trusted(np.einsum("ajbj->ab", t), [rho.dims[k] for k in keep])


def partial_transpose(rho: DensityMatrix, subsystem: int) -> np.ndarray:
    """Transpose ``rho`` on one subsystem, returned as a plain matrix."""
    n = len(rho.dims)
    k = _check_index(subsystem, n)
    t = rho.mat.reshape(rho.dims + rho.dims)
    axes = list(range(2 * n))
    axes[k], axes[n + k] = n + k, k
    return t.transpose(axes).reshape(rho.dim, rho.dim)


def trace_norm(m) -> float:
    """Sum of singular values (no factor 1/2)."""
    a = _square(m)
    if a.size == 0:
        return 0.0
    if hermiticity_error(a) <= 1e-12 * max(1.0, np.abs(a).max()):
        return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (a + a.conj().T)))))
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """``||a - b||_1``; orthogonal pure states are at distance 2."""
    if a.dim != b.dim:
        raise InvalidArgument(f"dimension mismatch: {a.dim} vs {b.dim}")
    return trace_norm(a.mat - b.mat)


def tensor(*states: DensityMatrix) -> DensityMatrix:
    if not states:
        raise InvalidArgument("tensor needs at least one state")
    mat = states[0].mat
    dims = list(states[0].dims)
    for s in states[1:]:
        mat = np.kron(mat, s.mat)
        dims.extend(s.dims)
    return DensityMatrix._trusted(mat, dims)


def tensor_power(rho: DensityMatrix, n: int) -> DensityMatrix:
    if n < 0:
        raise InvalidArgument("negative tensor power")
    if n == 0:
        return DensityMatrix._trusted(np.ones((1, 1)), (1,))
    return tensor(*([rho] * n))


# ---------------------------------------------------------------------------
# random unitaries


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_unitaries(n: int, dim: int, rng) -> np.ndarray:
    """Stack of ``n`` Haar-random ``dim x dim`` unitaries.

    QR of a complex Ginibre matrix with the phases of R's diagonal divided
    out. Draws are consumed sample by sample, so the first ``k`` matrices of
    a call with ``n > k`` match a call with ``n = k`` on the same generator.
    """
    if dim < 1:
        raise InvalidArgument("dim must be at least 1")
    rng = _as_rng(rng)
    z = rng.standard_normal((n, dim, dim, 2))
    z = (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    ph = d / np.abs(d)
    return q * ph[:, None, :]


def haar_unitary(dim: int, seed=None) -> np.ndarray:
    return haar_unitaries(1, dim, seed)[0]


def random_density_matrix(dims: Sequence[int], seed=None, rank: int | None = None) -> DensityMatrix:
    """Random state from the induced (Hilbert-Schmidt for full rank) measure."""
    rng = _as_rng(seed)
    n = int(np.prod(dims))
    k = n if rank is None else rank
    g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    m = g @ g.conj().T
    return DensityMatrix._trusted(m / np.trace(m).real, dims)


def random_pure_state(dims: Sequence[int], seed=None) -> DensityMatrix:
    rng = _as_rng(seed)
    n = int(np.prod(dims))
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return DensityMatrix.from_ket(v, dims)


def max_entangled(d: int) -> DensityMatrix:
    """|phi_d^+><phi_d^+| on two d-dimensional systems."""
    v = np.eye(d).ravel() / np.sqrt(d)
    return DensityMatrix.from_ket(v, (d, d))


# ---------------------------------------------------------------------------
# JSON text format


def to_json_dict(rho: DensityMatrix) -> dict:
    return {"dims": list(rho.dims), "re": rho.mat.real.tolist(), "im": rho.mat.imag.tolist()}


def from_json_dict(obj: dict) -> DensityMatrix:
    """Parse ``{"dims": [...], "re": [[...]], "im": [[...]]}``.

    ``im`` may be omitted for real matrices. Violations of the state
    invariants raise with a message naming the invariant and its magnitude.
    """
    if not isinstance(obj, dict):
        raise InvalidArgument("state must be a JSON object")
    for field in ("dims", "re"):
        if field not in obj:
            raise InvalidArgument(f"state is missing field '{field}'")
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidArgument(f"field 're'/'im' is not a numeric matrix: {exc}") from None
    if re.shape != im.shape:
        raise InvalidArgument(f"'re' shape {re.shape} differs from 'im' shape {im.shape}")
    return DensityMatrix(re + 1j * im, obj["dims"])


def loads(text: str) -> DensityMatrix:
    return from_json_dict(json.loads(text))


def dumps(rho: DensityMatrix) -> str:
    return json.dumps(to_json_dict(rho))
