"""Quantum channels in Kraus form and the channel families used by the toolkit."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgument, InvalidDistribution
from .linalg import DensityMatrix, as_matrix, clamp_psd, max_entangled

CPTP_TOL = 1e-10

PAULI = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


@dataclass(frozen=True)
class QuantumChannel:
    """Completely positive trace-preserving map given by Kraus operators.

    The representation is taken as given; it is not reduced to the minimal
    number of operators (see :func:`canonical`).
    """

    kraus: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        ops = tuple(as_matrix(k) for k in self.kraus)
        if not ops:
            raise InvalidArgument("Kraus list is empty")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise InvalidArgument("Kraus operators have inconsistent shapes")
        s = sum(k.conj().T @ k for k in ops)
        err = float(np.max(np.abs(s - np.eye(shape[1]))))
        if err > CPTP_TOL:
            raise InvalidArgument(f"not trace preserving: max |sum K^dag K - I| = {err:.3e}")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ops)

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]

    def __len__(self) -> int:
        return len(self.kraus)


def _check_state_dim(ch: QuantumChannel, d: int):
    if d != ch.dim_in:
        raise InvalidArgument(f"channel input dimension {ch.dim_in} does not match {d}")


def apply(ch: QuantumChannel, rho: DensityMatrix) -> DensityMatrix:
    _check_state_dim(ch, rho.dim)
    out = sum(k @ rho.mat @ k.conj().T for k in ch.kraus)
    dims = rho.dims if ch.dim_out == ch.dim_in else (ch.dim_out,)
    return clamp_psd(out, dims)


def apply_local(ch: QuantumChannel, rho: DensityMatrix, targets: Sequence[int]) -> DensityMatrix:
    """Apply ``ch`` to the listed subsystems of ``rho`` (identity elsewhere).

    The channel sees the targets in the order given. If the channel changes
    dimension only a single target is allowed; it keeps its position.
    """
    n = len(rho.dims)
    targets = [int(t) for t in targets]
    if not targets or len(set(targets)) != len(targets) or any(not 0 <= t < n for t in targets):
        raise InvalidArgument(f"invalid target subsystems {targets} for {n} subsystems")
    dt = int(np.prod([rho.dims[t] for t in targets]))
    _check_state_dim(ch, dt)
    if ch.dim_out != ch.dim_in and len(targets) != 1:
        raise InvalidArgument("dimension-changing channels act on a single subsystem")
    rest = [k for k in range(n) if k not in targets]
    order = rest + targets
    dr = rho.dim // dt
    t = rho.mat.reshape(rho.dims + rho.dims)
    t = t.transpose(order + [n + k for k in order]).reshape(dr, dt, dr, dt)
    out = np.zeros((dr, ch.dim_out, dr, ch.dim_out), dtype=np.complex128)
    for k in ch.kraus:
        out += np.einsum("tu,rusv,wv->rtsw", k, t, k.conj(), optimize=True)
    if ch.dim_out == ch.dim_in:
        new_dims = [rho.dims[k] for k in order]
        inv = np.argsort(order)
        m = out.reshape(new_dims + new_dims)
        m = m.transpose(list(inv) + [n + i for i in inv]).reshape(rho.dim, rho.dim)
        return clamp_psd(m, rho.dims)
    dims = [rho.dims[k] for k in rest] + [ch.dim_out]
    pos = targets[0]
    order_out = list(range(len(rest)))
    order_out.insert(pos, len(rest))
    m = out.reshape(dims + dims).transpose(order_out + [n + i for i in order_out])
    new_dims = [dims[i] for i in order_out]
    d = int(np.prod(new_dims))
    return clamp_psd(m.reshape(d, d), new_dims)


def apply_to_half(ch: QuantumChannel, rho: DensityMatrix) -> DensityMatrix:
    """``(1 (x) ch)(rho)``: the channel acts on the last subsystem."""
    if len(rho.dims) < 2:
        raise InvalidArgument("apply_to_half needs a bipartite state")
    return apply_local(ch, rho, [len(rho.dims) - 1])


def choi_state(ch: QuantumChannel) -> DensityMatrix:
    """Normalised Choi state ``(1 (x) ch)(|phi_d^+><phi_d^+|)``."""
    if ch.dim_in != ch.dim_out:
        raise InvalidArgument("Choi state is defined here for square channels only")
    return apply_to_half(ch, max_entangled(ch.dim_in))


def kraus_outcome_dist(ch: QuantumChannel) -> np.ndarray:
    """Outcome probabilities ``Tr[K_i^dag K_i] / d`` on a maximally entangled input."""
    p = np.array([np.vdot(k, k).real for k in ch.kraus]) / ch.dim_in
    return p / p.sum()


def canonical(ch: QuantumChannel, atol: float = 1e-12) -> QuantumChannel:
    """Minimal Kraus representation from the eigendecomposition of the Choi matrix."""
    d_in, d_out = ch.dim_in, ch.dim_out
    vecs = [k.T.reshape(-1) for k in ch.kraus]  # row-major (input, output)
    j = sum(np.outer(v, v.conj()) for v in vecs)
    w, v = np.linalg.eigh(j)
    ops = [np.sqrt(wi) * v[:, i].reshape(d_in, d_out).T for i, wi in enumerate(w) if wi > atol]
    ops.reverse()
    ops = _renormalise(ops)
    return QuantumChannel(tuple(ops), name=ch.name)


def _renormalise(ops):
    # remove the tiny CPTP drift left by dropping near-zero Choi eigenvalues
    s = sum(k.conj().T @ k for k in ops)
    w, v = np.linalg.eigh(s)
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    return [k @ inv_sqrt for k in ops]


def compose(outer: QuantumChannel, inner: QuantumChannel) -> QuantumChannel:
    """The channel ``outer o inner``."""
    if outer.dim_in != inner.dim_out:
        raise InvalidArgument("composition dimension mismatch")
    ops = tuple(a @ b for a in outer.kraus for b in inner.kraus)
    return QuantumChannel(ops, name=f"{outer.name}o{inner.name}")


def tensor_channel(*chs: QuantumChannel) -> QuantumChannel:
    ops = [np.eye(1)]
    for ch in chs:
        ops = [np.kron(a, b) for a in ops for b in ch.kraus]
    return QuantumChannel(tuple(ops), name="(x)".join(c.name for c in chs))


# ---------------------------------------------------------------------------
# families


def identity_channel(d: int) -> QuantumChannel:
    return QuantumChannel((np.eye(d),), name="identity")


def unitary_channel(u) -> QuantumChannel:
    u = as_matrix(u)
    return QuantumChannel((u,), name="unitary")


def weyl_operators(d: int) -> list[np.ndarray]:
    """Clock-and-shift basis ``X^a Z^b``, ``a, b = 0..d-1``; identity first."""
    omega = np.exp(2j * np.pi / d)
    x = np.roll(np.eye(d), 1, axis=0)
    z = np.diag(omega ** np.arange(d))
    return [np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b) for a in range(d) for b in range(d)]


def depolarizing(d: int, q: float) -> QuantumChannel:
    """``(1 - q) rho + q I/d``."""
    if not 0 <= q <= 1:
        raise InvalidArgument(f"depolarizing strength {q} outside [0, 1]")
    w = weyl_operators(d)
    ops = [np.sqrt(1 - q + q / d**2) * w[0]] + [np.sqrt(q) / d * op for op in w[1:]]
    if q == 0:
        ops = ops[:1]
    return QuantumChannel(tuple(ops), name="depolarizing")


def completely_depolarizing(d: int) -> QuantumChannel:
    return depolarizing(d, 1.0)


def pauli_weights(w: Sequence[float]) -> np.ndarray:
    """Validated Pauli weights (I, X, Y, Z)."""
    p = np.asarray(w, dtype=float)
    if p.shape != (4,):
        raise InvalidDistribution(f"Pauli weights need 4 entries, got {p.shape}")
    if np.any(p < 0) or abs(p.sum() - 1) > 1e-12:
        raise InvalidDistribution(f"Pauli weights {p.tolist()} are not a probability vector")
    return p


def pauli_channel(w: Sequence[float]) -> QuantumChannel:
    """``sum_i p_i sigma_i rho sigma_i``; zero-weight terms are dropped."""
    p = pauli_weights(w)
    ops = tuple(np.sqrt(pi) * s for pi, s in zip(p, PAULI) if pi > 0)
    return QuantumChannel(ops, name="pauli")


def dephasing(p: float) -> QuantumChannel:
    """``p rho + (1 - p) Z rho Z``."""
    if not 0 <= p <= 1:
        raise InvalidArgument(f"dephasing parameter {p} outside [0, 1]")
    return QuantumChannel(pauli_channel((p, 0, 0, 1 - p)).kraus, name="dephasing")


def unitary_mixture(u, p: float) -> QuantumChannel:
    """``(1 - p) rho + p U rho U^dag`` for ``p`` in [0, 1/2]."""
    u = as_matrix(u)
    d = u.shape[0]
    if u.shape != (d, d) or np.max(np.abs(u.conj().T @ u - np.eye(d))) > 1e-10:
        raise InvalidArgument("U is not unitary")
    if not 0 <= p <= 0.5:
        raise InvalidArgument(f"mixing probability {p} outside [0, 1/2]")
    return QuantumChannel((np.sqrt(1 - p) * np.eye(d), np.sqrt(p) * u), name="unitary_mixture")


def gad_channel(d: int, p: float) -> QuantumChannel:
    """Amplitude damping of every level ``|m>`` (m >= 1) to ``|0>`` with probability ``p``."""
    if d < 2:
        raise InvalidArgument("dimension must be at least 2")
    if not 0 <= p <= 1:
        raise InvalidArgument(f"damping probability {p} outside [0, 1]")
    k0 = np.diag([1.0] + [np.sqrt(1 - p)] * (d - 1)).astype(np.complex128)
    ops = [k0]
    for m in range(1, d):
        k = np.zeros((d, d), dtype=np.complex128)
        k[0, m] = np.sqrt(p)
        ops.append(k)
    return QuantumChannel(tuple(ops), name="gad")


def depolarizing_length(alpha: float, l: float) -> QuantumChannel:
    """Qubit depolarizing channel of a fibre of length ``l`` with damping rate ``alpha``."""
    if alpha < 0 or l < 0:
        raise InvalidArgument("alpha and l must be nonnegative")
    return QuantumChannel(depolarizing(2, -np.expm1(-alpha * l)).kraus, name="depolarizing_length")


def replacement_channel(omega: DensityMatrix, d_in: int) -> QuantumChannel:
    """Discard the input and prepare ``omega``."""
    w, v = np.linalg.eigh(omega.mat)
    ops = []
    for wi, vi in zip(w, v.T):
        if wi > 1e-15:
            for i in range(d_in):
                k = np.zeros((omega.dim, d_in), dtype=np.complex128)
                k[:, i] = np.sqrt(wi) * vi
                ops.append(k)
    return QuantumChannel(tuple(_renormalise(ops)), name="replacement")


# ---------------------------------------------------------------------------
# JSON text format


def to_json_dict(ch: QuantumChannel) -> dict:
    return {
        "dim_in": ch.dim_in,
        "dim_out": ch.dim_out,
        "kraus": [{"re": k.real.tolist(), "im": k.imag.tolist()} for k in ch.kraus],
    }


def _matrix_field(obj, where: str) -> np.ndarray:
    if not isinstance(obj, dict) or "re" not in obj:
        raise InvalidArgument(f"{where} is missing field 're'")
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    return re + 1j * im


def from_json_dict(obj: dict) -> QuantumChannel:
    """Parse an explicit Kraus list or a named-family shorthand."""
    if not isinstance(obj, dict):
        raise InvalidArgument("channel must be a JSON object")
    fam = obj.get("family")
    if fam is not None:
        try:
            if fam == "identity":
                return identity_channel(int(obj["d"]))
            if fam == "pauli":
                return pauli_channel(obj["p"])
            if fam == "dephasing":
                return dephasing(float(obj["p"]))
            if fam == "depolarizing":
                return depolarizing(int(obj["d"]), float(obj["q"]))
            if fam == "gad":
                return gad_channel(int(obj["d"]), float(obj["p"]))
            if fam == "depolarizing_length":
                return depolarizing_length(float(obj["alpha"]), float(obj["l"]))
            if fam == "unitary_mixture":
                return unitary_mixture(_matrix_field(obj["U"], "field 'U'"), float(obj["p"]))
        except KeyError as exc:
            raise InvalidArgument(f"channel family '{fam}' is missing field {exc}") from None
        raise InvalidArgument(f"unknown channel family '{fam}'")
    if "kraus" not in obj:
        raise InvalidArgument("channel is missing field 'kraus'")
    ops = [_matrix_field(k, f"kraus[{i}]") for i, k in enumerate(obj["kraus"])]
    ch = QuantumChannel(tuple(ops))
    for key, val in (("dim_in", ch.dim_in), ("dim_out", ch.dim_out)):
        if key in obj and int(obj[key]) != val:
            raise InvalidArgument(f"field '{key}' = {obj[key]} disagrees with Kraus shape ({val})")
    return ch


def loads(text: str) -> QuantumChannel:
    return from_json_dict(json.loads(text))


def dumps(ch: QuantumChannel) -> str:
    return json.dumps(to_json_dict(ch))
