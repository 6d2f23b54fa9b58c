"""Exact density-matrix simulation of single-copy catalysis built from an asymptotic protocol.

Register order throughout is ``S_1 .. S_n, C, K``: ``n`` copies of the
system, the original catalyst ``C`` and Alice's counter ``K`` of dimension
``n``. The catalyst of the single-copy protocol lives on
``S_2 .. S_n, C, K``; ``S_1`` holds the input copy and later the output.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import channels as chn
from . import linalg
from .errors import BoundOutOfRange, CatalystNotReturned, InvalidArgument, PreconditionError
from .linalg import DensityMatrix, partial_trace, permutation_unitary, tensor, tensor_power, trace_distance
from .measures import binary_entropy, mutual_information

CATALYST_TOL = 1e-10
MUII_TOL = 1e-12
UNITARY_TOL = 1e-12


def _ket(k: int, n: int) -> np.ndarray:
    v = np.zeros((n, n))
    v[k, k] = 1.0
    return v


def _projector_state(k: int, n: int) -> DensityMatrix:
    return DensityMatrix._trusted(_ket(k, n), (n,))


def _reduced(mu: DensityMatrix, i: int, n: int) -> DensityMatrix:
    """``mu_i``: keep ``S_1..S_i`` and ``C`` (``mu`` is on ``S_1..S_n, C``)."""
    return partial_trace(mu, list(range(i)) + [n])


@dataclass(frozen=True)
class CatalystPrime:
    n: int
    state: DensityMatrix
    components: tuple  # mu_0 .. mu_n
    rho: DensityMatrix

    def block(self, k: int) -> np.ndarray:
        """Unnormalised K-block ``k`` (1-based) of the state."""
        d = self.state.dim // self.n
        m = self.state.mat.reshape(d, self.n, d, self.n)
        return m[:, k - 1, :, k - 1]


def build_catalyst_prime(rho: DensityMatrix, mu: DensityMatrix, n: int,
                         tau_n: DensityMatrix | None = None) -> CatalystPrime:
    """Catalyst ``(1/n) sum_k rho^(k-1) (x) mu_{n-k} (x) |k><k|``.

    Parameters
    ----------
    rho : DensityMatrix
        Single-copy input state on S.
    mu : DensityMatrix
        Output of the asymptotic protocol on ``S^n (x) C`` (dims ``(d_S,)*n + (d_C,)``).
    n : int
        Number of copies.
    tau_n : DensityMatrix, optional
        Original catalyst; when given, the C marginal of ``mu`` must equal it.
    """
    ds = rho.dim
    if n < 1:
        raise InvalidArgument("n must be at least 1")
    if len(mu.dims) != n + 1 or any(d != ds for d in mu.dims[:n]):
        raise InvalidArgument(f"mu dims {mu.dims} do not match {n} copies of dimension {ds} plus C")
    mus = [_reduced(mu, i, n) for i in range(n + 1)]
    if tau_n is not None:
        res = float(np.max(np.abs(mus[0].mat - tau_n.mat)))
        if res > CATALYST_TOL:
            raise CatalystNotReturned(f"C marginal of mu differs from tau_n by {res:.3e}")
    dc = mu.dims[n]
    dims = (ds,) * (n - 1) + (dc, n)
    total = np.zeros((int(np.prod(dims)),) * 2, dtype=np.complex128)
    for k in range(1, n + 1):
        parts = ([tensor_power(rho, k - 1)] if k > 1 else []) + [mus[n - k], _projector_state(k - 1, n)]
        total += tensor(*parts).mat
    return CatalystPrime(n, DensityMatrix._trusted(total / n, dims), tuple(mus), rho)


def counter_shift(n: int) -> np.ndarray:
    """Unitary on K: ``|i> -> |i+1>`` and ``|n> -> |1>``."""
    return np.roll(np.eye(n), 1, axis=0)


def _check_unitary(u: np.ndarray, what: str):
    err = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    if err > UNITARY_TOL:
        raise PreconditionError(f"{what} is not unitary (error {err:.3e})")


def muii_expression(rho: DensityMatrix, mus, n: int) -> np.ndarray:
    """``(1/n) sum_k rho^(k-1) (x) mu_{n+1-k} (x) |k><k|``, the state after step (ii)."""
    blocks = []
    for k in range(1, n + 1):
        parts = ([tensor_power(rho, k - 1)] if k > 1 else []) + [mus[n + 1 - k], _projector_state(k - 1, n)]
        blocks.append(tensor(*parts).mat)
    return sum(blocks) / n


@dataclass
class ProtocolResult:
    mu_prime: DensityMatrix
    catalyst: CatalystPrime
    eps_in: float
    eps_out: float
    catalyst_residual: float
    muii_residual: float
    mi: float
    mi_bound: float | None = None

    def report(self) -> dict:
        return {
            "eps_in": self.eps_in,
            "eps_out": self.eps_out,
            "catalyst_residual": self.catalyst_residual,
            "muii_residual": self.muii_residual,
            "mi": self.mi,
            "mi_bound": self.mi_bound,
        }


def run_protocol(rho: DensityMatrix, sigma: DensityMatrix, lam_n: chn.QuantumChannel, n: int,
                 tau_n: DensityMatrix | None = None) -> ProtocolResult:
    """Simulate the three-step single-copy protocol and measure its error."""
    ds = rho.dim
    if sigma.dim != ds:
        raise InvalidArgument("rho and sigma must act on the same space")
    tau_n = DensityMatrix._trusted(np.ones((1, 1)), (1,)) if tau_n is None else tau_n
    dc = tau_n.dim
    start = tensor(tensor_power(rho, n), tau_n).with_dims((ds,) * n + (dc,))
    mu = chn.apply(lam_n, start)
    target = tensor(tensor_power(sigma, n), tau_n).with_dims(start.dims)
    eps_in = trace_distance(mu, target)
    if eps_in >= 2:
        raise InvalidArgument(f"asymptotic protocol error {eps_in:.3e} is not below 2")
    res = float(np.max(np.abs(partial_trace(mu, [n]).mat - tau_n.mat)))
    if res > CATALYST_TOL:
        raise CatalystNotReturned(f"asymptotic protocol changes its catalyst (residual {res:.3e})")
    cat = build_catalyst_prime(rho, mu, n, tau_n)

    dims = (ds,) * n + (dc, n)
    state = tensor(rho, cat.state).with_dims(dims)
    dim_sc = ds**n * dc
    eye_sc = np.eye(dim_sc)

    # step (i): read out K, run lam_n on outcome n
    readout = chn.QuantumChannel(tuple(_ket(k, n) for k in range(n)), name="readout")
    state = chn.apply_local(readout, state, [n + 1])
    p_n = _ket(n - 1, n)
    ops = tuple(np.kron(k, p_n) for k in lam_n.kraus) + (np.kron(eye_sc, np.eye(n) - p_n),)
    state = chn.apply(chn.QuantumChannel(ops, name="controlled"), state)

    # step (ii): shift the counter
    u2 = np.kron(eye_sc, counter_shift(n))
    _check_unitary(u2, "counter shift")
    state = DensityMatrix._trusted(u2 @ state.mat @ u2.conj().T, dims)
    muii_res = float(np.max(np.abs(state.mat - muii_expression(rho, cat.components, n))))
    if muii_res > MUII_TOL:
        raise PreconditionError(f"state after step (ii) deviates from the block formula by {muii_res:.3e}")

    # step (iii): cyclic shift of the copies, S_n -> S_1
    perm = [n - 1] + list(range(n - 1)) + [n, n + 1]
    u3 = permutation_unitary(dims, perm)
    _check_unitary(u3, "cyclic shift")
    mu_prime = DensityMatrix._trusted(u3 @ state.mat @ u3.conj().T, dims)
    if abs(np.trace(mu_prime.mat).real - 1) > 1e-10:
        raise PreconditionError("protocol is not trace preserving")

    cat_res = float(np.max(np.abs(partial_trace(mu_prime, range(1, n + 2)).mat - cat.state.mat)))
    if cat_res > CATALYST_TOL:
        raise CatalystNotReturned(f"catalyst not returned (residual {cat_res:.3e})")
    eps_out = trace_distance(mu_prime, tensor(sigma, cat.state).with_dims(dims))
    mi = mutual_information(mu_prime, [0], list(range(1, n + 2)))
    bound = mi_bound(eps_out, ds) if eps_out < 1 / 16 else None
    return ProtocolResult(mu_prime, cat, eps_in, eps_out, cat_res, muii_res, mi, bound)


# ---------------------------------------------------------------------------
# correlations


def mi_bound(eps: float, d_ab: int) -> float:
    """``32 eps log2 d_AB + 2 h(8 eps)``."""
    if not 0 <= eps < 1 / 16:
        raise BoundOutOfRange(f"the decoupling bound needs 0 <= eps < 1/16, got {eps}")
    return 32 * eps * math.log2(d_ab) + 2 * binary_entropy(8 * eps)


def decoupling_mi_check(state: DensityMatrix, eps: float, d_ab: int,
                        system=(0,), catalyst=None) -> tuple[float, float, bool]:
    """Mutual information between system and catalyst against its decoupling bound."""
    bound = mi_bound(eps, d_ab)
    system = list(system)
    if catalyst is None:
        catalyst = [k for k in range(len(state.dims)) if k not in system]
    mi = mutual_information(state, system, list(catalyst))
    return mi, bound, bool(mi <= bound + 1e-9)


def controlled_channel(branches) -> chn.QuantumChannel:
    """Channel on ``S (x) C`` applying ``branches[c]`` to S when the classical register C holds ``c``."""
    dc = len(branches)
    ops = []
    for c, ch in enumerate(branches):
        for k in ch.kraus:
            ops.append(np.kron(k, _ket(c, dc)))
    return chn.QuantumChannel(tuple(ops), name="controlled")


def catalytic_error(rho, sigma, cat_channel, tau) -> float:
    """``|| cat_channel(rho (x) tau) - sigma (x) tau ||_1``."""
    out = chn.apply(cat_channel, tensor(rho, tau))
    return trace_distance(out, tensor(sigma, tau))


def sequential_reuse(rho: DensityMatrix, sigma: DensityMatrix, cat_channel: chn.QuantumChannel,
                     tau: DensityMatrix, n: int) -> tuple[DensityMatrix, float]:
    """Apply ``cat_channel`` to ``(S_k, C)`` for k = 1..n, reusing the same catalyst.

    Returns the joint state on ``S_1..S_n, C`` and its distance to
    ``sigma^n (x) tau``.
    """
    if n < 1:
        raise InvalidArgument("n must be at least 1")
    ds, dc = rho.dim, tau.dim
    if cat_channel.dim_in != ds * dc:
        raise InvalidArgument("catalytic channel must act on S (x) C")
    dims = (ds,) * n + (dc,)
    joint = tensor(tensor_power(rho, n), tau).with_dims(dims)
    for k in range(n):
        joint = chn.apply_local(cat_channel, joint, [k, n])
        drift = float(np.max(np.abs(partial_trace(joint, [n]).mat - tau.mat)))
        if drift > 1e-8:
            raise CatalystNotReturned(f"catalyst marginal drifted by {drift:.3e} after use {k + 1}")
    dist = trace_distance(joint, tensor(tensor_power(sigma, n), tau).with_dims(dims))
    return joint, dist


# ---------------------------------------------------------------------------
# scenarios


@dataclass
class Scenario:
    rho: DensityMatrix
    sigma: DensityMatrix
    lam_n: chn.QuantumChannel
    n: int
    tau: DensityMatrix = field(default_factory=lambda: DensityMatrix._trusted(np.ones((1, 1)), (1,)))


def _preset_rho() -> DensityMatrix:
    v = np.array([math.cos(math.pi / 8), math.sin(math.pi / 8)])
    return DensityMatrix.from_ket(v)


def preset_scenario(name: str, n: int = 3, eps: float = 0.1) -> Scenario:
    """Built-in scenarios.

    ``identity``: ``lam_n`` is the identity and ``sigma = rho``, so the
    error is zero. ``permute_depolarize``: a cyclic permutation of the
    copies followed by global depolarizing noise of the strength giving
    asymptotic error ``eps``.
    """
    rho = _preset_rho()
    d = rho.dim**n
    if name == "identity":
        return Scenario(rho, rho, chn.identity_channel(d), n)
    if name == "permute_depolarize":
        dims = (rho.dim,) * n
        perm = chn.unitary_channel(permutation_unitary(dims, [n - 1] + list(range(n - 1))))
        base = tensor_power(rho, n).with_dims(dims)
        scale = linalg.trace_norm(np.eye(d) / d - base.mat)
        q = eps / scale
        if not 0 <= q <= 1:
            raise InvalidArgument(f"eps = {eps} is not reachable by depolarizing noise")
        return Scenario(rho, rho, chn.compose(chn.depolarizing(d, q), perm), n)
    raise InvalidArgument(f"unknown preset '{name}'")


def load_scenario(obj: dict) -> Scenario:
    """Parse ``{rho, sigma, tau, lam_n | preset, n}``."""
    if "preset" in obj:
        return preset_scenario(obj["preset"], int(obj.get("n", 3)), float(obj.get("eps", 0.1)))
    for key in ("rho", "sigma", "lam_n", "n"):
        if key not in obj:
            raise InvalidArgument(f"scenario is missing field '{key}'")
    rho = linalg.from_json_dict(obj["rho"])
    sigma = linalg.from_json_dict(obj["sigma"])
    lam = chn.from_json_dict(obj["lam_n"])
    sc = Scenario(rho, sigma, lam, int(obj["n"]))
    if "tau" in obj:
        sc.tau = linalg.from_json_dict(obj["tau"])
    return sc


def run_scenario(sc: Scenario) -> ProtocolResult:
    return run_protocol(sc.rho, sc.sigma, sc.lam_n, sc.n, sc.tau)


def scenario_report_json(res: ProtocolResult) -> str:
    return json.dumps(res.report(), indent=2)
