"""Majorization, pure-state convertibility and the finite epsilon-net of Schmidt vectors."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidArgument, InvalidDistribution, PreconditionError
from .measures import binary_entropy, shannon_entropy

MAJ_SLACK = 1e-12
SUPPORT_TOL = 1e-12
_GOLDEN = (math.sqrt(5) - 1) / 2


def schmidt_vector(p, d: int | None = None) -> np.ndarray:
    """Validate a probability vector and return it sorted nonincreasingly.

    With ``d`` given the vector is zero-padded to length ``d``.
    """
    v = np.asarray(p, dtype=float).ravel()
    if v.size == 0 or np.any(v < -1e-15):
        raise InvalidDistribution(f"{v.tolist()} is not a probability vector")
    if abs(v.sum() - 1.0) > 1e-9:
        raise InvalidDistribution(f"Schmidt vector sums to {v.sum()!r}")
    v = np.sort(np.clip(v, 0, None))[::-1]
    if d is not None:
        if v.size > d:
            raise InvalidArgument(f"Schmidt vector of length {v.size} exceeds d = {d}")
        v = np.pad(v, (0, d - v.size))
    return v


def _pad_pair(q, p):
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    n = max(q.shape[-1], p.shape[-1])
    pad = lambda v: np.pad(v, [(0, 0)] * (v.ndim - 1) + [(0, n - v.shape[-1])])
    return np.sort(pad(q), axis=-1)[..., ::-1], np.sort(pad(p), axis=-1)[..., ::-1]


def majorizes(q, p) -> bool:
    """True iff every prefix sum of ``q`` is at least the corresponding one of ``p``."""
    q, p = _pad_pair(q, p)
    return bool(np.all(np.cumsum(q) >= np.cumsum(p) - MAJ_SLACK))


def strictly_majorizes(q, p) -> bool:
    """All proper prefix sums (k = 1..d-1) of ``q`` strictly exceed those of ``p``."""
    q, p = _pad_pair(q, p)
    return bool(np.all(np.cumsum(q)[:-1] > np.cumsum(p)[:-1]))


def _strict_on_support(points: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Row mask: ``points`` majorize ``p`` with strict prefixes up to ``p``'s support.

    For a rank-deficient ``p`` of support ``r`` the prefix sums from ``r`` on
    already equal one and cannot be exceeded; there the comparison is the
    non-strict one.
    """
    r = max(1, int(np.sum(p > SUPPORT_TOL)))
    cq = np.cumsum(points, axis=-1)
    cp = np.cumsum(p)
    strict = np.all(cq[..., : r - 1] > cp[: r - 1], axis=-1)
    weak = np.all(cq[..., r - 1 :] >= cp[r - 1 :] - MAJ_SLACK, axis=-1)
    return strict & weak


def nielsen_convertible(psi, phi) -> bool:
    """Deterministic LOCC conversion psi -> phi (majorization criterion)."""
    return majorizes(phi, psi)


def catalytic_convertible(psi, phi) -> bool:
    return shannon_entropy(schmidt_vector(psi)) >= shannon_entropy(schmidt_vector(phi)) - MAJ_SLACK


def pure_trace_distance(p, q) -> float:
    """``|| |psi><psi| - |phi><phi| ||_1`` for pure states sharing a Schmidt basis."""
    p, q = _pad_pair(p, q)
    f = min(1.0, float(np.sum(np.sqrt(p * q))))
    return 2.0 * math.sqrt(max(0.0, 1.0 - f * f))


def _pure_distances(points: np.ndarray, p: np.ndarray) -> np.ndarray:
    f = np.clip(np.sqrt(points) @ np.sqrt(p), 0.0, 1.0)
    return 2.0 * np.sqrt(1.0 - f * f)


def pure_log_negativity(p) -> float:
    """Logarithmic negativity of a pure state with Schmidt vector ``p``."""
    p = schmidt_vector(p)
    return float(2 * np.log2(np.sum(np.sqrt(p))))


def qutrit_schmidt(alpha: float, beta: float) -> np.ndarray:
    """Schmidt vector of ``sin a cos b |00> + cos a cos b |11> + sin b |22>``."""
    amps = np.array([np.sin(alpha) * np.cos(beta), np.cos(alpha) * np.cos(beta), np.sin(beta)])
    return schmidt_vector(amps**2)


def ordering_example() -> tuple[np.ndarray, np.ndarray]:
    """Qutrit pair with ``E(psi) >= E(phi)`` but ``E_N(psi) < E_N(phi)``."""
    return qutrit_schmidt(1.3, 0.75), qutrit_schmidt(0.7, 1.0)


# ---------------------------------------------------------------------------
# epsilon-net


@dataclass(frozen=True)
class EpsNet:
    """Finite net of Schmidt vectors.

    Every Schmidt vector of dimension ``d`` lies within ``eps/10`` (pure-state
    trace distance) of a net point that majorizes it strictly on its support.
    Positive entropies of distinct points differ by at least ``pairwise_gap``.
    """

    eps: float
    d: int
    points: np.ndarray
    pairwise_gap: float
    eta: float = 0.0
    delta: float = 0.0
    entropies: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.entropies is None:
            object.__setattr__(self, "entropies", _entropies(pts))
        self.entropies.setflags(write=False)

    def __len__(self) -> int:
        return self.points.shape[0]

    def to_json_dict(self) -> dict:
        return {
            "d": self.d,
            "eps": self.eps,
            "L": self.pairwise_gap,
            "eta": self.eta,
            "delta": self.delta,
            "points": self.points.tolist(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, obj: dict) -> "EpsNet":
        for key in ("d", "eps", "L", "points"):
            if key not in obj:
                raise InvalidArgument(f"EpsNet JSON is missing field '{key}'")
        pts = np.asarray(obj["points"], dtype=float)
        return cls(float(obj["eps"]), int(obj["d"]), pts, float(obj["L"]),
                   float(obj.get("eta", 0.0)), float(obj.get("delta", 0.0)))


def _entropies(points: np.ndarray) -> np.ndarray:
    safe = np.where(points > 0, points, 1.0)
    return -np.sum(np.where(points > 0, points * np.log2(safe), 0.0), axis=-1)


def net_spacing(d: int, eps: float) -> float:
    """Amplitude grid spacing giving a trace-distance mesh below ``eps/20``.

    Flooring the tail amplitudes moves the amplitude vector by at most
    ``eta sqrt(d^2 - 1)``; the top-coefficient inflation adds at most
    ``eta sqrt(1 + d/4)``; pure-state trace distance is at most twice the
    amplitude distance.
    """
    return 0.999 * eps / (40 * (math.sqrt(d * d - 1) + math.sqrt(1 + d / 4)))


def _tail_grid(d: int, eta: float, max_points: int) -> np.ndarray:
    """Nonincreasing integer tuples ``(n_2..n_d)`` with ``eta^2 (n_2^2 + sum n_k^2) <= 1``."""
    top = int(math.floor(1 / (eta * math.sqrt(2))))
    if d == 2:
        return np.arange(top + 1)[:, None]
    rows = []
    count = 0
    for n2 in range(top + 1):
        budget = 1 / eta**2 - 2 * n2 * n2
        sub = _sub_grid(d - 2, n2, budget)
        rows.append(np.column_stack([np.full(len(sub), n2), sub]))
        count += len(sub)
        if count > max_points:
            raise InvalidArgument(f"epsilon-net would exceed {max_points} points; increase eps")
    return np.vstack(rows)


def _sub_grid(k: int, cap: int, budget: float) -> np.ndarray:
    # nonincreasing tuples of length k, entries <= cap, sum of squares <= budget
    if k == 0:
        return np.zeros((1, 0), dtype=int)
    out = []
    for n in range(min(cap, int(math.isqrt(int(max(0.0, budget))))) + 1):
        rest = _sub_grid(k - 1, n, budget - n * n)
        if len(rest):
            out.append(np.column_stack([np.full(len(rest), n), rest]))
    return np.vstack(out) if out else np.zeros((0, k), dtype=int)


def build_eps_net(d: int, eps: float, max_points: int = 5_000_000) -> EpsNet:
    """Construct the Schmidt-vector net for local dimension ``d`` and accuracy ``eps``."""
    if d not in (2, 3, 4):
        raise InvalidArgument(f"d must be 2, 3 or 4, got {d}")
    if not 0 < eps < 1:
        raise InvalidArgument(f"eps must lie in (0, 1), got {eps}")
    eta = net_spacing(d, eps)
    tails = _tail_grid(d, eta, max_points)
    tail_p = (eta * tails) ** 2
    g = np.column_stack([1 - tail_p.sum(axis=1), tail_p])
    # top-coefficient inflation; per-point jitter keeps the entropies apart
    idx = np.arange(len(g))
    lam = 0.5 * eta * (0.5 + 0.5 * ((idx * _GOLDEN) % 1.0))
    g = (1 - lam)[:, None] * g
    g[:, 0] += lam
    ent = _entropies(g)
    pos = np.sort(ent[ent > 1e-15])
    gap = float(np.min(np.diff(pos))) if pos.size > 1 else 1.0
    if gap <= 0:
        raise PreconditionError("net entropies are not separated")
    return EpsNet(eps, d, g, gap, eta, initial_net_delta(d, eps, gap), ent)


def initial_net_delta(d: int, eps: float, gap: float) -> float:
    """Largest ``delta < eps/4`` (up to a safety factor) with ``delta/2 log(d-1) + h(delta/2) < gap``."""
    lhs = lambda x: x / 2 * math.log2(d - 1) + binary_entropy(x / 2)
    cap = eps / 4
    if lhs(cap) < gap:
        return 0.5 * cap
    return 0.5 * brentq(lambda x: lhs(x) - gap, 0.0, cap, xtol=1e-300, rtol=1e-12)


def _product_corner(d: int) -> np.ndarray:
    e = np.zeros(d)
    e[0] = 1.0
    return e


def _cover(p: np.ndarray, net: EpsNet, radius: float) -> int:
    """Index of the nearest net point within ``radius`` majorizing ``p`` strictly on its support."""
    dist = _pure_distances(net.points, p)
    ok = (dist < radius) & _strict_on_support(net.points, p)
    if p[0] >= 1 - SUPPORT_TOL:
        ok |= (dist < radius) & (net.entropies <= 1e-15)
    if not np.any(ok):
        raise PreconditionError("no covering net point; the mesh bound was violated")
    cand = np.nonzero(ok)[0]
    return int(cand[np.argmin(dist[cand])])


def select_target(phi, net: EpsNet, tie_down: bool = False) -> np.ndarray:
    """Net point standing in for the target ``phi``.

    Without tie-down this is the nearest point within ``eps/10`` that
    majorizes ``phi`` strictly. With tie-down, and a point of positive
    entropy, ``phi`` is first moved by less than ``eps/20`` to a state of
    lower entropy, which is then covered; the result is within ``eps/4`` of
    ``phi`` and has entropy at most that of ``phi``. Both conditions are
    checked before returning.
    """
    p = schmidt_vector(phi, net.d)
    s = _cover(p, net, net.eps / 10)
    g = net.points[s]
    if tie_down and net.entropies[s] > 1e-15:
        theta = _lower_entropy_neighbour(g, net.eps / 20)
        t = _cover(theta, net, net.eps / 10)
        g = net.points[t]
        if shannon_entropy(g) > shannon_entropy(p) + 1e-12:
            raise PreconditionError("tie-down produced a point of larger entropy")
        if pure_trace_distance(g, p) >= net.eps / 4:
            raise PreconditionError("tie-down moved the target too far")
        return g.copy()
    if pure_trace_distance(g, p) >= net.eps / 10:
        raise PreconditionError("selected point violates the distance condition")
    if not (_strict_on_support(g[None, :], p)[0] or shannon_entropy(g) == 0):
        raise PreconditionError("selected point violates the majorization condition")
    return g.copy()


def _lower_entropy_neighbour(g: np.ndarray, radius: float) -> np.ndarray:
    # move toward the product corner; this strictly lowers the entropy
    e = _product_corner(len(g))
    lam = 1.0
    while pure_trace_distance((1 - lam) * g + lam * e, g) >= 0.9 * radius:
        lam *= 0.5
    return (1 - lam) * g + lam * e


def catalyst_index_set(initial: EpsNet, target: EpsNet) -> list[tuple[int, int]]:
    """Pairs ``(r, s)`` with ``S(psi_r) >= S(phi_s)``.

    The universal catalyst is the tensor product of one catalyst per pair;
    this function only enumerates the pairs.
    """
    si = initial.entropies
    order = np.argsort(target.entropies, kind="stable")
    st = target.entropies[order]
    pairs = []
    for r, s_r in enumerate(si):
        k = int(np.searchsorted(st, s_r + MAJ_SLACK, side="right"))
        pairs.extend((r, int(s)) for s in sorted(order[:k]))
    return pairs
