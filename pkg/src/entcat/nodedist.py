"""Entanglement distribution through a depolarizing fibre with an intermediate node."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channels import apply_to_half, choi_state, depolarizing_length
from .errors import DegenerateKraus, InvalidArgument
from .linalg import DensityMatrix, as_matrix, max_entangled, partial_trace, partial_transpose

DET_TOL = 1e-12
LN3 = math.log(3.0)


@dataclass(frozen=True)
class NodeScenario:
    """Fibre of length ``l`` with a node at distance ``s`` from Alice.

    The node filters with ``kraus_node`` if given, otherwise with
    ``diag(cos beta, sin beta)``, which yields the state
    ``cos beta |00> + sin beta |11>`` from a maximally entangled input.
    """

    alpha: float
    l: float
    s: float
    beta: float = math.pi / 4
    kraus_node: np.ndarray | None = None

    def __post_init__(self):
        if self.alpha < 0 or self.l < 0:
            raise InvalidArgument("alpha and l must be nonnegative")
        if not 0 <= self.s <= self.l + 1e-15:
            raise InvalidArgument(f"node position s = {self.s} outside [0, l = {self.l}]")
        if self.kraus_node is not None:
            k = as_matrix(self.kraus_node)
            if k.shape != (2, 2):
                raise InvalidArgument("node Kraus operator must be 2x2")
            top = float(np.linalg.eigvalsh(k.conj().T @ k)[-1])
            if top > 1 + 1e-10:
                raise InvalidArgument(f"node Kraus operator has ||K^dag K|| = {top:.6f} > 1")
            object.__setattr__(self, "kraus_node", k)

    @property
    def node_operator(self) -> np.ndarray:
        if self.kraus_node is not None:
            return self.kraus_node
        return np.diag([math.cos(self.beta), math.sin(self.beta)]).astype(np.complex128)


def _filtered_pure(k: np.ndarray) -> DensityMatrix:
    phi = np.eye(2).ravel() / math.sqrt(2)
    v = np.kron(np.eye(2), k) @ phi
    q = float(np.vdot(v, v).real)
    if q <= 1e-14:
        raise DegenerateKraus("node operator annihilates the state (zero success probability)")
    return DensityMatrix.from_ket(v, (2, 2))


def sigma_state(sc: NodeScenario) -> DensityMatrix:
    """Normalised Alice-Bob state after both fibre segments and the node filter (closed form)."""
    psi = _filtered_pure(sc.node_operator)
    pa = partial_trace(psi, [0]).mat
    pb = partial_trace(psi, [1]).mat
    half = np.eye(2) / 2
    e_l = math.exp(-sc.alpha * sc.l)
    e_s = math.exp(-sc.alpha * sc.s)
    e_ls = math.exp(-sc.alpha * (sc.l - sc.s))
    m = (
        e_l * psi.mat
        + e_ls * (1 - e_s) * np.kron(half, pb)
        + (1 - e_ls) * e_s * np.kron(pa, half)
        + (1 - e_ls) * (1 - e_s) * np.eye(4) / 4
    )
    return DensityMatrix._trusted(m, (2, 2))


def sigma_pipeline(sc: NodeScenario) -> DensityMatrix:
    """The same state obtained by applying the channels and the filter one after another."""
    k = np.kron(np.eye(2), sc.node_operator)
    first = apply_to_half(depolarizing_length(sc.alpha, sc.s), max_entangled(2))
    filt = k @ first.mat @ k.conj().T
    tr = float(np.trace(filt).real)
    if tr <= 1e-14:
        raise DegenerateKraus("node operator annihilates the state (zero success probability)")
    mid = DensityMatrix._trusted(filt / tr, (2, 2))
    return apply_to_half(depolarizing_length(sc.alpha, sc.l - sc.s), mid)


def f_node(s_prime: float) -> float:
    return 9 - 10 * math.exp(2 * s_prime) + math.exp(4 * s_prime)


def det_pt_closed(s_prime: float, beta: float) -> float:
    """Closed-form ``det(sigma^{T_A})`` at ``alpha l = ln 3`` with ``s' = alpha s``."""
    if not -1e-15 <= s_prime <= LN3 + 1e-12:
        raise InvalidArgument(f"s' = {s_prime} outside [0, ln 3]")
    f = f_node(s_prime)
    c2 = math.cos(2 * beta) ** 2
    s2 = math.sin(2 * beta) ** 2
    return math.exp(-4 * s_prime) * c2 / 20736 * (f * f - f * (3 + math.exp(2 * s_prime)) ** 2 * s2)


def det_pt(sc: NodeScenario) -> float:
    """Determinant of the partial transpose for a scenario at the critical length ``ln 3 / alpha``."""
    if sc.alpha <= 0 or abs(sc.alpha * sc.l - LN3) > 1e-12:
        raise InvalidArgument("det_pt is defined at alpha * l = ln 3")
    if sc.kraus_node is not None:
        return det_pt_numeric(sigma_state(sc))
    return det_pt_closed(sc.alpha * sc.s, sc.beta)


def det_pt_numeric(rho: DensityMatrix) -> float:
    if rho.dims != (2, 2):
        raise InvalidArgument(f"two-qubit state required, got dims {rho.dims}")
    return float(np.linalg.det(partial_transpose(rho, 0)).real)


def is_entangled_2q(rho: DensityMatrix) -> bool:
    """Two-qubit entanglement test: negative determinant of the partial transpose."""
    return det_pt_numeric(rho) < -DET_TOL


class Verdict(str, Enum):
    DIRECT_OK = "DirectOK"
    CATALYTIC_ONLY = "CatalyticOnly"
    IMPOSSIBLE = "Impossible"


def link_entangling(alpha: float, l: float) -> bool:
    """Whether a fibre of length ``l`` keeps half of a Bell pair entangled."""
    return is_entangled_2q(choi_state(depolarizing_length(alpha, l)))


def feasibility(alpha: float, l: float) -> Verdict:
    """Verdict from the Choi states of the full fibre and of each half.

    The whole fibre entangling means direct distribution works. Otherwise
    catalytic distillation at a midpoint node helps exactly when each half
    still entangles.
    """
    if alpha <= 0 or l < 0:
        raise InvalidArgument("need alpha > 0 and l >= 0")
    if link_entangling(alpha, l):
        return Verdict.DIRECT_OK
    if link_entangling(alpha, l / 2):
        return Verdict.CATALYTIC_ONLY
    return Verdict.IMPOSSIBLE


def analytic_feasibility(alpha: float, l: float) -> Verdict:
    x = alpha * l
    if x < LN3:
        return Verdict.DIRECT_OK
    if x < 2 * LN3:
        return Verdict.CATALYTIC_ONLY
    return Verdict.IMPOSSIBLE


def verdict_boundary(alpha: float, lo: float, hi: float, tol: float = 1e-7) -> float:
    """Bisection for the length at which :func:`feasibility` changes between ``lo`` and ``hi``."""
    v_lo = feasibility(alpha, lo)
    if feasibility(alpha, hi) == v_lo:
        raise InvalidArgument("verdict does not change on the bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasibility(alpha, mid) == v_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def det_grid(n_s: int = 200, n_beta: int = 200) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``det_pt_closed`` on a uniform (s', beta) grid over ``[0, ln 3] x [0, pi/2]``."""
    sp = np.linspace(0, LN3, n_s)
    be = np.linspace(0, math.pi / 2, n_beta)
    s2, b2 = np.meshgrid(sp, be, indexing="ij")
    e2 = np.exp(2 * s2)
    f = 9 - 10 * e2 + e2 * e2
    det = np.exp(-4 * s2) * np.cos(2 * b2) ** 2 / 20736 * (f * f - f * (3 + e2) ** 2 * np.sin(2 * b2) ** 2)
    return sp, be, det


def det_grid_csv(n_s: int = 200, n_beta: int = 200) -> str:
    sp, be, det = det_grid(n_s, n_beta)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s_prime", "beta", "det"])
    for i, s in enumerate(sp):
        for j, b in enumerate(be):
            w.writerow([f"{s:.6g}", f"{b:.6g}", f"{det[i, j]:.6g}"])
    return buf.getvalue()
