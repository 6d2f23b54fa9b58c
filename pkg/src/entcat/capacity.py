"""Bounds on the catalytic quantum capacity of concrete channel families."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Iterable

import numpy as np
from scipy.optimize import brentq

from .channels import (
    QuantumChannel,
    choi_state,
    dephasing,
    gad_channel,
    kraus_outcome_dist,
    tensor_channel,
)
from .errors import Infeasible, InvalidArgument, PreconditionError
from .linalg import DensityMatrix, partial_trace
from .measures import (
    DEFAULT_SEED,
    _entropy_of_spectrum,
    bell_mixture_71,
    eof_bell_diagonal,
    eof_two_qubit,
    shannon_entropy,
    squashed_ub_mc,
    von_neumann_entropy,
)

SLACK = 1e-9
BISECT_TOL = 1e-6


def hashing_bound(rho: DensityMatrix) -> float:
    """``S(rho^A) - S(rho^{AB})`` with A the first subsystem; may be negative."""
    if len(rho.dims) < 2:
        raise InvalidArgument("hashing bound needs a bipartite state")
    return von_neumann_entropy(partial_trace(rho, [0])) - von_neumann_entropy(rho)


def _square(ch: QuantumChannel) -> int:
    if ch.dim_in != ch.dim_out:
        raise InvalidArgument("capacity bounds are defined here for square channels")
    return ch.dim_in


def choi_entropy(ch: QuantumChannel) -> float:
    return von_neumann_entropy(choi_state(ch))


def choi_entropy_transmit(ch: QuantumChannel, m: int) -> bool:
    """Sufficient condition for transmitting ``m`` qubits: ``S(Choi) <= log2 d - m``."""
    d = _square(ch)
    if m < 1:
        raise InvalidArgument("m must be at least 1")
    return choi_entropy(ch) <= math.log2(d) - m + SLACK


def qc_lower_kraus(ch: QuantumChannel) -> int:
    """``max(0, floor(log2 d - H(p_i)))`` for the given Kraus representation."""
    d = _square(ch)
    h = shannon_entropy(kraus_outcome_dist(ch))
    return max(0, math.floor(math.log2(d) - h + SLACK))


def worst_case_entropy(pmax: float) -> float:
    """Largest entropy of a four-outcome distribution whose largest entry is ``pmax``."""
    if not 0.25 <= pmax <= 1:
        raise InvalidArgument(f"pmax {pmax} must lie in [1/4, 1]")
    q = (1 - pmax) / 3
    return shannon_entropy([pmax, q, q, q])


def _bisect_decreasing(fun, target: float, lo: float, hi: float, tol: float) -> float:
    """Smallest x in [lo, hi] with fun(x) <= target, for fun nonincreasing."""
    if fun(hi) > target:
        return math.nan
    if fun(lo) <= target:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fun(mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def pauli_transmit_threshold(n: int, m: int = 1, tol: float = BISECT_TOL) -> float:
    """Smallest ``pmax`` beyond which ``n`` Pauli-channel copies transmit ``m`` qubits."""
    if n < 1 or m < 1:
        raise InvalidArgument("need n >= 1 and m >= 1")
    target = 1 - m / n
    if target < 0:
        raise Infeasible(f"{m} qubits cannot be sent through {n} qubit channels")
    return _bisect_decreasing(worst_case_entropy, target, 0.25, 1.0, tol)


def pauli_transmit_limit(tol: float = BISECT_TOL) -> float:
    """Limit of the transmit threshold as the number of copies grows."""
    return _bisect_decreasing(worst_case_entropy, 1.0, 0.25, 1.0, tol)


def pauli_converse_ef(n: int, m: int = 1, tol: float = BISECT_TOL) -> float:
    """``pmax`` solving ``E_f(Bell-diagonal) = m/n``; below it the capacity is too small."""
    if n < 1 or m < 1:
        raise InvalidArgument("need n >= 1 and m >= 1")
    r = m / n
    if r > 1:
        raise Infeasible(f"m/n = {r} exceeds one ebit per copy")
    lo, hi = 0.5, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if eof_bell_diagonal(mid) >= r:
            hi = mid
        else:
            lo = mid
    return hi


class Verdict(str, Enum):
    IMPOSSIBLE = "Impossible"
    INCONCLUSIVE = "Inconclusive"


def pauli_converse_esq_mc(p: float, n: int, m: int = 1, samples: int = 10**5,
                          seed: int = DEFAULT_SEED, threads: int = 1) -> tuple[Verdict, float]:
    """Converse for ``n`` copies of the dephasing channel via the Monte-Carlo squashed bound.

    Returns the verdict and the bound that produced it.
    """
    bound = squashed_ub_mc(bell_mixture_71(p), samples, seed=seed, threads=threads)
    verdict = Verdict.IMPOSSIBLE if bound < m / n - 1e-4 else Verdict.INCONCLUSIVE
    return verdict, bound


def gad_choi_spectrum(d: int, p: float) -> np.ndarray:
    """Closed-form Choi spectrum of the amplitude-damping channel (nonincreasing)."""
    w = np.zeros(d * d)
    w[0] = (d - (d - 1) * p) / d
    w[1:d] = p / d
    return np.sort(w)[::-1]


def gad_hashing(d: int, p: float) -> float:
    return float(math.log2(d) - _entropy_of_spectrum(gad_choi_spectrum(d, p)))


def adc_transmit_range(d: int, m: int = 1, tol: float = 1e-6, check: bool = True) -> float:
    """Largest ``p*`` with ``hashing(Choi(gad(d, p))) >= m`` for all ``p <= p*``."""
    if d < 3 or m < 1:
        raise InvalidArgument("need d >= 3 and m >= 1")
    if gad_hashing(d, 0.0) < m:
        raise Infeasible(f"even the noiseless {d}-level channel falls short of {m} qubits")
    g = lambda p: gad_hashing(d, p) - m
    # the hashing bound first falls with p, so the first sign change is found on a grid
    grid = np.linspace(0, 1, 1001)
    vals = np.array([g(x) for x in grid])
    neg = np.nonzero(vals < 0)[0]
    if neg.size == 0:
        return 1.0
    k = neg[0]
    p_star = brentq(g, grid[k - 1], grid[k], xtol=tol)
    if check:
        num = hashing_bound(choi_state(gad_channel(d, p_star)))
        if abs(num - gad_hashing(d, p_star)) > 1e-8:
            raise PreconditionError("closed-form and numerical Choi spectra disagree")
    return float(p_star)


def fig2_curves(n_range: Iterable[int]) -> list[tuple[int, float, float]]:
    return [(int(n), pauli_transmit_threshold(n, 1), pauli_converse_ef(n, 1)) for n in n_range]


def fig2_csv(rows: list[tuple[int, float, float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "solid_pmax", "dashed_pmax"])
    for n, s, dsh in rows:
        w.writerow([n, f"{s:.6f}", f"{dsh:.6f}"])
    return buf.getvalue()


def two_copy_dephasing(p: float) -> QuantumChannel:
    ch = dephasing(p)
    return tensor_channel(ch, ch)


# ---------------------------------------------------------------------------
# report


@dataclass
class CapacityReport:
    channel: str
    hashing_bound: float
    choi_entropy: float
    qc_lower: int
    qc_upper: int
    ef_converse: float
    esq_mc_converse: float | None = None
    criteria_log: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def capacity_report(ch: QuantumChannel, samples: int | None = None, seed: int = DEFAULT_SEED,
                    threads: int = 1) -> CapacityReport:
    """Bracket the catalytic capacity of ``ch`` by the available bounds.

    The upper end uses the entanglement of formation of the Choi state when
    the channel acts on a qubit (and, if ``samples`` is given and the Choi
    state has rank at most 2, the Monte-Carlo squashed bound); otherwise it
    falls back to ``log2 d``.
    """
    d = _square(ch)
    choi = choi_state(ch)
    hb = hashing_bound(choi)
    s = von_neumann_entropy(choi)
    log_d = math.log2(d)
    h_kraus = shannon_entropy(kraus_outcome_dist(ch))
    lower = max(0, math.floor(log_d - h_kraus + SLACK))
    log = [("kraus_entropy", h_kraus, log_d - lower, "pass" if lower > 0 else "fail")]
    for m in range(1, math.floor(log_d + SLACK) + 1):
        ok = s <= log_d - m + SLACK
        log.append((f"choi_entropy_transmit(m={m})", s, log_d - m, "pass" if ok else "fail"))
        if ok:
            lower = max(lower, m)
    lower = max(lower, math.floor(hb + SLACK))
    log.append(("hashing_bound", hb, 1.0, "pass" if hb >= 1 - SLACK else "fail"))
    esq = None
    if d == 2:
        ef = eof_two_qubit(choi)
        upper_val = ef
        log.append(("eof_converse", ef, 1.0, "pass" if ef >= 1 - SLACK else "fail"))
        if samples is not None and int(np.sum(choi.eigvals() > 1e-10)) <= 2:
            esq = squashed_ub_mc(choi, samples, seed=seed, threads=threads)
            upper_val = min(upper_val, esq)
            log.append(("esq_mc_converse", esq, 1.0, "pass" if esq >= 1 - 1e-4 else "fail"))
    else:
        ef = upper_val = log_d
    upper = max(lower, math.floor(upper_val + SLACK))
    return CapacityReport(ch.name or "channel", hb, s, lower, upper, ef, esq, log)
