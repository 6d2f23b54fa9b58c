"""Non-identical pure-state sequence with vanishing singlet probability and divergent entropy.

The sequence is ``p_i = r_{i+N}`` with ``r_k = 1 / (k (log2 k)^(1+u))``. The
start index ``N`` is astronomically large, so it is kept as a Python
integer and every quantity is evaluated in the log domain.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import FormulaOutOfRange, InvalidArgument

LN2 = math.log(2.0)
LOG2E = 1.0 / LN2
ROUNDING = 1e-11


def _regime_bounds(f: float) -> tuple[float, float]:
    """``(pi/4 - acos sqrt f, sin^2 of it)``."""
    gap = math.pi / 4 - math.acos(math.sqrt(f))
    return gap, math.sin(gap) ** 2


def delta_conditions(delta: float, f: float, eps: float) -> tuple[bool, bool]:
    """The two requirements on ``delta``: the formula regime and the ``eps`` budget."""
    gap, s2 = _regime_bounds(f)
    regime = math.asin(math.sqrt(delta)) + math.acos(math.sqrt(f)) - math.pi / 4 < 0
    budget = delta / s2 < eps
    return regime, budget


def choose_delta(f: float, eps: float) -> float:
    """Largest ``2^-j`` (j >= 2) satisfying both conditions and ``delta < 1/2``."""
    for j in range(2, 1075):
        delta = 2.0**-j
        if all(delta_conditions(delta, f, eps)):
            return delta
    raise InvalidArgument(f"no dyadic delta found for f={f}, eps={eps}")


def tail_sum_bound(log2_n: float, u: float) -> float:
    """Upper bound on ``sum_{k > N} r_k``: ``r_N`` plus the integral tail."""
    log2_r = -log2_n - (1 + u) * math.log2(log2_n)
    return 2.0**log2_r + LN2 / (u * log2_n**u)


def tail_certified(n: int, u: float, delta: float) -> bool:
    """Certificate that ``prod_{k > n} (1 - r_k) > 1 - delta``.

    Uses ``|ln(1 - a)| <= 2a`` for ``0 <= a < 1/2``, which needs every
    ``r_k < 1/2`` (true for ``k >= 3``) and bounds ``-ln prod`` by twice the
    tail sum.
    """
    if n < 3:
        return False
    t = tail_sum_bound(math.log2(n), u)
    return t < 0.5 and -math.expm1(-2.0 * t) < delta


def smallest_certified_start(u: float, delta: float) -> int:
    """Smallest integer ``N`` passing :func:`tail_certified` (the certificate is monotone in N)."""
    if tail_certified(3, u, delta):
        return 3
    hi = 4
    while not tail_certified(hi, u, delta):
        hi *= hi
    lo = max(3, math.isqrt(hi))
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail_certified(mid, u, delta):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class NonIidSequence:
    """Sequence ``p_i = r_{i+N}`` of squared minor Schmidt coefficients.

    ``r1`` is the first element of the underlying ``r_k`` family; the
    sequence starts far beyond it, so it never enters a computation.
    """

    u: float
    delta: float
    N: int
    f: float
    eps: float
    r1: float = 0.5

    @property
    def log2_N(self) -> float:
        return math.log2(self.N)

    def log2_offset(self, i) -> np.ndarray:
        """``log2(i + N) - log2(N)``, kept separate because it is far below the ulp of ``log2 N``."""
        i = np.asarray(i, dtype=float)
        ratio = i / float(self.N) if self.log2_N < 1000 else i * 2.0 ** (-self.log2_N)
        return np.log1p(ratio) * LOG2E

    def log2_k(self, i) -> np.ndarray:
        """``log2(i + N)`` for 1-based indices ``i``."""
        return self.log2_N + self.log2_offset(i)

    def log2_p(self, i) -> np.ndarray:
        lk = self.log2_k(i)
        return -lk - (1 + self.u) * np.log2(lk)

    def p(self, i) -> np.ndarray:
        return np.exp2(self.log2_p(i))

    def log_products(self, n: int) -> np.ndarray:
        """Natural logs of the running products ``prod_{i<=m} (1 - p_i)``, m = 1..n."""
        return np.cumsum(np.log1p(-self.p(np.arange(1, n + 1))))

    def products(self, n: int) -> np.ndarray:
        return np.exp(self.log_products(n))

    def entropy_terms_log2(self, n: int) -> np.ndarray:
        """``log2 h(p_i)`` for i = 1..n, via ``h(p) = -p log2 p - (1-p) log2(1-p)``."""
        lp = self.log2_p(np.arange(1, n + 1))
        p = np.exp2(lp)
        # -(1-p) log2(1-p) = p * log2(e) * c(p), c -> 1 as p -> 0
        c = np.where(p > 1e-8, -(1 - p) * np.log1p(-p) / np.where(p > 0, p, 1.0), 1.0 - p / 2)
        return lp + np.log2(-lp + LOG2E * c)

    def entropy_sums(self, n: int) -> np.ndarray:
        """Running sums ``sum_{i<=m} h(p_i)`` in bits, m = 1..n."""
        return np.cumsum(np.exp2(self.entropy_terms_log2(n)))


def build_sequence(f: float, eps: float, u: float = 1.0) -> NonIidSequence:
    """Choose ``delta`` and the start index ``N`` for target fidelity ``f`` and error ``eps``."""
    if not 0.5 < f <= 1:
        raise InvalidArgument(f"fidelity must lie in (1/2, 1], got {f}")
    if eps <= 0:
        raise InvalidArgument("eps must be positive")
    if not 0 < u <= 1:
        raise InvalidArgument(f"u must lie in (0, 1], got {u}")
    delta = choose_delta(f, eps)
    n0 = smallest_certified_start(u, delta)
    return NonIidSequence(u, delta, n0, f, eps)


def singlet_probability_lambda(lam: float, f: float, one_minus_lam: float | None = None) -> float:
    """Maximal probability of reaching a singlet fidelity ``f`` from largest Schmidt weight ``lam``."""
    x = 1.0 - lam if one_minus_lam is None else one_minus_lam
    gap, s2 = _regime_bounds(f)
    m = math.asin(math.sqrt(max(0.0, x))) - gap
    if m >= 0:
        raise FormulaOutOfRange(f"conversion formula needs m < 0, got m = {m:.3e}")
    return min(1.0, x / s2)


def singlet_probability(seq: NonIidSequence, n: int, f: float | None = None) -> float:
    """Singlet-conversion probability for the first ``n`` states of ``seq``."""
    if n < 1:
        raise InvalidArgument("n must be at least 1")
    f = seq.f if f is None else f
    x = -math.expm1(float(seq.log_products(n)[-1]))
    return singlet_probability_lambda(1.0 - x, f, one_minus_lam=x)


def entropy_budget(seq: NonIidSequence, n: int) -> tuple[float, float, float]:
    """Entropy of the first ``n`` states with an integral-test bracket.

    Returns ``(sum, lower, upper)``. ``lower`` bounds
    ``sum_{k=N+1}^{N+n} 1/(k (log2 k)^u)``, itself a lower bound on the sum,
    from below by an integral; ``upper`` bounds the sum from above.
    """
    if n < 1:
        raise InvalidArgument("n must be at least 1")
    u = seq.u
    total = float(np.exp2(logsumexp(seq.entropy_terms_log2(n) * LN2) / LN2))
    a = float(seq.log2_k(1))  # log2(N + 1)
    off1 = float(seq.log2_offset(1))
    to_end = float(seq.log2_offset(n + 1)) - off1  # log2(N + n + 1) - log2(N + 1)
    span = float(seq.log2_offset(n)) - off1  # log2(N + n) - log2(N + 1)

    def integral(x0, dx):
        # int dk / (k (log2 k)^u) from log2 k = x0 to x0 + dx
        if u == 1:
            return LN2 * math.log1p(dx / x0)
        return LN2 * x0 ** (1 - u) * math.expm1((1 - u) * math.log1p(dx / x0)) / (1 - u)

    lower = integral(a, to_end)
    first = 2.0 ** (-a - u * math.log2(a))  # 1/((N+1)(log2(N+1))^u)
    # h(p) <= -p log2 p + p log2 e, and the ratio to 1/(k (log2 k)^u) falls with k
    factor = 1.0 + ((1 + u) * math.log2(a) + LOG2E) / a
    upper = factor * (first + integral(a, span))
    # for tiny p the upper bound is tight to first order, so floating-point
    # rounding of the log-domain terms (relative ~1e-13) gets an explicit allowance
    return total, lower * (1 - ROUNDING), upper * (1 + ROUNDING)


def catalytic_singlet_count(seq: NonIidSequence, n: int) -> int:
    """Number of singlets the entropy of the first ``n`` states can pay for."""
    return int(math.floor(entropy_budget(seq, n)[0]))


def prefix_csv(seq: NonIidSequence, n: int, stride: int = 1) -> str:
    """CSV rows ``i,p_i,prod,entropy_sum,count`` for i = 1..n in steps of ``stride``."""
    p = seq.p(np.arange(1, n + 1))
    prods = seq.products(n)
    sums = seq.entropy_sums(n)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "p_i", "prod", "entropy_sum", "count"])
    for i in range(0, n, stride):
        w.writerow([i + 1, f"{p[i]:.17g}", f"{prods[i]:.17g}", f"{sums[i]:.17g}", int(math.floor(sums[i]))])
    return buf.getvalue()
