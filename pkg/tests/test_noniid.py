import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entcat import noniid as ni
from entcat.errors import FormulaOutOfRange, InvalidArgument


def r(k, u=1.0):
    return 1.0 / (k * math.log2(k) ** (1 + u))


def h(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


@pytest.fixture(scope="module")
def seq():
    return ni.build_sequence(0.9, 0.01, 1.0)


def test_delta_conditions_by_direct_evaluation(seq):
    f, eps, d = 0.9, 0.01, seq.delta
    assert 0 < d < 0.5
    assert math.asin(math.sqrt(d)) + math.acos(math.sqrt(f)) - math.pi / 4 < 0
    assert d / math.sin(math.pi / 4 - math.acos(math.sqrt(f))) ** 2 < eps
    # the next dyadic value up fails one of them
    assert not all(ni.delta_conditions(2 * d, f, eps))


def test_start_index_certificate(seq):
    assert isinstance(seq.N, int) and seq.N >= 3
    assert ni.tail_certified(seq.N, seq.u, seq.delta)
    assert not ni.tail_certified(seq.N - 1, seq.u, seq.delta)
    # every tail term is below 1/2, as the logarithm bound requires
    assert float(seq.p(1)) < 0.5


def test_tail_certificate_small_oracle():
    # brute-force tail product for a loose delta where N is small
    u, delta = 1.0, 0.9
    n0 = ni.smallest_certified_start(u, delta)
    k = np.arange(n0 + 1, 10**7, dtype=float)
    partial = np.sum(np.log1p(-1.0 / (k * np.log2(k) ** 2)))
    assert math.exp(partial) > 1 - delta


def test_trend_towards_half():
    fs = [0.99, 0.95, 0.9, 0.8, 0.7, 0.65, 0.6]
    built = [ni.build_sequence(f, 0.01, 1.0) for f in fs]
    deltas = [s.delta for s in built]
    starts = [s.N for s in built]
    assert all(a >= b for a, b in zip(deltas, deltas[1:]))
    assert all(a <= b for a, b in zip(starts, starts[1:]))
    assert deltas[-1] < deltas[0] and starts[-1] > starts[0]


def test_entropy_term_dominates_divergent_series():
    for k in [2, 3, 10, 100, 10**4, 10**8, 10**15]:
        rk = r(k)
        assert -rk * math.log2(rk) >= 1 / (k * math.log2(k))


def test_build_errors():
    for f in (0.5, 0.3, 1.2):
        with pytest.raises(InvalidArgument):
            ni.build_sequence(f, 0.01)
    with pytest.raises(InvalidArgument):
        ni.build_sequence(0.9, 0.0)
    with pytest.raises(InvalidArgument):
        ni.build_sequence(0.9, 0.01, u=1.5)


# --- sequence evaluation -------------------------------------------------------------


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 10**6), st.sampled_from([0.5, 1.0]))
def test_log_domain_matches_direct_floats(n0, u):
    s = ni.NonIidSequence(u, 0.1, n0, 0.9, 0.01)
    i = np.arange(1, 200)
    direct = np.array([r(n0 + j, u) for j in i])
    assert np.allclose(s.p(i), direct, rtol=1e-12)
    sums = np.cumsum([h(p) for p in direct])
    assert np.allclose(s.entropy_sums(199), sums, rtol=1e-12)
    prods = np.cumprod(1 - direct)
    assert np.allclose(s.products(199), prods, rtol=1e-12)


def test_invariants_on_prefix(seq):
    n = 10**5
    p = seq.p(np.arange(1, n + 1))
    assert np.all((p > 0) & (p < 0.5))
    prods = seq.log_products(n)
    assert np.all(prods > math.log1p(-seq.delta)) and np.all(prods < 0)
    sums = seq.entropy_sums(n)
    assert np.all(np.diff(sums) > 0)


# --- singlet probability -------------------------------------------------------------


def test_singlet_probability_examples():
    assert ni.singlet_probability_lambda(1.0, 0.9) == 0
    expected = 0.01 / math.sin(math.pi / 4 - math.acos(math.sqrt(0.9))) ** 2
    assert math.isclose(ni.singlet_probability_lambda(0.99, 0.9), expected, rel_tol=1e-12)
    with pytest.raises(FormulaOutOfRange):
        ni.singlet_probability_lambda(0.5, 0.9)


def test_singlet_probability_below_eps(seq):
    for n in (1, 10, 1000, 10**5, 10**6):
        pf = ni.singlet_probability(seq, n)
        assert 0 <= pf < 0.01
    with pytest.raises(InvalidArgument):
        ni.singlet_probability(seq, 0)


# --- entropy budget --------------------------------------------------------------------


def test_entropy_budget_single_term(seq):
    total, lo, hi = ni.entropy_budget(seq, 1)
    p1 = float(seq.p(1))
    expected = -p1 * math.log2(p1) + p1 * math.log2(math.e)
    assert math.isclose(total, expected, rel_tol=1e-9)
    assert total <= hi


def test_entropy_bracket_at_one_million(seq):
    total, lo, hi = ni.entropy_budget(seq, 10**6)
    assert lo <= total <= hi
    assert math.isclose(total, float(seq.entropy_sums(10**6)[-1]), rel_tol=1e-9)


def test_bracket_small_start_oracle():
    # with a small start index the bracket is checked against a direct float sum
    for n0 in (3, 50, 10**4):
        s = ni.NonIidSequence(1.0, 0.1, n0, 0.9, 0.01)
        for n in (1, 100, 10**4):
            direct = math.fsum(h(r(n0 + j)) for j in range(1, n + 1))
            total, lo, hi = ni.entropy_budget(s, n)
            assert math.isclose(total, direct, rel_tol=1e-10)
            harmonic = math.fsum(1 / ((n0 + j) * math.log2(n0 + j)) for j in range(1, n + 1))
            assert lo <= harmonic <= direct <= hi


def test_singlet_count(seq):
    ns = [1, 10, 100, 10**4, 10**6]
    counts = [ni.catalytic_singlet_count(seq, n) for n in ns]
    assert counts[0] == 0
    assert all(a <= b for a, b in zip(counts, counts[1:]))
    _, lo, _ = ni.entropy_budget(seq, 10**6)
    assert counts[-1] >= math.floor(lo)
    # the count steps exactly where the running sum crosses an integer
    s = ni.NonIidSequence(1.0, 0.1, 3, 0.9, 0.01)
    sums = s.entropy_sums(50)
    for n in (1, 5, 20, 50):
        assert ni.catalytic_singlet_count(s, n) == math.floor(sums[n - 1])


def test_prefix_csv(seq):
    lines = ni.prefix_csv(seq, 10, stride=5).splitlines()
    assert lines[0] == "i,p_i,prod,entropy_sum,count"
    assert [ln.split(",")[0] for ln in lines[1:]] == ["1", "6"]
