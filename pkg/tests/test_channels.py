import math

import numpy as np
import pytest

from entcat import channels as chn
from entcat import linalg as la
from entcat.errors import InvalidArgument
from entcat.measures import shannon_entropy, von_neumann_entropy, binary_entropy

from oracles import choi_explicit

BELL = la.max_entangled(2)
S2 = 1 / math.sqrt(2)
PHI_MINUS = la.DensityMatrix.from_ket([S2, 0, 0, -S2], (2, 2))


def all_constructors():
    u3 = la.haar_unitary(3, seed=1)
    return [
        chn.identity_channel(3),
        chn.unitary_channel(u3),
        chn.depolarizing(3, 0.3),
        chn.completely_depolarizing(2),
        chn.completely_depolarizing(4),
        chn.pauli_channel([0.7, 0.1, 0.15, 0.05]),
        chn.dephasing(0.8),
        chn.unitary_mixture(u3, 0.2),
        *[chn.gad_channel(d, p) for d in range(2, 9) for p in (0.0, 0.16, 0.5, 1.0)],
        chn.depolarizing_length(0.3, 2.0),
        chn.replacement_channel(la.random_density_matrix((3,), seed=2), 2),
        chn.tensor_channel(chn.dephasing(0.9), chn.dephasing(0.7)),
        chn.compose(chn.dephasing(0.9), chn.depolarizing(2, 0.5)),
    ]


def test_cptp_invariant_all_constructors():
    for ch in all_constructors():
        s = sum(k.conj().T @ k for k in ch.kraus)
        assert np.max(np.abs(s - np.eye(ch.dim_in))) <= 1e-10


def test_rejects_non_trace_preserving():
    with pytest.raises(InvalidArgument):
        chn.QuantumChannel([np.eye(2) * 0.9])
    with pytest.raises(InvalidArgument):
        chn.QuantumChannel([])


# --- apply ---------------------------------------------------------------------


def test_apply_examples():
    rho = la.random_density_matrix((3,), seed=3)
    assert np.allclose(chn.apply(chn.identity_channel(3), rho).mat, rho.mat)
    assert np.allclose(chn.apply(chn.completely_depolarizing(3), rho).mat, np.eye(3) / 3)
    plus = la.DensityMatrix.from_ket([S2, S2])
    out = chn.apply(chn.dephasing(0.75), plus)
    assert np.isclose(2 * out.mat[0, 1].real, 0.5)
    with pytest.raises(InvalidArgument):
        chn.apply(chn.identity_channel(2), rho)


def test_apply_is_linear_and_trace_preserving():
    rng = np.random.default_rng(4)
    for ch in all_constructors():
        a = la.random_density_matrix((ch.dim_in,), rng)
        b = la.random_density_matrix((ch.dim_in,), rng)
        x = float(rng.uniform())
        mix = la.DensityMatrix._trusted(x * a.mat + (1 - x) * b.mat, (ch.dim_in,))
        lhs = chn.apply(ch, mix).mat
        rhs = x * chn.apply(ch, a).mat + (1 - x) * chn.apply(ch, b).mat
        assert np.max(np.abs(lhs - rhs)) <= 1e-10
        assert abs(np.trace(lhs) - 1) <= 1e-10


def test_apply_to_half_examples():
    rho = la.random_density_matrix((2, 3), seed=5)
    assert np.allclose(chn.apply_to_half(chn.identity_channel(3), rho).mat, rho.mat)
    for p in (0.0, 0.3, 0.817, 1.0):
        out = chn.apply_to_half(chn.dephasing(p), BELL)
        assert np.allclose(out.mat, p * BELL.mat + (1 - p) * PHI_MINUS.mat)
    a = la.random_density_matrix((2,), seed=6)
    b = la.random_density_matrix((3,), seed=7)
    ch = chn.gad_channel(3, 0.4)
    out = chn.apply_to_half(ch, la.tensor(a, b))
    assert np.allclose(out.mat, np.kron(a.mat, chn.apply(ch, b).mat))
    with pytest.raises(InvalidArgument):
        chn.apply_to_half(chn.identity_channel(2), rho)


def test_apply_to_half_keeps_untouched_marginal():
    rng = np.random.default_rng(8)
    for ch in all_constructors():
        if ch.dim_in != ch.dim_out:
            continue
        rho = la.random_density_matrix((2, ch.dim_in), rng)
        out = chn.apply_to_half(ch, rho)
        s_before = von_neumann_entropy(la.partial_trace(rho, [0]))
        s_after = von_neumann_entropy(la.partial_trace(out, [0]))
        assert abs(s_before - s_after) <= 1e-10


def test_apply_local_middle_subsystem():
    rng = np.random.default_rng(9)
    a, b, c = (la.random_density_matrix((d,), rng) for d in (2, 3, 2))
    ch = chn.gad_channel(3, 0.3)
    out = chn.apply_local(ch, la.tensor(a, b, c), [1])
    assert np.allclose(out.mat, np.kron(np.kron(a.mat, chn.apply(ch, b).mat), c.mat))


# --- Choi states -------------------------------------------------------------------


def test_choi_examples():
    assert np.allclose(chn.choi_state(chn.identity_channel(2)).mat, BELL.mat)
    assert np.allclose(chn.choi_state(chn.completely_depolarizing(3)).mat, np.eye(9) / 9)
    w = [0.55, 0.2, 0.15, 0.1]
    choi = chn.choi_state(chn.pauli_channel(w)).mat
    # Bell basis ordered as sigma_i applied to the second half of phi+
    for wi, s in zip(w, chn.PAULI):
        v = np.kron(np.eye(2), s) @ (np.eye(2).ravel() / math.sqrt(2))
        assert np.isclose(np.vdot(v, choi @ v).real, wi)
    assert np.allclose(np.sort(np.linalg.eigvalsh(choi)), np.sort(w))


def test_choi_matches_explicit_oracle_and_marginal():
    for ch in all_constructors():
        if ch.dim_in != ch.dim_out:
            continue
        choi = chn.choi_state(ch)
        assert np.allclose(choi.mat, choi_explicit(ch.kraus, ch.dim_in), atol=1e-12)
        d = ch.dim_in
        assert np.max(np.abs(la.partial_trace(choi, [0]).mat - np.eye(d) / d)) <= 1e-10


def test_choi_rejects_non_square():
    with pytest.raises(InvalidArgument):
        chn.choi_state(chn.replacement_channel(la.random_density_matrix((3,), seed=1), 2))


# --- Kraus outcome distribution -----------------------------------------------------


def test_kraus_outcome_examples():
    assert np.allclose(chn.kraus_outcome_dist(chn.unitary_channel(la.haar_unitary(3, seed=1))), [1])
    w = [0.4, 0.3, 0.2, 0.1]
    assert np.allclose(chn.kraus_outcome_dist(chn.pauli_channel(w)), w)
    p = 0.16
    assert np.allclose(chn.kraus_outcome_dist(chn.gad_channel(3, p)), [1 - 2 * p / 3, p / 3, p / 3])


def test_choi_entropy_vs_kraus_entropy():
    rng = np.random.default_rng(10)
    # Kraus-orthogonal families: equality
    clock = np.diag(np.exp(2j * np.pi * np.arange(3) / 3))
    for ch in (chn.pauli_channel(rng.dirichlet(np.ones(4))), chn.unitary_mixture(clock, 0.3),
               chn.gad_channel(4, 0.3), chn.dephasing(0.6)):
        h = shannon_entropy(chn.kraus_outcome_dist(ch))
        assert abs(von_neumann_entropy(chn.choi_state(ch)) - h) <= 1e-9
    # general channels: inequality
    for _ in range(30):
        k = int(rng.integers(1, 5))
        v = la.haar_unitary(3 * k, rng)[:, :3]
        ch = chn.QuantumChannel([v[3 * i:3 * i + 3] for i in range(k)])
        h = shannon_entropy(chn.kraus_outcome_dist(ch))
        assert von_neumann_entropy(chn.choi_state(ch)) <= h + 1e-9


def test_canonical_is_minimal_and_equivalent():
    rng = np.random.default_rng(11)
    v = la.haar_unitary(6, rng)[:, :2]
    ops = [v[2 * i:2 * i + 2] for i in range(3)]
    redundant = chn.QuantumChannel(ops + [np.zeros((2, 2))])
    can = chn.canonical(redundant)
    assert len(can) <= 3
    assert np.allclose(chn.choi_state(can).mat, chn.choi_state(redundant).mat)
    h_can = shannon_entropy(chn.kraus_outcome_dist(can))
    assert abs(h_can - von_neumann_entropy(chn.choi_state(can))) <= 1e-9


# --- families ---------------------------------------------------------------------


def test_pauli_channel_examples():
    rho = la.random_density_matrix((2,), seed=12)
    assert np.allclose(chn.apply(chn.pauli_channel([1, 0, 0, 0]), rho).mat, rho.mat)
    assert np.allclose(chn.apply(chn.pauli_channel([0.25] * 4), rho).mat, np.eye(2) / 2)
    p = 0.37
    a = chn.apply(chn.pauli_channel([p, 0, 0, 1 - p]), rho).mat
    z = chn.PAULI[3]
    assert np.allclose(a, p * rho.mat + (1 - p) * z @ rho.mat @ z)
    assert np.allclose(chn.apply(chn.dephasing(p), rho).mat, a)


def test_unitary_mixture():
    u = la.haar_unitary(3, seed=13)
    rho = la.random_density_matrix((3,), seed=14)
    assert np.allclose(chn.apply(chn.unitary_mixture(u, 0.0), rho).mat, rho.mat)
    z = np.diag([1.0, -1.0])
    q = la.random_density_matrix((2,), seed=15)
    assert np.allclose(chn.apply(chn.unitary_mixture(z, 0.3), q).mat, chn.apply(chn.dephasing(0.7), q).mat)
    assert np.allclose(chn.kraus_outcome_dist(chn.unitary_mixture(u, 0.3)), [0.7, 0.3])
    clock = np.diag(np.exp(2j * np.pi * np.arange(3) / 3))
    for p in (0.05, 0.1403, 0.3, 0.5):
        assert np.isclose(von_neumann_entropy(chn.choi_state(chn.unitary_mixture(clock, p))), binary_entropy(p))
    with pytest.raises(InvalidArgument):
        chn.unitary_mixture(np.ones((2, 2)), 0.1)
    with pytest.raises(InvalidArgument):
        chn.unitary_mixture(z, 0.6)


def test_gad_examples():
    rho = la.random_density_matrix((4,), seed=16)
    assert np.allclose(chn.apply(chn.gad_channel(4, 0.0), rho).mat, rho.mat)
    w = np.sort(np.linalg.eigvalsh(chn.choi_state(chn.gad_channel(3, 0.1)).mat))[::-1]
    assert np.allclose(w, [(3 - 2 * 0.1) / 3, 0.1 / 3, 0.1 / 3] + [0] * 6, atol=1e-12)


def test_gad_spectrum_degeneracies():
    for d in range(3, 9):
        for p in np.linspace(0.02, 0.98, 20):
            w = np.sort(np.linalg.eigvalsh(chn.choi_state(chn.gad_channel(d, p)).mat))[::-1]
            expect = [(d - (d - 1) * p) / d] + [p / d] * (d - 1) + [0] * (d * (d - 1))
            assert np.allclose(w, expect, atol=1e-12)


def test_depolarizing_length():
    rho = la.random_density_matrix((2,), seed=17)
    assert np.allclose(chn.apply(chn.depolarizing_length(1.0, 0.0), rho).mat, rho.mat)
    alpha = 0.7
    pt = la.partial_transpose(chn.choi_state(chn.depolarizing_length(alpha, math.log(3) / alpha)), 0)
    assert abs(np.linalg.eigvalsh(pt)[0]) <= 1e-10
    far = chn.apply(chn.depolarizing_length(alpha, 100 / alpha), rho).mat
    assert np.max(np.abs(far - np.eye(2) / 2)) <= 1e-10
    for l1, l2 in ((0.2, 0.5), (1.0, 3.0)):
        both = chn.compose(chn.depolarizing_length(alpha, l1), chn.depolarizing_length(alpha, l2))
        one = chn.depolarizing_length(alpha, l1 + l2)
        assert np.max(np.abs(chn.apply(both, rho).mat - chn.apply(one, rho).mat)) <= 1e-10
        assert np.max(np.abs(chn.choi_state(both).mat - chn.choi_state(one).mat)) <= 1e-10


def test_bloch_contraction():
    alpha, l = 0.4, 1.3
    rho = la.random_density_matrix((2,), seed=18)
    out = chn.apply(chn.depolarizing_length(alpha, l), rho).mat
    for s in chn.PAULI[1:]:
        assert np.isclose(np.trace(s @ out).real, math.exp(-alpha * l) * np.trace(s @ rho.mat).real)


# --- JSON ---------------------------------------------------------------------------


def test_json_roundtrip_and_shorthand():
    ch = chn.gad_channel(3, 0.2)
    back = chn.loads(chn.dumps(ch))
    assert all(np.allclose(a, b) for a, b in zip(back.kraus, ch.kraus))
    assert np.allclose(chn.choi_state(chn.from_json_dict({"family": "pauli", "p": [0.7, 0.1, 0.1, 0.1]})).mat,
                       chn.choi_state(chn.pauli_channel([0.7, 0.1, 0.1, 0.1])).mat)
    with pytest.raises(InvalidArgument, match="missing field"):
        chn.from_json_dict({"family": "gad", "d": 3})
    with pytest.raises(InvalidArgument, match="unknown"):
        chn.from_json_dict({"family": "nope"})
    with pytest.raises(InvalidArgument, match="dim_in"):
        chn.from_json_dict({"dim_in": 3, "kraus": [{"re": [[1, 0], [0, 1]]}]})
