import numpy as np
import pytest

from noq import channels as ch
from noq import linalg as la
from noq import states as st
from noq.exceptions import DomainError, NumericalError, ValidationError


def test_trace_preservation_is_validated():
    with pytest.raises(ValidationError) as exc:
        ch.QubitChannel((np.eye(2) * 1.01,))
    assert exc.value.invariant == "trace preservation"


def test_pauli_channel_examples():
    assert np.abs(ch.t_matrix(ch.pauli_channel(1, 0, 0, 0)) - np.eye(4)).max() < 1e-12
    dep = ch.pauli_channel(0.25, 0.25, 0.25, 0.25)
    assert np.abs(dep(st.random_density_matrix(2, seed=1)) - np.eye(2) / 2).max() < 1e-12
    assert np.abs(ch.t_matrix(ch.pauli_channel(0.5, 0.5, 0, 0)) - np.diag([1, 1, 0, 0])).max() < 1e-12


def test_pauli_channel_bloch_action(rng):
    for _ in range(20):
        p = rng.dirichlet(np.ones(4))
        t = ch.t_matrix(ch.pauli_channel(*p))
        lam = [p[0] + p[1] - p[2] - p[3], p[0] - p[1] + p[2] - p[3], p[0] - p[1] - p[2] + p[3]]
        assert np.abs(t - np.diag([1, *lam])).max() < 1e-12


def test_pauli_channel_is_unital_and_self_dual(rng):
    c = ch.pauli_channel(*rng.dirichlet(np.ones(4)))
    assert c.is_unital()
    x = st.random_density_matrix(2, seed=3)
    assert np.abs(c(x) - c.dual(x)).max() < 1e-12


def test_amplitude_damping_t_matrix():
    for g in (0.0, 0.36, 0.9):
        s = np.sqrt(1 - g)
        ref = np.array([[1, 0, 0, 0], [0, s, 0, 0], [0, 0, s, 0], [g, 0, 0, 1 - g]])
        assert np.abs(ch.t_matrix(ch.amplitude_damping(g)) - ref).max() < 1e-12
    with pytest.raises(DomainError):
        ch.amplitude_damping(1.2)


def test_t_matrix_round_trip_with_kraus():
    for seed in range(30):
        c = ch.random_channel(3, seed)
        t = ch.t_matrix(c)
        assert np.abs(t[0] - [1, 0, 0, 0]).max() < 1e-10
        x = st.random_density_matrix(2, seed=seed + 100)
        assert np.abs(ch.apply_via_t(t, x) - c(x)).max() < 1e-10
        assert np.abs(ch.dual_t_matrix(c) - t.T).max() < 1e-12
        assert np.abs(c.dual(np.eye(2)) - np.eye(2)).max() < 1e-10


def test_rotation_lift_round_trip():
    for seed in range(30):
        u = st.random_unitary(2, seed)
        r = ch.rotation_of_unitary(u)
        assert abs(np.linalg.det(r) - 1) < 1e-12
        assert np.abs(ch.rotation_of_unitary(ch.unitary_of_rotation(r)) - r).max() < 1e-12


def test_canonical_form_amplitude_damping():
    f = ch.canonical_form(ch.amplitude_damping(0.36))
    assert np.abs(f.lam - [0.8, 0.8, 0.64]).max() < 1e-12
    assert np.abs(f.t - [0, 0, 0.36]).max() < 1e-12


def test_canonical_form_pauli_channel_is_already_canonical():
    f = ch.canonical_form(ch.pauli_channel(0.7, 0.2, 0.06, 0.04))
    assert np.abs(f.t).max() < 1e-12
    assert np.abs(np.sort(np.abs(f.lam)) - np.sort([0.8, 0.52, 0.48])).max() < 1e-12


def test_canonical_form_unitary_channel():
    for seed in range(10):
        f = ch.canonical_form(ch.unitary_channel(st.random_unitary(2, seed)))
        assert np.abs(np.abs(f.lam) - 1).max() < 1e-10
        assert np.abs(f.t).max() < 1e-10


def test_canonical_form_reconstructs_random_channels():
    for seed in range(50):
        c = ch.random_channel(1 + seed % 4, seed)
        f = ch.canonical_form(c)
        assert np.abs(f.reconstruct() - ch.t_matrix(c)).max() < 1e-8
        assert np.abs(f.lam).max() <= 1 + 1e-10
        assert f.lam[0] >= 0 and f.lam[1] >= 0
        # W_{U_A} o channel o W_{U_B} is canonical
        tu_a = ch.t_matrix(ch.unitary_channel(f.u_a))
        tu_b = ch.t_matrix(ch.unitary_channel(f.u_b))
        assert np.abs(tu_a @ ch.t_matrix(c) @ tu_b - f.canonical_t()).max() < 1e-8


def test_canonical_form_errors():
    with pytest.raises(DomainError):
        ch.canonical_form(np.diag([2.0, 1, 1, 1]))
    with pytest.raises(NumericalError):
        ch.canonical_form(np.full((4, 4), np.nan))


def test_channel_to_state_examples():
    assert np.abs(ch.channel_to_state(ch.identity_channel()).matrix - st.bell_state().matrix).max() < 1e-14
    p = [0.4, 0.3, 0.2, 0.1]
    assert np.abs(ch.channel_to_state(ch.pauli_channel(*p)).matrix - st.bell_diagonal(*p).matrix).max() < 1e-12


def test_channel_state_round_trips():
    for seed in range(30):
        c = ch.random_channel(4, seed) if seed % 2 else ch.random_unital_channel(3, seed)
        rho = ch.channel_to_state(c)
        assert np.abs(rho.reduced("A") - np.eye(2) / 2).max() < 1e-14
        c2 = ch.state_to_channel(rho)
        assert np.abs(ch.t_matrix(c2) - ch.t_matrix(c)).max() < 1e-9
        assert np.abs(ch.channel_to_state(c2).matrix - rho.matrix).max() < 1e-9


def test_state_to_channel_rejects_mixed_marginal_violation():
    with pytest.raises(DomainError):
        ch.state_to_channel(st.random_density(2, 2, seed=1))


def test_correlation_t_correspondence():
    for seed in range(100):
        c = ch.random_channel(1 + seed % 4, seed)
        r = st.correlation_matrix(ch.channel_to_state(c))
        t = ch.t_matrix(c)
        assert np.abs(r - ch.correlation_from_t(t)).max() < 1e-10
        assert np.abs(ch.t_from_correlation(r) - t).max() < 1e-10


def test_literal_half_sign_relation_fails_for_generic_channels():
    # R = 1/2 (-1)^{delta_mu2} T without the transpose is off by a factor two and a transpose
    c = ch.amplitude_damping(0.36)
    r = st.correlation_matrix(ch.channel_to_state(c))
    literal = 0.5 * np.diag([1, 1, -1, 1]) @ ch.t_matrix(c)
    assert np.abs(r - literal).max() > 0.1
    assert abs(r[0, 3] - 0.36) < 1e-12


def test_singular_values_of_r_and_t_blocks_agree():
    for seed in range(20):
        c = ch.random_channel(3, seed)
        r = st.correlation_matrix(ch.channel_to_state(c))
        assert np.abs(la.singular_values(r[1:, 1:]) - la.singular_values(ch.t_matrix(c)[1:, 1:])).max() < 1e-10
