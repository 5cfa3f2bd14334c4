import numpy as np
import pytest
from hypothesis import given, settings, strategies as hst

from noq import linalg as la
from noq.exceptions import DimensionError, DomainError, InvalidBasisError, ValidationError
from noq.states import bell_state, random_density, random_density_matrix, random_unitary


def rand_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_hilbert_schmidt_inner():
    assert abs(la.hilbert_schmidt_inner(np.eye(2), np.eye(2)) - 2) < 1e-14
    assert abs(la.hilbert_schmidt_inner(la.SIGMA_X, la.SIGMA_Y)) < 1e-14
    assert abs(la.hilbert_schmidt_inner(la.SIGMA_Z, np.diag([0.7, 0.3])) - 0.4) < 1e-14


def test_hilbert_schmidt_conjugate_symmetric(rng):
    a, b = rand_complex(rng, 3, 3), rand_complex(rng, 3, 3)
    assert abs(la.hilbert_schmidt_inner(a, b) - np.conj(la.hilbert_schmidt_inner(b, a))) < 1e-12


def test_hilbert_schmidt_shape_mismatch():
    with pytest.raises(DimensionError):
        la.hilbert_schmidt_inner(np.eye(2), np.eye(3))


def test_schatten_norm_examples(rng):
    assert abs(la.schatten_norm(np.eye(2), 1) - 2) < 1e-14
    assert abs(la.schatten_norm(np.diag([3.0, -4.0]), 2) - 5) < 1e-14
    assert abs(la.schatten_norm(np.diag([3.0, -4.0]), np.inf) - 4) < 1e-14
    h = rand_complex(rng, 4, 4)
    h = h + h.conj().T
    assert abs(la.schatten_norm(h, 1) - np.abs(np.linalg.eigvalsh(h)).sum()) < 1e-10


def test_schatten_norm_rejects_p_below_one():
    with pytest.raises(DomainError):
        la.schatten_norm(np.eye(2), 0.5)


def test_schatten_two_is_frobenius(rng):
    a = rand_complex(rng, 3, 5)
    assert abs(la.schatten_norm(a, 2) - np.linalg.norm(a)) < 1e-12


def test_trace_norm_unitary_invariance(rng):
    for seed in range(50):
        a = rand_complex(rng, 4, 4)
        u, v = random_unitary(4, seed), random_unitary(4, seed + 1000)
        assert abs(la.trace_norm(u @ a @ v) - la.trace_norm(a)) < 1e-9


def test_l1_norm_examples():
    assert abs(la.l1_norm(np.eye(2)) - 2) < 1e-14
    assert abs(la.l1_norm(la.SIGMA_X) - 2) < 1e-14
    _, v = np.linalg.eigh(la.SIGMA_X)
    assert abs(la.l1_norm(la.SIGMA_X, v) - 2) < 1e-12
    assert abs(la.l1_norm(la.SIGMA_X, v) - la.trace_norm(la.SIGMA_X)) < 1e-12


def test_l1_norm_product_basis_matches_kron(rng):
    a = rand_complex(rng, 6, 6)
    ua, ub = random_unitary(2, 1), random_unitary(3, 2)
    assert abs(la.l1_norm(a, (ua, ub)) - la.l1_norm(a, np.kron(ua, ub))) < 1e-12


def test_l1_norm_rejects_non_unitary():
    with pytest.raises(InvalidBasisError):
        la.l1_norm(np.eye(2), np.array([[1, 0], [0, 1 + 1e-8]]))


def test_l1_norm_basis_dimension_mismatch():
    with pytest.raises(DimensionError):
        la.l1_norm(np.eye(4), np.eye(2))


@settings(max_examples=200, deadline=None)
@given(hst.integers(1, 5), hst.integers(0, 2**32 - 1))
def test_l1_dominates_trace_norm(d, seed):
    rng = np.random.default_rng(seed)
    a = rand_complex(rng, d, d)
    u = random_unitary(d, rng)
    assert la.l1_norm(a, u) >= la.trace_norm(a) - 1e-9


def test_l1_equals_trace_norm_in_eigenbasis_of_normal(rng):
    for seed in range(100):
        u = random_unitary(4, seed)
        w = rand_complex(rng, 4)
        a = u @ np.diag(w) @ u.conj().T
        assert abs(la.l1_norm(a, u) - la.trace_norm(a)) < 1e-9


def test_block_antidiagonal_trace_norm(rng):
    for _ in range(50):
        x, y = rand_complex(rng, 3, 2), rand_complex(rng, 2, 3)
        m = np.block([[np.zeros((3, 3)), x], [y, np.zeros((2, 2))]])
        assert abs(la.trace_norm(m) - la.trace_norm(x) - la.trace_norm(y)) < 1e-10


def test_partial_transpose_bell():
    pt = la.partial_transpose(bell_state().matrix, (2, 2))
    assert np.abs(np.linalg.eigvalsh(pt) - [-0.5, 0.5, 0.5, 0.5]).max() < 1e-12
    swap = np.eye(4)[[0, 2, 1, 3]]
    assert np.abs(pt - swap / 2).max() < 1e-14


def test_partial_transpose_product_state(rng):
    ra, rb = random_density_matrix(2, seed=1), random_density_matrix(3, seed=2)
    pt = la.partial_transpose(np.kron(ra, rb), (2, 3))
    assert np.abs(pt - np.kron(ra, rb.T)).max() < 1e-14
    assert np.linalg.eigvalsh(pt).min() > -1e-12


@pytest.mark.parametrize("side", ["A", "B"])
def test_partial_transpose_involution_trace_hermiticity(side):
    for seed in range(20):
        rho = random_density(3, 2, seed=seed).matrix
        pt = la.partial_transpose(rho, (3, 2), side)
        assert np.abs(la.partial_transpose(pt, (3, 2), side) - rho).max() < 1e-14
        assert abs(np.trace(pt) - np.trace(rho)) < 1e-12
        assert np.abs(pt - pt.conj().T).max() < 1e-12


def test_partial_transpose_sides_related_by_full_transpose():
    rho = random_density(2, 3, seed=5).matrix
    assert np.abs(la.partial_transpose(rho, (2, 3), "A") - la.partial_transpose(rho, (2, 3), "B").T).max() < 1e-14


def test_partial_transpose_dimension_error():
    with pytest.raises(DimensionError):
        la.partial_transpose(np.eye(6), (2, 2))


def test_partial_trace_examples():
    ra, rb = random_density_matrix(2, seed=1), random_density_matrix(3, seed=2)
    assert np.abs(la.partial_trace(np.kron(ra, rb), (2, 3), "A") - ra).max() < 1e-14
    assert np.abs(la.partial_trace(np.kron(ra, rb), (2, 3), "B") - rb).max() < 1e-14
    assert np.abs(la.partial_trace(bell_state().matrix, (2, 2)) - np.eye(2) / 2).max() < 1e-14


def test_partial_trace_against_block_sum(rng):
    rho = random_density(3, 4, seed=3).matrix
    ref = np.array([[np.trace(rho[4 * i: 4 * i + 4, 4 * j: 4 * j + 4]) for j in range(3)] for i in range(3)])
    assert np.abs(la.partial_trace(rho, (3, 4), "A") - ref).max() < 1e-14
    s = random_density(3, 4, seed=4).matrix
    mix = 0.3 * rho + 0.7 * s
    lin = 0.3 * la.partial_trace(rho, (3, 4), "B") + 0.7 * la.partial_trace(s, (3, 4), "B")
    assert np.abs(la.partial_trace(mix, (3, 4), "B") - lin).max() < 1e-14


def test_block_extract():
    rho = bell_state().matrix
    b = la.block(rho, (2, 2), np.eye(2), 0, 1)
    assert np.abs(b - np.array([[0, 0.5], [0, 0]])).max() < 1e-14
    u = random_unitary(2, 7)
    assert np.abs(la.block(rho, (2, 2), u, 0, 1) - la.block(rho, (2, 2), u, 1, 0).conj().T).max() < 1e-14
    assert abs(sum(np.trace(la.block(rho, (2, 2), u, i, i)) for i in range(2)) - 1) < 1e-14


def test_block_extract_out_of_range():
    with pytest.raises(IndexError):
        la.block(np.eye(4) / 4, (2, 2), np.eye(2), 2, 0)


def test_blocks_batched_matches_single():
    rho = random_density(2, 3, seed=1).matrix
    us = np.stack([random_unitary(2, s) for s in range(5)])
    b = la.blocks(rho, (2, 3), us)
    for k in range(5):
        for i in range(2):
            for j in range(2):
                assert np.abs(b[k, i, j] - la.block(rho, (2, 3), us[k], i, j)).max() < 1e-14


def test_hermitize_guard():
    a = np.array([[1, 1e-12], [0, 1]])
    assert np.abs(la.hermitize(a) - la.hermitize(a).conj().T).max() == 0
    with pytest.raises(ValidationError) as exc:
        la.hermitize(np.array([[1, 1e-6], [0, 1]]))
    assert exc.value.invariant == "hermitian"


def test_as_matrix_rejects_nonfinite():
    with pytest.raises(ValidationError):
        la.as_matrix(np.array([[np.nan, 0], [0, 1]]))


def test_dephase_idempotent_and_trace_preserving():
    rho = random_density(2, 3, seed=9).matrix
    ua, ub = random_unitary(2, 1), random_unitary(3, 2)
    d = la.dephase(rho, (2, 3), ua, ub)
    assert np.abs(la.dephase(d, (2, 3), ua, ub) - d).max() < 1e-14
    assert abs(np.trace(d) - 1) < 1e-14


def test_relative_entropy_basics():
    rho = random_density_matrix(4, seed=1)
    assert abs(la.relative_entropy(rho, rho)) < 1e-10
    assert la.relative_entropy(rho, random_density_matrix(4, seed=2)) > 0
    assert la.relative_entropy(rho, np.diag([1.0, 0, 0, 0])) == np.inf
    assert abs(la.relative_entropy(rho, np.eye(4) / 4) - (2 - la.von_neumann_entropy(rho))) < 1e-10
