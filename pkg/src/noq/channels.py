"""Qubit channels, their real 4x4 representation and canonical form.

For a Hermiticity-preserving map ``Omega`` on a qubit we use

    T[mu, nu] = 1/2 Tr(sigma_mu Omega[sigma_nu])

so that Bloch 4-vectors ``(1, n1, n2, n3)`` transform as ``n -> T n`` and
``T[0, 0] = 1`` for trace-preserving maps.  The dual map is represented
by ``T.T``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.spatial.transform import Rotation

from . import linalg as la
from .exceptions import DimensionError, DomainError, NumericalError, ValidationError
from .states import (
    DensityMatrix,
    _probability_vector,
    _rng,
    correlation_matrix,
    make_density,
    random_unitary,
)

CHANNEL_TOL = 1e-10
MARGINAL_TOL = 1e-8
# R = CORRELATION_SIGNS @ T.T links a channel to its Choi state
CORRELATION_SIGNS = np.diag([1.0, 1.0, -1.0, 1.0])


@dataclass(frozen=True)
class QubitChannel:
    """A CPTP map on one qubit given by Kraus operators."""

    kraus: tuple

    def __post_init__(self):
        ks = tuple(la.as_square(k, "Kraus operator") for k in self.kraus)
        if not ks:
            raise ValidationError("non-empty Kraus list")
        if any(k.shape != (2, 2) for k in ks):
            raise DimensionError("qubit channels need 2x2 Kraus operators")
        s = sum(k.conj().T @ k for k in ks)
        err = np.abs(s - np.eye(2)).max()
        if err > CHANNEL_TOL:
            raise ValidationError("trace preservation", f"max |sum K^dagger K - I| = {err:.3e}")
        for k in ks:
            k.flags.writeable = False
        object.__setattr__(self, "kraus", ks)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return sum(k @ x @ k.conj().T for k in self.kraus)

    def dual(self, x) -> np.ndarray:
        """Heisenberg-picture map ``sum_i K_i^dagger x K_i``."""
        x = np.asarray(x, dtype=complex)
        return sum(k.conj().T @ x @ k for k in self.kraus)

    def is_unital(self, tol: float = CHANNEL_TOL) -> bool:
        return bool(np.abs(self(np.eye(2)) - np.eye(2)).max() <= tol)


def identity_channel() -> QubitChannel:
    return QubitChannel((np.eye(2),))


def unitary_channel(v) -> QubitChannel:
    return QubitChannel((la.check_unitary(v, 2),))


def pauli_channel(p0: float, p1: float, p2: float, p3: float) -> QubitChannel:
    """``X -> sum_mu p_mu sigma_mu X sigma_mu``."""
    p = _probability_vector([p0, p1, p2, p3], 4)
    return QubitChannel(tuple(np.sqrt(pk) * s for pk, s in zip(p, la.PAULIS)))


def amplitude_damping(gamma: float) -> QubitChannel:
    if not 0 <= gamma <= 1:
        raise DomainError(f"damping probability must lie in [0, 1], got {gamma}")
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]])
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]])
    return QubitChannel((k0, k1))


def random_channel(n_kraus: int = 4, seed=None) -> QubitChannel:
    """Kraus operators cut from a Haar-random isometry ``C^2 -> C^(2 n_kraus)``."""
    u = random_unitary(2 * n_kraus, _rng(seed))
    iso = u[:, :2]
    return QubitChannel(tuple(iso[2 * k: 2 * k + 2] for k in range(n_kraus)))


def random_unital_channel(n_terms: int = 4, seed=None) -> QubitChannel:
    """Mixture of Haar-random unitary conjugations."""
    rng = _rng(seed)
    w = rng.dirichlet(np.ones(n_terms))
    return QubitChannel(tuple(np.sqrt(wk) * random_unitary(2, rng) for wk in w))


# --- real representation -------------------------------------------------------------


def t_matrix_of_map(omega: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """``T[mu, nu] = 1/2 Tr(sigma_mu omega[sigma_nu])`` for any linear map."""
    out = np.empty((4, 4))
    for nu, s in enumerate(la.PAULIS):
        img = np.asarray(omega(s), dtype=complex)
        out[:, nu] = 0.5 * np.einsum("mij,ji->m", la.PAULIS, img).real
    return out


def t_matrix(channel: QubitChannel) -> np.ndarray:
    return t_matrix_of_map(channel)


def dual_t_matrix(channel: QubitChannel) -> np.ndarray:
    return t_matrix_of_map(channel.dual)


def bloch4(x) -> np.ndarray:
    """``(Tr sigma_mu x)_mu`` for a Hermitian qubit operator."""
    return np.einsum("mij,ji->m", la.PAULIS, np.asarray(x, dtype=complex)).real


def apply_via_t(t, x) -> np.ndarray:
    """Act with the map represented by ``t`` on the qubit operator ``x``."""
    t = np.asarray(t, dtype=float)
    if t.shape != (4, 4):
        raise DimensionError(f"expected a 4x4 T matrix, got {t.shape}")
    n = t @ bloch4(x)
    return np.einsum("m,mij->ij", n, la.PAULIS) / 2


def rotation_of_unitary(u) -> np.ndarray:
    """SO(3) matrix ``R`` with ``u sigma_j u^dagger = sum_i R[i, j] sigma_i``."""
    return t_matrix_of_map(lambda x: u @ x @ u.conj().T)[1:, 1:]


def unitary_of_rotation(r) -> np.ndarray:
    """Lift a rotation to SU(2) through the double cover."""
    x, y, z, w = Rotation.from_matrix(np.asarray(r, dtype=float)).as_quat()
    return w * la.SIGMA_0 - 1j * (x * la.SIGMA_X + y * la.SIGMA_Y + z * la.SIGMA_Z)


@dataclass(frozen=True)
class CanonicalForm:
    """``Gamma = W_{U_A^dagger} o Gamma' o W_{U_B^dagger}`` with ``Gamma'``
    represented by ``[[1, 0], [t, diag(lam)]]``.

    ``lam[0], lam[1] >= 0``; the sign of ``det`` of the 3x3 block sits in
    ``lam[2]``.
    """

    u_a: np.ndarray
    u_b: np.ndarray
    t: np.ndarray
    lam: np.ndarray

    def canonical_t(self) -> np.ndarray:
        out = np.zeros((4, 4))
        out[0, 0] = 1
        out[1:, 0] = self.t
        out[1:, 1:] = np.diag(self.lam)
        return out

    def reconstruct(self) -> np.ndarray:
        """T matrix of the original channel."""
        ra = np.eye(4)
        rb = np.eye(4)
        ra[1:, 1:] = rotation_of_unitary(self.u_a)
        rb[1:, 1:] = rotation_of_unitary(self.u_b)
        return ra.T @ self.canonical_t() @ rb.T


def canonical_form(channel: QubitChannel | np.ndarray) -> CanonicalForm:
    """Find ``U_A, U_B`` putting ``W_{U_A} o channel o W_{U_B}`` in canonical form."""
    t = t_matrix(channel) if isinstance(channel, QubitChannel) else np.asarray(channel, dtype=float)
    if t.shape != (4, 4) or not np.all(np.isfinite(t)):
        raise NumericalError("canonical form needs a finite 4x4 T matrix", {"shape": t.shape})
    if np.abs(t[0] - [1, 0, 0, 0]).max() > CHANNEL_TOL:
        raise DomainError("canonical form is defined for trace-preserving maps")
    block = t[1:, 1:]
    try:
        o1, s, o2t = np.linalg.svd(block)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("SVD of the 3x3 block failed", {"block": block.tolist(), "error": str(exc)}) from exc
    lam = s.copy()
    if np.linalg.det(o1) < 0:
        o1[:, 2] *= -1
        lam[2] *= -1
    o2 = o2t.T
    if np.linalg.det(o2) < 0:
        o2[:, 2] *= -1
        lam[2] *= -1
    t_can = o1.T @ t[1:, 0]
    if t_can[2] < 0:
        # a pi rotation about x on both sides keeps lam and flips t_3
        flip = np.diag([1.0, -1.0, -1.0])
        o1, o2, t_can = o1 @ flip, o2 @ flip, flip @ t_can
    # rotation(U_A) = o1^T and rotation(U_B) = o2, so that o1^T block o2 = diag(lam)
    u_a = unitary_of_rotation(o1.T)
    u_b = unitary_of_rotation(o2)
    form = CanonicalForm(u_a, u_b, t_can, lam)
    err = np.abs(form.reconstruct() - t).max()
    if err > 1e-8:
        raise NumericalError("canonical form does not reconstruct the channel", {"max_error": err, "singular_values": s.tolist()})
    return form


# --- channel <-> state ---------------------------------------------------------------


def channel_to_state(channel: QubitChannel) -> DensityMatrix:
    """Choi state ``(I_A (x) channel)[phi+]``."""
    out = np.zeros((2, 2, 2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[i, j] = 1
            out[i, :, j, :] = channel(e) / 2
    return make_density(out.reshape(4, 4), (2, 2))


def state_to_channel(rho) -> QubitChannel:
    """Unique channel with ``rho = (I (x) channel)[phi+]``; needs ``rho_A = I/2``."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else make_density(rho, (2, 2)).matrix
    if m.shape != (4, 4):
        raise DimensionError("state_to_channel needs a two-qubit state")
    marg = la.partial_trace(m, (2, 2), "A")
    err = np.abs(marg - np.eye(2) / 2).max()
    if err > MARGINAL_TOL:
        raise DomainError(f"marginal on A is not maximally mixed (max deviation {err:.3e})")
    w, v = la.eigh(2 * m)
    ks = [np.sqrt(wk) * v[:, k].reshape(2, 2).T for k, wk in enumerate(w) if wk > 1e-14]
    # absorb the residual marginal error so the Kraus set is exactly trace preserving
    s = sum(k.conj().T @ k for k in ks)
    ws, vs = la.eigh(s)
    s_inv_half = vs @ np.diag(ws**-0.5) @ vs.conj().T
    return QubitChannel(tuple(k @ s_inv_half for k in ks))


def correlation_from_t(t) -> np.ndarray:
    """Correlation matrix of the Choi state of the map represented by ``t``.

    ``R[mu, nu] = (-1)^{delta_{mu 2}} T[nu, mu]``: the row index of ``R``
    refers to the reference qubit, which enters through the channel input.
    """
    return CORRELATION_SIGNS @ np.asarray(t, dtype=float).T


def t_from_correlation(r) -> np.ndarray:
    return (CORRELATION_SIGNS @ np.asarray(r, dtype=float)).T


def choi_correlation_matrix(channel: QubitChannel) -> np.ndarray:
    return correlation_matrix(channel_to_state(channel))


def channel_from_kraus_list(kraus: Sequence) -> QubitChannel:
    return QubitChannel(tuple(np.asarray(k, dtype=complex) for k in kraus))
