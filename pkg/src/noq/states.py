"""Bipartite states: validation, standard families and random generators.

Random generators take ``seed`` as either an integer or a
:class:`numpy.random.Generator`.  For a fixed integer seed the output is
bit-identical across runs; the sampling algorithm (documented per function)
is part of the public contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import unitary_group

from . import linalg as la
from .exceptions import DimensionError, DomainError, ValidationError
from .linalg import Bipartition, DimsLike

STATE_TOL = 1e-10


@dataclass(frozen=True)
class DensityMatrix:
    """A validated bipartite density matrix with its ``A:B`` cut.

    Construct through :func:`make_density`; the stored matrix is read-only.
    """

    matrix: np.ndarray
    cut: Bipartition

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.matrix
        return self.matrix.astype(dtype)

    @property
    def dims(self) -> Bipartition:
        return self.cut

    @property
    def dim(self) -> int:
        return self.cut.total

    def reduced(self, keep: str = "A") -> np.ndarray:
        return la.partial_trace(self.matrix, self.cut, keep)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))


def _freeze(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=complex, copy=True)
    m.flags.writeable = False
    return m


def make_density(matrix, cut: DimsLike, tol: float = STATE_TOL) -> DensityMatrix:
    """Validate ``matrix`` as a state on ``cut`` and wrap it.

    Raises :class:`ValidationError` naming the violated invariant
    (``hermitian``, ``unit trace`` or ``positive semidefinite``).
    """
    if isinstance(matrix, DensityMatrix):
        matrix = matrix.matrix
    cut = la.as_bipartition(cut)
    m = la.as_square(matrix, "density matrix")
    if m.shape[0] != cut.total:
        raise DimensionError(f"matrix of size {m.shape[0]} does not match cut {tuple(cut)}")
    m = la.hermitize(m, tol)
    tr = np.trace(m).real
    if abs(tr - 1) > tol:
        raise ValidationError("unit trace", f"trace = {tr:.12g}")
    w_min = la.eigvalsh(m)[0]
    if w_min < -tol:
        raise ValidationError("positive semidefinite", f"min eigenvalue = {w_min:.3e}")
    return DensityMatrix(_freeze(m), cut)


def as_density(rho, cut: DimsLike | None = None) -> DensityMatrix:
    """Accept a :class:`DensityMatrix` or a raw matrix plus its cut."""
    if isinstance(rho, DensityMatrix):
        if cut is not None and tuple(la.as_bipartition(cut)) != tuple(rho.cut):
            raise DimensionError(f"state has cut {tuple(rho.cut)}, not {tuple(cut)}")
        return rho
    if cut is None:
        raise DimensionError("a raw matrix needs an explicit cut")
    return make_density(rho, cut)


def pure_state(ket, cut: DimsLike) -> DensityMatrix:
    v = np.asarray(ket, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    return make_density(np.outer(v, v.conj()), cut)


def product_state(rho_a, rho_b) -> DensityMatrix:
    rho_a = la.as_square(rho_a)
    rho_b = la.as_square(rho_b)
    return make_density(np.kron(rho_a, rho_b), (rho_a.shape[0], rho_b.shape[0]))


# --- two-qubit Bell states and Bell-diagonal states ---------------------------------

_S2 = 1 / np.sqrt(2)
BELL_KETS = {
    "phi+": np.array([_S2, 0, 0, _S2], dtype=complex),
    "psi+": np.array([0, _S2, _S2, 0], dtype=complex),
    "psi-": np.array([0, _S2, -_S2, 0], dtype=complex),
    "phi-": np.array([_S2, 0, 0, -_S2], dtype=complex),
}
# order of the probability vector (p0, p1, p2, p3)
BELL_ORDER = ("phi+", "psi+", "psi-", "phi-")
# (R00, R11, R22, R33) = BELL_SIGN_MATRIX @ (p0, p1, p2, p3)
BELL_SIGN_MATRIX = np.array(
    [[1, 1, 1, 1], [1, 1, -1, -1], [-1, 1, -1, 1], [1, -1, -1, 1]], dtype=float
)


def bell_state(name: str = "phi+") -> DensityMatrix:
    try:
        ket = BELL_KETS[name]
    except KeyError:
        raise ValueError(f"unknown Bell state {name!r}; choose from {BELL_ORDER}") from None
    return pure_state(ket, (2, 2))


def _probability_vector(p, n: int | None = None, tol: float = STATE_TOL) -> np.ndarray:
    p = np.asarray(p, dtype=float).reshape(-1)
    if n is not None and p.size != n:
        raise DomainError(f"expected {n} probabilities, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise DomainError("probabilities must be finite")
    if p.min(initial=0.0) < -tol:
        raise DomainError(f"negative probability {p.min():.3e}")
    if abs(p.sum() - 1) > tol:
        raise DomainError(f"probabilities sum to {p.sum():.12g}, not 1")
    return np.clip(p, 0, None)


def bell_diagonal(p0: float, p1: float, p2: float, p3: float) -> DensityMatrix:
    """``p0 phi+ + p1 psi+ + p2 psi- + p3 phi-``."""
    p = _probability_vector([p0, p1, p2, p3], 4)
    m = sum(pk * np.outer(BELL_KETS[name], BELL_KETS[name].conj()) for pk, name in zip(p, BELL_ORDER))
    return make_density(m, (2, 2))


def bell_probabilities(r11: float, r22: float, r33: float) -> np.ndarray:
    """Invert the sign map: Bell weights from the diagonal correlations."""
    return BELL_SIGN_MATRIX.T @ np.array([1.0, r11, r22, r33]) / 4


def tetrahedron_violation(r11: float, r22: float, r33: float) -> float:
    """Largest violation of the Bell-diagonal validity inequalities (<= 0 if valid)."""
    return float(-bell_probabilities(r11, r22, r33).min() * 4)


def bell_diagonal_from_correlations(r11: float, r22: float, r33: float) -> DensityMatrix:
    if tetrahedron_violation(r11, r22, r33) > STATE_TOL:
        raise DomainError(f"(R11, R22, R33) = {(r11, r22, r33)} lies outside the Bell-diagonal tetrahedron")
    p = np.clip(bell_probabilities(r11, r22, r33), 0, None)
    return bell_diagonal(*(p / p.sum()))


# --- Werner and isotropic families ------------------------------------------------


def swap_operator(d: int) -> np.ndarray:
    """``W = sum_ij |i><j| (x) |j><i|``."""
    w = np.zeros((d, d, d, d))
    i, j = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    w[i, j, j, i] = 1
    return w.reshape(d * d, d * d).astype(complex)


def maximally_entangled(d: int) -> np.ndarray:
    """Projector onto ``d^-1/2 sum_i |ii>``."""
    v = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    return np.outer(v, v.conj())


def werner(d: int, beta: float) -> DensityMatrix:
    """``(I + beta W) / (d^2 + d beta)`` for ``|beta| <= 1``."""
    d = int(d)
    if d < 2:
        raise DomainError(f"Werner states need d >= 2, got {d}")
    if not abs(beta) <= 1:
        raise DomainError(f"Werner parameter must satisfy |beta| <= 1, got {beta}")
    m = (np.eye(d * d) + beta * swap_operator(d)) / (d * d + d * beta)
    return make_density(m, (d, d))


def isotropic(d: int, lam: float) -> DensityMatrix:
    """``lam Phi + (1 - lam)/(d^2 - 1) (I - Phi)`` for ``0 <= lam <= 1``."""
    d = int(d)
    if d < 2:
        raise DomainError(f"isotropic states need d >= 2, got {d}")
    if not 0 <= lam <= 1:
        raise DomainError(f"isotropic parameter must lie in [0, 1], got {lam}")
    phi = maximally_entangled(d)
    m = lam * phi + (1 - lam) / (d * d - 1) * (np.eye(d * d) - phi)
    return make_density(m, (d, d))


# --- maximally correlated, CQ and CC states ---------------------------------------


@dataclass(frozen=True)
class MCSCoefficients:
    """``tau = sum_ij tau_ij |a_i><a_j| (x) |b_i><b_j|``.

    ``basis_a``/``basis_b`` are unitaries whose first ``n`` columns carry the
    correlated vectors, ``n = tau.shape[0]``.
    """

    tau: np.ndarray
    basis_a: np.ndarray
    basis_b: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        tau = la.as_square(self.tau, "tau")
        ua = la.check_unitary(self.basis_a)
        ub = la.check_unitary(self.basis_b)
        n = tau.shape[0]
        if n > min(ua.shape[0], ub.shape[0]):
            raise DimensionError(
                f"{n} correlated levels do not fit in dimensions {(ua.shape[0], ub.shape[0])}"
            )
        tau = la.hermitize(tau, STATE_TOL)
        diag = tau.diagonal().real
        if abs(diag.sum() - 1) > STATE_TOL:
            raise ValidationError("unit trace", f"sum tau_ii = {diag.sum():.12g}")
        if diag.min() < -STATE_TOL:
            raise ValidationError("nonnegative diagonal", f"min tau_ii = {diag.min():.3e}")
        w_min = la.eigvalsh(tau)[0]
        if w_min < -STATE_TOL:
            raise ValidationError("positive semidefinite", f"min eigenvalue of tau = {w_min:.3e}")
        object.__setattr__(self, "tau", _freeze(tau))
        object.__setattr__(self, "basis_a", _freeze(ua))
        object.__setattr__(self, "basis_b", _freeze(ub))
        object.__setattr__(self, "n", n)

    @property
    def cut(self) -> Bipartition:
        return Bipartition(self.basis_a.shape[0], self.basis_b.shape[0])


def mcs_to_density(coeffs: MCSCoefficients, dims: DimsLike | None = None) -> DensityMatrix:
    cut = coeffs.cut
    if dims is not None and tuple(la.as_bipartition(dims)) != tuple(cut):
        raise DimensionError(f"MCS bases span {tuple(cut)}, not {tuple(dims)}")
    n = coeffs.n
    # columns |a_i> (x) |b_i>, i < n
    w = np.einsum("ai,bi->abi", coeffs.basis_a[:, :n], coeffs.basis_b[:, :n]).reshape(cut.total, n)
    return make_density(w @ coeffs.tau @ w.conj().T, cut)


def cq_state(probabilities: Sequence[float], basis_a, sigmas_b) -> DensityMatrix:
    """``sum_k p_k |a_k><a_k| (x) sigma_k``; classical on A in ``basis_a``."""
    ua = la.check_unitary(basis_a)
    p = _probability_vector(probabilities, ua.shape[0])
    sigmas = [make_density(s, (1, np.shape(s)[0])).matrix for s in sigmas_b]
    if len(sigmas) != ua.shape[0]:
        raise DimensionError(f"need {ua.shape[0]} conditional states, got {len(sigmas)}")
    d_b = sigmas[0].shape[0]
    if any(s.shape[0] != d_b for s in sigmas):
        raise DimensionError("conditional states must share one dimension")
    m = sum(pk * np.kron(np.outer(ua[:, k], ua[:, k].conj()), s) for k, (pk, s) in enumerate(zip(p, sigmas)))
    return make_density(m, (ua.shape[0], d_b))


def cc_state(joint_probabilities, basis_a, basis_b) -> DensityMatrix:
    """``sum_kl p_kl |a_k b_l><a_k b_l|``."""
    ua = la.check_unitary(basis_a)
    ub = la.check_unitary(basis_b)
    p = np.asarray(joint_probabilities, dtype=float)
    if p.shape != (ua.shape[0], ub.shape[0]):
        raise DimensionError(f"joint distribution of shape {p.shape} for dims {(ua.shape[0], ub.shape[0])}")
    p = _probability_vector(p).reshape(p.shape)
    u = np.kron(ua, ub)
    return make_density(u @ np.diag(p.reshape(-1)) @ u.conj().T, (ua.shape[0], ub.shape[0]))


# --- Pauli-basis descriptions of qubits ----------------------------------------------


def correlation_matrix(rho) -> np.ndarray:
    """``R_{mu nu} = Tr[(sigma_mu (x) sigma_nu) rho]`` for a two-qubit state."""
    m = np.asarray(rho.matrix if isinstance(rho, DensityMatrix) else rho, dtype=complex)
    if m.shape != (4, 4):
        raise DimensionError(f"correlation matrix needs a two-qubit operator, got shape {m.shape}")
    t = m.reshape(2, 2, 2, 2)
    # Tr[(s_mu (x) s_nu) rho] = sum s_mu[b,a] s_nu[d,c] rho[a,c,b,d]
    r = np.einsum("mba,ndc,acbd->mn", la.PAULIS, la.PAULIS, t)
    return r.real.copy()


def from_correlation_matrix(r) -> np.ndarray:
    """Operator ``1/4 sum_{mu nu} R_{mu nu} sigma_mu (x) sigma_nu`` (unvalidated)."""
    r = np.asarray(r, dtype=float)
    if r.shape != (4, 4):
        raise DimensionError(f"expected a 4x4 correlation matrix, got {r.shape}")
    ops = np.einsum("mab,ncd->mnacbd", la.PAULIS, la.PAULIS).reshape(4, 4, 4, 4)
    return np.einsum("mn,mnij->ij", r, ops) / 4


def bloch_vector(rho) -> np.ndarray:
    m = la.as_square(rho)
    if m.shape != (2, 2):
        raise DimensionError(f"Bloch vector needs a qubit operator, got shape {m.shape}")
    return np.einsum("kij,ji->k", la.PAULIS[1:], m).real


def from_bloch(n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    return (np.eye(2) + np.einsum("k,kij->ij", n, la.PAULIS[1:])) / 2


# --- random generators ---------------------------------------------------------------


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-random ``d x d`` unitary."""
    if d == 1:
        return np.exp(2j * np.pi * _rng(seed).random()).reshape(1, 1)
    return unitary_group.rvs(d, random_state=_rng(seed))


def random_ket(d: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_density_matrix(d: int, rank: int | None = None, seed=None) -> np.ndarray:
    """Induced-measure density matrix ``G G^dagger / Tr`` with ``G`` a
    ``d x rank`` complex Ginibre matrix (real, then imaginary parts drawn
    from ``standard_normal``).  Full rank gives the Hilbert-Schmidt measure."""
    rank = d if rank is None else int(rank)
    if not 1 <= rank <= d:
        raise DomainError(f"rank must lie in [1, {d}], got {rank}")
    rng = _rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_density(d_a: int, d_b: int, rank: int | None = None, seed=None) -> DensityMatrix:
    """Random bipartite state: partial trace of a random pure state on an
    environment of dimension ``rank`` (see :func:`random_density_matrix`)."""
    return make_density(random_density_matrix(d_a * d_b, rank, seed), (d_a, d_b))


def random_pure_product(d_a: int, d_b: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    return np.kron(random_ket(d_a, rng), random_ket(d_b, rng))


def random_separable(d_a: int, d_b: int, k: int = 8, seed=None) -> DensityMatrix:
    """Convex mixture of ``k`` random pure product states with
    Dirichlet(1, ..., 1) weights."""
    rng = _rng(seed)
    w = rng.dirichlet(np.ones(k))
    m = np.zeros((d_a * d_b, d_a * d_b), dtype=complex)
    for wk in w:
        v = random_pure_product(d_a, d_b, rng)
        m += wk * np.outer(v, v.conj())
    return make_density(m, (d_a, d_b))


def random_mcs(d_a: int, d_b: int, n: int | None = None, seed=None) -> MCSCoefficients:
    """Random MCS coefficients: Hilbert-Schmidt ``tau`` in Haar-random bases."""
    rng = _rng(seed)
    n = min(d_a, d_b) if n is None else n
    tau = random_density_matrix(n, seed=rng)
    return MCSCoefficients(tau, random_unitary(d_a, rng), random_unitary(d_b, rng))


def random_cq(d_a: int, d_b: int, seed=None) -> tuple[DensityMatrix, np.ndarray]:
    """Random CQ state and the basis of A in which it is classical."""
    rng = _rng(seed)
    ua = random_unitary(d_a, rng)
    p = rng.dirichlet(np.ones(d_a))
    sig = [random_density_matrix(d_b, seed=rng) for _ in range(d_a)]
    return cq_state(p, ua, sig), ua


def random_cc(d_a: int, d_b: int, seed=None) -> tuple[DensityMatrix, np.ndarray, np.ndarray]:
    rng = _rng(seed)
    ua = random_unitary(d_a, rng)
    ub = random_unitary(d_b, rng)
    p = rng.dirichlet(np.ones(d_a * d_b)).reshape(d_a, d_b)
    return cc_state(p, ua, ub), ua, ub


def random_tetrahedron_point(seed=None) -> np.ndarray:
    """Uniform Bell weights mapped to ``(R11, R22, R33)``."""
    p = _rng(seed).dirichlet(np.ones(4))
    return (BELL_SIGN_MATRIX @ p)[1:]
