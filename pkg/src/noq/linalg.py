"""Dense complex linear algebra used by every measure.

All spectral work goes through two primitives, :func:`eigh` (Hermitian
eigendecomposition) and :func:`singular_values`, both thin wrappers over
LAPACK via numpy.  Matrices are plain ``complex128`` arrays; a bipartite
operator on ``A (x) B`` uses the index ordering ``|i>_A|j>_B -> i*d_B + j``.

A *local basis* is represented by the unitary whose columns are the basis
vectors.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence, Union

import numpy as np

from .exceptions import DimensionError, DomainError, InvalidBasisError, ValidationError

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-10

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = np.stack([SIGMA_0, SIGMA_X, SIGMA_Y, SIGMA_Z])
PAULIS.flags.writeable = False


class Bipartition(NamedTuple):
    """The ``A:B`` cut of a bipartite operator."""

    dim_a: int
    dim_b: int

    @property
    def total(self) -> int:
        return self.dim_a * self.dim_b


DimsLike = Union[Bipartition, Sequence[int]]


def as_bipartition(dims: DimsLike) -> Bipartition:
    if isinstance(dims, Bipartition):
        return dims
    try:
        dim_a, dim_b = (int(d) for d in dims)
    except (TypeError, ValueError) as exc:
        raise DimensionError(f"expected a pair of dimensions, got {dims!r}") from exc
    if dim_a < 1 or dim_b < 1:
        raise DimensionError(f"dimensions must be positive, got {(dim_a, dim_b)}")
    return Bipartition(dim_a, dim_b)


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D complex128 array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("finite entries", f"{name} contains NaN or Inf")
    return m


def as_square(a, name: str = "matrix") -> np.ndarray:
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def _check_cut(m: np.ndarray, dims: DimsLike) -> Bipartition:
    cut = as_bipartition(dims)
    if m.shape != (cut.total, cut.total):
        raise DimensionError(
            f"matrix of shape {m.shape} does not match the cut {tuple(cut)}"
        )
    return cut


def dagger(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a, -1, -2).conj()


def hermitize(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Symmetrize a matrix declared Hermitian.

    Asymmetry up to ``tol`` (max-abs of ``A - A^dagger``) is treated as
    rounding and removed via ``(A + A^dagger)/2``; anything larger raises.
    """
    m = as_square(a)
    asym = np.abs(m - m.conj().T).max() if m.size else 0.0
    if asym > tol:
        raise ValidationError("hermitian", f"max |A - A^dagger| = {asym:.3e}")
    return (m + m.conj().T) / 2


def eigh(a):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix."""
    return np.linalg.eigh(a)


def eigvalsh(a) -> np.ndarray:
    return np.linalg.eigvalsh(a)


def singular_values(a) -> np.ndarray:
    """Singular values, descending; works on stacks of matrices."""
    return np.linalg.svd(a, compute_uv=False)


def hilbert_schmidt_inner(a, b) -> complex:
    """``Tr(a^dagger b)``."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def schatten_norm(a, p: float = 1) -> float:
    """Schatten ``p``-norm ``(sum_i s_i^p)^(1/p)``; ``p = np.inf`` gives the
    operator norm."""
    if not p >= 1:
        raise DomainError(f"Schatten norm requires p >= 1, got {p}")
    s = singular_values(as_matrix(a))
    if np.isinf(p):
        return float(s.max(initial=0.0))
    if p == 1:
        return float(s.sum())
    return float(np.sum(s**p) ** (1.0 / p))


def trace_norm(a) -> np.ndarray | float:
    """Schatten 1-norm; broadcasts over leading axes."""
    out = singular_values(a).sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def hermitian_trace_norm(a) -> np.ndarray | float:
    """Trace norm of (stacks of) Hermitian matrices via their spectrum."""
    out = np.abs(eigvalsh(a)).sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max() <= tol)


def check_unitary(u, dim: int | None = None, tol: float = UNITARY_TOL) -> np.ndarray:
    """Validate a basis unitary and return it as a complex array."""
    m = as_square(u, "basis")
    if dim is not None and m.shape[0] != dim:
        raise DimensionError(f"basis of dimension {m.shape[0]} given for a {dim}-dim space")
    err = np.abs(m.conj().T @ m - np.eye(m.shape[0])).max()
    if err > tol:
        raise InvalidBasisError(f"max |U^dagger U - I| = {err:.3e}")
    return m


def product_basis(basis_a, basis_b) -> np.ndarray:
    return np.kron(basis_a, basis_b)


def change_basis(a, basis) -> np.ndarray:
    """Matrix representation ``U^dagger A U`` of ``a`` in the basis ``U``."""
    return basis.conj().T @ a @ basis


def l1_norm(a, basis=None) -> float:
    """Entrywise absolute sum of ``a`` represented in ``basis``.

    ``basis`` may be ``None`` (computational basis), a unitary, or a pair
    ``(U_A, U_B)`` meaning the product basis ``U_A (x) U_B``.
    """
    m = as_square(a)
    if basis is None:
        return float(np.abs(m).sum())
    if isinstance(basis, (tuple, list)):
        ua, ub = basis
        ua = check_unitary(ua)
        ub = check_unitary(ub)
        u = np.kron(ua, ub)
    else:
        u = check_unitary(basis)
    if u.shape[0] != m.shape[0]:
        raise DimensionError(f"basis dimension {u.shape[0]} does not match matrix {m.shape}")
    return float(np.abs(change_basis(m, u)).sum())


def _side(side: str) -> str:
    s = str(side).upper()
    if s not in ("A", "B"):
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    return s


def partial_transpose(rho, dims: DimsLike, side: str = "B") -> np.ndarray:
    """Transpose one tensor factor in the computational product basis."""
    m = as_square(rho, "rho")
    cut = _check_cut(m, dims)
    t = m.reshape(cut.dim_a, cut.dim_b, cut.dim_a, cut.dim_b)
    if _side(side) == "B":
        t = t.transpose(0, 3, 2, 1)
    else:
        t = t.transpose(2, 1, 0, 3)
    return t.reshape(cut.total, cut.total)


def partial_trace(rho, dims: DimsLike, keep: str = "A") -> np.ndarray:
    m = as_square(rho, "rho")
    cut = _check_cut(m, dims)
    t = m.reshape(cut.dim_a, cut.dim_b, cut.dim_a, cut.dim_b)
    if _side(keep) == "A":
        return np.einsum("ijkj->ik", t)
    return np.einsum("ijil->jl", t)


def swap_subsystems(rho, dims: DimsLike) -> np.ndarray:
    """Reorder ``A (x) B`` into ``B (x) A``."""
    m = as_square(rho, "rho")
    cut = _check_cut(m, dims)
    t = m.reshape(cut.dim_a, cut.dim_b, cut.dim_a, cut.dim_b).transpose(1, 0, 3, 2)
    return t.reshape(cut.total, cut.total)


def blocks(rho, dims: DimsLike, basis_a) -> np.ndarray:
    """All operators ``<a_i| rho |a_j>`` on B.

    ``basis_a`` may be a stack of unitaries with shape ``(..., d_A, d_A)``;
    the result has shape ``(..., d_A, d_A, d_B, d_B)`` indexed ``[..., i, j]``.
    """
    m = np.asarray(rho, dtype=complex)
    cut = _check_cut(m, dims)
    t = m.reshape(cut.dim_a, cut.dim_b, cut.dim_a, cut.dim_b)
    u = np.asarray(basis_a, dtype=complex)
    return np.einsum("...ki,kblc,...lj->...ijbc", u.conj(), t, u, optimize=True)


def block(rho, dims: DimsLike, basis_a, i: int, j: int) -> np.ndarray:
    """The ``d_B x d_B`` operator ``<a_i| rho |a_j>``."""
    cut = as_bipartition(dims)
    if not (0 <= i < cut.dim_a and 0 <= j < cut.dim_a):
        raise IndexError(f"block index ({i}, {j}) out of range for d_A = {cut.dim_a}")
    u = check_unitary(basis_a, cut.dim_a)
    m = as_square(rho, "rho")
    _check_cut(m, cut)
    t = m.reshape(cut.dim_a, cut.dim_b, cut.dim_a, cut.dim_b)
    return np.einsum("k,kblc,l->bc", u[:, i].conj(), t, u[:, j])


def dephase(rho, dims: DimsLike, basis_a=None, basis_b=None) -> np.ndarray:
    """Complete projective measurement on the sides whose basis is given.

    ``dephase(rho, dims, basis_a=U)`` is ``Pi_A[rho]``; passing both bases
    gives ``(Pi_A (x) Pi_B)[rho]``.
    """
    m = as_square(rho, "rho")
    cut = _check_cut(m, dims)
    out = m
    if basis_a is not None:
        ua = check_unitary(basis_a, cut.dim_a)
        projs = np.einsum("ik,jk->kij", ua, ua.conj())
        op = np.zeros_like(out)
        for p in projs:
            pk = np.kron(p, np.eye(cut.dim_b))
            op += pk @ out @ pk
        out = op
    if basis_b is not None:
        ub = check_unitary(basis_b, cut.dim_b)
        projs = np.einsum("ik,jk->kij", ub, ub.conj())
        op = np.zeros_like(out)
        for p in projs:
            pk = np.kron(np.eye(cut.dim_a), p)
            op += pk @ out @ pk
        out = op
    return out


def von_neumann_entropy(rho, base: float = 2.0) -> float:
    """``-Tr rho log rho`` (base 2 by default); zero eigenvalues contribute 0."""
    w = eigvalsh(hermitize(rho))
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log(w)) / np.log(base))


def relative_entropy(rho, sigma, base: float = 2.0, support_tol: float = 1e-12) -> float:
    """``S(rho || sigma) = Tr rho (log rho - log sigma)``.

    Returns ``inf`` when ``rho`` has weight outside the support of ``sigma``.
    """
    wr, vr = eigh(hermitize(rho))
    ws, vs = eigh(hermitize(sigma))
    keep_r = wr > support_tol
    term_r = np.sum(wr[keep_r] * np.log(wr[keep_r]))
    # Tr(rho log sigma) = sum_{k,l} w_r[k] |<r_k|s_l>|^2 log w_s[l]
    overlap = np.abs(vr[:, keep_r].conj().T @ vs) ** 2
    weight = wr[keep_r] @ overlap
    in_support = ws > support_tol
    if np.any(weight[~in_support] > 1e-10):
        return float("inf")
    term_s = np.sum(weight[in_support] * np.log(ws[in_support]))
    return float((term_r - term_s) / np.log(base))
