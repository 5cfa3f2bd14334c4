"""Correlation measures: negativity, negativity of quantumness and relatives.

Numeric measures minimize a batched objective over local bases with
:func:`noq.optimizer.minimize_over_bases`; every numeric value is the
objective re-evaluated at the reported basis, hence an upper bound on the
true minimum.  Closed forms cover Bell-diagonal, maximally-mixed-marginal,
Werner and isotropic states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linalg as la
from .exceptions import DimensionError, DomainError, NumericalError
from .optimizer import DEFAULT_CONFIG, OptimizerConfig, minimize_over_bases
from .states import (
    DensityMatrix,
    MCSCoefficients,
    as_density,
    correlation_matrix,
    tetrahedron_violation,
)

MARGINAL_TOL = 1e-8


@dataclass
class MeasureReport:
    measure: str
    value: float
    method: str
    basis_a: np.ndarray | None = None
    basis_b: np.ndarray | None = None
    restarts: int = 0
    evaluations: int = 0
    gap: float = 0.0
    warning: str | None = None

    def to_dict(self) -> dict:
        def enc(u):
            if u is None:
                return None
            u = np.asarray(u, dtype=complex)
            return {"re": u.real.tolist(), "im": u.imag.tolist()}

        return {
            "measure": self.measure,
            "value": float(self.value),
            "method": self.method,
            "basis_a": enc(self.basis_a),
            "basis_b": enc(self.basis_b),
            "restarts": int(self.restarts),
            "evaluations": int(self.evaluations),
            "gap": float(self.gap),
            "warning": self.warning,
        }


def _state(rho) -> DensityMatrix:
    if isinstance(rho, DensityMatrix):
        return rho
    m = np.asarray(rho)
    raise DimensionError(f"expected a DensityMatrix, got array of shape {m.shape}; use make_density")


# --- negativity ------------------------------------------------------------------------


def negativity(rho) -> float:
    """``(||rho^Gamma||_1 - 1) / 2``."""
    st = _state(rho)
    pt = la.partial_transpose(st.matrix, st.cut, "B")
    return float((la.hermitian_trace_norm(pt) - 1) / 2)


def mcs_pt_spectrum(coeffs: MCSCoefficients) -> list:
    """Eigenpairs of the partial transpose (on B) of a maximally correlated state.

    The transpose acts in the computational basis, so B-vectors enter
    conjugated.  Pairs ``i > j`` give ``+-|tau_ij|`` with vectors
    ``(|a_i b_j*> +- e^{i arg tau_ji} |a_j b_i*>)/sqrt2``; a vanishing
    ``tau_ij`` gives the bare product vectors with eigenvalue 0.  Unused
    levels contribute zeros.
    """
    ua, ub, tau, n = coeffs.basis_a, coeffs.basis_b.conj(), coeffs.tau, coeffs.n
    d_a, d_b = ua.shape[0], ub.shape[0]

    def ket(i, j):
        return np.kron(ua[:, i], ub[:, j])

    out = []
    for i in range(n):
        out.append((float(tau[i, i].real), ket(i, i)))
    for i in range(n):
        for j in range(i):
            mag = abs(tau[j, i])
            if mag == 0:
                out.append((0.0, ket(i, j)))
                out.append((0.0, ket(j, i)))
                continue
            ph = tau[j, i] / mag
            out.append((float(mag), (ket(i, j) + ph * ket(j, i)) / np.sqrt(2)))
            out.append((-float(mag), (ket(i, j) - ph * ket(j, i)) / np.sqrt(2)))
    for i in range(d_a):
        for j in range(d_b):
            if i >= n or j >= n:
                out.append((0.0, ket(i, j)))
    return out


def negativity_mcs(coeffs: MCSCoefficients) -> float:
    """``(sum_ij |tau_ij| - 1) / 2``."""
    return float((np.abs(coeffs.tau).sum() - 1) / 2)


# --- batched objectives ------------------------------------------------------------------
# each takes the state matrix, its cut and stacks of unitaries, returns an array


def _sv_sum(a: np.ndarray) -> np.ndarray:
    return np.linalg.svd(a, compute_uv=False).sum(axis=-1)


def _entropy_of(w: np.ndarray) -> np.ndarray:
    w = np.clip(w, 0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(w > 1e-15, -w * np.log2(np.where(w > 1e-15, w, 1)), 0.0)
    return t.sum(axis=-1)


def _lift(cut, ua=None, ub=None) -> np.ndarray:
    """``U_A (x) U_B`` (identity on a missing side); broadcasts over stacks."""
    ua = np.eye(cut.dim_a) if ua is None else ua
    ub = np.eye(cut.dim_b) if ub is None else ub
    k = ua[..., :, None, :, None] * ub[..., None, :, None, :]
    return k.reshape(k.shape[:-4] + (cut.total, cut.total))


def _rotated(m, cut, ua=None, ub=None) -> np.ndarray:
    """``(U_A (x) U_B)^dagger rho (U_A (x) U_B)`` as a ``(..., a, b, a, b)`` tensor."""
    k = _lift(cut, ua, ub)
    r = np.swapaxes(k.conj(), -1, -2) @ m @ k
    return r.reshape(r.shape[:-2] + (cut.dim_a, cut.dim_b, cut.dim_a, cut.dim_b))


def _blocks(m, cut, ua) -> np.ndarray:
    """``<a_i| rho |a_j>`` indexed ``[..., i, j, b, c]``."""
    return np.swapaxes(_rotated(m, cut, ua), -3, -2)


def _soft_abs_sum(x: np.ndarray, eps: float, axes) -> np.ndarray:
    return np.sqrt(np.abs(x) ** 2 + eps * eps).sum(axis=axes)


def _soft_trace_norm(x: np.ndarray, eps: float) -> np.ndarray:
    """``sum_k sqrt(s_k^2 + eps^2)`` over singular values ``s_k``."""
    g = np.swapaxes(x.conj(), -1, -2) @ x
    return np.sqrt(np.clip(np.linalg.eigvalsh(g), 0, None) + eps * eps).sum(axis=-1)


def objective_noq_a(m, cut) -> Callable:
    iu, ju = np.triu_indices(cut.dim_a, 1)
    ii = np.arange(cut.dim_a)

    def f(ua):
        b = _blocks(m, cut, ua)
        # diagonal blocks are Hermitian; ||rho_ji||_1 = ||rho_ij||_1
        diag = np.abs(np.linalg.eigvalsh(b[..., ii, ii, :, :])).sum(axis=(-1, -2))
        off = _sv_sum(b[..., iu, ju, :, :]).sum(axis=-1) if iu.size else 0.0
        return 0.5 * (diag + 2 * off - 1)

    def smoothed(eps):
        def g(ua):
            return 0.5 * (_soft_trace_norm(_blocks(m, cut, ua), eps).sum(axis=(-1, -2)) - 1)

        return g

    f.smoothed = smoothed
    return f


def objective_noq_ab(m, cut) -> Callable:
    def f(ua, ub):
        r = _rotated(m, cut, ua, ub)
        return 0.5 * (np.abs(r).sum(axis=(-1, -2, -3, -4)) - 1)

    def smoothed(eps):
        def g(ua, ub):
            return 0.5 * (_soft_abs_sum(_rotated(m, cut, ua, ub), eps, (-1, -2, -3, -4)) - 1)

        return g

    f.smoothed = smoothed
    return f


def _offdiagonal(m, cut, ua, ub) -> np.ndarray:
    r = _rotated(m, cut, ua, ub)
    n = cut.total
    flat = r.reshape(r.shape[:-4] + (n, n))
    return flat - np.einsum("...ii->...i", flat)[..., None] * np.eye(n)


def objective_khasin(m, cut) -> Callable:
    """``1/2 || rho - (Pi_A (x) Pi_B)[rho] ||_l1`` in the measured basis."""

    def f(ua, ub):
        return 0.5 * np.abs(_offdiagonal(m, cut, ua, ub)).sum(axis=(-1, -2))

    def smoothed(eps):
        def g(ua, ub):
            return 0.5 * _soft_abs_sum(_offdiagonal(m, cut, ua, ub), eps, (-1, -2))

        return g

    f.smoothed = smoothed
    return f


def objective_trace_discord(m, cut) -> Callable:
    """``1/2 || rho - Pi_A[rho] ||_1``."""
    eye_a = np.eye(cut.dim_a)[:, None, :, None]

    def spectrum(ua):
        off = _rotated(m, cut, ua) * (1 - eye_a)
        return np.linalg.eigvalsh(off.reshape(off.shape[:-4] + (cut.total, cut.total)))

    def f(ua):
        return 0.5 * np.abs(spectrum(ua)).sum(axis=-1)

    def smoothed(eps):
        def g(ua):
            return 0.5 * np.sqrt(spectrum(ua) ** 2 + eps * eps).sum(axis=-1)

        return g

    f.smoothed = smoothed
    return f


def objective_geometric(m, cut) -> Callable:
    """``|| rho - Pi_A[rho] ||_2^2 = sum_{i != j} ||rho_ij||_F^2``."""
    mask = 1 - np.eye(cut.dim_a)

    def f(ua):
        b = _blocks(m, cut, ua)
        frob = (np.abs(b) ** 2).sum(axis=(-1, -2))
        return (frob * mask).sum(axis=(-1, -2))

    return f


def objective_deficit_a(m, cut) -> Callable:
    """``S(Pi_A[rho]) - S(rho)``."""
    s_rho = la.von_neumann_entropy(m)

    def f(ua):
        b = _blocks(m, cut, ua)
        diag = np.einsum("...iibc->...ibc", b)
        diag = 0.5 * (diag + np.swapaxes(diag.conj(), -1, -2))
        w = np.linalg.eigvalsh(diag)
        return _entropy_of(w.reshape(w.shape[:-2] + (-1,))) - s_rho

    return f


def objective_deficit_ab(m, cut) -> Callable:
    """``S((Pi_A (x) Pi_B)[rho]) - S(rho)``."""
    s_rho = la.von_neumann_entropy(m)

    def f(ua, ub):
        r = _rotated(m, cut, ua, ub)
        p = np.einsum("...ijij->...ij", r).real
        return _entropy_of(p.reshape(p.shape[:-2] + (-1,))) - s_rho

    return f


# --- numeric measures ------------------------------------------------------------------------


def _eigenbasis(m: np.ndarray) -> np.ndarray:
    return la.eigh(la.hermitize(m, 1e-8))[1]


def _report(name, res, two_sided=False, side="A") -> MeasureReport:
    if two_sided:
        ua, ub = res.bases
    elif side == "A":
        ua, ub = res.bases[0], None
    else:
        ua, ub = None, res.bases[0]
    return MeasureReport(
        measure=name,
        value=res.value,
        method="numeric",
        basis_a=ua,
        basis_b=ub,
        restarts=res.restarts,
        evaluations=res.evaluations,
        gap=res.gap,
        warning=res.warning,
    )


def _one_sided(name, factory, rho, side, config) -> MeasureReport:
    st = _state(rho)
    side = la._side(side)
    m, cut = st.matrix, st.cut
    if side == "B":
        m = la.swap_subsystems(m, cut)
        cut = la.Bipartition(cut.dim_b, cut.dim_a)
    hint = [(_eigenbasis(la.partial_trace(m, cut, "A")),)]
    res = minimize_over_bases(factory(m, cut), (cut.dim_a,), config or DEFAULT_CONFIG, hints=hint)
    return _report(name, res, side=side)


def _two_sided(name, factory, rho, config) -> MeasureReport:
    st = _state(rho)
    m, cut = st.matrix, st.cut
    hint = [(_eigenbasis(st.reduced("A")), _eigenbasis(st.reduced("B")))]
    res = minimize_over_bases(factory(m, cut), (cut.dim_a, cut.dim_b), config or DEFAULT_CONFIG, hints=hint)
    return _report(name, res, two_sided=True)


def noq_one_sided(rho, measured_side: str = "A", config: OptimizerConfig | None = None) -> MeasureReport:
    """``min 1/2 (sum_ij ||<a_i|rho|a_j>||_1 - 1)`` over bases of the measured side."""
    name = "noq-a" if la._side(measured_side) == "A" else "noq-b"
    return _one_sided(name, objective_noq_a, rho, measured_side, config)


def noq_two_sided(rho, config: OptimizerConfig | None = None) -> MeasureReport:
    """``min (||rho||_l1 - 1) / 2`` over product bases."""
    return _two_sided("noq-ab", objective_noq_ab, rho, config)


def trace_distance_discord(rho, config: OptimizerConfig | None = None) -> MeasureReport:
    """``min 1/2 ||rho - Pi_A[rho]||_1``; defined here for a qubit A only."""
    st = _state(rho)
    if st.cut.dim_a != 2:
        raise DimensionError(f"trace-distance discord is supported for a qubit A, got d_A = {st.cut.dim_a}")
    return _one_sided("trace-discord", objective_trace_discord, st, "A", config)


def trace_distance_discord_general(rho, config: OptimizerConfig | None = None) -> MeasureReport:
    """Same disturbance for any ``d_A``; no relation to NoQ is asserted."""
    return _one_sided("trace-discord", objective_trace_discord, rho, "A", config)


def geometric_discord(rho, config: OptimizerConfig | None = None) -> MeasureReport:
    """``min ||rho - Pi_A[rho]||_2^2``."""
    return _one_sided("geometric-discord", objective_geometric, rho, "A", config)


def deficit(rho, sides: str = "A", config: OptimizerConfig | None = None) -> MeasureReport:
    """One-way (``sides="A"``) or zero-way (``sides="AB"``) deficit in bits."""
    s = str(sides).upper()
    if s == "A":
        return _one_sided("deficit-a", objective_deficit_a, rho, "A", config)
    if s == "AB":
        return _two_sided("deficit-ab", objective_deficit_ab, rho, config)
    raise ValueError(f"sides must be 'A' or 'AB', got {sides!r}")


@dataclass(frozen=True)
class KhasinCheck:
    negativity: float
    bound: float
    holds: bool
    report: MeasureReport


def khasin_bound_check(rho, config: OptimizerConfig | None = None, slack: float = 1e-8) -> KhasinCheck:
    """``N(rho) <= min 1/2 ||rho - (Pi_A (x) Pi_B)[rho]||_l1``."""
    rep = _two_sided("khasin-bound", objective_khasin, rho, config)
    n = negativity(rho)
    return KhasinCheck(n, rep.value, bool(n <= rep.value + slack), rep)


def ru_disturbance(rho, basis) -> float:
    """``1/2 ||rho - V rho V^dagger||_1`` with ``V = |phi><phi| - |phi_perp><phi_perp|``.

    Checked against ``||rho - Pi_A[rho]||_1`` in the same basis.
    """
    st = _state(rho)
    if st.cut.dim_a != 2:
        raise DimensionError(f"root-of-unity dephasing needs a qubit A, got d_A = {st.cut.dim_a}")
    u = la.check_unitary(basis, 2)
    v = np.kron(u @ np.diag([1.0, -1.0]) @ u.conj().T, np.eye(st.cut.dim_b))
    m = st.matrix
    value = 0.5 * la.hermitian_trace_norm(m - v @ m @ v.conj().T)
    direct = la.hermitian_trace_norm(m - la.dephase(m, st.cut, basis_a=u))
    if abs(value - direct) > 1e-12:
        raise NumericalError("dephasing identity violated", {"ru": value, "direct": direct})
    return float(value)


# --- closed forms ---------------------------------------------------------------------------


def noq_bell_diagonal(r11: float, r22: float, r33: float) -> float:
    """``lambda_2 / 2`` with ``lambda`` the sorted magnitudes of the correlations."""
    if tetrahedron_violation(r11, r22, r33) > 1e-10:
        raise DomainError(f"({r11}, {r22}, {r33}) is outside the Bell-diagonal tetrahedron")
    lam = np.sort(np.abs([r11, r22, r33]))
    return float(lam[1] / 2)


def noq_mixed_marginal(rho) -> float:
    """``s_2(R_hat) / 2`` for two qubits with maximally mixed marginal on A."""
    st = _state(rho)
    if tuple(st.cut) != (2, 2):
        raise DimensionError("mixed-marginal closed form needs two qubits")
    err = np.abs(st.reduced("A") - np.eye(2) / 2).max()
    if err > MARGINAL_TOL:
        raise DomainError(f"marginal on A is not maximally mixed (max deviation {err:.3e})")
    s = la.singular_values(correlation_matrix(st)[1:, 1:])
    return float(s[1] / 2)


def noq_werner(d: int, beta: float) -> float:
    """``|beta| (d - 1) / (2 (d + beta))``, one- and two-sided."""
    if d < 2 or not -1 <= beta <= 1:
        raise DomainError(f"Werner parameters need d >= 2 and |beta| <= 1, got d={d}, beta={beta}")
    return float(abs(beta) * (d - 1) / (2 * (d + beta)))


def _check_isotropic(d, lam):
    if d < 2 or not 0 <= lam <= 1:
        raise DomainError(f"isotropic parameters need d >= 2 and 0 <= lambda <= 1, got d={d}, lambda={lam}")


def noq_isotropic(d: int, lam: float) -> float:
    """``|lambda d^2 - 1| / (2 (d + 1))``; equals ``(d-1)/2`` on the maximally entangled state."""
    _check_isotropic(d, lam)
    return float(abs(lam * d * d - 1) / (2 * (d + 1)))


def noq_isotropic_printed(d: int, lam: float) -> float:
    """``|lambda d^2 - 1| / (d + 1)``, the unhalved variant; kept for comparison."""
    _check_isotropic(d, lam)
    return float(abs(lam * d * d - 1) / (d + 1))


ISOTROPIC_FORMS = {"halved": noq_isotropic, "printed": noq_isotropic_printed}


# --- dispatch by name ------------------------------------------------------------------------

MEASURES = (
    "negativity",
    "noq-a",
    "noq-b",
    "noq-ab",
    "trace-discord",
    "geometric-discord",
    "deficit-a",
    "deficit-ab",
    "noq-mixed-marginal",
)


def compute(measure: str, rho, config: OptimizerConfig | None = None) -> MeasureReport:
    """Evaluate a measure by its CLI name."""
    if measure == "negativity":
        return MeasureReport("negativity", negativity(rho), "closed-form")
    if measure == "noq-mixed-marginal":
        return MeasureReport("noq-mixed-marginal", noq_mixed_marginal(rho), "closed-form")
    table = {
        "noq-a": lambda: noq_one_sided(rho, "A", config),
        "noq-b": lambda: noq_one_sided(rho, "B", config),
        "noq-ab": lambda: noq_two_sided(rho, config),
        "trace-discord": lambda: trace_distance_discord(rho, config),
        "geometric-discord": lambda: geometric_discord(rho, config),
        "deficit-a": lambda: deficit(rho, "A", config),
        "deficit-ab": lambda: deficit(rho, "AB", config),
    }
    if measure not in table:
        raise DomainError(f"unknown measure {measure!r}; choose from {', '.join(MEASURES)}")
    return table[measure]()
