"""Measurement interactions and pre-measurement states.

A measurement of subsystem ``A`` in basis ``{|a_k>}`` is modelled by the
isometry ``|a_k> -> |a_k>|k>`` into an apparatus ``A'`` of the same
dimension.  Subsystems of the pre-measurement state are ordered
``A B A' B'`` (apparatuses only for measured sides) and the state carries
the cut system ``AB`` : apparatus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .exceptions import DimensionError
from .measures import negativity
from .states import DensityMatrix, MCSCoefficients, make_density, mcs_to_density


@dataclass(frozen=True)
class PreMeasurementState:
    state: DensityMatrix
    original_cut: la.Bipartition
    measured_sides: str
    bases: tuple

    def system_marginal(self) -> np.ndarray:
        """Trace over the apparatuses; the dephased original state."""
        return la.partial_trace(self.state.matrix, self.state.cut, "A")


def _sides(sides: str) -> str:
    s = str(sides).upper()
    if s not in ("A", "B", "AB"):
        raise ValueError(f"measured sides must be 'A', 'B' or 'AB', got {sides!r}")
    return s


def _copy_isometry(u: np.ndarray) -> np.ndarray:
    """``sum_k |a_k>|k><a_k|`` as a ``(d*d, d)`` matrix ordered system, apparatus."""
    d = u.shape[0]
    return np.einsum("ak,bk,kl->alb", u, u.conj(), np.eye(d)).reshape(d * d, d)


def interaction_isometry(cut, sides: str, bases) -> np.ndarray:
    """The isometry ``AB -> A B A' (B')`` for the given measured sides."""
    cut = la.as_bipartition(cut)
    sides = _sides(sides)
    bases = tuple(bases)
    if len(bases) != len(sides):
        raise DimensionError(f"{len(sides)} measured side(s) need {len(sides)} basis(es), got {len(bases)}")
    d_a, d_b = cut
    if sides == "AB":
        ua = la.check_unitary(bases[0], d_a)
        ub = la.check_unitary(bases[1], d_b)
        va = _copy_isometry(ua).reshape(d_a, d_a, d_a)  # (a, a', in)
        vb = _copy_isometry(ub).reshape(d_b, d_b, d_b)
        w = np.einsum("xpi,yqj->xypqij", va, vb)
        return w.reshape(d_a * d_b * d_a * d_b, d_a * d_b)
    if sides == "A":
        ua = la.check_unitary(bases[0], d_a)
        va = _copy_isometry(ua).reshape(d_a, d_a, d_a)
        w = np.einsum("xpi,yj->xypij", va, np.eye(d_b))
        return w.reshape(d_a * d_b * d_a, d_a * d_b)
    ub = la.check_unitary(bases[0], d_b)
    vb = _copy_isometry(ub).reshape(d_b, d_b, d_b)
    w = np.einsum("xi,yqj->xyqij", np.eye(d_a), vb)
    return w.reshape(d_a * d_b * d_b, d_a * d_b)


def measurement_interaction(rho: DensityMatrix, sides: str, bases) -> PreMeasurementState:
    """Apply the measurement interaction; ``bases`` holds one unitary per measured side."""
    sides = _sides(sides)
    cut = rho.cut
    w = interaction_isometry(cut, sides, bases)
    d_app = w.shape[0] // cut.total
    out = make_density(w @ rho.matrix @ w.conj().T, (cut.total, d_app))
    return PreMeasurementState(out, cut, sides, tuple(np.asarray(b, dtype=complex) for b in bases))


def premeasurement_negativity(rho: DensityMatrix, sides: str, bases) -> float:
    """Negativity across system : apparatus of the pre-measurement state."""
    return negativity(measurement_interaction(rho, sides, bases).state)


def l1_formula(rho: DensityMatrix, bases) -> float:
    """``(||rho||_l1 - 1) / 2`` in the product basis."""
    ua, ub = bases
    return (la.l1_norm(rho.matrix, (ua, ub)) - 1) / 2


def block_formula(rho: DensityMatrix, basis_a) -> float:
    """``1/2 (sum_ij ||rho_ij||_1 - 1)`` with blocks taken in ``basis_a``."""
    b = la.blocks(rho.matrix, rho.cut, la.check_unitary(basis_a, rho.cut.dim_a))
    return float(0.5 * (la.trace_norm(b).sum() - 1))


def closest_separable_to_mcs(coeffs: MCSCoefficients) -> tuple[DensityMatrix, float]:
    """Diagonal part ``sum_i tau_ii |a_i b_i><a_i b_i|`` and its l1 distance."""
    diag = MCSCoefficients(np.diag(np.diag(coeffs.tau).real), coeffs.basis_a, coeffs.basis_b)
    sigma = mcs_to_density(diag)
    tau = mcs_to_density(coeffs)
    dist = la.l1_norm(tau.matrix - sigma.matrix, (coeffs.basis_a, coeffs.basis_b))
    return sigma, float(dist)


def closest_cc_diagnostic(rho: DensityMatrix, bases) -> tuple[DensityMatrix, float]:
    """Dephased state in the product basis and its l1 distance to ``rho``."""
    ua, ub = bases
    cc = make_density(la.dephase(rho.matrix, rho.cut, basis_a=ua, basis_b=ub), rho.cut)
    return cc, float(la.l1_norm(rho.matrix - cc.matrix, (ua, ub)))


@dataclass(frozen=True)
class EntropyCheck:
    before: float
    after: float
    equal: bool


def relative_entropy_isometry_check(rho: DensityMatrix, bases, tol: float = 1e-9) -> EntropyCheck:
    """``S(rho || Pi_A Pi_B[rho])`` against the same quantity after the interaction."""
    ua, ub = bases
    before = la.relative_entropy(rho.matrix, la.dephase(rho.matrix, rho.cut, basis_a=ua, basis_b=ub))
    pre = measurement_interaction(rho, "AB", bases).state
    # a complete product-basis measurement of A and B is one measurement of AB
    deph = la.dephase(pre.matrix, pre.cut, basis_a=np.kron(ua, ub))
    after = la.relative_entropy(pre.matrix, deph)
    return EntropyCheck(float(before), float(after), bool(abs(before - after) <= tol))


@dataclass(frozen=True)
class ActivationDiagram:
    disturbance: float
    lifted_disturbance: float
    lifted_diagonal_distance: float
    twice_negativity: float

    def spread(self) -> float:
        v = [self.disturbance, self.lifted_disturbance, self.lifted_diagonal_distance, self.twice_negativity]
        return float(max(v) - min(v))


def activation_diagram(rho: DensityMatrix, bases) -> ActivationDiagram:
    """The four l1 / negativity quantities linked by a two-sided measurement."""
    ua, ub = bases
    cut = rho.cut
    dist = la.l1_norm(rho.matrix - la.dephase(rho.matrix, cut, basis_a=ua, basis_b=ub), (ua, ub))
    pre = measurement_interaction(rho, "AB", bases).state
    u_sys = np.kron(ua, ub)
    frame = np.kron(u_sys, np.eye(pre.cut.dim_b))
    lifted = la.l1_norm(pre.matrix - la.dephase(pre.matrix, pre.cut, basis_a=u_sys), frame)
    # MCS diagonal: keep only the |a_k b_l>|k l> diagonal terms
    rep = frame.conj().T @ pre.matrix @ frame
    diag_part = np.diag(np.diag(rep))
    mcs_dist = float(np.abs(rep - diag_part).sum())
    return ActivationDiagram(float(dist), float(lifted), mcs_dist, 2 * negativity(pre))
