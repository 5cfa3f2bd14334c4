"""Derivative-free minimization over local orthonormal bases.

A basis of a ``d``-dimensional subsystem is decoded from ``d(d-1)`` real
parameters: ``d(d-1)/2`` Givens angles followed by ``d(d-1)/2`` relative
phases.  For qubits the two parameters are the Bloch angles ``(theta, phi)``
of the first basis vector.  Column phases and column order never matter for
the objectives minimized here, so this covers every basis.

Objectives receive one unitary per optimized subsystem and must be pure.
They should broadcast over leading axes (stacks of unitaries) so that grid
searches can be evaluated in a single call; scalar-only objectives are
supported but fall back to a Python loop.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .exceptions import DomainError

logger = logging.getLogger(__name__)

Objective = Callable[..., "float | np.ndarray"]

_CHUNK = 8192
# searches with more parameters than this use smoothing and adaptive simplex coefficients
_SMOOTH_ABOVE = 4


@dataclass(frozen=True)
class OptimizerConfig:
    """Search effort for :func:`minimize_over_bases`.

    ``qubit_grid_resolution`` is the number of polar steps of the qubit grid;
    the azimuth uses twice as many.  ``strategy`` selects ``"both"`` (grid
    plus multi-start), ``"grid"`` (grid and refinement of its best cells
    only) or ``"multistart"`` (simplex restarts only).  ``smoothing`` lists
    the widths of smoothed surrogates visited before the exact objective on
    searches with more than four parameters; objectives opt in by carrying a
    ``smoothed(eps)`` attribute.
    """

    restarts: int = 32
    seed: int = 0
    max_evaluations: int = 50_000
    convergence_tol: float = 1e-7
    qubit_grid_resolution: int = 64
    strategy: str = "both"
    refine_cells: int = 4
    smoothing: tuple = (1e-2, 1e-4)

    def __post_init__(self):
        if self.restarts < 1:
            raise DomainError(f"restarts must be >= 1, got {self.restarts}")
        if not self.convergence_tol > 0:
            raise DomainError(f"convergence_tol must be > 0, got {self.convergence_tol}")
        if self.max_evaluations < 1:
            raise DomainError(f"max_evaluations must be >= 1, got {self.max_evaluations}")
        if self.qubit_grid_resolution < 2:
            raise DomainError("qubit_grid_resolution must be >= 2")
        if self.strategy not in ("both", "grid", "multistart"):
            raise DomainError(f"unknown strategy {self.strategy!r}")

    def replace(self, **changes) -> "OptimizerConfig":
        return replace(self, **changes)


DEFAULT_CONFIG = OptimizerConfig()


@dataclass
class OptimizationResult:
    value: float
    bases: tuple
    restarts: int
    evaluations: int
    gap: float
    converged: bool
    warning: str | None = None
    local_values: list = field(default_factory=list, repr=False)


# --- parametrization -----------------------------------------------------------------


def n_params(dim: int) -> int:
    return dim * (dim - 1)


def _pairs(dim: int):
    return [(p, q) for p in range(dim) for q in range(p + 1, dim)]


def qubit_unitary(theta, phi) -> np.ndarray:
    """Basis ``{|n>, |-n>}`` for Bloch angles; broadcasts over the inputs."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    e = np.exp(1j * phi)
    u = np.empty(theta.shape + (2, 2), dtype=complex)
    u[..., 0, 0] = c
    u[..., 1, 0] = e * s
    u[..., 0, 1] = -e.conj() * s
    u[..., 1, 1] = c
    return u


def decode_basis(dim: int, params) -> np.ndarray:
    """Unitary for one parameter vector (see module docstring)."""
    params = np.asarray(params, dtype=float)
    if params.shape != (n_params(dim),):
        raise ValueError(f"dimension {dim} needs {n_params(dim)} parameters, got {params.shape}")
    if dim == 1:
        return np.ones((1, 1), dtype=complex)
    if dim == 2:
        return qubit_unitary(params[0], params[1])
    m = dim * (dim - 1) // 2
    x = params.tolist()
    # columns as Python lists: small rotations are cheaper without numpy
    cols = [[1.0 if i == j else 0.0 for i in range(dim)] for j in range(dim)]
    for k, (p, q) in enumerate(_pairs(dim)):
        c, s = math.cos(x[k]), math.sin(x[k])
        es = complex(math.cos(x[m + k]), math.sin(x[m + k])) * s
        cp, cq = cols[p], cols[q]
        cols[p] = [c * a + es * b for a, b in zip(cp, cq)]
        cols[q] = [c * b - es.conjugate() * a for a, b in zip(cp, cq)]
    return np.array(cols, dtype=complex).T


def _split(dims: Sequence[int], x: np.ndarray):
    out, k = [], 0
    for d in dims:
        out.append(x[k: k + n_params(d)])
        k += n_params(d)
    return out


def _decode_all(dims, anchors, x):
    return tuple(a @ decode_basis(d, xi) for d, a, xi in zip(dims, anchors, _split(dims, x)))


def wrap_angles(x: np.ndarray) -> np.ndarray:
    return np.mod(x, 2 * np.pi)


# --- objective evaluation helpers ------------------------------------------------------


def _evaluate_stack(objective: Objective, stacks: Sequence[np.ndarray]) -> np.ndarray:
    """Evaluate on stacks of unitaries (all with the same leading length)."""
    n = stacks[0].shape[0]
    out = np.empty(n)
    for lo in range(0, n, _CHUNK):
        part = [s[lo: lo + _CHUNK] for s in stacks]
        vals = np.asarray(objective(*part), dtype=float)
        if vals.shape != (part[0].shape[0],):
            if vals.ndim == 0:
                vals = np.broadcast_to(vals, (part[0].shape[0],))
            else:
                vals = np.array([float(objective(*(p[i] for p in part))) for i in range(part[0].shape[0])])
        out[lo: lo + _CHUNK] = vals
    return out


def qubit_grid(resolution: int):
    """Angles of the nested dyadic grid: ``theta = pi k / r`` (``k = 0..r``),
    ``phi = pi l / r`` (``l = 0..2r-1``)."""
    r = int(resolution)
    theta = np.pi * np.arange(r + 1) / r
    phi = np.pi * np.arange(2 * r) / r
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    return tt.reshape(-1), pp.reshape(-1)


def brute_force_qubit_oracle(objective: Objective, resolution: int = 64, return_basis: bool = False):
    """Exhaustive minimum of a single-qubit-basis objective over the grid.

    Refining ``resolution`` by factors of two only adds points, so the
    returned value is non-increasing along dyadic refinements.
    """
    if resolution < 8:
        raise DomainError(f"oracle resolution must be >= 8, got {resolution}")
    theta, phi = qubit_grid(resolution)
    vals = _evaluate_stack(objective, [qubit_unitary(theta, phi)])
    k = int(np.argmin(vals))
    if return_basis:
        return float(vals[k]), qubit_unitary(theta[k], phi[k])
    return float(vals[k])


# --- the minimizer ----------------------------------------------------------------------


def _qubit_unitary_scalar(theta: float, phi: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    e = complex(math.cos(phi), math.sin(phi))
    return np.array([[c, -e.conjugate() * s], [e * s, c]])


class _Counter:
    def __init__(self, objective, dims, anchors):
        self.objective = objective
        self.dims = dims
        self.anchors = anchors
        self.count = 0
        self._qubits = all(d == 2 for d in dims)

    def bases(self, x):
        if self._qubits:
            return tuple(a @ _qubit_unitary_scalar(x[2 * k], x[2 * k + 1]) for k, a in enumerate(self.anchors))
        return _decode_all(self.dims, self.anchors, x)

    def __call__(self, x):
        self.count += 1
        return float(self.objective(*self.bases(x)))


def _simplex(x0: np.ndarray, step: float | np.ndarray) -> np.ndarray:
    n = x0.size
    steps = np.broadcast_to(np.asarray(step, float), (n,))
    sim = np.tile(x0, (n + 1, 1))
    sim[1:] += np.diag(steps)
    return sim


def _nelder_mead(f: _Counter, x0, step, config: OptimizerConfig, tol: float | None = None):
    """One simplex search; returns ``(value, x, converged)``.

    A start simplex that is already flat to the tolerance ends the search at
    once.  Problems with many parameters use the dimension-adapted
    coefficients of Gao and Han.
    """
    tol = config.convergence_tol if tol is None else tol
    sim = _simplex(x0, step)
    vals = np.array([f(v) for v in sim])
    k = int(np.argmin(vals))
    if vals.max() - vals.min() <= tol:
        return float(vals[k]), sim[k], True
    budget = config.max_evaluations - f.count
    if budget <= 0:
        return float(vals[k]), sim[k], False
    res = minimize(
        f,
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": sim,
            "xatol": tol,
            "fatol": tol,
            "maxfev": budget,
            "adaptive": x0.size > _SMOOTH_ABOVE,
        },
    )
    return float(res.fun), wrap_angles(res.x), res.status == 0


def _local_search(objective, dims, anchors, x0, step, config: OptimizerConfig, polish: bool = False):
    f = _Counter(objective, dims, anchors)
    if x0.size == 0:
        return float(f(x0)), x0, f.count, True
    smoothed = getattr(objective, "smoothed", None)
    if smoothed is not None and x0.size > _SMOOTH_ABOVE and config.smoothing and not polish:
        # continuation through smoothed surrogates, then the exact objective
        x = x0
        for eps in config.smoothing:
            f.objective = smoothed(eps)
            _, x, _ = _nelder_mead(f, x, step, config, tol=max(config.convergence_tol, 1e-2 * eps))
            step = min(step, 10 * eps)
        f.objective = objective
        x0, step = x, max(step, 1e-3)
    prev = f(x0) if polish else -np.inf
    val, x, converged = _nelder_mead(f, x0, step, config)
    # fresh simplices around the optimum guard against premature collapse
    while polish and converged and val < prev - config.convergence_tol and f.count < config.max_evaluations:
        prev = val
        val2, x2, converged = _nelder_mead(f, x, 0.05, config)
        if val2 < val:
            val, x = val2, x2
    return val, x, f.count, converged


def _grid_candidates(objective, dims, config: OptimizerConfig):
    """Best qubit-grid points as (params, step) pairs plus evaluation count."""
    if len(dims) == 1:
        r = config.qubit_grid_resolution
        theta, phi = qubit_grid(r)
        vals = _evaluate_stack(objective, [qubit_unitary(theta, phi)])
        pts = np.stack([theta, phi], axis=1)
        step = np.pi / r
    else:
        # joint grids over several qubits use a coarser per-qubit resolution
        r = max(4, config.qubit_grid_resolution // 8)
        theta, phi = qubit_grid(r)
        m = theta.size
        idx = np.indices((m,) * len(dims)).reshape(len(dims), -1)
        stacks = [qubit_unitary(theta[i], phi[i]) for i in idx]
        vals = _evaluate_stack(objective, stacks)
        pts = np.concatenate([np.stack([theta[i], phi[i]], axis=1) for i in idx], axis=1)
        step = np.pi / r
    order = np.argsort(vals, kind="stable")[: max(1, config.refine_cells)]
    return [(pts[k], step) for k in order], vals.size


def minimize_over_bases(
    objective: Objective,
    dims: Sequence[int],
    config: OptimizerConfig | None = None,
    hints: Sequence[Sequence[np.ndarray]] = (),
) -> OptimizationResult:
    """Minimize ``objective(U_1, ..., U_k)`` over unitaries of sizes ``dims``.

    Local simplex searches start from ``hints`` (basis tuples worth trying
    first), from low-discrepancy points of the parameter torus and, when
    every optimized subsystem is a qubit, from the best cells of a
    ``(theta, phi)`` grid.  The best value over all searches is returned
    together with the basis achieving it; the value is always the objective
    re-evaluated at that basis, hence an upper bound on the true minimum.
    """
    config = config or DEFAULT_CONFIG
    dims = tuple(int(d) for d in dims)
    n = sum(n_params(d) for d in dims)
    eye = tuple(np.eye(d, dtype=complex) for d in dims)
    starts = []  # (anchors, x0, step)
    use_grid = config.strategy in ("both", "grid") and all(d == 2 for d in dims)
    use_multi = config.strategy in ("both", "multistart") or not use_grid
    evaluations = 0

    for h in hints:
        starts.append((tuple(np.asarray(u, dtype=complex) for u in h), np.zeros(n), 0.1))
    if use_grid:
        cells, n_eval = _grid_candidates(objective, dims, config)
        evaluations += n_eval
        starts.extend((eye, x0, step) for x0, step in cells)
    if use_multi and n > 0:
        halton = qmc.Halton(d=n, scramble=True, seed=config.seed)
        pts = halton.random(config.restarts) * 2 * np.pi
        starts.extend((eye, x0, 0.5) for x0 in pts)
    if not starts or n == 0:
        starts.append((eye, np.zeros(n), 0.5))

    results = []
    for k, (anchors, x0, step) in enumerate(starts):
        val, x, count, conv = _local_search(objective, dims, anchors, x0, step, config)
        evaluations += count
        results.append((val, k, anchors, x, conv))
        if n == 0:
            break

    results.sort(key=lambda r: (r[0], r[1]))
    best_val, best_k, anchors, x, conv = results[0]
    if n > 0:
        val, x2, count, conv2 = _local_search(objective, dims, anchors, x, 0.05, config, polish=True)
        evaluations += count
        if val < best_val:
            best_val, x, conv = val, x2, conv2
            results[0] = (val, best_k, anchors, x, conv)
    bases = _Counter(objective, dims, anchors).bases(x)
    value = float(objective(*bases))
    evaluations += 1
    vals = [r[0] for r in results]
    gap = float(vals[1] - vals[0]) if len(vals) > 1 else 0.0
    warning = None
    if not conv:
        warning = f"local search from start {best_k} hit max_evaluations={config.max_evaluations} before converging"
        logger.warning(warning)
    return OptimizationResult(
        value=value,
        bases=bases,
        restarts=len(results),
        evaluations=evaluations,
        gap=gap,
        converged=conv,
        warning=warning,
        local_values=sorted(vals),
    )
