"""Negativity of quantumness and related correlation measures for bipartite states."""

from .exceptions import DimensionError, DomainError, InvalidBasisError, NoqError, NumericalError, ValidationError
from .linalg import Bipartition, l1_norm, partial_trace, partial_transpose, schatten_norm
from .measures import (
    MeasureReport,
    deficit,
    geometric_discord,
    khasin_bound_check,
    negativity,
    noq_bell_diagonal,
    noq_isotropic,
    noq_mixed_marginal,
    noq_one_sided,
    noq_two_sided,
    noq_werner,
    trace_distance_discord,
)
from .optimizer import OptimizerConfig, minimize_over_bases
from .states import DensityMatrix, make_density

__version__ = "0.1.0"
