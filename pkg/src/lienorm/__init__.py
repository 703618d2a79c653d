"""Exact Lie-iteration normal forms with certified convergence bounds.

Layers, bottom up:

- :mod:`lienorm.power_series`: exact truncated series algebra, Lie
  exponentials of derivations, the division map.
- :mod:`lienorm.disc_norms`: majorant norms on discs, local-operator
  bound algebra with calibration, weight-sequence summation checks.
- :mod:`lienorm.defsets`: definition-set geometry (boundary functions,
  convolution, idempotents).
- :mod:`lienorm.prisma`: the finite-dimensional iteration that governs
  the norm bounds, with exact closed forms.
- :mod:`lienorm.normalform`: the Lie iteration itself, formal and
  certified, plus convergence certificates.
- :mod:`lienorm.paramopt`: certificate parameter optimization and the
  certified-vs-true radius tables.
"""

from .power_series import (
    CompositionDomainError,
    Derivation,
    InsufficientTruncationError,
    NonTerminatingExponentialError,
    NotInvertibleError,
    TruncSeries,
    apply_derivation,
    j_map,
    lie_exp,
)
from .disc_norms import (
    LocalOpBound,
    MajorantValue,
    WeightSequence,
    calibrate,
    compose_local_bounds,
    majorant_norm,
    nagumo_check,
    order_filtration_norm,
)
from .defsets import DefSet, convolve, defset_of_exponential, defset_of_product
from .prisma import IterConfig, PrismaState, rapid_convergence_check
from .normalform import (
    Certificate,
    LieTrace,
    certify,
    lie_iterate_certified,
    lie_iterate_formal,
    normalizer_series,
    threshold_T0,
)
from .paramopt import (
    OptResult,
    QRow,
    maximize_basic,
    maximize_equalized,
    q_table,
    radius_oracle_series,
    true_radius,
)

__version__ = "0.1.0"

__all__ = [
    "TruncSeries", "Derivation", "apply_derivation", "j_map", "lie_exp",
    "CompositionDomainError", "NotInvertibleError",
    "NonTerminatingExponentialError", "InsufficientTruncationError",
    "MajorantValue", "LocalOpBound", "WeightSequence", "majorant_norm",
    "nagumo_check", "order_filtration_norm", "compose_local_bounds",
    "calibrate", "DefSet", "convolve", "defset_of_exponential",
    "defset_of_product", "PrismaState", "IterConfig",
    "rapid_convergence_check", "LieTrace", "Certificate",
    "lie_iterate_formal", "normalizer_series", "certify", "threshold_T0",
    "lie_iterate_certified", "OptResult", "QRow", "maximize_basic",
    "maximize_equalized", "q_table", "true_radius", "radius_oracle_series",
]
