"""Survival extropy, inaccuracy and divergence measures with their plug-in estimators.

The package evaluates the measures exactly for analytic lifetime models,
estimates them from samples, runs a Monte Carlo uniformity test built on the
divergence, and applies the estimators to image similarity and grouped
lifetime data.
"""

__version__ = "0.1.0"

from survext.distributions import (  # noqa: E402
    Beta,
    CkFamily,
    DistributionSpec,
    Exponential,
    Gompertz,
    Mixture,
    SeededStream,
    Uniform,
    make_model,
    sample,
)
from survext.empirical import (  # noqa: E402
    EmpiricalSample,
    SurvivalConvention,
    estimate_dsed,
    estimate_inaccuracy_ratio,
    estimate_sed,
    estimate_symmetric_dsed,
    estimate_symmetric_sed,
)
from survext.errors import SurvextError  # noqa: E402
from survext.kernels import BACKEND  # noqa: E402
from survext.measures import (  # noqa: E402
    QuadratureConfig,
    dsed,
    evaluate,
    inaccuracy_ratio,
    sed,
    sei,
    survival_extropy,
    symmetric_dsed,
    symmetric_sed,
)

__all__ = [
    "BACKEND", "Beta", "CkFamily", "DistributionSpec", "EmpiricalSample", "Exponential", "Gompertz",
    "Mixture", "QuadratureConfig", "SeededStream", "SurvextError", "SurvivalConvention", "Uniform",
    "dsed", "estimate_dsed", "estimate_inaccuracy_ratio", "estimate_sed", "estimate_symmetric_dsed",
    "estimate_symmetric_sed", "evaluate", "inaccuracy_ratio", "make_model", "sample", "sed", "sei",
    "survival_extropy", "symmetric_dsed", "symmetric_sed", "__version__",
]
