"""Conserved kinetic-exchange model of firm sizes.

A seedable Monte Carlo engine for an economy of N firms trading workforce
through n-ary random redistribution events, together with the closed-form
laws the model obeys (simplex share marginals, hypoexponential steady states,
variance predictions, the per-firm redistribution constant) and the fitting
tools that verify them (exponential, Laplace, power-law tail, scaling
regressions).
"""

from importlib import metadata

try:
    __version__ = metadata.version("firmkinetics")
except metadata.PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0+uninstalled"

from .analytics import (
    CEstimate,
    DispersionCurve,
    GrowthSeries,
    Histogram,
    HypoExpSpec,
    central_moment,
    conditional_dispersion,
    estimate_c,
    growth_series,
    histogram,
    hypoexp_cdf,
    hypoexp_mean,
    hypoexp_pdf,
    mu_limit_pdf,
    variance_prediction,
)
from .dynamics import (
    EconomyConfig,
    EnsembleState,
    GlvShocks,
    ShockSpec,
    SnapshotSeries,
    TurnoverProfile,
    run,
    step_coupled,
    step_glv,
    step_reduced_constant,
    step_reduced_distributed,
)
from .plans import ExperimentPlan, ExecutionResult, execute, load_plan, validate
from .seeding import spawn_rng
from .simplex import (
    SimplexSample,
    epsilon_marginal_cdf,
    epsilon_marginal_pdf,
    sample_simplex,
    sample_simplex_block,
)
from .statfit import (
    FitResult,
    fit_c_scaling,
    fit_exponential,
    fit_laplace,
    fit_loglog_slope,
    fit_powerlaw_tail,
    ks_statistic,
)

__all__ = [
    "__version__",
    "spawn_rng",
    "SimplexSample",
    "sample_simplex",
    "sample_simplex_block",
    "epsilon_marginal_pdf",
    "epsilon_marginal_cdf",
    "TurnoverProfile",
    "ShockSpec",
    "GlvShocks",
    "EconomyConfig",
    "EnsembleState",
    "SnapshotSeries",
    "step_coupled",
    "step_reduced_constant",
    "step_reduced_distributed",
    "step_glv",
    "run",
    "HypoExpSpec",
    "hypoexp_pdf",
    "hypoexp_cdf",
    "hypoexp_mean",
    "central_moment",
    "variance_prediction",
    "mu_limit_pdf",
    "GrowthSeries",
    "growth_series",
    "DispersionCurve",
    "conditional_dispersion",
    "CEstimate",
    "estimate_c",
    "Histogram",
    "histogram",
    "FitResult",
    "ks_statistic",
    "fit_exponential",
    "fit_laplace",
    "fit_powerlaw_tail",
    "fit_loglog_slope",
    "fit_c_scaling",
    "ExperimentPlan",
    "ExecutionResult",
    "load_plan",
    "execute",
    "validate",
]
