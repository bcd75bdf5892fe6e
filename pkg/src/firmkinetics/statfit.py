"""Distribution fitting and goodness of fit.

Maximum-likelihood fits for the laws the model predicts — exponential sizes
at zero turnover, Laplace growth differences, a power-law size tail with
density exponent 2 under distributed turnover — plus log-log slope fits and
the finite-size scaling regression C(N) = a + b/log(N) (natural log).  Every
fit reports the Kolmogorov-Smirnov statistic against its own fitted law; no
p-values, since time-pooled simulation samples are autocorrelated and would
make them meaningless.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "FitResult",
    "ks_statistic",
    "fit_exponential",
    "fit_laplace",
    "fit_powerlaw_tail",
    "fit_loglog_slope",
    "fit_c_scaling",
]

#: Minimum tail sample count for the Hill estimator.
MIN_TAIL_SAMPLES = 100


@dataclass(frozen=True)
class FitResult:
    """Fitted family, named parameters, KS distance and sample bookkeeping."""

    family: str
    parameters: dict[str, float]
    sample_count: int
    ks_statistic: float | None = None
    xmin: float | None = None

    def parameter(self, name: str) -> float:
        return self.parameters[name]


def ks_statistic(samples, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Two-sided Kolmogorov-Smirnov distance sup |F_empirical - F|.

    ``cdf`` must be monotone on the sample range; the statistic always lies
    in [0, 1] and is 0 only when the theoretical cdf steps exactly through
    the empirical one at every sample point.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("KS statistic needs at least one sample")
    f = np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, n + 1) / n
    lower = np.arange(0, n) / n
    return float(max(np.max(np.abs(f - upper)), np.max(np.abs(f - lower))))


def fit_exponential(samples) -> FitResult:
    """ML exponential fit: rate = 1/mean, KS against the fitted cdf."""
    x = np.asarray(samples, dtype=float)
    if x.size < 10:
        raise ValueError("exponential fit needs at least 10 samples")
    if np.any(x <= 0.0):
        raise ValueError("exponential fit requires strictly positive samples")
    rate = 1.0 / float(x.mean())
    ks = ks_statistic(x, lambda t: 1.0 - np.exp(-rate * t))
    return FitResult(
        family="exponential",
        parameters={"rate": rate},
        sample_count=int(x.size),
        ks_statistic=ks,
    )


def _laplace_cdf(t: np.ndarray, loc: float, scale: float) -> np.ndarray:
    z = (t - loc) / scale
    return np.where(z < 0.0, 0.5 * np.exp(z), 1.0 - 0.5 * np.exp(-z))


def fit_laplace(samples) -> FitResult:
    """ML Laplace fit: location = median, scale = mean |deviation| from it.

    The median/MAD estimator stays robust when samples mix scales, as the
    pooled growth differences across turnover bins do.
    """
    x = np.asarray(samples, dtype=float)
    if x.size < 10:
        raise ValueError("Laplace fit needs at least 10 samples")
    loc = float(np.median(x))
    scale = float(np.mean(np.abs(x - loc)))
    if scale == 0.0:
        raise ValueError("degenerate sample: zero scale")
    ks = ks_statistic(x, lambda t: _laplace_cdf(t, loc, scale))
    return FitResult(
        family="laplace",
        parameters={"location": loc, "scale": scale},
        sample_count=int(x.size),
        ks_statistic=ks,
    )


def fit_powerlaw_tail(samples, xmin: float) -> FitResult:
    """Continuous ML (Hill) tail-exponent fit above a fixed threshold.

    Estimates the density exponent alpha in P(w) ~ w^-alpha from the m
    samples at or above xmin:  alpha = 1 + m / sum log(x_i/xmin).  Scale
    equivariant: rescaling samples and xmin together leaves alpha unchanged.
    KS is computed on the tail against the fitted Pareto.
    """
    x = np.asarray(samples, dtype=float)
    if xmin <= 0.0:
        raise ValueError(f"xmin must be positive, got {xmin!r}")
    tail = x[x >= xmin]
    m = tail.size
    if m < MIN_TAIL_SAMPLES:
        raise ValueError(
            f"insufficient tail: {m} samples above xmin={xmin!r} "
            f"(need >= {MIN_TAIL_SAMPLES})"
        )
    log_excess = float(np.sum(np.log(tail / xmin)))
    if log_excess == 0.0:
        raise ValueError("degenerate tail: all samples equal xmin")
    alpha = 1.0 + m / log_excess
    ks = ks_statistic(tail, lambda t: 1.0 - (xmin / t) ** (alpha - 1.0))
    return FitResult(
        family="powerlaw",
        parameters={"alpha": alpha},
        sample_count=int(m),
        ks_statistic=ks,
        xmin=float(xmin),
    )


def fit_loglog_slope(x, y) -> FitResult:
    """Least-squares slope and intercept of log y on log x."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.size != ya.size or xa.size < 3:
        raise ValueError("log-log fit needs equal-length inputs of size >= 3")
    if np.any(xa <= 0.0) or np.any(ya <= 0.0):
        raise ValueError("log-log fit requires strictly positive values")
    slope, intercept = np.polyfit(np.log(xa), np.log(ya), 1)
    return FitResult(
        family="loglinear",
        parameters={"slope": float(slope), "intercept": float(intercept)},
        sample_count=int(xa.size),
    )


def fit_c_scaling(n_values, c_values) -> FitResult:
    """Finite-size scaling fit C(N) = a + b / log(N), natural logarithm."""
    n_arr = np.asarray(n_values, dtype=float)
    c_arr = np.asarray(c_values, dtype=float)
    if n_arr.size != c_arr.size or np.unique(n_arr).size < 3:
        raise ValueError("scaling fit needs at least 3 distinct system sizes")
    if np.any(n_arr < 2) or np.any(c_arr <= 0.0):
        raise ValueError("system sizes must be >= 2 and constants positive")
    design = np.column_stack([np.ones_like(n_arr), 1.0 / np.log(n_arr)])
    coef, residual, *_ = np.linalg.lstsq(design, c_arr, rcond=None)
    resid_norm = float(np.sqrt(residual[0])) if residual.size else float(
        np.linalg.norm(c_arr - design @ coef)
    )
    return FitResult(
        family="c_scaling",
        parameters={
            "a": float(coef[0]),
            "b": float(coef[1]),
            "residual_norm": resid_norm,
        },
        sample_count=int(n_arr.size),
    )
