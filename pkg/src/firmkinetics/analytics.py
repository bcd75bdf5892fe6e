"""Closed-form steady-state oracles and empirical summaries.

The reduced constant-turnover map w <- lam*w + mu with Exp(mean 1-lam)
innovations has stationary law w = sum_j lam^j mu_j: a sum of independent
exponentials with distinct rates phi_j = 1/(lam^j (1-lam)) — a hypoexponential
distribution.  Truncating the sum at k terms gives the computable density

    f(w) = sum_i W_i phi_i exp(-phi_i w),   W_i = prod_{j != i} phi_j/(phi_j - phi_i),

whose mean is 1 - lam^k.  The alternating product weights are evaluated in
log magnitude with sign tracking; they overflow float64 well before k = 20
if formed naively.

Also here: central moments, the variance predictions (1-lam)/(1+lam) for the
full interaction and (1-lam)/(1+2 lam) for the binary one, the exponential
innovation limit law, per-firm growth-rate series (ratio, log ratio,
difference), conditional dispersion curves, the redistribution-constant
estimator (1-lam_i) E(w_i), and plain histograms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .dynamics import SnapshotSeries, TurnoverProfile

__all__ = [
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
]

#: Truncation rule: keep terms until the neglected mean mass drops below this.
TRUNCATION_MASS = 1e-9

#: Hard cap on hypoexponential terms (weight evaluation degrades beyond this).
MAX_TERMS = 64


# --------------------------------------------------------------------------
# hypoexponential steady state
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HypoExpSpec:
    """Truncated stationary law of the reduced constant-turnover map.

    ``indexing`` selects the rate convention: ``zero`` uses
    phi_j = 1/(lam^j (1-lam)) for j = 0..k-1, whose truncated mean 1 - lam^k
    converges to the conserved per-firm mean of 1; ``one`` starts the series
    at j = 1 (mean lam(1 - lam^k)), exposed for comparison only.
    """

    lam: float
    k: int
    indexing: Literal["zero", "one"] = "zero"

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"turnover rate must lie in [0, 1), got {self.lam!r}")
        if self.lam == 0.0 and (self.k != 1 or self.indexing != "zero"):
            # zero turnover degenerates to a single exponential term
            raise ValueError("lam = 0 admits only k = 1 with zero indexing")
        if self.k < 1:
            raise ValueError(f"term count must be >= 1, got {self.k!r}")
        if self.k > MAX_TERMS:
            raise ValueError(f"term count capped at {MAX_TERMS}, got {self.k!r}")
        if self.indexing not in ("zero", "one"):
            raise ValueError(f"indexing must be 'zero' or 'one', got {self.indexing!r}")

    @classmethod
    def for_turnover(cls, lam: float, k: int | None = None) -> "HypoExpSpec":
        """Spec with the default truncation: smallest k whose neglected mean
        mass lam^k is below ``TRUNCATION_MASS``, capped at ``MAX_TERMS``."""
        if k is None:
            k = default_term_count(lam)
        return cls(lam=lam, k=k)

    @property
    def rates(self) -> np.ndarray:
        j0 = 0 if self.indexing == "zero" else 1
        j = np.arange(j0, j0 + self.k)
        return 1.0 / (self.lam**j * (1.0 - self.lam))


def default_term_count(lam: float) -> int:
    """Smallest k with lam^k < TRUNCATION_MASS, capped at MAX_TERMS."""
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"turnover rate must lie in [0, 1), got {lam!r}")
    if lam == 0.0:
        return 1
    k = int(np.ceil(np.log(TRUNCATION_MASS) / np.log(lam)))
    return max(1, min(MAX_TERMS, k))


def _log_weights(rates: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Log magnitude and sign of W_i = prod_{j != i} phi_j / (phi_j - phi_i)."""
    k = rates.size
    if np.unique(rates).size != k:
        raise ValueError("hypoexponential rates must be distinct")
    logw = np.zeros(k)
    sign = np.ones(k)
    for i in range(k):
        diff = np.delete(rates - rates[i], i)
        others = np.delete(rates, i)
        logw[i] = np.sum(np.log(others) - np.log(np.abs(diff)))
        sign[i] = np.prod(np.sign(diff))
    return logw, sign


_EVAL_CHUNK = 65_536


def _mixture_sum(w_arr: np.ndarray, rates: np.ndarray, log_coef: np.ndarray,
                 sign: np.ndarray) -> np.ndarray:
    """sum_i sign_i exp(log_coef_i - rate_i w), chunked to bound memory."""
    out = np.empty(w_arr.size)
    for start in range(0, w_arr.size, _EVAL_CHUNK):
        chunk = w_arr[start : start + _EVAL_CHUNK]
        terms = sign * np.exp(log_coef - np.outer(chunk, rates))
        out[start : start + _EVAL_CHUNK] = terms.sum(axis=1)
    return out


def hypoexp_pdf(w, spec: HypoExpSpec):
    """Density of the k-term hypoexponential at w >= 0 (scalar or array).

    Cancellation noise can leave residuals of order -1e-12 near w = 0 for
    close rate ladders (lam near 1); those are clipped to exactly 0.
    """
    rates = spec.rates
    logw, sign = _log_weights(rates)
    w_arr = np.atleast_1d(np.asarray(w, dtype=float))
    if np.any(w_arr < 0.0):
        raise ValueError("hypoexponential density is supported on w >= 0")
    out = np.maximum(_mixture_sum(w_arr, rates, logw + np.log(rates), sign), 0.0)
    return float(out[0]) if np.ndim(w) == 0 else out


def hypoexp_cdf(w, spec: HypoExpSpec):
    """Distribution function F(w) = 1 - sum_i W_i exp(-phi_i w), clipped to [0, 1]."""
    rates = spec.rates
    logw, sign = _log_weights(rates)
    w_arr = np.atleast_1d(np.asarray(w, dtype=float))
    if np.any(w_arr < 0.0):
        raise ValueError("hypoexponential law is supported on w >= 0")
    survival = _mixture_sum(w_arr, rates, logw, sign)
    out = np.clip(1.0 - survival, 0.0, 1.0)
    return float(out[0]) if np.ndim(w) == 0 else out


def hypoexp_mean(spec: HypoExpSpec) -> float:
    """Exact truncated mean: 1 - lam^k (zero indexing) or lam(1 - lam^k)."""
    base = 1.0 - spec.lam**spec.k
    return base if spec.indexing == "zero" else spec.lam * base


# --------------------------------------------------------------------------
# moments and limit laws
# --------------------------------------------------------------------------

def central_moment(samples, order: int) -> float:
    """Empirical central moment of the given order about the sample mean."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise ValueError("central moment needs at least 2 samples")
    if order < 1:
        raise ValueError(f"moment order must be >= 1, got {order!r}")
    return float(np.mean((x - x.mean()) ** order))


def variance_prediction(lam: float, interaction: Literal["n_ary", "binary"]) -> float:
    """Steady-state variance of firm size at constant turnover.

    Full interaction gives (1-lam)/(1+lam); binary exchange gives
    (1-lam)/(1+2 lam).  Both equal 1 at lam = 0, where the two interaction
    schemes share the same exponential steady state.
    """
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"turnover rate must lie in [0, 1), got {lam!r}")
    if interaction == "n_ary":
        return (1.0 - lam) / (1.0 + lam)
    if interaction == "binary":
        return (1.0 - lam) / (1.0 + 2.0 * lam)
    raise ValueError(f"interaction must be 'n_ary' or 'binary', got {interaction!r}")


def mu_limit_pdf(mu, lam: float):
    """Large-N innovation law: psi*exp(-psi*mu) with psi = 1/(1-lam)."""
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"turnover rate must lie in [0, 1), got {lam!r}")
    mu_arr = np.asarray(mu, dtype=float)
    if np.any(mu_arr < 0.0):
        raise ValueError("innovation density is supported on mu >= 0")
    psi = 1.0 / (1.0 - lam)
    out = psi * np.exp(-psi * mu_arr)
    return float(out) if np.ndim(mu) == 0 else out


# --------------------------------------------------------------------------
# growth-rate series
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthSeries:
    """Per-firm growth measures over consecutive recorded transitions.

    ``ratio`` r(t) = w(t+1)/w(t), ``log_ratio`` log r, and ``difference``
    g(t) = w(t+1) - w(t), each (transitions x firms).  Transitions whose
    denominator w(t) is zero are NaN in ratio/log_ratio and flagged True in
    ``undefined`` rather than dropped.  ``lambdas`` and ``mean_sizes`` carry
    the per-firm metadata the dispersion analyses group by.
    """

    ratio: np.ndarray
    log_ratio: np.ndarray
    difference: np.ndarray
    undefined: np.ndarray
    lambdas: np.ndarray
    mean_sizes: np.ndarray

    @property
    def transitions(self) -> int:
        return self.ratio.shape[0]

    def measure(self, name: Literal["ratio", "log_ratio", "difference"]) -> np.ndarray:
        if name not in ("ratio", "log_ratio", "difference"):
            raise ValueError(f"unknown growth measure {name!r}")
        return getattr(self, name)


def growth_series(series: SnapshotSeries) -> GrowthSeries:
    """Compute r, log r and g per firm from consecutively recorded snapshots.

    Requires record_stride = 1 so transitions match single time steps, and at
    least two snapshots.
    """
    if series.config.record_stride != 1:
        raise ValueError(
            "growth series needs consecutive recordings "
            f"(record_stride=1, got {series.config.record_stride})"
        )
    if series.recorded < 2:
        raise ValueError("growth series needs at least 2 recorded snapshots")
    prev = series.snapshots[:-1]
    nxt = series.snapshots[1:]
    undefined = prev == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(undefined, np.nan, nxt / prev)
        log_ratio = np.log(ratio)
    difference = nxt - prev
    return GrowthSeries(
        ratio=ratio,
        log_ratio=log_ratio,
        difference=difference,
        undefined=undefined,
        lambdas=series.lambdas.copy(),
        mean_sizes=series.snapshots.mean(axis=0),
    )


# --------------------------------------------------------------------------
# conditional dispersion
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DispersionCurve:
    """Dispersion of a growth measure by firm group: bin centers, dispersion
    values (NaN marks empty bins), and per-bin sample counts."""

    centers: np.ndarray
    dispersion: np.ndarray
    counts: np.ndarray
    grouping: str
    measure: str
    statistic: str


def conditional_dispersion(
    gs: GrowthSeries,
    grouping: Literal["by_lambda", "by_mean_size"],
    bins: int,
    measure: Literal["ratio", "log_ratio", "difference"] = "ratio",
    statistic: Literal["pooled", "firm_median"] = "pooled",
    binning: Literal["equal_count", "equal_width"] = "equal_count",
) -> DispersionCurve:
    """Bin firms by turnover rate or by time-mean size and return the
    dispersion of a growth measure per bin.

    ``pooled`` takes the standard deviation over every (transition, firm)
    sample in the bin.  ``firm_median`` takes the median over firms of the
    per-firm standard deviation; the ratio measure has infinite population
    variance for turnover rates near zero, where the pooled statistic is
    dominated by the largest sampled 1/w and the robust variant is the
    stable choice.  Equal-count bins are the default since the size
    distribution's heavy tail starves equal-width bins; empty bins (possible
    only with equal width) are emitted as NaN, never dropped.
    """
    if grouping == "by_lambda":
        key = gs.lambdas
    elif grouping == "by_mean_size":
        key = gs.mean_sizes
    else:
        raise ValueError(f"unknown grouping {grouping!r}")
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins!r}")
    values = gs.measure(measure)
    if statistic not in ("pooled", "firm_median"):
        raise ValueError(f"unknown statistic {statistic!r}")

    if binning == "equal_count":
        order = np.argsort(key, kind="stable")
        groups = np.array_split(order, bins)
    elif binning == "equal_width":
        edges = np.linspace(key.min(), key.max(), bins + 1)
        which = np.clip(np.digitize(key, edges[1:-1]), 0, bins - 1)
        groups = [np.nonzero(which == b)[0] for b in range(bins)]
    else:
        raise ValueError(f"unknown binning {binning!r}")

    centers = np.empty(bins)
    disp = np.empty(bins)
    counts = np.empty(bins, dtype=np.int64)
    for b, idx in enumerate(groups):
        if idx.size == 0:
            centers[b] = np.nan
            disp[b] = np.nan
            counts[b] = 0
            continue
        centers[b] = key[idx].mean()
        block = values[:, idx]
        finite = np.isfinite(block)
        counts[b] = int(finite.sum())
        if counts[b] < 2:
            disp[b] = np.nan
        elif statistic == "pooled":
            disp[b] = np.nanstd(block)
        else:
            disp[b] = float(np.nanmedian(np.nanstd(block, axis=0)))
    return DispersionCurve(
        centers=centers,
        dispersion=disp,
        counts=counts,
        grouping=grouping,
        measure=measure,
        statistic=statistic,
    )


# --------------------------------------------------------------------------
# redistribution constant
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CEstimate:
    """Per-firm products (1-lam_i)*mean(w_i) and their population mean.

    At steady state the product is the same constant C for every firm, which
    is what makes the size distribution a power law under uniformly
    distributed turnover rates.
    """

    lambdas: np.ndarray
    per_firm: np.ndarray
    aggregate: float


def estimate_c(series: SnapshotSeries, profile: TurnoverProfile | None = None) -> CEstimate:
    """Estimate the redistribution constant from a distributed-turnover run.

    Returns the per-firm product (1-lam_i) times the time-mean size (flat in
    lam_i at steady state) and its population mean as the aggregate estimate.
    Recorded snapshots are used as given; a firm's autocorrelation time is
    1/(1 - lam_i) steps, so recording with a stride of at least
    1/(1 - max lam_i) keeps pooled time samples weakly correlated (guidance,
    not enforced).
    """
    profile = profile if profile is not None else series.config.turnover
    if not profile.is_distributed:
        raise ValueError("redistribution constant requires a distributed profile")
    if series.recorded == 0:
        raise ValueError("series has no recorded snapshots")
    lambdas = series.lambdas
    wbar = series.snapshots.mean(axis=0)
    per_firm = (1.0 - lambdas) * wbar
    return CEstimate(
        lambdas=lambdas.copy(),
        per_firm=per_firm,
        aggregate=float(per_firm.mean()),
    )


# --------------------------------------------------------------------------
# histograms
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Histogram:
    """Binned sample summary; density mode integrates to 1."""

    edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray
    scale: str

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])


def histogram(
    samples,
    bins: int = 100,
    scale: Literal["linear", "log"] = "linear",
    range_: tuple[float, float] | None = None,
) -> Histogram:
    """Histogram with linear or logarithmic bin edges.

    Log scale requires strictly positive samples and spaces edges
    geometrically, which keeps heavy-tailed size distributions resolved.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("histogram needs at least one sample")
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins!r}")
    lo, hi = range_ if range_ is not None else (float(x.min()), float(x.max()))
    if scale == "log":
        if lo <= 0.0:
            positive = x[x > 0.0]
            if positive.size == 0:
                raise ValueError("log-scale histogram needs positive samples")
            lo = float(positive.min())
            x = positive
        edges = np.geomspace(lo, hi, bins + 1)
    elif scale == "linear":
        edges = np.linspace(lo, hi, bins + 1)
    else:
        raise ValueError(f"unknown scale {scale!r}")
    if edges[0] == edges[-1]:
        edges = np.linspace(edges[0] - 0.5, edges[-1] + 0.5, bins + 1)
    counts, _ = np.histogram(x, bins=edges)
    density, _ = np.histogram(x, bins=edges, density=True)
    return Histogram(edges=edges, counts=counts, density=density, scale=scale)
