import numpy as np
import pytest
from scipy.integrate import quad

from firmkinetics import (
    EconomyConfig,
    HypoExpSpec,
    TurnoverProfile,
    central_moment,
    conditional_dispersion,
    estimate_c,
    growth_series,
    histogram,
    hypoexp_cdf,
    hypoexp_mean,
    hypoexp_pdf,
    ks_statistic,
    mu_limit_pdf,
    run,
    spawn_rng,
    variance_prediction,
)
from firmkinetics.analytics import default_term_count
from firmkinetics.dynamics import SnapshotSeries

# ---------------------------------------------------------------- hypoexp


def test_single_term_is_plain_exponential():
    spec = HypoExpSpec(lam=0.5, k=1)
    assert hypoexp_pdf(0.0, spec) == pytest.approx(2.0)
    w = np.linspace(0.0, 5.0, 100)
    assert np.allclose(hypoexp_pdf(w, spec), 2.0 * np.exp(-2.0 * w), rtol=1e-12)


def test_two_term_density_matches_hand_formula_and_convolution():
    spec = HypoExpSpec(lam=0.5, k=2)  # rates 2 and 4
    w = np.linspace(0.0, 6.0, 400)
    hand = 4.0 * (np.exp(-2.0 * w) - np.exp(-4.0 * w))
    assert np.allclose(hypoexp_pdf(w, spec), hand, atol=1e-12)
    assert hypoexp_pdf(0.0, spec) == 0.0

    # independent oracle: numerical convolution of the two exponential pdfs
    def convolved(x):
        val, _ = quad(
            lambda s: 2.0 * np.exp(-2.0 * s) * 4.0 * np.exp(-4.0 * (x - s)), 0.0, x
        )
        return val

    for x in (0.1, 0.5, 1.3, 3.0):
        assert hypoexp_pdf(x, spec) == pytest.approx(convolved(x), rel=1e-9)


@pytest.mark.parametrize("lam", [0.1, 0.5, 0.9])
@pytest.mark.parametrize("k", [1, 5, 20])
def test_density_integrates_to_one(lam, k):
    spec = HypoExpSpec(lam=lam, k=k)
    upper = 50.0 * max(hypoexp_mean(spec), 1e-6)
    total, _ = quad(lambda x: hypoexp_pdf(x, spec), 0.0, upper, limit=300)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_truncation_tail_shrinks_monotonically():
    lam = 0.5
    grid = np.linspace(0.0, 12.0, 1500)
    sups = []
    for k in range(1, 13):
        a = hypoexp_pdf(grid, HypoExpSpec(lam=lam, k=k))
        b = hypoexp_pdf(grid, HypoExpSpec(lam=lam, k=k + 1))
        sups.append(np.max(np.abs(a - b)))
    sups = np.array(sups)
    assert np.all(np.diff(sups) < 0.0)
    # sup-norm gap decays at least geometrically with the neglected mass lam^k
    ratio = sups / lam ** np.arange(1, 13)
    assert ratio.max() < 3.0 * ratio[0]


def test_cdf_limits_and_monotonicity():
    spec = HypoExpSpec(lam=0.6, k=8)
    w = np.linspace(0.0, 30.0, 2000)
    vals = hypoexp_cdf(w, spec)
    assert vals[0] == pytest.approx(0.0, abs=1e-12)
    assert vals[-1] == pytest.approx(1.0, abs=1e-9)
    assert np.all(np.diff(vals) >= -1e-12)


def test_truncated_mean_closed_form():
    assert hypoexp_mean(HypoExpSpec(lam=0.5, k=3)) == pytest.approx(0.875, abs=1e-15)
    assert hypoexp_mean(HypoExpSpec(lam=0.0, k=1)) == 1.0
    lam, k = 0.5, 30
    assert abs(1.0 - hypoexp_mean(HypoExpSpec(lam=lam, k=k))) == pytest.approx(
        lam**k, rel=1e-9
    )
    # cross-check against the quadrature first moment
    spec = HypoExpSpec(lam=0.5, k=6)
    m1, _ = quad(lambda x: x * hypoexp_pdf(x, spec), 0.0, 60.0, limit=200)
    assert m1 == pytest.approx(hypoexp_mean(spec), abs=1e-8)


def test_one_based_indexing_mean():
    lam, k = 0.5, 4
    spec = HypoExpSpec(lam=lam, k=k, indexing="one")
    assert hypoexp_mean(spec) == pytest.approx(lam * (1 - lam**k), abs=1e-15)
    # rates start one power of lam higher
    assert spec.rates[0] == pytest.approx(1.0 / (lam * (1 - lam)))


def test_default_term_count_rule():
    assert default_term_count(0.5) == 30          # ceil(ln 1e-9 / ln 0.5)
    assert default_term_count(0.1) == 9
    assert default_term_count(0.9) == 64          # capped
    assert default_term_count(0.0) == 1


def test_duplicate_rates_rejected():
    spec = HypoExpSpec(lam=0.5, k=2)
    object.__setattr__(spec, "lam", 0.5)  # rates computed from lam; fake dupes below
    from firmkinetics.analytics import _log_weights

    with pytest.raises(ValueError):
        _log_weights(np.array([2.0, 2.0]))


def test_negative_support_rejected():
    spec = HypoExpSpec(lam=0.5, k=2)
    with pytest.raises(ValueError):
        hypoexp_pdf(-0.5, spec)
    with pytest.raises(ValueError):
        hypoexp_cdf(np.array([0.5, -1.0]), spec)


def test_reduced_run_matches_hypoexp_with_modest_truncation(reduced_half_run):
    # twelve terms already track the steady state of the lam = 0.5 map
    pooled = reduced_half_run.pooled_sizes()
    spec = HypoExpSpec(lam=0.5, k=12)
    ks = ks_statistic(pooled, lambda t: hypoexp_cdf(t, spec))
    assert ks < 0.01


# ---------------------------------------------------------------- moments


def test_central_moment_constant_vector_is_zero():
    exact = np.full(50, 3.5)  # dyadic value: the mean is exact in binary
    for order in (1, 2, 3, 5):
        assert central_moment(exact, order) == 0.0
    rounded = np.full(50, 3.7)  # non-dyadic: only zero to rounding
    for order in (1, 2, 3, 5):
        assert central_moment(rounded, order) == pytest.approx(0.0, abs=1e-12)


def test_central_moment_exponential_variance():
    rng = spawn_rng(31)
    x = -np.log(1.0 - rng.random(1_000_000))
    # sample variance of Exp(1): se = sqrt((m4 - m2^2)/M) = sqrt(8/M)
    assert abs(central_moment(x, 2) - 1.0) < 3 * np.sqrt(8 / x.size)


def test_central_moment_needs_samples():
    with pytest.raises(ValueError):
        central_moment([1.0], 2)
    with pytest.raises(ValueError):
        central_moment([1.0, 2.0], 0)


def test_variance_prediction_values():
    assert variance_prediction(0.0, "n_ary") == 1.0
    assert variance_prediction(0.0, "binary") == 1.0
    assert variance_prediction(0.5, "n_ary") == pytest.approx(1.0 / 3.0)
    assert variance_prediction(0.5, "binary") == pytest.approx(0.25)
    with pytest.raises(ValueError):
        variance_prediction(1.0, "n_ary")
    with pytest.raises(ValueError):
        variance_prediction(0.5, "ternary")


def test_mu_limit_pdf_values_and_normalization():
    assert mu_limit_pdf(0.0, 0.0) == pytest.approx(1.0)
    assert mu_limit_pdf(0.0, 0.5) == pytest.approx(2.0)
    total, _ = quad(lambda m: mu_limit_pdf(m, 0.3), 0.0, np.inf)
    assert total == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(ValueError):
        mu_limit_pdf(-1.0, 0.3)


# ---------------------------------------------------------------- growth


def _series_from_matrix(snaps, lambdas=None, stride=1):
    snaps = np.asarray(snaps, dtype=float)
    n = snaps.shape[1]
    cfg = EconomyConfig(
        firm_count=n,
        turnover=TurnoverProfile(kind="explicit", lambdas=np.zeros(n)),
        steps=snaps.shape[0] * stride,
        seed=0,
        burn_in=0,
        record_stride=stride,
        mode="reduced",
    )
    lams = np.zeros(n) if lambdas is None else np.asarray(lambdas, dtype=float)
    times = np.arange(1, snaps.shape[0] + 1) * stride
    return SnapshotSeries(times=times, snapshots=snaps, lambdas=lams, config=cfg)


def test_growth_constant_trajectory():
    gs = growth_series(_series_from_matrix(np.ones((5, 3))))
    assert np.all(gs.ratio == 1.0)
    assert np.all(gs.log_ratio == 0.0)
    assert np.all(gs.difference == 0.0)
    assert not gs.undefined.any()


def test_growth_hand_computed_values():
    snaps = np.array([[1.0, 2.0], [2.0, 1.0], [4.0, 3.0]])
    gs = growth_series(_series_from_matrix(snaps))
    assert np.allclose(gs.ratio, [[2.0, 0.5], [2.0, 3.0]], atol=0)
    assert np.allclose(gs.log_ratio, np.log([[2.0, 0.5], [2.0, 3.0]]), atol=0)
    assert np.allclose(gs.difference, [[1.0, -1.0], [2.0, 2.0]], atol=0)
    assert np.allclose(gs.mean_sizes, [7.0 / 3.0, 2.0], atol=0)


def test_growth_zero_sizes_flagged_not_dropped():
    snaps = np.array([[1.0, 0.0], [2.0, 1.0], [1.0, 2.0]])
    gs = growth_series(_series_from_matrix(snaps))
    assert gs.undefined[0, 1]
    assert np.isnan(gs.ratio[0, 1]) and np.isnan(gs.log_ratio[0, 1])
    assert gs.difference[0, 1] == 1.0  # difference stays defined
    assert np.isfinite(gs.ratio[1, 1])


def test_growth_requires_consecutive_recordings():
    with pytest.raises(ValueError):
        growth_series(_series_from_matrix(np.ones((4, 2)), stride=3))
    with pytest.raises(ValueError):
        growth_series(_series_from_matrix(np.ones((1, 2))))


def test_zero_turnover_difference_is_laplace():
    cfg = EconomyConfig(
        firm_count=200,
        turnover=TurnoverProfile(kind="constant", lam=0.0),
        steps=5_100,
        burn_in=100,
        record_stride=1,
        seed=33,
        mode="reduced",
    )
    gs = growth_series(run(cfg))
    from firmkinetics import fit_laplace

    fit = fit_laplace(gs.difference.ravel())
    assert fit.parameter("location") == pytest.approx(0.0, abs=0.01)
    assert fit.parameter("scale") == pytest.approx(1.0, abs=0.01)
    assert fit.ks_statistic < 0.01


# ---------------------------------------------------------------- dispersion


def test_dispersion_constant_trajectories_have_zero_sd():
    gs = growth_series(_series_from_matrix(np.ones((6, 4)), lambdas=[0.1, 0.2, 0.3, 0.4]))
    curve = conditional_dispersion(gs, grouping="by_lambda", bins=4)
    assert np.allclose(curve.dispersion, 0.0, atol=0)
    assert np.allclose(curve.centers, [0.1, 0.2, 0.3, 0.4], atol=0)
    assert np.all(curve.counts == 5)


def test_dispersion_empty_equal_width_bins_marked():
    lambdas = np.array([0.0, 0.01, 0.02, 0.9])
    rng = spawn_rng(8)
    snaps = 1.0 + rng.random((30, 4))
    gs = growth_series(_series_from_matrix(snaps, lambdas=lambdas))
    curve = conditional_dispersion(
        gs, grouping="by_lambda", bins=5, binning="equal_width"
    )
    assert np.isnan(curve.dispersion[2])  # the (0.36, 0.54] bin holds no firm
    assert curve.counts[2] == 0
    assert np.isfinite(curve.dispersion[0])


def test_dispersion_by_mean_size_grouping():
    rng = spawn_rng(9)
    snaps = np.abs(rng.normal(loc=[1.0, 5.0, 20.0], scale=0.1, size=(40, 3))) + 0.1
    gs = growth_series(_series_from_matrix(snaps))
    curve = conditional_dispersion(gs, grouping="by_mean_size", bins=3)
    assert np.all(np.diff(curve.centers) > 0)


def test_dispersion_rejects_unknown_arguments():
    gs = growth_series(_series_from_matrix(np.ones((3, 2))))
    with pytest.raises(ValueError):
        conditional_dispersion(gs, grouping="by_height", bins=2)
    with pytest.raises(ValueError):
        conditional_dispersion(gs, grouping="by_lambda", bins=0)
    with pytest.raises(ValueError):
        conditional_dispersion(gs, grouping="by_lambda", bins=2, measure="velocity")
    with pytest.raises(ValueError):
        conditional_dispersion(gs, grouping="by_lambda", bins=2, statistic="midhinge")


# ---------------------------------------------------------------- constant C


def test_estimate_c_zero_rates_recover_unit_mean():
    lambdas = np.zeros(6)
    snaps = np.ones((10, 6))
    series = _series_from_matrix(snaps, lambdas=lambdas)
    est = estimate_c(series)
    assert np.allclose(est.per_firm, 1.0, atol=0)
    assert est.aggregate == pytest.approx(1.0)


def test_estimate_c_requires_distributed_profile():
    cfg = EconomyConfig(
        firm_count=4,
        turnover=TurnoverProfile(kind="constant", lam=0.5),
        steps=10,
        seed=0,
        mode="reduced",
    )
    series = SnapshotSeries(
        times=np.array([1, 2]),
        snapshots=np.ones((2, 4)),
        lambdas=np.full(4, 0.5),
        config=cfg,
    )
    with pytest.raises(ValueError):
        estimate_c(series)


# ---------------------------------------------------------------- histogram


def test_histogram_density_integrates_to_one():
    rng = spawn_rng(10)
    for scale in ("linear", "log"):
        samples = np.exp(rng.normal(size=20_000))
        hist = histogram(samples, bins=64, scale=scale)
        mass = float(np.sum(hist.density * np.diff(hist.edges)))
        assert mass == pytest.approx(1.0, abs=1e-9)
        assert hist.counts.sum() == 20_000


def test_histogram_rejects_empty_and_bad_scale():
    with pytest.raises(ValueError):
        histogram([])
    with pytest.raises(ValueError):
        histogram([1.0, 2.0], scale="sqrt")
