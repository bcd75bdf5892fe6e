"""Growth-rate fluctuations: decay with retention, power law in size, shapes.

Per-firm growth is summarized three ways per transition: the ratio
r = w(t+1)/w(t), its log, and the difference g = w(t+1) - w(t).  Three
regularities emerge under distributed retention rates:

* the dispersion of r decays roughly exponentially in the retention rate
  (guide line 5 exp(-4 lam));
* the dispersion of log r falls as a power of mean firm size with slope -1;
* g is Laplace (two-sided exponential) for low-retention firms and collapses
  to a one-sided exponential as retention approaches 1.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from firmkinetics import (
    EconomyConfig,
    TurnoverProfile,
    conditional_dispersion,
    fit_laplace,
    fit_loglog_slope,
    growth_series,
    run,
)

OUT = __import__("pathlib").Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

cfg = EconomyConfig(
    firm_count=2000,
    turnover=TurnoverProfile(kind="uniform_iid"),
    steps=60_500,
    burn_in=60_000,
    record_stride=1,
    seed=43,
    mode="coupled",
)
gs = growth_series(run(cfg))
print(f"growth series over {gs.transitions} transitions, {gs.lambdas.size} firms")

fig, axes = plt.subplots(1, 3, figsize=(13.5, 4))

# dispersion of r against retention rate, with the exponential guide
curve = conditional_dispersion(
    gs, grouping="by_lambda", bins=40, measure="ratio", statistic="firm_median"
)
mask = curve.centers <= 0.9
rate, logA = np.polyfit(curve.centers[mask], np.log(curve.dispersion[mask]), 1)
print(f"sd(r) decay rate in retention: {-rate:.2f}")
axes[0].semilogy(curve.centers, curve.dispersion, "o", ms=4)
grid = np.linspace(0, 0.95, 100)
axes[0].semilogy(grid, 5.0 * np.exp(-4.0 * grid), "k--", label="5 exp(-4 lam)")
axes[0].set_xlabel("retention rate")
axes[0].set_ylabel("sd of growth ratio")
axes[0].legend()

# dispersion of log r against mean size on log-log axes
curve_s = conditional_dispersion(
    gs, grouping="by_mean_size", bins=40, measure="log_ratio"
)
ok = np.isfinite(curve_s.dispersion) & (curve_s.centers > 0)
slope = fit_loglog_slope(curve_s.centers[ok], curve_s.dispersion[ok]).parameter("slope")
print(f"sd(log r) vs size slope: {slope:.2f}")
axes[1].loglog(curve_s.centers, curve_s.dispersion, "o", ms=4)
guide = curve_s.centers[ok]
axes[1].loglog(guide, curve_s.dispersion[ok][0] * guide[0] / guide, "k--",
               label=f"slope -1 (fit {slope:.2f})")
axes[1].set_xlabel("mean firm size")
axes[1].set_ylabel("sd of log growth ratio")
axes[1].legend()

# growth-difference shapes by retention band
for lo, hi, color in ((0.0, 0.2, "C0"), (0.4, 0.6, "C1"), (0.9, 1.0, "C3")):
    sel = (gs.lambdas >= lo) & (gs.lambdas < hi)
    g = gs.difference[:, sel].ravel()
    g = g[np.abs(g) < np.quantile(np.abs(g), 0.999)]
    counts, edges = np.histogram(g, bins=120, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    fit = fit_laplace(g)
    axes[2].semilogy(centers, counts, ".", ms=3, color=color,
                     label=f"rates [{lo},{hi}) KS={fit.ks_statistic:.3f}")
    print(f"rates [{lo},{hi}): Laplace KS={fit.ks_statistic:.4f}")
axes[2].set_xlabel("growth difference g")
axes[2].set_ylabel("density")
axes[2].set_ylim(bottom=1e-4)
axes[2].legend(fontsize=8)

fig.tight_layout()
fig.savefig(OUT / "growth_statistics.png", dpi=130)
print(f"wrote {OUT / 'growth_statistics.png'}")
