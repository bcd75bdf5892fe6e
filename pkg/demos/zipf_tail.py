"""Per-firm retention rates turn the size distribution into a power law.

When each firm keeps its own fraction lam_i ~ uniform[0, 1) of workers, the
steady state satisfies (1 - lam_i) E(w_i) = C for a single constant C, which
maps the uniform rate distribution onto a size density falling as w^-2
(Zipf's law).  This script runs a mid-sized economy, plots the pooled size
distribution on log-log axes with the w^-2 guide, and fits the tail exponent
above the 90th percentile with the Hill estimator.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from firmkinetics import (
    EconomyConfig,
    TurnoverProfile,
    fit_powerlaw_tail,
    histogram,
    run,
)

OUT = __import__("pathlib").Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

cfg = EconomyConfig(
    firm_count=2000,
    turnover=TurnoverProfile(kind="uniform_iid"),
    steps=300_000,
    burn_in=100_000,
    record_stride=200,
    seed=31,
    mode="coupled",
)
series = run(cfg)
pooled = series.pooled_sizes()
print(f"recorded {series.recorded} snapshots, {pooled.size} pooled sizes")

xmin = float(np.quantile(pooled, 0.90))
fit = fit_powerlaw_tail(pooled, xmin)
alpha = fit.parameter("alpha")
print(f"Hill tail exponent above xmin={xmin:.3f}: alpha={alpha:.3f} "
      f"(KS on tail {fit.ks_statistic:.4f})")

hist = histogram(pooled[pooled > 0], bins=60, scale="log")
fig, ax = plt.subplots(figsize=(6, 4.5))
ax.loglog(hist.centers, hist.density, "o", ms=4, label="simulated sizes")
guide = hist.centers[hist.centers > xmin / 3]
ax.loglog(guide, 0.35 * guide**-2.0, "k--", label="w^-2 guide")
ax.axvline(xmin, color="r", ls=":", label=f"tail start (q90), alpha={alpha:.2f}")
ax.set_xlabel("firm size w")
ax.set_ylabel("density")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "zipf_tail.png", dpi=130)
print(f"wrote {OUT / 'zipf_tail.png'}")
