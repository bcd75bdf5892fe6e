"""Shares drawn uniformly from the simplex follow the Beta(1, n-1) marginal.

The redistribution step hands each of the n interacting firms a random share
of the pooled workforce.  Shares are sampled by normalizing negative logs of
uniforms, which is exactly uniform sampling on the simplex.  This script
draws shares at several group sizes and overlays the closed-form marginal
density (n-1)(1-x)^(n-2); at n = 2 the share is uniform on [0, 1].  It also
checks exchangeability: the first and last coordinates are indistinguishable.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from firmkinetics import (
    epsilon_marginal_pdf,
    ks_statistic,
    epsilon_marginal_cdf,
    sample_simplex_block,
    spawn_rng,
)

OUT = __import__("pathlib").Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

COUNT = 200_000

fig, axes = plt.subplots(1, 3, figsize=(12, 3.6), sharey=False)
for ax, n in zip(axes, (2, 5, 100)):
    shares = sample_simplex_block(n, COUNT, spawn_rng(1000 + n))
    first = shares[:, 0]
    ax.hist(first, bins=80, density=True, alpha=0.55, label=f"sampled (n={n})")
    grid = np.linspace(0.0, first.max(), 400)
    ax.plot(grid, epsilon_marginal_pdf(grid, n), "r-", lw=2, label="(n-1)(1-x)^(n-2)")
    ks = ks_statistic(first, lambda t: epsilon_marginal_cdf(t, n))
    ax.set_title(f"n={n}, KS={ks:.4f}")
    ax.set_xlabel("share")
    ax.legend(fontsize=8)

    last = np.sort(shares[:, -1])
    srt = np.sort(first)
    pool = np.concatenate([srt, last])
    two_sample = np.max(
        np.abs(
            np.searchsorted(srt, pool, side="right") / srt.size
            - np.searchsorted(last, pool, side="right") / last.size
        )
    )
    print(f"n={n}: marginal KS={ks:.4f}, first-vs-last coordinate KS={two_sample:.4f}")

axes[0].set_ylabel("density")
fig.tight_layout()
fig.savefig(OUT / "simplex_marginals.png", dpi=130)
print(f"wrote {OUT / 'simplex_marginals.png'}")
