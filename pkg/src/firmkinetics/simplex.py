"""Uniform sampling on the unit simplex and the closed-form share marginals.

The sampler produces a vector of n nonnegative shares summing to one, drawn
uniformly from the simplex: draw n uniforms on (0, 1], negate their logs, and
normalize by the sum.  Each share is then marginally Beta(1, n-1) distributed,

    f(eps) = (n - 1) * (1 - eps)**(n - 2),      F(theta) = 1 - (1 - theta)**(n - 1),

which reduces to the uniform law on [0, 1] at n = 2.  These closed forms serve
as the analytical oracle for the redistribution dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SimplexSample",
    "sample_simplex",
    "sample_simplex_block",
    "epsilon_marginal_pdf",
    "epsilon_marginal_cdf",
]

#: Relative tolerance on the share-sum invariant.
SUM_RTOL = 1e-12


@dataclass(frozen=True)
class SimplexSample:
    """A single point on the unit simplex: n shares in [0, 1] summing to 1."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if w.ndim != 1 or w.size < 2:
            raise ValueError(f"simplex sample needs at least 2 shares, got shape {w.shape}")
        if np.any(w < 0.0) or np.any(w > 1.0):
            raise ValueError("simplex shares must lie in [0, 1]")
        total = float(w.sum())
        if abs(total - 1.0) > SUM_RTOL:
            raise ValueError(f"simplex shares must sum to 1 (got {total!r})")

    @property
    def n(self) -> int:
        return self.weights.size


def _check_arity(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"interaction arity must be an integer >= 2, got {n!r}")


def sample_simplex(n: int, rng) -> SimplexSample:
    """Draw one uniform sample from the unit n-simplex.

    ``rng`` is anything exposing ``random(size) -> array of uniforms on [0, 1)``
    (normally a seeded ``numpy.random.Generator``; tests may inject a stub with
    fixed draws).  Draws equal to exactly 0 are rejected and redrawn since the
    log transform is singular there.
    """
    _check_arity(n)
    u = np.asarray(rng.random(n), dtype=float)
    while True:
        zero = u == 0.0
        if not zero.any():
            break
        u = u.copy()
        u[zero] = rng.random(int(zero.sum()))
    e = -np.log(u)
    return SimplexSample(e / e.sum())


def sample_simplex_block(n: int, count: int, rng) -> np.ndarray:
    """Draw ``count`` independent simplex samples as a (count, n) array.

    Batch counterpart of :func:`sample_simplex` used by the simulation hot
    loop; rows are produced in the same per-row draw order.
    """
    _check_arity(n)
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count!r}")
    # -log(0) = inf poisons its row sum; redraw such rows (probability ~2**-53)
    with np.errstate(divide="ignore"):
        u = rng.random((count, n))
        e = -np.log(u)
        rowsum = e.sum(axis=1)
        bad = ~np.isfinite(rowsum)
        while bad.any():
            idx = np.nonzero(bad)[0]
            e[idx] = -np.log(rng.random((idx.size, n)))
            rowsum[idx] = e[idx].sum(axis=1)
            bad = ~np.isfinite(rowsum)
    e /= rowsum[:, None]
    return e


def epsilon_marginal_pdf(eps, n: int):
    """Density (n-1)(1-eps)^(n-2) of a single share; scalar or array ``eps``."""
    _check_arity(n)
    eps_arr = np.asarray(eps, dtype=float)
    if np.any(eps_arr < 0.0) or np.any(eps_arr > 1.0):
        raise ValueError("share value outside [0, 1]")
    out = (n - 1) * (1.0 - eps_arr) ** (n - 2)
    return float(out) if np.ndim(eps) == 0 else out


def epsilon_marginal_cdf(theta, n: int):
    """Distribution function 1 - (1-theta)^(n-1); scalar or array ``theta``."""
    _check_arity(n)
    th = np.asarray(theta, dtype=float)
    if np.any(th < 0.0) or np.any(th > 1.0):
        raise ValueError("share value outside [0, 1]")
    out = 1.0 - (1.0 - th) ** (n - 1)
    return float(out) if np.ndim(theta) == 0 else out
