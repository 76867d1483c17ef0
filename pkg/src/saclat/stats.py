"""Goodness-of-fit machinery: Kolmogorov-Smirnov tests, Q-Q points, ANOVA.

K-S p-values use the asymptotic Kolmogorov distribution with the effective
sample size n_a*n_b/(n_a+n_b) (or n for the one-sample test). That is the
appropriate regime here, where validation samples run to thousands; exact
small-sample p-values are out of scope.
"""

from __future__ import annotations

from typing import Callable, Sequence, Union

import numpy as np
from scipy.special import kolmogorov
from scipy.stats import f as f_dist

__all__ = ["ks_two_sample", "ks_one_sample", "qq_points", "one_way_anova"]

QQ_BAND_LEVELS = (0.025, 0.975)  # central 95% highlight for Q-Q plots


def _as_sample(x, name: str = "sample") -> np.ndarray:
    arr = np.asarray(x, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def ks_two_sample(a, b) -> tuple[float, float]:
    """Sup-distance between the two ECDFs, with its asymptotic p-value."""
    a = np.sort(_as_sample(a, "a"))
    b = np.sort(_as_sample(b, "b"))
    grid = np.concatenate([a, b])
    ecdf_a = np.searchsorted(a, grid, side="right") / a.size
    ecdf_b = np.searchsorted(b, grid, side="right") / b.size
    d = float(np.max(np.abs(ecdf_a - ecdf_b)))
    n_eff = a.size * b.size / (a.size + b.size)
    return d, float(kolmogorov(np.sqrt(n_eff) * d))


def ks_one_sample(a, cdf: Callable) -> tuple[float, float]:
    """Sample ECDF against an analytic CDF callable."""
    a = np.sort(_as_sample(a, "a"))
    n = a.size
    f = np.asarray(cdf(a), dtype=float)
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(0, n) / n
    d = float(max(upper.max(), lower.max()))
    return d, float(kolmogorov(np.sqrt(n) * d))


def qq_points(a, b: Union[Sequence, Callable], quantiles: int = 100):
    """Paired quantiles of a sample against a sample or an analytic CDF.

    Quantile levels are (i - 0.5)/quantiles. Returns (points, band): points
    is a (quantiles, 2) array of (q_a, q_b) pairs; band holds the pairs at
    the 2.5% and 97.5% levels, the endpoints of the central-95% stretch
    that Q-Q plots highlight. Sample quantiles use the linearly
    interpolated ECDF inverse; an analytic CDF is inverted by bisection.
    """
    if quantiles < 1:
        raise ValueError("quantiles must be >= 1")
    a = _as_sample(a, "a")
    levels = (np.arange(quantiles) + 0.5) / quantiles
    q_a = np.quantile(a, levels)
    band_a = np.quantile(a, QQ_BAND_LEVELS)
    if callable(b):
        q_b = np.array([_invert_cdf(b, lv) for lv in levels])
        band_b = np.array([_invert_cdf(b, lv) for lv in QQ_BAND_LEVELS])
    else:
        b_arr = _as_sample(b, "b")
        q_b = np.quantile(b_arr, levels)
        band_b = np.quantile(b_arr, QQ_BAND_LEVELS)
    points = np.column_stack([q_a, q_b])
    band = np.column_stack([band_a, band_b])
    return points, band


def _invert_cdf(cdf: Callable, level: float) -> float:
    lo, hi = 0.0, 1.0
    while cdf(hi) < level:
        hi *= 2.0
        if hi > 1e12:
            raise ArithmeticError("CDF inversion bracket expansion failed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cdf(mid) < level:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def one_way_anova(groups: Sequence) -> tuple[float, float]:
    """Between/within mean-square ratio and its F-distribution p-value."""
    if len(groups) < 2:
        raise ValueError("need at least 2 groups")
    gs = [_as_sample(g, f"group {i}") for i, g in enumerate(groups)]
    if any(g.size < 2 for g in gs):
        raise ValueError("every group needs at least 2 values")
    all_values = np.concatenate(gs)
    grand = all_values.mean()
    ss_between = sum(g.size * (g.mean() - grand) ** 2 for g in gs)
    ss_within = sum(float(((g - g.mean()) ** 2).sum()) for g in gs)
    df_between = len(gs) - 1
    df_within = all_values.size - len(gs)
    if ss_within <= 0:
        raise ValueError("degenerate groups: zero within-group variance")
    f_stat = (ss_between / df_between) / (ss_within / df_within)
    return float(f_stat), float(f_dist.sf(f_stat, df_between, df_within))
