"""Foveal-peripheral dual-task latency.

Two accumulators race in parallel and the response waits for both, so the
observed latency is the maximum of two independent first-passage times. The
CDF of the maximum is the product of the component CDFs; the density follows
by differentiation. Only the two thresholds are fitted here: per-condition
rates are supplied by the rate surface (fovea at 0 degrees eccentricity,
periphery at its own), keeping the fit a 2-parameter problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import log_ndtr, ndtr

from . import wald
from .latency import estimate_alpha
from .wald import IGParams

__all__ = [
    "DualParams",
    "DualFitResult",
    "dual_pdf",
    "dual_cdf",
    "sample_dual",
    "fit_dual_thresholds",
    "fit_single_threshold",
]

_LIKELIHOOD_FLOOR = 1e-300  # guards log(0) from outlier latencies
# Deterministic restart offsets for the simplex search, in log-threshold space.
_RESTART_OFFSETS = ((0.0, 0.0), (0.3, -0.3), (-0.3, 0.3))


@dataclass(frozen=True)
class DualParams:
    foveal: IGParams
    peripheral: IGParams


@dataclass(frozen=True)
class DualFitResult:
    alpha_f: float
    alpha_p: float
    log_likelihood: float
    converged: bool


def dual_pdf(t, d: DualParams):
    """Density of max(T_foveal, T_peripheral): f_f*F_p + F_f*f_p."""
    return wald.pdf(t, d.foveal) * wald.cdf(t, d.peripheral) + wald.cdf(t, d.foveal) * wald.pdf(
        t, d.peripheral
    )


def dual_cdf(t, d: DualParams):
    """P(max <= t) = F_f(t) * F_p(t) for independent components."""
    return wald.cdf(t, d.foveal) * wald.cdf(t, d.peripheral)


def sample_dual(d: DualParams, rng: np.random.Generator, size=None):
    """Max of paired independent component draws."""
    return np.maximum(wald.sample(d.foveal, rng, size), wald.sample(d.peripheral, rng, size))


def _pdf_arr(t, alpha, nu):
    """First-passage density with scalar threshold and per-trial rate array."""
    return alpha / np.sqrt(2.0 * np.pi * t**3) * np.exp(-((alpha - nu * t) ** 2) / (2.0 * t))


def _cdf_arr(t, alpha, nu):
    st = np.sqrt(t)
    return ndtr((nu * t - alpha) / st) + np.exp(2.0 * nu * alpha + log_ndtr(-(nu * t + alpha) / st))


def _dual_nll(log_alphas, t, nu_f, nu_p):
    alpha_f, alpha_p = np.exp(log_alphas)
    lik = _pdf_arr(t, alpha_f, nu_f) * _cdf_arr(t, alpha_p, nu_p) + _cdf_arr(
        t, alpha_f, nu_f
    ) * _pdf_arr(t, alpha_p, nu_p)
    return -float(np.sum(np.log(np.maximum(lik, _LIKELIHOOD_FLOOR))))


def _as_trials(trials) -> np.ndarray:
    arr = np.asarray(trials, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError("trials must be rows of (t, nu_f, nu_p)")
    if arr.shape[0] < 2:
        raise ValueError("need at least 2 trials")
    if not np.all(np.isfinite(arr)):
        raise ValueError("trials must be finite")
    if np.any(arr[:, 0] <= 0):
        raise ValueError("trial times must be > 0")
    if np.any(arr[:, 1:] <= 0):
        raise ValueError("per-trial rates must be > 0")
    return arr


def fit_dual_thresholds(trials, max_iter: int = 2000) -> DualFitResult:
    """Maximum-likelihood thresholds (alpha_f, alpha_p) from (t, nu_f, nu_p) rows.

    The 2-D search runs over log-thresholds with a Nelder-Mead simplex,
    initialized from the moment estimator on the pooled sample and restarted
    from fixed offsets around it; the best optimum wins. At least two
    distinct (nu_f, nu_p) conditions are recommended for identifiability,
    but not enforced. Non-convergence is reported on the result rather than
    raised, with the best point found so far.
    """
    arr = _as_trials(trials)
    t, nu_f, nu_p = arr[:, 0], arr[:, 1], arr[:, 2]
    alpha0 = estimate_alpha(t)
    best = None
    any_converged = False
    for off in _RESTART_OFFSETS:
        x0 = np.log([alpha0, alpha0]) + np.asarray(off)
        res = minimize(
            _dual_nll,
            x0,
            args=(t, nu_f, nu_p),
            method="Nelder-Mead",
            options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": max_iter},
        )
        any_converged = any_converged or bool(res.success)
        if best is None or res.fun < best.fun:
            best = res
    alpha_f, alpha_p = np.exp(best.x)
    return DualFitResult(
        alpha_f=float(alpha_f),
        alpha_p=float(alpha_p),
        log_likelihood=-float(best.fun),
        converged=any_converged,
    )


def fit_single_threshold(t, nu, max_iter: int = 2000) -> tuple[float, float, bool]:
    """MLE of one shared threshold for a single accumulator with per-trial rates.

    Baseline for comparisons against the dual fit. Returns
    (alpha, log-likelihood, converged).
    """
    t = np.asarray(t, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if t.shape != nu.shape or t.ndim != 1:
        raise ValueError("t and nu must be 1-D arrays of equal length")

    def nll(log_alpha):
        lik = _pdf_arr(t, float(np.exp(log_alpha[0])), nu)
        return -float(np.sum(np.log(np.maximum(lik, _LIKELIHOOD_FLOOR))))

    alpha0 = estimate_alpha(t)
    res = minimize(
        nll,
        np.log([alpha0]),
        method="Nelder-Mead",
        options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": max_iter},
    )
    return float(np.exp(res.x[0])), -float(res.fun), bool(res.success)
