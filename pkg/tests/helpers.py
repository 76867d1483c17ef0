"""Shared synthetic-data generators for the test suite.

The pilot-style grid and the U-shaped ground-truth rate surface are used by
several modules: rate training, the end-to-end pipeline, and the CLI. The
surface is smooth and strictly positive, rises with contrast, falls with
frequency, and peaks at 10 degrees eccentricity (so latency dips there).
"""

from __future__ import annotations

import numpy as np

from saclat.latency import LatencyDataset, LatencyRecord
from saclat.rbf import StimulusFeatures
from saclat.wald import IGParams, sample as ig_sample

PILOT_CONTRASTS = (0.05, 0.22, 0.53, 1.0)
PILOT_FREQUENCIES = (0.5, 1.0, 2.0, 4.0)
PILOT_ECCENTRICITIES = (0.0, 10.0, 20.0)
# Conditions dropped from the design grid (non-detectable combinations).
PILOT_EXCLUDED = {(0.05, 4.0, 10.0), (0.05, 4.0, 20.0), (0.22, 4.0, 20.0)}

PILOT_PEDESTAL = (1.0, 1.0, 0.0)


def pilot_grid() -> list[tuple[float, float, float]]:
    """The 45-condition (contrast, frequency, eccentricity) design grid."""
    return [
        (c, f, e)
        for c in PILOT_CONTRASTS
        for f in PILOT_FREQUENCIES
        for e in PILOT_ECCENTRICITIES
        if (c, f, e) not in PILOT_EXCLUDED
    ]


def ushaped_rate(c, f, e):
    """Ground-truth integration rate, vectorized over its arguments.

    The overall magnitude (x6) keeps per-trial latency spread near the
    CV ~ 0.2-0.4 seen in real saccade data; relative structure is what the
    pipeline must recover, and it is unaffected by the constant.
    """
    c = np.asarray(c, dtype=float)
    f = np.asarray(f, dtype=float)
    e = np.asarray(e, dtype=float)
    return (
        6.0
        * (0.6 + 0.9 * c)
        * (1.35 - 0.11 * f)
        * (0.8 + 0.4 * np.exp(-((e - 10.0) ** 2) / 60.0))
    )


def condition_id(c, f, e) -> str:
    return f"c{c:g}_f{f:g}_e{e:g}"


def synth_pilot_dataset(
    alpha: float = 3.0,
    n_subjects: int = 3,
    trials_per_condition: int = 100,
    seed: int = 0,
    base_scale_ms: float = 900.0,
    subject_spread: float = 0.2,
) -> LatencyDataset:
    """Raw (ms-scale) latencies drawn from the ground-truth model.

    Each subject gets a private time scale (lognormal around base_scale_ms)
    so that per-subject normalization actually has work to do.
    """
    rng = np.random.default_rng(seed)
    records = []
    for s in range(n_subjects):
        subject = f"s{s:02d}"
        scale = base_scale_ms * float(np.exp(rng.normal(0.0, subject_spread)))
        for c, f, e in pilot_grid():
            params = IGParams(alpha=alpha, nu=float(ushaped_rate(c, f, e)))
            draws = ig_sample(params, rng, size=trials_per_condition)
            for k, t in enumerate(draws):
                records.append(
                    LatencyRecord(
                        subject_id=subject,
                        block_id=f"b{k % 10}",
                        condition_id=condition_id(c, f, e),
                        features=StimulusFeatures(contrast=c, frequency=f, eccentricity=e),
                        latency=float(t) * scale,
                    )
                )
    return LatencyDataset(records=tuple(records))
