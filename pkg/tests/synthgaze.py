"""Synthetic gaze-trace generator with known saccade onsets.

Traces are sampled at a nominal 120 Hz: fixation jitter is white Gaussian
position noise, saccades follow a minimum-jerk profile. Every generated
saccade onset is snapped to the sample grid so "within one sample" is
well-defined for the detector under test.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from saclat.gaze import GazeTrace, TrialRecord

RATE_HZ = 120.0
DT = 1.0 / RATE_HZ


def min_jerk(tau):
    """Normalized minimum-jerk displacement, 0 -> 1 over tau in [0, 1]."""
    tau = np.clip(tau, 0.0, 1.0)
    return 10.0 * tau**3 - 15.0 * tau**4 + 6.0 * tau**5


def min_jerk_peak_velocity(amplitude_deg: float, duration_s: float) -> float:
    """Analytic peak speed of the profile: 1.875 * amplitude / duration."""
    return 1.875 * amplitude_deg / duration_s


@dataclass(frozen=True)
class SynthTrial:
    trace: GazeTrace
    trial: TrialRecord
    true_onset: Optional[float]  # None for pure-fixation traces

    @property
    def true_latency(self) -> Optional[float]:
        if self.true_onset is None:
            return None
        return self.true_onset - self.trial.stimulus_onset


def make_trace(
    rng: np.random.Generator,
    duration_s: float = 1.2,
    origin=(0.0, 0.0),
    target=(10.0, 0.0),
    stimulus_onset: float = 0.2,
    saccade_onset: Optional[float] = 0.45,
    saccade_duration: float = 0.040,
    jitter_deg: float = 0.05,
    second_saccade_onset: Optional[float] = None,
) -> SynthTrial:
    """One trial trace; saccade_onset=None gives pure fixation.

    Onsets are snapped to the sample grid. An optional second saccade
    returns from the target back to the origin.
    """
    n = int(round(duration_s * RATE_HZ)) + 1
    t = np.arange(n) * DT
    x = np.full(n, float(origin[0]))
    y = np.full(n, float(origin[1]))

    true_onset = None
    if saccade_onset is not None:
        true_onset = round(saccade_onset / DT) * DT
        tau = (t - true_onset) / saccade_duration
        s = min_jerk(tau)
        x = x + (target[0] - origin[0]) * s
        y = y + (target[1] - origin[1]) * s
        if second_saccade_onset is not None:
            onset2 = round(second_saccade_onset / DT) * DT
            tau2 = (t - onset2) / saccade_duration
            s2 = min_jerk(tau2)
            x = x + (origin[0] - target[0]) * s2
            y = y + (origin[1] - target[1]) * s2

    x = x + rng.normal(0.0, jitter_deg, size=n)
    y = y + rng.normal(0.0, jitter_deg, size=n)
    trace = GazeTrace(t=t, x=x, y=y)
    trial = TrialRecord(stimulus_onset=stimulus_onset, origin=origin, targets=(target,))
    return SynthTrial(trace=trace, trial=trial, true_onset=true_onset)


def make_corpus(n_trials: int, seed: int = 0, fixation_fraction: float = 0.25):
    """Labeled corpus: saccade trials with known onsets plus pure fixations."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n_trials):
        if i < int(n_trials * fixation_fraction):
            out.append(make_trace(rng, saccade_onset=None))
            continue
        onset = float(rng.uniform(0.35, 0.8))
        angle = float(rng.uniform(0.0, 2.0 * np.pi))
        amp = float(rng.uniform(6.0, 12.0))
        target = (amp * np.cos(angle), amp * np.sin(angle))
        out.append(
            make_trace(
                rng,
                target=target,
                saccade_onset=onset,
                saccade_duration=float(rng.uniform(0.032, 0.052)),
            )
        )
    return out
