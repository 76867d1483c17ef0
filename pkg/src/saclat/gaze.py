"""Saccade detection and reaction-latency extraction from gaze traces.

Velocity-based detection in the style of median-threshold microsaccade
algorithms: per-axis noise level estimated with medians (robust to the
saccades themselves), an elliptic velocity criterion, and a minimum event
duration. The reaction latency of a trial is the onset of the first
"primary" saccade, the one leaving the intended origin and landing on one
of the intended targets.

Positions are in visual degrees, times in seconds. CSV interfaces speak
milliseconds.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "GazeTrace",
    "TrialRecord",
    "SaccadeEvent",
    "velocities",
    "detect_saccades",
    "primary_saccade",
    "primary_saccade_latency",
    "load_gaze_csv",
    "load_trials_csv",
]

MIN_TRACE_SAMPLES = 7  # below this the 5-point differentiator is meaningless


@dataclass(frozen=True)
class GazeTrace:
    """Timestamps (s) and gaze positions (deg), one row per sample."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float))
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        n = self.t.size
        if self.x.size != n or self.y.size != n:
            raise ValueError("t, x, y must have equal length")
        if n < MIN_TRACE_SAMPLES:
            raise ValueError(f"trace needs >= {MIN_TRACE_SAMPLES} samples, got {n}")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("timestamps must be strictly increasing")

    def __len__(self) -> int:
        return self.t.size


@dataclass(frozen=True)
class TrialRecord:
    """Stimulus onset (s), intended gaze origin, and candidate targets (deg)."""

    stimulus_onset: float
    origin: tuple[float, float]
    targets: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "origin", tuple(map(float, self.origin)))
        object.__setattr__(
            self, "targets", tuple(tuple(map(float, tg)) for tg in self.targets)
        )
        if len(self.targets) == 0:
            raise ValueError("trial needs at least one target")


@dataclass(frozen=True)
class SaccadeEvent:
    onset_time: float
    offset_time: float
    onset_pos: tuple[float, float]
    offset_pos: tuple[float, float]
    peak_velocity: float

    def __post_init__(self):
        if self.offset_time <= self.onset_time:
            raise ValueError("offset must follow onset")


def velocities(trace: GazeTrace) -> np.ndarray:
    """Per-sample 2-D velocity (deg/s) by 5-point moving-window differentiation.

    v_n = (x_{n+2} + x_{n+1} - x_{n-1} - x_{n-2}) / (6 dt) in the interior;
    the two samples at each end fall back to 2-point differences. The
    window doubles as a mild low-pass, which is what makes the median
    threshold workable on noisy traces.
    """
    n = len(trace)
    dt = float(np.median(np.diff(trace.t)))
    out = np.empty((n, 2), dtype=float)
    for axis, pos in enumerate((trace.x, trace.y)):
        v = np.empty(n, dtype=float)
        v[2:-2] = (pos[4:] + pos[3:-1] - pos[1:-3] - pos[:-4]) / (6.0 * dt)
        v[0] = (pos[1] - pos[0]) / dt
        v[1] = (pos[2] - pos[0]) / (2.0 * dt)
        v[-2] = (pos[-1] - pos[-3]) / (2.0 * dt)
        v[-1] = (pos[-1] - pos[-2]) / dt
        out[:, axis] = v
    return out


def _median_sigma(v: np.ndarray) -> float:
    """Median-based velocity spread: sqrt(median(v^2) - median(v)^2)."""
    return float(np.sqrt(max(np.median(v**2) - np.median(v) ** 2, 0.0)))


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Inclusive (start, end) index pairs of True runs."""
    padded = np.concatenate(([0], mask.astype(np.int8), [0]))
    idx = np.flatnonzero(np.diff(padded))
    return [(int(s), int(e) - 1) for s, e in zip(idx[::2], idx[1::2])]


def detect_saccades(
    trace: GazeTrace,
    lambda_mult: float = 6.0,
    min_duration: int = 3,
    merge_gap: int = 2,
) -> list[SaccadeEvent]:
    """Detect saccades with the elliptic median-threshold criterion.

    A sample is saccadic when (v_x/eta_x)^2 + (v_y/eta_y)^2 > 1 with
    eta = lambda_mult * median-based sigma per axis. Runs of at least
    ``min_duration`` such samples become events; events separated by fewer
    than ``merge_gap`` samples are merged. A trace with degenerate velocity
    spread on either axis (e.g. perfectly still) yields no events.

    lambda_mult=6 and min_duration=3 are the customary defaults of this
    method family; tune per recording setup.
    """
    v = velocities(trace)
    eta_x = lambda_mult * _median_sigma(v[:, 0])
    eta_y = lambda_mult * _median_sigma(v[:, 1])
    if eta_x <= 0.0 or eta_y <= 0.0:
        return []
    crit = (v[:, 0] / eta_x) ** 2 + (v[:, 1] / eta_y) ** 2 > 1.0

    runs = [r for r in _runs(crit) if r[1] - r[0] + 1 >= min_duration]
    merged: list[tuple[int, int]] = []
    for start, end in runs:
        if merged and start - merged[-1][1] - 1 < merge_gap:
            merged[-1] = (merged[-1][0], end)
        else:
            merged.append((start, end))

    speed = np.hypot(v[:, 0], v[:, 1])
    events = []
    for start, end in merged:
        if end == start:
            continue  # cannot happen with min_duration >= 2, kept for safety
        events.append(
            SaccadeEvent(
                onset_time=float(trace.t[start]),
                offset_time=float(trace.t[end]),
                onset_pos=(float(trace.x[start]), float(trace.y[start])),
                offset_pos=(float(trace.x[end]), float(trace.y[end])),
                peak_velocity=float(speed[start : end + 1].max()),
            )
        )
    return events


def _within(pos: tuple[float, float], ref: tuple[float, float], tol: float) -> bool:
    return float(np.hypot(pos[0] - ref[0], pos[1] - ref[1])) <= tol


def primary_saccade(
    trace: GazeTrace,
    trial: TrialRecord,
    tolerance: float = 3.0,
    lambda_mult: float = 6.0,
    min_duration: int = 3,
) -> tuple[Optional[SaccadeEvent], int]:
    """First saccade from the trial origin to any trial target.

    A saccade qualifies when its onset position is within ``tolerance``
    degrees of the origin and its offset position within ``tolerance`` of
    some target. Qualifying saccades that start before stimulus onset are
    anticipatory: they are skipped and counted. Returns (event or None,
    number of anticipatory matches dropped).
    """
    if not (trace.t[0] <= trial.stimulus_onset <= trace.t[-1]):
        raise ValueError("stimulus onset lies outside the trace time span")
    n_anticipatory = 0
    for ev in detect_saccades(trace, lambda_mult=lambda_mult, min_duration=min_duration):
        if not _within(ev.onset_pos, trial.origin, tolerance):
            continue
        if not any(_within(ev.offset_pos, tg, tolerance) for tg in trial.targets):
            continue
        if ev.onset_time < trial.stimulus_onset:
            n_anticipatory += 1
            continue
        return ev, n_anticipatory
    return None, n_anticipatory


def primary_saccade_latency(
    trace: GazeTrace, trial: TrialRecord, tolerance: float = 3.0
) -> Optional[float]:
    """Reaction latency (s) of the primary saccade, or None if absent."""
    ev, _ = primary_saccade(trace, trial, tolerance=tolerance)
    return None if ev is None else ev.onset_time - trial.stimulus_onset


def load_gaze_csv(path) -> dict[str, GazeTrace]:
    """Read gaze samples (trial_id, t_ms, x_deg, y_deg) grouped per trial."""
    rows: dict[str, list[tuple[float, float, float]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        needed = ["trial_id", "t_ms", "x_deg", "y_deg"]
        if reader.fieldnames is None or any(c not in reader.fieldnames for c in needed):
            raise ValueError(f"{path}: expected columns {needed}")
        for i, row in enumerate(reader, start=2):
            try:
                rows.setdefault(row["trial_id"], []).append(
                    (float(row["t_ms"]) / 1000.0, float(row["x_deg"]), float(row["y_deg"]))
                )
            except (TypeError, ValueError) as e:
                raise ValueError(f"{path}: bad sample on line {i}: {e}") from None
    traces = {}
    for trial_id, samples in rows.items():
        samples.sort(key=lambda s: s[0])
        arr = np.asarray(samples, dtype=float)
        traces[trial_id] = GazeTrace(t=arr[:, 0], x=arr[:, 1], y=arr[:, 2])
    return traces


def load_trials_csv(path) -> dict[str, TrialRecord]:
    """Read trial geometry: onset_ms, origin, and target1..targetK columns."""
    trials = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        needed = ["trial_id", "onset_ms", "origin_x", "origin_y", "target1_x", "target1_y"]
        if reader.fieldnames is None or any(c not in reader.fieldnames for c in needed):
            raise ValueError(f"{path}: expected columns {needed}")
        for i, row in enumerate(reader, start=2):
            try:
                targets = []
                k = 1
                while f"target{k}_x" in row and row.get(f"target{k}_x") not in (None, ""):
                    targets.append((float(row[f"target{k}_x"]), float(row[f"target{k}_y"])))
                    k += 1
                trials[row["trial_id"]] = TrialRecord(
                    stimulus_onset=float(row["onset_ms"]) / 1000.0,
                    origin=(float(row["origin_x"]), float(row["origin_y"])),
                    targets=tuple(targets),
                )
            except (TypeError, ValueError) as e:
                raise ValueError(f"{path}: bad trial on line {i}: {e}") from None
    return trials
