"""Assembled saccade-latency model.

A task contributes the evidence threshold (estimated from latency moments),
the stimulus contributes the integration rate (from the RBF surface), and a
prediction is the inverse-Gaussian law built from the two. Includes the
per-subject normalization that makes data from different people comparable,
and the calibration that ties normalized model units to a concrete task's
time units.

Calibration must always run on normalized data recorded in a single
stimulus condition: the moment estimator is scale-covariant (scaling the
sample by k scales alpha by sqrt(k)), so threshold and rate rescale are
only meaningful relative to a fixed unit.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from typing import Iterable, Optional

import numpy as np

from .rbf import RBFNetwork, StimulusFeatures, evaluate, nu_label_from_mean
from .wald import IGParams

__all__ = [
    "TaskDescription",
    "LatencyRecord",
    "LatencyDataset",
    "OutOfDomainError",
    "estimate_alpha",
    "normalize_dataset",
    "condition_rate_labels",
    "calibrate",
    "predict",
    "load_dataset_csv",
    "write_dataset_csv",
]

CSV_COLUMNS = [
    "subject_id",
    "block_id",
    "condition_id",
    "contrast",
    "frequency_cpd",
    "eccentricity_deg",
    "latency_ms",
]


class OutOfDomainError(ValueError):
    """The rate surface predicted a non-positive rate for these features.

    Near the visibility threshold the latency genuinely diverges; predictions
    there are reported rather than clamped so callers can see it happened.
    """


@dataclass(frozen=True)
class TaskDescription:
    """A calibrated task: threshold plus the rate rescale into its time units."""

    task_id: str
    alpha: float
    nu_rescale: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be finite and > 0, got {self.alpha}")
        if not (np.isfinite(self.nu_rescale) and self.nu_rescale > 0):
            raise ValueError(f"nu_rescale must be finite and > 0, got {self.nu_rescale}")


@dataclass(frozen=True)
class LatencyRecord:
    subject_id: str
    block_id: str
    condition_id: str
    features: StimulusFeatures
    latency: float
    latency_norm: Optional[float] = None

    def __post_init__(self):
        if not self.subject_id or not self.condition_id:
            raise ValueError("records need a subject_id and a condition_id")
        if not (np.isfinite(self.latency) and self.latency > 0):
            raise ValueError(f"latency must be finite and > 0, got {self.latency}")


@dataclass(frozen=True)
class LatencyDataset:
    records: tuple[LatencyRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        if len(self.records) == 0:
            raise ValueError("dataset must contain at least one record")

    def subjects(self) -> list[str]:
        return sorted({r.subject_id for r in self.records})

    def conditions(self) -> list[str]:
        return sorted({r.condition_id for r in self.records})

    def condition_features(self, condition_id: str) -> StimulusFeatures:
        for r in self.records:
            if r.condition_id == condition_id:
                return r.features
        raise KeyError(f"condition {condition_id!r} not in dataset")

    def latencies(self, condition_id=None, subject_id=None, normalized=False) -> np.ndarray:
        out = []
        for r in self.records:
            if condition_id is not None and r.condition_id != condition_id:
                continue
            if subject_id is not None and r.subject_id != subject_id:
                continue
            if normalized:
                if r.latency_norm is None:
                    raise ValueError("dataset has not been normalized")
                out.append(r.latency_norm)
            else:
                out.append(r.latency)
        return np.asarray(out, dtype=float)


def estimate_alpha(latencies) -> float:
    """Threshold from sample moments: sqrt(mean^3 / variance).

    Uses the unbiased (n-1) sample variance. Needs at least two samples and
    non-zero spread.
    """
    arr = np.asarray(latencies, dtype=float)
    if arr.size < 2:
        raise ValueError("need at least 2 latencies to estimate a threshold")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ValueError("latencies must be finite and > 0")
    m = float(arr.mean())
    v = float(arr.var(ddof=1))
    # relative floor: a constant sample leaves rounding dust, not variance
    if v <= (1e-9 * m) ** 2:
        raise ValueError("zero-variance sample: threshold is undefined")
    return float(np.sqrt(m**3 / v))


def normalize_dataset(data: LatencyDataset, pedestal_condition: str) -> LatencyDataset:
    """Scale each subject's latencies by 1 / their mean pedestal latency.

    After this, the pedestal condition's per-subject mean is exactly 1 and
    latencies from different subjects share a unit. Every subject must have
    at least one pedestal trial; the pedestal choice is the caller's.
    """
    scales = {}
    for subject in data.subjects():
        ped = data.latencies(condition_id=pedestal_condition, subject_id=subject)
        if ped.size == 0:
            raise ValueError(f"subject {subject!r} has no {pedestal_condition!r} trials")
        scales[subject] = 1.0 / float(ped.mean())
    new_records = tuple(
        replace(r, latency_norm=r.latency * scales[r.subject_id]) for r in data.records
    )
    return LatencyDataset(records=new_records)


def condition_rate_labels(data: LatencyDataset) -> dict[str, tuple[StimulusFeatures, float]]:
    """Per-condition rate labels from a normalized dataset.

    Each condition gets the reciprocal of its mean normalized latency,
    pooled across subjects.
    """
    labels = {}
    for cond in data.conditions():
        lat = data.latencies(condition_id=cond, normalized=True)
        labels[cond] = (data.condition_features(cond), nu_label_from_mean(float(lat.mean())))
    return labels


def calibrate(
    latencies,
    rate_net: RBFNetwork,
    condition: StimulusFeatures,
    task_id: str = "calibrated",
) -> tuple[TaskDescription, float]:
    """Adapt the model to a new task from one sample of its latencies.

    The threshold comes from the sample moments; the rate rescale is chosen
    so that the model's predicted mean, alpha / (rescale * nu(condition)),
    equals the sample mean. Returns the calibrated task and the rescale
    factor (also stored on the task).
    """
    arr = np.asarray(latencies, dtype=float)
    alpha = estimate_alpha(arr)
    nu_raw = evaluate(rate_net, condition)
    if nu_raw <= 0:
        raise OutOfDomainError(
            f"rate surface is non-positive ({nu_raw:.4g}) at the calibration condition"
        )
    rescale = alpha / (float(arr.mean()) * nu_raw)
    return TaskDescription(task_id=task_id, alpha=alpha, nu_rescale=rescale), rescale


def predict(task: TaskDescription, x: StimulusFeatures, rate_net: RBFNetwork) -> IGParams:
    """Latency distribution parameters for stimulus ``x`` under ``task``."""
    nu = task.nu_rescale * evaluate(rate_net, x)
    if nu <= 0:
        raise OutOfDomainError(
            f"predicted rate {nu:.4g} <= 0 at contrast={x.contrast}, "
            f"frequency={x.frequency}, eccentricity={x.eccentricity}"
        )
    return IGParams(alpha=task.alpha, nu=nu)


def load_dataset_csv(path) -> LatencyDataset:
    """Read the trial table. Header must carry the canonical columns;
    an optional latency_norm column restores a normalized dataset."""
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: empty file, expected a CSV header")
        missing = [c for c in CSV_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        has_norm = "latency_norm" in reader.fieldnames
        for i, row in enumerate(reader, start=2):
            try:
                features = StimulusFeatures(
                    contrast=float(row["contrast"]),
                    frequency=float(row["frequency_cpd"]),
                    eccentricity=float(row["eccentricity_deg"]),
                )
                norm = None
                if has_norm and row["latency_norm"] not in (None, ""):
                    norm = float(row["latency_norm"])
                records.append(
                    LatencyRecord(
                        subject_id=row["subject_id"],
                        block_id=row["block_id"],
                        condition_id=row["condition_id"],
                        features=features,
                        latency=float(row["latency_ms"]),
                        latency_norm=norm,
                    )
                )
            except (TypeError, ValueError) as e:
                raise ValueError(f"{path}: bad record on line {i}: {e}") from None
    if not records:
        raise ValueError(f"{path}: no data rows")
    return LatencyDataset(records=tuple(records))


def write_dataset_csv(data: LatencyDataset, path) -> None:
    """Write the trial table; adds latency_norm when the dataset carries it."""
    normalized = all(r.latency_norm is not None for r in data.records)
    cols = CSV_COLUMNS + (["latency_norm"] if normalized else [])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for r in data.records:
            row = [
                r.subject_id,
                r.block_id,
                r.condition_id,
                repr(r.features.contrast),
                repr(r.features.frequency),
                repr(r.features.eccentricity),
                repr(r.latency),
            ]
            if normalized:
                row.append(repr(r.latency_norm))
            writer.writerow(row)
