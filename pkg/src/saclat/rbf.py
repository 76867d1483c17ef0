"""Radial-basis-function regression of the evidence integration rate.

The rate surface nu(contrast, frequency, eccentricity) is a sum of Gaussian
bumps, sum_i w_i * exp(-||x_tilde - b_i||^2 / (2 s_i^2)), evaluated on
feature-scaled inputs. Weights, centers, and widths are all trained jointly
by full-batch Adam on mean squared error against rate labels. Widths are
stepped in log space so they stay positive.

Training is single-threaded and fully deterministic for a given seed;
evaluation is pure and thread-safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "StimulusFeatures",
    "RBFNetwork",
    "TrainConfig",
    "TrainResult",
    "RBFGradient",
    "evaluate",
    "evaluate_batch",
    "gradient",
    "train",
    "nu_label_from_mean",
    "to_json_dict",
    "from_json_dict",
]

# Spans of the stimulus design grid; dividing by these puts the three
# features on comparable scales before Euclidean distances are taken.
# Raw units would let eccentricity (0..20) swamp contrast (0..1).
DEFAULT_FEATURE_SCALES = (1.0, 4.0, 20.0)

_ADAM_B1 = 0.9
_ADAM_B2 = 0.999
_ADAM_EPS = 1e-8


@dataclass(frozen=True)
class StimulusFeatures:
    """Weber contrast, spatial frequency (cycles/degree), eccentricity (degrees)."""

    contrast: float
    frequency: float
    eccentricity: float

    def __post_init__(self):
        vals = (self.contrast, self.frequency, self.eccentricity)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError(f"features must be finite, got {vals}")
        if self.contrast < 0:
            raise ValueError("contrast must be >= 0")
        if self.frequency <= 0:
            raise ValueError("frequency must be > 0")
        if self.eccentricity < 0:
            raise ValueError("eccentricity must be >= 0")

    def as_array(self) -> np.ndarray:
        return np.array([self.contrast, self.frequency, self.eccentricity], dtype=float)


@dataclass(frozen=True)
class RBFNetwork:
    """Gaussian-basis network: centers (N,3), widths (N,), weights (N,).

    Centers live in feature-scaled coordinates. Arrays are owned by the
    network and must not be mutated by callers.
    """

    centers: np.ndarray
    widths: np.ndarray
    weights: np.ndarray
    feature_scales: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "centers", np.asarray(self.centers, dtype=float))
        object.__setattr__(self, "widths", np.asarray(self.widths, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "feature_scales", np.asarray(self.feature_scales, dtype=float))
        n = self.centers.shape[0]
        if n < 1 or self.centers.ndim != 2 or self.centers.shape[1] != 3:
            raise ValueError(f"centers must be (N>=1, 3), got {self.centers.shape}")
        if self.widths.shape != (n,) or self.weights.shape != (n,):
            raise ValueError("widths and weights must match the number of centers")
        if not np.all(self.widths > 0):
            raise ValueError("all widths must be > 0")
        if self.feature_scales.shape != (3,) or not np.all(self.feature_scales > 0):
            raise ValueError("feature_scales must be 3 positive values")

    @property
    def n_centers(self) -> int:
        return self.centers.shape[0]


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 2000
    n_centers: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.n_centers < 1:
            raise ValueError("n_centers must be >= 1")


@dataclass(frozen=True)
class TrainResult:
    network: RBFNetwork
    initial_mse: float
    final_mse: float


@dataclass(frozen=True)
class RBFGradient:
    """Gradient w.r.t. weights (N,), centers (N,3), and raw widths (N,)."""

    weights: np.ndarray
    centers: np.ndarray
    widths: np.ndarray


def _activations(net: RBFNetwork, X: np.ndarray):
    """Basis activations phi (n,N) and squared scaled distances d2 (n,N)."""
    Xs = X / net.feature_scales
    d2 = ((Xs[:, None, :] - net.centers[None, :, :]) ** 2).sum(axis=2)
    phi = np.exp(-d2 / (2.0 * net.widths**2))
    return phi, d2, Xs


def evaluate_batch(net: RBFNetwork, X: np.ndarray) -> np.ndarray:
    """Rate predictions for raw feature rows X (n,3)."""
    X = np.asarray(X, dtype=float)
    phi, _, _ = _activations(net, X)
    return phi @ net.weights


def evaluate(net: RBFNetwork, x: StimulusFeatures) -> float:
    return float(evaluate_batch(net, x.as_array()[None, :])[0])


def gradient(net: RBFNetwork, x: StimulusFeatures, residual: float) -> RBFGradient:
    """Gradient of 0.5*(prediction - target)^2 given residual = prediction - target.

    Equivalently residual * d(prediction)/d(parameter); with residual 1 the
    weight component is exactly the basis activation vector.
    """
    X = x.as_array()[None, :]
    phi, d2, Xs = _activations(net, X)
    phi, d2 = phi[0], d2[0]
    diff = Xs[0][None, :] - net.centers  # (N,3)
    g_w = residual * phi
    g_c = residual * (net.weights * phi / net.widths**2)[:, None] * diff
    g_s = residual * net.weights * phi * d2 / net.widths**3
    return RBFGradient(weights=g_w, centers=g_c, widths=g_s)


def _batch_grads(net_arrays, X, y, feature_scales):
    """MSE and its gradient over the whole batch; widths gradient is in sigma."""
    weights, centers, widths = net_arrays
    Xs = X / feature_scales
    diff = Xs[:, None, :] - centers[None, :, :]  # (n,N,3)
    d2 = (diff**2).sum(axis=2)
    phi = np.exp(-d2 / (2.0 * widths**2))
    pred = phi @ weights
    r = pred - y
    n = X.shape[0]
    coef = (2.0 / n) * r  # dMSE/dpred
    g_w = phi.T @ coef
    common = coef[:, None] * phi * weights[None, :]  # (n,N)
    g_c = (common[:, :, None] * diff / widths[None, :, None] ** 2).sum(axis=0)
    g_s = (common * d2 / widths[None, :] ** 3).sum(axis=0)
    return float(np.mean(r**2)), g_w, g_c, g_s


def train(data: Sequence[tuple[StimulusFeatures, float]], cfg: TrainConfig) -> TrainResult:
    """Fit the network to (features, rate label) pairs.

    Initialization: centers are drawn from the training inputs (seeded),
    widths start at the mean nearest-neighbor center distance, weights at
    label mean / n_centers. The optimizer is plain Adam with bias
    correction, full batch. Raises ArithmeticError if any parameter turns
    non-finite (checked every epoch).
    """
    if len(data) == 0:
        raise ValueError("training data must be non-empty")
    X = np.array([f.as_array() for f, _ in data], dtype=float)
    y = np.array([label for _, label in data], dtype=float)
    if np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise ValueError("rate labels must be finite and > 0")

    scales = np.array(DEFAULT_FEATURE_SCALES, dtype=float)
    rng = np.random.default_rng(cfg.seed)
    idx = rng.choice(X.shape[0], size=cfg.n_centers, replace=cfg.n_centers > X.shape[0])
    centers = (X / scales)[idx].copy()

    if cfg.n_centers >= 2:
        dists = np.sqrt(((centers[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2))
        np.fill_diagonal(dists, np.inf)
        width0 = float(np.mean(np.min(dists, axis=1)))
    else:
        width0 = 1.0
    width0 = max(width0, 1e-2)  # duplicate rows in the data could give 0
    log_widths = np.full(cfg.n_centers, np.log(width0))
    weights = np.full(cfg.n_centers, float(y.mean()) / cfg.n_centers)

    initial_mse, _, _, _ = _batch_grads((weights, centers, np.exp(log_widths)), X, y, scales)

    params = [weights, centers, log_widths]
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    mse = initial_mse
    for step in range(1, cfg.epochs + 1):
        widths = np.exp(log_widths)
        mse, g_w, g_c, g_s = _batch_grads((weights, centers, widths), X, y, scales)
        grads = [g_w, g_c, g_s * widths]  # widths stepped in log space
        for i, (p, g) in enumerate(zip(params, grads)):
            m[i] = _ADAM_B1 * m[i] + (1 - _ADAM_B1) * g
            v[i] = _ADAM_B2 * v[i] + (1 - _ADAM_B2) * g * g
            m_hat = m[i] / (1 - _ADAM_B1**step)
            v_hat = v[i] / (1 - _ADAM_B2**step)
            p -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + _ADAM_EPS)
        if not all(np.all(np.isfinite(p)) for p in params):
            raise ArithmeticError(f"non-finite network parameters at epoch {step}")

    net = RBFNetwork(
        centers=centers, widths=np.exp(log_widths), weights=weights, feature_scales=scales
    )
    final_mse = float(np.mean((evaluate_batch(net, X) - y) ** 2))
    return TrainResult(network=net, initial_mse=initial_mse, final_mse=final_mse)


def nu_label_from_mean(mean_latency: float) -> float:
    """Rate label for a condition: reciprocal of its mean normalized latency.

    The proportionality constant between rate and inverse mean is 1 in
    normalized time units; absolute units enter later through calibration.
    """
    if not (np.isfinite(mean_latency) and mean_latency > 0):
        raise ValueError(f"mean latency must be finite and > 0, got {mean_latency}")
    return 1.0 / mean_latency


def to_json_dict(net: RBFNetwork) -> dict:
    """JSON-ready dict; floats keep full round-trip precision."""
    return {
        "feature_scales": net.feature_scales.tolist(),
        "centers": net.centers.tolist(),
        "widths": net.widths.tolist(),
        "weights": net.weights.tolist(),
    }


def from_json_dict(doc: dict) -> RBFNetwork:
    try:
        return RBFNetwork(
            centers=np.array(doc["centers"], dtype=float),
            widths=np.array(doc["widths"], dtype=float),
            weights=np.array(doc["weights"], dtype=float),
            feature_scales=np.array(doc["feature_scales"], dtype=float),
        )
    except KeyError as e:
        raise ValueError(f"network document missing field {e.args[0]!r}") from None
