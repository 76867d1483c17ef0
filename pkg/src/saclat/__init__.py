"""saclat: probabilistic modeling of saccadic reaction latency.

First-passage-time (Wald / inverse Gaussian) latency distributions driven by
a task-level evidence threshold and a stimulus-level integration rate learned
as an RBF surface over contrast, spatial frequency, and eccentricity; plus
the parallel foveal-peripheral extension, gaze-trace saccade detection,
goodness-of-fit statistics, and display-geometry pipelines.

Submodules: wald, ddm, rbf, latency, dual, gaze, features, stats, cli.
"""

from .dual import DualParams
from .features import DisplayConfig, LuminancePatch
from .gaze import GazeTrace, SaccadeEvent, TrialRecord
from .latency import LatencyDataset, LatencyRecord, TaskDescription
from .rbf import RBFNetwork, StimulusFeatures, TrainConfig
from .wald import IGParams

__version__ = "0.1.0"

__all__ = [
    "IGParams",
    "DualParams",
    "StimulusFeatures",
    "RBFNetwork",
    "TrainConfig",
    "TaskDescription",
    "LatencyRecord",
    "LatencyDataset",
    "GazeTrace",
    "TrialRecord",
    "SaccadeEvent",
    "DisplayConfig",
    "LuminancePatch",
    "__version__",
]
