"""Stimulus features from imagery and viewing geometry.

Converts between display coordinates and retinal quantities for an observer
fixating the center of a flat screen: field of view vs viewing distance,
on-screen offset vs eccentricity, and on-screen spatial frequency
(cycles/cm) vs retinal frequency (cycles/degree). Also extracts the two
image-side model inputs: Weber contrast and a representative spatial
frequency chosen as the highest-contrast band of a Laplacian pyramid.

Geometry is width-based and horizontal; the same formulas serve the
vertical axis with the height swapped in. Radial offsets on the screen are
handled exactly by the same arctangent map.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.ndimage import convolve1d

__all__ = [
    "DisplayConfig",
    "LuminancePatch",
    "NoDominantBandError",
    "fov_to_distance",
    "distance_to_fov",
    "cm_to_diopters",
    "diopters_to_cm",
    "screen_pos_to_eccentricity",
    "degrees_per_cm",
    "display_to_retinal_frequency",
    "retinal_to_display_frequency",
    "weber_contrast",
    "band_contrasts",
    "dominant_band_frequency",
    "representative_frequency",
    "read_pgm",
]

_BINOMIAL5 = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0
MIN_PATCH_SIZE = 8


class NoDominantBandError(ValueError):
    """Every pyramid band has (near-)zero energy: no frequency to report."""


def fov_to_distance(width_cm: float, fov_deg: float) -> float:
    """Viewing distance (cm) that makes a display of this width span fov_deg."""
    if not 0.0 < fov_deg < 180.0:
        raise ValueError(f"fov must be in (0, 180) degrees, got {fov_deg}")
    if width_cm <= 0:
        raise ValueError("width_cm must be > 0")
    return (width_cm / 2.0) / math.tan(math.radians(fov_deg) / 2.0)


def distance_to_fov(width_cm: float, distance_cm: float) -> float:
    """Horizontal field of view (degrees) of a display at this distance."""
    if width_cm <= 0 or distance_cm <= 0:
        raise ValueError("width_cm and distance_cm must be > 0")
    return math.degrees(2.0 * math.atan((width_cm / 2.0) / distance_cm))


def cm_to_diopters(distance_cm: float) -> float:
    if distance_cm <= 0:
        raise ValueError("distance must be > 0")
    return 100.0 / distance_cm


def diopters_to_cm(diopters: float) -> float:
    if diopters <= 0:
        raise ValueError("diopters must be > 0")
    return 100.0 / diopters


@dataclass(frozen=True)
class DisplayConfig:
    """Physical display geometry. Give exactly one of fov_deg / distance_cm;
    the other is derived. Pixels are assumed square."""

    width_cm: float
    width_px: int
    height_px: int
    fov_deg: Optional[float] = None
    distance_cm: Optional[float] = None

    def __post_init__(self):
        if self.width_cm <= 0 or self.width_px <= 0 or self.height_px <= 0:
            raise ValueError("display dimensions must be positive")
        if (self.fov_deg is None) == (self.distance_cm is None):
            raise ValueError("give exactly one of fov_deg or distance_cm")
        if self.fov_deg is not None:
            object.__setattr__(
                self, "distance_cm", fov_to_distance(self.width_cm, self.fov_deg)
            )
        else:
            if self.distance_cm <= 0:
                raise ValueError("distance_cm must be > 0")
            object.__setattr__(
                self, "fov_deg", distance_to_fov(self.width_cm, self.distance_cm)
            )

    @property
    def pixel_pitch_cm(self) -> float:
        return self.width_cm / self.width_px

    @property
    def height_cm(self) -> float:
        return self.height_px * self.pixel_pitch_cm

    @property
    def diopters(self) -> float:
        return cm_to_diopters(self.distance_cm)


def screen_pos_to_eccentricity(x_cm: float, cfg: DisplayConfig) -> float:
    """Retinal eccentricity (deg) of a point x_cm from screen center,
    for gaze at the center: arctan(x / d)."""
    return math.degrees(math.atan2(abs(x_cm), cfg.distance_cm))


def degrees_per_cm(x_cm: float, cfg: DisplayConfig) -> float:
    """d(eccentricity)/d(offset) in deg/cm at offset x_cm: cos^2(theta)/d."""
    theta = math.atan2(abs(x_cm), cfg.distance_cm)
    return math.degrees(math.cos(theta) ** 2 / cfg.distance_cm)


def display_to_retinal_frequency(
    f_display_cpcm: float, eccentricity_deg: float, cfg: DisplayConfig
) -> float:
    """Cycles/degree on the retina for a pattern of f cycles/cm on screen.

    f_retina = f_display / (deg-per-cm at that eccentricity); the obliquity
    factor 1/cos^2 makes off-center patterns appear higher in frequency.
    """
    if f_display_cpcm < 0:
        raise ValueError("frequency must be >= 0")
    theta = math.radians(eccentricity_deg)
    return f_display_cpcm * cfg.distance_cm / math.cos(theta) ** 2 * (math.pi / 180.0)


def retinal_to_display_frequency(
    f_retina_cpd: float, eccentricity_deg: float, cfg: DisplayConfig
) -> float:
    """Inverse of display_to_retinal_frequency at the same eccentricity."""
    if f_retina_cpd < 0:
        raise ValueError("frequency must be >= 0")
    theta = math.radians(eccentricity_deg)
    return f_retina_cpd * math.cos(theta) ** 2 / cfg.distance_cm * (180.0 / math.pi)


def weber_contrast(target_mean_luminance: float, background_luminance: float) -> float:
    """|L_target - L_background| / L_background.

    The sign is dropped because the rate model's contrast domain is
    non-negative; decrements count the same as increments.
    """
    if background_luminance <= 0:
        raise ValueError("background luminance must be > 0")
    return abs(target_mean_luminance - background_luminance) / background_luminance


@dataclass(frozen=True)
class LuminancePatch:
    """Grayscale pixels as relative luminance in [0, 1], plus pixel pitch (cm)."""

    pixels: np.ndarray
    pixel_pitch_cm: float

    def __post_init__(self):
        object.__setattr__(self, "pixels", np.asarray(self.pixels, dtype=float))
        if self.pixels.ndim != 2 or self.pixels.size == 0:
            raise ValueError("pixels must be a non-empty 2-D array")
        if np.any(self.pixels < 0) or np.any(self.pixels > 1):
            raise ValueError("luminance values must lie in [0, 1]")
        if self.pixel_pitch_cm <= 0:
            raise ValueError("pixel_pitch_cm must be > 0")

    @property
    def nyquist_cpcm(self) -> float:
        return 1.0 / (2.0 * self.pixel_pitch_cm)


def _blur5(img: np.ndarray) -> np.ndarray:
    out = convolve1d(img, _BINOMIAL5, axis=0, mode="reflect")
    return convolve1d(out, _BINOMIAL5, axis=1, mode="reflect")


def band_contrasts(patch: LuminancePatch) -> list[tuple[float, float]]:
    """(center frequency cycles/cm, band contrast) per pyramid level.

    Level k splits off the detail lost to a 5-tap binomial blur, then
    downsamples 2x and recurses; band contrast is the RMS of the detail
    normalized by the level's mean luminance. Band k is nominally centered
    at Nyquist / 2^(k+1).
    """
    img = patch.pixels
    if min(img.shape) < MIN_PATCH_SIZE:
        raise ValueError(f"patch must be at least {MIN_PATCH_SIZE}x{MIN_PATCH_SIZE} px")
    out = []
    level = img
    k = 0
    while min(level.shape) >= MIN_PATCH_SIZE:
        low = _blur5(level)
        detail = level - low
        mean_lum = float(level.mean())
        rms = float(np.sqrt(np.mean(detail**2)))
        contrast = rms / mean_lum if mean_lum > 0 else 0.0
        out.append((patch.nyquist_cpcm / 2 ** (k + 1), contrast))
        level = low[::2, ::2]
        k += 1
    return out


def dominant_band_frequency(patch: LuminancePatch) -> float:
    """Center frequency (cycles/cm) of the highest-contrast pyramid band."""
    bands = band_contrasts(patch)
    best_f, best_c = max(bands, key=lambda fc: fc[1])
    if best_c <= 1e-12:
        raise NoDominantBandError("all pyramid bands are empty (constant patch?)")
    return best_f


def representative_frequency(
    patch: LuminancePatch, cfg: DisplayConfig, eccentricity_deg: float
) -> float:
    """Retinal frequency (cycles/degree) of the dominant pyramid band.

    One-octave granularity by construction: the pyramid pools everything
    within a band, which is the accepted approximation here.
    """
    return display_to_retinal_frequency(dominant_band_frequency(patch), eccentricity_deg, cfg)


def read_pgm(path) -> np.ndarray:
    """Binary (P5) PGM, 8- or 16-bit, mapped to [0, 1] by maxval."""
    with open(path, "rb") as fh:
        data = fh.read()
    header = []
    pos = 0
    while len(header) < 4:
        m = re.compile(rb"\s*(?:#[^\n]*\n)*\s*(\S+)").match(data, pos)
        if m is None:
            raise ValueError(f"{path}: truncated PGM header")
        header.append(m.group(1))
        pos = m.end()
    if header[0] != b"P5":
        raise ValueError(f"{path}: expected binary PGM (P5), got {header[0]!r}")
    width, height, maxval = int(header[1]), int(header[2]), int(header[3])
    if not 0 < maxval < 65536:
        raise ValueError(f"{path}: bad maxval {maxval}")
    dtype = np.dtype(">u2") if maxval > 255 else np.uint8
    pos += 1  # single whitespace after maxval
    raster = np.frombuffer(data, dtype=dtype, count=width * height, offset=pos)
    if raster.size != width * height:
        raise ValueError(f"{path}: truncated raster")
    return raster.reshape(height, width).astype(float) / maxval
