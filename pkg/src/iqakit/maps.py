"""Quality-map generation, intensity scaling and convex map fusion.

A quality map is a per-pixel similarity in [0, 1] (1 = identical). The
intensity coefficient alpha in [0.3, 1] is applied as the power m ** alpha,
which brightens maps as alpha decreases and is the identity at alpha = 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import InvalidInputError, InvalidParameterError
from .fsim import FsimConfig, fsim
from .imgcore import as_plane, as_tensor, resize_bilinear, to_grayscale
from .mdsi import MdsiConfig, mdsi
from .ssim import MsSsimConfig, SsimConfig, ms_ssim_levels, ssim_maps

MapMetric = Literal["ssim", "ms_ssim", "fsim", "mdsi"]
MAP_METRICS = ("ssim", "ms_ssim", "fsim", "mdsi")
ALPHA_MIN, ALPHA_MAX = 0.3, 1.0


@dataclass(frozen=True)
class QualityMap:
    plane: np.ndarray
    metric: str
    alpha: float


@dataclass(frozen=True)
class FusionWeights:
    w1: float = 1.0 / 3.0
    w2: float = 1.0 / 3.0
    w3: float = 1.0 / 3.0

    def __post_init__(self):
        if min(self.w1, self.w2, self.w3) < 0:
            raise InvalidParameterError("fusion weights must be nonnegative")
        if abs(self.w1 + self.w2 + self.w3 - 1.0) > 1e-12:
            raise InvalidParameterError(
                f"fusion weights must sum to 1, got {self.w1 + self.w2 + self.w3!r}"
            )

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.w1, self.w2, self.w3)


@dataclass(frozen=True)
class MapConfigs:
    ssim: SsimConfig = field(default_factory=SsimConfig)
    ms_ssim: MsSsimConfig = field(default_factory=MsSsimConfig)
    fsim: FsimConfig = field(default_factory=FsimConfig)
    mdsi: MdsiConfig = field(default_factory=MdsiConfig)


def check_alpha(alpha: float) -> float:
    if not ALPHA_MIN <= alpha <= ALPHA_MAX:
        raise InvalidParameterError(f"alpha must lie in [{ALPHA_MIN}, {ALPHA_MAX}], got {alpha}")
    return float(alpha)


def intensity_scale(m, alpha: float) -> np.ndarray:
    """Pointwise m ** alpha for a map with values in [0, 1]."""
    m = as_plane(m, "map")
    if np.any(m < 0) or np.any(m > 1):
        raise InvalidInputError("map values must lie in [0, 1]")
    alpha = check_alpha(alpha)
    if alpha == 1.0:
        return m.copy()
    return m**alpha


def _ms_ssim_map(x: np.ndarray, y: np.ndarray, cfg: MsSsimConfig) -> np.ndarray:
    # finest-scale contrast-structure map times the coarsest luminance map
    levels = ms_ssim_levels(x, y, cfg)
    cs = np.clip(levels[0].contrast_structure, 0.0, 1.0)
    lum = np.clip(levels[-1].luminance, 0.0, 1.0)
    if lum.shape != cs.shape:
        lum = np.clip(resize_bilinear(lum, cs.shape), 0.0, 1.0)
    return cs * lum


def raw_map(metric: str, x_ref, x_hat, cfgs: MapConfigs | None = None) -> np.ndarray:
    """Similarity map in [0, 1] at input resolution, before intensity scaling."""
    cfgs = cfgs or MapConfigs()
    x_ref = as_tensor(x_ref, "reference")
    x_hat = as_tensor(x_hat, "test image")
    if x_ref.shape != x_hat.shape:
        raise InvalidInputError(f"image shapes differ: {x_ref.shape} vs {x_hat.shape}")
    if metric == "ssim":
        m = ssim_maps(to_grayscale(x_ref), to_grayscale(x_hat), cfgs.ssim).ssim
    elif metric == "ms_ssim":
        m = _ms_ssim_map(to_grayscale(x_ref), to_grayscale(x_hat), cfgs.ms_ssim)
    elif metric == "fsim":
        m = fsim(to_grayscale(x_ref), to_grayscale(x_hat), cfgs.fsim).similarity_map
    elif metric == "mdsi":
        gcs = mdsi(x_ref, x_hat, cfgs.mdsi).gcs_map
        m = resize_bilinear(gcs, x_ref.shape[:2])
    else:
        raise InvalidParameterError(f"unknown map metric {metric!r}; choose from {MAP_METRICS}")
    return np.clip(m, 0.0, 1.0)


def quality_map(metric: str, x_ref, x_hat, alpha: float = 1.0, cfgs: MapConfigs | None = None) -> QualityMap:
    alpha = check_alpha(alpha)
    return QualityMap(intensity_scale(raw_map(metric, x_ref, x_hat, cfgs), alpha), metric, alpha)


def fuse_maps(m1, m2, m3, w: FusionWeights = FusionWeights()) -> np.ndarray:
    """Pointwise convex combination of three maps.

    The result is clipped to the pointwise min/max of the inputs so rounding
    can never push it outside their range.
    """
    stack = []
    for i, m in enumerate((m1, m2, m3), start=1):
        plane = m.plane if isinstance(m, QualityMap) else m
        stack.append(as_plane(plane, f"map {i}"))
    if not (stack[0].shape == stack[1].shape == stack[2].shape):
        raise InvalidInputError(
            f"map shapes differ: {[s.shape for s in stack]}"
        )
    a, b, c = stack
    fused = w.w1 * a + w.w2 * b + w.w3 * c
    lo = np.minimum(np.minimum(a, b), c)
    hi = np.maximum(np.maximum(a, b), c)
    return np.clip(fused, lo, hi)
