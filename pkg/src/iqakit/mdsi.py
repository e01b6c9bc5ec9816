"""Mean Deviation Similarity Index.

Gradient similarity (Prewitt) and LHM chromaticity similarity are combined
into a GCS map on a 2x downsampled image, then pooled by mean absolute
deviation. Constants are the originals divided by 255**2 for unit-range input.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, InvalidParameterError
from .fsim import gradient_magnitude, similarity_ratio
from .imgcore import as_plane, as_tensor, channels, downsample2


@dataclass(frozen=True)
class MdsiConfig:
    c1: float = 140.0 / 255.0**2
    c2: float = 55.0 / 255.0**2
    c3: float = 550.0 / 255.0**2
    mix_weight: float = 0.6
    pooling_exponent_q: float = 0.25
    map_power: float = 0.25

    def __post_init__(self):
        if min(self.c1, self.c2, self.c3) <= 0:
            raise InvalidParameterError("MDSI stabilizers must be positive")
        if not 0.0 <= self.mix_weight <= 1.0:
            raise InvalidParameterError("mix_weight must lie in [0, 1]")
        if self.pooling_exponent_q <= 0 or self.map_power <= 0:
            raise InvalidParameterError("MDSI exponents must be positive")

    def describe(self) -> dict:
        return {
            "c1": self.c1,
            "c2": self.c2,
            "c3": self.c3,
            "mix_weight": self.mix_weight,
            "q": self.pooling_exponent_q,
            "map_power": self.map_power,
        }


@dataclass(frozen=True)
class MdsiResult:
    score: float
    gcs_map: np.ndarray


def _lhm(img: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    r, g, b = img[:, :, 0], img[:, :, 1], img[:, :, 2]
    lum = 0.2989 * r + 0.5870 * g + 0.1140 * b
    h = 0.30 * r + 0.04 * g - 0.35 * b
    m = 0.34 * r - 0.60 * g + 0.17 * b
    return lum, h, m


def deviation_pool(gcs, power: float = 0.25, q: float = 0.25) -> float:
    """( mean |m^power - mean(m^power)| )^q."""
    gcs = as_plane(gcs, "map")
    if np.any(gcs < 0):
        raise InvalidInputError("deviation pooling needs a nonnegative map")
    powered = gcs**power
    # shifted mean: exact for constant maps
    pivot = powered.flat[0]
    centre = pivot + np.mean(powered - pivot)
    return float(np.mean(np.abs(powered - centre)) ** q)


def mdsi(x, y, cfg: MdsiConfig | None = None) -> MdsiResult:
    """MDSI distortion score (0 for identical images) and the GCS similarity map.

    The gradient term uses the fused luminance F = (Lx + Ly) / 2. To keep the
    index symmetric in its arguments the F-similarities enter through their
    absolute difference, GS = max(0, GS_xy - |GS_xF - GS_yF|), so GS and the
    clamped chroma term both stay in [0, 1].
    """
    cfg = cfg or MdsiConfig()
    x = as_tensor(x, "x")
    y = as_tensor(y, "y")
    if x.shape != y.shape:
        raise InvalidInputError(f"image shapes differ: {x.shape} vs {y.shape}")
    if channels(x) != 3:
        raise InvalidInputError("MDSI needs 3-channel colour inputs")

    xd = np.stack([downsample2(x[:, :, c]) for c in range(3)], axis=-1)
    yd = np.stack([downsample2(y[:, :, c]) for c in range(3)], axis=-1)
    lx, hx, mx = _lhm(xd)
    ly, hy, my = _lhm(yd)

    gx = gradient_magnitude(lx, "prewitt")
    gy = gradient_magnitude(ly, "prewitt")
    gf = gradient_magnitude(0.5 * (lx + ly), "prewitt")
    gs = similarity_ratio(gx, gy, cfg.c1) - np.abs(
        similarity_ratio(gx, gf, cfg.c2) - similarity_ratio(gy, gf, cfg.c2)
    )
    gs = np.maximum(gs, 0.0)

    cs = (2 * (hx * hy + mx * my) + cfg.c3) / ((hx**2 + hy**2) + (mx**2 + my**2) + cfg.c3)
    cs = np.maximum(cs, 0.0)

    gcs = cfg.mix_weight * gs + (1.0 - cfg.mix_weight) * cs
    score = deviation_pool(gcs, cfg.map_power, cfg.pooling_exponent_q)
    return MdsiResult(score, gcs)
