"""SSIM components, mean SSIM, MS-SSIM and the SSIM-induced distance d_b.

Local statistics are Gaussian-weighted (11x11, sigma 1.5 by default) with
replicate borders, so every map has the input's dimensions.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, InvalidParameterError
from .imgcore import as_plane, convolve_same, downsample2, gaussian_window

# Per-scale exponents of the five-scale MS-SSIM, renormalized to sum to one.
_MS_WEIGHTS_RAW = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)
MS_SSIM_WEIGHTS = tuple(w / sum(_MS_WEIGHTS_RAW) for w in _MS_WEIGHTS_RAW)


@dataclass(frozen=True)
class SsimConfig:
    window: np.ndarray = field(default_factory=lambda: gaussian_window(11, 1.5))
    dynamic_range: float = 1.0
    C1: float | None = None
    C2: float | None = None

    def __post_init__(self):
        win = np.asarray(self.window, dtype=np.float64)
        if win.ndim != 2 or win.shape[0] % 2 == 0 or win.shape[1] % 2 == 0:
            raise InvalidParameterError(f"SSIM window must have odd sides, got {win.shape}")
        object.__setattr__(self, "window", win)
        if self.C1 is None:
            object.__setattr__(self, "C1", (0.01 * self.dynamic_range) ** 2)
        if self.C2 is None:
            object.__setattr__(self, "C2", (0.03 * self.dynamic_range) ** 2)
        if not (self.C1 > 0 and self.C2 > 0):
            raise InvalidParameterError("SSIM stabilizers C1 and C2 must be positive")

    @classmethod
    def gaussian(cls, size: int = 11, sigma: float = 1.5, **kwargs) -> "SsimConfig":
        return cls(window=gaussian_window(size, sigma), **kwargs)

    def describe(self) -> dict:
        return {
            "window": list(self.window.shape),
            "C1": self.C1,
            "C2": self.C2,
            "dynamic_range": self.dynamic_range,
        }


@dataclass(frozen=True)
class MsSsimConfig:
    base: SsimConfig = field(default_factory=SsimConfig)
    scales: int = 5
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.scales < 1:
            raise InvalidParameterError("MS-SSIM needs at least one scale")
        weights = self.weights
        if weights is None:
            if self.scales == len(MS_SSIM_WEIGHTS):
                weights = MS_SSIM_WEIGHTS
            else:
                weights = (1.0 / self.scales,) * self.scales
        weights = tuple(float(w) for w in weights)
        if len(weights) != self.scales:
            raise InvalidParameterError(
                f"{len(weights)} MS-SSIM weights given for {self.scales} scales"
            )
        if any(w <= 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-12:
            raise InvalidParameterError("MS-SSIM weights must be positive and sum to 1")
        object.__setattr__(self, "weights", weights)


@dataclass(frozen=True)
class SsimMaps:
    luminance: np.ndarray
    contrast_structure: np.ndarray
    ssim: np.ndarray
    mean_ssim: float


def _check_pair(x, y, cfg: SsimConfig) -> tuple[np.ndarray, np.ndarray]:
    x = as_plane(x, "x")
    y = as_plane(y, "y")
    if x.shape != y.shape:
        raise InvalidInputError(f"image sizes differ: {x.shape} vs {y.shape}")
    wh, ww = cfg.window.shape
    if x.shape[0] < wh or x.shape[1] < ww:
        raise InvalidInputError(
            f"image {x.shape} is smaller than the {wh}x{ww} SSIM window"
        )
    return x, y


def ssim_maps(x, y, cfg: SsimConfig | None = None) -> SsimMaps:
    """Per-pixel luminance and contrast-structure terms and their product."""
    cfg = cfg or SsimConfig()
    x, y = _check_pair(x, y, cfg)
    win = cfg.window

    mu_x = convolve_same(x, win)
    mu_y = convolve_same(y, win)
    sigma_x2 = convolve_same(x * x, win) - mu_x * mu_x
    sigma_y2 = convolve_same(y * y, win) - mu_y * mu_y
    sigma_xy = convolve_same(x * y, win) - mu_x * mu_y

    lum = (2 * mu_x * mu_y + cfg.C1) / (mu_x * mu_x + mu_y * mu_y + cfg.C1)
    cs = (2 * sigma_xy + cfg.C2) / (sigma_x2 + sigma_y2 + cfg.C2)
    ssim = lum * cs
    return SsimMaps(lum, cs, ssim, float(ssim.mean()))


def ssim(x, y, cfg: SsimConfig | None = None) -> float:
    return ssim_maps(x, y, cfg).mean_ssim


def max_ms_ssim_scales(shape: tuple[int, int], window_size: int) -> int:
    """Largest scale count for which the deepest level still holds the window."""
    side = min(shape)
    scales = 0
    while side >= window_size * 2**scales:
        scales += 1
    return scales


def ms_ssim_levels(x, y, cfg: MsSsimConfig | None = None) -> list[SsimMaps]:
    """SSIM maps at each pyramid level, finest first."""
    cfg = cfg or MsSsimConfig()
    x, y = _check_pair(x, y, cfg.base)
    wsize = max(cfg.base.window.shape)
    if min(x.shape) < wsize * 2 ** (cfg.scales - 1):
        feasible = max_ms_ssim_scales(x.shape, wsize)
        raise InvalidInputError(
            f"image {x.shape} too small for {cfg.scales} MS-SSIM scales; "
            f"at most {feasible} scale(s) fit"
        )
    levels = []
    for s in range(cfg.scales):
        levels.append(ssim_maps(x, y, cfg.base))
        if s < cfg.scales - 1:
            x, y = downsample2(x), downsample2(y)
    return levels


def ms_ssim(x, y, cfg: MsSsimConfig | None = None) -> float:
    """Multi-scale SSIM.

    Contrast-structure means of the finer scales and the full SSIM mean of the
    coarsest scale are raised to their weights and multiplied. Negative means
    are clamped to zero so the score stays in [0, 1].
    """
    cfg = cfg or MsSsimConfig()
    levels = ms_ssim_levels(x, y, cfg)
    score = 1.0
    for s, (maps, w) in enumerate(zip(levels, cfg.weights)):
        if s < cfg.scales - 1:
            term = float(maps.contrast_structure.mean())
        else:
            term = maps.mean_ssim
        score *= max(term, 0.0) ** w
    return score


def ssim_distance(x, y, cfg: SsimConfig | None = None) -> tuple[np.ndarray, float]:
    """Per-pixel d_b = sqrt(2 - L - CS) and its root-mean-square over the image."""
    maps = ssim_maps(x, y, cfg)
    radicand = np.maximum(2.0 - maps.luminance - maps.contrast_structure, 0.0)
    db = np.sqrt(radicand)
    return db, float(np.sqrt(np.mean(radicand)))
