"""NIQE: MSCN coefficients, GGD/AGGD fits, patch MVG models and their distance.

Pixels are in [0, 1], so the MSCN stabilizer is 1/255 (the usual +1 on
0-255 data). Features per scale are the GGD (shape, variance) of the MSCN
field and the AGGD (shape, mean, left variance, right variance) of the four
neighbour products H, V, D1, D2: 18 values.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.special import gamma as gamma_fn

from .errors import (
    EstimationError,
    ImageIOError,
    InvalidInputError,
    InvalidParameterError,
    NumericError,
)
from .imgcore import as_plane, convolve_same, downsample2, gaussian_window

FEATURES_PER_SCALE = 18
MODEL_FORMAT_VERSION = 1
MIN_FIT_SAMPLES = 100

_SHAPE_GRID = np.round(np.arange(0.2, 10.0 + 5e-4, 0.001), 3)
# E[x^2] / E[|x|]^2 of a zero-mean GGD with the given shape
_GGD_RATIO = gamma_fn(1.0 / _SHAPE_GRID) * gamma_fn(3.0 / _SHAPE_GRID) / gamma_fn(2.0 / _SHAPE_GRID) ** 2
# its reciprocal, used by the AGGD estimator
_AGGD_RATIO = 1.0 / _GGD_RATIO


@dataclass(frozen=True)
class NiqeConfig:
    window: np.ndarray = field(default_factory=lambda: gaussian_window(7, 7.0 / 6.0))
    patch_size: int = 96
    sharpness_fraction: float = 0.75
    scales: int = 2
    stabilizer: float = 1.0 / 255.0

    def __post_init__(self):
        if self.scales < 1:
            raise InvalidParameterError("NIQE needs at least one scale")
        if self.patch_size < 1 or self.patch_size % 2 ** (self.scales - 1):
            raise InvalidParameterError(
                f"patch size {self.patch_size} must be divisible by {2 ** (self.scales - 1)}"
            )
        if not 0.0 < self.sharpness_fraction <= 1.0:
            raise InvalidParameterError("sharpness_fraction must lie in (0, 1]")
        if self.stabilizer <= 0:
            raise InvalidParameterError("MSCN stabilizer must be positive")

    @property
    def dimension(self) -> int:
        return FEATURES_PER_SCALE * self.scales

    def describe(self) -> dict:
        return {
            "patch_size": self.patch_size,
            "scales": self.scales,
            "sharpness_fraction": self.sharpness_fraction,
            "window": list(self.window.shape),
        }


@dataclass(frozen=True)
class GgdParams:
    shape: float
    scale: float


@dataclass(frozen=True)
class AggdParams:
    shape: float
    scale_left: float
    scale_right: float
    mean_offset: float


@dataclass(frozen=True)
class MvgModel:
    mean: np.ndarray
    covariance: np.ndarray
    scales: int = 2
    patch_size: int = 96

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64).ravel()
        cov = np.asarray(self.covariance, dtype=np.float64)
        if cov.shape != (mean.size, mean.size):
            raise InvalidInputError(
                f"covariance shape {cov.shape} does not match mean length {mean.size}"
            )
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def dimension(self) -> int:
        return self.mean.size

    def to_dict(self) -> dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "scales": self.scales,
            "patch_size": self.patch_size,
            "mean": self.mean.tolist(),
            "covariance": self.covariance.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MvgModel":
        if data.get("format_version") != MODEL_FORMAT_VERSION:
            raise InvalidInputError(
                f"unsupported model format version {data.get('format_version')!r}"
            )
        return cls(
            mean=np.array(data["mean"], dtype=np.float64),
            covariance=np.array(data["covariance"], dtype=np.float64),
            scales=int(data["scales"]),
            patch_size=int(data["patch_size"]),
        )

    def save(self, path) -> Path:
        path = Path(path)
        try:
            path.write_text(json.dumps(self.to_dict(), indent=1) + "\n")
        except OSError as exc:
            raise ImageIOError(f"{path}: {exc}") from exc
        return path

    @classmethod
    def load(cls, path) -> "MvgModel":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except OSError as exc:
            raise ImageIOError(f"{path}: {exc.strerror or exc}") from exc
        except json.JSONDecodeError as exc:
            raise ImageIOError(f"{path}: malformed model file ({exc})") from exc
        try:
            return cls.from_dict(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise ImageIOError(f"{path}: malformed model file ({exc})") from exc


def _local_stats(p: np.ndarray, cfg: NiqeConfig) -> tuple[np.ndarray, np.ndarray]:
    wh, ww = cfg.window.shape
    if p.shape[0] < wh or p.shape[1] < ww:
        raise InvalidInputError(f"image {p.shape} is smaller than the {wh}x{ww} window")
    mu = convolve_same(p, cfg.window)
    sigma = np.sqrt(np.abs(convolve_same(p * p, cfg.window) - mu * mu))
    return mu, sigma


def mscn(p, cfg: NiqeConfig | None = None) -> np.ndarray:
    """Mean-subtracted contrast-normalized coefficients (I - mu) / (sigma + C)."""
    cfg = cfg or NiqeConfig()
    p = as_plane(p)
    mu, sigma = _local_stats(p, cfg)
    return (p - mu) / (sigma + cfg.stabilizer)


def _samples(samples) -> np.ndarray:
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size < MIN_FIT_SAMPLES:
        raise EstimationError(f"need at least {MIN_FIT_SAMPLES} samples, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise EstimationError("samples contain non-finite values")
    return x


def fit_ggd(samples) -> GgdParams:
    """Moment-matching fit of a zero-mean generalized Gaussian."""
    x = _samples(samples)
    second = np.mean(x * x)
    first = np.mean(np.abs(x))
    if not (second > 0 and first > 0):
        raise EstimationError("GGD fit needs samples with nonzero variance")
    rho = second / first**2
    shape = _SHAPE_GRID[np.argmin(np.abs(_GGD_RATIO - rho))]
    return GgdParams(shape=float(shape), scale=float(math.sqrt(second)))


def fit_aggd(samples) -> AggdParams:
    """Moment-matching fit of an asymmetric generalized Gaussian.

    ``scale_left`` and ``scale_right`` are the one-sided root mean squares;
    ``mean_offset`` is the distribution mean implied by the fitted shape.
    """
    x = _samples(samples)
    left = x[x < 0]
    right = x[x > 0]
    if left.size == 0 or right.size == 0:
        raise EstimationError("AGGD fit needs samples of both signs")
    sigma_l = math.sqrt(np.mean(left * left))
    sigma_r = math.sqrt(np.mean(right * right))
    gamma_hat = sigma_l / sigma_r
    r_hat = np.mean(np.abs(x)) ** 2 / np.mean(x * x)
    r_norm = r_hat * (gamma_hat**3 + 1) * (gamma_hat + 1) / (gamma_hat**2 + 1) ** 2
    shape = float(_SHAPE_GRID[np.argmin(np.abs(_AGGD_RATIO - r_norm))])

    g1, g2, g3 = gamma_fn(1.0 / shape), gamma_fn(2.0 / shape), gamma_fn(3.0 / shape)
    beta_l = sigma_l * math.sqrt(g1 / g3)
    beta_r = sigma_r * math.sqrt(g1 / g3)
    eta = (beta_r - beta_l) * g2 / g1
    return AggdParams(shape=shape, scale_left=sigma_l, scale_right=sigma_r, mean_offset=float(eta))


def _neighbour_products(m: np.ndarray) -> tuple[np.ndarray, ...]:
    horizontal = m[:, :-1] * m[:, 1:]
    vertical = m[:-1, :] * m[1:, :]
    diag = m[:-1, :-1] * m[1:, 1:]
    anti_diag = m[:-1, 1:] * m[1:, :-1]
    return horizontal, vertical, diag, anti_diag


def _mscn_features(m: np.ndarray) -> np.ndarray:
    ggd = fit_ggd(m)
    feats = [ggd.shape, ggd.scale**2]
    for prod in _neighbour_products(m):
        a = fit_aggd(prod)
        feats += [a.shape, a.mean_offset, a.scale_left**2, a.scale_right**2]
    return np.array(feats)


def nss_features(p, cfg: NiqeConfig | None = None) -> np.ndarray:
    """18 features per scale for the whole plane, finest scale first.

    Per-scale order: GGD shape, GGD variance, then (shape, mean, left var,
    right var) for the H, V, D1 and D2 neighbour products.
    """
    cfg = cfg or NiqeConfig()
    p = as_plane(p)
    feats = []
    for s in range(cfg.scales):
        if s:
            p = downsample2(p)
        feats.append(_mscn_features(mscn(p, cfg)))
    return np.concatenate(feats)


def patch_features(p, cfg: NiqeConfig | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Features of each non-overlapping patch and the patch sharpness.

    Returns ``(features, sharpness)`` with one row per patch in row-major scan
    order. Sharpness is the mean local deviation over the finest-scale patch.
    """
    cfg = cfg or NiqeConfig()
    p = as_plane(p)
    ps = cfg.patch_size
    rows, cols = p.shape[0] // ps, p.shape[1] // ps
    if rows == 0 or cols == 0:
        raise InvalidInputError(f"image {p.shape} holds no {ps}x{ps} patch")

    per_scale = []
    sharpness = None
    img = p
    for s in range(cfg.scales):
        if s:
            img = downsample2(img)
        mu, sigma = _local_stats(img, cfg)
        coeffs = (img - mu) / (sigma + cfg.stabilizer)
        size = ps >> s
        feats = []
        sharp = []
        for i in range(rows):
            for j in range(cols):
                sl = (slice(i * size, (i + 1) * size), slice(j * size, (j + 1) * size))
                feats.append(_mscn_features(coeffs[sl]))
                sharp.append(sigma[sl].mean())
        per_scale.append(np.array(feats))
        if s == 0:
            sharpness = np.array(sharp)
    return np.hstack(per_scale), sharpness


def fit_mvg(features: np.ndarray, cfg: NiqeConfig) -> MvgModel:
    """Sample mean and covariance with a +1e-6 * trace/dim diagonal ridge."""
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    n, dim = features.shape
    mean = features.mean(axis=0)
    if n > 1:
        cov = np.cov(features, rowvar=False)
    else:
        cov = np.zeros((dim, dim))
    cov = 0.5 * (cov + cov.T)
    cov = cov + (1e-6 * np.trace(cov) / dim) * np.eye(dim)
    return MvgModel(mean, cov, scales=cfg.scales, patch_size=cfg.patch_size)


def fit_pristine(corpus: Sequence, cfg: NiqeConfig | None = None) -> MvgModel:
    """MVG model over the sharpest patches of a pristine image corpus."""
    cfg = cfg or NiqeConfig()
    if len(corpus) < 10:
        raise InvalidInputError(f"pristine corpus needs at least 10 images, got {len(corpus)}")
    selected = []
    for p in corpus:
        feats, sharp = patch_features(p, cfg)
        keep = max(1, math.ceil(cfg.sharpness_fraction * len(sharp)))
        order = np.argsort(-sharp, kind="stable")[:keep]
        selected.append(feats[np.sort(order)])
    features = np.vstack(selected)
    if features.shape[0] < 2:
        raise EstimationError("too few patches to estimate a covariance")
    return fit_mvg(features, cfg)


def niqe_distance(a: MvgModel, b: MvgModel) -> float:
    """sqrt(d^T ((Sa + Sb) / 2)^-1 d) with d the mean difference."""
    if a.dimension != b.dimension:
        raise InvalidInputError(
            f"model dimensions differ: {a.dimension} vs {b.dimension}"
        )
    diff = a.mean - b.mean
    pooled = 0.5 * (a.covariance + b.covariance)
    try:
        sol = np.linalg.solve(pooled, diff)
    except np.linalg.LinAlgError as exc:
        raise NumericError("pooled covariance is singular") from exc
    quad = float(diff @ sol)
    if not math.isfinite(quad):
        raise NumericError("NIQE distance is not finite")
    return math.sqrt(max(quad, 0.0))


def niqe_score(p, pristine: MvgModel, cfg: NiqeConfig | None = None) -> float:
    """Distance between the test image's patch MVG (all patches) and ``pristine``."""
    cfg = cfg or NiqeConfig()
    if pristine.dimension != cfg.dimension:
        raise InvalidInputError(
            f"pristine model has {pristine.dimension} features but the configuration "
            f"produces {cfg.dimension}"
        )
    feats, _ = patch_features(p, cfg)
    return niqe_distance(fit_mvg(feats, cfg), pristine)
