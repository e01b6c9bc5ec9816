"""Seeded synthetic distortions: noise, blur, block-DCT quantization, mean shift."""
from __future__ import annotations

import math
from typing import Literal

import numpy as np
from scipy.fft import dctn, idctn

from ..errors import InvalidParameterError
from ..imgcore import as_tensor, convolve_same, gaussian_window

DistortionKind = Literal["agn", "gaussian_blur", "block_jpeg_like", "mean_shift"]
DISTORTION_KINDS = ("agn", "gaussian_blur", "block_jpeg_like", "mean_shift")

# JPEG luminance quantization table (quality 50), on the 0-255 scale
_JPEG_LUMA = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=np.float64) / 255.0


def _per_plane(img: np.ndarray, fn) -> np.ndarray:
    if img.ndim == 2:
        return fn(img)
    return np.stack([fn(img[:, :, c]) for c in range(img.shape[2])], axis=-1)


def _blur(p: np.ndarray, sigma: float) -> np.ndarray:
    # truncate at 3 sigma, capped so the kernel fits the image
    radius = min(max(1, math.ceil(3.0 * sigma)), min(p.shape) - 1)
    return convolve_same(p, gaussian_window(2 * radius + 1, sigma))


def _block_dct(p: np.ndarray, level: float) -> np.ndarray:
    h, w = p.shape
    ph, pw = -h % 8, -w % 8
    padded = np.pad(p, ((0, ph), (0, pw)), mode="edge")
    H, W = padded.shape
    blocks = padded.reshape(H // 8, 8, W // 8, 8).transpose(0, 2, 1, 3)
    coeffs = dctn(blocks, axes=(-2, -1), norm="ortho")
    step = level * _JPEG_LUMA
    coeffs = np.round(coeffs / step) * step
    out = idctn(coeffs, axes=(-2, -1), norm="ortho")
    return out.transpose(0, 2, 1, 3).reshape(H, W)[:h, :w]


def synth_distort(img, kind: str, level: float, seed: int) -> np.ndarray:
    """Apply one distortion; identical (kind, level, seed) gives identical output.

    agn: additive N(0, level^2) noise (level is the standard deviation).
    gaussian_blur: Gaussian blur with sigma = level.
    block_jpeg_like: 8x8 block-DCT quantization, steps = level * JPEG luma table.
    mean_shift: adds the constant ``level``.
    Results are clamped to [0, 1].
    """
    img = as_tensor(img)
    if not level > 0:
        raise InvalidParameterError(f"distortion level must be positive, got {level}")
    if kind == "agn":
        rng = np.random.default_rng(seed)
        out = img + rng.normal(0.0, level, size=img.shape)
    elif kind == "gaussian_blur":
        out = _per_plane(img, lambda p: _blur(p, level))
    elif kind == "block_jpeg_like":
        out = _per_plane(img, lambda p: _block_dct(p, level))
    elif kind == "mean_shift":
        out = img + level
    else:
        raise InvalidParameterError(
            f"unknown distortion kind {kind!r}; choose from {DISTORTION_KINDS}"
        )
    return np.clip(out, 0.0, 1.0)
