"""Image containers, colour conversion, filtering, resampling and FFT helpers.

Planes are 2-D ``float64`` arrays with nominal range [0, 1]. Tensors are
either a plane (gray) or an ``H x W x 3`` array (RGB). Kernels are 2-D arrays
with odd dimensions. Every function here is pure and returns new arrays.
"""
from __future__ import annotations

from typing import Literal

import numpy as np
from scipy import ndimage

from .errors import InvalidInputError, InvalidParameterError

BorderMode = Literal["replicate", "reflect", "zero"]

# Rec.601 luma
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

_SCIPY_MODES = {"replicate": "nearest", "reflect": "reflect", "zero": "constant"}


def as_plane(p, name: str = "plane") -> np.ndarray:
    """Validate and convert ``p`` to a finite 2-D float64 array."""
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInputError(f"{name} must be a nonempty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite samples")
    return arr


def as_tensor(img, name: str = "image") -> np.ndarray:
    """Validate an image tensor: ``H x W`` (gray) or ``H x W x C`` with C in {1, 3}."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        return as_plane(arr, name)
    if arr.ndim != 3 or arr.shape[2] not in (1, 3):
        raise InvalidInputError(f"{name} must have 1 or 3 channels, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidInputError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite samples")
    return arr


def channels(img: np.ndarray) -> int:
    return 1 if img.ndim == 2 else img.shape[2]


def planes(img: np.ndarray) -> list[np.ndarray]:
    """Split a tensor into its ordered list of planes."""
    img = as_tensor(img)
    if img.ndim == 2:
        return [img]
    return [img[:, :, c] for c in range(img.shape[2])]


def to_grayscale(img) -> np.ndarray:
    """Luminance plane of ``img``; gray input is returned unchanged."""
    arr = as_tensor(img)
    if arr.ndim == 2:
        return arr
    if arr.shape[2] == 1:
        return arr[:, :, 0]
    # a convex combination stays within the channel range; clip away rounding
    return np.clip(arr @ LUMA_WEIGHTS, arr.min(axis=2), arr.max(axis=2))


def gaussian_window(size: int, sigma: float) -> np.ndarray:
    """Normalized ``size x size`` Gaussian kernel."""
    if int(size) != size or size < 1 or size % 2 == 0:
        raise InvalidParameterError(f"window size must be an odd integer >= 1, got {size}")
    if not sigma > 0:
        raise InvalidParameterError(f"sigma must be positive, got {sigma}")
    half = int(size) // 2
    offsets = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(offsets**2) / (2.0 * sigma**2))
    k = np.outer(g, g)
    return k / k.sum()


def convolve_same(p, k, border: BorderMode = "replicate") -> np.ndarray:
    """2-D convolution with output the size of ``p``.

    The kernel is not flipped by the caller: a unit impulse reproduces ``k``
    centred on the impulse. Kernels may be at most twice the smaller image side.
    """
    p = as_plane(p)
    k = np.asarray(k, dtype=np.float64)
    if k.ndim != 2 or k.shape[0] % 2 == 0 or k.shape[1] % 2 == 0:
        raise InvalidParameterError(f"kernel must be 2-D with odd sides, got {k.shape}")
    if max(k.shape) > 2 * min(p.shape):
        raise InvalidParameterError(
            f"kernel {k.shape} is too large for a {p.shape} image"
        )
    if border not in _SCIPY_MODES:
        raise InvalidParameterError(f"unknown border mode {border!r}")
    return ndimage.convolve(p, k, mode=_SCIPY_MODES[border], cval=0.0)


def downsample2(p) -> np.ndarray:
    """2x2 box average followed by decimation; odd trailing rows/cols are dropped."""
    p = as_plane(p)
    h, w = p.shape
    if h < 2 or w < 2:
        raise InvalidInputError(f"cannot downsample a {h}x{w} plane")
    h2, w2 = h // 2, w // 2
    blocks = p[: 2 * h2, : 2 * w2].reshape(h2, 2, w2, 2)
    return blocks.mean(axis=(1, 3))


def resize_bilinear(p, shape: tuple[int, int]) -> np.ndarray:
    """Bilinear resampling with pixel-centre alignment and edge clamping."""
    p = as_plane(p)
    out_h, out_w = shape
    in_h, in_w = p.shape
    ys = np.clip((np.arange(out_h) + 0.5) * (in_h / out_h) - 0.5, 0, in_h - 1)
    xs = np.clip((np.arange(out_w) + 0.5) * (in_w / out_w) - 0.5, 0, in_w - 1)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]
    top = p[np.ix_(y0, x0)] * (1 - wx) + p[np.ix_(y0, x1)] * wx
    bottom = p[np.ix_(y1, x0)] * (1 - wx) + p[np.ix_(y1, x1)] * wx
    return top * (1 - wy) + bottom * wy


def fft2(p) -> np.ndarray:
    """Unnormalized forward DFT; any size."""
    return np.fft.fft2(as_plane(p))


def ifft2(spectrum) -> np.ndarray:
    """Inverse of :func:`fft2`, returning the real part."""
    return np.fft.ifft2(np.asarray(spectrum)).real
