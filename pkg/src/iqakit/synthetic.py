"""Procedural test images: 1/f noise, ramps, textures and checkerboards."""
from __future__ import annotations

import numpy as np


def _normalize(p: np.ndarray, mean: float = 0.5, spread: float = 0.15) -> np.ndarray:
    p = (p - p.mean()) / (p.std() + 1e-12)
    return np.clip(mean + spread * p, 0.0, 1.0)


def pink_noise(shape: tuple[int, int], seed: int, exponent: float = 1.0) -> np.ndarray:
    """Gray plane with a 1/f^exponent amplitude spectrum, mean 0.5, std ~0.15."""
    rng = np.random.default_rng(seed)
    h, w = shape
    fy = np.fft.fftfreq(h)[:, None]
    fx = np.fft.fftfreq(w)[None, :]
    radius = np.sqrt(fx**2 + fy**2)
    radius[0, 0] = 1.0
    amplitude = radius**-exponent
    amplitude[0, 0] = 0.0
    phase = rng.uniform(0, 2 * np.pi, size=shape)
    field = np.fft.ifft2(amplitude * np.exp(1j * phase)).real
    return _normalize(field)


def pink_noise_rgb(shape: tuple[int, int], seed: int, chroma: float = 0.35) -> np.ndarray:
    """Colour 1/f image: shared luminance plus weaker independent chroma fields."""
    lum = pink_noise(shape, seed) - 0.5
    rgb = []
    for c in range(3):
        chroma_field = pink_noise(shape, seed * 7919 + 31 * (c + 1)) - 0.5
        rgb.append(0.5 + lum + chroma * chroma_field)
    return np.clip(np.stack(rgb, axis=-1), 0.0, 1.0)


def ramp(shape: tuple[int, int], horizontal: bool = True) -> np.ndarray:
    h, w = shape
    if horizontal:
        return np.tile(np.linspace(0.0, 1.0, w), (h, 1))
    return np.tile(np.linspace(0.0, 1.0, h)[:, None], (1, w))


def texture(shape: tuple[int, int], seed: int, components: int = 6) -> np.ndarray:
    """Sum of randomly oriented sinusoidal gratings plus a little 1/f noise."""
    rng = np.random.default_rng(seed)
    h, w = shape
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    acc = np.zeros(shape)
    for _ in range(components):
        theta = rng.uniform(0, np.pi)
        period = rng.uniform(4.0, 32.0)
        phase = rng.uniform(0, 2 * np.pi)
        k = 2 * np.pi / period
        acc += rng.uniform(0.5, 1.0) * np.sin(k * (xx * np.cos(theta) + yy * np.sin(theta)) + phase)
    acc += 0.5 * (pink_noise(shape, seed + 1) - 0.5) / 0.15
    return _normalize(acc)


def checkerboard(shape: tuple[int, int], cell: int = 1) -> np.ndarray:
    h, w = shape
    yy, xx = np.mgrid[0:h, 0:w]
    return (((yy // cell) + (xx // cell)) % 2).astype(np.float64)


def gallery(count: int, shape: tuple[int, int] = (192, 192), seed: int = 0, color: bool = False) -> list[np.ndarray]:
    """Mixed set of 1/f noise, ramps and textures, deterministic in ``seed``."""
    images = []
    for i in range(count):
        kind = i % 3
        s = seed * 1000 + i
        if kind == 0:
            img = pink_noise(shape, s)
        elif kind == 1:
            img = 0.6 * ramp(shape, horizontal=bool(i % 2)) + 0.4 * pink_noise(shape, s)
        else:
            img = texture(shape, s)
        if color:
            tint = pink_noise_rgb(shape, s) - 0.5
            img = np.clip(img[:, :, None] + 0.5 * tint, 0.0, 1.0)
        images.append(img)
    return images
