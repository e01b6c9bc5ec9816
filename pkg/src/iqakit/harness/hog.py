"""Histogram of oriented gradients and cosine descriptor similarity."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError, InvalidParameterError
from ..imgcore import as_plane

_L2HYS_CLIP = 0.2
_L2HYS_EPS = 1e-5


@dataclass(frozen=True)
class HogConfig:
    cell: int = 8
    bins: int = 9
    block: int = 2
    unsigned: bool = True

    def __post_init__(self):
        if self.cell < 1 or self.bins < 1 or self.block < 1:
            raise InvalidParameterError("HOG cell, bins and block must be positive")


def _gradients(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    padded = np.pad(p, 1, mode="edge")
    gx = padded[1:-1, 2:] - padded[1:-1, :-2]
    gy = padded[2:, 1:-1] - padded[:-2, 1:-1]
    return gx, gy


def cell_histograms(p, cfg: HogConfig = HogConfig()) -> np.ndarray:
    """Magnitude-weighted orientation histograms, shape (cells_y, cells_x, bins)."""
    p = as_plane(p)
    gx, gy = _gradients(p)
    magnitude = np.hypot(gx, gy)
    span = 180.0 if cfg.unsigned else 360.0
    angle = np.degrees(np.arctan2(gy, gx)) % span
    bins = np.minimum((angle / (span / cfg.bins)).astype(int), cfg.bins - 1)

    cy, cx = p.shape[0] // cfg.cell, p.shape[1] // cfg.cell
    hist = np.zeros((cy, cx, cfg.bins))
    rows = np.arange(cy * cfg.cell) // cfg.cell
    cols = np.arange(cx * cfg.cell) // cfg.cell
    r_idx = np.broadcast_to(rows[:, None], (rows.size, cols.size))
    c_idx = np.broadcast_to(cols[None, :], (rows.size, cols.size))
    crop = (slice(0, rows.size), slice(0, cols.size))
    np.add.at(hist, (r_idx, c_idx, bins[crop]), magnitude[crop])
    return hist


def _l2hys(v: np.ndarray) -> np.ndarray:
    v = v / math.sqrt(float(np.dot(v, v)) + _L2HYS_EPS**2)
    v = np.minimum(v, _L2HYS_CLIP)
    return v / math.sqrt(float(np.dot(v, v)) + _L2HYS_EPS**2)


def hog_descriptor(p, cfg: HogConfig = HogConfig()) -> np.ndarray:
    """Concatenated L2-Hys-normalized blocks, sliding one cell at a time."""
    p = as_plane(p)
    need = cfg.cell * cfg.block
    if p.shape[0] < need or p.shape[1] < need:
        raise InvalidInputError(f"HOG needs at least {need}x{need} pixels, got {p.shape}")
    hist = cell_histograms(p, cfg)
    cy, cx, _ = hist.shape
    blocks = []
    for by in range(cy - cfg.block + 1):
        for bx in range(cx - cfg.block + 1):
            blocks.append(_l2hys(hist[by : by + cfg.block, bx : bx + cfg.block].ravel()))
    return np.concatenate(blocks)


def hog_similarity(a, b) -> float:
    """Cosine similarity of two descriptors."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise InvalidInputError(f"descriptor lengths differ: {a.size} vs {b.size}")
    saa, sbb = float(np.dot(a, a)), float(np.dot(b, b))
    if saa == 0 or sbb == 0:
        raise InvalidInputError("cosine similarity is undefined for a zero descriptor")
    return float(np.clip(np.dot(a, b) / math.sqrt(saa * sbb), -1.0, 1.0))
