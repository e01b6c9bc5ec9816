"""Gray-level co-occurrence matrices and Haralick texture features."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError, InvalidParameterError
from ..imgcore import as_plane


@dataclass(frozen=True)
class GlcmConfig:
    levels: int = 8
    offsets: tuple[tuple[int, int], ...] = ((0, 1), (1, 0), (1, 1), (1, -1))
    symmetric: bool = True

    def __post_init__(self):
        if self.levels < 2:
            raise InvalidParameterError("GLCM needs at least two gray levels")
        if not self.offsets or any(di == 0 and dj == 0 for di, dj in self.offsets):
            raise InvalidParameterError("GLCM offsets must be nonzero")


def quantize(p: np.ndarray, levels: int) -> np.ndarray:
    """Uniform bins over [0, 1]; 1.0 falls in the top bin."""
    q = np.floor(np.clip(p, 0.0, 1.0) * levels).astype(int)
    return np.minimum(q, levels - 1)


def glcm(p, offset: tuple[int, int], levels: int = 8, symmetric: bool = True) -> np.ndarray:
    """Normalized co-occurrence matrix for one (row, col) offset."""
    q = quantize(as_plane(p), levels)
    h, w = q.shape
    di, dj = offset
    r0, r1 = max(0, -di), min(h, h - di)
    c0, c1 = max(0, -dj), min(w, w - dj)
    if r1 <= r0 or c1 <= c0:
        raise InvalidInputError(f"offset {offset} leaves no pixel pairs in a {h}x{w} image")
    src = q[r0:r1, c0:c1].ravel()
    dst = q[r0 + di : r1 + di, c0 + dj : c1 + dj].ravel()
    counts = np.zeros((levels, levels))
    np.add.at(counts, (src, dst), 1.0)
    if symmetric:
        counts = counts + counts.T
    return counts / counts.sum()


def haralick(P: np.ndarray) -> dict[str, float]:
    """Entropy (bits), contrast, homogeneity and correlation of a normalized GLCM."""
    levels = P.shape[0]
    i, j = np.indices((levels, levels))
    nz = P[P > 0]
    entropy = float(-np.sum(nz * np.log2(nz))) + 0.0
    contrast = float(np.sum(P * (i - j) ** 2))
    homogeneity = float(np.sum(P / (1.0 + (i - j) ** 2)))
    mu_i = np.sum(i * P)
    mu_j = np.sum(j * P)
    sd_i = np.sqrt(np.sum(P * (i - mu_i) ** 2))
    sd_j = np.sqrt(np.sum(P * (j - mu_j) ** 2))
    if sd_i < 1e-15 or sd_j < 1e-15:
        # a single populated row/column is perfectly (trivially) correlated
        correlation = 1.0
    else:
        correlation = float(np.sum(P * (i - mu_i) * (j - mu_j)) / (sd_i * sd_j))
    return {
        "entropy": entropy,
        "contrast": contrast,
        "homogeneity": homogeneity,
        "correlation": correlation,
    }


def glcm_features(p, cfg: GlcmConfig = GlcmConfig()) -> dict[str, float]:
    """Haralick features averaged over the configured offsets."""
    p = as_plane(p)
    if p.shape[0] < 2 or p.shape[1] < 2:
        raise InvalidInputError(f"GLCM needs at least a 2x2 image, got {p.shape}")
    per_offset = [haralick(glcm(p, off, cfg.levels, cfg.symmetric)) for off in cfg.offsets]
    return {k: float(np.mean([f[k] for f in per_offset])) for k in per_offset[0]}
