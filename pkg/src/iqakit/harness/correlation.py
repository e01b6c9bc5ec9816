"""Spearman (SROCC) and Pearson (LCC) correlation coefficients."""
from __future__ import annotations

import math

import numpy as np
from scipy.stats import rankdata

from ..errors import InvalidInputError, UndefinedCorrelationError


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.size != b.size:
        raise InvalidInputError(f"sequence lengths differ: {a.size} vs {b.size}")
    if a.size < 2:
        raise InvalidInputError("correlation needs at least two observations")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise InvalidInputError("correlation inputs must be finite")
    return a, b


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    da = a - a.mean()
    db = b - b.mean()
    saa = float(np.dot(da, da))
    sbb = float(np.dot(db, db))
    if saa == 0.0 or sbb == 0.0:
        raise UndefinedCorrelationError("correlation is undefined for a constant sequence")
    r = float(np.dot(da, db)) / math.sqrt(saa * sbb)
    return min(1.0, max(-1.0, r))


def lcc(a, b) -> float:
    """Pearson linear correlation coefficient."""
    return _pearson(*_pair(a, b))


def srocc(a, b) -> float:
    """Spearman rank-order correlation with average ranks for ties."""
    a, b = _pair(a, b)
    return _pearson(rankdata(a, method="average"), rankdata(b, method="average"))
