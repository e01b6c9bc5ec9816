"""Evaluators for the Banach-space gradient-penalty loss family.

Nothing here trains a network. Critic outputs and gradients are inputs, and
expectations are arithmetic means over the supplied batch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np

from .errors import (
    DegeneratePairError,
    DomainError,
    InvalidInputError,
    InvalidParameterError,
    NumericError,
)
from .imgcore import as_plane
from .niqe import MvgModel, NiqeConfig, fit_mvg, niqe_distance, patch_features
from .ssim import SsimConfig, ssim_distance

DB_EPSILON = 1e-8


@dataclass(frozen=True)
class PenaltyConfig:
    lam: float = 10.0
    gamma: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise InvalidParameterError("gamma must be positive")
        if self.lam < 0:
            raise InvalidParameterError("lambda must be nonnegative")


@dataclass(frozen=True)
class LbpWeights:
    lambda1: float = 1.0
    lambda2: float = 1.0
    lambda3: float = 1.0

    def __post_init__(self):
        if min(self.lambda1, self.lambda2, self.lambda3) < 0:
            raise InvalidParameterError("L_BP weights must be nonnegative")


@dataclass(frozen=True)
class DualNormSpec:
    """Which dual norm to take of a critic gradient.

    ``lp`` is evaluated exactly. For ``ssim_db`` and ``niqe_mvg`` no closed
    form is available, so the precomputed scalar ``value`` is used as the norm.
    """

    kind: Literal["lp", "ssim_db", "niqe_mvg"] = "lp"
    p: float = 2.0
    value: float | None = None

    def __post_init__(self):
        if self.kind == "lp":
            if not self.p >= 1:
                raise InvalidParameterError(f"lp norm needs p >= 1, got {self.p}")
        elif self.kind in ("ssim_db", "niqe_mvg"):
            if self.value is None or not self.value >= 0:
                raise InvalidParameterError(f"{self.kind} dual norm needs a nonnegative value")
        else:
            raise InvalidParameterError(f"unknown dual norm kind {self.kind!r}")


@dataclass(frozen=True)
class CriticSample:
    d_x: float
    d_xhat: float
    x: np.ndarray
    xhat: np.ndarray
    grad_xhat: np.ndarray | None = None

    def __post_init__(self):
        x = as_plane(self.x, "x")
        xhat = as_plane(self.xhat, "xhat")
        if x.shape != xhat.shape:
            raise InvalidInputError(f"x {x.shape} and xhat {xhat.shape} differ in size")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xhat", xhat)
        if self.grad_xhat is not None:
            grad = as_plane(self.grad_xhat, "grad_xhat")
            if grad.shape != x.shape:
                raise InvalidInputError("gradient and image dimensions differ")
            object.__setattr__(self, "grad_xhat", grad)


def dual_norm(grad, spec: DualNormSpec = DualNormSpec()) -> float:
    """Dual norm of a gradient field under the counting (pixel-average) measure.

    For ``lp(p)`` this is the L^q norm with 1/p + 1/q = 1; p = 1 gives the
    max-abs norm. A constant field has norm equal to its absolute value.
    """
    if spec.kind != "lp":
        return float(spec.value)
    g = np.abs(as_plane(grad, "gradient")).ravel()
    p = spec.p
    if p == 1:
        return float(g.max())
    if math.isinf(p):
        return float(g.mean())
    q = p / (p - 1.0)
    if q == 2.0:
        return float(math.sqrt(np.mean(g * g)))
    return float(np.mean(g**q) ** (1.0 / q))


def _nonempty(values, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise InvalidInputError(f"{what} needs at least one sample")
    if not np.all(np.isfinite(arr)):
        raise NumericError(f"{what} received non-finite values")
    return arr


def banach_gp(dual_norm_values, cfg: PenaltyConfig = PenaltyConfig()) -> float:
    """lambda * mean((||dD||_* / gamma - 1)^2)."""
    n = _nonempty(dual_norm_values, "banach_gp")
    if np.any(n < 0):
        raise InvalidInputError("dual norms must be nonnegative")
    return float(cfg.lam * np.mean((n / cfg.gamma - 1.0) ** 2))


def ssim_gp_from_distances(critic_gaps, distances) -> float:
    """mean((|D(X) - D(X^)| / d_b - 1)^2) for precomputed gaps and distances."""
    gaps = np.abs(_nonempty(critic_gaps, "ssim_gp"))
    dist = _nonempty(distances, "ssim_gp")
    if gaps.shape != dist.shape:
        raise InvalidInputError("one distance is needed per critic gap")
    for i, d in enumerate(dist):
        if d < DB_EPSILON:
            raise DegeneratePairError(i, float(d))
    return float(np.mean((gaps / dist - 1.0) ** 2))


def ssim_gp(samples: Sequence[CriticSample], cfg: SsimConfig | None = None) -> float:
    """SSIM gradient penalty using the RMS-pooled d_b of each (x, x^) pair."""
    if not samples:
        raise InvalidInputError("ssim_gp needs at least one sample")
    gaps = [s.d_x - s.d_xhat for s in samples]
    dists = [ssim_distance(s.x, s.xhat, cfg)[1] for s in samples]
    return ssim_gp_from_distances(gaps, dists)


def niqe_regularizer(grad_models: Sequence[MvgModel], pristine: MvgModel) -> float:
    """Mean NIQE distance of gradient-statistics models to the pristine model."""
    if not grad_models:
        raise InvalidInputError("niqe_regularizer needs at least one model")
    return float(np.mean([niqe_distance(m, pristine) for m in grad_models]))


def gradient_mvg(grad, cfg: NiqeConfig | None = None) -> MvgModel:
    """MVG model of a critic gradient field, built with the NIQE patch pipeline."""
    cfg = cfg or NiqeConfig()
    feats, _ = patch_features(as_plane(grad, "gradient"), cfg)
    return fit_mvg(feats, cfg)


def one_gp(grad_norms) -> float:
    """Two-sided unit-target penalty mean((||g|| - 1)^2)."""
    n = _nonempty(grad_norms, "one_gp")
    if np.any(n < 0):
        raise InvalidInputError("gradient norms must be nonnegative")
    return float(np.mean((n - 1.0) ** 2))


def l_bp(niqe_term: float, ssim_term: float, one_gp_term: float, w: LbpWeights = LbpWeights()) -> float:
    return w.lambda1 * niqe_term + w.lambda2 * ssim_term + w.lambda3 * one_gp_term


def gan_objective(d_x: float, d_g_xhat: float, score: float, l_bp_value: float) -> float:
    """log D(X) + log(1 - D(G(X^)) - score) + L_BP, with the quality score inside the log."""
    if not 0.0 < d_x < 1.0:
        raise DomainError(f"log D(X) term: D(X) = {d_x} must lie in (0, 1)")
    arg = 1.0 - d_g_xhat - score
    if not arg > 0.0:
        raise DomainError(
            f"log(1 - D(G(X^)) - score) undefined: argument {arg} from D(G(X^)) = {d_g_xhat}, score = {score}"
        )
    return math.log(d_x) + math.log(arg) + l_bp_value


def finite_diff_grad(f: Callable[[np.ndarray], float], p, h: float = 1e-5) -> np.ndarray:
    """Central-difference gradient of a scalar function of a plane."""
    if not h > 0:
        raise InvalidParameterError("step h must be positive")
    p = as_plane(p)
    grad = np.empty_like(p)
    work = p.copy()
    for idx in np.ndindex(p.shape):
        orig = work[idx]
        work[idx] = orig + h
        f_plus = f(work)
        work[idx] = orig - h
        f_minus = f(work)
        work[idx] = orig
        if not (math.isfinite(f_plus) and math.isfinite(f_minus)):
            raise NumericError(f"non-finite function value near pixel {idx}")
        grad[idx] = (f_plus - f_minus) / (2.0 * h)
    return grad
