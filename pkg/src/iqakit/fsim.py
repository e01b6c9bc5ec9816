"""Phase congruency, gradient magnitude and the FSIM / FSIMc index.

Phase congruency follows Kovesi's log-Gabor formulation as used by FSIM:
for each orientation the local energy across scales is noise-compensated
with a Rayleigh threshold estimated from the smallest-scale responses, and
the summed energy over all orientations is divided by the summed amplitude.

The stabilizers of the original FSIM were tuned for 0-255 pixels; the
gradient and chroma constants scale with the square of the pixel range, so
they are divided by 255**2 here. T1 acts on phase congruency, which is
range-free, and keeps its value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np

from .errors import InvalidInputError, InvalidParameterError
from .imgcore import as_plane, as_tensor, channels, convolve_same, fft2, to_grayscale

GradientOperator = Literal["scharr", "sobel", "prewitt"]

_GRADIENT_KERNELS = {
    "scharr": np.array([[3.0, 0.0, -3.0], [10.0, 0.0, -10.0], [3.0, 0.0, -3.0]]) / 16.0,
    "sobel": np.array([[1.0, 0.0, -1.0], [2.0, 0.0, -2.0], [1.0, 0.0, -1.0]]) / 4.0,
    "prewitt": np.array([[1.0, 0.0, -1.0], [1.0, 0.0, -1.0], [1.0, 0.0, -1.0]]) / 3.0,
}

_EPS = np.finfo(np.float64).eps
_LOWPASS_CUTOFF = 0.45
_LOWPASS_ORDER = 15
# empirical correction of the noise threshold for the summed-energy PC measure
_PC_NOISE_RESCALE = 1.7


@dataclass(frozen=True)
class LogGaborBank:
    scales: int = 4
    orientations: int = 4
    min_wavelength: float = 6.0
    scaling_factor: float = 2.0
    sigma_on_f: float = 0.55
    angular_spread: float | None = None

    def __post_init__(self):
        if self.scales < 1 or self.orientations < 1:
            raise InvalidParameterError("filter bank needs at least one scale and orientation")
        if self.min_wavelength <= 2 or self.scaling_factor <= 1:
            raise InvalidParameterError("min_wavelength must exceed 2 px and scaling_factor 1")
        if not 0 < self.sigma_on_f < 1:
            raise InvalidParameterError("sigma_on_f must lie in (0, 1)")
        if self.angular_spread is None:
            object.__setattr__(self, "angular_spread", math.pi / (2 * self.orientations))
        if not self.angular_spread > 0:
            raise InvalidParameterError("angular_spread must be positive")

    def filters(self, shape: tuple[int, int]) -> np.ndarray:
        """Frequency-domain filters, shape ``(orientations, scales, H, W)``, DC at [0, 0]."""
        return _build_filters(tuple(shape), self)


@lru_cache(maxsize=32)
def _build_filters(shape: tuple[int, int], bank: LogGaborBank) -> np.ndarray:
    h, w = shape
    fy = np.fft.fftfreq(h)[:, None]
    fx = np.fft.fftfreq(w)[None, :]
    radius = np.sqrt(fx**2 + fy**2)
    theta = np.arctan2(-fy, fx)
    radius[0, 0] = 1.0  # avoid log(0); the DC bin is zeroed below

    lowpass = 1.0 / (1.0 + (radius / _LOWPASS_CUTOFF) ** (2 * _LOWPASS_ORDER))
    radial = []
    for s in range(bank.scales):
        f0 = 1.0 / (bank.min_wavelength * bank.scaling_factor**s)
        g = np.exp(-(np.log(radius / f0) ** 2) / (2 * math.log(bank.sigma_on_f) ** 2))
        g *= lowpass
        g[0, 0] = 0.0
        radial.append(g)

    sin_t, cos_t = np.sin(theta), np.cos(theta)
    bank_filters = np.empty((bank.orientations, bank.scales, h, w))
    for o in range(bank.orientations):
        angle = o * math.pi / bank.orientations
        ds = sin_t * math.cos(angle) - cos_t * math.sin(angle)
        dc = cos_t * math.cos(angle) + sin_t * math.sin(angle)
        dtheta = np.abs(np.arctan2(ds, dc))
        spread = np.exp(-(dtheta**2) / (2 * bank.angular_spread**2))
        for s in range(bank.scales):
            bank_filters[o, s] = radial[s] * spread
    # the Nyquist row/column of an even axis has no mirror bin; dropping it
    # keeps the bank symmetric under transposition
    if h % 2 == 0:
        bank_filters[:, :, h // 2, :] = 0.0
    if w % 2 == 0:
        bank_filters[:, :, :, w // 2] = 0.0
    bank_filters.flags.writeable = False
    return bank_filters


@dataclass(frozen=True)
class FsimConfig:
    bank: LogGaborBank = field(default_factory=LogGaborBank)
    T1: float = 0.85
    T2: float = 160.0 / 255.0**2
    T3: float = 200.0 / 255.0**2
    T4: float = 200.0 / 255.0**2
    chroma_exponent: float = 0.03
    gradient_operator: GradientOperator = "scharr"
    noise_threshold_k: float = 2.0

    def __post_init__(self):
        if min(self.T1, self.T2, self.T3, self.T4) <= 0:
            raise InvalidParameterError("FSIM stabilizers must be positive")
        if self.gradient_operator not in _GRADIENT_KERNELS:
            raise InvalidParameterError(f"unknown gradient operator {self.gradient_operator!r}")

    def describe(self) -> dict:
        return {
            "scales": self.bank.scales,
            "orientations": self.bank.orientations,
            "min_wavelength": self.bank.min_wavelength,
            "sigma_on_f": self.bank.sigma_on_f,
            "T1": self.T1,
            "T2": self.T2,
            "gradient_operator": self.gradient_operator,
            "k": self.noise_threshold_k,
        }


@dataclass(frozen=True)
class FsimResult:
    score: float
    similarity_map: np.ndarray
    pc_x: np.ndarray
    pc_y: np.ndarray
    gm_x: np.ndarray
    gm_y: np.ndarray


def phase_congruency(p, bank: LogGaborBank | None = None, noise_threshold_k: float = 2.0) -> np.ndarray:
    """Phase congruency map in [0, 1]."""
    bank = bank or LogGaborBank()
    p = as_plane(p)
    h, w = p.shape
    if h < 16 or w < 16:
        raise InvalidInputError(f"phase congruency needs at least 16x16 pixels, got {p.shape}")

    filters = bank.filters((h, w))
    spectrum = fft2(p)
    responses = np.fft.ifft2(spectrum[None, None] * filters, axes=(-2, -1))
    amplitude = np.abs(responses)

    # spatial filters, for the expected noise energy
    spatial = np.fft.ifft2(filters, axes=(-2, -1)).real * math.sqrt(h * w)

    energy_all = np.zeros((h, w))
    for o in range(bank.orientations):
        eo = responses[o]
        sum_even = eo.real.sum(axis=0)
        sum_odd = eo.imag.sum(axis=0)
        norm = np.sqrt(sum_even**2 + sum_odd**2) + _EPS
        mean_e, mean_o = sum_even / norm, sum_odd / norm
        energy = np.sum(
            eo.real * mean_e + eo.imag * mean_o - np.abs(eo.real * mean_o - eo.imag * mean_e),
            axis=0,
        )

        # noise power from the median smallest-scale energy (Rayleigh model)
        em_n = np.sum(filters[o, 0] ** 2)
        median_e2n = np.median(amplitude[o, 0] ** 2)
        mean_e2n = -median_e2n / math.log(0.5)
        noise_power = mean_e2n / em_n

        sum_an2 = np.sum(spatial[o] ** 2)
        sum_ai_aj = 0.0
        for s in range(bank.scales - 1):
            sum_ai_aj += np.sum(spatial[o, s] * spatial[o, s + 1 :])
        noise_energy2 = 2 * noise_power * sum_an2 + 4 * noise_power * sum_ai_aj
        tau = math.sqrt(max(noise_energy2, 0.0) / 2)
        noise_mean = tau * math.sqrt(math.pi / 2)
        noise_sigma = math.sqrt((2 - math.pi / 2) * tau**2)
        threshold = (noise_mean + noise_threshold_k * noise_sigma) / _PC_NOISE_RESCALE

        energy_all += np.maximum(energy - threshold, 0.0)

    amplitude_all = amplitude.sum(axis=(0, 1))
    return np.clip(energy_all / (amplitude_all + _EPS), 0.0, 1.0)


def gradient_magnitude(p, op: GradientOperator = "scharr") -> np.ndarray:
    """sqrt(Gh^2 + Gv^2) with a 3x3 derivative operator and replicate border."""
    p = as_plane(p)
    if p.shape[0] < 3 or p.shape[1] < 3:
        raise InvalidInputError(f"gradient needs at least 3x3 pixels, got {p.shape}")
    try:
        kh = _GRADIENT_KERNELS[op]
    except KeyError:
        raise InvalidParameterError(f"unknown gradient operator {op!r}") from None
    gh = convolve_same(p, kh)
    gv = convolve_same(p, kh.T)
    return np.sqrt(gh**2 + gv**2)


def similarity_ratio(a: np.ndarray, b: np.ndarray, c: float) -> np.ndarray:
    """(2ab + c) / (a^2 + b^2 + c)."""
    return (2 * a * b + c) / (a * a + b * b + c)


def _yiq(img: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    r, g, b = img[:, :, 0], img[:, :, 1], img[:, :, 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    i = 0.596 * r - 0.274 * g - 0.322 * b
    q = 0.211 * r - 0.523 * g + 0.312 * b
    return y, i, q


def fsim(x, y, cfg: FsimConfig | None = None, chromatic: bool | None = None) -> FsimResult:
    """Feature similarity between ``x`` and ``y``.

    Args:
        x, y: Gray planes or RGB tensors of equal shape.
        cfg: Filter bank and stabilizers.
        chromatic: Include the I/Q chroma term (FSIMc). Defaults to True when
            both inputs are RGB; requesting it for gray input is an error.

    Returns:
        FsimResult with the PC_m-weighted score and the per-pixel similarity.
    """
    cfg = cfg or FsimConfig()
    x = as_tensor(x, "x")
    y = as_tensor(y, "y")
    if x.shape != y.shape:
        raise InvalidInputError(f"image shapes differ: {x.shape} vs {y.shape}")
    color = channels(x) == 3
    if chromatic is None:
        chromatic = color
    elif chromatic and not color:
        raise InvalidInputError("FSIMc needs 3-channel inputs")

    if color:
        lx, ix, qx = _yiq(x)
        ly, iy, qy = _yiq(y)
    else:
        lx, ly = to_grayscale(x), to_grayscale(y)

    pc_x = phase_congruency(lx, cfg.bank, cfg.noise_threshold_k)
    pc_y = phase_congruency(ly, cfg.bank, cfg.noise_threshold_k)
    gm_x = gradient_magnitude(lx, cfg.gradient_operator)
    gm_y = gradient_magnitude(ly, cfg.gradient_operator)

    sim = similarity_ratio(pc_x, pc_y, cfg.T1) * similarity_ratio(gm_x, gm_y, cfg.T2)
    if chromatic:
        s_iq = similarity_ratio(ix, iy, cfg.T3) * similarity_ratio(qx, qy, cfg.T4)
        sim = sim * np.maximum(s_iq, 0.0) ** cfg.chroma_exponent

    pc_m = np.maximum(pc_x, pc_y)
    total = pc_m.sum()
    if total > 0:
        score = float(np.sum(sim * pc_m) / total)
    else:
        # no phase structure in either image: fall back to uniform pooling
        score = float(sim.mean())
    return FsimResult(score, sim, pc_x, pc_y, gm_x, gm_y)
