"""Image quality metrics, quality maps and gradient-penalty loss evaluators."""
from .errors import (
    DegeneratePairError,
    DomainError,
    EstimationError,
    ImageIOError,
    InvalidInputError,
    InvalidParameterError,
    IqaError,
    NumericError,
    UndefinedCorrelationError,
)
from .fsim import FsimConfig, LogGaborBank, fsim, gradient_magnitude, phase_congruency
from .mdsi import MdsiConfig, mdsi
from .niqe import MvgModel, NiqeConfig, fit_pristine, mscn, niqe_distance, niqe_score
from .ssim import MsSsimConfig, SsimConfig, ms_ssim, ssim, ssim_distance, ssim_maps

__version__ = "0.1.0"

__all__ = [
    "DegeneratePairError", "DomainError", "EstimationError", "FsimConfig", "ImageIOError",
    "InvalidInputError", "InvalidParameterError", "IqaError", "LogGaborBank", "MdsiConfig",
    "MsSsimConfig", "MvgModel", "NiqeConfig", "NumericError", "SsimConfig",
    "UndefinedCorrelationError", "fit_pristine", "fsim", "gradient_magnitude", "mdsi", "ms_ssim",
    "mscn", "niqe_distance", "niqe_score", "phase_congruency", "ssim", "ssim_distance", "ssim_maps",
]
