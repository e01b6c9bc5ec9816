"""Evaluation harness: correlations, texture/HOG features, distortions, manifests."""
from .correlation import lcc, srocc
from .distort import DISTORTION_KINDS, synth_distort
from .hog import HogConfig, hog_descriptor, hog_similarity
from .manifest import (
    CorrelationStats,
    EvalReport,
    EvalRow,
    evaluate_manifest,
    format_report,
    read_manifest,
)
from .texture import GlcmConfig, glcm, glcm_features

__all__ = [
    "CorrelationStats", "DISTORTION_KINDS", "EvalReport", "EvalRow", "GlcmConfig",
    "HogConfig", "evaluate_manifest", "format_report", "glcm", "glcm_features",
    "hog_descriptor", "hog_similarity", "lcc", "read_manifest", "srocc", "synth_distort",
]
