"""Name-based metric dispatch shared by the manifest evaluator and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidInputError, InvalidParameterError
from .fsim import FsimConfig, fsim
from .imgcore import as_tensor, to_grayscale
from .mdsi import MdsiConfig, mdsi
from .niqe import MvgModel, NiqeConfig, niqe_score
from .ssim import MsSsimConfig, SsimConfig, ms_ssim, ssim

METRICS = ("ssim", "ms-ssim", "fsim", "fsimc", "mdsi", "niqe")
# metrics where a larger value means a worse image
DISTORTION_METRICS = frozenset({"mdsi", "niqe"})


class PristineModelRequired(InvalidInputError):
    def __init__(self):
        super().__init__("pristine model required (pass --pristine)")


@dataclass(frozen=True)
class MetricBundle:
    """Configuration for every metric plus the optional NIQE pristine model."""

    ssim: SsimConfig = field(default_factory=SsimConfig)
    ms_ssim: MsSsimConfig = field(default_factory=MsSsimConfig)
    fsim: FsimConfig = field(default_factory=FsimConfig)
    mdsi: MdsiConfig = field(default_factory=MdsiConfig)
    niqe: NiqeConfig = field(default_factory=NiqeConfig)
    pristine: MvgModel | None = None

    def describe(self, metric: str) -> dict:
        if metric == "ssim":
            return self.ssim.describe()
        if metric == "ms-ssim":
            return {**self.ms_ssim.base.describe(), "scales": self.ms_ssim.scales,
                    "weights": list(self.ms_ssim.weights)}
        if metric in ("fsim", "fsimc"):
            return self.fsim.describe()
        if metric == "mdsi":
            return self.mdsi.describe()
        if metric == "niqe":
            return self.niqe.describe()
        raise InvalidParameterError(f"unknown metric {metric!r}")


def score_pair(metric: str, ref, test, bundle: MetricBundle | None = None) -> float:
    """Score ``test`` against ``ref`` (``ref`` is ignored by NIQE)."""
    bundle = bundle or MetricBundle()
    if metric not in METRICS:
        raise InvalidParameterError(f"unknown metric {metric!r}; choose from {METRICS}")
    test = as_tensor(test, "test image")
    if metric == "niqe":
        if bundle.pristine is None:
            raise PristineModelRequired()
        return niqe_score(to_grayscale(test), bundle.pristine, bundle.niqe)

    ref = as_tensor(ref, "reference")
    if ref.shape != test.shape:
        raise InvalidInputError(f"image shapes differ: {ref.shape} vs {test.shape}")
    if metric == "ssim":
        return ssim(to_grayscale(ref), to_grayscale(test), bundle.ssim)
    if metric == "ms-ssim":
        return ms_ssim(to_grayscale(ref), to_grayscale(test), bundle.ms_ssim)
    if metric == "fsim":
        return fsim(to_grayscale(ref), to_grayscale(test), bundle.fsim).score
    if metric == "fsimc":
        return fsim(ref, test, bundle.fsim, chromatic=True).score
    return mdsi(ref, test, bundle.mdsi).score
