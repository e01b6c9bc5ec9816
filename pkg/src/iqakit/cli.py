"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 I/O failure, 4 precondition
violation, 5 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ImageIOError, InvalidInputError, InvalidParameterError, NumericError
from .fsim import FsimConfig, LogGaborBank
from .harness.distort import DISTORTION_KINDS, synth_distort
from .harness.manifest import evaluate_manifest, format_report, read_manifest
from .imgcore import as_plane, to_grayscale
from .imgio import load_image, save_image
from .losses import (
    CriticSample,
    DualNormSpec,
    LbpWeights,
    PenaltyConfig,
    banach_gp,
    dual_norm,
    gan_objective,
    gradient_mvg,
    l_bp,
    niqe_regularizer,
    one_gp,
    ssim_gp,
)
from .maps import ALPHA_MAX, ALPHA_MIN, FusionWeights, MapConfigs, fuse_maps, quality_map
from .mdsi import MdsiConfig
from .niqe import MvgModel, NiqeConfig, fit_pristine
from .scoring import METRICS, MetricBundle, PristineModelRequired, score_pair
from .ssim import MsSsimConfig, SsimConfig

EXIT_USAGE, EXIT_IO, EXIT_PRECONDITION, EXIT_NUMERIC = 2, 3, 4, 5
CLI_MAP_METRICS = ("ssim", "ms-ssim", "fsim", "mdsi")


def _alpha(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid alpha {text!r}") from None
    if not ALPHA_MIN <= value <= ALPHA_MAX:
        raise argparse.ArgumentTypeError(f"alpha must lie in [{ALPHA_MIN}, {ALPHA_MAX}], got {value}")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"value must be positive, got {value}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"value must be at least 1, got {value}")
    return value


def _metric_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("metric configuration")
    g.add_argument("--ssim-window", type=_positive_int, default=11, help="Gaussian window side (odd)")
    g.add_argument("--ssim-sigma", type=_positive_float, default=1.5)
    g.add_argument("--ms-ssim-scales", type=_positive_int, default=5)
    g.add_argument("--fsim-scales", type=_positive_int, default=4)
    g.add_argument("--fsim-orientations", type=_positive_int, default=4)
    g.add_argument("--mdsi-mix", type=float, default=0.6, help="gradient/chroma mixing weight")
    return p


def _jobs_option() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--jobs", type=_positive_int, default=argparse.SUPPRESS,
                   help="worker processes for per-image work (default 1)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iqakit", description="Image quality metrics toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--jobs", type=_positive_int, default=1,
                        help="worker processes for per-image work (default 1)")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    metric_opts, jobs_opt = _metric_options(), _jobs_option()

    p = sub.add_parser("score", parents=[metric_opts], help="score a test image")
    p.add_argument("--metric", required=True, choices=METRICS)
    p.add_argument("--ref", help="reference image (not used by niqe)")
    p.add_argument("--test", required=True)
    p.add_argument("--pristine", help="pristine NIQE model file")

    p = sub.add_parser("map", parents=[metric_opts], help="export a quality map")
    p.add_argument("--metric", required=True, choices=CLI_MAP_METRICS)
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--alpha", type=_alpha, default=1.0)
    p.add_argument("--out", required=True, help="output image (.png/.pgm)")

    p = sub.add_parser("fuse", parents=[metric_opts], help="fuse three quality maps")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--metrics", nargs=3, choices=CLI_MAP_METRICS, default=["ssim", "fsim", "mdsi"])
    p.add_argument("--alpha", type=_alpha, default=1.0)
    p.add_argument("--weights", nargs=3, type=float, default=None, metavar="W")
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", parents=[metric_opts, jobs_opt], help="evaluate a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--metric", required=True, choices=METRICS)
    p.add_argument("--pristine")
    p.add_argument("--out", help="report file (default: standard output)")

    p = sub.add_parser("fit-pristine", help="fit a pristine NIQE model")
    p.add_argument("--images", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--patch-size", type=_positive_int, default=96)
    p.add_argument("--sharpness-fraction", type=_positive_float, default=0.75)
    p.add_argument("--scales", type=_positive_int, default=2)

    p = sub.add_parser("distort", help="apply a synthetic distortion")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", required=True, choices=DISTORTION_KINDS)
    p.add_argument("--level", required=True, type=_positive_float)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True)

    p = sub.add_parser("loss-eval", help="evaluate loss terms for a critic batch")
    p.add_argument("--batch", required=True, help="JSON batch description")
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--pristine", help="pristine NIQE model for the NIQE term")
    p.add_argument("--out", help="result file (default: standard output)")
    return parser


def _bundle(args, pristine: MvgModel | None = None) -> MetricBundle:
    base = SsimConfig.gaussian(args.ssim_window, args.ssim_sigma)
    niqe = NiqeConfig()
    if pristine is not None:
        niqe = NiqeConfig(patch_size=pristine.patch_size, scales=pristine.scales)
    return MetricBundle(
        ssim=base,
        ms_ssim=MsSsimConfig(base=base, scales=args.ms_ssim_scales),
        fsim=FsimConfig(bank=LogGaborBank(scales=args.fsim_scales, orientations=args.fsim_orientations)),
        mdsi=MdsiConfig(mix_weight=args.mdsi_mix),
        niqe=niqe,
        pristine=pristine,
    )


def _map_configs(bundle: MetricBundle) -> MapConfigs:
    return MapConfigs(ssim=bundle.ssim, ms_ssim=bundle.ms_ssim, fsim=bundle.fsim, mdsi=bundle.mdsi)


def _write_text(path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise ImageIOError(f"{path}: {exc.strerror or exc}") from exc


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_pristine(path) -> MvgModel | None:
    return MvgModel.load(path) if path else None


def cmd_score(args) -> int:
    pristine = _load_pristine(args.pristine)
    if args.metric == "niqe":
        if pristine is None:
            raise PristineModelRequired()
        ref = None
    else:
        if not args.ref:
            raise InvalidInputError(f"metric {args.metric} needs --ref")
        ref = load_image(args.ref)
    test = load_image(args.test)
    score = score_pair(args.metric, ref, test, _bundle(args, pristine))
    print(json.dumps({"metric": args.metric, "score": score, "ref": args.ref, "test": args.test}))
    return 0


def cmd_map(args) -> int:
    bundle = _bundle(args)
    ref, test = load_image(args.ref), load_image(args.test)
    metric = args.metric.replace("-", "_")
    qm = quality_map(metric, ref, test, args.alpha, _map_configs(bundle))
    out = save_image(args.out, qm.plane)
    sidecar = {
        "metric": args.metric,
        "alpha": args.alpha,
        "ref": args.ref,
        "test": args.test,
        "config": bundle.describe(args.metric),
    }
    _write_text(out.with_suffix(".json"), _dump(sidecar))
    return 0


def cmd_fuse(args) -> int:
    bundle = _bundle(args)
    weights = FusionWeights(*args.weights) if args.weights else FusionWeights()
    ref, test = load_image(args.ref), load_image(args.test)
    cfgs = _map_configs(bundle)
    maps = [quality_map(m.replace("-", "_"), ref, test, args.alpha, cfgs) for m in args.metrics]
    out = save_image(args.out, fuse_maps(*maps, weights))
    sidecar = {
        "metrics": list(args.metrics),
        "alpha": args.alpha,
        "weights": list(weights.as_tuple()),
        "ref": args.ref,
        "test": args.test,
        "config": {m: bundle.describe(m) for m in args.metrics},
    }
    _write_text(out.with_suffix(".json"), _dump(sidecar))
    return 0


def cmd_eval(args) -> int:
    pristine = _load_pristine(args.pristine)
    if args.metric == "niqe" and pristine is None:
        raise PristineModelRequired()
    rows = read_manifest(args.manifest)
    report = evaluate_manifest(rows, args.metric, _bundle(args, pristine), jobs=args.jobs)
    text = format_report(report)
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_fit_pristine(args) -> int:
    cfg = NiqeConfig(patch_size=args.patch_size, sharpness_fraction=args.sharpness_fraction,
                     scales=args.scales)
    corpus = [to_grayscale(load_image(p)) for p in args.images]
    fit_pristine(corpus, cfg).save(args.out)
    return 0


def cmd_distort(args) -> int:
    img = load_image(args.input)
    save_image(args.out, synth_distort(img, args.kind, args.level, args.seed))
    return 0


class _BatchReader:
    """Resolves image fields of a loss batch.

    An image field is a file path, a nested list of numbers, or an object
    ``{"noise": [h, w], "scale": s, "offset": o}`` drawn from the seeded
    generator in document order.
    """

    def __init__(self, seed: int):
        self.rng = np.random.default_rng(seed)

    def image(self, value, what: str) -> np.ndarray:
        if isinstance(value, str):
            return to_grayscale(load_image(value))
        if isinstance(value, dict) and "noise" in value:
            shape = tuple(int(v) for v in value["noise"])
            scale = float(value.get("scale", 1.0))
            offset = float(value.get("offset", 0.0))
            return offset + scale * self.rng.standard_normal(shape)
        if isinstance(value, list):
            return as_plane(np.asarray(value, dtype=np.float64), what)
        raise InvalidInputError(f"{what}: expected a path, a nested list or a noise spec")


def _read_batch(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ImageIOError(f"{path}: {exc.strerror or exc}") from exc
    try:
        batch = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ImageIOError(f"{path}: malformed JSON ({exc})") from exc
    if not isinstance(batch, dict) or not batch.get("samples"):
        raise InvalidInputError(f"{path}: batch needs a nonempty 'samples' list")
    return batch


def cmd_loss_eval(args) -> int:
    batch = _read_batch(args.batch)
    reader = _BatchReader(args.seed)
    pen = batch.get("penalty", {})
    penalty = PenaltyConfig(lam=float(pen.get("lambda", 10.0)), gamma=float(pen.get("gamma", 1.0)))
    w = batch.get("weights", {})
    weights = LbpWeights(float(w.get("lambda1", 1.0)), float(w.get("lambda2", 1.0)),
                         float(w.get("lambda3", 1.0)))
    dn = batch.get("dual_norm", {})
    spec = DualNormSpec(kind=dn.get("kind", "lp"), p=float(dn.get("p", 2.0)), value=dn.get("value"))

    samples = []
    for i, entry in enumerate(batch["samples"]):
        try:
            grad = entry.get("grad")
            samples.append(CriticSample(
                d_x=float(entry["d_x"]),
                d_xhat=float(entry["d_xhat"]),
                x=reader.image(entry["x"], f"sample {i} x"),
                xhat=reader.image(entry["xhat"], f"sample {i} xhat"),
                grad_xhat=None if grad is None else reader.image(grad, f"sample {i} grad"),
            ))
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"sample {i}: malformed entry ({exc})") from None

    grads = [s.grad_xhat for s in samples if s.grad_xhat is not None]
    if len(grads) != len(samples):
        raise InvalidInputError("every sample needs a 'grad' field for the gradient penalties")
    terms = {
        "banach_gp": banach_gp([dual_norm(g, spec) for g in grads], penalty),
        "ssim_gp": ssim_gp(samples),
        "one_gp": one_gp([dual_norm(g, DualNormSpec("lp", 2.0)) for g in grads]),
    }
    if weights.lambda1 > 0:
        pristine = _load_pristine(args.pristine)
        if pristine is None:
            raise PristineModelRequired()
        cfg = NiqeConfig(patch_size=pristine.patch_size, scales=pristine.scales)
        terms["niqe"] = niqe_regularizer([gradient_mvg(g, cfg) for g in grads], pristine)
    else:
        terms["niqe"] = 0.0
    result = {
        "seed": args.seed,
        "terms": terms,
        "l_bp": l_bp(terms["niqe"], terms["ssim_gp"], terms["one_gp"], weights),
    }
    gan = batch.get("gan")
    if gan is not None:
        try:
            d_x, d_g, score = float(gan["d_x"]), float(gan["d_g_xhat"]), float(gan.get("score", 0.0))
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed 'gan' entry ({exc})") from None
        result["gan_objective"] = gan_objective(d_x, d_g, score, result["l_bp"])
    text = _dump(result)
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {
    "score": cmd_score,
    "map": cmd_map,
    "fuse": cmd_fuse,
    "eval": cmd_eval,
    "fit-pristine": cmd_fit_pristine,
    "distort": cmd_distort,
    "loss-eval": cmd_loss_eval,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ImageIOError, OSError) as exc:
        code, msg = EXIT_IO, str(exc)
    except (InvalidInputError, InvalidParameterError) as exc:
        code, msg = EXIT_PRECONDITION, str(exc)
    except (NumericError, ArithmeticError) as exc:
        code, msg = EXIT_NUMERIC, str(exc)
    except ValueError as exc:
        code, msg = EXIT_PRECONDITION, str(exc)
    print(f"iqakit {args.command}: error: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
