"""Acceptance criteria AC1-AC12, one or more tests per criterion.

Each test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion. Run alone with ``pytest tests/test_acceptance.py``.
"""
import math
import time

import numpy as np
import pytest

from cli_matrix import run_matrix
from iqakit.fsim import fsim
from iqakit.harness import evaluate_manifest, glcm_features, lcc, srocc, synth_distort
from iqakit.harness.manifest import EvalRow
from iqakit.harness.texture import GlcmConfig
from iqakit.imgcore import to_grayscale
from iqakit.imgio import load_image, save_image
from iqakit.losses import (
    CriticSample,
    LbpWeights,
    PenaltyConfig,
    banach_gp,
    dual_norm,
    finite_diff_grad,
    gan_objective,
    l_bp,
    one_gp,
    ssim_gp,
)
from iqakit.maps import FusionWeights, fuse_maps, intensity_scale, quality_map
from iqakit.mdsi import mdsi
from iqakit.niqe import MvgModel, NiqeConfig, fit_aggd, fit_ggd, fit_pristine, niqe_distance
from iqakit.scoring import MetricBundle, score_pair
from iqakit.ssim import SsimConfig, ms_ssim, ssim, ssim_distance
from iqakit.synthetic import checkerboard, gallery, pink_noise

criterion = pytest.mark.criterion


@criterion(1, "self-similarity suite")
def test_ac1_self_similarity(budget):
    with budget(10.0):
        for img in gallery(20, (192, 192), seed=1, color=True):
            gray = to_grayscale(img)
            assert abs(ssim(gray, gray) - 1.0) <= 1e-6
            assert abs(ms_ssim(gray, gray) - 1.0) <= 1e-6
            assert abs(fsim(gray, gray).score - 1.0) <= 1e-6
            assert abs(fsim(img, img).score - 1.0) <= 1e-6
            assert abs(mdsi(img, img).score) <= 1e-9
            assert ssim_distance(gray, gray)[1] <= 1e-9


@criterion(2, "SSIM hand oracle")
def test_ac2_constant_pair_ssim(budget):
    with budget(1.0):
        x, y = np.full((32, 32), 0.5), np.full((32, 32), 0.6)
        value = ssim(x, y, SsimConfig(C1=1e-4))
    assert abs(value - 0.983606) <= 1e-6


@criterion(2, "SSIM hand oracle")
def test_ac2_constant_pair_distance(budget):
    with budget(1.0):
        x, y = np.full((32, 32), 0.5), np.full((32, 32), 0.6)
        db = ssim_distance(x, y, SsimConfig(C1=1e-4))[1]
    assert abs(db - 0.1280) <= 1e-4


@criterion(3, "d_b metric axioms")
def test_ac3_metric_axioms(budget):
    cfg = SsimConfig.gaussian(7, 1.5)
    r = np.random.default_rng(3)
    violations = 0
    with budget(30.0):
        for _ in range(1000):
            x, y, z = (r.random((8, 8)) for _ in range(3))
            dxy, dyz, dxz = (ssim_distance(a, b, cfg)[0] for a, b in ((x, y), (y, z), (x, z)))
            assert np.array_equal(dxy, ssim_distance(y, x, cfg)[0])
            assert np.all(ssim_distance(x, x, cfg)[0] == 0.0)
            violations += int(np.sum(dxz > dxy + dyz + 1e-9))
    assert violations == 0


AC4_LEVELS = {
    "agn": np.linspace(0.02, 0.2, 10),
    "gaussian_blur": np.linspace(0.4, 2.5, 10),
}


@pytest.fixture(scope="module")
def ac4_scores():
    """Scores per (metric, kind, base) over the 10 levels, plus the elapsed time."""
    start = time.perf_counter()
    pristine_cfg = NiqeConfig(patch_size=32)
    corpus = [to_grayscale(im) for im in gallery(12, (192, 192), seed=70, color=True)]
    bundle = MetricBundle(niqe=pristine_cfg, pristine=fit_pristine(corpus, pristine_cfg))
    bases = gallery(5, (192, 192), seed=71, color=True)
    scores = {}
    for kind, levels in AC4_LEVELS.items():
        for b, img in enumerate(bases):
            distorted = [synth_distort(img, kind, lvl, seed=b) for lvl in levels]
            for metric in ("ssim", "ms-ssim", "fsim", "mdsi", "niqe"):
                scores[metric, kind, b] = [score_pair(metric, img, d, bundle) for d in distorted]
    return scores, time.perf_counter() - start


@criterion(4, "distortion monotonicity")
@pytest.mark.parametrize("kind", list(AC4_LEVELS))
@pytest.mark.parametrize("metric", ["ssim", "ms-ssim"])
def test_ac4_exact_ordering(ac4_scores, metric, kind):
    scores, _ = ac4_scores
    for b in range(5):
        assert srocc(scores[metric, kind, b], AC4_LEVELS[kind]) == -1.0


@criterion(4, "distortion monotonicity")
@pytest.mark.parametrize("kind", list(AC4_LEVELS))
@pytest.mark.parametrize("metric,sign", [("fsim", 1.0), ("mdsi", -1.0), ("niqe", -1.0)])
def test_ac4_feature_metrics(ac4_scores, metric, sign, kind):
    scores, _ = ac4_scores
    for b in range(5):
        adjusted = [sign * s for s in scores[metric, kind, b]]
        assert srocc(adjusted, AC4_LEVELS[kind]) <= -0.9, f"base {b}"


@criterion(4, "distortion monotonicity")
def test_ac4_runtime(ac4_scores):
    assert ac4_scores[1] < 300.0


@criterion(5, "GGD/AGGD estimator recovery")
def test_ac5_estimators(budget):
    n = 100_000
    with budget(30.0):
        gauss = np.random.default_rng(51).standard_normal(n)
        laplace = np.random.default_rng(52).laplace(size=n)
        assert 1.9 <= fit_ggd(gauss).shape <= 2.1
        assert 0.9 <= fit_ggd(laplace).shape <= 1.1

        sym = fit_aggd(gauss)
        assert abs(sym.scale_left - sym.scale_right) / sym.scale_left < 0.05
        assert abs(sym.mean_offset) < 0.05 * sym.scale_left

        a, b = fit_ggd(laplace), fit_ggd(3.0 * laplace)
        assert abs(b.scale / (3.0 * a.scale) - 1.0) <= 0.02
        assert abs(a.shape - b.shape) <= 0.02
        c, d = fit_aggd(gauss), fit_aggd(3.0 * gauss)
        assert abs(d.scale_left / (3.0 * c.scale_left) - 1.0) <= 0.02
        assert abs(d.scale_right / (3.0 * c.scale_right) - 1.0) <= 0.02


@criterion(6, "NIQE distance identities")
def test_ac6_distance_identities():
    cfg = NiqeConfig(patch_size=32)
    model = fit_pristine([pink_noise((96, 96), seed=s) for s in range(10)], cfg)
    assert abs(niqe_distance(model, model)) <= 1e-9

    a = MvgModel(np.eye(36)[0], np.eye(36))
    b = MvgModel(np.zeros(36), np.eye(36))
    assert abs(niqe_distance(a, b) - 1.0) <= 1e-12

    other = fit_pristine([pink_noise((96, 96), seed=s, exponent=1.4) for s in range(10)], cfg)
    assert abs(niqe_distance(model, other) - niqe_distance(other, model)) <= 1e-12


@criterion(7, "loss evaluator zeros and values")
def test_ac7_loss_evaluators():
    assert banach_gp([1.7, 1.7, 1.7], PenaltyConfig(lam=10.0, gamma=1.7)) == 0.0

    r = np.random.default_rng(7)
    x, xhat = r.random((16, 16)), r.random((16, 16))
    db = ssim_distance(x, xhat)[1]
    assert ssim_gp([CriticSample(0.1, 0.1 + db, x, xhat)]) == pytest.approx(0.0, abs=1e-12)

    assert one_gp([1.0, 1.0, 1.0]) == 0.0

    terms = (0.8, 1.3, 0.4)
    base = LbpWeights(0.5, 0.7, 0.9)
    for k in range(3):
        w = [base.lambda1, base.lambda2, base.lambda3]
        w[k] += 0.25
        delta = l_bp(*terms, LbpWeights(*w)) - l_bp(*terms, base)
        assert abs(delta - 0.25 * terms[k]) <= 1e-12

    assert abs(gan_objective(0.5, 0.5, 0.0, 0.0) - (-1.3863)) <= 1e-4


@criterion(8, "gradient oracle")
def test_ac8_finite_differences():
    r = np.random.default_rng(8)
    p = r.standard_normal((6, 7))
    a = r.standard_normal((6, 7))

    def rms(g, expected):
        return math.sqrt(float(np.mean((g - expected) ** 2)))

    quadratic = finite_diff_grad(lambda q: float(np.sum(a * q * q)), p)
    assert rms(quadratic, 2 * a * p) <= 1e-5
    sinusoid = finite_diff_grad(lambda q: float(np.sum(np.sin(3 * q))), p)
    assert rms(sinusoid, 3 * np.cos(3 * p)) <= 1e-5
    norm_sq = finite_diff_grad(lambda q: dual_norm(q) ** 2, p)
    assert rms(norm_sq, 2 * p / p.size) <= 1e-5


@criterion(9, "map contracts")
def test_ac9_map_contracts(tmp_path):
    x = gallery(3, (176, 176), seed=9, color=True)[2]
    y = synth_distort(x, "gaussian_blur", 1.2, seed=0)
    raw = quality_map("ssim", x, y, 1.0).plane
    assert np.array_equal(intensity_scale(raw, 1.0), raw)

    maps = {}
    for metric in ("ssim", "ms_ssim", "fsim", "mdsi"):
        per_alpha = [quality_map(metric, x, y, a).plane for a in (0.3, 0.5, 1.0)]
        assert np.all(per_alpha[0] >= per_alpha[1]) and np.all(per_alpha[1] >= per_alpha[2])
        maps[metric] = per_alpha[1]
        path = save_image(tmp_path / f"{metric}.png", per_alpha[1])
        assert np.max(np.abs(load_image(path) - per_alpha[1])) <= 1.0 / 255.0

    m1, m2, m3 = maps["ms_ssim"], maps["fsim"], maps["mdsi"]
    fused = fuse_maps(m1, m2, m3, FusionWeights(0.2, 0.5, 0.3))
    assert np.all(fused >= np.minimum(np.minimum(m1, m2), m3))
    assert np.all(fused <= np.maximum(np.maximum(m1, m2), m3))


@criterion(10, "correlation oracles")
def test_ac10_correlations(in_tmp):
    assert abs(srocc([1, 2, 2, 3], [1, 2, 3, 4]) - 0.9487) <= 1e-4
    a = np.array([0.3, 1.1, 2.5, 2.6, 7.0])
    assert srocc(a, a[::-1]) == -1.0
    b = np.array([2.0, -1.0, 4.0, 0.5, 3.0])
    assert abs(lcc(3.0 * a + 2.0, b) - lcc(a, b)) <= 1e-12

    img = pink_noise((32, 32), seed=10)
    save_image("same.png", img)
    rows = [EvalRow("same.png", "same.png", m, "agn") for m in (1.0, 2.0, 3.0)]
    report = evaluate_manifest(rows, "ssim")
    assert report.per_distortion["agn"].srocc is None
    assert report.overall.lcc is None


@criterion(11, "GLCM oracles")
def test_ac11_glcm():
    const = glcm_features(np.full((12, 12), 0.7))
    assert (const["entropy"], const["contrast"], const["homogeneity"]) == (0.0, 0.0, 1.0)
    cfg = GlcmConfig(levels=2, offsets=((0, 1),), symmetric=True)
    cb = glcm_features(checkerboard((16, 16)), cfg)
    assert abs(cb["contrast"] - 1.0) <= 1e-12
    assert abs(cb["homogeneity"] - 0.5) <= 1e-12
    assert abs(cb["entropy"] - 1.0) <= 1e-12


@criterion(12, "end-to-end determinism")
def test_ac12_cli_determinism(tmp_path, monkeypatch):
    monkeypatch.delenv("IQA_NO_PARALLEL", raising=False)
    first = run_matrix(tmp_path / "run1", jobs=1)
    second = run_matrix(tmp_path / "run2", jobs=1)
    parallel = run_matrix(tmp_path / "run4", jobs=4)
    assert len(first) > 20
    assert first.keys() == second.keys() == parallel.keys()
    for name in first:
        assert first[name] == second[name], name
        assert first[name] == parallel[name], name


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v"]))
