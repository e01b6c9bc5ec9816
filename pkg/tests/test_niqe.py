import numpy as np
import pytest

from iqakit.errors import EstimationError, ImageIOError, InvalidInputError, InvalidParameterError
from iqakit.niqe import (
    FEATURES_PER_SCALE,
    MvgModel,
    NiqeConfig,
    fit_aggd,
    fit_ggd,
    fit_pristine,
    mscn,
    niqe_distance,
    niqe_score,
    nss_features,
    patch_features,
)
from iqakit.synthetic import gallery, pink_noise

SMALL = NiqeConfig(patch_size=32)


@pytest.fixture(scope="module")
def pristine():
    return fit_pristine(gallery(12, (128, 128), seed=40), SMALL)


class TestMscn:
    def test_constant(self):
        assert np.all(mscn(np.full((20, 20), 0.6)) == 0.0)

    def test_uniform_noise_variance(self):
        m = mscn(np.random.default_rng(5).random((256, 256)))
        assert 0.5 <= m.var() <= 1.5

    def test_affine_invariance(self):
        p = 0.3 * pink_noise((128, 128), seed=2)
        diff = mscn(2.0 * p + 0.1) - mscn(p)
        assert np.sqrt(np.mean(diff**2)) < 0.05

    def test_mean_near_zero(self):
        assert abs(mscn(pink_noise((256, 256), seed=8)).mean()) <= 0.1


class TestGgd:
    def test_gaussian(self):
        g = np.random.default_rng(1).standard_normal(100_000)
        assert 1.9 <= fit_ggd(g).shape <= 2.1

    def test_laplace(self):
        g = np.random.default_rng(2).laplace(size=100_000)
        assert 0.9 <= fit_ggd(g).shape <= 1.1

    def test_scale_equivariance(self):
        g = np.random.default_rng(3).standard_normal(100_000)
        a, b = fit_ggd(g), fit_ggd(3.0 * g)
        assert abs(a.shape - b.shape) <= 0.02
        assert b.scale == pytest.approx(3.0 * a.scale, rel=0.02)

    def test_too_few_samples(self):
        with pytest.raises(EstimationError):
            fit_ggd(np.ones(10))

    def test_zero_variance(self):
        with pytest.raises(EstimationError):
            fit_ggd(np.zeros(500))


class TestAggd:
    def test_symmetric_gaussian(self):
        g = np.random.default_rng(4).standard_normal(100_000)
        a = fit_aggd(g)
        assert abs(a.scale_left - a.scale_right) / a.scale_left < 0.05
        assert abs(a.mean_offset) < 0.05 * a.scale_left

    def test_right_stretched(self):
        g = np.random.default_rng(5).standard_normal(100_000)
        a = fit_aggd(np.maximum(g, 0) * 2 + np.minimum(g, 0))
        assert a.scale_right > a.scale_left

    def test_scale_equivariance(self):
        g = np.random.default_rng(6).laplace(size=100_000)
        a, b = fit_aggd(g), fit_aggd(3.0 * g)
        assert b.scale_left == pytest.approx(3.0 * a.scale_left, rel=0.02)
        assert b.scale_right == pytest.approx(3.0 * a.scale_right, rel=0.02)

    def test_one_sided(self):
        with pytest.raises(EstimationError):
            fit_aggd(np.abs(np.random.default_rng(0).standard_normal(1000)))


class TestFeatures:
    def test_length(self):
        p = pink_noise((64, 64), seed=1)
        assert nss_features(p).shape == (2 * FEATURES_PER_SCALE,)
        assert nss_features(p, NiqeConfig(scales=3, patch_size=96)).shape == (3 * FEATURES_PER_SCALE,)

    def test_transpose_swaps_horizontal_and_vertical(self):
        p = pink_noise((96, 80), seed=7)
        a = nss_features(p, NiqeConfig(scales=1))
        b = nss_features(p.T, NiqeConfig(scales=1))
        np.testing.assert_allclose(a[:2], b[:2], atol=1e-6)
        np.testing.assert_allclose(a[2:6], b[6:10], atol=1e-6)
        np.testing.assert_allclose(a[6:10], b[2:6], atol=1e-6)
        np.testing.assert_allclose(a[10:18], b[10:18], atol=1e-6)

    def test_constant_image(self):
        with pytest.raises(EstimationError):
            nss_features(np.full((64, 64), 0.5))

    def test_patch_grid(self):
        feats, sharp = patch_features(pink_noise((100, 70), seed=3), SMALL)
        assert feats.shape == (3 * 2, 36)
        assert sharp.shape == (6,)

    def test_config_validation(self):
        with pytest.raises(InvalidParameterError):
            NiqeConfig(patch_size=33)
        with pytest.raises(InvalidParameterError):
            NiqeConfig(sharpness_fraction=0.0)


class TestPristine:
    def test_dimension_and_psd(self, pristine):
        assert pristine.dimension == 36
        assert np.min(np.linalg.eigvalsh(pristine.covariance)) >= -1e-10

    def test_identical_corpus(self):
        img = pink_noise((96, 96), seed=12)
        model = fit_pristine([img] * 10, SMALL)
        feats, sharp = patch_features(img, SMALL)
        keep = np.sort(np.argsort(-sharp, kind="stable")[: int(np.ceil(0.75 * len(sharp)))])
        np.testing.assert_allclose(model.mean, feats[keep].mean(axis=0), atol=1e-12)

    def test_too_small_corpus(self):
        with pytest.raises(InvalidInputError):
            fit_pristine([pink_noise((64, 64), seed=i) for i in range(3)], SMALL)

    def test_noise_scores_higher(self, pristine):
        held_out = gallery(10, (128, 128), seed=41)
        wins = 0
        for i, img in enumerate(held_out):
            noisy = img + 0.2 * np.random.default_rng(i).standard_normal(img.shape)
            wins += niqe_score(img, pristine, SMALL) < niqe_score(noisy, pristine, SMALL)
        assert wins >= 9

    def test_score_nonnegative(self, pristine):
        assert niqe_score(pink_noise((128, 128), seed=99), pristine, SMALL) >= 0

    def test_dimension_mismatch(self, pristine):
        with pytest.raises(InvalidInputError):
            niqe_score(pink_noise((128, 128), seed=1), pristine, NiqeConfig(patch_size=32, scales=1))

    def test_round_trip(self, pristine, tmp_path):
        path = pristine.save(tmp_path / "model.json")
        loaded = MvgModel.load(path)
        assert np.array_equal(loaded.mean, pristine.mean)
        assert np.array_equal(loaded.covariance, pristine.covariance)
        assert (loaded.scales, loaded.patch_size) == (2, 32)

    def test_load_errors(self, tmp_path):
        with pytest.raises(ImageIOError):
            MvgModel.load(tmp_path / "missing.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ImageIOError):
            MvgModel.load(bad)


class TestDistance:
    def test_self_distance(self, pristine):
        assert niqe_distance(pristine, pristine) == pytest.approx(0.0, abs=1e-9)

    def test_unit_basis(self):
        a = MvgModel(np.eye(5)[0], np.eye(5))
        b = MvgModel(np.zeros(5), np.eye(5))
        assert niqe_distance(a, b) == 1.0

    def test_symmetry(self, rng):
        m = rng.standard_normal((5, 5))
        a = MvgModel(rng.standard_normal(5), m @ m.T + np.eye(5))
        b = MvgModel(rng.standard_normal(5), np.diag(rng.random(5) + 0.5))
        assert abs(niqe_distance(a, b) - niqe_distance(b, a)) <= 1e-12

    def test_positive_for_distinct_means(self):
        a = MvgModel(np.array([0.0, 1.0]), np.eye(2))
        b = MvgModel(np.array([0.5, 1.0]), 2 * np.eye(2))
        assert niqe_distance(a, b) > 0
