import math

import numpy as np
import pytest

from softcp.common.shared import BlendModeType
from softcp.imaging import blend as subject
from softcp.imaging.blend import BlendMode, PasteOffset


def plane(values):
    values = np.asarray(values, dtype=np.float64)
    return values[:, :, np.newaxis] if values.ndim == 2 else values


class TestSoftCopy():
    def test_zero_mask(self):
        patch = np.random.default_rng(0).random((4, 4, 3))
        assert not subject.soft_copy(patch, np.zeros((4, 4))).any()

    def test_unit_mask(self):
        patch = np.random.default_rng(1).random((4, 4, 1))
        assert np.array_equal(subject.soft_copy(patch, np.ones((4, 4))), patch)

    def test_half_weight(self):
        assert subject.soft_copy(plane([[0.8]]), np.array([[0.5]]))[0, 0, 0] == pytest.approx(0.4)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            subject.soft_copy(np.zeros((4, 4, 1)), np.zeros((3, 4)))


class TestSoftPaste():
    def test_worked_value(self):
        i_soft = subject.soft_copy(plane([[0.8]]), np.array([[0.5]]))
        result = subject.soft_paste(i_soft, np.array([[0.5]]), plane([[0.4]]), PasteOffset(0, 0))
        assert result[0, 0, 0] == pytest.approx(0.6, abs=1e-12)

    def test_zero_mask_keeps_background(self):
        background = np.random.default_rng(2).random((8, 8, 1))
        soft = np.zeros((3, 3))
        result = subject.soft_paste(subject.soft_copy(np.ones((3, 3, 1)), soft), soft, background, PasteOffset(2, 4))
        assert np.array_equal(result, background)

    def test_binary_mask_is_hard_paste(self):
        rng = np.random.default_rng(3)
        patch = rng.random((5, 6, 3))
        background = rng.random((16, 16, 3))
        mask = rng.random((5, 6)) < 0.5
        at = PasteOffset(7, 3)

        result = subject.soft_paste(subject.soft_copy(patch, mask), mask.astype(np.float64), background, at)
        expected = background.copy()
        window = expected[7:12, 3:9]
        window[mask] = patch[mask]
        assert np.array_equal(result, expected)

    def test_self_paste_identity(self):
        rng = np.random.default_rng(4)
        image = rng.random((20, 20, 1))
        soft = rng.random((6, 7))
        patch = image[5:11, 9:16]
        result = subject.soft_paste(subject.soft_copy(patch, soft), soft, image, PasteOffset(5, 9))
        assert np.max(np.abs(result - image)) <= 1e-6

    def test_convex_combination(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            patch = rng.random((4, 5, 3))
            soft = rng.random((4, 5))
            background = rng.random((9, 9, 3))
            result = subject.soft_paste(subject.soft_copy(patch, soft), soft, background, PasteOffset(2, 1))
            window = background[2:6, 1:6]
            assert np.all(result[2:6, 1:6] >= np.minimum(patch, window) - 1e-12)
            assert np.all(result[2:6, 1:6] <= np.maximum(patch, window) + 1e-12)
            assert result.min() >= 0.0 and result.max() <= 1.0

    @pytest.mark.parametrize("at", [PasteOffset(-1, 0), PasteOffset(0, 7), PasteOffset(6, 6)])
    def test_overflow(self, at):
        soft = np.ones((3, 3))
        with pytest.raises(ValueError):
            subject.soft_paste(np.zeros((3, 3, 1)), soft, np.zeros((8, 8, 1)), at)

    def test_channel_mismatch(self):
        soft = np.ones((2, 2))
        with pytest.raises(ValueError):
            subject.soft_paste(np.zeros((2, 2, 3)), soft, np.zeros((4, 4, 1)), PasteOffset(0, 0))


class TestMergeLabels():
    def test_empty_lesion(self):
        m_g = np.random.default_rng(6).integers(0, 3, size=(6, 6)).astype(np.uint8)
        assert np.array_equal(subject.merge_labels(np.zeros((2, 2), dtype=bool), 2, m_g, PasteOffset(1, 1)), m_g)

    def test_onto_background(self):
        m_p = np.array([[1, 0], [1, 1]], dtype=bool)
        result = subject.merge_labels(m_p, 1, np.zeros((5, 5), dtype=np.uint8), PasteOffset(2, 3))
        expected = np.zeros((5, 5), dtype=np.uint8)
        expected[2:4, 3:5] = m_p
        assert np.array_equal(result, expected)

    def test_lesion_overwrites_reference_only_on_support(self):
        m_g = np.zeros((8, 8), dtype=np.uint8)
        m_g[1:7, 1:7] = 1
        m_p = np.zeros((3, 3), dtype=bool)
        m_p[1, 1] = m_p[0, 1] = True

        result = subject.merge_labels(m_p, 2, m_g, PasteOffset(3, 3))
        assert result[4, 4] == 2 and result[3, 4] == 2
        assert (result == 2).sum() == 2
        untouched = np.ones((8, 8), dtype=bool)
        untouched[4, 4] = untouched[3, 4] = False
        assert np.array_equal(result[untouched], m_g[untouched])
        assert m_g.max() == 1


class TestGaussianMask():
    def test_all_ones(self):
        assert np.allclose(subject.gaussian_mask(np.ones((6, 6), dtype=bool), 1.5), 1.0)

    def test_all_zero(self):
        assert not subject.gaussian_mask(np.zeros((6, 6), dtype=bool), 1.5).any()

    def test_single_pixel_center_weight(self):
        mask = np.zeros((11, 11), dtype=bool)
        mask[5, 5] = True
        taps = np.exp(-np.arange(-3, 4) ** 2 / 2.0)
        expected = (1.0 / taps.sum()) ** 2
        assert subject.gaussian_mask(mask, 1.0)[5, 5] == pytest.approx(expected, rel=1e-9)

    def test_invalid_sigma(self):
        with pytest.raises(ValueError):
            subject.gaussian_mask(np.ones((3, 3)), 0.0)


class TestPoissonPaste():
    def test_empty_omega(self):
        background = np.random.default_rng(7).random((6, 6, 1))
        result = subject.poisson_paste(np.ones((2, 2, 1)), np.zeros((2, 2), dtype=bool), background,
                                       PasteOffset(2, 2))
        assert np.array_equal(result, background)

    def test_single_unknown(self):
        background = plane([[0.0, 0.2, 0.0], [0.6, 0.9, 0.8], [0.0, 0.4, 0.0]])
        omega = np.zeros((3, 3), dtype=bool)
        omega[1, 1] = True
        result = subject.poisson_paste(np.full((3, 3, 1), 0.3), omega, background, PasteOffset(0, 0))
        assert result[1, 1, 0] == pytest.approx(0.5, abs=1e-7)
        assert np.array_equal(result[~omega], background[~omega])

    def test_patch_equal_to_background(self):
        background = np.random.default_rng(8).random((12, 12, 2))
        omega = np.zeros((8, 8), dtype=bool)
        omega[2:6, 1:7] = True
        result = subject.poisson_paste(background[2:10, 2:10].copy(), omega, background, PasteOffset(2, 2))
        assert np.max(np.abs(result - background)) <= 1e-6

    def test_discrete_equation_residual(self):
        rng = np.random.default_rng(9)
        patch = 0.4 + 0.2 * rng.random((10, 10, 1))
        background = np.full((16, 16, 1), 0.5)
        omega = np.zeros((10, 10), dtype=bool)
        omega[2:8, 2:8] = True
        at = PasteOffset(3, 4)

        result = subject.poisson_paste(patch, omega, background, at, tol=1e-9)
        outside = np.ones((16, 16), dtype=bool)
        outside[5:11, 6:12] = False
        assert np.array_equal(result[outside], background[outside])

        residuals = []
        for r in range(2, 8):
            for c in range(2, 8):
                y, x = r + at.row, c + at.col
                lhs = 4 * result[y, x, 0] - result[y - 1, x, 0] - result[y + 1, x, 0] \
                    - result[y, x - 1, 0] - result[y, x + 1, 0]
                rhs = 4 * patch[r, c, 0] - patch[r - 1, c, 0] - patch[r + 1, c, 0] \
                    - patch[r, c - 1, 0] - patch[r, c + 1, 0]
                residuals.append(lhs - rhs)
        assert math.sqrt(sum(v * v for v in residuals)) <= 1e-6
        assert result.min() >= 0.0 and result.max() <= 1.0

    def test_border_touching_omega(self):
        omega = np.ones((3, 3), dtype=bool)
        with pytest.raises(ValueError):
            subject.poisson_paste(np.zeros((3, 3, 1)), omega, np.zeros((6, 6, 1)), PasteOffset(0, 2))

    def test_invalid_tolerance(self):
        with pytest.raises(ValueError):
            subject.poisson_paste(np.zeros((3, 3, 1)), np.ones((3, 3), dtype=bool), np.zeros((6, 6, 1)),
                                  PasteOffset(1, 1), tol=0.0)

    def test_non_convergence(self):
        rng = np.random.default_rng(10)
        omega = np.zeros((20, 20), dtype=bool)
        omega[1:19, 1:19] = True
        with pytest.raises(subject.PoissonConvergenceError) as e:
            subject.poisson_paste(rng.random((20, 20, 1)), omega, rng.random((24, 24, 1)), PasteOffset(2, 2),
                                  tol=1e-12, max_iter=1)
        assert e.value.iterations == 1


class TestBlendMode():
    def test_to_dict_by_mode(self):
        assert BlendMode('soft').to_dict() == {'mode': 'soft'}
        assert BlendMode(BlendModeType.gaussian, sigma=1.5).to_dict() == {'mode': 'gaussian', 'sigma': 1.5}
        poisson = BlendMode.from_dict({'mode': 'poisson', 'tolerance': 1e-6, 'max_iterations': 10})
        assert poisson.mode is BlendModeType.poisson
        assert poisson.to_dict() == {'mode': 'poisson', 'tolerance': 1e-6, 'max_iterations': 10}

    @pytest.mark.parametrize("kwargs", [
        {'mode': 'alpha'},
        {'sigma': 0.0},
        {'tolerance': -1.0},
        {'max_iterations': 0},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            BlendMode(**kwargs)
