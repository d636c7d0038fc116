import numpy as np
import pytest

from softcp.imaging import morphology as subject
from softcp.imaging.raster import Box
from softcp.tests.softcp_test_tools import brute_dilate, brute_erode, flood_fill_components


def random_masks(count, seed, max_side=24):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        height, width = rng.integers(1, max_side + 1, size=2)
        density = rng.uniform(0.1, 0.9)
        yield rng.random((height, width)) < density


class TestErode():
    def test_empty(self):
        assert not subject.erode(np.zeros((5, 5), dtype=bool)).any()

    def test_block_to_center(self):
        mask = np.zeros((5, 5), dtype=bool)
        mask[1:4, 1:4] = True
        expected = np.zeros((5, 5), dtype=bool)
        expected[2, 2] = True
        assert np.array_equal(subject.erode(mask), expected)

    def test_full_frame_loses_border(self):
        result = subject.erode(np.ones((6, 7), dtype=bool))
        assert not result[0].any() and not result[-1].any()
        assert not result[:, 0].any() and not result[:, -1].any()
        assert result[1:-1, 1:-1].all()

    def test_matches_brute_force(self):
        for mask in random_masks(500, seed=10):
            assert np.array_equal(subject.erode(mask), brute_erode(mask))


class TestDilate():
    def test_empty(self):
        assert not subject.dilate(np.zeros((5, 5), dtype=bool)).any()

    @pytest.mark.parametrize("row, col, count", [
        (2, 2, 9),
        (0, 0, 4),
        (0, 2, 6),
    ])
    def test_single_pixel(self, row, col, count):
        mask = np.zeros((5, 5), dtype=bool)
        mask[row, col] = True
        result = subject.dilate(mask)
        assert result.sum() == count
        assert np.array_equal(result, brute_dilate(mask))

    def test_saturation(self):
        assert subject.dilate(np.ones((4, 4), dtype=bool)).all()

    def test_matches_brute_force(self):
        for mask in random_masks(500, seed=11):
            assert np.array_equal(subject.dilate(mask), brute_dilate(mask))

    def test_rejects_non_2d(self):
        with pytest.raises(ValueError):
            subject.dilate(np.zeros((2, 2, 1), dtype=bool))


class TestBinarize():
    def test_threshold_from_soft_mask(self):
        soft = np.array([[0.0, 1e-6, 1e-4, 1.0]])
        assert subject.binarize(soft, 1e-5).tolist() == [[False, False, True, True]]

    def test_all_zero(self):
        assert not subject.binarize(np.zeros((3, 3))).any()

    def test_idempotent_on_binary(self):
        mask = np.random.default_rng(2).random((6, 6)) < 0.5
        assert np.array_equal(subject.binarize(mask.astype(np.float64)), mask)

    def test_threshold_must_be_positive(self):
        with pytest.raises(ValueError):
            subject.binarize(np.zeros((2, 2)), 0.0)


class TestConnectedComponents():
    def test_empty(self):
        assert len(subject.connected_components(np.zeros((4, 4), dtype=bool))) == 0

    def test_diagonal_pixels_connect(self):
        mask = np.zeros((3, 3), dtype=bool)
        mask[0, 0] = mask[1, 1] = True
        components = subject.connected_components(mask)
        assert len(components) == 1
        assert components[0].area == 2
        assert components[0].box == Box(0, 0, 2, 2)

    def test_min_area_drops_small_blob(self):
        mask = np.zeros((12, 12), dtype=bool)
        mask[0:3, 0:3] = True
        mask[0:2, 6:12] = True
        mask[8:10, 0:1] = True
        components = subject.connected_components(mask, min_area=5)
        assert sorted(c.area for c in components) == [9, 12]
        for component in components:
            rows, cols = component.box.slices()
            assert component.support[rows, cols].sum() == component.area
            assert component.support.sum() == component.area

    def test_matches_flood_fill(self):
        for mask in random_masks(200, seed=12, max_side=20):
            components = subject.connected_components(mask)
            found = sorted((c.area, c.box.top, c.box.left, c.box.height, c.box.width) for c in components)
            assert found == flood_fill_components(mask)

    def test_min_area_must_be_positive(self):
        with pytest.raises(ValueError):
            subject.connected_components(np.ones((2, 2), dtype=bool), min_area=0)


class TestMorphologyProperties():
    def test_interior_duality(self):
        for mask in random_masks(500, seed=31, max_side=64):
            dual = ~subject.erode(~mask)
            assert np.array_equal(subject.dilate(mask)[1:-1, 1:-1], dual[1:-1, 1:-1])

    def test_opening_and_closing_bracket_the_mask(self):
        for mask in random_masks(500, seed=32, max_side=64):
            opened = subject.dilate(subject.erode(mask))
            closed = subject.erode(subject.dilate(mask))
            assert not (opened & ~mask).any()
            assert not (mask & ~closed)[1:-1, 1:-1].any()
