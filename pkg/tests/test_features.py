import numpy as np
import pytest

from textvid.errors import GeometryError
from textvid.features import crop_replicate, extract_patch, template_grid
from textvid.imgproc import Frame
from textvid.store import BoundingBox


def make_frame(rng, w=120, h=90):
    return Frame(index=0, pixels=rng.random((h, w)))


class TestTemplateGrid:
    def test_longest_side_maps_to_template_size(self):
        assert template_grid(64, 24, 64) == (64, 24)
        assert template_grid(24, 64, 64) == (24, 64)

    def test_dimensions_even(self):
        for bw, bh in [(50, 13), (33, 97), (7, 5)]:
            gw, gh = template_grid(bw, bh, 64)
            assert gw % 2 == 0 and gh % 2 == 0

    def test_fixed_regardless_of_absolute_size(self):
        # same aspect, different scale -> same grid
        assert template_grid(64, 32, 64) == template_grid(128, 64, 64)


class TestCropReplicate:
    def test_interior_crop_is_plain_slice(self, rng):
        img = rng.random((20, 30))
        assert np.array_equal(crop_replicate(img, 5, 3, 10, 8), img[3:11, 5:15])

    def test_corner_crop_matches_per_pixel_oracle(self, rng):
        img = rng.random((15, 17))
        x0, y0, w, h = -4, -3, 12, 10
        got = crop_replicate(img, x0, y0, w, h)
        for yy in range(h):
            for xx in range(w):
                sy = min(max(y0 + yy, 0), img.shape[0] - 1)
                sx = min(max(x0 + xx, 0), img.shape[1] - 1)
                assert got[yy, xx] == img[sy, sx]


class TestExtractPatch:
    def test_constant_gray_frame_gives_zero_patch(self):
        frame = Frame(index=0, pixels=np.full((80, 100), 0.5))
        box = BoundingBox(40, 30, 24, 12)
        patch = extract_patch(frame, box, padding=2.0, grid=template_grid(24, 12, 64))
        assert np.max(np.abs(patch.planes)) < 1e-9

    def test_corner_box_uses_replicate_border(self, rng):
        frame = make_frame(rng)
        box = BoundingBox(0, 0, 20, 10)  # window extends past the top-left corner
        patch = extract_patch(frame, box, padding=2.0, grid=(32, 16))
        assert patch.planes.shape == (1, 16, 32)
        assert np.all(np.isfinite(patch.planes))

    def test_determinism(self, rng):
        frame = make_frame(rng)
        box = BoundingBox(40, 30, 30, 14)
        grid = template_grid(30, 14, 64)
        a = extract_patch(frame, box, 2.0, grid)
        b = extract_patch(frame, box, 2.0, grid)
        assert np.array_equal(a.planes, b.planes)

    def test_borders_are_windowed_to_zero(self, rng):
        frame = make_frame(rng)
        patch = extract_patch(frame, BoundingBox(40, 30, 30, 14), 2.0, (32, 16))
        plane = patch.planes[0]
        for border in (plane[0, :], plane[-1, :], plane[:, 0], plane[:, -1]):
            assert np.max(np.abs(border)) < 1e-6

    def test_grid_fixed_regardless_of_box_size(self, rng):
        frame = make_frame(rng)
        a = extract_patch(frame, BoundingBox(30, 30, 20, 10), 2.0, (40, 20))
        b = extract_patch(frame, BoundingBox(30, 30, 60, 30), 2.0, (40, 20))
        assert a.planes.shape == b.planes.shape

    def test_center_outside_frame_rejected(self, rng):
        frame = make_frame(rng)
        with pytest.raises(GeometryError):
            extract_patch(frame, BoundingBox(150, 30, 20, 10), 2.0, (32, 16))

    def test_degenerate_box_rejected(self, rng):
        frame = make_frame(rng)
        with pytest.raises(GeometryError):
            extract_patch(frame, BoundingBox(40, 30, 1, 10), 2.0, (32, 16))

    def test_color_frame_converted_to_gray(self, rng):
        pixels = rng.random((60, 80, 3))
        frame = Frame(index=0, pixels=pixels)
        patch = extract_patch(frame, BoundingBox(30, 20, 20, 10), 2.0, (32, 16))
        assert patch.channels == 1
