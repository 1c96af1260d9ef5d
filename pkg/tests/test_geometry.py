"""Point cloud, lens, and bounding box behavior."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multimapper.errors import (
    DegenerateLens,
    InvalidLensAxis,
    LensSizeMismatch,
    ParseError,
)
from multimapper.geometry import (
    BoundingBox,
    LensMap,
    PointCloud,
    lens_bounds,
    lens_coordinate,
    lens_pca,
    load_lens_csv,
    load_points_csv,
)


def circle_points(n: int) -> np.ndarray:
    theta = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return np.stack([np.cos(theta), np.sin(theta)], axis=1)


class TestPointCloud:
    def test_dimensions(self):
        pc = PointCloud(np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]))
        assert pc.n == 3
        assert len(pc) == 2

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            PointCloud(np.zeros((0, 2)))

    def test_rejects_ragged_shape(self):
        with pytest.raises(ValueError):
            PointCloud(np.zeros(5))


class TestCoordinateLens:
    def test_projects_selected_axes(self):
        pc = PointCloud(np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]))
        lens = lens_coordinate(pc, [0, 2])
        assert lens.values.tolist() == [[1.0, 3.0], [4.0, 6.0]]
        assert lens.d == 2

    def test_identity_on_1d(self):
        pc = PointCloud(np.array([[7.0]]))
        lens = lens_coordinate(pc, [0])
        assert lens.values.tolist() == [[7.0]]

    def test_circle_x_projection_range(self):
        pc = PointCloud(circle_points(100))
        lens = lens_coordinate(pc, [0])
        assert len(lens.values) == 100
        assert lens.values.min() >= -1.0 and lens.values.max() <= 1.0

    def test_axis_out_of_range(self):
        pc = PointCloud(np.array([[1.0, 2.0]]))
        with pytest.raises(InvalidLensAxis):
            lens_coordinate(pc, [2])

    def test_too_many_axes(self):
        pc = PointCloud(np.array([[1.0, 2.0, 3.0]]))
        with pytest.raises(InvalidLensAxis):
            lens_coordinate(pc, [0, 1, 2])

    def test_bounds_match_raw_coordinates(self):
        rng = np.random.default_rng(3)
        pc = PointCloud(rng.normal(size=(40, 3)))
        lens = lens_coordinate(pc, [1, 2])
        box = lens_bounds(lens)
        assert box.lo == tuple(pc.points[:, [1, 2]].min(axis=0))
        assert box.hi == tuple(pc.points[:, [1, 2]].max(axis=0))


class TestPcaLens:
    def test_collinear_points_recover_line_parameter(self):
        t = np.array([0.0, 1.0, 2.0, 5.0])
        pts = np.outer(t, np.array([1.0, 1.0, 1.0]))
        lens = lens_pca(PointCloud(pts), 1)
        got = lens.values[:, 0]
        expected = (t - t.mean()) * np.sqrt(3.0)
        agree = np.allclose(got, expected, atol=1e-9)
        flipped = np.allclose(got, -expected, atol=1e-9)
        assert agree or flipped

    def test_repeated_point_degenerate(self):
        pts = np.tile([[2.0, 2.0]], (5, 1))
        with pytest.raises(DegenerateLens):
            lens_pca(PointCloud(pts), 1)

    def test_anisotropic_blob_first_axis_tracks_x(self):
        rng = np.random.default_rng(11)
        pts = rng.normal(size=(300, 2)) * np.array([10.0, 1.0])
        lens = lens_pca(PointCloud(pts), 2)
        corr = np.corrcoef(lens.values[:, 0], pts[:, 0])[0, 1]
        assert abs(corr) > 0.99

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=2**31 - 1))
    def test_translation_invariant_up_to_sign(self, seed):
        rng = np.random.default_rng(seed)
        pts = rng.normal(size=(50, 3))
        shift = rng.normal(size=3) * 100.0
        a = lens_pca(PointCloud(pts), 2).values
        b = lens_pca(PointCloud(pts + shift), 2).values
        assert np.allclose(np.abs(a), np.abs(b), atol=1e-9)


class TestBounds:
    def test_simple(self):
        lens = LensMap(np.array([[0.0, 0.0], [2.0, 3.0]]))
        box = lens_bounds(lens)
        assert box.lo == (0.0, 0.0)
        assert box.hi == (2.0, 3.0)

    def test_degenerate_single_value(self):
        box = lens_bounds(LensMap(np.array([[5.0]])))
        assert box.lo == (5.0,)
        assert box.hi == (5.0,)

    def test_uniform_square_contained(self):
        rng = np.random.default_rng(0)
        lens = LensMap(rng.uniform(size=(1000, 2)))
        box = lens_bounds(lens)
        assert all(v >= 0.0 for v in box.lo)
        assert all(v <= 1.0 for v in box.hi)

    def test_box_validates_orientation(self):
        with pytest.raises(ValueError):
            BoundingBox(lo=(1.0,), hi=(0.0,))


class TestCsv:
    def test_lens_single_column(self, tmp_path):
        p = tmp_path / "lens.csv"
        p.write_text("0.5\n0.7\n")
        lens = load_lens_csv(p, 2)
        assert lens.values.tolist() == [[0.5], [0.7]]

    def test_lens_two_columns(self, tmp_path):
        p = tmp_path / "lens.csv"
        p.write_text("1,2\n3,4\n")
        lens = load_lens_csv(p, 2)
        assert lens.values.tolist() == [[1.0, 2.0], [3.0, 4.0]]

    def test_lens_row_count_mismatch(self, tmp_path):
        p = tmp_path / "lens.csv"
        p.write_text("1\n2\n3\n")
        with pytest.raises(LensSizeMismatch):
            load_lens_csv(p, 2)

    def test_lens_non_numeric_cell(self, tmp_path):
        p = tmp_path / "lens.csv"
        p.write_text("1,2\nfoo,4\n")
        with pytest.raises(ParseError):
            load_lens_csv(p, 2)

    def test_points_header_detected(self, tmp_path):
        p = tmp_path / "pts.csv"
        p.write_text("x,y\n1,2\n3,4\n")
        pc = load_points_csv(p)
        assert pc.points.tolist() == [[1.0, 2.0], [3.0, 4.0]]

    def test_points_no_header(self, tmp_path):
        p = tmp_path / "pts.csv"
        p.write_text("1,2\n3,4\n")
        pc = load_points_csv(p)
        assert len(pc) == 2

    def test_points_empty_file(self, tmp_path):
        p = tmp_path / "pts.csv"
        p.write_text("")
        with pytest.raises(ParseError):
            load_points_csv(p)
