"""Reference path projection, banding and file IO."""

import math

import numpy as np
import pytest

from hybridgait.path import (
    PathFormatError,
    ReferencePath,
    banded_error,
    default_gait_path,
    load_path_file,
    nearest_reference,
    soft_threshold,
    write_path_file,
)


def segment_path():
    # straight 45-degree segment through (0,0) -> (1,1), open
    pts = np.array([[0.0, 0.0], [0.5, 0.5], [1.0, 1.0]])
    return ReferencePath(points=pts, phase=np.array([0.0, 0.25, 0.5]), closed=False)


def brute_force_nearest(points, phases, closed, q):
    """Independent plain-python scan over every segment."""
    n = len(points)
    seg_idx = range(n) if closed else range(n - 1)
    best = None
    for i in seg_idx:
        j = (i + 1) % n
        ax, ay = points[i]
        bx, by = points[j]
        dx, dy = bx - ax, by - ay
        t = ((q[0] - ax) * dx + (q[1] - ay) * dy) / (dx * dx + dy * dy)
        t = min(max(t, 0.0), 1.0)
        px, py = ax + t * dx, ay + t * dy
        d = math.hypot(px - q[0], py - q[1])
        if best is None or d < best[0]:
            span = (phases[j] - phases[i]) % 1.0
            if closed and span == 0.0:
                span = 1.0
            best = (d, (px, py), (phases[i] + t * span) % 1.0)
    return best


class TestNearestReference:
    def test_perpendicular_foot_of_45_deg_line(self):
        q_ref, _ = nearest_reference(segment_path(), np.array([1.0, 0.0]))
        assert q_ref == pytest.approx([0.5, 0.5], abs=1e-12)
        be = banded_error(segment_path(), np.array([1.0, 0.0]), 0.0, 0.0)
        assert be.raw_error == pytest.approx([-0.5, 0.5], abs=1e-12)

    def test_point_on_path_has_zero_error(self):
        be = banded_error(segment_path(), np.array([0.25, 0.25]), 0.0, 0.0)
        assert be.raw_error == pytest.approx([0.0, 0.0], abs=1e-12)

    def test_matches_brute_force_on_random_paths(self):
        rng = np.random.default_rng(7)
        # smooth random closed loop: filtered random radii around a circle
        ang = np.linspace(0.0, 2.0 * math.pi, 200, endpoint=False)
        radii = 1.0 + 0.3 * np.convolve(rng.standard_normal(200), np.ones(15) / 15, mode="same")
        pts = np.column_stack([radii * np.cos(ang), radii * np.sin(ang)])
        phase = np.arange(200) / 200.0
        path = ReferencePath(points=pts, phase=phase, closed=True)
        for _ in range(1000):
            q = rng.uniform(-1.8, 1.8, size=2)
            q_ref, _ = nearest_reference(path, q)
            d = math.hypot(q_ref[0] - q[0], q_ref[1] - q[1])
            d_ref = brute_force_nearest(pts, phase, True, q)[0]
            assert abs(d - d_ref) < 1e-12

    def test_rotation_of_point_order_is_irrelevant(self):
        path = default_gait_path(120)
        rolled = ReferencePath(
            points=np.roll(path.points, -37, axis=0),
            phase=np.roll(path.phase, -37),
            closed=True,
        )
        rng = np.random.default_rng(3)
        for _ in range(50):
            q = rng.uniform(-0.6, 1.2, size=2)
            a, _ = nearest_reference(path, q)
            b, _ = nearest_reference(rolled, q)
            assert np.allclose(a, b, atol=1e-9)

    def test_tie_break_prefers_phase_ahead(self):
        # unit square, query at the center: all four edges are equidistant
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        path = ReferencePath(points=pts, phase=np.array([0.0, 0.25, 0.5, 0.75]), closed=True)
        _, phi = nearest_reference(path, np.array([0.5, 0.5]), prev_phase=0.3)
        assert phi == pytest.approx(0.375)
        _, phi = nearest_reference(path, np.array([0.5, 0.5]), prev_phase=0.7)
        assert phi == pytest.approx(0.875)


class TestBandedError:
    def test_three_band_cases(self):
        r = math.radians(2.0)
        assert soft_threshold(math.radians(3.0), r) == pytest.approx(math.radians(1.0))
        assert soft_threshold(math.radians(-1.5), r) == 0.0
        assert soft_threshold(math.radians(-3.0), r) == pytest.approx(math.radians(-1.0))

    def test_soft_threshold_is_odd(self):
        rng = np.random.default_rng(11)
        eps = rng.uniform(-0.3, 0.3, size=200)
        for r in (0.0, 0.01, 0.05, 0.2):
            assert np.allclose(soft_threshold(-eps, r), -soft_threshold(eps, r))

    def test_wider_band_never_increases_magnitude(self):
        rng = np.random.default_rng(12)
        eps = rng.uniform(-0.3, 0.3, size=200)
        radii = np.sort(rng.uniform(0.0, 0.25, size=8))
        prev = np.abs(soft_threshold(eps, radii[0]))
        for r in radii[1:]:
            cur = np.abs(soft_threshold(eps, r))
            assert np.all(cur <= prev + 1e-15)
            prev = cur

    def test_band_nesting(self):
        path = default_gait_path()
        rng = np.random.default_rng(13)
        r_db, r_fesb = math.radians(2.0), math.radians(6.0)
        for _ in range(100):
            q = rng.uniform(-0.5, 1.0, size=2)
            be = banded_error(path, q, r_db, r_fesb)
            assert np.all(np.abs(be.exo_error) <= np.abs(be.fes_error) + 1e-15)
            assert np.all(np.abs(be.fes_error) <= np.abs(be.raw_error) + 1e-15)
            # signs preserved where nonzero
            nz = be.fes_error != 0.0
            assert np.all(np.sign(be.fes_error[nz]) == np.sign(be.raw_error[nz]))

    def test_rejects_negative_radius(self):
        with pytest.raises(ValueError):
            banded_error(default_gait_path(), np.zeros(2), -0.1, 0.0)


class TestPathValidation:
    def test_needs_three_points(self):
        with pytest.raises(PathFormatError):
            ReferencePath(np.array([[0.0, 0.0], [1.0, 1.0]]), np.array([0.0, 0.5]))

    def test_rejects_duplicate_consecutive_points(self):
        pts = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]])
        with pytest.raises(PathFormatError):
            ReferencePath(pts, np.array([0.0, 0.2, 0.4]))

    def test_rejects_unsorted_phase_on_open_path(self):
        pts = np.array([[0.0, 0.0], [0.5, 0.1], [1.0, 1.0]])
        with pytest.raises(PathFormatError):
            ReferencePath(pts, np.array([0.0, 0.6, 0.4]), closed=False)

    def test_phases_must_be_in_unit_interval(self):
        pts = np.array([[0.0, 0.0], [0.5, 0.1], [1.0, 1.0]])
        with pytest.raises(PathFormatError):
            ReferencePath(pts, np.array([0.0, 0.5, 1.0]))


class TestPathFile:
    def test_round_trip(self, tmp_path):
        path = default_gait_path(50)
        f = tmp_path / "path.csv"
        write_path_file(path, f)
        loaded = load_path_file(f)
        assert np.allclose(loaded.points, path.points, atol=1e-9)
        assert np.allclose(loaded.phase, path.phase)

    def test_header_is_required(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("0.0,10.0,5.0\n0.5,-5.0,40.0\n0.9,8.0,12.0\n")
        with pytest.raises(PathFormatError):
            load_path_file(f)

    def test_phase_column_must_ascend(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("phase,hip_deg,knee_deg\n0.0,10,5\n0.6,-5,40\n0.3,8,12\n")
        with pytest.raises(PathFormatError):
            load_path_file(f)


class TestDefaultPath:
    def test_shape_and_ranges(self):
        path = default_gait_path()
        assert path.n_points == 200
        hip = np.rad2deg(path.points[:, 0])
        knee = np.rad2deg(path.points[:, 1])
        assert -30.0 < hip.min() and hip.max() < 120.0
        assert 0.0 < knee.min() and knee.max() < 140.0
        # swing flexion peak in the last 40% of the cycle
        assert path.phase[np.argmax(knee)] > 0.6

    def test_point_at_phase_hits_samples(self):
        path = default_gait_path(40)
        for i in (0, 7, 23, 39):
            assert np.allclose(path.point_at_phase(path.phase[i]), path.points[i], atol=1e-12)
