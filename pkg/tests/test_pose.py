import json
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from demoplan.pose import (
    Calibration,
    DetectedScene,
    IDENTITY_CALIBRATION,
    Mask,
    ObjectPose,
    centroid,
    estimate_pose,
    load_calibration,
    load_mask_file,
    principal_angle,
    sense_scene,
    to_world,
)


def mask_of(points, name="thing"):
    return Mask(class_name=name, points=tuple(points))


def angle_distance(a: float, b: float) -> float:
    """Distance between two undirected axes (angles modulo pi)."""
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)


def eigensolver_angle(points) -> float:
    """Independent oracle: principal axis via full eigendecomposition."""
    pts = np.asarray(points, dtype=float)
    d = pts - pts.mean(axis=0)
    cov = d.T @ d / len(pts)
    vals, vecs = np.linalg.eigh(cov)
    v = vecs[:, int(np.argmax(vals))]
    return math.atan2(v[1], v[0]) % math.pi


def rect_cloud(width: int, height: int) -> list[tuple[float, float]]:
    return [(float(i), float(j)) for i in range(width) for j in range(height)]


def rotate_points(points, phi, about=None):
    pts = np.asarray(points, dtype=float)
    c = pts.mean(axis=0) if about is None else np.asarray(about, dtype=float)
    rot = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    return [tuple(p) for p in (pts - c) @ rot.T + c]


class TestCentroid:
    def test_symmetric_strip(self):
        assert centroid(mask_of([(0, 0), (1, 0), (2, 0)])) == (1.0, 0.0)

    def test_midpoint(self):
        assert centroid(mask_of([(0, 0), (2, 2)])) == (1.0, 1.0)

    def test_integer_grid_disk_against_summation_oracle(self):
        radius = 57
        pts = [
            (300 + i, 300 + j)
            for i in range(-radius, radius + 1)
            for j in range(-radius, radius + 1)
            if i * i + j * j <= radius * radius
        ]
        assert len(pts) >= 10_000
        # oracle: exhaustive summation without numpy
        ox = sum(p[0] for p in pts) / len(pts)
        oy = sum(p[1] for p in pts) / len(pts)
        cx, cy = centroid(mask_of(pts))
        assert abs(cx - ox) < 1e-9 and abs(cy - oy) < 1e-9
        assert abs(cx - 300.0) <= 0.5 and abs(cy - 300.0) <= 0.5

    def test_empty_mask_rejected(self):
        with pytest.raises(ValueError):
            Mask(class_name="x", points=())


class TestPrincipalAngle:
    def test_horizontal_line(self):
        theta, degenerate = principal_angle(mask_of([(0, 0), (1, 0), (2, 0)]))
        assert theta == 0.0 and not degenerate

    def test_diagonal_line(self):
        theta, degenerate = principal_angle(mask_of([(0, 0), (1, 1), (2, 2)]))
        assert abs(theta - math.pi / 4) < 1e-12 and not degenerate

    def test_single_point_is_degenerate(self):
        theta, degenerate = principal_angle(mask_of([(5, 7)]))
        assert theta == 0.0 and degenerate

    def test_square_is_degenerate(self):
        theta, degenerate = principal_angle(mask_of(rect_cloud(20, 20)))
        assert theta == 0.0 and degenerate

    def test_rotated_rectangle_thirty_degrees(self):
        base = rect_cloud(40, 20)
        phi = math.radians(30.0)
        rotated = rotate_points(base, phi)
        theta, degenerate = principal_angle(mask_of(rotated))
        assert not degenerate
        assert angle_distance(theta, phi) <= 1e-6
        assert angle_distance(theta, eigensolver_angle(rotated)) <= 1e-9

    @pytest.mark.parametrize("deg", range(0, 180, 15))
    def test_rotated_rectangle_sweep(self, deg):
        rotated = rotate_points(rect_cloud(30, 20), math.radians(deg))
        theta, degenerate = principal_angle(mask_of(rotated))
        assert not degenerate
        assert angle_distance(theta, math.radians(deg)) <= 1e-6

    def test_vertical_rectangle(self):
        theta, degenerate = principal_angle(mask_of(rect_cloud(10, 30)))
        assert not degenerate
        assert angle_distance(theta, math.pi / 2) <= 1e-12


class TestEstimatePose:
    def test_horizontal_strip(self):
        pose = estimate_pose(mask_of([(0, 0), (1, 0), (2, 0)], name="banana"))
        assert pose == ObjectPose(1.0, 0.0, 0.0, "banana", degenerate=False)

    def test_single_point_pose(self):
        pose = estimate_pose(mask_of([(5, 7)], name="grape"))
        assert pose == ObjectPose(5.0, 7.0, 0.0, "grape", degenerate=True)

    def test_rotated_rectangle_pose(self):
        rotated = rotate_points(rect_cloud(40, 20), math.radians(30.0), about=(100.0, 100.0))
        pose = estimate_pose(mask_of(rotated, name="carrot"))
        assert pose.class_name == "carrot"
        assert angle_distance(pose.theta, math.radians(30.0)) <= 1e-6


class TestToWorld:
    def test_scale_maps_image_center(self):
        cal = Calibration(scale=0.0015, origin=(0.0, 0.0))
        pose = ObjectPose(300.0, 300.0, 0.0, "c")
        out = to_world(pose, cal)
        assert abs(out.x - 0.45) < 1e-12 and abs(out.y - 0.45) < 1e-12

    def test_identity(self):
        pose = ObjectPose(12.0, 9.0, 0.3, "c")
        assert to_world(pose, IDENTITY_CALIBRATION) == pose

    def test_pure_offset(self):
        cal = Calibration(scale=1.0, origin=(0.1, 0.2))
        pose = ObjectPose(0.0, 0.0, 0.7, "c", degenerate=True)
        out = to_world(pose, cal)
        assert (out.x, out.y, out.theta, out.degenerate) == (0.1, 0.2, 0.7, True)

    def test_scale_must_be_positive(self):
        with pytest.raises(ValueError):
            Calibration(scale=0.0)


def random_cloud(seed: int) -> np.ndarray:
    """Anisotropic Gaussian cloud with a seeded generator."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(20, 200))
    stretch = float(rng.uniform(1.5, 8.0))
    phi = float(rng.uniform(0.0, math.pi))
    base = rng.normal(size=(n, 2)) * np.array([stretch, 1.0])
    rot = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    return base @ rot.T + rng.uniform(-50, 50, size=2)


def eigen_ratio(points) -> float:
    pts = np.asarray(points, dtype=float)
    d = pts - pts.mean(axis=0)
    cov = d.T @ d / len(pts)
    vals = np.linalg.eigvalsh(cov)
    return float(vals[1] / vals[0]) if vals[0] > 0 else math.inf


class TestAngleProperties:
    @given(seed=st.integers(0, 10**6), phi=st.floats(0.0, math.pi, allow_nan=False))
    @settings(max_examples=150, deadline=None)
    def test_rotation_equivariance(self, seed, phi):
        cloud = random_cloud(seed)
        assume(eigen_ratio(cloud) >= 1.2)
        theta0, deg0 = principal_angle(mask_of(map(tuple, cloud)))
        rotated = rotate_points(cloud, phi)
        theta1, deg1 = principal_angle(mask_of(rotated))
        assert not deg0 and not deg1
        assert angle_distance(theta1, theta0 + phi) <= 1e-6

    @given(
        seed=st.integers(0, 10**6),
        dx=st.floats(-1e3, 1e3, allow_nan=False),
        dy=st.floats(-1e3, 1e3, allow_nan=False),
    )
    @settings(max_examples=100, deadline=None)
    def test_translation_invariance(self, seed, dx, dy):
        cloud = random_cloud(seed)
        assume(eigen_ratio(cloud) >= 1.2)
        base_mask = mask_of(map(tuple, cloud))
        moved_mask = mask_of((x + dx, y + dy) for x, y in cloud)
        cx, cy = centroid(base_mask)
        mx, my = centroid(moved_mask)
        assert abs(mx - (cx + dx)) < 1e-6 and abs(my - (cy + dy)) < 1e-6
        assert angle_distance(principal_angle(base_mask)[0], principal_angle(moved_mask)[0]) <= 1e-9

    @given(seed=st.integers(0, 10**6), scale=st.floats(0.01, 100.0, allow_nan=False))
    @settings(max_examples=100, deadline=None)
    def test_scale_invariance_of_angle(self, seed, scale):
        cloud = random_cloud(seed)
        assume(eigen_ratio(cloud) >= 1.2)
        theta0, _ = principal_angle(mask_of(map(tuple, cloud)))
        theta1, _ = principal_angle(mask_of((x * scale, y * scale) for x, y in cloud))
        assert angle_distance(theta0, theta1) <= 1e-9

    def test_oracle_agreement_on_random_clouds(self):
        checked = 0
        seed = 0
        while checked < 300:
            cloud = random_cloud(seed)
            seed += 1
            if eigen_ratio(cloud) < 1.01:
                continue
            theta, degenerate = principal_angle(mask_of(map(tuple, cloud)))
            if degenerate:
                continue
            assert angle_distance(theta, eigensolver_angle(cloud)) <= 1e-9
            checked += 1


class TestMaskFile:
    def write(self, tmp_path, doc):
        path = tmp_path / "masks.json"
        path.write_text(json.dumps(doc))
        return path

    def test_points_and_rle_rows_give_identical_poses(self, tmp_path):
        points = [[10 + i, 20 + j] for j in range(3) for i in range(5)]
        rle = [[20 + j, 10, 5] for j in range(3)]
        doc = {
            "image_size": [600, 600],
            "objects": [
                {"class": "banana", "points": points},
                {"class": "banana", "rle_rows": rle},
            ],
        }
        scene = load_mask_file(self.write(tmp_path, doc))
        pose_a = estimate_pose(scene.masks[0])
        pose_b = estimate_pose(scene.masks[1])
        assert pose_a == pose_b

    def test_duplicate_points_rejected(self, tmp_path):
        doc = {"image_size": [10, 10], "objects": [{"class": "x", "points": [[1, 1], [1, 1]]}]}
        with pytest.raises(ValueError, match="duplicate"):
            load_mask_file(self.write(tmp_path, doc))

    def test_missing_encoding_rejected(self, tmp_path):
        doc = {"image_size": [10, 10], "objects": [{"class": "x"}]}
        with pytest.raises(ValueError):
            load_mask_file(self.write(tmp_path, doc))

    def test_bad_rle_run_rejected(self, tmp_path):
        doc = {"image_size": [10, 10], "objects": [{"class": "x", "rle_rows": [[0, 0, 0]]}]}
        with pytest.raises(ValueError):
            load_mask_file(self.write(tmp_path, doc))

    def test_scene_lengths_must_match(self):
        with pytest.raises(ValueError):
            DetectedScene(classes=("a",), masks=())

    def test_sense_scene_calibrates(self, tmp_path):
        doc = {"image_size": [600, 600], "objects": [{"class": "apple", "rle_rows": [[300, 299, 3]]}]}
        scene = load_mask_file(self.write(tmp_path, doc))
        cal = Calibration(scale=0.0015)
        (pose,) = sense_scene(scene, cal)
        assert abs(pose.x - 0.45) < 1e-12 and abs(pose.y - 0.45) < 1e-12

    def test_calibration_file_round_trip(self, tmp_path):
        path = tmp_path / "cal.json"
        path.write_text(json.dumps({"scale": 0.002, "origin": [0.1, 0.2], "image_size": [640, 480]}))
        cal = load_calibration(path)
        assert cal == Calibration(scale=0.002, origin=(0.1, 0.2), image_size=(640, 480))
