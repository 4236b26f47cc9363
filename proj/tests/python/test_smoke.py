import math

import numpy as np
import pytest
from scipy.spatial import ConvexHull

import stixelforge as sf

SCENE = """
seed = 5
sensor.azimuth_min = -50
sensor.azimuth_max = 50
sensor.azimuth_step = 0.18
box = 10 0 0.9  2 2 1.8
box = 15 5 1.0  2 2.5 2.0
wall = 30 -10 0  0 20 0  0 0 4
"""


def hpr_oracle(points, gamma):
    """Spherical flipping plus a qhull hull, origin included."""
    norms = np.linalg.norm(points, axis=1)
    radius = gamma * norms.max()
    flipped = points + 2.0 * (radius - norms)[:, None] * points / norms[:, None]
    hull = ConvexHull(np.vstack([flipped, np.zeros(3)]))
    return sorted(int(i) for i in hull.vertices if i < len(points))


def test_grid_shapes():
    assert sf.GridSpec(1200, 1920, 8).tensor_shape == (2, 150, 240)
    assert sf.GridSpec(376, 1248, 4).tensor_shape == (2, 94, 312)


def test_errors_carry_codes():
    with pytest.raises(sf.StixelforgeError) as info:
        sf.Stixel(0, 10, 5, sf.StixelType.GroundObject)
    assert info.value.code == "InvalidArgument"
    with pytest.raises(sf.StixelforgeError) as info:
        sf.read_heatmap_blob(b"NOPE" + bytes(16))
    assert info.value.code == "BadMagic"
    assert issubclass(sf.StixelforgeError, ValueError)


def test_hidden_point_removal_matches_qhull():
    rng = np.random.default_rng(4)
    for _ in range(20):
        pts = rng.uniform(-5, 5, size=(60, 3))
        pts[:, 2] = np.abs(pts[:, 2]) + 1.0
        for gamma in (1.0, 10.0):
            assert sf.remove_hidden_points(pts, gamma) == hpr_oracle(pts, gamma)


def test_wall_hides_box():
    xs = np.linspace(-2, 2, 20)
    wall = np.array([(x, y, 5.0) for x in xs for y in xs])
    rng = np.random.default_rng(9)
    box = rng.uniform(-0.5, 0.5, size=(100, 3)) + np.array([0, 0, 10.0])
    visible = sf.remove_hidden_points(np.vstack([wall, box]), 1.0)
    assert sum(i >= len(wall) for i in visible) <= 1


def test_dbscan_two_groups():
    pts = np.array([[0.1 * i, 0, 0] for i in range(5)] + [[10 + 0.1 * i, 0, 0] for i in range(5)])
    assert sf.dbscan(pts, 0.5, 3) == [0] * 5 + [1] * 5
    assert sf.dbscan(pts[:1], 0.5, 3) == [sf.NOISE]


def test_ransac_recovers_plane():
    rng = np.random.default_rng(1)
    inliers = np.column_stack([rng.uniform(-5, 5, 70), rng.uniform(-5, 5, 70), rng.normal(0, 0.02, 70)])
    outliers = rng.uniform(-5, 5, size=(30, 3))
    plane, idx = sf.fit_plane_ransac(np.vstack([inliers, outliers]), 0.06, 500, 3)
    angle = math.degrees(math.acos(min(1.0, abs(plane.normal[2]))))
    assert angle < 1.0
    assert abs(plane.offset) < 0.05
    assert len(set(idx) & set(range(70))) >= 65


def test_codec_round_trip():
    grid = sf.GridSpec(64, 32, 8)
    world = sf.StixelWorld([sf.Stixel(1, 8, 24, sf.StixelType.GroundObject), sf.Stixel(1, 24, 48, sf.StixelType.SwibObject)], grid)
    hm = sf.targets_as_heatmaps(sf.encode_targets(world, grid))
    assert hm.occ.shape == (8, 4)
    decoded = sf.decode_heatmaps(hm)
    assert [(s.column, s.v_top, s.v_bottom) for s in decoded.object_stixels()] == [(1, 8, 24), (1, 24, 48)]
    scaled = sf.HeatmapPair(0.6 * hm.occ, 0.6 * hm.cut, grid)
    records = sf.pr_sweep([world], [scaled], [0.5, 0.7])
    assert records[0]["f1_micro"] == 1.0 and records[1]["f1_micro"] == 0.0
    assert sf.best_f1(records)["threshold"] == 0.5


def test_losses_against_numpy():
    assert abs(sf.bce_loss(np.array([[1.0, 0.0]]), np.array([[0.5, 0.5]])) - math.log(2)) < 1e-12
    rng = np.random.default_rng(2)
    p_occ, p_cut = rng.uniform(0.05, 0.95, (2, 4, 4))
    y_occ, y_cut = (rng.uniform(size=(2, 4, 4)) < 0.3).astype(float)
    bce = lambda y, p: -np.mean(y * np.log(p) + (1 - y) * np.log(1 - p))
    expect = bce(y_occ, p_occ) + 0.1 * p_occ.mean() + bce(y_cut, p_cut)
    assert abs(sf.total_loss(p_occ, p_cut, y_occ, y_cut) - expect) < 1e-12
    g_occ, _ = sf.loss_gradient(p_occ, p_cut, y_occ, y_cut)
    h = 1e-6
    bumped = p_occ.copy()
    bumped[1, 2] += h
    lowered = p_occ.copy()
    lowered[1, 2] -= h
    fd = (sf.total_loss(bumped, p_cut, y_occ, y_cut) - sf.total_loss(lowered, p_cut, y_occ, y_cut)) / (2 * h)
    assert abs(fd - g_occ[1, 2]) / abs(g_occ[1, 2]) < 1e-5


def test_metrics_fixtures():
    go = sf.StixelType.GroundObject
    gt = sf.StixelWorld([sf.Stixel(1, 10, 50, go)], 64, 200, 8)
    pred = sf.StixelWorld([sf.Stixel(1, 10, 50, go), sf.Stixel(1, 60, 90, go)], 64, 200, 8)
    r = sf.match_worlds(gt, pred)
    assert (r["precision"], r["recall"], r["f1"]) == (0.5, 1.0, 2 / 3)
    assert sf.stixel_iou(sf.Stixel(0, 0, 10, go), sf.Stixel(0, 5, 15, go)) == 5 / 15
    score, sigma, _ = sf.freespace_score([500], [450], 1200)
    assert abs(score - 90.0) < 1e-9 and sigma == 0.0


def test_synthetic_pipeline_and_io(tmp_path):
    scene = sf.parse_scene(SCENE)
    calib = scene.calibration()
    points = sf.simulate_lidar(scene)
    assert points.shape[1] == 3 and len(points) > 1000
    world = sf.generate_stixel_world(points, calib)
    oracle = sf.oracle_stixel_world(scene)
    assert len(world.object_stixels()) > 0
    assert sf.match_worlds(oracle, world)["f1"] > 0.8

    blob = sf.write_kitti_velodyne(points)
    assert np.array_equal(sf.read_kitti_velodyne(blob), points.astype(np.float32).astype(np.float64))
    assert sf.write_kitti_calib(sf.read_kitti_calib(sf.write_kitti_calib(calib))) == sf.write_kitti_calib(calib)
    text = sf.write_stixel_csv(world, "f0")
    assert sf.read_stixel_csv(text, world.grid) == world

    (tmp_path / "street.scene").write_text(SCENE)
    code, out, err = sf.run_cli(["synth", "--scene", str(tmp_path / "street.scene"), "--out", str(tmp_path / "gt")])
    assert code == 0, err
    assert (tmp_path / "gt" / "street.stx.csv").exists()
    assert sf.run_cli(["--help"])[0] == 0
    assert sf.run_cli(["decode"])[0] == 2
