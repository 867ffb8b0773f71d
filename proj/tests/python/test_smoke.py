import csv
import math
import os
import statistics
import subprocess
from pathlib import Path

import numpy as np
import pytest

import specmap


def case_scene():
    grid = specmap.GridSpec(10, 10, 10, 10.0)
    sources = [specmap.Source([0, 0, 0], 30.0), specmap.Source([50, 50, 0], 30.0), specmap.Source([100, 100, 0], 30.0)]
    prop = specmap.PropagationParams()
    truth = specmap.build_truth(grid, sources, prop)
    roi = specmap.build_roi_mask(grid, [specmap.Sphere(s.position_m, 30.0) for s in sources])
    return grid, prop, truth, roi


def test_truth_and_roi_shapes():
    grid, prop, truth, roi = case_scene()
    vals = truth.values
    assert vals.shape == (10, 10, 10)
    assert np.all(vals >= prop.noise_floor_mw() / 2)
    assert roi.n_roi == 102
    mask = specmap.roi_mask_array(grid, roi)
    assert mask.sum() == 102
    # The voxel next to the corner source is inside its sphere, the far corner of the ground is not.
    assert mask[0, 0, 0] and not mask[9, 0, 9]


def test_path_loss_against_numpy():
    grid = specmap.GridSpec(6, 5, 4, 10.0)
    prop = specmap.PropagationParams()
    prop.noise_sigma_scale = 0.0
    truth = specmap.build_truth(grid, [specmap.Source([12.0, 7.0, 3.0], 30.0)], prop)
    idx = np.indices((6, 5, 4)).astype(float)
    centers = 10.0 * idx + 5.0
    d = np.sqrt((centers[0] - 12.0) ** 2 + (centers[1] - 7.0) ** 2 + (centers[2] - 3.0) ** 2)
    expect = 30.0 * (1.0 / np.maximum(d, 1.0)) ** 2 + prop.noise_floor_mw()
    np.testing.assert_allclose(truth.values, expect, rtol=1e-12)


def test_leg_energy_blend():
    grid = specmap.GridSpec(10, 10, 10, 10.0)
    leg = specmap.leg_energy(specmap.VoxelIndex(1, 1, 1), specmap.VoxelIndex(2, 1, 2), grid)
    d = math.hypot(10.0, 10.0)
    c = 10.0 / d
    assert leg.route_energy_j == pytest.approx((1 - c) * 150 * d + c * 100 * d)
    assert leg.total_j == pytest.approx(leg.route_energy_j + 1000.0)


def test_mission_and_recovery():
    grid, prop, truth, roi = case_scene()
    cfg = specmap.DeployConfig(specmap.Strategy.RoiDriven, 0.2, seed=7)
    mission = specmap.run_mission(cfg, truth, roi, prop)
    assert len(mission) == 200
    sampled = mission.sampled_tensor(grid)
    for method in [specmap.Method.TvXY, specmap.Method.Knn]:
        rec = specmap.recover(sampled, method)
        assert rec.tensor.complete()
        known = sampled.mask
        np.testing.assert_array_equal(rec.tensor.values[known], sampled.values[known])
        assert specmap.w_roi(rec.tensor, truth, roi) >= 0.0


def test_numpy_tensor_roundtrip_and_errors():
    grid = specmap.GridSpec(3, 2, 2, 1.0)
    vals = np.arange(12, dtype=float).reshape(3, 2, 2)
    t = specmap.SpectrumTensor(grid, vals)
    np.testing.assert_array_equal(t.values, vals)
    with pytest.raises(specmap.SpecmapError):
        specmap.SpectrumTensor(grid, np.zeros((2, 2, 2)))


def test_sweep_aggregate_recomputed(tmp_path):
    cfg = specmap.ExperimentConfig.from_json(
        Path(os.environ.get("SPECMAP_CONFIG_DIR", Path(__file__).parents[2] / "configs"), "smoke.json").read_text()
    )
    raw, agg, rows, failures = specmap.run_sweep(cfg, tmp_path, 2)
    assert failures == 0 and rows == 16
    groups = {}
    with open(raw, newline="") as f:
        for row in csv.DictReader(f):
            key = (row["strategy"], row["method"], row["r"])
            groups.setdefault(key, []).append(float(row["w_roi"]))
    with open(agg, newline="") as f:
        for row in csv.DictReader(f):
            ws = groups[(row["strategy"], row["method"], row["r"])]
            assert int(row["n"]) == len(ws)
            assert float(row["mean_w_roi"]) == pytest.approx(statistics.mean(ws), rel=1e-12)
            assert float(row["std_w_roi"]) == pytest.approx(statistics.stdev(ws), rel=1e-9, abs=1e-15)


def test_single_run_matches_cli(tmp_path):
    cli = os.environ.get("SPECMAP_CLI")
    if not cli:
        pytest.skip("CLI path not provided")
    cfg_path = Path(os.environ.get("SPECMAP_CONFIG_DIR", Path(__file__).parents[2] / "configs"), "smoke.json")
    cfg = specmap.ExperimentConfig.load(cfg_path)
    row = specmap.run_single(cfg, specmap.Strategy.Random, specmap.Method.Knn, 0.2, seed=2)
    out = subprocess.run(
        [cli, "run", "--config", str(cfg_path), "--strategy", "Random", "--method", "Knn", "--r", "0.2", "--seed", "2"],
        check=True, capture_output=True, text=True,
    ).stdout
    line = [l for l in out.splitlines() if l.startswith("Random,Knn")][0]
    assert float(line.split(",")[6]) == row.w_roi
