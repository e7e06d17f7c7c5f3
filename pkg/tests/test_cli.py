import json

import pytest

from sdmonitor import load_calibration
from sdmonitor.cli import main

from conftest import raw_det, stream_line

SCENE = """
focal_length_px = 1000.0
image_width = 1920
image_height = 1080
frame_count = 4

[[persons]]
id = 0
width_m = 0.55
height_m = 1.7
position = [-0.6, 5.0]

[[persons]]
id = 1
width_m = 0.55
height_m = 1.7
position = [0.6, 5.0]

[[persons]]
id = 2
width_m = 0.55
height_m = 1.7
position = [2.6, 5.0]
"""


def cli(*args):
    try:
        return main([str(a) for a in args])
    except SystemExit as exc:  # argparse exits for usage/version/help
        return exc.code or 0


@pytest.fixture()
def workspace(tmp_path):
    scene = tmp_path / "scene.toml"
    scene.write_text(SCENE)
    paths = {
        "scene": scene,
        "dets": tmp_path / "dets.jsonl",
        "truth": tmp_path / "truth.jsonl",
        "calib": tmp_path / "calib.json",
        "reports": tmp_path / "reports.jsonl",
        "metrics": tmp_path / "metrics.json",
        "dir": tmp_path,
    }
    return paths


def run_chain(ws, threshold=None):
    assert cli("simulate", "--scene", ws["scene"], "--seed", 1, "--out", ws["dets"], "--truth", ws["truth"]) == 0
    assert cli("calibrate", "--detections", ws["dets"], "--frame", 0, "--det-index", 0,
               "--marker-distance", 5.0, "--known-width", 0.55, "--out", ws["calib"]) == 0
    run_args = ["run", "--detections", ws["dets"], "--calibration", ws["calib"], "--out", ws["reports"]]
    if threshold is not None:
        run_args += ["--threshold", threshold]
    assert cli(*run_args) == 0
    eval_args = ["evaluate", "--pred", ws["reports"], "--truth", ws["truth"], "--out", ws["metrics"]]
    if threshold is not None:
        eval_args += ["--threshold", threshold]
    assert cli(*eval_args) == 0


def test_full_chain_on_synthetic_scene(workspace):
    run_chain(workspace)
    metrics = json.loads(workspace["metrics"].read_text())
    assert metrics["frames"] == 4
    # persons 0/1 are 1.2 m apart (violation); gaps to person 2 are 2.0 and 3.2 m
    assert metrics["confusion"] == {"tp": 4, "fp": 0, "tn": 8, "fn": 0}
    assert metrics["metrics_pct"]["accuracy"] == 100.0
    assert metrics["metrics_pct"]["false_alarm_rate"] == 0.0
    assert metrics["distance_stats"]["mean_percent_error"] < 1e-9


def test_calibrate_writes_valid_file(workspace):
    assert cli("simulate", "--scene", workspace["scene"], "--out", workspace["dets"],
               "--truth", workspace["truth"]) == 0
    assert cli("calibrate", "--detections", workspace["dets"], "--frame", 0, "--det-index", 1,
               "--marker-distance", 5.0, "--known-width", 0.55, "--out", workspace["calib"]) == 0
    calib = load_calibration(workspace["calib"])
    assert calib.focal_length_px == pytest.approx(1000.0, rel=1e-12)


def test_run_reports_match_wire_format(workspace):
    run_chain(workspace)
    lines = workspace["reports"].read_text().splitlines()
    assert len(lines) == 4
    first = json.loads(lines[0])
    assert set(first) == {"frame", "persons", "pairs"}
    assert set(first["persons"][0]) == {"id", "bbox", "depth_m"}
    assert set(first["pairs"][0]) == {"a", "b", "d_m", "violation"}


def test_run_verbose_pairs_flag(workspace):
    run_chain(workspace)
    assert cli("run", "--detections", workspace["dets"], "--calibration", workspace["calib"],
               "--out", workspace["reports"], "--verbose-pairs") == 0
    first = json.loads(workspace["reports"].read_text().splitlines()[0])
    assert {"depth_delta_m", "horiz_px", "avg_width_px", "ppm", "horiz_m"} <= set(first["pairs"][0])


def test_run_overlay_output(workspace):
    run_chain(workspace)
    overlay = workspace["dir"] / "overlay.jsonl"
    assert cli("run", "--detections", workspace["dets"], "--calibration", workspace["calib"],
               "--out", workspace["reports"], "--overlay", overlay) == 0
    draw = json.loads(overlay.read_text().splitlines()[0])["draw"]
    # three boxes with id labels plus one violation line with its label
    assert [d["kind"] for d in draw] == ["box", "label"] * 3 + ["line", "label"]


def test_run_out_dash_writes_stdout(workspace, capsys):
    assert cli("simulate", "--scene", workspace["scene"], "--out", workspace["dets"],
               "--truth", workspace["truth"]) == 0
    assert cli("calibrate", "--detections", workspace["dets"], "--frame", 0, "--det-index", 0,
               "--marker-distance", 5.0, "--known-width", 0.55, "--out", workspace["calib"]) == 0
    assert cli("run", "--detections", workspace["dets"], "--calibration", workspace["calib"],
               "--out", "-") == 0
    out = capsys.readouterr().out
    assert len(out.splitlines()) == 4
    assert json.loads(out.splitlines()[0])["frame"] == 0


def test_threshold_changes_edge_counts(workspace):
    run_chain(workspace, threshold=3.0)
    metrics = json.loads(workspace["metrics"].read_text())
    # at 3 m everything except the 3.2 m outer pair violates
    assert metrics["confusion"]["tp"] == 8
    assert metrics["metrics_pct"]["accuracy"] == 100.0


def test_config_file_sets_threshold(workspace):
    run_chain(workspace)
    config = workspace["dir"] / "settings.conf"
    config.write_text("# pipeline settings\ngeometry.threshold_m = 1.0\n")
    assert cli("run", "--detections", workspace["dets"], "--calibration", workspace["calib"],
               "--out", workspace["reports"], "--config", config) == 0
    reports = [json.loads(line) for line in workspace["reports"].read_text().splitlines()]
    assert all(not p["violation"] for r in reports for p in r["pairs"])


def test_flag_overrides_config_file(workspace):
    run_chain(workspace)
    config = workspace["dir"] / "settings.conf"
    config.write_text("geometry.threshold_m = 1.0\n")
    assert cli("run", "--detections", workspace["dets"], "--calibration", workspace["calib"],
               "--out", workspace["reports"], "--config", config, "--threshold", 1.8) == 0
    reports = [json.loads(line) for line in workspace["reports"].read_text().splitlines()]
    assert any(p["violation"] for r in reports for p in r["pairs"])


def test_unknown_config_key_is_usage_error(workspace):
    run_chain(workspace)
    config = workspace["dir"] / "settings.conf"
    config.write_text("geometry.thresh = 1.0\n")
    assert cli("run", "--detections", workspace["dets"], "--calibration", workspace["calib"],
               "--out", workspace["reports"], "--config", config) == 1


def test_evaluate_with_edge_labels(workspace):
    run_chain(workspace)
    edges = workspace["dir"] / "labels.jsonl"
    edges.write_text("\n".join(
        json.dumps({"frame": i, "violations": [[0, 1]]}) for i in range(4)
    ) + "\n")
    out = workspace["dir"] / "metrics_edges.json"
    assert cli("evaluate", "--pred", workspace["reports"], "--edges", edges, "--out", out) == 0
    metrics = json.loads(out.read_text())
    assert metrics["confusion"] == {"tp": 4, "fp": 0, "tn": 8, "fn": 0}
    assert "distance_stats" not in metrics


def test_evaluate_labels_plus_truth_combined(workspace):
    run_chain(workspace)
    edges = workspace["dir"] / "labels.jsonl"
    edges.write_text("\n".join(
        json.dumps({"frame": i, "violations": []}) for i in range(4)
    ) + "\n")
    out = workspace["dir"] / "metrics_both.json"
    assert cli("evaluate", "--pred", workspace["reports"], "--truth", workspace["truth"],
               "--edges", edges, "--out", out) == 0
    metrics = json.loads(out.read_text())
    assert metrics["confusion"]["fp"] == 4  # labels say nothing violates
    assert metrics["distance_stats"]["count"] == 12


# -- exit codes --------------------------------------------------------------


def test_usage_error_missing_required_flag():
    assert cli("run", "--detections", "x.jsonl") == 1


def test_usage_error_unknown_command():
    assert cli("transmogrify") == 1


def test_usage_error_nonpositive_threshold(workspace):
    run_chain(workspace)
    assert cli("run", "--detections", workspace["dets"], "--calibration", workspace["calib"],
               "--out", workspace["reports"], "--threshold", 0) == 1


def test_usage_error_bad_jobs(workspace):
    run_chain(workspace)
    assert cli("run", "--detections", workspace["dets"], "--calibration", workspace["calib"],
               "--out", workspace["reports"], "--jobs", 0) == 1


def test_usage_error_evaluate_without_reference(workspace):
    run_chain(workspace)
    assert cli("evaluate", "--pred", workspace["reports"], "--out", "-") == 1


def test_data_error_missing_detections_file(tmp_path):
    calib = tmp_path / "calib.json"
    calib.write_text('{"focal_length_px": 1000.0, "known_width_m": 0.5, '
                     '"marker_distance_m": 5.0, "marker_width_px": 100.0}')
    assert cli("run", "--detections", tmp_path / "missing.jsonl", "--calibration", calib,
               "--out", tmp_path / "r.jsonl") == 2


def test_data_error_corrupt_calibration(workspace):
    assert cli("simulate", "--scene", workspace["scene"], "--out", workspace["dets"],
               "--truth", workspace["truth"]) == 0
    workspace["calib"].write_text("{broken")
    assert cli("run", "--detections", workspace["dets"], "--calibration", workspace["calib"],
               "--out", workspace["reports"]) == 2


def test_data_error_malformed_stream(workspace, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text(stream_line(0, [raw_det([0, 0, 10, 10])]) + "\nnot json\n")
    assert cli("calibrate", "--detections", bad, "--frame", 1, "--det-index", 0,
               "--marker-distance", 5.0, "--out", tmp_path / "c.json") == 2


def test_data_error_calibrate_frame_missing(workspace):
    assert cli("simulate", "--scene", workspace["scene"], "--out", workspace["dets"],
               "--truth", workspace["truth"]) == 0
    assert cli("calibrate", "--detections", workspace["dets"], "--frame", 99, "--det-index", 0,
               "--marker-distance", 5.0, "--out", workspace["calib"]) == 2


def test_data_error_calibrate_det_index_out_of_range(workspace):
    assert cli("simulate", "--scene", workspace["scene"], "--out", workspace["dets"],
               "--truth", workspace["truth"]) == 0
    assert cli("calibrate", "--detections", workspace["dets"], "--frame", 0, "--det-index", 9,
               "--marker-distance", 5.0, "--out", workspace["calib"]) == 2


def test_data_error_bad_scene_file(tmp_path):
    scene = tmp_path / "scene.toml"
    scene.write_text("frame_count = 1\n")
    assert cli("simulate", "--scene", scene, "--out", tmp_path / "d.jsonl",
               "--truth", tmp_path / "t.jsonl") == 2


def test_usage_error_negative_marker_distance(workspace):
    assert cli("simulate", "--scene", workspace["scene"], "--out", workspace["dets"],
               "--truth", workspace["truth"]) == 0
    assert cli("calibrate", "--detections", workspace["dets"], "--frame", 0, "--det-index", 0,
               "--marker-distance", -5.0, "--out", workspace["calib"]) == 1


def test_version_exits_zero(capsys):
    assert cli("--version") == 0
    assert "sdmonitor" in capsys.readouterr().out


def test_help_exits_zero(capsys):
    assert cli("--help") == 0
    out = capsys.readouterr().out
    for command in ("calibrate", "run", "simulate", "evaluate"):
        assert command in out
