import json
from dataclasses import replace

import pytest

from sdmonitor import (
    BoundingBox,
    CameraCalibration,
    FrameReport,
    GroundTruthScene,
    PairMeasurement,
    PersonReport,
    PipelineConfig,
    ScenePerson,
    calibrate,
    generate,
    overlay_to_json,
    parse_report_line,
    process_stream,
    render_overlay,
    report_to_json,
)

from conftest import det, frame


def calib_f1000_w05():
    return CameraCalibration(
        focal_length_px=1000.0, known_width_m=0.5, marker_distance_m=5.0, marker_width_px=100.0
    )


def run(frames, calib=None, **config_kwargs):
    calib = calib or calib_f1000_w05()
    config = PipelineConfig(**config_kwargs) if config_kwargs else None
    return list(process_stream(frames, calib, config))


def two_person_scene(gap_m=1.0, frames=5):
    persons = (
        ScenePerson(person_id=0, width_m=0.5, height_m=1.7, positions=((-gap_m / 2, 5.0),)),
        ScenePerson(person_id=1, width_m=0.5, height_m=1.7, positions=((gap_m / 2, 5.0),)),
    )
    return GroundTruthScene(
        focal_length_px=1000.0,
        image_width=1920,
        image_height=1080,
        frame_count=frames,
        persons=persons,
    )


def test_empty_stream_gives_no_reports():
    assert run([]) == []


def test_empty_frame_gives_empty_report():
    reports = run([frame(0, [])])
    assert reports == [
        FrameReport(
            frame_index=0,
            persons=(),
            pairs=(),
            violations=(),
            image_width=1920,
            image_height=1080,
        )
    ]


def test_two_person_violation_end_to_end():
    scene = two_person_scene(gap_m=1.0)
    frames = [f for f, _ in generate(scene)]
    calib = calibrate(frames[0].detections[0].bbox, 5.0, 0.5)
    reports = run(frames, calib)
    assert len(reports) == 5
    for report in reports:
        assert [p.track_id for p in report.persons] == [0, 1]
        assert all(p.depth_m == pytest.approx(5.0, rel=1e-12) for p in report.persons)
        assert len(report.pairs) == 1
        assert report.pairs[0].distance_m == pytest.approx(1.0, rel=1e-12)
        assert report.violations == ((0, 1),)


def test_compliant_pair_reports_no_violation():
    scene = two_person_scene(gap_m=2.4)
    frames = [f for f, _ in generate(scene)]
    calib = calibrate(frames[0].detections[0].bbox, 5.0, 0.5)
    for report in run(frames, calib):
        assert report.violations == ()
        assert report.pairs[0].distance_m == pytest.approx(2.4, rel=1e-12)


def test_identity_survives_detection_gap():
    a = det(100, 100, 200, 400)
    b = det(1000, 100, 1100, 400)
    frames = [
        frame(i, [a, b] if not 4 <= i <= 6 else [a])
        for i in range(12)
    ]
    reports = run(frames)
    for i, report in enumerate(reports):
        expected = [0] if 4 <= i <= 6 else [0, 1]
        assert [p.track_id for p in report.persons] == expected
    # the returning person keeps id 1; nothing ever registers id 2
    assert all(p.track_id <= 1 for r in reports for p in r.persons)


def test_narrow_person_reported_with_null_depth_and_no_pairs():
    f = frame(0, [det(100, 100, 101.5, 400), det(500, 100, 600, 400), det(900, 100, 1000, 400)])
    report = run([f])[0]
    depths = {p.track_id: p.depth_m for p in report.persons}
    assert len(report.persons) == 3
    assert depths[0] is None
    assert depths[1] is not None and depths[2] is not None
    # only the two measurable persons pair up
    assert [(p.id_a, p.id_b) for p in report.pairs] == [(1, 2)]


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4, 5])
def test_pair_count_is_n_choose_2_when_all_measured(n):
    dets = [det(100 + 250 * i, 100, 200 + 250 * i, 400) for i in range(n)]
    report = run([frame(0, dets)])[0]
    assert len(report.pairs) == n * (n - 1) // 2


def test_low_score_and_other_classes_ignored():
    f = frame(
        0,
        [
            det(100, 100, 200, 400, score=0.95),
            det(400, 100, 500, 400, score=0.3),
            det(700, 100, 800, 400, class_id=3),
            det(1000, 100, 1100, 400, score=0.7),
        ],
    )
    report = run([f])[0]
    assert [p.bbox.x1 for p in report.persons] == [100.0, 1000.0]


def test_config_overrides_filtering():
    f = frame(0, [det(100, 100, 200, 400, class_id=3, score=0.4)])
    assert run([f])[0].persons == ()
    report = run([f], person_class=3, min_score=0.4)[0]
    assert len(report.persons) == 1


def test_threshold_config_changes_violations():
    f = frame(0, [det(100, 100, 200, 400), det(400, 100, 500, 400)])
    # 300 px apart at 200 px/m = 1.5 m
    assert run([f])[0].violations == ((0, 1),)
    assert run([f], threshold_m=1.2)[0].violations == ()


def test_reports_are_deterministic():
    scene = two_person_scene()
    frames = [f for f, _ in generate(scene)]
    first = [report_to_json(r) for r in run(frames)]
    second = [report_to_json(r) for r in run(frames)]
    assert first == second


# -- wire format -------------------------------------------------------------


def sample_report():
    return FrameReport(
        frame_index=4,
        persons=(
            PersonReport(track_id=0, bbox=BoundingBox(100.0, 100.0, 200.0, 400.0), depth_m=5.0),
            PersonReport(track_id=1, bbox=BoundingBox(400.0, 100.0, 500.0, 400.0), depth_m=None),
        ),
        pairs=(
            PairMeasurement(
                id_a=0,
                id_b=1,
                depth_delta_m=0.0,
                horiz_px=300.0,
                avg_width_px=100.0,
                ppm=200.0,
                horiz_m=1.5,
                distance_m=1.5,
                violation=True,
            ),
        ),
        violations=((0, 1),),
        image_width=1920,
        image_height=1080,
    )


def test_report_json_shape():
    payload = json.loads(report_to_json(sample_report()))
    assert payload == {
        "frame": 4,
        "persons": [
            {"id": 0, "bbox": [100.0, 100.0, 200.0, 400.0], "depth_m": 5.0},
            {"id": 1, "bbox": [400.0, 100.0, 500.0, 400.0], "depth_m": None},
        ],
        "pairs": [{"a": 0, "b": 1, "d_m": 1.5, "violation": True}],
    }


def test_report_json_verbose_adds_intermediates():
    payload = json.loads(report_to_json(sample_report(), verbose_pairs=True))
    pair = payload["pairs"][0]
    assert pair["depth_delta_m"] == 0.0
    assert pair["horiz_px"] == 300.0
    assert pair["avg_width_px"] == 100.0
    assert pair["ppm"] == 200.0
    assert pair["horiz_m"] == 1.5


def test_parse_report_line_round_trip():
    line = report_to_json(sample_report(), verbose_pairs=True)
    payload = parse_report_line(line)
    assert payload["frame"] == 4
    assert len(payload["persons"]) == 2


def test_parse_report_line_rejects_wrong_shape():
    with pytest.raises(ValueError):
        parse_report_line('{"frame": 0}')


# -- overlay -----------------------------------------------------------------


def test_overlay_two_persons_one_violation():
    instructions = render_overlay(sample_report())
    kinds = [i.kind for i in instructions]
    assert kinds == ["box", "label", "box", "label", "line", "label"]
    id_labels = [i.text for i in instructions if i.kind == "label"]
    assert id_labels == ["0", "1", "1.50"]
    line = next(i for i in instructions if i.kind == "line")
    assert line.geometry == (150.0, 250.0, 450.0, 250.0)
    mid_label = instructions[-1]
    assert mid_label.geometry == (300.0, 250.0)


def test_overlay_empty_report():
    assert render_overlay(run([frame(0, [])])[0]) == []


def test_overlay_without_violations_has_no_lines():
    report = replace(sample_report(), violations=())
    kinds = [i.kind for i in render_overlay(report)]
    assert kinds == ["box", "label", "box", "label"]


def test_overlay_json_line():
    report = sample_report()
    payload = json.loads(overlay_to_json(report.frame_index, render_overlay(report)))
    assert payload["frame"] == 4
    assert len(payload["draw"]) == 6
    assert payload["draw"][0] == {
        "kind": "box",
        "geometry": [100.0, 100.0, 200.0, 400.0],
        "text": None,
    }
