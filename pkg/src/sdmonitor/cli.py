"""Command-line interface: calibrate, run, simulate, evaluate.

Exit codes: 0 success, 1 usage error, 2 data error. Progress and warnings go
to stderr; measurement data goes to the requested output files (or stdout
when the path is "-").
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from typing import IO, Iterator

from . import __version__
from .calibration import (
    DEFAULT_KNOWN_WIDTH_M,
    CalibrationError,
    calibrate,
    load_calibration,
    save_calibration,
)
from .detections import (
    DEFAULT_MIN_SCORE,
    DEFAULT_PERSON_CLASS,
    RejectedRecord,
    StreamFormatError,
    parse_stream,
)
from .evaluator import (
    DEFAULT_ALIGN_GATE_PX,
    EvaluationError,
    EvaluationResult,
    evaluate_reports,
    evaluate_with_edges,
    format_metrics,
    result_to_json,
)
from .geometry import DEFAULT_MIN_BBOX_WIDTH_PX, DEFAULT_THRESHOLD_M
from .pipeline import (
    PipelineConfig,
    overlay_to_json,
    parse_report_line,
    process_stream,
    render_overlay,
    report_to_json,
)
from .simulator import SceneError, load_scene, parse_truth_line, write_streams
from .tracker import DEFAULT_MAX_DISAPPEARED

log = logging.getLogger("sdmonitor")


class _UsageError(Exception):
    """Bad invocation detected after argparse; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    """argparse reserves exit code 2 for usage errors; this CLI uses 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


_CONFIG_KEYS = (
    "tracker.max_disappeared",
    "tracker.max_match_distance",
    "geometry.threshold_m",
    "geometry.min_bbox_width_px",
    "io.min_score",
    "io.person_class",
)


def _read_config(path: str) -> dict[str, str]:
    """Parse a key=value config file; unknown keys are usage errors."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise _UsageError(f"{path}:{line_number}: expected key = value")
            key, _, value = stripped.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise _UsageError(f"{path}:{line_number}: unknown config key {key!r}")
            values[key] = value.strip()
    return values


def _positive_float(value: str, name: str) -> float:
    try:
        parsed = float(value)
    except ValueError:
        raise _UsageError(f"{name} must be a number, got {value!r}") from None
    if not parsed > 0:
        raise _UsageError(f"{name} must be positive, got {value}")
    return parsed


def _resolve_run_config(args: argparse.Namespace) -> PipelineConfig:
    """Layer defaults, config file, then flags into one pipeline config."""
    settings = {
        "tracker.max_disappeared": DEFAULT_MAX_DISAPPEARED,
        "tracker.max_match_distance": None,
        "geometry.threshold_m": DEFAULT_THRESHOLD_M,
        "geometry.min_bbox_width_px": DEFAULT_MIN_BBOX_WIDTH_PX,
        "io.min_score": DEFAULT_MIN_SCORE,
        "io.person_class": DEFAULT_PERSON_CLASS,
    }
    if args.config is not None:
        raw = _read_config(args.config)
        if "tracker.max_disappeared" in raw:
            try:
                settings["tracker.max_disappeared"] = int(raw["tracker.max_disappeared"])
            except ValueError:
                raise _UsageError("tracker.max_disappeared must be an integer") from None
        if "tracker.max_match_distance" in raw:
            value = raw["tracker.max_match_distance"]
            if value.lower() in ("none", "unlimited"):
                settings["tracker.max_match_distance"] = None
            else:
                settings["tracker.max_match_distance"] = _positive_float(
                    value, "tracker.max_match_distance"
                )
        if "geometry.threshold_m" in raw:
            settings["geometry.threshold_m"] = _positive_float(
                raw["geometry.threshold_m"], "geometry.threshold_m"
            )
        if "geometry.min_bbox_width_px" in raw:
            settings["geometry.min_bbox_width_px"] = _positive_float(
                raw["geometry.min_bbox_width_px"], "geometry.min_bbox_width_px"
            )
        if "io.min_score" in raw:
            try:
                settings["io.min_score"] = float(raw["io.min_score"])
            except ValueError:
                raise _UsageError("io.min_score must be a number") from None
        if "io.person_class" in raw:
            try:
                settings["io.person_class"] = int(raw["io.person_class"])
            except ValueError:
                raise _UsageError("io.person_class must be an integer") from None

    if args.max_disappeared is not None:
        settings["tracker.max_disappeared"] = args.max_disappeared
    if args.max_match_distance is not None:
        settings["tracker.max_match_distance"] = args.max_match_distance
    if args.threshold is not None:
        settings["geometry.threshold_m"] = args.threshold
    if args.min_bbox_width is not None:
        settings["geometry.min_bbox_width_px"] = args.min_bbox_width
    if args.min_score is not None:
        settings["io.min_score"] = args.min_score
    if args.person_class is not None:
        settings["io.person_class"] = args.person_class

    if settings["tracker.max_disappeared"] < 0:
        raise _UsageError("max disappeared must be >= 0")
    if settings["tracker.max_match_distance"] is not None and not settings["tracker.max_match_distance"] > 0:
        raise _UsageError("max match distance must be positive")
    if not settings["geometry.threshold_m"] > 0:
        raise _UsageError("threshold must be positive")
    if not settings["geometry.min_bbox_width_px"] > 0:
        raise _UsageError("min bbox width must be positive")
    if not 0.0 <= settings["io.min_score"] <= 1.0:
        raise _UsageError("min score must be within [0, 1]")

    return PipelineConfig(
        person_class=settings["io.person_class"],
        min_score=settings["io.min_score"],
        max_disappeared=settings["tracker.max_disappeared"],
        max_match_distance=settings["tracker.max_match_distance"],
        threshold_m=settings["geometry.threshold_m"],
        min_bbox_width_px=settings["geometry.min_bbox_width_px"],
    )


def _check_jobs(jobs: int) -> None:
    if jobs < 1:
        raise _UsageError(f"--jobs must be >= 1, got {jobs}")
    if jobs > 1:
        log.info("tracking is stateful and frames are processed in order; --jobs %d has no effect", jobs)


def _open_out(path: str) -> contextlib.AbstractContextManager[IO[str]]:
    if path == "-":
        return contextlib.nullcontext(sys.stdout)
    return open(path, "w", encoding="utf-8")


def _warn_reject(record: RejectedRecord) -> None:
    log.warning(
        "dropped detection %d of frame %d (line %d): %s",
        record.det_index,
        record.frame_index,
        record.line_number,
        record.reason,
    )


def _read_jsonl(path: str, parse_line, label: str) -> Iterator[dict]:
    with open(path, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                yield parse_line(line)
            except (ValueError, KeyError) as exc:
                raise EvaluationError(f"{label} line {line_number}: {exc}") from exc


def _cmd_calibrate(args: argparse.Namespace) -> int:
    if not args.marker_distance > 0:
        raise _UsageError("marker distance must be positive")
    if not args.known_width > 0:
        raise _UsageError("known width must be positive")
    if args.frame < 0:
        raise _UsageError("frame index must be >= 0")
    if args.det_index < 0:
        raise _UsageError("detection index must be >= 0")
    with open(args.detections, "r", encoding="utf-8") as handle:
        for frame in parse_stream(handle, on_reject=_warn_reject):
            if frame.frame_index != args.frame:
                continue
            if args.det_index >= len(frame.detections):
                raise StreamFormatError(
                    f"frame {args.frame} has {len(frame.detections)} usable detections; "
                    f"index {args.det_index} is out of range"
                )
            marker = frame.detections[args.det_index]
            calib = calibrate(marker.bbox, args.marker_distance, args.known_width)
            save_calibration(calib, args.out)
            log.info(
                "calibrated: focal length %.6g px from a %.3g px marker at %.3g m",
                calib.focal_length_px,
                calib.marker_width_px,
                calib.marker_distance_m,
            )
            return 0
    raise StreamFormatError(f"frame {args.frame} not found in {args.detections}")


def _cmd_run(args: argparse.Namespace) -> int:
    _check_jobs(args.jobs)
    config = _resolve_run_config(args)
    calib = load_calibration(args.calibration)
    frames_done = 0
    overlay_ctx = _open_out(args.overlay) if args.overlay else contextlib.nullcontext(None)
    with open(args.detections, "r", encoding="utf-8") as detections_in:
        with _open_out(args.out) as reports_out, overlay_ctx as overlay_out:
            frames = parse_stream(detections_in, on_reject=_warn_reject)
            for report in process_stream(frames, calib, config):
                reports_out.write(report_to_json(report, args.verbose_pairs) + "\n")
                if overlay_out is not None:
                    overlay_out.write(
                        overlay_to_json(report.frame_index, render_overlay(report)) + "\n"
                    )
                frames_done += 1
    log.info("processed %d frames", frames_done)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    scene = load_scene(args.scene)
    with _open_out(args.out) as detections_out, _open_out(args.truth) as truth_out:
        count = write_streams(scene, args.seed, detections_out, truth_out)
    log.info("simulated %d frames of %d persons", count, len(scene.persons))
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    if not args.threshold > 0:
        raise _UsageError("threshold must be positive")
    if not args.gate > 0:
        raise _UsageError("gate must be positive")
    if args.truth is None and args.edges is None:
        raise _UsageError("evaluate needs --truth, --edges, or both")
    pred = list(_read_jsonl(args.pred, parse_report_line, "report"))
    if args.edges is not None:
        # Hand labels own the violation scoring; a truth stream, when also
        # given, contributes only distance statistics and alignment counts.
        labels = list(_read_jsonl(args.edges, json.loads, "labels"))
        result = evaluate_with_edges(pred, labels)
        if args.truth is not None:
            truth = list(_read_jsonl(args.truth, parse_truth_line, "truth"))
            aligned = evaluate_reports(pred, truth, threshold_m=args.threshold, gate_px=args.gate)
            result = EvaluationResult(
                frames=result.frames,
                confusion=result.confusion,
                metrics_pct=result.metrics_pct,
                stats=aligned.stats,
                unmatched=aligned.unmatched,
            )
    else:
        truth = list(_read_jsonl(args.truth, parse_truth_line, "truth"))
        result = evaluate_reports(pred, truth, threshold_m=args.threshold, gate_px=args.gate)
    with _open_out(args.out) as out:
        out.write(result_to_json(result) + "\n")
    for line in format_metrics(result.metrics_pct).splitlines():
        log.info("%s", line)
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="sdmonitor",
        description=(
            "Measure person-to-person distances from monocular detection streams "
            "and report social-distance violations."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    cal = sub.add_parser("calibrate", help="derive the focal length from a marker detection")
    cal.add_argument("--detections", required=True, help="detection stream (JSONL)")
    cal.add_argument("--frame", type=int, required=True, help="frame index holding the marker")
    cal.add_argument("--det-index", type=int, required=True, help="marker's index within that frame")
    cal.add_argument("--marker-distance", type=float, required=True, help="camera-to-marker distance, metres")
    cal.add_argument("--known-width", type=float, default=DEFAULT_KNOWN_WIDTH_M,
                     help="marker's physical width, metres (default %(default)s)")
    cal.add_argument("--out", required=True, help="calibration file to write (JSON)")
    cal.set_defaults(func=_cmd_calibrate)

    run = sub.add_parser("run", help="measure distances and report violations")
    run.add_argument("--detections", required=True, help="detection stream (JSONL)")
    run.add_argument("--calibration", required=True, help="calibration file from 'calibrate'")
    run.add_argument("--out", required=True, help="report stream to write (JSONL), '-' for stdout")
    run.add_argument("--config", help="key=value settings file")
    run.add_argument("--threshold", type=float, help="violation distance, metres (default %s)" % DEFAULT_THRESHOLD_M)
    run.add_argument("--min-score", type=float, help="detection confidence floor (default %s)" % DEFAULT_MIN_SCORE)
    run.add_argument("--person-class", type=int, help="detector class id for persons (default %s)" % DEFAULT_PERSON_CLASS)
    run.add_argument("--max-disappeared", type=int, help="frames a track survives unmatched (default %s)" % DEFAULT_MAX_DISAPPEARED)
    run.add_argument("--max-match-distance", type=float, help="centroid match gate, pixels (default unlimited)")
    run.add_argument("--min-bbox-width", type=float, help="narrowest measurable box, pixels (default %s)" % DEFAULT_MIN_BBOX_WIDTH_PX)
    run.add_argument("--verbose-pairs", action="store_true", help="include intermediate terms in pair records")
    run.add_argument("--overlay", help="also write drawing instructions (JSONL)")
    run.add_argument("--jobs", type=int, default=1, help="worker count (processing is sequential; must be >= 1)")
    run.set_defaults(func=_cmd_run)

    sim = sub.add_parser("simulate", help="generate a synthetic detection stream with ground truth")
    sim.add_argument("--scene", required=True, help="scene description (TOML)")
    sim.add_argument("--seed", type=int, default=0, help="noise seed (default 0)")
    sim.add_argument("--out", required=True, help="detection stream to write (JSONL)")
    sim.add_argument("--truth", required=True, help="ground-truth stream to write (JSONL)")
    sim.set_defaults(func=_cmd_simulate)

    ev = sub.add_parser("evaluate", help="score a report stream against ground truth")
    ev.add_argument("--pred", required=True, help="report stream from 'run' (JSONL)")
    ev.add_argument("--truth", help="simulator ground-truth stream (JSONL)")
    ev.add_argument("--edges", help="hand-labelled violation edges (JSONL, track-id space)")
    ev.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD_M,
                    help="violation distance for truth pairs, metres (default %(default)s)")
    ev.add_argument("--gate", type=float, default=DEFAULT_ALIGN_GATE_PX,
                    help="identity alignment gate, pixels (default %(default)s)")
    ev.add_argument("--out", required=True, help="metrics file to write (JSON), '-' for stdout")
    ev.set_defaults(func=_cmd_evaluate)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"sdmonitor: error: {exc}", file=sys.stderr)
        return 1
    except (StreamFormatError, CalibrationError, SceneError, EvaluationError) as exc:
        print(f"sdmonitor: data error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"sdmonitor: data error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"sdmonitor: data error: invalid JSON: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
