"""Frame-by-frame orchestration: filter, track, measure, pair, report.

One report is produced per input frame. Persons whose boxes are too narrow to
measure are still reported (for tracking continuity) with a null depth, but
they take part in no pair geometry for that frame.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator

from .calibration import CameraCalibration
from .detections import (
    DEFAULT_MIN_SCORE,
    DEFAULT_PERSON_CLASS,
    BoundingBox,
    Frame,
    filter_people,
)
from .geometry import (
    DEFAULT_MIN_BBOX_WIDTH_PX,
    DEFAULT_THRESHOLD_M,
    PairMeasurement,
    all_pairs,
    measure_person,
)
from .tracker import DEFAULT_MAX_DISAPPEARED, CentroidTracker, centroid_of


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs for one processing run; defaults match the CLI defaults."""

    person_class: int = DEFAULT_PERSON_CLASS
    min_score: float = DEFAULT_MIN_SCORE
    max_disappeared: int = DEFAULT_MAX_DISAPPEARED
    max_match_distance: float | None = None
    threshold_m: float = DEFAULT_THRESHOLD_M
    min_bbox_width_px: float = DEFAULT_MIN_BBOX_WIDTH_PX


@dataclass(frozen=True)
class PersonReport:
    """One tracked person in one frame; depth is None when unmeasurable."""

    track_id: int
    bbox: BoundingBox
    depth_m: float | None


@dataclass(frozen=True)
class FrameReport:
    """Everything the pipeline concluded about one frame."""

    frame_index: int
    persons: tuple[PersonReport, ...]
    pairs: tuple[PairMeasurement, ...]
    violations: tuple[tuple[int, int], ...]
    image_width: int | None = None
    image_height: int | None = None


@dataclass(frozen=True)
class OverlayInstruction:
    """One primitive drawing step: kind is "box", "line", or "label"."""

    kind: str
    geometry: tuple[float, ...]
    text: str | None = None


def process_stream(
    frames: Iterable[Frame],
    calib: CameraCalibration,
    config: PipelineConfig | None = None,
) -> Iterator[FrameReport]:
    """Run the full measurement pipeline over a frame sequence.

    Tracking state persists across the stream, so identities survive short
    detection gaps. Reports come out in input order, one per frame.
    """
    if config is None:
        config = PipelineConfig()
    tracker = CentroidTracker(
        max_disappeared=config.max_disappeared,
        max_match_distance=config.max_match_distance,
    )
    for frame in frames:
        people = filter_people(frame, config.person_class, config.min_score)
        assignments = tracker.update(people)
        persons: list[PersonReport] = []
        measured = []
        for track_id, det in assignments:
            measurement = measure_person(calib, track_id, det.bbox, config.min_bbox_width_px)
            persons.append(
                PersonReport(
                    track_id=track_id,
                    bbox=det.bbox,
                    depth_m=None if measurement is None else measurement.depth_m,
                )
            )
            if measurement is not None:
                measured.append(measurement)
        pairs = tuple(all_pairs(calib, measured, config.threshold_m))
        violations = tuple((p.id_a, p.id_b) for p in pairs if p.violation)
        yield FrameReport(
            frame_index=frame.frame_index,
            persons=tuple(persons),
            pairs=pairs,
            violations=violations,
            image_width=frame.image_width,
            image_height=frame.image_height,
        )


def _clamp_point(x: float, y: float, report: FrameReport) -> tuple[float, float]:
    if report.image_width is not None:
        x = min(max(x, 0.0), float(report.image_width))
    if report.image_height is not None:
        y = min(max(y, 0.0), float(report.image_height))
    return x, y


def render_overlay(report: FrameReport) -> list[OverlayInstruction]:
    """Turn one report into drawing instructions for an annotated frame.

    Each person gets a box and an id label at its top-left corner; each
    violating pair gets a line between centroids and a distance label (two
    decimals, metres) at the midpoint. Label anchors are clamped into the
    image so text never renders off-frame.
    """
    instructions: list[OverlayInstruction] = []
    centroids: dict[int, tuple[float, float]] = {}
    for person in report.persons:
        box = person.bbox
        centroids[person.track_id] = centroid_of(box)
        instructions.append(
            OverlayInstruction(kind="box", geometry=(box.x1, box.y1, box.x2, box.y2))
        )
        label_at = _clamp_point(box.x1, box.y1, report)
        instructions.append(
            OverlayInstruction(kind="label", geometry=label_at, text=str(person.track_id))
        )
    distances = {(p.id_a, p.id_b): p.distance_m for p in report.pairs}
    for edge in report.violations:
        (xa, ya), (xb, yb) = centroids[edge[0]], centroids[edge[1]]
        instructions.append(OverlayInstruction(kind="line", geometry=(xa, ya, xb, yb)))
        mid = _clamp_point((xa + xb) / 2.0, (ya + yb) / 2.0, report)
        instructions.append(
            OverlayInstruction(kind="label", geometry=mid, text=f"{distances[edge]:.2f}")
        )
    return instructions


def report_to_json(report: FrameReport, verbose_pairs: bool = False) -> str:
    """Render one report as its wire-format line (no trailing newline).

    The base format carries ids, boxes, depths, pair distances, and the
    violation flag. ``verbose_pairs`` adds the intermediate terms behind each
    pair distance for debugging and auditing.
    """
    pairs = []
    for p in report.pairs:
        entry = {"a": p.id_a, "b": p.id_b, "d_m": p.distance_m, "violation": p.violation}
        if verbose_pairs:
            entry.update(
                {
                    "depth_delta_m": p.depth_delta_m,
                    "horiz_px": p.horiz_px,
                    "avg_width_px": p.avg_width_px,
                    "ppm": p.ppm,
                    "horiz_m": p.horiz_m,
                }
            )
        pairs.append(entry)
    payload = {
        "frame": report.frame_index,
        "persons": [
            {
                "id": person.track_id,
                "bbox": [person.bbox.x1, person.bbox.y1, person.bbox.x2, person.bbox.y2],
                "depth_m": person.depth_m,
            }
            for person in report.persons
        ],
        "pairs": pairs,
    }
    return json.dumps(payload, separators=(",", ":"))


def overlay_to_json(frame_index: int, instructions: list[OverlayInstruction]) -> str:
    """Render one frame's overlay instructions as a JSON line."""
    payload = {
        "frame": frame_index,
        "draw": [
            {"kind": ins.kind, "geometry": list(ins.geometry), "text": ins.text}
            for ins in instructions
        ],
    }
    return json.dumps(payload, separators=(",", ":"))


def parse_report_line(line: str | bytes) -> dict:
    """Parse one report line into a plain dict with validated shape.

    Used by the evaluator; tolerates the verbose pair fields by ignoring
    anything beyond the keys it needs.
    """
    if isinstance(line, bytes):
        line = line.decode("utf-8")
    payload = json.loads(line)
    if not isinstance(payload, dict) or {"frame", "persons", "pairs"} - payload.keys():
        raise ValueError("report line must carry frame, persons, and pairs")
    return payload
