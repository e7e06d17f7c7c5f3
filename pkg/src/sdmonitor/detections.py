"""Detection stream ingestion: parsing, validation, and person filtering.

The wire format is line-delimited JSON, one frame per line:

    {"frame": 0, "t": 0.0, "w": 1920, "h": 1080,
     "dets": [{"bbox": [x1, y1, x2, y2], "class": 1, "score": 0.95, "mask": null}, ...]}

Frame indices must be strictly increasing. Boxes are clamped to the image on
ingest; records that are unusable after clamping are rejected individually and
reported through a callback rather than aborting the stream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Iterator

DEFAULT_PERSON_CLASS = 1
DEFAULT_MIN_SCORE = 0.7


class StreamFormatError(ValueError):
    """A detection stream line that cannot be interpreted at all."""


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned pixel box; (x1, y1) top-left, (x2, y2) bottom-right."""

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self) -> None:
        for name in ("x1", "y1", "x2", "y2"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValueError(f"bbox {name} must be a number, got {value!r}")
            if not math.isfinite(value):
                raise ValueError(f"bbox {name} must be finite, got {value!r}")
            if value < 0:
                raise ValueError(f"bbox {name} must be non-negative, got {value!r}")
        if not self.x2 > self.x1:
            raise ValueError(f"bbox needs x2 > x1, got x1={self.x1}, x2={self.x2}")
        if not self.y2 > self.y1:
            raise ValueError(f"bbox needs y2 > y1, got y1={self.y1}, y2={self.y2}")

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1


@dataclass(frozen=True)
class Detection:
    """One detector output: a box, a class id, a confidence, an opaque mask.

    Masks are carried through untouched; nothing in this package decodes them.
    """

    bbox: BoundingBox
    class_id: int
    score: float
    mask: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.class_id, int) or isinstance(self.class_id, bool):
            raise ValueError(f"class id must be an integer, got {self.class_id!r}")
        if not isinstance(self.score, (int, float)) or isinstance(self.score, bool):
            raise ValueError(f"score must be a number, got {self.score!r}")
        if not (math.isfinite(self.score) and 0.0 <= self.score <= 1.0):
            raise ValueError(f"score must be within [0, 1], got {self.score!r}")
        if self.mask is not None and not isinstance(self.mask, str):
            raise ValueError(f"mask must be a string or None, got {self.mask!r}")


@dataclass(frozen=True)
class Frame:
    """All detections for one image, with the image geometry they live in."""

    frame_index: int
    timestamp_s: float | None
    image_width: int
    image_height: int
    detections: tuple[Detection, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.frame_index, int) or isinstance(self.frame_index, bool):
            raise ValueError(f"frame index must be an integer, got {self.frame_index!r}")
        if self.frame_index < 0:
            raise ValueError(f"frame index must be non-negative, got {self.frame_index}")
        for name in ("image_width", "image_height"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.timestamp_s is not None and not math.isfinite(self.timestamp_s):
            raise ValueError(f"timestamp must be finite or None, got {self.timestamp_s!r}")
        for det in self.detections:
            box = det.bbox
            if box.x2 > self.image_width or box.y2 > self.image_height:
                raise ValueError(
                    f"bbox {box} exceeds image bounds "
                    f"{self.image_width}x{self.image_height}"
                )


@dataclass(frozen=True)
class RejectedRecord:
    """Report of a single detection record dropped during parsing."""

    line_number: int
    frame_index: int
    det_index: int
    reason: str


def _clamp_box(raw: list, width: int, height: int) -> BoundingBox:
    """Validate raw bbox coordinates and clamp them to the image.

    Raises ValueError with a reason when the record is unusable.
    """
    if not isinstance(raw, list) or len(raw) != 4:
        raise ValueError("bbox must be a list of four numbers")
    coords = []
    for value in raw:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ValueError("bbox must be a list of four numbers")
        if not math.isfinite(value):
            raise ValueError("bbox coordinates must be finite")
        coords.append(float(value))
    x1, y1, x2, y2 = coords
    if x2 <= x1 or y2 <= y1:
        raise ValueError("bbox is empty (x2 <= x1 or y2 <= y1)")
    x1 = min(max(x1, 0.0), float(width))
    x2 = min(max(x2, 0.0), float(width))
    y1 = min(max(y1, 0.0), float(height))
    y2 = min(max(y2, 0.0), float(height))
    if x2 <= x1 or y2 <= y1:
        raise ValueError("bbox collapsed to zero area when clamped to the image")
    return BoundingBox(x1, y1, x2, y2)


def _parse_detection(raw: object, width: int, height: int) -> Detection:
    if not isinstance(raw, dict):
        raise ValueError("detection record must be an object")
    missing = {"bbox", "class", "score"} - raw.keys()
    if missing:
        raise ValueError(f"detection record missing keys: {sorted(missing)}")
    bbox = _clamp_box(raw["bbox"], width, height)
    class_id = raw["class"]
    score = raw["score"]
    mask = raw.get("mask")
    if not isinstance(class_id, int) or isinstance(class_id, bool):
        raise ValueError("class must be an integer")
    if not isinstance(score, (int, float)) or isinstance(score, bool):
        raise ValueError("score must be a number")
    if not (math.isfinite(score) and 0.0 <= score <= 1.0):
        raise ValueError(f"score must be within [0, 1], got {score!r}")
    if mask is not None and not isinstance(mask, str):
        raise ValueError("mask must be a string or null")
    return Detection(bbox=bbox, class_id=class_id, score=float(score), mask=mask)


def parse_stream(
    lines: Iterable[str | bytes],
    on_reject: Callable[[RejectedRecord], None] | None = None,
) -> Iterator[Frame]:
    """Parse a detection stream into Frame values, one per non-blank line.

    Line-level problems (bad JSON, missing or mistyped frame fields, frame
    indices that do not strictly increase) raise StreamFormatError with the
    line number. Problems scoped to a single detection record drop just that
    record and notify ``on_reject`` when given.
    """
    last_index: int | None = None
    for line_number, line in enumerate(lines, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        if not line.strip():
            continue
        try:
            payload = json.loads(line)
        except json.JSONDecodeError as exc:
            raise StreamFormatError(f"malformed line {line_number}: {exc.msg}") from exc
        if not isinstance(payload, dict):
            raise StreamFormatError(f"malformed line {line_number}: expected an object")
        missing = {"frame", "t", "w", "h", "dets"} - payload.keys()
        if missing:
            raise StreamFormatError(
                f"malformed line {line_number}: missing keys {sorted(missing)}"
            )
        index = payload["frame"]
        width = payload["w"]
        height = payload["h"]
        timestamp = payload["t"]
        dets = payload["dets"]
        if not isinstance(index, int) or isinstance(index, bool) or index < 0:
            raise StreamFormatError(
                f"malformed line {line_number}: frame must be a non-negative integer"
            )
        for name, value in (("w", width), ("h", height)):
            if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
                raise StreamFormatError(
                    f"malformed line {line_number}: {name} must be a positive integer"
                )
        if timestamp is not None:
            if not isinstance(timestamp, (int, float)) or isinstance(timestamp, bool):
                raise StreamFormatError(
                    f"malformed line {line_number}: t must be a number or null"
                )
            timestamp = float(timestamp)
        if not isinstance(dets, list):
            raise StreamFormatError(f"malformed line {line_number}: dets must be a list")
        if last_index is not None and index <= last_index:
            raise StreamFormatError(f"non-monotonic frame index at line {line_number}")
        last_index = index

        kept: list[Detection] = []
        for det_index, raw in enumerate(dets):
            try:
                kept.append(_parse_detection(raw, width, height))
            except ValueError as exc:
                if on_reject is not None:
                    on_reject(RejectedRecord(line_number, index, det_index, str(exc)))
        yield Frame(
            frame_index=index,
            timestamp_s=timestamp,
            image_width=width,
            image_height=height,
            detections=tuple(kept),
        )


def serialize_frame(frame: Frame) -> str:
    """Render one frame as its wire-format line (no trailing newline)."""
    payload = {
        "frame": frame.frame_index,
        "t": frame.timestamp_s,
        "w": frame.image_width,
        "h": frame.image_height,
        "dets": [
            {
                "bbox": [d.bbox.x1, d.bbox.y1, d.bbox.x2, d.bbox.y2],
                "class": d.class_id,
                "score": d.score,
                "mask": d.mask,
            }
            for d in frame.detections
        ],
    }
    return json.dumps(payload, separators=(",", ":"))


def serialize_stream(frames: Iterable[Frame]) -> Iterator[str]:
    """Yield wire-format lines for a frame sequence."""
    for frame in frames:
        yield serialize_frame(frame)


def filter_people(
    frame: Frame,
    person_class: int = DEFAULT_PERSON_CLASS,
    min_score: float = DEFAULT_MIN_SCORE,
) -> Frame:
    """Keep only person-class detections at or above the score floor.

    Order is preserved and the input frame is left untouched.
    """
    if not (0.0 <= min_score <= 1.0):
        raise ValueError(f"min_score must be within [0, 1], got {min_score!r}")
    kept = tuple(
        d
        for d in frame.detections
        if d.class_id == person_class and d.score >= min_score
    )
    return replace(frame, detections=kept)
