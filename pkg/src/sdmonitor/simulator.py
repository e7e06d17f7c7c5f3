"""Synthetic pinhole-camera scenes with exact ground truth.

A scene places persons of known physical size on a flat ground plane in
camera coordinates (lateral metres, depth metres) and projects them through
an ideal pinhole camera at a known height, zero tilt. The exact projection is
computed first; optional noise (corner jitter, pixel quantization, detection
dropout) is layered on afterwards, so with all noise disabled the emitted
detection stream is exact and the measurement pipeline can be checked against
the scene's true geometry to float precision.

Generation is deterministic per (scene, seed): every frame derives its own
random generator from (seed, frame_index), so streams are reproducible and
frames are independent.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field
from typing import Callable, Iterator, TextIO

import numpy as np

from .detections import BoundingBox, Detection, Frame, serialize_frame

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

Trajectory = Callable[[int], tuple[float, float]]


class SceneError(ValueError):
    """A scene description that cannot be simulated."""


@dataclass(frozen=True)
class NoiseModel:
    """Detector imperfections applied after exact projection.

    jitter_px: standard deviation of Gaussian noise added to each box corner
    coordinate independently. pixel_quantization: round box coordinates to
    whole pixels. dropout_rate: probability that a visible person emits no
    detection in a given frame.
    """

    jitter_px: float = 0.0
    pixel_quantization: bool = False
    dropout_rate: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.jitter_px) and self.jitter_px >= 0):
            raise SceneError(f"jitter_px must be >= 0, got {self.jitter_px!r}")
        if not (0.0 <= self.dropout_rate < 1.0):
            raise SceneError(f"dropout_rate must be in [0, 1), got {self.dropout_rate!r}")

    @property
    def active(self) -> bool:
        return self.jitter_px > 0 or self.pixel_quantization or self.dropout_rate > 0


@dataclass(frozen=True)
class ScenePerson:
    """One simulated person: physical size plus a position per frame.

    ``positions`` holds (lateral_m, depth_m) camera-frame coordinates. A
    single entry means the person stands still; otherwise one entry per
    scene frame is required. A callable frame_index -> (x, z) is also
    accepted for scripted motion.
    """

    person_id: int
    width_m: float
    height_m: float
    positions: tuple[tuple[float, float], ...] | Trajectory

    def __post_init__(self) -> None:
        if not isinstance(self.person_id, int) or isinstance(self.person_id, bool):
            raise SceneError(f"person_id must be an integer, got {self.person_id!r}")
        for name in ("width_m", "height_m"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise SceneError(f"{name} must be positive, got {value!r}")
        if not callable(self.positions) and len(self.positions) == 0:
            raise SceneError("positions must not be empty")

    def position_at(self, frame_index: int) -> tuple[float, float]:
        if callable(self.positions):
            x, z = self.positions(frame_index)
        elif len(self.positions) == 1:
            x, z = self.positions[0]
        else:
            x, z = self.positions[frame_index]
        if not (math.isfinite(x) and math.isfinite(z)):
            raise SceneError(f"person {self.person_id} has non-finite position ({x}, {z})")
        if z <= 0:
            raise SceneError(
                f"person {self.person_id} is at depth {z} in frame {frame_index}; "
                "depth must be positive (in front of the camera)"
            )
        return float(x), float(z)


@dataclass(frozen=True)
class GroundTruthScene:
    """Full description of a synthetic capture."""

    focal_length_px: float
    image_width: int
    image_height: int
    frame_count: int
    persons: tuple[ScenePerson, ...]
    principal_point: tuple[float, float] | None = None
    camera_height_m: float = 1.6
    noise: NoiseModel = field(default_factory=NoiseModel)

    def __post_init__(self) -> None:
        if not (
            isinstance(self.focal_length_px, (int, float))
            and math.isfinite(self.focal_length_px)
            and self.focal_length_px > 0
        ):
            raise SceneError(f"focal_length_px must be positive, got {self.focal_length_px!r}")
        for name in ("image_width", "image_height"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
                raise SceneError(f"{name} must be a positive integer, got {value!r}")
        if not isinstance(self.frame_count, int) or self.frame_count <= 0:
            raise SceneError(f"frame_count must be a positive integer, got {self.frame_count!r}")
        if not (math.isfinite(self.camera_height_m) and self.camera_height_m > 0):
            raise SceneError(f"camera_height_m must be positive, got {self.camera_height_m!r}")
        ids = [p.person_id for p in self.persons]
        if len(set(ids)) != len(ids):
            raise SceneError(f"person ids must be distinct, got {ids}")
        for person in self.persons:
            if not callable(person.positions) and len(person.positions) not in (1, self.frame_count):
                raise SceneError(
                    f"person {person.person_id} has {len(person.positions)} positions "
                    f"for a {self.frame_count}-frame scene"
                )

    @property
    def center(self) -> tuple[float, float]:
        if self.principal_point is not None:
            return self.principal_point
        return (self.image_width / 2.0, self.image_height / 2.0)


@dataclass(frozen=True)
class TruthPerson:
    """A person's exact state in one frame: world position and projection."""

    person_id: int
    lateral_m: float
    depth_m: float
    centroid_u_px: float
    centroid_v_px: float


@dataclass(frozen=True)
class TruthPair:
    """Exact ground-plane separation of one person pair."""

    id_a: int
    id_b: int
    distance_m: float


@dataclass(frozen=True)
class GroundTruthRecord:
    """Everything true about one frame, independent of any detector."""

    frame_index: int
    persons: tuple[TruthPerson, ...]
    pairs: tuple[TruthPair, ...]


def _exact_box(
    scene: GroundTruthScene, person: ScenePerson, x: float, z: float
) -> tuple[float, float, float, float, float, float]:
    """Exact projected box corners plus centroid (u, v) for one person."""
    cx, cy = scene.center
    f = scene.focal_length_px
    width_px = f * person.width_m / z
    u = cx + f * x / z
    y_bottom = cy + f * scene.camera_height_m / z
    y_top = y_bottom - f * person.height_m / z
    x1 = u - width_px / 2.0
    x2 = u + width_px / 2.0
    v = (y_top + y_bottom) / 2.0
    return x1, y_top, x2, y_bottom, u, v


def _in_view(scene: GroundTruthScene, x1: float, y1: float, x2: float, y2: float) -> bool:
    return x1 >= 0 and y1 >= 0 and x2 <= scene.image_width and y2 <= scene.image_height


def truth_record(scene: GroundTruthScene, frame_index: int) -> GroundTruthRecord:
    """Exact per-frame ground truth: positions, projections, pair distances.

    Separations are recorded raw; consumers apply their own threshold.
    """
    persons = []
    for person in scene.persons:
        x, z = person.position_at(frame_index)
        _, _, _, _, u, v = _exact_box(scene, person, x, z)
        persons.append(
            TruthPerson(
                person_id=person.person_id,
                lateral_m=x,
                depth_m=z,
                centroid_u_px=u,
                centroid_v_px=v,
            )
        )
    ordered = sorted(persons, key=lambda p: p.person_id)
    pairs = tuple(
        TruthPair(
            id_a=a.person_id,
            id_b=b.person_id,
            distance_m=math.hypot(b.lateral_m - a.lateral_m, b.depth_m - a.depth_m),
        )
        for i, a in enumerate(ordered)
        for b in ordered[i + 1 :]
    )
    return GroundTruthRecord(frame_index=frame_index, persons=tuple(persons), pairs=pairs)


def project(scene: GroundTruthScene, frame_index: int, seed: int = 0) -> Frame:
    """Render one frame's detection set.

    Persons whose exact box does not lie fully inside the image emit no
    detection. Noise is applied after exact projection: corner jitter, then
    pixel quantization, then a clamp back to the image; boxes that a noisy
    corner collapses are dropped, mirroring what a real detector's rejected
    outputs would look like downstream.
    """
    if not (0 <= frame_index < scene.frame_count):
        raise SceneError(
            f"frame_index {frame_index} outside scene of {scene.frame_count} frames"
        )
    rng = np.random.default_rng((seed, frame_index)) if scene.noise.active else None
    detections: list[Detection] = []
    for person in scene.persons:
        x, z = person.position_at(frame_index)
        x1, y1, x2, y2, _, _ = _exact_box(scene, person, x, z)
        if not _in_view(scene, x1, y1, x2, y2):
            continue
        if rng is not None and scene.noise.dropout_rate > 0:
            if rng.random() < scene.noise.dropout_rate:
                continue
        if rng is not None and scene.noise.jitter_px > 0:
            jitter = rng.normal(0.0, scene.noise.jitter_px, size=4)
            x1, y1, x2, y2 = x1 + jitter[0], y1 + jitter[1], x2 + jitter[2], y2 + jitter[3]
        if scene.noise.pixel_quantization:
            x1, y1, x2, y2 = round(x1), round(y1), round(x2), round(y2)
        x1 = min(max(x1, 0.0), float(scene.image_width))
        x2 = min(max(x2, 0.0), float(scene.image_width))
        y1 = min(max(y1, 0.0), float(scene.image_height))
        y2 = min(max(y2, 0.0), float(scene.image_height))
        if x2 <= x1 or y2 <= y1:
            continue
        detections.append(
            Detection(
                bbox=BoundingBox(float(x1), float(y1), float(x2), float(y2)),
                class_id=1,
                score=1.0,
                mask=None,
            )
        )
    return Frame(
        frame_index=frame_index,
        timestamp_s=None,
        image_width=scene.image_width,
        image_height=scene.image_height,
        detections=tuple(detections),
    )


def generate(
    scene: GroundTruthScene, seed: int = 0
) -> Iterator[tuple[Frame, GroundTruthRecord]]:
    """Yield (detections, ground truth) for every frame of the scene."""
    for frame_index in range(scene.frame_count):
        yield project(scene, frame_index, seed), truth_record(scene, frame_index)


def truth_to_json(record: GroundTruthRecord) -> str:
    """Render one truth record as its wire-format line (no trailing newline)."""
    payload = {
        "frame": record.frame_index,
        "persons": [
            {
                "pid": p.person_id,
                "x_m": p.lateral_m,
                "z_m": p.depth_m,
                "u_px": p.centroid_u_px,
                "v_px": p.centroid_v_px,
            }
            for p in record.persons
        ],
        "pairs": [{"a": p.id_a, "b": p.id_b, "d_m": p.distance_m} for p in record.pairs],
    }
    return json.dumps(payload, separators=(",", ":"))


def parse_truth_line(line: str | bytes) -> dict:
    """Parse one truth line into a plain dict with validated shape."""
    if isinstance(line, bytes):
        line = line.decode("utf-8")
    payload = json.loads(line)
    if not isinstance(payload, dict) or {"frame", "persons", "pairs"} - payload.keys():
        raise ValueError("truth line must carry frame, persons, and pairs")
    return payload


def write_streams(
    scene: GroundTruthScene, seed: int, detections_out: TextIO, truth_out: TextIO
) -> int:
    """Write paired detection and truth streams; returns the frame count."""
    count = 0
    for frame, record in generate(scene, seed):
        detections_out.write(serialize_frame(frame) + "\n")
        truth_out.write(truth_to_json(record) + "\n")
        count += 1
    return count


def _positions_from_table(raw: object, context: str) -> tuple[tuple[float, float], ...]:
    def as_pair(entry: object) -> tuple[float, float]:
        if (
            not isinstance(entry, (list, tuple))
            or len(entry) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry)
        ):
            raise SceneError(f"{context}: positions must be [x_m, z_m] number pairs")
        return float(entry[0]), float(entry[1])

    if isinstance(raw, list) and raw and isinstance(raw[0], (list, tuple)):
        return tuple(as_pair(entry) for entry in raw)
    return (as_pair(raw),)


def load_scene(path: str) -> GroundTruthScene:
    """Read a scene description from a TOML file.

    Top level: focal_length_px, image_width, image_height, frame_count, and
    optionally principal_point = [cx, cy], camera_height_m, and a [noise]
    table. Each [[persons]] table needs id, width_m, height_m, and either
    position = [x_m, z_m] or path = [[x_m, z_m], ...] with one entry per
    frame.
    """
    try:
        with open(path, "rb") as handle:
            raw = tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise SceneError(f"scene file {path} is not valid TOML: {exc}") from exc

    required = {"focal_length_px", "image_width", "image_height", "frame_count", "persons"}
    missing = required - raw.keys()
    if missing:
        raise SceneError(f"scene file {path} missing keys: {sorted(missing)}")

    persons = []
    for i, entry in enumerate(raw["persons"]):
        if not isinstance(entry, dict):
            raise SceneError(f"persons[{i}] must be a table")
        for key in ("id", "width_m", "height_m"):
            if key not in entry:
                raise SceneError(f"persons[{i}] missing key {key!r}")
        if "position" in entry and "path" in entry:
            raise SceneError(f"persons[{i}] must give either position or path, not both")
        if "position" in entry:
            positions = _positions_from_table(entry["position"], f"persons[{i}]")
        elif "path" in entry:
            positions = _positions_from_table(entry["path"], f"persons[{i}]")
        else:
            raise SceneError(f"persons[{i}] needs a position or a path")
        persons.append(
            ScenePerson(
                person_id=entry["id"],
                width_m=entry["width_m"],
                height_m=entry["height_m"],
                positions=positions,
            )
        )

    noise_raw = raw.get("noise", {})
    if not isinstance(noise_raw, dict):
        raise SceneError("noise must be a table")
    allowed = {"jitter_px", "pixel_quantization", "dropout_rate"}
    unknown = noise_raw.keys() - allowed
    if unknown:
        raise SceneError(f"unknown noise keys: {sorted(unknown)}")
    noise = NoiseModel(
        jitter_px=noise_raw.get("jitter_px", 0.0),
        pixel_quantization=noise_raw.get("pixel_quantization", False),
        dropout_rate=noise_raw.get("dropout_rate", 0.0),
    )

    principal = raw.get("principal_point")
    if principal is not None:
        if (
            not isinstance(principal, list)
            or len(principal) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in principal)
        ):
            raise SceneError("principal_point must be [cx, cy]")
        principal = (float(principal[0]), float(principal[1]))

    return GroundTruthScene(
        focal_length_px=raw["focal_length_px"],
        image_width=raw["image_width"],
        image_height=raw["image_height"],
        frame_count=raw["frame_count"],
        persons=tuple(persons),
        principal_point=principal,
        camera_height_m=raw.get("camera_height_m", 1.6),
        noise=noise,
    )
