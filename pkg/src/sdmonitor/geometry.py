"""Per-person depth and pairwise metric distance from calibrated boxes.

Depth comes from the apparent width of a person's box: under the pinhole
model, depth = focal_length_px * known_width_m / width_px. Pair distance
combines the depth gap with the horizontal pixel gap converted to metres via
the pair's mean box width (pixels per metre). The vertical image coordinate
is deliberately ignored; people are assumed to stand on a common ground
plane, so their separation lives in the horizontal/depth plane.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable

from .calibration import CameraCalibration, bbox_width_px
from .detections import BoundingBox

DEFAULT_THRESHOLD_M = 1.8
DEFAULT_MIN_BBOX_WIDTH_PX = 2.0


@dataclass(frozen=True)
class PersonDistance:
    """One person's measured quantities for a single frame."""

    track_id: int
    depth_m: float
    width_px: float
    centroid_x: float


@dataclass(frozen=True)
class PairMeasurement:
    """Metric separation of one person pair, with the intermediate terms.

    ``id_a`` < ``id_b`` always; the measurement is symmetric in its inputs.
    """

    id_a: int
    id_b: int
    depth_delta_m: float
    horiz_px: float
    avg_width_px: float
    ppm: float
    horiz_m: float
    distance_m: float
    violation: bool


def estimate_depth(
    calib: CameraCalibration,
    bbox: BoundingBox,
    min_width_px: float = DEFAULT_MIN_BBOX_WIDTH_PX,
) -> float | None:
    """Depth in metres from box width, or None when the box is too narrow.

    Boxes under ``min_width_px`` wide carry almost no depth signal and would
    produce wild estimates, so they are rejected rather than guessed at.
    """
    if not min_width_px > 0:
        raise ValueError(f"min_width_px must be positive, got {min_width_px!r}")
    width = bbox_width_px(bbox)
    if width < min_width_px:
        return None
    return calib.focal_length_px * calib.known_width_m / width


def measure_person(
    calib: CameraCalibration,
    track_id: int,
    bbox: BoundingBox,
    min_width_px: float = DEFAULT_MIN_BBOX_WIDTH_PX,
) -> PersonDistance | None:
    """Bundle a person's depth, width, and horizontal centroid, if measurable."""
    depth = estimate_depth(calib, bbox, min_width_px)
    if depth is None:
        return None
    return PersonDistance(
        track_id=track_id,
        depth_m=depth,
        width_px=bbox_width_px(bbox),
        centroid_x=(bbox.x1 + bbox.x2) / 2.0,
    )


def pair_distance(
    calib: CameraCalibration,
    a: PersonDistance,
    b: PersonDistance,
    threshold_m: float = DEFAULT_THRESHOLD_M,
) -> PairMeasurement:
    """Metric distance between two measured persons, flagged if too close.

    The horizontal pixel gap between centroids is converted to metres with
    the pair's mean box width as the pixel-per-metre scale, then combined
    with the absolute depth difference by Euclidean norm. A pair violates
    only when strictly closer than the threshold; sitting exactly on the
    threshold is compliant.
    """
    if a.track_id == b.track_id:
        raise ValueError(f"pair needs two distinct track ids, got {a.track_id} twice")
    if not (math.isfinite(threshold_m) and threshold_m > 0):
        raise ValueError(f"threshold must be positive, got {threshold_m!r}")
    if a.track_id > b.track_id:
        a, b = b, a
    depth_delta_m = abs(b.depth_m - a.depth_m)
    horiz_px = abs(b.centroid_x - a.centroid_x)
    avg_width_px = (a.width_px + b.width_px) / 2.0
    ppm = avg_width_px / calib.known_width_m
    horiz_m = horiz_px / ppm
    distance_m = math.hypot(horiz_m, depth_delta_m)
    return PairMeasurement(
        id_a=a.track_id,
        id_b=b.track_id,
        depth_delta_m=depth_delta_m,
        horiz_px=horiz_px,
        avg_width_px=avg_width_px,
        ppm=ppm,
        horiz_m=horiz_m,
        distance_m=distance_m,
        violation=distance_m < threshold_m,
    )


def all_pairs(
    calib: CameraCalibration,
    persons: Iterable[PersonDistance],
    threshold_m: float = DEFAULT_THRESHOLD_M,
) -> list[PairMeasurement]:
    """Measure every unordered pair, in lexicographic (id_a, id_b) order."""
    ordered = sorted(persons, key=lambda p: p.track_id)
    ids = [p.track_id for p in ordered]
    if len(set(ids)) != len(ids):
        raise ValueError(f"persons must carry distinct track ids, got {ids}")
    return [
        pair_distance(calib, a, b, threshold_m)
        for a, b in itertools.combinations(ordered, 2)
    ]
