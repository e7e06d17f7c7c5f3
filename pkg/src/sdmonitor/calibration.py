"""Focal length determination from a marker of known width at a known distance.

A person (or any object) of known physical width standing at a measured
distance from the camera appears with some pixel width in the image. Under a
pinhole model the effective focal length in pixels follows directly:

    focal_length_px = marker_distance_m * marker_width_px / known_width_m

That single number is all later depth estimation needs.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

from .detections import BoundingBox

DEFAULT_KNOWN_WIDTH_M = 0.55

_FIELDS = ("focal_length_px", "known_width_m", "marker_distance_m", "marker_width_px")


class CalibrationError(ValueError):
    """Invalid calibration parameters or an unreadable calibration file."""


@dataclass(frozen=True)
class CameraCalibration:
    """Pinhole calibration state, kept self-consistent by construction."""

    focal_length_px: float
    known_width_m: float
    marker_distance_m: float
    marker_width_px: float

    def __post_init__(self) -> None:
        for name in _FIELDS:
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise CalibrationError(f"{name} must be a number, got {value!r}")
            if not (math.isfinite(value) and value > 0):
                raise CalibrationError(f"{name} must be finite and positive, got {value!r}")
        expected = self.marker_distance_m * self.marker_width_px / self.known_width_m
        if not math.isclose(self.focal_length_px, expected, rel_tol=1e-9):
            raise CalibrationError(
                f"focal_length_px={self.focal_length_px} does not match the marker "
                f"measurements (expected {expected})"
            )


def bbox_width_px(bbox: BoundingBox) -> float:
    """Pixel width of a bounding box."""
    return bbox.x2 - bbox.x1


def calibrate(
    marker_bbox: BoundingBox,
    marker_distance_m: float,
    known_width_m: float = DEFAULT_KNOWN_WIDTH_M,
) -> CameraCalibration:
    """Derive the focal length from one marker observation.

    ``marker_bbox`` is the marker's detection box, ``marker_distance_m`` the
    measured camera-to-marker distance, ``known_width_m`` the marker's real
    width. Both distances must be positive.
    """
    if not (math.isfinite(marker_distance_m) and marker_distance_m > 0):
        raise CalibrationError(
            f"marker distance must be positive, got {marker_distance_m!r}"
        )
    if not (math.isfinite(known_width_m) and known_width_m > 0):
        raise CalibrationError(f"known width must be positive, got {known_width_m!r}")
    width_px = bbox_width_px(marker_bbox)
    focal = marker_distance_m * width_px / known_width_m
    return CameraCalibration(
        focal_length_px=focal,
        known_width_m=known_width_m,
        marker_distance_m=marker_distance_m,
        marker_width_px=width_px,
    )


def save_calibration(calib: CameraCalibration, path: str | os.PathLike) -> None:
    """Write a calibration to a JSON file."""
    payload = {name: getattr(calib, name) for name in _FIELDS}
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, separators=(",", ":"))
        handle.write("\n")


def load_calibration(path: str | os.PathLike) -> CameraCalibration:
    """Read a calibration JSON file, validating consistency on load."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except json.JSONDecodeError as exc:
        raise CalibrationError(f"calibration file {path} is not valid JSON: {exc.msg}") from exc
    if not isinstance(payload, dict):
        raise CalibrationError(f"calibration file {path} must hold a JSON object")
    missing = set(_FIELDS) - payload.keys()
    if missing:
        raise CalibrationError(f"calibration file {path} missing keys: {sorted(missing)}")
    return CameraCalibration(**{name: payload[name] for name in _FIELDS})
