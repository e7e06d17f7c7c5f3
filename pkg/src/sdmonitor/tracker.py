"""Persistent identity assignment across frames by nearest-centroid matching.

Matching is greedy over all (track, detection) pairs sorted by ascending
centroid distance, with ties broken by lower track id and then lower detection
index, so results are deterministic for identical inputs. Tracks that miss a
frame survive for a configurable number of misses before being dropped; their
ids are never reused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .detections import BoundingBox, Detection, Frame

DEFAULT_MAX_DISAPPEARED = 30


def centroid_of(bbox: BoundingBox) -> tuple[float, float]:
    """Midpoint of a bounding box."""
    return ((bbox.x1 + bbox.x2) / 2.0, (bbox.y1 + bbox.y2) / 2.0)


@dataclass
class Track:
    """Mutable state of one tracked identity."""

    track_id: int
    centroid: tuple[float, float]
    bbox: BoundingBox
    disappeared_count: int
    last_seen_frame: int


class CentroidTracker:
    """Assigns stable integer ids to detections across a frame sequence.

    ``max_disappeared`` is how many consecutive missed frames a track
    tolerates before it is dropped. ``max_match_distance`` optionally caps the
    centroid distance a match may span; None means unlimited.
    """

    def __init__(
        self,
        max_disappeared: int = DEFAULT_MAX_DISAPPEARED,
        max_match_distance: float | None = None,
    ) -> None:
        if max_disappeared < 0:
            raise ValueError(f"max_disappeared must be >= 0, got {max_disappeared}")
        if max_match_distance is not None and not max_match_distance > 0:
            raise ValueError(
                f"max_match_distance must be positive or None, got {max_match_distance!r}"
            )
        self.max_disappeared = max_disappeared
        self.max_match_distance = max_match_distance
        self.tracks: dict[int, Track] = {}
        self._next_id = 0

    def _register(self, centroid: tuple[float, float], det: Detection, frame_index: int) -> int:
        track_id = self._next_id
        self._next_id += 1
        self.tracks[track_id] = Track(
            track_id=track_id,
            centroid=centroid,
            bbox=det.bbox,
            disappeared_count=0,
            last_seen_frame=frame_index,
        )
        return track_id

    def update(self, frame: Frame) -> list[tuple[int, Detection]]:
        """Consume one frame, return (track_id, detection) pairs sorted by id.

        Every detection in the frame appears exactly once in the result,
        either matched to an existing track or registered under a fresh id.
        Tracks with no detection this frame age by one and are dropped once
        their miss count exceeds max_disappeared.
        """
        detections = frame.detections
        det_centroids = [centroid_of(d.bbox) for d in detections]

        candidates = sorted(
            (math.dist(track.centroid, det_centroids[j]), track_id, j)
            for track_id, track in self.tracks.items()
            for j in range(len(detections))
        )

        matched_tracks: set[int] = set()
        matched_dets: set[int] = set()
        assignments: list[tuple[int, Detection]] = []
        for distance, track_id, j in candidates:
            if self.max_match_distance is not None and distance > self.max_match_distance:
                break
            if track_id in matched_tracks or j in matched_dets:
                continue
            track = self.tracks[track_id]
            track.centroid = det_centroids[j]
            track.bbox = detections[j].bbox
            track.disappeared_count = 0
            track.last_seen_frame = frame.frame_index
            matched_tracks.add(track_id)
            matched_dets.add(j)
            assignments.append((track_id, detections[j]))

        for track_id in list(self.tracks):
            if track_id in matched_tracks:
                continue
            track = self.tracks[track_id]
            track.disappeared_count += 1
            if track.disappeared_count > self.max_disappeared:
                del self.tracks[track_id]

        for j, det in enumerate(detections):
            if j in matched_dets:
                continue
            track_id = self._register(det_centroids[j], det, frame.frame_index)
            assignments.append((track_id, det))

        assignments.sort(key=lambda pair: pair[0])
        return assignments
