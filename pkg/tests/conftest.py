"""Shared builders for the test suite."""

from __future__ import annotations

import json

from hypothesis import settings

from sdmonitor import BoundingBox, Detection, Frame

# Wall-clock deadlines make property tests flaky on loaded machines.
settings.register_profile("no_deadline", deadline=None)
settings.load_profile("no_deadline")


def det(x1, y1, x2, y2, class_id=1, score=0.95, mask=None):
    return Detection(bbox=BoundingBox(x1, y1, x2, y2), class_id=class_id, score=score, mask=mask)


def frame(index, dets=(), w=1920, h=1080, t=None):
    return Frame(
        frame_index=index,
        timestamp_s=t,
        image_width=w,
        image_height=h,
        detections=tuple(dets),
    )


def stream_line(frame_index, dets, w=1920, h=1080, t=None):
    """Raw wire-format line from plain dict detection specs."""
    return json.dumps({"frame": frame_index, "t": t, "w": w, "h": h, "dets": list(dets)})


def raw_det(bbox, class_id=1, score=0.95, mask=None):
    return {"bbox": list(bbox), "class": class_id, "score": score, "mask": mask}
