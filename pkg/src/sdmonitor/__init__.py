"""Monocular social-distance monitoring from object-detection streams.

The measurement chain: parse detector output, keep confident person
detections, track identities across frames by centroid, turn box widths into
depths via a one-shot focal-length calibration, combine depth gaps with
horizontal pixel gaps into metric pair distances, and flag pairs closer than
a threshold. A pinhole-camera simulator provides exact synthetic ground truth
and an evaluator scores reported violations and distances against it.
"""

from .calibration import (
    DEFAULT_KNOWN_WIDTH_M,
    CalibrationError,
    CameraCalibration,
    bbox_width_px,
    calibrate,
    load_calibration,
    save_calibration,
)
from .detections import (
    DEFAULT_MIN_SCORE,
    DEFAULT_PERSON_CLASS,
    BoundingBox,
    Detection,
    Frame,
    RejectedRecord,
    StreamFormatError,
    filter_people,
    parse_stream,
    serialize_frame,
    serialize_stream,
)
from .evaluator import (
    DEFAULT_ALIGN_GATE_PX,
    ConfusionCounts,
    DistanceStats,
    EvaluationError,
    EvaluationResult,
    confusion_from_edges,
    distance_stats,
    evaluate_reports,
    evaluate_with_edges,
    format_metrics,
    match_identities,
    metrics,
    percent_error,
    result_to_json,
)
from .geometry import (
    DEFAULT_MIN_BBOX_WIDTH_PX,
    DEFAULT_THRESHOLD_M,
    PairMeasurement,
    PersonDistance,
    all_pairs,
    estimate_depth,
    measure_person,
    pair_distance,
)
from .pipeline import (
    FrameReport,
    OverlayInstruction,
    PersonReport,
    PipelineConfig,
    overlay_to_json,
    parse_report_line,
    process_stream,
    render_overlay,
    report_to_json,
)
from .simulator import (
    GroundTruthRecord,
    GroundTruthScene,
    NoiseModel,
    SceneError,
    ScenePerson,
    TruthPair,
    TruthPerson,
    generate,
    load_scene,
    parse_truth_line,
    project,
    truth_record,
    truth_to_json,
    write_streams,
)
from .tracker import DEFAULT_MAX_DISAPPEARED, CentroidTracker, Track, centroid_of

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BoundingBox",
    "CalibrationError",
    "CameraCalibration",
    "CentroidTracker",
    "ConfusionCounts",
    "DEFAULT_ALIGN_GATE_PX",
    "DEFAULT_KNOWN_WIDTH_M",
    "DEFAULT_MAX_DISAPPEARED",
    "DEFAULT_MIN_BBOX_WIDTH_PX",
    "DEFAULT_MIN_SCORE",
    "DEFAULT_PERSON_CLASS",
    "DEFAULT_THRESHOLD_M",
    "Detection",
    "DistanceStats",
    "EvaluationError",
    "EvaluationResult",
    "Frame",
    "FrameReport",
    "GroundTruthRecord",
    "GroundTruthScene",
    "NoiseModel",
    "OverlayInstruction",
    "PairMeasurement",
    "PersonDistance",
    "PersonReport",
    "PipelineConfig",
    "RejectedRecord",
    "SceneError",
    "ScenePerson",
    "StreamFormatError",
    "Track",
    "TruthPair",
    "TruthPerson",
    "all_pairs",
    "bbox_width_px",
    "calibrate",
    "centroid_of",
    "confusion_from_edges",
    "distance_stats",
    "estimate_depth",
    "evaluate_reports",
    "evaluate_with_edges",
    "filter_people",
    "format_metrics",
    "generate",
    "load_calibration",
    "load_scene",
    "match_identities",
    "measure_person",
    "metrics",
    "overlay_to_json",
    "pair_distance",
    "parse_report_line",
    "parse_stream",
    "parse_truth_line",
    "percent_error",
    "process_stream",
    "project",
    "render_overlay",
    "report_to_json",
    "result_to_json",
    "save_calibration",
    "serialize_frame",
    "serialize_stream",
    "truth_record",
    "truth_to_json",
    "write_streams",
]
