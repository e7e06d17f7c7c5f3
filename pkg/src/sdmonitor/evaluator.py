"""Scoring of violation reports against ground truth, plus accuracy stats.

Violation detection is scored as binary classification over person pairs:
each pair in each frame either is or is not flagged, and either truly is or
is not closer than the threshold. Reported track ids and ground-truth person
ids live in different id spaces, so frames are first aligned by greedy
nearest-centroid matching in pixel space; only pairs whose both members
matched enter the scoring universe, and everything dropped is counted and
reported rather than silently ignored.
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .geometry import DEFAULT_THRESHOLD_M

DEFAULT_ALIGN_GATE_PX = 50.0

Edge = tuple[int, int]


class EvaluationError(ValueError):
    """Inputs that cannot be scored: misaligned frames or out-of-universe edges."""


@dataclass(frozen=True)
class ConfusionCounts:
    """Pairwise violation classification tallies."""

    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self) -> None:
        for name in ("tp", "fp", "tn", "fn"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {value!r}")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def _normalize_edge(edge: Sequence[int], context: str) -> Edge:
    a, b = edge
    if a == b:
        raise EvaluationError(f"{context}: edge ({a}, {b}) joins an id to itself")
    return (a, b) if a < b else (b, a)


def confusion_from_edges(
    predicted: Mapping[int, Iterable[Edge]],
    truth: Mapping[int, Iterable[Edge]],
    universe: Mapping[int, Iterable[Edge]],
) -> ConfusionCounts:
    """Tally pair classifications across frames.

    All three mappings are keyed by frame index and must cover exactly the
    same frames. Predicted and truth edges must lie inside that frame's
    universe of scoreable pairs; anything else is an error, not a skip.
    """
    if set(predicted) != set(truth) or set(predicted) != set(universe):
        raise EvaluationError(
            "predicted, truth, and universe must cover the same frames; got "
            f"{sorted(predicted)} vs {sorted(truth)} vs {sorted(universe)}"
        )
    tp = fp = tn = fn = 0
    for frame_index in sorted(universe):
        u = {_normalize_edge(e, f"frame {frame_index} universe") for e in universe[frame_index]}
        p = {_normalize_edge(e, f"frame {frame_index} predicted") for e in predicted[frame_index]}
        t = {_normalize_edge(e, f"frame {frame_index} truth") for e in truth[frame_index]}
        for label, edges in (("predicted", p), ("truth", t)):
            stray = edges - u
            if stray:
                raise EvaluationError(
                    f"frame {frame_index}: {label} edge {sorted(stray)[0]} outside the universe"
                )
        tp += len(p & t)
        fp += len(p - t)
        fn += len(t - p)
        tn += len(u) - len(p | t)
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def metrics(counts: ConfusionCounts) -> dict[str, float | None]:
    """Percentage metrics from a confusion tally.

    A metric whose denominator is zero is undefined and reported as None,
    never as 0 or 100.
    """

    def pct(numerator: int, denominator: int) -> float | None:
        if denominator == 0:
            return None
        return numerator / denominator * 100.0

    return {
        "precision": pct(counts.tp, counts.tp + counts.fp),
        "recall": pct(counts.tp, counts.tp + counts.fn),
        "false_alarm_rate": pct(counts.fp, counts.tn + counts.fp),
        "accuracy": pct(counts.tp + counts.tn, counts.total),
    }


_METRIC_LABELS = (
    ("precision", "Precision"),
    ("recall", "Recall"),
    ("false_alarm_rate", "False alarm rate"),
    ("accuracy", "Accuracy"),
)


def format_metrics(values: Mapping[str, float | None]) -> str:
    """Human-readable table, two decimals, e.g. "Accuracy 94.26%"."""
    lines = []
    for key, label in _METRIC_LABELS:
        value = values.get(key)
        lines.append(f"{label} n/a" if value is None else f"{label} {value:.2f}%")
    return "\n".join(lines)


def percent_error(true_m: float, estimated_m: float) -> float:
    """Absolute percent error of an estimate against a positive true value."""
    if not (math.isfinite(true_m) and true_m > 0):
        raise ValueError(f"true value must be positive, got {true_m!r}")
    return abs(true_m - estimated_m) / true_m * 100.0


@dataclass(frozen=True)
class DistanceStats:
    """Spread and error statistics over (true, estimated) distance samples.

    ``stdev_m`` is the sample standard deviation (n-1 denominator) of the
    estimates; None when fewer than two samples. ``rejected`` counts samples
    whose true value was not positive.
    """

    samples: tuple[tuple[float, float], ...]
    stdev_m: float | None
    mean_percent_error: float | None
    rejected: int

    @property
    def count(self) -> int:
        return len(self.samples)


def distance_stats(samples: Iterable[tuple[float, float]]) -> DistanceStats:
    """Compute distance-estimation statistics from (true_m, estimated_m) pairs."""
    kept: list[tuple[float, float]] = []
    rejected = 0
    for true_m, estimated_m in samples:
        if not (math.isfinite(true_m) and true_m > 0):
            rejected += 1
            continue
        kept.append((float(true_m), float(estimated_m)))
    estimates = [est for _, est in kept]
    stdev_m = statistics.stdev(estimates) if len(estimates) >= 2 else None
    if kept:
        mean_pe = sum(percent_error(t, e) for t, e in kept) / len(kept)
    else:
        mean_pe = None
    return DistanceStats(
        samples=tuple(kept),
        stdev_m=stdev_m,
        mean_percent_error=mean_pe,
        rejected=rejected,
    )


def match_identities(
    pred_persons: Sequence[tuple[int, tuple[float, float]]],
    truth_persons: Sequence[tuple[int, tuple[float, float]]],
    gate_px: float = DEFAULT_ALIGN_GATE_PX,
) -> dict[int, int]:
    """Greedy one-to-one pairing of reported ids to truth ids by centroid.

    Candidate pairs are taken in ascending pixel distance (ties by lower
    reported id, then lower truth id) and accepted while both sides are free
    and the distance is within the gate. Returns reported id -> truth id.
    """
    if not gate_px > 0:
        raise ValueError(f"gate_px must be positive, got {gate_px!r}")
    candidates = sorted(
        (math.dist(pc, tc), pred_id, truth_id)
        for pred_id, pc in pred_persons
        for truth_id, tc in truth_persons
    )
    mapping: dict[int, int] = {}
    used_truth: set[int] = set()
    for distance, pred_id, truth_id in candidates:
        if distance > gate_px:
            break
        if pred_id in mapping or truth_id in used_truth:
            continue
        mapping[pred_id] = truth_id
        used_truth.add(truth_id)
    return mapping


@dataclass(frozen=True)
class EvaluationResult:
    """Everything the evaluator concluded about one prediction stream."""

    frames: int
    confusion: ConfusionCounts
    metrics_pct: dict[str, float | None]
    stats: DistanceStats | None
    unmatched: dict[str, int]


def _index_by_frame(payloads: Iterable[dict], label: str) -> dict[int, dict]:
    indexed: dict[int, dict] = {}
    for payload in payloads:
        frame_index = payload["frame"]
        if frame_index in indexed:
            raise EvaluationError(f"{label} stream repeats frame {frame_index}")
        indexed[frame_index] = payload
    return indexed


def _bbox_centroid(bbox: Sequence[float]) -> tuple[float, float]:
    x1, y1, x2, y2 = bbox
    return ((x1 + x2) / 2.0, (y1 + y2) / 2.0)


def evaluate_reports(
    pred_payloads: Iterable[dict],
    truth_payloads: Iterable[dict],
    threshold_m: float = DEFAULT_THRESHOLD_M,
    gate_px: float = DEFAULT_ALIGN_GATE_PX,
) -> EvaluationResult:
    """Score a report stream against a simulator truth stream.

    Truth violations are truth pairs strictly closer than ``threshold_m``;
    pass the same threshold the pipeline ran with. Identity alignment is per
    frame; persons that fail to match are excluded from the universe and
    tallied in the result's unmatched counters.
    """
    pred_by_frame = _index_by_frame(pred_payloads, "prediction")
    truth_by_frame = _index_by_frame(truth_payloads, "truth")
    if set(pred_by_frame) != set(truth_by_frame):
        raise EvaluationError(
            "prediction and truth streams cover different frames: "
            f"{sorted(set(pred_by_frame) ^ set(truth_by_frame))} differ"
        )

    predicted: dict[int, set[Edge]] = {}
    truth: dict[int, set[Edge]] = {}
    universe: dict[int, set[Edge]] = {}
    samples: list[tuple[float, float]] = []
    unmatched = {
        "pred_persons": 0,
        "truth_persons": 0,
        "pred_violations_dropped": 0,
        "truth_violations_dropped": 0,
        "pairs_without_estimate": 0,
    }

    for frame_index in sorted(pred_by_frame):
        pred = pred_by_frame[frame_index]
        true = truth_by_frame[frame_index]
        pred_persons = [
            (person["id"], _bbox_centroid(person["bbox"])) for person in pred["persons"]
        ]
        truth_persons = [
            (person["pid"], (person["u_px"], person["v_px"])) for person in true["persons"]
        ]
        mapping = match_identities(pred_persons, truth_persons, gate_px)
        matched_pids = set(mapping.values())
        unmatched["pred_persons"] += len(pred_persons) - len(mapping)
        unmatched["truth_persons"] += len(truth_persons) - len(matched_pids)

        universe[frame_index] = {
            _normalize_edge((a, b), f"frame {frame_index}")
            for i, a in enumerate(sorted(matched_pids))
            for b in sorted(matched_pids)[i + 1 :]
        }

        pred_edges: set[Edge] = set()
        pred_distance: dict[Edge, float] = {}
        for pair in pred["pairs"]:
            a, b = pair["a"], pair["b"]
            if a not in mapping or b not in mapping:
                if pair["violation"]:
                    unmatched["pred_violations_dropped"] += 1
                continue
            edge = _normalize_edge((mapping[a], mapping[b]), f"frame {frame_index}")
            pred_distance[edge] = pair["d_m"]
            if pair["violation"]:
                pred_edges.add(edge)
        predicted[frame_index] = pred_edges

        truth_edges: set[Edge] = set()
        for pair in true["pairs"]:
            edge = _normalize_edge((pair["a"], pair["b"]), f"frame {frame_index}")
            if edge[0] not in matched_pids or edge[1] not in matched_pids:
                if pair["d_m"] < threshold_m:
                    unmatched["truth_violations_dropped"] += 1
                continue
            if pair["d_m"] < threshold_m:
                truth_edges.add(edge)
            if edge in pred_distance:
                samples.append((pair["d_m"], pred_distance[edge]))
            else:
                unmatched["pairs_without_estimate"] += 1
        truth[frame_index] = truth_edges

    counts = confusion_from_edges(predicted, truth, universe)
    return EvaluationResult(
        frames=len(pred_by_frame),
        confusion=counts,
        metrics_pct=metrics(counts),
        stats=distance_stats(samples),
        unmatched=unmatched,
    )


def evaluate_with_edges(
    pred_payloads: Iterable[dict], edge_payloads: Iterable[dict]
) -> EvaluationResult:
    """Score a report stream against hand-labelled violation edges.

    Labels share the report's track-id space, so no centroid alignment is
    involved: the universe is every pair of reported persons, and a label
    naming an unreported id is an error.
    """
    pred_by_frame = _index_by_frame(pred_payloads, "prediction")
    edges_by_frame = _index_by_frame(edge_payloads, "labels")
    if set(pred_by_frame) != set(edges_by_frame):
        raise EvaluationError(
            "prediction and label streams cover different frames: "
            f"{sorted(set(pred_by_frame) ^ set(edges_by_frame))} differ"
        )

    predicted: dict[int, set[Edge]] = {}
    truth: dict[int, set[Edge]] = {}
    universe: dict[int, set[Edge]] = {}
    for frame_index in sorted(pred_by_frame):
        pred = pred_by_frame[frame_index]
        ids = sorted(person["id"] for person in pred["persons"])
        universe[frame_index] = {
            (a, b) for i, a in enumerate(ids) for b in ids[i + 1 :]
        }
        predicted[frame_index] = {
            _normalize_edge((pair["a"], pair["b"]), f"frame {frame_index}")
            for pair in pred["pairs"]
            if pair["violation"]
        }
        truth[frame_index] = {
            _normalize_edge(edge, f"frame {frame_index} labels")
            for edge in edges_by_frame[frame_index].get("violations", [])
        }

    counts = confusion_from_edges(predicted, truth, universe)
    return EvaluationResult(
        frames=len(pred_by_frame),
        confusion=counts,
        metrics_pct=metrics(counts),
        stats=None,
        unmatched={},
    )


def result_to_json(result: EvaluationResult) -> str:
    """Render an evaluation result as a JSON document."""
    payload: dict = {
        "frames": result.frames,
        "confusion": {
            "tp": result.confusion.tp,
            "fp": result.confusion.fp,
            "tn": result.confusion.tn,
            "fn": result.confusion.fn,
        },
        "metrics_pct": result.metrics_pct,
    }
    if result.stats is not None:
        payload["distance_stats"] = {
            "count": result.stats.count,
            "stdev_m": result.stats.stdev_m,
            "mean_percent_error": result.stats.mean_percent_error,
            "rejected": result.stats.rejected,
        }
    if result.unmatched:
        payload["unmatched"] = result.unmatched
    return json.dumps(payload, indent=2)
