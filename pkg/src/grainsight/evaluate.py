"""Detection-rate and accuracy metrics of predictions against ground truth."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class MatchedPair:
    truth_index: int
    pred_id: int
    centroid_dist_px: float
    length_err_mm: float
    width_err_mm: float


@dataclass(frozen=True)
class EvalReport:
    """Greedy nearest-centroid matching summary for one or more scenes."""

    truth_count: int
    detected_count: int
    false_positives: int
    length_mae_mm: float
    width_mae_mm: float
    per_grain: list = field(default_factory=list)

    @property
    def detection_rate(self) -> float:
        if self.truth_count == 0:
            return 1.0
        return self.detected_count / self.truth_count


def evaluate(predictions: list, truth, scale=None) -> EvalReport:
    """Match predictions to ground-truth grains by centroid distance.

    Pairs are accepted greedily in ascending distance while the distance
    stays within half the truth grain's pixel length; unmatched truths are
    misses, unmatched predictions false positives. MAE is computed over
    matched pairs in millimeters.
    """
    pairs = []
    for ti, tg in enumerate(truth.grains):
        limit = tg.semi_major_px  # 0.5 * full length in px
        for pi, pred in enumerate(predictions):
            d = math.hypot(
                pred.centroid_full_px[0] - tg.center_px[0],
                pred.centroid_full_px[1] - tg.center_px[1],
            )
            if d <= limit:
                pairs.append((d, ti, pi))
    pairs.sort(key=lambda t: (t[0], t[1], t[2]))

    matched_t = set()
    matched_p = set()
    matches = []
    for d, ti, pi in pairs:
        if ti in matched_t or pi in matched_p:
            continue
        matched_t.add(ti)
        matched_p.add(pi)
        tg = truth.grains[ti]
        pred = predictions[pi]
        matches.append(
            MatchedPair(
                truth_index=ti,
                pred_id=pred.id,
                centroid_dist_px=d,
                length_err_mm=pred.length_mm - tg.length_mm,
                width_err_mm=pred.width_mm - tg.width_mm,
            )
        )

    n = len(matches)
    length_mae = sum(abs(m.length_err_mm) for m in matches) / n if n else 0.0
    width_mae = sum(abs(m.width_err_mm) for m in matches) / n if n else 0.0
    return EvalReport(
        truth_count=len(truth.grains),
        detected_count=n,
        false_positives=len(predictions) - n,
        length_mae_mm=length_mae,
        width_mae_mm=width_mae,
        per_grain=matches,
    )


def combine_reports(reports: list) -> EvalReport:
    """Aggregate per-scene reports into one suite-level report."""
    matches = [m for r in reports for m in r.per_grain]
    n = len(matches)
    return EvalReport(
        truth_count=sum(r.truth_count for r in reports),
        detected_count=sum(r.detected_count for r in reports),
        false_positives=sum(r.false_positives for r in reports),
        length_mae_mm=sum(abs(m.length_err_mm) for m in matches) / n if n else 0.0,
        width_mae_mm=sum(abs(m.width_err_mm) for m in matches) / n if n else 0.0,
        per_grain=matches,
    )
