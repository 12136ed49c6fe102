"""Grain segmentation inside the ROI, contour filtration and sub-contour
removal, plus the full measurement pipeline orchestration."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, replace

from .binarize import AdaptiveParams, adaptive_threshold
from .canvas import (
    CalibrationScale,
    CanvasDetectParams,
    CanvasSpec,
    RegionOfInterest,
    calibrate,
    crop_roi,
    detect_canvas,
)
from .contours import BoundingBox, Contour, box_contains, bounding_box, extract_contours
from .measure import DegenerateContour, measure_bbox, measure_ellipse
from .raster import RgbImage, gaussian_blur_5x5, to_grayscale
from .report import RunReport


@dataclass(frozen=True, eq=False)
class GrainCandidate:
    """One outer contour in ROI coordinates with its box dimensions.

    len_px/wid_px are the box's larger/smaller extent; the precise
    measurement happens later on the fitted ellipse.
    """

    contour: Contour
    box: BoundingBox

    @property
    def len_px(self) -> int:
        return max(self.box.w, self.box.h)

    @property
    def wid_px(self) -> int:
        return min(self.box.w, self.box.h)


@dataclass(frozen=True)
class MedianPolicy:
    """Keep candidates whose box dimensions sit within multiplicative bands
    around the median length and width."""

    lower_factor: float = 0.5
    upper_factor: float = 1.5

    def __post_init__(self):
        if not (0 < self.lower_factor < 1 < self.upper_factor):
            raise ValueError("need lower_factor < 1 < upper_factor")


@dataclass(frozen=True)
class MinMaxPolicy:
    """Absolute physical bounds for plausible rice grains, in millimeters."""

    min_len_mm: float = 4.0
    max_len_mm: float = 15.0
    min_wid_mm: float = 1.0
    max_wid_mm: float = 4.0

    def __post_init__(self):
        if not (self.min_len_mm < self.max_len_mm and self.min_wid_mm < self.max_wid_mm):
            raise ValueError("need min < max on both axes")


# Contours with fewer boundary points are always noise at the target
# resolutions and cannot support an ellipse fit.
MIN_CONTOUR_POINTS = 5


def segment_grains(roi: RegionOfInterest, params: AdaptiveParams = AdaptiveParams()) -> list:
    """Adaptive-threshold the ROI and collect outer contours as candidates.

    Hole contours are discarded; candidates keep raster order of their
    contour start pixels. An empty list is a valid result.
    """
    mask = adaptive_threshold(roi.image, params)
    cands = []
    for c in extract_contours(mask):
        if c.kind != "outer" or len(c) < MIN_CONTOUR_POINTS:
            continue
        cands.append(GrainCandidate(contour=c, box=bounding_box(c)))
    return cands


def filter_median(cands: list, policy: MedianPolicy = MedianPolicy()) -> list:
    """Median-relative size filtration.

    Keeps candidates whose box length and width both fall inside
    [lower * median, upper * median]. Documented failure mode: when
    spurious contours outnumber real grains the medians shift toward the
    noise and real grains are discarded.
    """
    if not cands:
        return []
    med_len = statistics.median(c.len_px for c in cands)
    med_wid = statistics.median(c.wid_px for c in cands)
    lo_l, hi_l = policy.lower_factor * med_len, policy.upper_factor * med_len
    lo_w, hi_w = policy.lower_factor * med_wid, policy.upper_factor * med_wid
    return [
        c
        for c in cands
        if lo_l <= c.len_px <= hi_l and lo_w <= c.wid_px <= hi_w
    ]


def filter_minmax(cands: list, scale: CalibrationScale, policy: MinMaxPolicy = MinMaxPolicy()) -> list:
    """Keep candidates whose box dimensions in mm fall inside the physical
    min/max bands."""
    ppmm = scale.pixels_per_mm
    return [
        c
        for c in cands
        if policy.min_len_mm <= c.len_px / ppmm <= policy.max_len_mm
        and policy.min_wid_mm <= c.wid_px / ppmm <= policy.max_wid_mm
    ]


def remove_subcontours(cands: list) -> list:
    """Drop candidates whose box lies inside another surviving candidate's box.

    Resolution order: boxes sorted by area descending are kept greedily;
    anything contained in an already-kept box is dropped. Identical boxes
    keep the lowest contour id. Output preserves input order.
    """
    order = sorted(cands, key=lambda c: (-c.box.area, c.contour.id))
    kept = []
    for c in order:
        contained = any(
            box_contains(k.box, c.box) or k.box == c.box for k in kept
        )
        if not contained:
            kept.append(c)
    kept_ids = {c.contour.id for c in kept}
    return [c for c in cands if c.contour.id in kept_ids]


@dataclass(frozen=True)
class PipelineConfig:
    """Everything the measurement run needs besides the image itself."""

    canvas: CanvasSpec
    sigma: float = 1.0
    adaptive: AdaptiveParams = AdaptiveParams()
    canvas_detect: CanvasDetectParams = CanvasDetectParams()
    policy: str = "minmax"  # "minmax" | "median"
    minmax: MinMaxPolicy = MinMaxPolicy()
    median: MedianPolicy = MedianPolicy()
    # Axis-aligned boxes overstate the width of tilted grains, so the
    # upper width band is widened by this factor before measurement.
    width_slack: float = 2.0
    measure_method: str = "ellipse"  # "ellipse" | "bbox"


def run_pipeline(img: RgbImage, config: PipelineConfig, image_name: str = "<memory>"):
    """Full measurement flow: grayscale, blur, canvas detection,
    calibration, crop, segmentation, filtration, sub-contour removal and
    per-grain measurement.

    Returns (RunReport, stage_timings_seconds).
    """
    timings = {}
    diagnostics = [f"policy: {config.policy}", f"measure: {config.measure_method}"]

    t0 = time.perf_counter()
    gray = to_grayscale(img)
    timings["grayscale"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    blurred = gaussian_blur_5x5(gray, config.sigma)
    timings["blur"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    box = detect_canvas(blurred, config.canvas_detect)
    timings["canvas_detect"] = time.perf_counter() - t0

    scale, calib_diags = calibrate(box, config.canvas)
    diagnostics.extend(calib_diags)

    roi = crop_roi(blurred, box)

    t0 = time.perf_counter()
    cands = segment_grains(roi, config.adaptive)
    timings["segment"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    if config.policy == "median":
        cands = filter_median(cands, config.median)
    else:
        slack_policy = replace(
            config.minmax, max_wid_mm=config.minmax.max_wid_mm * config.width_slack
        )
        cands = filter_minmax(cands, scale, slack_policy)
    cands = remove_subcontours(cands)
    timings["filter"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    grains = []
    for idx, cand in enumerate(cands, start=1):
        try:
            if config.measure_method == "bbox":
                m = measure_bbox(cand, scale, roi.origin)
            else:
                m = measure_ellipse(cand, scale, roi.origin)
        except DegenerateContour as exc:
            diagnostics.append(f"DegenerateContour: grain candidate {idx}: {exc}")
            continue
        grains.append(replace(m, id=idx))
    timings["measure"] = time.perf_counter() - t0

    report = RunReport(
        image=image_name,
        canvas_mm=(config.canvas.width_mm, config.canvas.height_mm),
        pixels_per_mm=scale.pixels_per_mm,
        grains=grains,
        canvas_box_px=box,
        diagnostics=diagnostics,
        measure_method=config.measure_method,
    )
    return report, timings
