"""Reference-canvas detection, metric calibration and ROI cropping.

The dark rectangular canvas doubles as the metric reference: its detected
pixel box against its known physical size yields the pixels-per-mm scale,
and a 5% per-side crop of the box gives the grain-segmentation ROI.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .binarize import otsu_threshold
from .contours import (
    BoundingBox,
    approx_polygon,
    bounding_box,
    contour_area,
    extract_contours,
    is_convex,
    perimeter,
)
from .raster import BinaryImage, GrayImage, round_half_away


class NoCanvasFound(Exception):
    """No contour passed the rectangular-canvas acceptance tests."""


class DegenerateROI(Exception):
    """Cropping the canvas would leave a uselessly small region."""


@dataclass(frozen=True)
class CanvasSpec:
    """Physical canvas dimensions in millimeters (user supplied)."""

    width_mm: float
    height_mm: float

    def __post_init__(self):
        if self.width_mm <= 0 or self.height_mm <= 0:
            raise ValueError("canvas dimensions must be positive")


@dataclass(frozen=True)
class CalibrationScale:
    pixels_per_mm: float
    canvas_box_px: BoundingBox

    def __post_init__(self):
        if self.pixels_per_mm <= 0:
            raise ValueError("pixels_per_mm must be positive")


@dataclass(frozen=True, eq=False)
class RegionOfInterest:
    """Cropped grayscale region plus its origin in full-image pixels."""

    origin: tuple
    image: GrayImage


@dataclass(frozen=True)
class CanvasDetectParams:
    """Quadrilateral acceptance knobs for canvas detection.

    epsilon_frac: polygon-simplification tolerance as a fraction of the
    contour perimeter. min_area_frac: minimum enclosed area relative to
    the whole image. dark_foreground: treat the Otsu class at or below
    the threshold as canvas candidate.
    """

    epsilon_frac: float = 0.02
    min_area_frac: float = 0.10
    dark_foreground: bool = True


def detect_canvas(blurred: GrayImage, params: CanvasDetectParams = CanvasDetectParams()) -> BoundingBox:
    """Locate the rectangular canvas in a blurred grayscale image.

    Otsu-binarizes with the darker class as foreground, keeps outer
    contours whose simplified polygon has exactly 4 vertices, is convex
    and encloses at least min_area_frac of the image, and returns the
    bounding box of the largest survivor.

    Raises NoCanvasFound when nothing qualifies (bad capture).
    """
    t = otsu_threshold(blurred)
    if params.dark_foreground:
        mask = BinaryImage(blurred.pixels <= t)
    else:
        mask = BinaryImage(blurred.pixels > t)

    min_area = params.min_area_frac * blurred.width * blurred.height
    best = None
    best_area = -1.0
    for c in extract_contours(mask):
        if c.kind != "outer" or len(c) < 4:
            continue
        area = contour_area(c)
        if area < min_area:
            continue
        poly = approx_polygon(c, params.epsilon_frac * perimeter(c))
        if len(poly) != 4 or not is_convex(poly):
            continue
        if area > best_area:
            best_area = area
            best = bounding_box(c)
    if best is None:
        raise NoCanvasFound(
            "no rectangular dark region covering >= "
            f"{params.min_area_frac:.0%} of the image was found"
        )
    return best


def calibrate(box: BoundingBox, spec: CanvasSpec):
    """Derive pixels-per-mm from the detected box and the known dimensions.

    The longer physical side is paired with the longer pixel side, the two
    per-axis ratios are averaged, and a ratio disagreement above 10% is
    reported as an AspectMismatch warning (the mean is still used).

    Returns (CalibrationScale, diagnostics).
    """
    px_long, px_short = max(box.w, box.h), min(box.w, box.h)
    mm_long = max(spec.width_mm, spec.height_mm)
    mm_short = min(spec.width_mm, spec.height_mm)
    r_long = px_long / mm_long
    r_short = px_short / mm_short
    ppmm = (r_long + r_short) / 2.0
    diagnostics = []
    if abs(r_long - r_short) > 0.10 * ppmm:
        diagnostics.append(
            "AspectMismatch: per-axis scales differ by "
            f"{abs(r_long - r_short) / ppmm:.1%} "
            f"({r_long:.3f} vs {r_short:.3f} px/mm); mean used"
        )
    return CalibrationScale(ppmm, box), diagnostics


def crop_roi(blurred: GrayImage, box: BoundingBox) -> RegionOfInterest:
    """Crop 5% of the box extent from each side, removing border pixels.

    Raises DegenerateROI when the crop would not leave more than 10 px on
    both axes.
    """
    mx = int(round_half_away(0.05 * box.w))
    my = int(round_half_away(0.05 * box.h))
    w = box.w - 2 * mx
    h = box.h - 2 * my
    if w <= 10 or h <= 10:
        raise DegenerateROI(f"cropped canvas would be {w}x{h} px")
    x0 = box.x + mx
    y0 = box.y + my
    crop = blurred.pixels[y0 : y0 + h, x0 : x0 + w]
    return RegionOfInterest(origin=(x0, y0), image=GrayImage(crop.copy()))
