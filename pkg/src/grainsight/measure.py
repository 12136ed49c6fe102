"""Grain dimensions from best-fit ellipses, with the bounding-box method
kept as a comparison baseline.

The ellipse is fitted by second-order region moments of the filled
contour: for a solid ellipse with semi-axes (p, q) the covariance
eigenvalues are exactly p^2/4 and q^2/4, so the full axes are recovered
as 4 * sqrt(lambda). This is exact up to rasterization and needs no
boundary least squares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .canvas import CalibrationScale
from .contours import fill_contour


class DegenerateContour(Exception):
    """Too few enclosed pixels (or a flat region) to fit an ellipse."""


@dataclass(frozen=True)
class FittedEllipse:
    """Best-fit ellipse: center in pixels, full axis lengths, angle of the
    major axis in degrees within [0, 180)."""

    center: tuple
    major_px: float
    minor_px: float
    angle_deg: float

    def __post_init__(self):
        if not (self.major_px >= self.minor_px > 0):
            raise ValueError("expected major_px >= minor_px > 0")


@dataclass(frozen=True)
class GrainMeasurement:
    id: int
    length_mm: float
    width_mm: float
    ellipse: FittedEllipse
    centroid_full_px: tuple
    method: str  # "ellipse" | "bbox"

    def __post_init__(self):
        if not (self.length_mm >= self.width_mm > 0):
            raise ValueError("expected length_mm >= width_mm > 0")


def region_moments(mask: np.ndarray):
    """Centroid and normalized second central moments of a pixel region."""
    ys, xs = np.nonzero(mask)
    n = xs.size
    cx = float(xs.mean())
    cy = float(ys.mean())
    dx = xs - cx
    dy = ys - cy
    mu20 = float((dx * dx).mean())
    mu02 = float((dy * dy).mean())
    mu11 = float((dx * dy).mean())
    return n, cx, cy, mu20, mu11, mu02


def fit_ellipse(contour) -> FittedEllipse:
    """Moment-based ellipse over the filled contour region.

    Raises DegenerateContour for regions of fewer than 5 pixels or with a
    non-positive minor eigenvalue.
    """
    if len(contour) < 5:
        raise DegenerateContour(f"contour {contour.id}: fewer than 5 boundary points")
    region, (ox, oy) = fill_contour(contour, include_boundary=True)
    n, cx, cy, mu20, mu11, mu02 = region_moments(region)
    if n < 5:
        raise DegenerateContour(f"contour {contour.id}: only {n} enclosed pixels")

    tr = mu20 + mu02
    det = math.hypot(mu20 - mu02, 2.0 * mu11)
    lam1 = (tr + det) / 2.0
    lam2 = (tr - det) / 2.0
    if lam2 <= 0:
        raise DegenerateContour(f"contour {contour.id}: flat region, no minor axis")

    angle = math.degrees(0.5 * math.atan2(2.0 * mu11, mu20 - mu02)) % 180.0
    return FittedEllipse(
        center=(cx + ox, cy + oy),
        major_px=4.0 * math.sqrt(lam1),
        minor_px=4.0 * math.sqrt(lam2),
        angle_deg=angle,
    )


def measure_bbox(cand, scale: CalibrationScale, roi_origin=(0, 0)) -> GrainMeasurement:
    """Axis-aligned bounding-box dimensions converted to millimeters.

    Overstates the width of tilted grains; retained as the baseline the
    ellipse method is compared against.
    """
    box = cand.box
    length_px = float(max(box.w, box.h))
    width_px = float(min(box.w, box.h))
    cx = box.x + (box.w - 1) / 2.0 + roi_origin[0]
    cy = box.y + (box.h - 1) / 2.0 + roi_origin[1]
    ellipse = FittedEllipse(
        center=(cx, cy),
        major_px=length_px,
        minor_px=width_px,
        angle_deg=0.0 if box.w >= box.h else 90.0,
    )
    return GrainMeasurement(
        id=cand.contour.id,
        length_mm=length_px / scale.pixels_per_mm,
        width_mm=width_px / scale.pixels_per_mm,
        ellipse=ellipse,
        centroid_full_px=(cx, cy),
        method="bbox",
    )


def measure_ellipse(cand, scale: CalibrationScale, roi_origin=(0, 0)) -> GrainMeasurement:
    """Fitted-ellipse dimensions converted to millimeters.

    The centroid is mapped back to full-image coordinates through the ROI
    origin. DegenerateContour propagates to the caller, which reports the
    grain as detected but unmeasured.
    """
    ellipse = fit_ellipse(cand.contour)
    cx = ellipse.center[0] + roi_origin[0]
    cy = ellipse.center[1] + roi_origin[1]
    shifted = FittedEllipse(
        center=(cx, cy),
        major_px=ellipse.major_px,
        minor_px=ellipse.minor_px,
        angle_deg=ellipse.angle_deg,
    )
    return GrainMeasurement(
        id=cand.contour.id,
        length_mm=ellipse.major_px / scale.pixels_per_mm,
        width_mm=ellipse.minor_px / scale.pixels_per_mm,
        ellipse=shifted,
        centroid_full_px=(cx, cy),
        method="ellipse",
    )
