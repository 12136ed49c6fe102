"""Synthetic scene generation with exact ground truth.

Scenes are the verification oracle for the whole pipeline: a dark canvas
rectangle on a lighter surround, solid rotated elliptical grains, an
optional linear lighting ramp and an optional low-contrast "moat" defect
that provokes sub-contours. Rendering is bit-deterministic for a fixed
seed: the random source is an explicit splitmix64 generator, all grain
parameters are quantized to dyadic fractions (1/16 px axes and centers,
1/1024 direction cosines) and rasterization tests pixel lattice points
with exactly representable float64 inputs.

Grain geometry is drawn in physical units (mm and degrees), so the same
seed rendered at two different pixels-per-mm values depicts the same
physical scene, which is what the height-invariance checks exploit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .canvas import CanvasSpec
from .contours import BoundingBox
from .raster import RgbImage, round_half_away


class PlacementOverflow(Exception):
    """Grains could not be placed without touching within the attempt budget."""


MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64: state advances by the golden-gamma constant, the output
    is the finalized state. uniform() uses the top 53 bits.

    seed -> for each draw: state = (state + 0x9E3779B97F4A7C15) mod 2^64;
    z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2^64;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2^64; output z ^ (z >> 31).
    """

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self, lo: float, hi: float) -> float:
        u = (self.next_u64() >> 11) * (1.0 / (1 << 53))
        return lo + u * (hi - lo)


@dataclass(frozen=True)
class SceneSpec:
    """Parameters of one synthetic capture."""

    seed: int = 0
    canvas: CanvasSpec = CanvasSpec(200.0, 150.0)
    pixels_per_mm: float = 10.0
    margin_px: int = 40
    grain_count: int = 12
    length_mm_range: tuple = (8.3, 9.4)
    width_mm_range: tuple = (1.9, 2.1)
    background_gray: int = 170
    canvas_gray: int = 35
    grain_gray: int = 70
    lighting_gradient: int = 0
    contrast_noise: float = 0.0  # per-grain probability of the moat defect
    shape: str = "ellipse"  # "ellipse" | "capsule"
    min_gap_mm: float = 1.0
    fixed_angle_deg: float = None  # None -> random per grain

    def __post_init__(self):
        if self.grain_gray <= self.canvas_gray:
            raise ValueError("grains must be brighter than the canvas")
        if self.shape not in ("ellipse", "capsule"):
            raise ValueError("shape must be 'ellipse' or 'capsule'")
        if self.pixels_per_mm <= 0:
            raise ValueError("pixels_per_mm must be positive")


@dataclass(frozen=True)
class GroundTruthGrain:
    center_px: tuple
    semi_major_px: float
    semi_minor_px: float
    angle_deg: float
    length_mm: float
    width_mm: float
    streaked: bool = False


@dataclass(frozen=True)
class GroundTruth:
    grains: list
    canvas_box_px: BoundingBox


def _q16(x: float) -> float:
    """Quantize to 1/16 px; the result is an exactly representable dyadic."""
    return round(x * 16.0) / 16.0


def _q1024(x: float) -> float:
    return round(x * 1024.0) / 1024.0


def _paint_shape(img: np.ndarray, cx: float, cy: float, a: float, b: float,
                 angle_deg: float, value: int, shape: str,
                 inner: float = 0.0, outer: float = 1.0) -> None:
    """Set pixels whose normalized radius falls inside [inner, outer].

    The inclusion test runs on the pixel lattice with quantized direction
    cosines so repeated renders are bit-identical.
    """
    th = math.radians(angle_deg)
    c = _q1024(math.cos(th))
    s = _q1024(math.sin(th))
    r = int(math.ceil(max(a, b))) + 2
    h, w = img.shape
    x0 = max(0, int(math.floor(cx)) - r)
    x1 = min(w, int(math.ceil(cx)) + r + 1)
    y0 = max(0, int(math.floor(cy)) - r)
    y1 = min(h, int(math.ceil(cy)) + r + 1)
    yy, xx = np.mgrid[y0:y1, x0:x1]
    dx = xx - cx
    dy = yy - cy
    u = dx * c + dy * s
    v = -dx * s + dy * c
    if shape == "ellipse":
        q = (u * u) / (a * a) + (v * v) / (b * b)
    else:  # capsule: rectangle of half-length a-b capped by circles of radius b
        core = np.maximum(np.abs(u) - (a - b), 0.0)
        q = (core * core + v * v) / (b * b)
    sel = (q <= outer * outer) & (q >= inner * inner)
    img[y0:y1, x0:x1][sel] = value


def generate_scene(spec: SceneSpec):
    """Render one scene and its exact ground truth.

    Returns (RgbImage, GroundTruth). Raises PlacementOverflow when the
    grains cannot be placed without touching within 10 * grain_count
    rejection-sampling attempts.
    """
    ppmm = spec.pixels_per_mm
    cw_px = int(round_half_away(spec.canvas.width_mm * ppmm))
    ch_px = int(round_half_away(spec.canvas.height_mm * ppmm))
    width = cw_px + 2 * spec.margin_px
    height = ch_px + 2 * spec.margin_px
    canvas_box = BoundingBox(spec.margin_px, spec.margin_px, cw_px, ch_px)

    rng = SplitMix64(spec.seed)
    placed = []  # (cx_mm, cy_mm, L, W, angle, streaked)
    attempts = 0
    budget = 10 * spec.grain_count
    while len(placed) < spec.grain_count:
        if attempts >= budget:
            raise PlacementOverflow(
                f"placed {len(placed)}/{spec.grain_count} grains in {attempts} attempts"
            )
        attempts += 1
        L = rng.uniform(*spec.length_mm_range)
        W = rng.uniform(*spec.width_mm_range)
        angle = rng.uniform(0.0, 180.0)
        if spec.fixed_angle_deg is not None:
            angle = spec.fixed_angle_deg % 180.0
        pad = L / 2.0 + spec.min_gap_mm
        lo_x = 0.05 * spec.canvas.width_mm + pad
        hi_x = 0.95 * spec.canvas.width_mm - pad
        lo_y = 0.05 * spec.canvas.height_mm + pad
        hi_y = 0.95 * spec.canvas.height_mm - pad
        if lo_x >= hi_x or lo_y >= hi_y:
            raise PlacementOverflow("canvas too small for the requested grains")
        cx = rng.uniform(lo_x, hi_x)
        cy = rng.uniform(lo_y, hi_y)
        streaked = rng.uniform(0.0, 1.0) < spec.contrast_noise
        ok = True
        for (ox, oy, oL, _, _, _) in placed:
            # conservative: circumscribed circles separated by the gap
            if math.hypot(cx - ox, cy - oy) < (L + oL) / 2.0 + spec.min_gap_mm:
                ok = False
                break
        if ok:
            placed.append((cx, cy, L, W, angle, streaked))

    img = np.full((height, width), spec.background_gray, dtype=np.int16)
    img[
        canvas_box.y : canvas_box.y + canvas_box.h,
        canvas_box.x : canvas_box.x + canvas_box.w,
    ] = spec.canvas_gray

    truth_grains = []
    for (cx_mm, cy_mm, L, W, angle, streaked) in placed:
        a = _q16(L * ppmm / 2.0)
        b = _q16(W * ppmm / 2.0)
        cx = _q16(spec.margin_px + cx_mm * ppmm)
        cy = _q16(spec.margin_px + cy_mm * ppmm)
        _paint_shape(img, cx, cy, a, b, angle, spec.grain_gray, spec.shape)
        if streaked:
            # low-contrast defect: a canvas-dark moat splits the grain into
            # a bright rim plus a bright core, the sub-contour scenario
            _paint_shape(
                img, cx, cy, a, b, angle, spec.canvas_gray, spec.shape,
                inner=0.55, outer=0.78,
            )
        truth_grains.append(
            GroundTruthGrain(
                center_px=(cx, cy),
                semi_major_px=a,
                semi_minor_px=b,
                angle_deg=angle,
                length_mm=2.0 * a / ppmm,
                width_mm=2.0 * b / ppmm,
                streaked=streaked,
            )
        )

    if spec.lighting_gradient:
        xs = np.arange(width, dtype=np.float64)
        ramp = round_half_away(spec.lighting_gradient * (xs / (width - 1) - 0.5))
        img = img + ramp.astype(np.int16)[None, :]

    gray = np.clip(img, 0, 255).astype(np.uint8)
    rgb = np.repeat(gray[:, :, None], 3, axis=2)
    return RgbImage(rgb), GroundTruth(grains=truth_grains, canvas_box_px=canvas_box)
