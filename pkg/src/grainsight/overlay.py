"""Annotated overlay rendering: fitted ellipses, grain ids and dimensions.

Everything is drawn by hand (parametric outlines and a small bitmap font)
so overlays are bit-reproducible and carry no font dependencies.
"""

from __future__ import annotations

import math

import numpy as np

from .raster import RgbImage
from .report import RunReport

PALETTE = (
    (230, 60, 60),
    (60, 200, 60),
    (70, 110, 255),
    (240, 180, 40),
    (200, 70, 220),
    (60, 210, 210),
    (250, 120, 40),
    (160, 230, 80),
)

CANVAS_COLOR = (255, 255, 0)
TEXT_COLOR = (255, 255, 255)

# 5x7 bitmap glyphs, one int per row, MSB = leftmost column.
_GLYPHS = {
    "0": (0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110),
    "1": (0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110),
    "2": (0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111),
    "3": (0b11111, 0b00010, 0b00100, 0b00010, 0b00001, 0b10001, 0b01110),
    "4": (0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010),
    "5": (0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110),
    "6": (0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110),
    "7": (0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000),
    "8": (0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110),
    "9": (0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100),
    ".": (0, 0, 0, 0, 0, 0b01100, 0b01100),
    ":": (0, 0b01100, 0b01100, 0, 0b01100, 0b01100, 0),
    "x": (0, 0, 0b10001, 0b01010, 0b00100, 0b01010, 0b10001),
    "m": (0, 0, 0b11010, 0b10101, 0b10101, 0b10101, 0b10101),
    " ": (0, 0, 0, 0, 0, 0, 0),
}

GLYPH_W = 6  # 5 px glyph + 1 px spacing
GLYPH_H = 7


def _put(px: np.ndarray, x: int, y: int, color) -> None:
    if 0 <= y < px.shape[0] and 0 <= x < px.shape[1]:
        px[y, x] = color


def _draw_text(px: np.ndarray, x: int, y: int, text: str, color) -> None:
    for ch in text:
        rows = _GLYPHS.get(ch, _GLYPHS[" "])
        for ry, bits in enumerate(rows):
            for rx in range(5):
                if bits & (1 << (4 - rx)):
                    _put(px, x + rx, y + ry, color)
        x += GLYPH_W


def _draw_box(px: np.ndarray, box, color) -> None:
    x0, y0 = box.x, box.y
    x1, y1 = box.x + box.w - 1, box.y + box.h - 1
    for x in range(x0, x1 + 1):
        _put(px, x, y0, color)
        _put(px, x, y1, color)
    for y in range(y0, y1 + 1):
        _put(px, x0, y, color)
        _put(px, x1, y, color)


def _draw_ellipse(px: np.ndarray, cx, cy, a, b, angle_deg, color) -> None:
    c = math.cos(math.radians(angle_deg))
    s = math.sin(math.radians(angle_deg))
    steps = max(64, int(4 * (a + b)))
    for k in range(steps):
        t = 2.0 * math.pi * k / steps
        ex = a * math.cos(t)
        ey = b * math.sin(t)
        x = int(round(cx + ex * c - ey * s))
        y = int(round(cy + ex * s + ey * c))
        _put(px, x, y, color)


def render_overlay(img: RgbImage, report: RunReport) -> RgbImage:
    """Draw the canvas box, each fitted ellipse and an id plus
    "length x width mm" label at every centroid. Labels are clamped to
    stay inside the image. The input image and report are untouched."""
    px = img.pixels.copy()
    _draw_box(px, report.canvas_box_px, CANVAS_COLOR)
    for g in report.grains:
        color = PALETTE[g.id % len(PALETTE)]
        cx, cy = g.ellipse.center
        _draw_ellipse(
            px, cx, cy,
            g.ellipse.major_px / 2.0, g.ellipse.minor_px / 2.0,
            g.ellipse.angle_deg, color,
        )
        label = f"{g.id}: {g.length_mm:.2f}x{g.width_mm:.2f}mm"
        lw = GLYPH_W * len(label)
        lx = int(round(cx)) - lw // 2
        ly = int(round(cy)) - GLYPH_H // 2
        lx = max(0, min(lx, px.shape[1] - lw))
        ly = max(0, min(ly, px.shape[0] - GLYPH_H))
        _draw_text(px, lx, ly, label, TEXT_COLOR)
    return RgbImage(px)
