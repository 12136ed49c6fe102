import math

import numpy as np
import pytest

from grainsight import (
    BoundingBox,
    CanvasSpec,
    DegenerateROI,
    GrayImage,
    NoCanvasFound,
    calibrate,
    crop_roi,
    detect_canvas,
    gaussian_blur_5x5,
)


def scene_with_rect(x, y, w, h, size=(800, 1000), bg=220, fg=30, angle_deg=0.0):
    """White field with a dark rectangle, optionally rotated about its center."""
    a = np.full(size, bg, dtype=np.uint8)
    if angle_deg == 0.0:
        a[y : y + h, x : x + w] = fg
    else:
        cy, cx = y + h / 2.0, x + w / 2.0
        th = math.radians(angle_deg)
        c, s = math.cos(th), math.sin(th)
        yy, xx = np.mgrid[0 : size[0], 0 : size[1]]
        u = (xx - cx) * c + (yy - cy) * s
        v = -(xx - cx) * s + (yy - cy) * c
        inside = (np.abs(u) <= w / 2.0) & (np.abs(v) <= h / 2.0)
        a[inside] = fg
    return GrayImage(a)


class TestDetectCanvas:
    def test_locates_axis_aligned_rectangle(self):
        img = scene_with_rect(100, 100, 600, 400)
        box = detect_canvas(gaussian_blur_5x5(img))
        assert abs(box.x - 100) <= 2 and abs(box.y - 100) <= 2
        assert abs(box.w - 600) <= 4 and abs(box.h - 400) <= 4

    def test_accepts_slightly_rotated_rectangle(self):
        img = scene_with_rect(150, 150, 600, 400, angle_deg=2.0)
        box = detect_canvas(gaussian_blur_5x5(img))
        # extent of a 2-degree rotated 600x400 rect
        exp_w = 600 * math.cos(math.radians(2)) + 400 * math.sin(math.radians(2))
        exp_h = 600 * math.sin(math.radians(2)) + 400 * math.cos(math.radians(2))
        assert abs(box.w - exp_w) <= 4
        assert abs(box.h - exp_h) <= 4

    def test_blank_image_raises(self):
        img = GrayImage(np.full((200, 300), 240, dtype=np.uint8))
        with pytest.raises(NoCanvasFound):
            detect_canvas(gaussian_blur_5x5(img))

    def test_circle_rejected(self):
        a = np.full((600, 600), 220, dtype=np.uint8)
        yy, xx = np.mgrid[0:600, 0:600]
        a[(xx - 300) ** 2 + (yy - 300) ** 2 <= 200 ** 2] = 30
        with pytest.raises(NoCanvasFound):
            detect_canvas(gaussian_blur_5x5(GrayImage(a)))

    def test_small_dark_rect_rejected_by_area(self):
        img = scene_with_rect(10, 10, 60, 40)
        with pytest.raises(NoCanvasFound):
            detect_canvas(gaussian_blur_5x5(img))

    def test_translation_equivariance(self):
        base = detect_canvas(gaussian_blur_5x5(scene_with_rect(100, 100, 500, 350)))
        moved = detect_canvas(gaussian_blur_5x5(scene_with_rect(140, 170, 500, 350)))
        assert (moved.x - base.x, moved.y - base.y) == (40, 70)
        assert (moved.w, moved.h) == (base.w, base.h)


class TestCalibrate:
    def test_exact_ratios(self):
        scale, diags = calibrate(BoundingBox(0, 0, 1000, 800), CanvasSpec(200, 160))
        assert scale.pixels_per_mm == 5.0
        assert diags == []

    def test_orientation_normalized(self):
        scale, _ = calibrate(BoundingBox(0, 0, 1000, 800), CanvasSpec(160, 200))
        assert scale.pixels_per_mm == 5.0

    def test_mean_of_mismatched_ratios(self):
        scale, diags = calibrate(BoundingBox(0, 0, 1000, 820), CanvasSpec(200, 160))
        assert scale.pixels_per_mm == pytest.approx((5.0 + 820 / 160) / 2)
        assert diags == []  # 2.5% below the 10% warning bar

    def test_aspect_mismatch_warns_but_returns_mean(self):
        scale, diags = calibrate(BoundingBox(0, 0, 1000, 1000), CanvasSpec(200, 160))
        assert len(diags) == 1 and "AspectMismatch" in diags[0]
        assert scale.pixels_per_mm == pytest.approx((5.0 + 6.25) / 2)

    def test_scale_carries_precrop_box(self):
        box = BoundingBox(7, 9, 1000, 800)
        scale, _ = calibrate(box, CanvasSpec(200, 160))
        assert scale.canvas_box_px == box


class TestCropRoi:
    def full_gray(self, w=1200, h=900):
        return GrayImage(np.zeros((h, w), dtype=np.uint8))

    def test_five_percent_per_side(self):
        roi = crop_roi(self.full_gray(), BoundingBox(0, 0, 1000, 800))
        assert roi.origin == (50, 40)
        assert (roi.image.width, roi.image.height) == (900, 720)

    def test_offset_box(self):
        roi = crop_roi(self.full_gray(), BoundingBox(100, 100, 600, 400))
        assert roi.origin == (130, 120)
        assert (roi.image.width, roi.image.height) == (540, 360)

    def test_degenerate_box(self):
        with pytest.raises(DegenerateROI):
            crop_roi(self.full_gray(), BoundingBox(0, 0, 12, 12))

    def test_crop_contents_match_source(self):
        a = np.arange(100 * 120, dtype=np.int64).reshape(100, 120) % 251
        img = GrayImage(a.astype(np.uint8))
        roi = crop_roi(img, BoundingBox(10, 20, 100, 60))
        assert roi.origin == (15, 23)
        sub = img.pixels[23 : 23 + 54, 15 : 15 + 90]
        assert np.array_equal(roi.image.pixels, sub)
