"""Image value types, grayscale conversion and Gaussian smoothing.

All pixel buffers are numpy arrays marked read-only after construction, so
image values can be shared freely across threads. Every operation here is a
pure function returning a new image.
"""

from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

# ITU-R BT.601 luma weights.
_LUMA_R = 0.299
_LUMA_G = 0.587
_LUMA_B = 0.114


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class RgbImage:
    """8-bit RGB raster, shape (height, width, 3), row-major."""

    pixels: np.ndarray

    def __post_init__(self):
        a = self.pixels
        if a.ndim != 3 or a.shape[2] != 3 or a.dtype != np.uint8:
            raise ValueError("RgbImage expects a (h, w, 3) uint8 array")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        object.__setattr__(self, "pixels", _freeze(a))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit single-channel raster, shape (height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        a = self.pixels
        if a.ndim != 2 or a.dtype != np.uint8:
            raise ValueError("GrayImage expects a (h, w) uint8 array")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        object.__setattr__(self, "pixels", _freeze(a))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """Boolean foreground mask, shape (height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        a = self.pixels
        if a.ndim != 2 or a.dtype != np.bool_:
            raise ValueError("BinaryImage expects a (h, w) bool array")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError("mask must be at least 1x1")
        object.__setattr__(self, "pixels", _freeze(a))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


def round_half_away(x: np.ndarray | float):
    """Round to nearest integer, halves away from zero.

    Deterministic across platforms, unlike numpy's default bankers rounding.
    """
    if isinstance(x, np.ndarray):
        return np.sign(x) * np.floor(np.abs(x) + 0.5)
    return math.copysign(math.floor(abs(x) + 0.5), x)


def to_grayscale(img: RgbImage) -> GrayImage:
    """Convert RGB to 8-bit gray with BT.601 weights (0.299/0.587/0.114).

    Output pixel = round(0.299 R + 0.587 G + 0.114 B), same dimensions.
    """
    rgb = img.pixels.astype(np.float64)
    y = _LUMA_R * rgb[:, :, 0] + _LUMA_G * rgb[:, :, 1] + _LUMA_B * rgb[:, :, 2]
    out = np.floor(y + 0.5)  # y >= 0, so this is round-half-away-from-zero
    return GrayImage(np.clip(out, 0, 255).astype(np.uint8))


def _reflect_indices(n: int, radius: int) -> np.ndarray:
    """Index map of length n + 2*radius implementing mirror padding.

    Mirrors without repeating the edge sample (...c b | a b c... for row
    a b c), degenerating to constant padding for n == 1.
    """
    idx = np.arange(-radius, n + radius)
    if n == 1:
        return np.zeros_like(idx)
    period = 2 * n - 2
    idx = np.abs(idx) % period
    return np.where(idx >= n, period - idx, idx)


def gaussian_kernel_5(sigma: float) -> np.ndarray:
    """Normalized 5-tap kernel sampled from exp(-d^2 / 2 sigma^2), d in -2..2."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    d = np.arange(-2, 3, dtype=np.float64)
    k = np.exp(-(d * d) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_blur_5x5(img: GrayImage, sigma: float = 1.0) -> GrayImage:
    """Smooth with a normalized 5x5 sampled Gaussian, mirrored borders.

    Separable float64 convolution with a single rounding step at the end
    (half away from zero). The taps of each pass are accumulated in
    symmetric pairs so that the result commutes exactly with horizontal
    and vertical flips.
    """
    k = gaussian_kernel_5(sigma)
    a = img.pixels.astype(np.float64)
    h, w = a.shape

    cols = _reflect_indices(w, 2)
    p = a[:, cols]
    t = k[0] * (p[:, :w] + p[:, 4 : 4 + w]) + k[1] * (p[:, 1 : 1 + w] + p[:, 3 : 3 + w]) + k[2] * p[:, 2 : 2 + w]

    rows = _reflect_indices(h, 2)
    p = t[rows, :]
    out = k[0] * (p[:h, :] + p[4 : 4 + h, :]) + k[1] * (p[1 : 1 + h, :] + p[3 : 3 + h, :]) + k[2] * p[2 : 2 + h, :]

    return GrayImage(np.floor(out + 0.5).astype(np.uint8))
