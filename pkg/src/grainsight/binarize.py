"""Global (Otsu) and locally adaptive thresholding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import BinaryImage, GrayImage, _reflect_indices


@dataclass(frozen=True)
class Histogram256:
    """256-bin intensity histogram; total equals the source pixel count."""

    counts: tuple
    total: int


@dataclass(frozen=True)
class AdaptiveParams:
    """Mean-window adaptive threshold parameters.

    A pixel is foreground iff it exceeds the mean of the block_size x
    block_size window centered on it (mirrored at borders) by more than
    offset_c. Set bright_foreground=False to flip polarity.
    """

    block_size: int = 51
    offset_c: int = 5
    bright_foreground: bool = True

    def __post_init__(self):
        if self.block_size < 3 or self.block_size % 2 == 0:
            raise ValueError("block_size must be odd and >= 3")


def histogram256(img: GrayImage) -> Histogram256:
    counts = np.bincount(img.pixels.ravel(), minlength=256)
    return Histogram256(tuple(int(c) for c in counts), int(counts.sum()))


def otsu_threshold(img: GrayImage) -> int:
    """Threshold maximizing between-class variance of the 256-bin histogram.

    Class 0 holds intensities <= t, class 1 holds intensities > t. Ties are
    broken toward the smallest t; an image where no split produces two
    non-empty classes (constant image) yields 0. Comparisons use exact
    integer arithmetic so the argmax is platform independent.
    """
    hist = np.bincount(img.pixels.ravel(), minlength=256)
    n = int(hist.sum())
    total_sum = int(np.dot(hist, np.arange(256)))

    best_t = 0
    # between-class variance ~ (S0*n - S*n0)^2 / (n0*n1); compare fractions
    # a/b vs c/d exactly via a*d vs c*b on Python integers
    best_num = -1
    best_den = 1
    n0 = 0
    s0 = 0
    for t in range(256):
        c = int(hist[t])
        n0 += c
        s0 += t * c
        n1 = n - n0
        if n0 == 0 or n1 == 0:
            continue
        num = (s0 * n - total_sum * n0) ** 2
        den = n0 * n1
        if num * best_den > best_num * den:
            best_num = num
            best_den = den
            best_t = t
    return best_t


def apply_global_threshold(img: GrayImage, t: int) -> BinaryImage:
    """Foreground iff intensity strictly exceeds t."""
    return BinaryImage(img.pixels > t)


def window_sums(arr: np.ndarray, block_size: int) -> np.ndarray:
    """Sum over the block x block window centered on each pixel.

    Mirror padding keeps the window count constant at block_size^2
    everywhere. Computed exactly in int64 via a summed-area table.
    """
    r = block_size // 2
    rows = _reflect_indices(arr.shape[0], r)
    cols = _reflect_indices(arr.shape[1], r)
    p = arr[np.ix_(rows, cols)].astype(np.int64)
    ii = np.zeros((p.shape[0] + 1, p.shape[1] + 1), dtype=np.int64)
    ii[1:, 1:] = p.cumsum(axis=0).cumsum(axis=1)
    b = block_size
    return ii[b:, b:] - ii[:-b, b:] - ii[b:, :-b] + ii[:-b, :-b]


def adaptive_threshold(img: GrayImage, params: AdaptiveParams) -> BinaryImage:
    """Binarize against the local window mean plus offset_c.

    The comparison pixel > mean + C is evaluated as
    (pixel - C) * count > sum in exact integer arithmetic, so the output
    is bit-identical to a naive windowed-mean reference.
    """
    sums = window_sums(img.pixels, params.block_size)
    count = params.block_size * params.block_size
    px = img.pixels.astype(np.int64)
    if params.bright_foreground:
        fg = (px - params.offset_c) * count > sums
    else:
        fg = (px + params.offset_c) * count < sums
    return BinaryImage(fg)
