"""Shared fixtures and independent oracle implementations.

The oracles here deliberately use the most direct formulation available
(exhaustive search, per-pixel window sums, BFS labeling) and share no code
with the library paths they check.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction

import numpy as np
import pytest


def otsu_brute_force(pixels: np.ndarray) -> int:
    """Try all 256 thresholds with exact two-pass mean/weight arithmetic."""
    values = pixels.ravel()
    n = values.size
    best_t, best_var = 0, Fraction(-1)
    for t in range(256):
        c0 = values <= t
        n0 = int(c0.sum())
        n1 = n - n0
        if n0 == 0 or n1 == 0:
            continue
        mu0 = Fraction(int(values[c0].sum()), n0)
        mu1 = Fraction(int(values[~c0].sum()), n1)
        var = Fraction(n0, n) * Fraction(n1, n) * (mu0 - mu1) ** 2
        if var > best_var:
            best_var, best_t = var, t
    return best_t


def reflect_index(i: int, n: int) -> int:
    """Mirror without edge repetition (…c b | a b c… for row a b c)."""
    if n == 1:
        return 0
    period = 2 * n - 2
    i = abs(i) % period
    return period - i if i >= n else i


def adaptive_naive(pixels: np.ndarray, block: int, c: int) -> np.ndarray:
    """O(block^2) per-pixel windowed mean threshold, exact integers."""
    h, w = pixels.shape
    r = block // 2
    out = np.zeros((h, w), dtype=bool)
    cnt = block * block
    for y in range(h):
        for x in range(w):
            s = 0
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    s += int(pixels[reflect_index(y + dy, h), reflect_index(x + dx, w)])
            out[y, x] = (int(pixels[y, x]) - c) * cnt > s
    return out


def label_components(mask: np.ndarray, connectivity: int = 8):
    """BFS connected-component labeling. Returns (labels, count) with
    labels 1..count and 0 for background."""
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    if connectivity == 8:
        neigh = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
    else:
        neigh = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    count = 0
    for y in range(h):
        for x in range(w):
            if mask[y, x] and labels[y, x] == 0:
                count += 1
                labels[y, x] = count
                dq = deque([(y, x)])
                while dq:
                    cy, cx = dq.popleft()
                    for dy, dx in neigh:
                        ny, nx = cy + dy, cx + dx
                        if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and labels[ny, nx] == 0:
                            labels[ny, nx] = count
                            dq.append((ny, nx))
    return labels, count


def count_holes(mask: np.ndarray) -> int:
    """Interior holes = 4-connected background components not touching the
    image border."""
    bg = ~mask
    labels, count = label_components(bg, connectivity=4)
    border = set(labels[0, :]) | set(labels[-1, :]) | set(labels[:, 0]) | set(labels[:, -1])
    border.discard(0)
    return count - len(border)


def rdp_oracle(points: list, epsilon: float) -> list:
    """Plain recursive Ramer-Douglas-Peucker on an open chain."""
    import math

    def seg_dist(p, a, b):
        ax, ay = a
        bx, by = b
        dx, dy = bx - ax, by - ay
        if dx == dy == 0:
            return math.hypot(p[0] - ax, p[1] - ay)
        t = max(0.0, min(1.0, ((p[0] - ax) * dx + (p[1] - ay) * dy) / (dx * dx + dy * dy)))
        return math.hypot(p[0] - ax - t * dx, p[1] - ay - t * dy)

    if len(points) <= 2:
        return list(points)
    dmax, imax = -1.0, 0
    for i in range(1, len(points) - 1):
        d = seg_dist(points[i], points[0], points[-1])
        if d > dmax:
            dmax, imax = d, i
    if dmax <= epsilon:
        return [points[0], points[-1]]
    return rdp_oracle(points[: imax + 1], epsilon)[:-1] + rdp_oracle(points[imax:], epsilon)


def subcontour_oracle(boxes: list) -> list:
    """Pairwise O(n^2) survivor computation: drop any box strictly inside
    another, and among identical boxes keep the lowest index."""
    survivors = []
    for i, a in enumerate(boxes):
        doomed = False
        for j, b in enumerate(boxes):
            if i == j:
                continue
            strictly_inside = (
                b != a
                and a[0] >= b[0]
                and a[1] >= b[1]
                and a[0] + a[2] <= b[0] + b[2]
                and a[1] + a[3] <= b[1] + b[3]
            )
            duplicate = b == a and j < i
            if strictly_inside or duplicate:
                doomed = True
                break
        if not doomed:
            survivors.append(i)
    return survivors


def random_blob_mask(rng: np.random.Generator, h: int = 48, w: int = 48) -> np.ndarray:
    """Random mask built from overlapping rectangles and disks, plus a few
    punched holes; exercises nesting, thin structures and diagonals."""
    mask = np.zeros((h, w), dtype=bool)
    for _ in range(rng.integers(1, 6)):
        if rng.random() < 0.5:
            y, x = rng.integers(0, h - 4), rng.integers(0, w - 4)
            bh, bw = rng.integers(2, h // 2), rng.integers(2, w // 2)
            mask[y : y + bh, x : x + bw] = True
        else:
            cy, cx = rng.integers(2, h - 2), rng.integers(2, w - 2)
            r = rng.integers(2, 9)
            yy, xx = np.mgrid[0:h, 0:w]
            mask |= (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r
    for _ in range(rng.integers(0, 4)):
        y, x = rng.integers(1, h - 3), rng.integers(1, w - 3)
        bh, bw = rng.integers(1, 6), rng.integers(1, 6)
        mask[y : y + bh, x : x + bw] = False
    return mask


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
