"""Boundary extraction from binary masks and the geometry used downstream.

The tracer is a border-following algorithm in the Suzuki-Abe style over
8-connected foreground: one outer contour per component, one hole contour
per interior hole, discovered in raster order of their starting pixels.
The full nesting hierarchy is deliberately flattened to kind in
{outer, hole}; the pipeline only needs outer contours plus bounding-box
containment.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .raster import BinaryImage

# 8-neighborhood in clockwise screen order (y down), starting East.
_DIRS = ((0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1))
_DIR_INDEX = {d: i for i, d in enumerate(_DIRS)}


@dataclass(frozen=True)
class BoundingBox:
    """Tight axis-aligned pixel box; w and h are extents (>= 1)."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError("box extents must be >= 1")

    @property
    def area(self) -> int:
        return self.w * self.h


@dataclass(frozen=True, eq=False)
class Contour:
    """Closed boundary trace: (N, 2) array of (x, y) pixel coordinates.

    Consecutive points are 8-adjacent and the trace is closed. Orientation
    is canonical: outer contours have non-negative signed shoelace area on
    raw (x, y) coordinates, holes non-positive (with y growing downward
    this renders outer traces clockwise on screen).
    """

    points: np.ndarray
    kind: str  # "outer" | "hole"
    id: int

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.int64)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise ValueError("contour needs an (N, 2) point array")
        if self.kind not in ("outer", "hole"):
            raise ValueError("kind must be 'outer' or 'hole'")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class Polygon:
    vertices: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=np.int64)
        v.flags.writeable = False
        object.__setattr__(self, "vertices", v)

    def __len__(self) -> int:
        return self.vertices.shape[0]


def signed_area(points: np.ndarray) -> float:
    """Shoelace formula on an (N, 2) closed polygon, half sum of cross terms."""
    x = points[:, 0]
    y = points[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _trace_border(f: np.ndarray, i: int, j: int, i2: int, j2: int, nbd: int) -> list:
    """Follow one border from start pixel (i, j) with zero-neighbor (i2, j2).

    Marks visited pixels in the label image f: -nbd where the east neighbor
    was examined and found zero during the walk, nbd for untouched pixels.
    Returns the border as a list of (i, j) pixels.
    """
    start_dir = _DIR_INDEX[(i2 - i, j2 - j)]
    # look clockwise around the start for a nonzero pixel
    found = -1
    for k in range(1, 9):
        d = (start_dir + k) % 8
        if f[i + _DIRS[d][0], j + _DIRS[d][1]] != 0:
            found = d
            break
    if found < 0:
        f[i, j] = -nbd  # isolated pixel
        return [(i, j)]

    points = []
    i1, j1 = i + _DIRS[found][0], j + _DIRS[found][1]
    i2, j2 = i1, j1
    i3, j3 = i, j
    while True:
        # counterclockwise from the pixel after (i2, j2) around (i3, j3)
        prev_dir = _DIR_INDEX[(i2 - i3, j2 - j3)]
        east_zero = False
        i4 = j4 = -1
        for k in range(1, 9):
            d = (prev_dir - k) % 8
            di, dj = _DIRS[d]
            if f[i3 + di, j3 + dj] != 0:
                i4, j4 = i3 + di, j3 + dj
                break
            if d == 0:
                east_zero = True
        if east_zero:
            f[i3, j3] = -nbd
        elif f[i3, j3] == 1:
            f[i3, j3] = nbd
        points.append((i3, j3))
        if i4 == i and j4 == j and i3 == i1 and j3 == j1:
            break
        i2, j2 = i3, j3
        i3, j3 = i4, j4
    return points


def extract_contours(mask: BinaryImage) -> list:
    """Trace all outer and hole borders of 8-connected foreground.

    Returns contours ordered by the raster position of their start pixel,
    with sequential ids. An empty mask yields an empty list.
    """
    h, w = mask.pixels.shape
    f = np.zeros((h + 2, w + 2), dtype=np.int32)
    f[1:-1, 1:-1] = mask.pixels

    fg = f != 0
    outer_i, outer_j = np.nonzero(fg[1:-1, 1:-1] & ~fg[1:-1, :-2])
    hole_i, hole_j = np.nonzero(fg[1:-1, 1:-1] & ~fg[1:-1, 2:])

    # merge outer and hole start candidates in raster order; at the same
    # pixel the outer test comes first
    cand_i = np.concatenate([outer_i, hole_i]) + 1
    cand_j = np.concatenate([outer_j, hole_j]) + 1
    cand_hole = np.concatenate(
        [np.zeros(outer_i.size, np.int8), np.ones(hole_i.size, np.int8)]
    )
    order = np.lexsort((cand_hole, cand_j, cand_i))

    contours = []
    nbd = 1
    for idx in order:
        i = int(cand_i[idx])
        j = int(cand_j[idx])
        if cand_hole[idx] == 0:
            if f[i, j] != 1:
                continue
            kind = "outer"
            i2, j2 = i, j - 1
        else:
            if f[i, j] < 1:
                continue
            kind = "hole"
            i2, j2 = i, j + 1
        nbd += 1
        raw = _trace_border(f, i, j, i2, j2, nbd)
        pts = np.array([(pj - 1, pi - 1) for pi, pj in raw], dtype=np.int64)
        if len(pts) > 1:
            area = signed_area(pts)
            if (kind == "outer" and area < 0) or (kind == "hole" and area > 0):
                pts = pts[::-1]
        contours.append(Contour(points=pts, kind=kind, id=len(contours)))
    return contours


def bounding_box(c: Contour) -> BoundingBox:
    """Tight axis-aligned box around the contour points."""
    xs = c.points[:, 0]
    ys = c.points[:, 1]
    x0, x1 = int(xs.min()), int(xs.max())
    y0, y1 = int(ys.min()), int(ys.max())
    return BoundingBox(x0, y0, x1 - x0 + 1, y1 - y0 + 1)


def contour_area(c: Contour) -> float:
    """Area enclosed by the traced polygon (absolute shoelace value)."""
    if len(c) < 3:
        return 0.0
    return abs(signed_area(c.points))


def perimeter(c: Contour) -> float:
    """Closed polyline length of the trace (diagonal steps count sqrt(2))."""
    if len(c) < 2:
        return 0.0
    d = np.diff(np.vstack([c.points, c.points[:1]]), axis=0)
    return float(np.hypot(d[:, 0], d[:, 1]).sum())


def _point_segment_dist(p, a, b) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    if dx == 0 and dy == 0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / (dx * dx + dy * dy)
    t = max(0.0, min(1.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _rdp(points: list, epsilon: float) -> list:
    """Ramer-Douglas-Peucker on an open chain, keeping both endpoints."""
    if len(points) <= 2:
        return list(points)
    a, b = points[0], points[-1]
    dmax, imax = -1.0, -1
    for i in range(1, len(points) - 1):
        d = _point_segment_dist(points[i], a, b)
        if d > dmax:
            dmax, imax = d, i
    if dmax <= epsilon:
        return [a, b]
    left = _rdp(points[: imax + 1], epsilon)
    right = _rdp(points[imax:], epsilon)
    return left[:-1] + right


def approx_polygon(c: Contour, epsilon: float) -> Polygon:
    """Simplify a closed contour so dropped points deviate at most epsilon.

    The loop is split at the point farthest from the first point and each
    half is simplified independently, the standard closed-curve treatment.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    pts = [tuple(p) for p in c.points.tolist()]
    if len(pts) <= 3:
        return Polygon(np.array(pts, dtype=np.int64))
    d = c.points - c.points[0]
    far = int(np.argmax(d[:, 0] ** 2 + d[:, 1] ** 2))
    first = _rdp(pts[: far + 1], epsilon)
    second = _rdp(pts[far:] + [pts[0]], epsilon)
    merged = first[:-1] + second[:-1]
    return Polygon(np.array(merged, dtype=np.int64))


def is_convex(poly: Polygon) -> bool:
    """True when all turns share one orientation (collinear runs allowed)."""
    v = poly.vertices
    n = len(v)
    if n < 3:
        return False
    sign = 0
    for k in range(n):
        ax, ay = v[k]
        bx, by = v[(k + 1) % n]
        cx, cy = v[(k + 2) % n]
        cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        if cross != 0:
            s = 1 if cross > 0 else -1
            if sign == 0:
                sign = s
            elif s != sign:
                return False
    return True


def box_contains(outer: BoundingBox, inner: BoundingBox) -> bool:
    """True iff inner lies entirely within outer (inclusive) and differs."""
    if inner == outer:
        return False
    return (
        inner.x >= outer.x
        and inner.y >= outer.y
        and inner.x + inner.w <= outer.x + outer.w
        and inner.y + inner.h <= outer.y + outer.h
    )


def fill_contour(c: Contour, include_boundary: bool = True):
    """Rasterize the region enclosed by a closed contour.

    Returns (mask, origin) where mask is a bool array over the contour's
    bounding box and origin is the box's (x, y). The enclosed set is
    computed by 4-connected flooding from outside the trace; an
    8-connected closed curve is airtight against a 4-connected flood.
    With include_boundary=False only strictly enclosed pixels are set
    (used for hole interiors).
    """
    box = bounding_box(c)
    w, h = box.w + 2, box.h + 2
    on = np.zeros((h, w), dtype=bool)
    xs = c.points[:, 0] - box.x + 1
    ys = c.points[:, 1] - box.y + 1
    on[ys, xs] = True

    outside = np.zeros((h, w), dtype=bool)
    dq = deque()
    for x in range(w):
        for y in (0, h - 1):
            if not on[y, x]:
                outside[y, x] = True
                dq.append((y, x))
    for y in range(h):
        for x in (0, w - 1):
            if not on[y, x] and not outside[y, x]:
                outside[y, x] = True
                dq.append((y, x))
    while dq:
        y, x = dq.popleft()
        if y > 0 and not on[y - 1, x] and not outside[y - 1, x]:
            outside[y - 1, x] = True
            dq.append((y - 1, x))
        if y < h - 1 and not on[y + 1, x] and not outside[y + 1, x]:
            outside[y + 1, x] = True
            dq.append((y + 1, x))
        if x > 0 and not on[y, x - 1] and not outside[y, x - 1]:
            outside[y, x - 1] = True
            dq.append((y, x - 1))
        if x < w - 1 and not on[y, x + 1] and not outside[y, x + 1]:
            outside[y, x + 1] = True
            dq.append((y, x + 1))

    region = ~outside
    if not include_boundary:
        region &= ~on
    return region[1:-1, 1:-1], (box.x, box.y)
