"""Convex-polygon radii, Hausdorff distance, and inequality checks for runs.

The inequality gadgets (isoperimetric deficit, Bonnesen, Gage, and the
Gage-Hamilton windowed curvature bound) are evaluated on curvature profiles
and their reconstructed polylines as step-by-step sanity checks of the flows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import minimum_filter1d
from scipy.optimize import linprog

from .curves import CurvatureProfile, PolylineCurve, area, curvature_mean, length
from .grid import TWO_PI


class GeometryError(ValueError):
    """Degenerate geometry input."""


@dataclass(frozen=True)
class RadiiPair:
    """Radii and centers of the largest inscribed and smallest circumscribed circles."""

    r_in: float
    r_out: float
    center_in: tuple[float, float]
    center_out: tuple[float, float]

    def __post_init__(self) -> None:
        if self.r_in <= 0.0 or self.r_out <= 0.0:
            raise GeometryError(f"radii must be positive, got {self.r_in}, {self.r_out}")
        if self.r_in > self.r_out * (1.0 + 1e-9):
            raise GeometryError(f"inradius {self.r_in} exceeds circumradius {self.r_out}")


def _points_of(c) -> np.ndarray:
    return np.asarray(getattr(c, "points", c), dtype=float)


def polygon_perimeter(c) -> float:
    pts = _points_of(c)
    edges = np.roll(pts, -1, axis=0) - pts
    return float(np.hypot(edges[:, 0], edges[:, 1]).sum())


def polygon_area(c) -> float:
    """Signed shoelace area; positive for positively oriented polygons."""
    pts = _points_of(c)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_centroid(c) -> tuple[float, float]:
    pts = _points_of(c)
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    w = x * yn - xn * y
    a = 0.5 * float(w.sum())
    if abs(a) < 1e-300:
        raise GeometryError("degenerate polygon has no area centroid")
    cx = float(np.sum((x + xn) * w)) / (6.0 * a)
    cy = float(np.sum((y + yn) * w)) / (6.0 * a)
    return (cx, cy)


def inradius(c) -> tuple[float, tuple[float, float]]:
    """Chebyshev center of the polygon: the largest inscribed circle.

    Solved as the 3-variable linear program max r subject to
    n_i . x + r <= h_i over the edge half-planes (n_i outward unit normal).
    """
    pts = _points_of(c)
    if pts.shape[0] < 3:
        raise GeometryError("need at least 3 vertices for an inscribed circle")
    edges = np.roll(pts, -1, axis=0) - pts
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    diameter = float(np.hypot(np.ptp(pts[:, 0]), np.ptp(pts[:, 1])))
    keep = lengths > 1e-14 * max(diameter, 1e-300)
    if keep.sum() < 3 or abs(polygon_area(pts)) <= 1e-12 * diameter**2:
        raise GeometryError("degenerate polygon: no inscribed circle")
    # Outward normals of a positively oriented polygon.
    normals = np.column_stack([edges[keep, 1], -edges[keep, 0]]) / lengths[keep, None]
    offsets = np.einsum("ij,ij->i", normals, pts[keep])
    result = linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=np.column_stack([normals, np.ones(len(offsets))]),
        b_ub=offsets,
        bounds=[(None, None), (None, None), (0.0, None)],
        method="highs",
    )
    if not result.success or result.x[2] <= 0.0:
        raise GeometryError("degenerate polygon: no inscribed circle")
    return float(result.x[2]), (float(result.x[0]), float(result.x[1]))


def circumradius(c, seed: int = 0) -> tuple[float, tuple[float, float]]:
    """Minimum enclosing circle of the vertices.

    Randomized incremental construction, expected linear time; the shuffle
    uses a fixed seed so results are deterministic.
    """
    pts = _points_of(c)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise GeometryError("need at least 2 points for an enclosing circle")
    order = np.random.default_rng(seed).permutation(pts.shape[0])
    shuffled = pts[order]
    circle = None
    for i in range(shuffled.shape[0]):
        p = shuffled[i]
        if circle is None or not _in_circle(circle, p):
            circle = _circle_with_one(shuffled[: i + 1], p)
    cx, cy, r = circle
    return float(r), (float(cx), float(cy))


def _in_circle(circle, p) -> bool:
    cx, cy, r = circle
    return float(np.hypot(p[0] - cx, p[1] - cy)) <= r * (1.0 + 1e-12) + 1e-300


def _circle_with_one(pts, p):
    circle = (float(p[0]), float(p[1]), 0.0)
    for i in range(pts.shape[0]):
        q = pts[i]
        if not _in_circle(circle, q):
            if circle[2] == 0.0:
                circle = _diameter_circle(p, q)
            else:
                circle = _circle_with_two(pts[: i + 1], p, q)
    return circle


def _circle_with_two(pts, p, q):
    circle = _diameter_circle(p, q)
    for r in pts:
        if not _in_circle(circle, r):
            circle = _circumcircle(p, q, r)
    return circle


def _diameter_circle(a, b):
    cx, cy = 0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])
    return (cx, cy, float(np.hypot(a[0] - cx, a[1] - cy)))


def _circumcircle(a, b, c):
    d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    if abs(d) < 1e-300:
        # Collinear support set: fall back to the widest diameter circle.
        candidates = [_diameter_circle(a, b), _diameter_circle(a, c), _diameter_circle(b, c)]
        return max(candidates, key=lambda circ: circ[2])
    sa = a[0] ** 2 + a[1] ** 2
    sb = b[0] ** 2 + b[1] ** 2
    sc = c[0] ** 2 + c[1] ** 2
    ux = (sa * (b[1] - c[1]) + sb * (c[1] - a[1]) + sc * (a[1] - b[1])) / d
    uy = (sa * (c[0] - b[0]) + sb * (a[0] - c[0]) + sc * (b[0] - a[0])) / d
    return (ux, uy, float(np.hypot(a[0] - ux, a[1] - uy)))


def radii_of(c, seed: int = 0) -> RadiiPair:
    """Inradius and circumradius of a convex polyline as one record."""
    r_in, center_in = inradius(c)
    r_out, center_out = circumradius(c, seed=seed)
    return RadiiPair(r_in=r_in, r_out=r_out, center_in=center_in, center_out=center_out)


# ---------------------------------------------------------------------------
# inequality gadgets


def bonnesen_gap(L: float, A: float, radii: RadiiPair) -> float:
    """(L^2 - 4 pi A) - pi^2 (r_out - r_in)^2; Bonnesen's inequality says >= 0."""
    if L <= 0.0 or A <= 0.0:
        raise ValueError(f"need positive length and area, got L={L}, A={A}")
    return (L * L - 4.0 * np.pi * A) - np.pi**2 * (radii.r_out - radii.r_in) ** 2


def gage_gap(p: CurvatureProfile) -> float:
    """int k^2 ds - pi L / A; Gage's inequality says >= 0 for convex curves."""
    return TWO_PI * curvature_mean(p) - np.pi * length(p) / area(p)


def sustained_curvature(p: CurvatureProfile, w: float) -> float:
    """Largest level that k exceeds on some turning-angle window of width w.

    Windows are rounded up to whole grid cells (node span >= w).  Widening the
    window can only lower the value, so inequality checks built on it stay
    conservative under discretization.
    """
    dtheta = p.grid.dtheta
    if not 2.0 * dtheta <= w < TWO_PI:
        raise ValueError(f"window width must lie in [2 dtheta, 2 pi), got {w}")
    nodes = int(np.ceil(w / dtheta - 1e-12)) + 1
    nodes = min(nodes, p.grid.n)
    window_minima = minimum_filter1d(p.k, size=nodes, mode="wrap")
    return float(window_minima.max())


def window_gauge(w: float) -> float:
    """Decreasing gauge 2 cos(w/2) / (1 - cos(w/2)) on (0, pi].

    Pairs with r_out / r_in in the inscribed-radius curvature bound; diverges
    as w -> 0 and vanishes at w = pi.
    """
    if not 0.0 < w <= np.pi:
        raise ValueError(f"window width must lie in (0, pi], got {w}")
    c = np.cos(0.5 * w)
    return float(2.0 * c / (1.0 - c))


@dataclass(frozen=True)
class BoundCheck:
    """Result of the Gage-Hamilton windowed curvature bound."""

    active: bool
    passed: bool | None
    lhs: float
    rhs: float
    denominator: float


def gage_hamilton_bound_check(
    p: CurvatureProfile, c: PolylineCurve, w: float, seed: int = 0, slack: float = 1e-6
) -> BoundCheck:
    """Check sustained_curvature(p, w) * r_in <= 1 / (1 - gauge(w) (r_out/r_in - 1)).

    The bound is only meaningful while the denominator is positive; otherwise
    the check reports itself inactive.
    """
    radii = radii_of(c, seed=seed)
    denominator = 1.0 - window_gauge(w) * (radii.r_out / radii.r_in - 1.0)
    lhs = sustained_curvature(p, w) * radii.r_in
    if denominator <= 0.0:
        return BoundCheck(active=False, passed=None, lhs=lhs, rhs=np.inf, denominator=denominator)
    rhs = 1.0 / denominator
    return BoundCheck(
        active=True, passed=bool(lhs <= rhs + slack), lhs=lhs, rhs=rhs, denominator=denominator
    )


def hausdorff_distance(c1, c2) -> float:
    """Symmetric Hausdorff distance between closed polylines.

    Each one-sided distance is the max over vertices of the distance to the
    other polyline's segments.
    """
    p1, p2 = _points_of(c1), _points_of(c2)
    return max(_max_vertex_to_polyline(p1, p2), _max_vertex_to_polyline(p2, p1))


def _max_vertex_to_polyline(points: np.ndarray, poly: np.ndarray) -> float:
    starts = poly
    ends = np.roll(poly, -1, axis=0)
    d = ends - starts  # (m, 2)
    seg_len_sq = np.einsum("ij,ij->i", d, d)
    seg_len_sq = np.where(seg_len_sq < 1e-300, 1.0, seg_len_sq)
    rel = points[:, None, :] - starts[None, :, :]  # (p, m, 2)
    t = np.clip(np.einsum("pmj,mj->pm", rel, d) / seg_len_sq, 0.0, 1.0)
    nearest = starts[None, :, :] + t[:, :, None] * d[None, :, :]
    dist = np.hypot(points[:, None, 0] - nearest[:, :, 0], points[:, None, 1] - nearest[:, :, 1])
    return float(dist.min(axis=1).max())
