"""Marker-particle solver evolving a polyline directly along its normals.

Deliberately simple (forward Euler, turning-angle curvature, bisector
normals): its value is structural independence from the turning-angle PDE
engine, which it cross-validates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import CurvatureProfile, PolylineCurve, length, reconstruct, resample_profile
from .flows import FlowSpec, FlowVariant, SolverConfig, Termination, cfl_dt, evolve
from .geometry import GeometryError, hausdorff_distance, polygon_centroid, polygon_perimeter
from .grid import TWO_PI

RESAMPLE_EVERY = 20  # steps between arclength resamplings of the markers
MAX_EDGE_RATIO = 3.0


@dataclass(frozen=True)
class MarkerState:
    """Marker polyline at one instant; the mesh is kept quasi-uniform."""

    points: PolylineCurve
    t: float

    def __post_init__(self) -> None:
        pts = self.points.points
        edges = np.roll(pts, -1, axis=0) - pts
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        ratio = float(lengths.max() / lengths.min())
        if ratio > MAX_EDGE_RATIO:
            raise GeometryError(f"marker mesh too distorted (edge ratio {ratio:.2f})")


def polyline_curvature(c: PolylineCurve) -> np.ndarray:
    """Vertex curvature: turning angle over the average of the adjacent edges.

    Positive for convex positively oriented input.
    """
    pts = c.points
    edges = np.roll(pts, -1, axis=0) - pts
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    diameter = float(np.hypot(np.ptp(pts[:, 0]), np.ptp(pts[:, 1])))
    if np.any(lengths < 1e-12 * diameter):
        raise GeometryError("degenerate edge in polyline")
    incoming = np.roll(edges, 1, axis=0)
    turning = np.arctan2(
        incoming[:, 0] * edges[:, 1] - incoming[:, 1] * edges[:, 0],
        incoming[:, 0] * edges[:, 0] + incoming[:, 1] * edges[:, 1],
    )
    avg = 0.5 * (lengths + np.roll(lengths, 1))
    return turning / avg


def _inward_normals(pts: np.ndarray) -> np.ndarray:
    # Bisector tangent rotated by +pi/2 points inward for positive orientation.
    edges = np.roll(pts, -1, axis=0) - pts
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    unit = edges / lengths[:, None]
    bis = unit + np.roll(unit, 1, axis=0)
    norm = np.hypot(bis[:, 0], bis[:, 1])
    bis = bis / norm[:, None]
    return np.column_stack([-bis[:, 1], bis[:, 0]])


def _marker_speed(variant: FlowVariant, kappa: np.ndarray, ds: np.ndarray) -> np.ndarray:
    if variant is FlowVariant.LENGTH_PRESERVING:
        return kappa - float(np.sum(kappa**2 * ds)) / TWO_PI
    if variant is FlowVariant.AREA_PRESERVING:
        return kappa - TWO_PI / float(ds.sum())
    if variant is FlowVariant.SHORTENING:
        return kappa
    if variant is FlowVariant.PAN_YANG:
        return float(ds.sum()) / TWO_PI - 1.0 / kappa
    raise ValueError(f"unknown flow variant {variant!r}")


def oracle_step(state: MarkerState, spec: FlowSpec, dt: float) -> MarkerState:
    """Move every vertex by dt * F along the inward bisector normal.

    The nonlocal scalar uses the discrete arclength integral (1/2pi) sum
    kappa_i^2 ds_i.  Convexity loss raises a termination signal.
    """
    pts = state.points.points
    kappa = polyline_curvature(state.points)
    edges = np.roll(pts, -1, axis=0) - pts
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    ds = 0.5 * (lengths + np.roll(lengths, 1))
    speed = _marker_speed(spec.variant, kappa, ds)
    moved = pts + dt * speed[:, None] * _inward_normals(pts)
    try:
        new_poly = PolylineCurve(moved)
    except ValueError as exc:  # includes ConvexityError
        raise GeometryError(f"marker front lost convexity: {exc}") from exc
    return MarkerState(points=new_poly, t=state.t + dt)


def resample_by_arclength(c: PolylineCurve, m: int) -> PolylineCurve:
    """Place m points equally spaced in arclength along the polygon.

    The result is rescaled about its centroid so the perimeter is preserved
    exactly; without that, repeated resampling would systematically shave the
    corners and shrink the front.
    """
    if m < 8:
        raise ValueError(f"need at least 8 points, got {m}")
    pts = c.points
    edges = np.roll(pts, -1, axis=0) - pts
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    cumulative = np.concatenate([[0.0], np.cumsum(lengths)])
    perimeter = cumulative[-1]
    targets = perimeter * np.arange(m) / m
    segment = np.searchsorted(cumulative, targets, side="right") - 1
    segment = np.clip(segment, 0, len(lengths) - 1)
    frac = (targets - cumulative[segment]) / lengths[segment]
    new_pts = pts[segment] + frac[:, None] * edges[segment]
    new_perimeter = polygon_perimeter(new_pts)
    cx, cy = polygon_centroid(new_pts)
    scale = perimeter / new_perimeter
    rescaled = np.column_stack(
        [cx + scale * (new_pts[:, 0] - cx), cy + scale * (new_pts[:, 1] - cy)]
    )
    return PolylineCurve(rescaled)


def oracle_dt(c: PolylineCurve, safety: float = 0.25) -> float:
    """Forward-Euler step bound: safety * (min edge length)^2."""
    pts = c.points
    edges = np.roll(pts, -1, axis=0) - pts
    h_min = float(np.hypot(edges[:, 0], edges[:, 1]).min())
    return safety * h_min * h_min


def run_markers(
    initial: PolylineCurve,
    spec: FlowSpec,
    sample_times,
    resample_every: int = RESAMPLE_EVERY,
) -> list[PolylineCurve]:
    """Advance markers through the sorted sample times, resampling periodically."""
    state = MarkerState(points=initial, t=0.0)
    m = len(initial)
    out = []
    steps = 0
    for target in sample_times:
        while state.t < target - 1e-14:
            dt = min(oracle_dt(state.points), target - state.t)
            state = oracle_step(state, spec, dt)
            steps += 1
            if steps % resample_every == 0:
                state = MarkerState(points=resample_by_arclength(state.points, m), t=state.t)
        out.append(state.points)
    return out


def cross_validate(
    initial: CurvatureProfile,
    spec: FlowSpec,
    t_horizon: float,
    n: int,
    m: int,
    num_samples: int = 11,
) -> list[tuple[float, float]]:
    """Run the PDE engine at resolution n and the markers at m vertices.

    Both solvers start from the same curve; at shared sample times each front
    is centered at its area centroid and the Hausdorff distance is reported.
    """
    profile = initial if initial.grid.n == n else resample_profile(initial, n)
    markers = resample_by_arclength(reconstruct(profile), m)
    sample_times = [t_horizon * i / (num_samples - 1) for i in range(1, num_samples)]

    marker_fronts = run_markers(markers, spec, sample_times)

    results = [(0.0, _centered_distance(reconstruct(profile), markers))]
    current = profile
    t = 0.0
    for target, front in zip(sample_times, marker_fronts):
        cfg = SolverConfig(t_end=target - t, record_stride=10**9)
        trajectory = evolve(current, spec, cfg)
        if trajectory.termination is not Termination.COMPLETED:
            raise GeometryError(f"engine terminated during cross validation: {trajectory.detail}")
        current = trajectory.snapshots[-1]
        t = target
        results.append((target, _centered_distance(reconstruct(current), front)))
    return results


def _centered_distance(c1: PolylineCurve, c2: PolylineCurve) -> float:
    p1 = c1.points - np.asarray(polygon_centroid(c1))
    p2 = c2.points - np.asarray(polygon_centroid(c2))
    return hausdorff_distance(p1, p2)
