"""Time integration of the curvature evolution for four normal-speed laws.

The turning angle theta is kept as the independent variable (the tangential
reparametrization that freezes it never appears explicitly), so each flow
reduces to the scalar periodic PDE

    dk/dt = k^2 (F'' + F),      ' = d/dtheta,

where F is the normal speed along the inward normal:

    length preserving   F = k - mean(k)
    area preserving     F = k - 2 pi / L
    shortening          F = k
    pan_yang            F = L / (2 pi) - 1/k

The pan_yang sign is fixed so that the circle of the current length is
stationary and perturbations of it decay.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .curves import CurvatureProfile
from .grid import AngleGrid, TWO_PI, d2_theta, integrate


class FlowVariant(Enum):
    LENGTH_PRESERVING = "length_preserving"
    AREA_PRESERVING = "area_preserving"
    SHORTENING = "shortening"
    PAN_YANG = "pan_yang"


@dataclass(frozen=True)
class FlowSpec:
    """Which normal speed and which nonlocal term define the evolution."""

    variant: FlowVariant


LENGTH_PRESERVING = FlowSpec(FlowVariant.LENGTH_PRESERVING)
AREA_PRESERVING = FlowSpec(FlowVariant.AREA_PRESERVING)
SHORTENING = FlowSpec(FlowVariant.SHORTENING)
PAN_YANG = FlowSpec(FlowVariant.PAN_YANG)


class Termination(str, Enum):
    COMPLETED = "completed"
    CONVEXITY_LOST = "convexity_lost"
    BLOWUP = "blowup"
    NUMERICAL_FAILURE = "numerical_failure"


class FlowGuardError(RuntimeError):
    """A step produced a state outside the admissible curvature bracket."""

    def __init__(self, termination: Termination, state: np.ndarray, detail: str):
        super().__init__(detail)
        self.termination = termination
        self.state = state
        self.detail = detail


@dataclass(frozen=True)
class SolverConfig:
    """Step-size control, guard brackets, and recording cadence."""

    t_end: float
    scheme: str = "explicit_rk4"
    cfl: float = 0.25
    k_floor: float | None = None
    k_ceiling: float | None = None
    record_stride: int = 20
    projection: bool = False

    def __post_init__(self) -> None:
        if self.t_end <= 0.0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.scheme not in ("explicit_rk4", "imex"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.record_stride < 1:
            raise ValueError(f"record_stride must be >= 1, got {self.record_stride}")


@dataclass
class Trajectory:
    """Recorded history of one run.  Do not mutate after evolve returns.

    times, snapshots, and records are aligned; when a run terminates early the
    offending state is appended as the final snapshot without a record.
    """

    times: list[float]
    snapshots: list[CurvatureProfile]
    records: list
    termination: Termination
    steps: int
    detail: str = ""


# ---------------------------------------------------------------------------
# speeds and right-hand side


def _speed_raw(variant: FlowVariant, k: np.ndarray, grid: AngleGrid):
    if variant is FlowVariant.LENGTH_PRESERVING:
        alpha = integrate(k, grid) / TWO_PI
        return k - alpha, alpha
    if variant is FlowVariant.AREA_PRESERVING:
        alpha = TWO_PI / integrate(1.0 / k, grid)
        return k - alpha, alpha
    if variant is FlowVariant.SHORTENING:
        return k.copy(), 0.0
    if variant is FlowVariant.PAN_YANG:
        alpha = integrate(1.0 / k, grid) / TWO_PI
        return alpha - 1.0 / k, alpha
    raise ValueError(f"unknown flow variant {variant!r}")


def _rhs_raw(variant: FlowVariant, k: np.ndarray, grid: AngleGrid) -> np.ndarray:
    speed, _ = _speed_raw(variant, k, grid)
    return k * k * (d2_theta(speed, grid) + speed)


def normal_speed(spec: FlowSpec, p: CurvatureProfile) -> tuple[np.ndarray, float]:
    """Normal speed F per variant and the nonlocal scalar it uses."""
    return _speed_raw(spec.variant, p.k, p.grid)


def rhs(spec: FlowSpec, p: CurvatureProfile) -> np.ndarray:
    """dk/dt = k^2 (F'' + F)."""
    return _rhs_raw(spec.variant, p.k, p.grid)


def cfl_dt(p: CurvatureProfile, cfl: float) -> float:
    """Stable explicit step for the quasilinear diffusion coefficient k^2."""
    if not 0.0 < cfl <= 1.0:
        raise ValueError(f"cfl must lie in (0, 1], got {cfl}")
    return cfl * p.grid.dtheta**2 / float(np.max(p.k) ** 2)


# ---------------------------------------------------------------------------
# steps


def _guard(k: np.ndarray, k_floor: float, k_ceiling: float) -> None:
    if not np.all(np.isfinite(k)):
        raise FlowGuardError(Termination.NUMERICAL_FAILURE, k, "non-finite curvature")
    kmin, kmax = float(k.min()), float(k.max())
    if kmin < k_floor:
        raise FlowGuardError(
            Termination.CONVEXITY_LOST, k, f"min curvature {kmin:.3e} below floor {k_floor:.3e}"
        )
    if kmax > k_ceiling:
        raise FlowGuardError(
            Termination.BLOWUP, k, f"max curvature {kmax:.3e} above ceiling {k_ceiling:.3e}"
        )


def _project_closure(k: np.ndarray, grid: AngleGrid) -> np.ndarray:
    """Remove the first harmonic of 1/k, which is exactly the closure defect."""
    w = 1.0 / k
    th = grid.theta
    c1 = integrate(w * np.cos(th), grid) / np.pi
    s1 = integrate(w * np.sin(th), grid) / np.pi
    w = w - c1 * np.cos(th) - s1 * np.sin(th)
    if np.any(w <= 0.0):
        raise FlowGuardError(
            Termination.NUMERICAL_FAILURE, k, "closure projection produced nonconvex state"
        )
    return 1.0 / w


def step_rk4(
    spec: FlowSpec,
    p: CurvatureProfile,
    dt: float,
    *,
    k_floor: float = 0.0,
    k_ceiling: float = np.inf,
    projection: bool = False,
) -> CurvatureProfile:
    """Classical 4-stage explicit step; the nonlocal scalar is recomputed per stage."""
    grid, k = p.grid, p.k
    variant = spec.variant
    with np.errstate(all="ignore"):
        s1 = _rhs_raw(variant, k, grid)
        s2 = _rhs_raw(variant, k + 0.5 * dt * s1, grid)
        s3 = _rhs_raw(variant, k + 0.5 * dt * s2, grid)
        s4 = _rhs_raw(variant, k + dt * s3, grid)
        k_new = k + (dt / 6.0) * (s1 + 2.0 * (s2 + s3) + s4)
    _guard(k_new, k_floor, k_ceiling)
    if projection:
        k_new = _project_closure(k_new, grid)
        _guard(k_new, k_floor, k_ceiling)
    return CurvatureProfile(grid, k_new)


@lru_cache(maxsize=8)
def _d2_matrix(n: int) -> np.ndarray:
    grid = AngleGrid(n)
    mat = np.zeros((n, n))
    basis = np.zeros(n)
    for i in range(n):
        basis[:] = 0.0
        basis[i] = 1.0
        mat[:, i] = d2_theta(basis, grid)
    return mat


def step_imex(
    spec: FlowSpec,
    p: CurvatureProfile,
    dt: float,
    *,
    k_floor: float = 0.0,
    k_ceiling: float = np.inf,
    projection: bool = False,
) -> CurvatureProfile:
    """Semi-implicit step: implicit second derivative, lagged k^2 coefficient.

    First order in time; unconditionally stable in the diffusion term, which
    makes it the option for stiff, high-resolution runs.  The pan_yang speed
    is advanced through the reciprocal curvature, whose evolution is linear.
    """
    grid, k = p.grid, p.k
    n = grid.n
    d2 = _d2_matrix(n)
    with np.errstate(all="ignore"):
        if spec.variant is FlowVariant.PAN_YANG:
            v = 1.0 / k
            mean_width = integrate(v, grid) / TWO_PI
            lhs = np.eye(n) - dt * d2
            v_new = np.linalg.solve(lhs, v + dt * (v - mean_width))
            k_new = 1.0 / v_new
        else:
            _, alpha = _speed_raw(spec.variant, k, grid)
            lhs = np.eye(n) - dt * (k * k)[:, None] * d2
            k_new = np.linalg.solve(lhs, k + dt * k * k * (k - alpha))
    _guard(k_new, k_floor, k_ceiling)
    if projection:
        k_new = _project_closure(k_new, grid)
        _guard(k_new, k_floor, k_ceiling)
    return CurvatureProfile(grid, k_new)


_STEPPERS = {"explicit_rk4": step_rk4, "imex": step_imex}


# ---------------------------------------------------------------------------
# driver


def evolve(
    initial: CurvatureProfile, spec: FlowSpec, cfg: SolverConfig, recorder=None
) -> Trajectory:
    """Advance the flow to t_end with CFL-controlled steps and event detection.

    Records every record_stride steps and always at t = 0 and the final time.
    The recorder callable, when given, is invoked as recorder(t, profile) for
    every recorded snapshot and its return values are collected in order.
    Deterministic for a fixed (initial, spec, cfg).
    """
    grid = initial.grid
    k0 = initial.k
    reference = TWO_PI / integrate(1.0 / k0, grid)  # curvature of the equal-length circle
    k_floor = cfg.k_floor if cfg.k_floor is not None else 1e-4 * reference
    k_ceiling = cfg.k_ceiling if cfg.k_ceiling is not None else 1e4 * reference
    if k_floor >= float(k0.min()):
        raise ValueError(f"k_floor {k_floor:.3e} must lie below the initial minimum curvature")
    if k_ceiling <= float(k0.max()):
        raise ValueError(f"k_ceiling {k_ceiling:.3e} must lie above the initial maximum curvature")
    step = _STEPPERS[cfg.scheme]

    times = [0.0]
    snapshots = [initial]
    records = [] if recorder is None else [recorder(0.0, initial)]
    t = 0.0
    steps = 0
    steps_since_record = 0
    p = initial
    termination = Termination.COMPLETED
    detail = ""

    while True:
        remaining = cfg.t_end - t
        if remaining <= 1e-12 * cfg.t_end:
            break
        dt = min(cfl_dt(p, cfg.cfl), remaining)
        try:
            p = step(
                spec, p, dt, k_floor=k_floor, k_ceiling=k_ceiling, projection=cfg.projection
            )
        except FlowGuardError as exc:
            t += dt
            steps += 1
            times.append(t)
            snapshots.append(CurvatureProfile._unchecked(grid, exc.state))
            termination = exc.termination
            detail = exc.detail
            break
        t += dt
        steps += 1
        steps_since_record += 1
        at_end = (cfg.t_end - t) <= 1e-12 * cfg.t_end
        if steps_since_record >= cfg.record_stride or at_end:
            times.append(t)
            snapshots.append(p)
            if recorder is not None:
                records.append(recorder(t, p))
            steps_since_record = 0

    return Trajectory(
        times=times,
        snapshots=snapshots,
        records=records,
        termination=termination,
        steps=steps,
        detail=detail,
    )
