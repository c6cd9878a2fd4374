"""Per-snapshot functional records, identity/monotonicity checks, and rate fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .curves import (
    CurvatureProfile,
    closure_defect,
    curvature_mean,
    area,
    entropy,
    length,
    lyapunov,
    reconstruct,
    sobolev_norms,
)
from .geometry import RadiiPair, bonnesen_gap, radii_of
from .grid import TWO_PI, d2_theta, d_theta, integrate

# Fixed column order of run.csv; downstream plotting relies on it.
COLUMNS = (
    "t",
    "L",
    "A",
    "deficit",
    "alpha",
    "entropy",
    "lyapunov",
    "min_k",
    "max_k",
    "closure_x",
    "closure_y",
    "k1_2",
    "k2_2",
    "k1_4",
    "k1_inf",
    "r_in",
    "r_out",
    "bonnesen_gap",
    "gage_gap",
    "barrier",
)


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One time-stamped row of all monitored functionals.

    Radii-based fields are NaN when the recorder skips the (comparatively
    expensive) inscribed/circumscribed circle computation.
    """

    t: float
    L: float
    A: float
    deficit: float
    alpha: float
    entropy: float
    lyapunov: float
    min_k: float
    max_k: float
    closure_x: float
    closure_y: float
    k1_2: float
    k2_2: float
    k1_4: float
    k1_inf: float
    r_in: float
    r_out: float
    bonnesen_gap: float
    gage_gap: float
    barrier: float

    def as_row(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in COLUMNS)


assert tuple(f.name for f in fields(DiagnosticsRecord)) == COLUMNS


def record(p: CurvatureProfile, t: float, radii: RadiiPair | None = None) -> DiagnosticsRecord:
    """Evaluate every monitored functional on one profile."""
    L = length(p)
    A = area(p)
    alpha = curvature_mean(p)
    cx, cy = closure_defect(p)
    norms = sobolev_norms(p)
    if radii is not None:
        r_in, r_out = radii.r_in, radii.r_out
        bon = bonnesen_gap(L, A, radii)
    else:
        r_in = r_out = bon = math.nan
    return DiagnosticsRecord(
        t=t,
        L=L,
        A=A,
        deficit=L * L - 4.0 * np.pi * A,
        alpha=alpha,
        entropy=entropy(p),
        lyapunov=lyapunov(p),
        min_k=float(p.k.min()),
        max_k=float(p.k.max()),
        closure_x=cx,
        closure_y=cy,
        k1_2=norms.k1_2,
        k2_2=norms.k2_2,
        k1_4=norms.k1_4,
        k1_inf=norms.k1_inf,
        r_in=r_in,
        r_out=r_out,
        bonnesen_gap=bon,
        gage_gap=TWO_PI * alpha - np.pi * L / A,
        barrier=float(np.max(1.0 / p.k)) - A / L - TWO_PI * t / L,
    )


def make_recorder(radii_seed: int = 0, with_radii: bool = True):
    """Recorder callable for evolve(); optionally skips the radii computation."""

    def recorder(t: float, p: CurvatureProfile) -> DiagnosticsRecord:
        radii = radii_of(reconstruct(p), seed=radii_seed) if with_radii else None
        return record(p, t, radii)

    return recorder


# ---------------------------------------------------------------------------
# identity checks between consecutive records


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    measured: float
    expected: float
    residual: float  # |measured - expected|
    relative: float  # residual / max(|expected|, floor)
    passed: bool


@dataclass(frozen=True)
class IdentityReport:
    checks: tuple[IdentityCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> IdentityCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _three_point_rate(t0, f0, t1, f1, t2, f2) -> float:
    # Derivative at the interior time t1; second order for any spacing, which
    # matters because the final record interval of a run is clipped at t_end.
    h0, h1 = t1 - t0, t2 - t1
    return float(
        -h1 / (h0 * (h0 + h1)) * f0 + (h1 - h0) / (h0 * h1) * f1 + h0 / (h1 * (h0 + h1)) * f2
    )


def check_step_identities(
    prev: DiagnosticsRecord,
    next: DiagnosticsRecord,
    p_mid: CurvatureProfile,
    *,
    t_mid: float | None = None,
    tol_L: float | None = None,
    tol_A: float = 1e-4,
    tol_alpha: float = 1e-4,
    tol_V: float = 1e-4,
    floor: float = 1e-12,
) -> IdentityReport:
    """Check the exact evolution identities of the length-preserving flow.

    Three-point differences through two bracketing records and the profile
    recorded between them are compared against the analytic rates evaluated
    on that mid profile:

      (a) dL/dt = 0
      (b) dA/dt = alpha L - 2 pi
      (c) dalpha/dt = -(1/pi) int k k'^2 dtheta + (1/2pi) int k^2 (k - alpha) dtheta
      (d) d/dt [ int (k-alpha)^2 - (k')^2 dtheta ] = 2 int (k - alpha + k'')^2 k^2 dtheta >= 0

    Relative residuals use max(|expected|, floor) so late-time exponential
    tails below differencing resolution do not produce spurious failures.
    """
    span = next.t - prev.t
    if span <= 0.0:
        raise ValueError("records must be ordered in time")
    if t_mid is None:
        t_mid = 0.5 * (prev.t + next.t)
    if not prev.t < t_mid < next.t:
        raise ValueError("t_mid must lie strictly between the bracketing records")
    grid = p_mid.grid
    k = p_mid.k
    alpha = curvature_mean(p_mid)
    dk = d_theta(k, grid)
    d2k = d2_theta(k, grid)
    L_mid = length(p_mid)
    if tol_L is None:
        tol_L = 1e-6 * L_mid

    dL = _three_point_rate(prev.t, prev.L, t_mid, L_mid, next.t, next.L)
    check_a = IdentityCheck(
        name="length_rate",
        measured=dL,
        expected=0.0,
        residual=abs(dL),
        relative=abs(dL) / L_mid,
        passed=abs(dL) <= tol_L,
    )

    dA = _three_point_rate(prev.t, prev.A, t_mid, area(p_mid), next.t, next.A)
    area_rate = alpha * L_mid - TWO_PI
    res_b = abs(dA - area_rate)
    rel_b = res_b / max(abs(area_rate), floor)
    check_b = IdentityCheck(
        name="area_rate",
        measured=dA,
        expected=area_rate,
        residual=res_b,
        relative=rel_b,
        passed=rel_b <= tol_A,
    )

    dalpha = _three_point_rate(prev.t, prev.alpha, t_mid, alpha, next.t, next.alpha)
    alpha_rate = -integrate(k * dk**2, grid) / np.pi + integrate(k * k * (k - alpha), grid) / TWO_PI
    res_c = abs(dalpha - alpha_rate)
    check_c = IdentityCheck(
        name="alpha_rate",
        measured=dalpha,
        expected=alpha_rate,
        residual=res_c,
        relative=res_c / max(abs(alpha_rate), floor),
        passed=res_c <= tol_alpha,
    )

    dV = _three_point_rate(prev.t, prev.lyapunov, t_mid, lyapunov(p_mid), next.t, next.lyapunov)
    lyapunov_rate = 2.0 * integrate((k - alpha + d2k) ** 2 * k * k, grid)
    res_d = abs(dV - lyapunov_rate)
    rel_d = res_d / max(abs(lyapunov_rate), floor)
    monotone = (next.lyapunov - prev.lyapunov) >= -tol_V * span
    check_d = IdentityCheck(
        name="lyapunov_rate",
        measured=dV,
        expected=lyapunov_rate,
        residual=res_d,
        relative=rel_d,
        passed=(rel_d <= tol_V) and monotone,
    )

    return IdentityReport(checks=(check_a, check_b, check_c, check_d))


# ---------------------------------------------------------------------------
# monotonicity over a whole run


@dataclass(frozen=True)
class SeriesCheck:
    name: str
    worst_violation: float
    passed: bool


@dataclass(frozen=True)
class MonotonicityReport:
    checks: tuple[SeriesCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> SeriesCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def check_monotonicity(records, slack: float = 1e-8) -> MonotonicityReport:
    """Entropy non-increasing, area non-decreasing, deficit non-increasing,
    and the barrier quantity bounded by its initial value, each up to slack.
    """
    recs = list(records)
    if len(recs) < 2:
        raise ValueError("need at least two records")
    entropy_series = np.array([r.entropy for r in recs])
    area_series = np.array([r.A for r in recs])
    deficit_series = np.array([r.deficit for r in recs])
    barrier_series = np.array([r.barrier for r in recs])

    entropy_worst = float(np.max(np.diff(entropy_series)))
    area_worst = float(np.max(-np.diff(area_series)))
    deficit_worst = float(np.max(np.diff(deficit_series)))
    barrier_worst = float(np.max(barrier_series - barrier_series[0]))
    return MonotonicityReport(
        checks=(
            SeriesCheck("entropy_nonincreasing", entropy_worst, entropy_worst <= slack),
            SeriesCheck("area_nondecreasing", area_worst, area_worst <= slack),
            SeriesCheck("deficit_nonincreasing", deficit_worst, deficit_worst <= slack),
            SeriesCheck("barrier_bounded", barrier_worst, barrier_worst <= slack),
        )
    )


# ---------------------------------------------------------------------------
# exponential rate fitting


@dataclass(frozen=True)
class RateFit:
    """Least-squares exponential decay rate of a positive series."""

    rate: float
    log_intercept: float
    residual: float  # RMS of log residuals
    window: tuple[float, float]


def fit_exponential_rate(times, values, window=None, *, positive_floor: float = 1e-12) -> RateFit:
    """Fit value ~ exp(log_intercept - rate * t) on the window.

    When window is None, the fit uses the last half of the samples whose
    values exceed positive_floor (the late window isolates the slowest mode
    while staying above the rounding plateau).
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape or t.ndim != 1:
        raise ValueError("times and values must be 1-d arrays of equal length")
    if window is None:
        above = np.nonzero(v > positive_floor)[0]
        if above.size < 2:
            raise ValueError("series has no usable positive window")
        start = above[above.size // 2]
        stop = above[-1]
        window = (float(t[start]), float(t[stop]))
    lo, hi = window
    mask = (t >= lo) & (t <= hi)
    if int(mask.sum()) < 10:
        raise ValueError(f"need at least 10 samples in the window, got {int(mask.sum())}")
    if np.any(v[mask] <= 0.0):
        raise ValueError("series must be strictly positive on the fit window")
    slope, intercept = np.polyfit(t[mask], np.log(v[mask]), 1)
    residuals = np.log(v[mask]) - (slope * t[mask] + intercept)
    return RateFit(
        rate=float(-slope),
        log_intercept=float(intercept),
        residual=float(np.sqrt(np.mean(residuals**2))),
        window=(float(lo), float(hi)),
    )
