"""Convex plane curves represented by curvature as a function of turning angle.

Initial-data generators, reconstruction of point curves, and the geometric
functionals monitored along the flows.  Conventions: the curve is positively
oriented, theta is the angle of the unit tangent, the arclength element is
ds = dtheta / k, and generators sample at the outward normal angle
psi = theta - pi/2.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .grid import AngleGrid, TWO_PI, d2_theta, d_theta, integrate, periodic_antiderivative

# A profile is accepted as a closed curve when |closure defect| <= this times its length.
CLOSURE_TOL_FACTOR = 1e-6


class ConvexityError(ValueError):
    """Requested data cannot describe a strictly convex curve."""


class NotClosedError(ValueError):
    """Curvature profile fails the closed-curve compatibility test."""

    def __init__(self, message: str, defect: tuple[float, float]):
        super().__init__(message)
        self.defect = (float(defect[0]), float(defect[1]))


@dataclass(frozen=True, eq=False)
class CurvatureProfile:
    """Curvature sampled on a uniform turning-angle grid; strictly positive."""

    grid: AngleGrid
    k: np.ndarray

    def __post_init__(self) -> None:
        k = np.asarray(self.k, dtype=float)
        if k.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} curvature samples, got shape {k.shape}")
        if not np.all(np.isfinite(k)):
            raise ConvexityError("curvature samples must be finite")
        if np.any(k <= 0.0):
            raise ConvexityError("curvature must be strictly positive (convexity)")
        k = k.copy()
        k.flags.writeable = False
        object.__setattr__(self, "k", k)

    @staticmethod
    def _unchecked(grid: AngleGrid, k: np.ndarray) -> "CurvatureProfile":
        # Terminal solver states may violate positivity; bypass validation.
        p = object.__new__(CurvatureProfile)
        object.__setattr__(p, "grid", grid)
        object.__setattr__(p, "k", np.asarray(k, dtype=float))
        return p


@dataclass(frozen=True, eq=False)
class PolylineCurve:
    """Closed, positively oriented, convex polyline (last vertex connects to first)."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"points must have shape (m, 2), got {pts.shape}")
        if pts.shape[0] < 8:
            raise ValueError(f"need at least 8 vertices, got {pts.shape[0]}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("vertices must be finite")
        diameter_sq = float(np.ptp(pts[:, 0]) ** 2 + np.ptp(pts[:, 1]) ** 2)
        edges = np.roll(pts, -1, axis=0) - pts
        cross = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(
            edges, -1, axis=0
        )[:, 0]
        if np.any(cross < -1e-9 * diameter_sq):
            raise ConvexityError("polyline is not convex within tolerance")
        if _signed_area(pts) <= 0.0:
            raise ValueError("polyline must be positively oriented")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


def _signed_area(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


@dataclass(frozen=True)
class SupportCoefficients:
    """Fourier data of a support function h(psi) = a0 + sum_j (c_j cos j psi + s_j sin j psi).

    Harmonics start at j = 2: j = 0 is the mean width a0 and j = 1 is a pure
    translation of the curve, which breaks closure of the curvature profile.
    The margin a0 - sum (j^2 - 1) |(c_j, s_j)| > 0 guarantees h + h'' > 0.
    """

    a0: float
    harmonics: tuple[tuple[int, float, float], ...] = ()

    def __post_init__(self) -> None:
        if self.a0 <= 0.0:
            raise ValueError(f"mean width a0 must be positive, got {self.a0}")
        harmonics = tuple((int(j), float(c), float(s)) for j, c, s in self.harmonics)
        for j, _, _ in harmonics:
            if j < 2:
                raise ValueError(f"harmonic index must be >= 2, got {j}")
        object.__setattr__(self, "harmonics", harmonics)
        margin = self.convexity_margin()
        if margin <= 0.0:
            raise ConvexityError(
                f"support coefficients violate strict convexity (margin {margin:.6g})"
            )

    def convexity_margin(self) -> float:
        return self.a0 - sum((j * j - 1.0) * float(np.hypot(c, s)) for j, c, s in self.harmonics)


# ---------------------------------------------------------------------------
# generators


def circle_profile(radius: float, grid: AngleGrid) -> CurvatureProfile:
    """Constant-curvature profile of a circle; the fixed point of the flows."""
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    return CurvatureProfile(grid, np.full(grid.n, 1.0 / radius))


def ellipse_profile(a: float, b: float, grid: AngleGrid) -> CurvatureProfile:
    """Axis-aligned ellipse with semi-axes a >= b > 0.

    The support function at normal angle psi is h = sqrt(a^2 cos^2 psi +
    b^2 sin^2 psi) and the curvature is h^3 / (a b)^2.
    """
    if b <= 0.0 or a < b:
        raise ValueError(f"need a >= b > 0, got a={a}, b={b}")
    psi = grid.theta - 0.5 * np.pi
    h = np.hypot(a * np.cos(psi), b * np.sin(psi))
    return CurvatureProfile(grid, h**3 / (a * a * b * b))


def support_fourier_profile(coeffs: SupportCoefficients, grid: AngleGrid) -> CurvatureProfile:
    """Profile of the convex curve with the given support-function Fourier data."""
    psi = grid.theta - 0.5 * np.pi
    rho = np.full(grid.n, coeffs.a0)  # radius of curvature h + h''
    for j, c, s in coeffs.harmonics:
        rho += (1.0 - j * j) * (c * np.cos(j * psi) + s * np.sin(j * psi))
    if np.any(rho <= 0.0):
        raise ConvexityError("radius of curvature is not positive everywhere")
    return CurvatureProfile(grid, 1.0 / rho)


def random_convex_profile(
    seed: int, harmonic_budget: float, j_max: int, grid: AngleGrid
) -> CurvatureProfile:
    """Random smooth convex profile, deterministic per seed.

    Harmonics j in [2, j_max] are drawn with isotropic Gaussian phases and
    rescaled so that sum (j^2 - 1) amp_j equals harmonic_budget (a0 = 1),
    leaving a strict convexity margin of 1 - harmonic_budget.
    """
    if not 0.0 <= harmonic_budget < 1.0:
        raise ValueError(f"harmonic budget must lie in [0, 1), got {harmonic_budget}")
    if harmonic_budget == 0.0:
        return circle_profile(1.0, grid)
    if j_max < 2:
        raise ValueError(f"j_max must be >= 2, got {j_max}")
    rng = np.random.default_rng(seed)
    indices = np.arange(2, j_max + 1)
    c = rng.standard_normal(indices.size)
    s = rng.standard_normal(indices.size)
    weighted = (indices**2 - 1) * np.hypot(c, s)
    scale = harmonic_budget / weighted.sum()
    harmonics = tuple(
        (int(j), float(scale * cj), float(scale * sj)) for j, cj, sj in zip(indices, c, s)
    )
    return support_fourier_profile(SupportCoefficients(1.0, harmonics), grid)


# ---------------------------------------------------------------------------
# functionals


def length(p: CurvatureProfile) -> float:
    """Total length, int dtheta / k."""
    return integrate(1.0 / p.k, p.grid)


def curvature_mean(p: CurvatureProfile) -> float:
    """Mean of k over theta, equal to (1/2pi) int k^2 ds.

    This is the nonlocal speed offset that makes the flow length preserving.
    """
    return integrate(p.k, p.grid) / TWO_PI


def closure_defect(p: CurvatureProfile) -> tuple[float, float]:
    """Integral of the unit tangent against ds; (0, 0) exactly for closed curves."""
    w = 1.0 / p.k
    th = p.grid.theta
    return (integrate(w * np.cos(th), p.grid), integrate(w * np.sin(th), p.grid))


def closure_tolerance(p: CurvatureProfile) -> float:
    return CLOSURE_TOL_FACTOR * length(p)


def reconstruct(p: CurvatureProfile, basepoint: tuple[float, float] = (0.0, 0.0)) -> PolylineCurve:
    """Recover vertices by integrating the unit tangent (cos th, sin th) / k.

    The cumulative integral of the trigonometric interpolant is used, so
    band-limited profiles reconstruct to rounding accuracy.  Profiles whose
    closure defect exceeds the tolerance do not describe closed curves and
    are rejected.
    """
    dx, dy = closure_defect(p)
    if float(np.hypot(dx, dy)) > closure_tolerance(p):
        raise NotClosedError(
            f"curvature profile does not close up (defect ({dx:.3e}, {dy:.3e}))", (dx, dy)
        )
    th = p.grid.theta
    w = 1.0 / p.k
    x = basepoint[0] + periodic_antiderivative(np.cos(th) * w, p.grid)
    y = basepoint[1] + periodic_antiderivative(np.sin(th) * w, p.grid)
    return PolylineCurve(np.column_stack([x, y]))


def area(p: CurvatureProfile) -> float:
    """Enclosed area via the line integral (1/2) oint <gamma, N_out> ds.

    Evaluated with the same periodic quadrature as the other functionals, so
    the result is spectrally accurate rather than polygon-chord accurate.
    """
    curve = reconstruct(p)
    th = p.grid.theta
    x, y = curve.points[:, 0], curve.points[:, 1]
    support = x * np.sin(th) - y * np.cos(th)
    return 0.5 * integrate(support / p.k, p.grid)


def entropy(p: CurvatureProfile) -> float:
    """int log k dtheta; non-increasing along the length-preserving flow."""
    return integrate(np.log(p.k), p.grid)


def lyapunov(p: CurvatureProfile) -> float:
    """int (k - mean)^2 - (k')^2 dtheta.

    Non-positive for profiles without a first harmonic (Wirtinger) and
    non-decreasing along the length-preserving flow.
    """
    alpha = curvature_mean(p)
    dk = d_theta(p.k, p.grid)
    return integrate((p.k - alpha) ** 2, p.grid) - integrate(dk**2, p.grid)


class SobolevNorms(NamedTuple):
    k1_2: float
    k2_2: float
    k1_4: float
    k1_inf: float


def sobolev_norms(p: CurvatureProfile) -> SobolevNorms:
    """L2 norms of k' and k'', the L4 norm of k', and max |k'|."""
    dk = d_theta(p.k, p.grid)
    d2k = d2_theta(p.k, p.grid)
    return SobolevNorms(
        k1_2=float(np.sqrt(integrate(dk**2, p.grid))),
        k2_2=float(np.sqrt(integrate(d2k**2, p.grid))),
        k1_4=float(integrate(dk**4, p.grid) ** 0.25),
        k1_inf=float(np.max(np.abs(dk))),
    )


def harmonic_amplitude(p: CurvatureProfile, m: int) -> float:
    """Amplitude of the m-th Fourier mode of k over theta."""
    if m < 1:
        raise ValueError(f"mode index must be >= 1, got {m}")
    th = p.grid.theta
    c = integrate(p.k * np.cos(m * th), p.grid) / np.pi
    s = integrate(p.k * np.sin(m * th), p.grid) / np.pi
    return float(np.hypot(c, s))


def resample_profile(p: CurvatureProfile, n: int) -> CurvatureProfile:
    """Trigonometric interpolation of the curvature onto an n-node grid."""
    grid = AngleGrid(n)
    spectrum = np.fft.rfft(p.k)
    k_new = np.fft.irfft(spectrum, n) * (n / p.grid.n)
    return CurvatureProfile(grid, k_new)


# ---------------------------------------------------------------------------
# snapshot export


def profile_to_csv(p: CurvatureProfile, path) -> None:
    """Write the profile as CSV with header theta,k."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta", "k"])
        for th, k in zip(p.grid.theta, p.k):
            writer.writerow([f"{th:.17g}", f"{k:.17g}"])


def polyline_to_csv(c: PolylineCurve, path) -> None:
    """Write the polyline as CSV with header x,y in orientation order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y"])
        for x, y in c.points:
            writer.writerow([f"{x:.17g}", f"{y:.17g}"])
