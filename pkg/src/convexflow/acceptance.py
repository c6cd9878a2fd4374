"""Executable acceptance criteria, grouped into named verification suites.

Each criterion function runs the pinned configuration, measures the pinned
quantity, and returns a CriterionResult; the pytest acceptance module and
the CLI `verify` command both drive these.  Long runs are cached so the
criteria sharing one run pay for it once per process.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .curves import (
    CurvatureProfile,
    SupportCoefficients,
    area,
    circle_profile,
    ellipse_profile,
    harmonic_amplitude,
    length,
    random_convex_profile,
    reconstruct,
    sobolev_norms,
    support_fourier_profile,
)
from .diagnostics import check_step_identities, check_monotonicity, fit_exponential_rate, make_recorder
from .flows import (
    AREA_PRESERVING,
    LENGTH_PRESERVING,
    SHORTENING,
    SolverConfig,
    Termination,
    evolve,
)
from .geometry import bonnesen_gap, gage_gap, gage_hamilton_bound_check, radii_of
from .grid import AngleGrid, TWO_PI
from .oracle import cross_validate


@dataclass(frozen=True)
class CriterionResult:
    cid: int
    name: str
    passed: bool
    measured: str
    bound: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"criterion {self.cid:2d} {self.name:<28s} {status}  {self.measured}  (bound: {self.bound})"


# ---------------------------------------------------------------------------
# shared runs


@lru_cache(maxsize=4)
def _ellipse_run(n: int = 256, t_end: float = 5.0, stride: int = 5):
    initial = ellipse_profile(1.5, 1.0, AngleGrid(n))
    cfg = SolverConfig(t_end=t_end, record_stride=stride)
    return evolve(initial, LENGTH_PRESERVING, cfg, recorder=make_recorder(with_radii=False))


@lru_cache(maxsize=2)
def _deficit_run(n: int = 256, t_end: float = 3.0, stride: int = 10):
    coeffs = SupportCoefficients(1.0, ((2, 0.05, 0.0),))
    initial = support_fourier_profile(coeffs, AngleGrid(n))
    cfg = SolverConfig(t_end=t_end, record_stride=stride)
    return evolve(initial, LENGTH_PRESERVING, cfg, recorder=make_recorder(with_radii=False))


@lru_cache(maxsize=2)
def _convergence_run(n: int = 256, t_end: float = 10.0, stride: int = 50):
    initial = ellipse_profile(1.5, 1.0, AngleGrid(n))
    cfg = SolverConfig(t_end=t_end, record_stride=stride)
    return evolve(initial, LENGTH_PRESERVING, cfg, recorder=make_recorder(with_radii=False))


# ---------------------------------------------------------------------------
# criteria


def criterion_1_circle_stationary(n: int = 256) -> CriterionResult:
    """Length-preserving flow leaves the unit circle fixed to rounding."""
    initial = circle_profile(1.0, AngleGrid(n))
    cfg = SolverConfig(t_end=1.0, record_stride=10**9)
    trajectory = evolve(initial, LENGTH_PRESERVING, cfg)
    drift = float(np.max(np.abs(trajectory.snapshots[-1].k - 1.0)))
    return CriterionResult(
        1,
        "circle_stationarity",
        trajectory.termination is Termination.COMPLETED and drift <= 1e-10,
        f"max|k-1| = {drift:.3e}",
        "1e-10",
    )


def criterion_2_length_preservation(n: int = 256) -> CriterionResult:
    trajectory = _ellipse_run(n)
    L = np.array([r.L for r in trajectory.records])
    drift = float(np.max(np.abs(L - L[0])) / L[0])
    return CriterionResult(
        2,
        "length_preservation",
        trajectory.termination is Termination.COMPLETED and drift <= 1e-6,
        f"max|L-L0|/L0 = {drift:.3e}",
        "1e-6",
    )


def criterion_3_area_monotonicity(n: int = 256) -> CriterionResult:
    """Area non-decreasing; measured dA/dt matches alpha L - 2 pi.

    The relative identity is checked wherever the rate is resolvable above
    double-precision differencing noise (expected rate >= 1e-6); the late
    exponential tail sits below that floor by construction.
    """
    trajectory = _ellipse_run(n)
    records = trajectory.records
    stride_slack = 1e-10 * 5  # per-step slack times the record stride
    area_drops = [records[i + 1].A - records[i].A for i in range(len(records) - 1)]
    worst_drop = -min(area_drops)
    monotone = worst_drop <= stride_slack

    worst_rel = 0.0
    for i in range(1, len(records) - 1):
        report = check_step_identities(
            records[i - 1], records[i + 1], trajectory.snapshots[i], t_mid=records[i].t
        )
        check = report["area_rate"]
        if check.expected >= 1e-6:
            worst_rel = max(worst_rel, check.relative)
    return CriterionResult(
        3,
        "area_monotonicity",
        monotone and worst_rel <= 1e-4,
        f"worst drop = {worst_drop:.3e}, worst rel id residual = {worst_rel:.3e}",
        f"drop <= {stride_slack:.0e}, residual <= 1e-4",
    )


def criterion_4_monotone_functionals(n: int = 256) -> CriterionResult:
    trajectory = _ellipse_run(n)
    report = check_monotonicity(trajectory.records, slack=1e-8)
    worst = {c.name: c.worst_violation for c in report.checks}
    return CriterionResult(
        4,
        "entropy_deficit_barrier",
        report["entropy_nonincreasing"].passed
        and report["deficit_nonincreasing"].passed
        and report["barrier_bounded"].passed,
        f"worst violations: entropy {worst['entropy_nonincreasing']:.2e}, "
        f"deficit {worst['deficit_nonincreasing']:.2e}, barrier {worst['barrier_bounded']:.2e}",
        "1e-8 each",
    )


def criterion_5_deficit_rate(n: int = 256) -> CriterionResult:
    """Fitted deficit decay on the late window: above the a-priori bound
    8 pi^2 / L^2 and close to the linearized two-mode rate 6."""
    trajectory = _deficit_run(n)
    times = np.array([r.t for r in trajectory.records])
    deficit = np.array([r.deficit for r in trajectory.records])
    fit = fit_exponential_rate(times, deficit)
    L = trajectory.records[0].L
    bound = 8.0 * np.pi**2 / L**2
    linearized = 6.0
    ok = fit.rate >= bound * 0.95 and abs(fit.rate - linearized) <= 0.10 * linearized
    return CriterionResult(
        5,
        "deficit_decay_rate",
        ok,
        f"rate = {fit.rate:.4f} on window {fit.window}",
        f">= {bound * 0.95:.3f} and within 10% of {linearized}",
    )


def criterion_6_mode_rates(n: int = 256) -> CriterionResult:
    """Harmonic perturbations of the unit circle decay at rate m^2 - 1."""
    eps = 1e-3
    grid = AngleGrid(n)
    details = []
    ok = True
    for m, t_end in ((2, 1.0), (3, 0.4)):
        initial = CurvatureProfile(grid, 1.0 + eps * np.cos(m * grid.theta))
        cfg = SolverConfig(t_end=t_end, record_stride=10)
        trajectory = evolve(initial, LENGTH_PRESERVING, cfg)
        times = np.array(trajectory.times)
        amps = np.array([harmonic_amplitude(p, m) for p in trajectory.snapshots])
        fit = fit_exponential_rate(times, amps, window=(0.0, t_end))
        expected = m * m - 1.0
        ok = ok and abs(fit.rate - expected) <= 0.05 * expected
        details.append(f"m={m}: rate {fit.rate:.4f} (expect {expected:.0f})")
    return CriterionResult(6, "mode_linear_rates", ok, "; ".join(details), "within 5%")


def criterion_7_lyapunov_identity(n: int = 256) -> CriterionResult:
    """d/dt of int (k-alpha)^2 - (k')^2 equals 2 int (k-alpha+k'')^2 k^2 >= 0."""
    trajectory = _ellipse_run(n)
    records = trajectory.records
    worst_rel = 0.0
    worst_drop = 0.0
    for i in range(1, len(records) - 1):
        report = check_step_identities(
            records[i - 1], records[i + 1], trajectory.snapshots[i], t_mid=records[i].t
        )
        check = report["lyapunov_rate"]
        if check.expected >= 1e-8:
            worst_rel = max(worst_rel, check.relative)
        span = records[i + 1].t - records[i - 1].t
        worst_drop = max(worst_drop, -(records[i + 1].lyapunov - records[i - 1].lyapunov) / span)
    ok = worst_rel <= 1e-4 and worst_drop <= 1e-8
    return CriterionResult(
        7,
        "lyapunov_identity",
        ok,
        f"worst rel residual = {worst_rel:.3e}, worst decrease rate = {worst_drop:.3e}",
        "residual <= 1e-4, non-decreasing",
    )


def criterion_8_oracle_equivalence(n: int = 256, m: int = 512) -> CriterionResult:
    """Marker-particle and turning-angle solvers agree, and converge together."""
    initial = ellipse_profile(1.5, 1.0, AngleGrid(n))
    horizon = 0.5
    base = cross_validate(initial, LENGTH_PRESERVING, horizon, n=n, m=m)
    L = length(initial)
    max_base = max(d for _, d in base)
    fine = cross_validate(initial, LENGTH_PRESERVING, horizon, n=2 * n, m=2 * m)
    max_fine = max(d for _, d in fine)
    ratio = max_base / max_fine if max_fine > 0 else np.inf
    ok = max_base <= 5e-3 * L and ratio >= 2.0
    return CriterionResult(
        8,
        "oracle_equivalence",
        ok,
        f"max distance = {max_base:.3e} ({max_base / L:.2e} L), refinement ratio = {ratio:.2f}",
        f"<= {5e-3 * L:.3e} and ratio >= 2",
    )


def criterion_9_shortening_and_area(n: int = 256) -> CriterionResult:
    """Analytic circle collapse under shortening; area conservation of the
    area-preserving variant."""
    grid = AngleGrid(n)
    cfg = SolverConfig(t_end=0.375, record_stride=10**9)
    trajectory = evolve(circle_profile(1.0, grid), SHORTENING, cfg)
    k_err = float(np.max(np.abs(trajectory.snapshots[-1].k - (1.0 - 2.0 * 0.375) ** -0.5)))

    cfg_area = SolverConfig(t_end=2.0, record_stride=10)
    area_run = evolve(
        ellipse_profile(1.5, 1.0, grid),
        AREA_PRESERVING,
        cfg_area,
        recorder=make_recorder(with_radii=False),
    )
    A = np.array([r.A for r in area_run.records])
    area_drift = float(np.max(np.abs(A - A[0])) / A[0])
    ok = k_err <= 1e-5 and area_drift <= 1e-6
    return CriterionResult(
        9,
        "shortening_and_area",
        ok,
        f"|k(0.375) - 2| = {k_err:.3e}, area drift = {area_drift:.3e}",
        "1e-5 and 1e-6",
    )


def criterion_10_inequality_suite(n: int = 256) -> CriterionResult:
    """Gage, Bonnesen, isoperimetric, and windowed-curvature bounds on 20
    random convex profiles (seeds 0..19)."""
    grid = AngleGrid(n)
    failures = []
    for seed in range(20):
        p = random_convex_profile(seed, 0.4, 6, grid)
        curve = reconstruct(p)
        L = length(p)
        radii = radii_of(curve)
        A = area(p)
        if gage_gap(p) < -1e-8:
            failures.append(f"seed {seed}: gage")
        if L * L - 4.0 * np.pi * A < -1e-8 * L * L:
            failures.append(f"seed {seed}: isoperimetric")
        if bonnesen_gap(L, A, radii) < -1e-6 * L * L:
            failures.append(f"seed {seed}: bonnesen")
        for w in (np.pi / 2, 2 * np.pi / 3, np.pi):
            check = gage_hamilton_bound_check(p, curve, w)
            if check.active and not check.passed:
                failures.append(f"seed {seed}: window bound w={w:.2f}")
    return CriterionResult(
        10,
        "inequality_suite",
        not failures,
        "all hold" if not failures else "; ".join(failures),
        "gage >= -1e-8, bonnesen >= -1e-6 L^2, deficit >= -1e-8 L^2, window bound",
    )


def criterion_11_convergence_to_circle(n: int = 256) -> CriterionResult:
    """Round-off of the ellipse to a circle with exponential derivative decay."""
    trajectory = _convergence_run(n)
    final = trajectory.snapshots[-1]
    radii = radii_of(reconstruct(final))
    roundness = (radii.r_out - radii.r_in) / radii.r_in
    norms = sobolev_norms(final)

    times = np.array([r.t for r in trajectory.records])
    k1 = np.array([r.k1_2 for r in trajectory.records])
    k2 = np.array([r.k2_2 for r in trajectory.records])
    fit1 = fit_exponential_rate(times, k1)
    fit2 = fit_exponential_rate(times, k2)
    R = trajectory.records[0].L / TWO_PI
    expected = 3.0 / R**2
    spectral_tail = max(harmonic_amplitude(final, m) for m in range(3, 9))
    ok = (
        roundness <= 1e-4
        and norms.k1_inf <= 1e-6
        and abs(fit1.rate - expected) <= 0.05 * expected
        and abs(fit2.rate - expected) <= 0.05 * expected
        and spectral_tail <= 1e-8
    )
    return CriterionResult(
        11,
        "convergence_to_circle",
        ok,
        f"(r_out-r_in)/r_in = {roundness:.3e}, |k'|_inf = {norms.k1_inf:.3e}, "
        f"rates = ({fit1.rate:.3f}, {fit2.rate:.3f}), tail = {spectral_tail:.1e}",
        f"1e-4, 1e-6, rates within 5% of {expected:.3f}",
    )


ALL_CRITERIA = (
    criterion_1_circle_stationary,
    criterion_2_length_preservation,
    criterion_3_area_monotonicity,
    criterion_4_monotone_functionals,
    criterion_5_deficit_rate,
    criterion_6_mode_rates,
    criterion_7_lyapunov_identity,
    criterion_8_oracle_equivalence,
    criterion_9_shortening_and_area,
    criterion_10_inequality_suite,
    criterion_11_convergence_to_circle,
)

SUITES = {
    "conservation": (
        criterion_1_circle_stationary,
        criterion_2_length_preservation,
        criterion_3_area_monotonicity,
        criterion_9_shortening_and_area,
    ),
    "monotonicity": (criterion_4_monotone_functionals, criterion_7_lyapunov_identity),
    "rates": (
        criterion_5_deficit_rate,
        criterion_6_mode_rates,
        criterion_11_convergence_to_circle,
    ),
    "geometry": (criterion_10_inequality_suite,),
    "oracle": (criterion_8_oracle_equivalence,),
}


def run_suite(name: str, n: int = 256) -> list[CriterionResult]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {sorted(SUITES)}")
    return [criterion(n=n) for criterion in SUITES[name]]
