"""Length-preserving nonlocal curvature flow for convex plane curves.

Evolves convex curves represented by curvature as a function of turning
angle under four normal-speed laws, and verifies the conserved, monotone,
and exponentially decaying quantities of the length-preserving flow.
"""

from .grid import AngleGrid, d2_theta, d_theta, integrate, periodic_antiderivative
from .curves import (
    ConvexityError,
    CurvatureProfile,
    NotClosedError,
    PolylineCurve,
    SupportCoefficients,
    area,
    circle_profile,
    closure_defect,
    curvature_mean,
    ellipse_profile,
    entropy,
    harmonic_amplitude,
    length,
    lyapunov,
    polyline_to_csv,
    profile_to_csv,
    random_convex_profile,
    reconstruct,
    resample_profile,
    sobolev_norms,
    support_fourier_profile,
)
from .geometry import (
    BoundCheck,
    GeometryError,
    RadiiPair,
    bonnesen_gap,
    circumradius,
    gage_gap,
    gage_hamilton_bound_check,
    hausdorff_distance,
    inradius,
    radii_of,
    sustained_curvature,
    window_gauge,
)
from .flows import (
    AREA_PRESERVING,
    LENGTH_PRESERVING,
    PAN_YANG,
    SHORTENING,
    FlowGuardError,
    FlowSpec,
    FlowVariant,
    SolverConfig,
    Termination,
    Trajectory,
    cfl_dt,
    evolve,
    normal_speed,
    rhs,
    step_imex,
    step_rk4,
)
from .oracle import (
    MarkerState,
    cross_validate,
    oracle_step,
    polyline_curvature,
    resample_by_arclength,
)
from .diagnostics import (
    COLUMNS,
    DiagnosticsRecord,
    RateFit,
    check_monotonicity,
    check_step_identities,
    fit_exponential_rate,
    make_recorder,
    record,
)

__version__ = "0.1.0"
