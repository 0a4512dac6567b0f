//! Value ranges of the chordal Loewner equation started at `i` under a
//! bounded driving function `|λ(t)| <= c`.
//!
//! The crate integrates the phase system, solves the scalar equations that
//! locate the switch structure of extremal drivers, builds the boundary
//! curves and stitches them into a polygon, and verifies the result by
//! sampling random admissible drivers.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the scalar to `f64`.
//!
//! ```
//! use loewner_range::{assemble_boundary, CaseTag, Sampling};
//!
//! let b = assemble_boundary(0.245, 1.0, &Sampling::with_points(64)).unwrap();
//! assert_eq!(b.case_tag, CaseTag::Two);
//! assert!(b.polygon.is_simple());
//! ```

// negated comparisons reject NaN inputs
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curves;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod ode;
pub mod roots;
pub mod scalar;
pub mod verify;

pub use curves::{
    assemble_boundary, curve_l1, curve_l2, curve_l3, curve_l7, l2_anchor, l2_point, l2_residual,
    l3_point, l3_residuals, l7_point, l7_residuals, parametric_curve, parametric_point,
    terminal_driver, unrestricted_boundary, unrestricted_polygon, unrestricted_residual,
    unrestricted_x, BoundaryCurve, BoundaryPoint, CaseTag, CurveId, Sampling, ValueRangeBoundary,
    STITCH_TOLERANCE,
};
pub use dynamics::{
    conserved_drift, constant_driver_endpoint, extremal_schedule, hamiltonian,
    integrate_full_hamiltonian, integrate_phase, integrate_phase_trajectory, lambda_star,
    propagate_constant, propagate_extremal, switch_time_t1, switch_time_t2, AdjointState,
    DriverKind, DrivingFunction, HamiltonianSample, Horizon, PhaseState, Segment, Y_FLOOR,
};
pub use error::{Error, Result};
pub use geometry::{Location, Polygon};
pub use ode::Dopri5;
pub use roots::{
    admissibility_bounds, bracket_root, regime_threshold, solve_c0, solve_p0, solve_switch_roots,
    solve_y0, switch_residual, RegimeParams, SwitchRoots,
};
pub use scalar::Real;
pub use verify::{
    audit_polygon, chained_endpoint, classify_points, containment_audit, coverage_gap,
    curve_round_trip, extremal_sharpness, mu_field_endpoint, point_in_boundary,
    pontryagin_spot_check, sample_reachable, DriverSampler, Propagation, SampleReport,
    SharpnessReport, DEFAULT_BAND,
};

pub type PhaseState64 = PhaseState<f64>;
pub type AdjointState64 = AdjointState<f64>;
pub type DrivingFunction64 = DrivingFunction<f64>;
pub type Horizon64 = Horizon<f64>;
pub type Polygon64 = Polygon<f64>;
pub type BoundaryCurve64 = BoundaryCurve<f64>;
pub type ValueRangeBoundary64 = ValueRangeBoundary<f64>;
pub type SampleReport64 = SampleReport<f64>;
pub type DriverSampler64 = DriverSampler<f64>;
