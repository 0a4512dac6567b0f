use thiserror::Error;

/// Failures raised by the dynamics, root solvers and boundary construction.
///
/// Numeric payloads are stored as `f64` regardless of the working scalar.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("horizon T = {t} outside (0, 1/4)")]
    InvalidHorizon { t: f64 },
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("malformed driving function: {0}")]
    MalformedSchedule(String),
    #[error("trajectory reached y = {y:e} < floor at t = {t}")]
    YFloor { t: f64, y: f64 },
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("step budget exhausted at t = {t}")]
    TooManySteps { t: f64 },
    #[error("constant driver a = {a} swallows the point before t = {t}")]
    Swallowed { a: f64, t: f64 },
    #[error("degenerate denominator (x - lambda)^2 + y^2 = 0")]
    DegenerateDenominator,
    #[error("maximizer undefined: psi1 = 0 with psi2 > 0")]
    UndefinedMaximizer,
    #[error("adjoint vector degenerated at t = {t}")]
    AdjointDegenerate { t: f64 },
    #[error("no sign change on [{lo}, {hi}] (f = {f_lo}, {f_hi})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("{count} sign changes of the switch equation on (c, p0); expected at most 2")]
    TooManySignChanges { count: usize },
    #[error("value-range hypothesis violated: c^2 = {c2} < T - (1 - e^-4)/4 = {threshold}")]
    HypothesisViolated { c2: f64, threshold: f64 },
    #[error("complex Newton iteration did not converge at mu = {mu} (|F| = {residual:e})")]
    NewtonDiverged { mu: f64, residual: f64 },
    #[error("logarithm branch left the upper half-plane at mu = {mu}")]
    BranchJump { mu: f64 },
    #[error("stitching gap {gap:e} between {from} and {to}")]
    StitchGap {
        from: &'static str,
        to: &'static str,
        gap: f64,
    },
    #[error("sample {index} failed under driver {driver}: {reason}")]
    SampleFailed {
        index: usize,
        driver: String,
        reason: String,
    },
    #[error("polygon is degenerate: {0}")]
    DegeneratePolygon(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
