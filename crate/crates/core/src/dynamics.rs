//! Phase and adjoint dynamics of the chordal Loewner equation started at `i`.
//!
//! Writing `g(i, t) = x + iy` the Loewner flow becomes the planar system
//!
//! ```text
//! dx/dt =  2(x - λ) / ((x - λ)² + y²)
//! dy/dt = -2y       / ((x - λ)² + y²),      x(0) = 0, y(0) = 1.
//! ```
//!
//! This module integrates it for piecewise drivers, provides the exact
//! endpoints under a constant driver and under the extremal law
//! `λ = x - p`, and evaluates the Hamiltonian of the associated
//! optimal-control problem together with its maximizer.

use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::roots::{bracket_root, solve_p0, RegimeParams};
use crate::scalar::{lit, mid, to_f64, Real};

/// Trajectories are aborted once `y` drops below this value.
pub const Y_FLOOR: f64 = 1e-12;

/// A point `(x, y)` of the phase plane at Loewner time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseState<S> {
    pub x: S,
    pub y: S,
    pub t: S,
}

impl<S: Real> PhaseState<S> {
    pub fn new(x: S, y: S, t: S) -> Self {
        Self { x, y, t }
    }

    /// The image of `i` at time zero.
    pub fn initial() -> Self {
        Self::new(S::zero(), S::one(), S::zero())
    }

    /// Reflection in the imaginary axis.
    pub fn mirror(self) -> Self {
        Self::new(-self.x, self.y, self.t)
    }
}

/// Costate `(Ψ₁, Ψ₂)` paired with `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AdjointState<S> {
    pub psi1: S,
    pub psi2: S,
}

impl<S: Real> AdjointState<S> {
    pub fn new(psi1: S, psi2: S) -> Self {
        Self { psi1, psi2 }
    }

    pub fn norm(&self) -> S {
        self.psi1.hypot(self.psi2)
    }

    /// `|Ψ| - Ψ₂`, evaluated without cancellation when `Ψ₂ > 0`.
    fn gap(&self) -> S {
        let r = self.norm();
        if self.psi2 > S::zero() {
            self.psi1 * self.psi1 / (r + self.psi2)
        } else {
            r - self.psi2
        }
    }
}

/// Loewner time horizon `T`, restricted to the bounded regime `0 < T < 1/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horizon<S>(S);

impl<S: Real> Horizon<S> {
    pub fn new(t: S) -> Result<Self> {
        if t > S::zero() && t < lit(0.25) {
            Ok(Self(t))
        } else {
            Err(Error::InvalidHorizon { t: to_f64(t) })
        }
    }

    pub fn value(self) -> S {
        self.0
    }
}

/// How the driver behaves on one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriverKind<S> {
    /// `λ(t) = a`.
    Constant(S),
    /// `λ(t) = x(t) - p` along the concurrent trajectory.
    ExtremalFollow(S),
}

impl<S: Real> DriverKind<S> {
    fn mirror(self) -> Self {
        match self {
            DriverKind::Constant(a) => DriverKind::Constant(-a),
            DriverKind::ExtremalFollow(p) => DriverKind::ExtremalFollow(-p),
        }
    }

    /// Driver value at a point of the phase plane.
    pub fn value_at(self, x: S) -> S {
        match self {
            DriverKind::Constant(a) => a,
            DriverKind::ExtremalFollow(p) => x - p,
        }
    }
}

/// Segment active on `(previous end_time, end_time]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<S> {
    pub end_time: S,
    pub kind: DriverKind<S>,
}

/// Piecewise driving function `λ(t)` on `[0, T]` with the bound `|λ| <= c`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrivingFunction<S> {
    segments: Vec<Segment<S>>,
    bound: S,
}

impl<S: Real> DrivingFunction<S> {
    pub fn new(segments: Vec<Segment<S>>, bound: S) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::MalformedSchedule("no segments".into()));
        }
        if !(bound >= S::zero()) {
            return Err(Error::MalformedSchedule(format!(
                "bound {bound} is negative"
            )));
        }
        let mut prev = S::zero();
        for (i, seg) in segments.iter().enumerate() {
            if !(seg.end_time > prev) || !seg.end_time.is_finite() {
                return Err(Error::MalformedSchedule(format!(
                    "segment {i} ends at {} after {prev}",
                    seg.end_time
                )));
            }
            prev = seg.end_time;
            if let DriverKind::Constant(a) = seg.kind {
                if !(a.abs() <= bound) {
                    return Err(Error::MalformedSchedule(format!(
                        "segment {i} value {a} exceeds bound {bound}"
                    )));
                }
            }
        }
        Ok(Self { segments, bound })
    }

    /// `λ ≡ a` on `[0, T]`.
    pub fn constant(a: S, bound: S, horizon: Horizon<S>) -> Result<Self> {
        Self::new(
            vec![Segment {
                end_time: horizon.value(),
                kind: DriverKind::Constant(a),
            }],
            bound,
        )
    }

    /// `λ = x - p` on the whole of `[0, T]`.
    pub fn extremal_follow(p: S, bound: S, horizon: Horizon<S>) -> Result<Self> {
        Self::new(
            vec![Segment {
                end_time: horizon.value(),
                kind: DriverKind::ExtremalFollow(p),
            }],
            bound,
        )
    }

    pub fn segments(&self) -> &[Segment<S>] {
        &self.segments
    }

    pub fn bound(&self) -> S {
        self.bound
    }

    /// End time of the last segment.
    pub fn horizon(&self) -> S {
        self.segments.last().expect("non-empty").end_time
    }

    /// The driver `-λ(t)`, which reflects trajectories in the imaginary axis.
    pub fn mirror(&self) -> Self {
        Self {
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    end_time: s.end_time,
                    kind: s.kind.mirror(),
                })
                .collect(),
            bound: self.bound,
        }
    }

    /// Start time of segment `i`.
    pub fn segment_start(&self, i: usize) -> S {
        if i == 0 {
            S::zero()
        } else {
            self.segments[i - 1].end_time
        }
    }

    /// Index of the segment active at time `t` (left-closed at zero).
    pub fn segment_index(&self, t: S) -> usize {
        self.segments
            .iter()
            .position(|s| t <= s.end_time)
            .unwrap_or(self.segments.len() - 1)
    }

    /// `λ(t)` given the concurrent horizontal coordinate `x(t)`.
    pub fn value(&self, t: S, x: S) -> S {
        self.segments[self.segment_index(t)].kind.value_at(x)
    }
}

#[inline]
fn phase_rhs<S: Real>(x: S, y: S, lambda: S) -> [S; 2] {
    let u = x - lambda;
    let d = u * u + y * y;
    let two: S = lit(2.0);
    [two * u / d, -two * y / d]
}

fn check_floor<S: Real>(t: S, y: S) -> Result<()> {
    if y < lit(Y_FLOOR) || !y.is_finite() {
        Err(Error::YFloor {
            t: to_f64(t),
            y: to_f64(y),
        })
    } else {
        Ok(())
    }
}

fn run_phase<S: Real>(
    driver: &DrivingFunction<S>,
    horizon: Horizon<S>,
    tol: S,
    mut samples: Option<&mut Vec<PhaseState<S>>>,
) -> Result<PhaseState<S>> {
    if !(tol > S::zero()) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: to_f64(tol),
            reason: "must be positive",
        });
    }
    let t_end = horizon.value();
    let mismatch = (driver.horizon() - t_end).abs();
    if mismatch > S::epsilon() * lit(16.0) * t_end {
        return Err(Error::MalformedSchedule(format!(
            "schedule ends at {} but horizon is {}",
            driver.horizon(),
            t_end
        )));
    }
    let solver = Dopri5::new(tol);
    let mut state = [S::zero(), S::one()];
    if let Some(buf) = samples.as_deref_mut() {
        buf.push(PhaseState::initial());
    }
    let n = driver.segments().len();
    for (i, seg) in driver.segments().iter().enumerate() {
        let t0 = driver.segment_start(i);
        let t1 = if i + 1 == n { t_end } else { seg.end_time };
        let kind = seg.kind;
        let mut first = true;
        state = solver.integrate(
            |_, s: &[S; 2]| phase_rhs(s[0], s[1], kind.value_at(s[0])),
            t0,
            state,
            t1,
            |t, s| {
                check_floor(t, s[1])?;
                if first {
                    first = false;
                } else if let Some(buf) = samples.as_deref_mut() {
                    buf.push(PhaseState::new(s[0], s[1], t));
                }
                Ok(())
            },
        )?;
    }
    Ok(PhaseState::new(state[0], state[1], t_end))
}

/// Integrates the phase system from `(0, 1)` to the horizon under `driver`.
pub fn integrate_phase<S: Real>(
    driver: &DrivingFunction<S>,
    horizon: Horizon<S>,
    tol: S,
) -> Result<PhaseState<S>> {
    run_phase(driver, horizon, tol, None)
}

/// Same as [`integrate_phase`] but also returns every accepted step.
pub fn integrate_phase_trajectory<S: Real>(
    driver: &DrivingFunction<S>,
    horizon: Horizon<S>,
    tol: S,
) -> Result<Vec<PhaseState<S>>> {
    let mut samples = Vec::new();
    run_phase(driver, horizon, tol, Some(&mut samples))?;
    Ok(samples)
}

/// Exact propagation of `state` by `dt` under the constant driver `a`.
///
/// Uses the two invariants `(x - a) y` and `(x - a)² - y² - 4t` of the
/// constant-driver flow. The offset `u = x - a` keeps its sign.
pub fn propagate_constant<S: Real>(state: PhaseState<S>, a: S, dt: S) -> Result<PhaseState<S>> {
    let t = state.t + dt;
    let u0 = state.x - a;
    let y0 = state.y;
    let four: S = lit(4.0);
    if u0 == S::zero() {
        let y2 = y0 * y0 - four * dt;
        if !(y2 > S::zero()) {
            return Err(Error::Swallowed {
                a: to_f64(a),
                t: to_f64(t),
            });
        }
        let y = y2.sqrt();
        check_floor(t, y)?;
        return Ok(PhaseState::new(state.x, y, t));
    }
    let k = u0 * y0;
    let m = u0 * u0 - y0 * y0 + four * dt;
    let s = (m * m + four * k * k).sqrt();
    let two: S = lit(2.0);
    let u2 = if m >= S::zero() {
        (m + s) / two
    } else {
        two * k * k / (s - m)
    };
    let u = u2.sqrt().copysign(u0);
    let y = k / u;
    if !(y > S::zero()) {
        return Err(Error::Swallowed {
            a: to_f64(a),
            t: to_f64(t),
        });
    }
    check_floor(t, y)?;
    Ok(PhaseState::new(a + u, y, t))
}

/// Endpoint at time `t` of the trajectory from `(0, 1)` under `λ ≡ a`.
pub fn constant_driver_endpoint<S: Real>(a: S, t: S) -> Result<PhaseState<S>> {
    if !(t >= S::zero()) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: to_f64(t),
            reason: "must be non-negative",
        });
    }
    propagate_constant(PhaseState::initial(), a, t)
}

/// Exact propagation of `state` by `dt` under `λ = x - p`.
///
/// With `x - λ ≡ p` the height obeys `2p² log(y/y₀) + y² - y₀² = -4Δt`,
/// solved here by bracketing, and `x = x₀ - p log(y/y₀)`.
pub fn propagate_extremal<S: Real>(state: PhaseState<S>, p: S, dt: S) -> Result<PhaseState<S>> {
    let t = state.t + dt;
    let y0 = state.y;
    let four: S = lit(4.0);
    if dt == S::zero() {
        return Ok(state);
    }
    if p == S::zero() {
        let y2 = y0 * y0 - four * dt;
        if !(y2 > S::zero()) {
            return Err(Error::Swallowed {
                a: to_f64(state.x),
                t: to_f64(t),
            });
        }
        return Ok(PhaseState::new(state.x, y2.sqrt(), t));
    }
    let two: S = lit(2.0);
    let g = |y: S| two * p * p * (y / y0).ln() + y * y - y0 * y0 + four * dt;
    let mut lo = y0 / two;
    while g(lo) > S::zero() {
        lo = lo / two;
        if lo < lit(Y_FLOOR) {
            return Err(Error::YFloor {
                t: to_f64(t),
                y: to_f64(lo),
            });
        }
    }
    let y = bracket_root(g, lo, y0, y0 * lit(1e-15))?;
    check_floor(t, y)?;
    Ok(PhaseState::new(state.x - p * (y / y0).ln(), y, t))
}

/// The Hamiltonian `(2(x-λ)Ψ₁ - 2yΨ₂) / ((x-λ)² + y²)`.
pub fn hamiltonian<S: Real>(s: &PhaseState<S>, adj: &AdjointState<S>, lambda: S) -> Result<S> {
    let u = s.x - lambda;
    let d = u * u + s.y * s.y;
    if !(d > S::zero()) {
        return Err(Error::DegenerateDenominator);
    }
    let two: S = lit(2.0);
    Ok((two * u * adj.psi1 - two * s.y * adj.psi2) / d)
}

/// Global maximizer over the real line of [`hamiltonian`] in `λ`:
/// `λ₀ = x - yΨ₁ / (|Ψ| - Ψ₂)`.
pub fn lambda_star<S: Real>(s: &PhaseState<S>, adj: &AdjointState<S>) -> Result<S> {
    let gap = adj.gap();
    if !(gap > S::zero()) {
        return Err(Error::UndefinedMaximizer);
    }
    Ok(s.x - s.y * adj.psi1 / gap)
}

/// Right-hand side of the coupled phase/adjoint system for a given `λ`.
fn hamiltonian_rhs<S: Real>(z: &[S; 4], lambda: S) -> [S; 4] {
    let (x, y, p1, p2) = (z[0], z[1], z[2], z[3]);
    let u = x - lambda;
    let d = u * u + y * y;
    let two: S = lit(2.0);
    let d2 = d * d;
    let a = u * u - y * y;
    let b = two * u * y;
    [
        two * u / d,
        -two * y / d,
        two * (a * p1 - b * p2) / d2,
        two * (b * p1 + a * p2) / d2,
    ]
}

/// One sample of an extremal computed with the unconstrained maximizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianSample<S> {
    pub state: PhaseState<S>,
    pub adjoint: AdjointState<S>,
    pub lambda: S,
    pub hamiltonian: S,
    /// `yΨ₁ / (|Ψ| - Ψ₂)`, constant along such extremals.
    pub offset: S,
}

fn hamiltonian_sample<S: Real>(t: S, z: &[S; 4]) -> Result<HamiltonianSample<S>> {
    let state = PhaseState::new(z[0], z[1], t);
    let adjoint = AdjointState::new(z[2], z[3]);
    if !(adjoint.norm() > S::zero()) || !adjoint.norm().is_finite() {
        return Err(Error::AdjointDegenerate { t: to_f64(t) });
    }
    let lambda =
        lambda_star(&state, &adjoint).map_err(|_| Error::AdjointDegenerate { t: to_f64(t) })?;
    let hamiltonian = hamiltonian(&state, &adjoint, lambda)?;
    Ok(HamiltonianSample {
        state,
        adjoint,
        lambda,
        hamiltonian,
        offset: state.y * adjoint.psi1 / adjoint.gap(),
    })
}

/// Integrates phase and adjoint together with `λ = λ₀(t)` from `(0, 1, adj0)`.
///
/// Returns every accepted step. Along the result both the offset and the
/// Hamiltonian stay constant.
pub fn integrate_full_hamiltonian<S: Real>(
    adj0: AdjointState<S>,
    horizon: Horizon<S>,
    tol: S,
) -> Result<Vec<HamiltonianSample<S>>> {
    lambda_star(&PhaseState::initial(), &adj0)?;
    let solver = Dopri5::new(tol);
    let mut out = Vec::new();
    solver.integrate(
        |_, z: &[S; 4]| {
            let adj = AdjointState::new(z[2], z[3]);
            let gap = adj.gap();
            let lambda = z[0] - z[1] * z[2] / gap;
            hamiltonian_rhs(z, lambda)
        },
        S::zero(),
        [S::zero(), S::one(), adj0.psi1, adj0.psi2],
        horizon.value(),
        |t, z| {
            check_floor(t, z[1])?;
            out.push(hamiltonian_sample(t, z)?);
            Ok(())
        },
    )?;
    Ok(out)
}

/// Integrates phase and adjoint under a prescribed schedule from `(t0, z0)`
/// to `t1` (either direction), returning the accepted steps as
/// `(t, [x, y, Ψ₁, Ψ₂])`.
pub(crate) fn integrate_adjoint_along<S: Real>(
    driver: &DrivingFunction<S>,
    t0: S,
    z0: [S; 4],
    t1: S,
    tol: S,
) -> Result<Vec<(S, [S; 4])>> {
    let solver = Dopri5::new(tol);
    let mut out: Vec<(S, [S; 4])> = Vec::new();
    let forward = t1 >= t0;
    // break at segment boundaries strictly between t0 and t1
    let mut knots: Vec<S> = driver
        .segments()
        .iter()
        .map(|s| s.end_time)
        .filter(|&e| (forward && e > t0 && e < t1) || (!forward && e < t0 && e > t1))
        .collect();
    if !forward {
        knots.reverse();
    }
    knots.push(t1);
    let mut start = t0;
    let mut z = z0;
    for end in knots {
        let probe = mid(start, end);
        let kind = driver.segments()[driver.segment_index(probe)].kind;
        let skip_first = !out.is_empty();
        let mut first = true;
        z = solver.integrate(
            |_, z: &[S; 4]| hamiltonian_rhs(z, kind.value_at(z[0])),
            start,
            z,
            end,
            |t, z| {
                check_floor(t, z[1])?;
                if first && skip_first {
                    first = false;
                    return Ok(());
                }
                first = false;
                out.push((t, *z));
                Ok(())
            },
        )?;
        start = end;
    }
    Ok(out)
}

/// Largest deviation of the two constant-driver invariants along `trajectory`.
///
/// Returns `(max |Δ((x-a)y)|, max |Δ((x-a)² - y² - 4t)|)`.
pub fn conserved_drift<S: Real>(trajectory: &[PhaseState<S>], a: S) -> (S, S) {
    let Some(first) = trajectory.first() else {
        return (S::zero(), S::zero());
    };
    let four: S = lit(4.0);
    let product = |s: &PhaseState<S>| (s.x - a) * s.y;
    let energy = |s: &PhaseState<S>| (s.x - a) * (s.x - a) - s.y * s.y - four * s.t;
    let (p0, e0) = (product(first), energy(first));
    trajectory
        .iter()
        .fold((S::zero(), S::zero()), |(dp, de), s| {
            (
                dp.max((product(s) - p0).abs()),
                de.max((energy(s) - e0).abs()),
            )
        })
}

/// Time at which the bang segment at `-c` ends for offset `p`:
/// `4t₁ = p² - c²/p² - c² + 1`.
pub fn switch_time_t1<S: Real>(p: S, c: S) -> S {
    (p * p - c * c / (p * p) - c * c + S::one()) / lit(4.0)
}

/// Time at which `λ = x - p` started from `(p - c, c/p)` at `t₁` first
/// reaches `+c`.
///
/// The crossing happens at `y₂ = (c/p) e^{-2c/p}`, which the closed-form
/// height law converts to an elapsed time.
pub fn switch_time_t2<S: Real>(p: S, c: S) -> S {
    let y1 = c / p;
    let y2 = y1 * (-(lit::<S>(2.0)) * c / p).exp();
    switch_time_t1(p, c) + (lit::<S>(4.0) * c * p + y1 * y1 - y2 * y2) / lit(4.0)
}

/// Builds the extremal driver for offset `p ∈ [c, p₀]`: `-c` on `[0, t₁]`,
/// `x - p` on `(t₁, t₂]`, and `+c` on `(t₂, T]` when `λ` reaches `c` early.
pub fn extremal_schedule<S: Real>(p: S, c: S, horizon: Horizon<S>) -> Result<DrivingFunction<S>> {
    if !(c > S::zero()) {
        return Err(Error::InvalidParameter {
            name: "c",
            value: to_f64(c),
            reason: "must be positive",
        });
    }
    let t_end = horizon.value();
    let p0 = solve_p0(&RegimeParams::new(t_end, c)?);
    let slack: S = lit(1e-12);
    if !(p >= c * (S::one() - slack)) || !(p <= p0 * (S::one() + slack)) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: to_f64(p),
            reason: "outside [c, p0]",
        });
    }
    let eps = t_end * lit(1e-13);
    let t1 = switch_time_t1(p, c).max(S::zero());
    if t1 >= t_end - eps {
        return DrivingFunction::constant(-c, c, horizon);
    }
    let mut segments = Vec::with_capacity(3);
    if t1 > eps {
        segments.push(Segment {
            end_time: t1,
            kind: DriverKind::Constant(-c),
        });
    }
    let t2 = switch_time_t2(p, c);
    if t2 < t_end - eps {
        segments.push(Segment {
            end_time: t2,
            kind: DriverKind::ExtremalFollow(p),
        });
        segments.push(Segment {
            end_time: t_end,
            kind: DriverKind::Constant(c),
        });
    } else {
        segments.push(Segment {
            end_time: t_end,
            kind: DriverKind::ExtremalFollow(p),
        });
    }
    DrivingFunction::new(segments, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn h(t: f64) -> Horizon<f64> {
        Horizon::new(t).unwrap()
    }

    #[test]
    fn horizon_bounds() {
        assert!(Horizon::new(0.0).is_err());
        assert!(Horizon::new(0.25).is_err());
        assert!(Horizon::new(-0.1).is_err());
        assert!(Horizon::new(0.2499).is_ok());
    }

    #[test]
    fn zero_driver_endpoint() {
        let d = DrivingFunction::constant(0.0, 1.0, h(0.245)).unwrap();
        let e = integrate_phase(&d, h(0.245), 1e-11).unwrap();
        assert_abs_diff_eq!(e.x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.y, 0.02f64.sqrt(), epsilon = 1e-9);
        assert_eq!(e.t, 0.245);
    }

    #[test]
    fn constant_endpoint_closed_form() {
        let e = constant_driver_endpoint(0.0, 0.245).unwrap();
        assert_abs_diff_eq!(e.y, 0.1414213562373095, epsilon = 1e-12);
        // a = -1, t = 0.2: u² = (0.8 + √(0.64 + 4)) / 2
        let e = constant_driver_endpoint(-1.0, 0.2).unwrap();
        let u = ((0.8 + (0.64f64 + 4.0).sqrt()) / 2.0).sqrt();
        assert_abs_diff_eq!(e.x, u - 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.y, 1.0 / u, epsilon = 1e-14);
        assert_abs_diff_eq!((e.x + 1.0) * e.y, 1.0, epsilon = 1e-14);
        let ode = integrate_phase(
            &DrivingFunction::constant(-1.0, 1.0, h(0.2)).unwrap(),
            h(0.2),
            1e-10,
        )
        .unwrap();
        assert_abs_diff_eq!(ode.x, e.x, epsilon = 1e-9);
        assert_abs_diff_eq!(ode.y, e.y, epsilon = 1e-9);
    }

    #[test]
    fn constant_endpoint_mirror() {
        for &(a, t) in &[(0.3, 0.1), (1.0, 0.245), (0.05, 0.2)] {
            let l = constant_driver_endpoint(-a, t).unwrap();
            let r = constant_driver_endpoint(a, t).unwrap();
            assert_abs_diff_eq!(l.x, -r.x, epsilon = 1e-15);
            assert_abs_diff_eq!(l.y, r.y, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_driver_swallowed() {
        assert!(matches!(
            constant_driver_endpoint(0.0, 0.25),
            Err(Error::Swallowed { .. })
        ));
        assert!(matches!(
            constant_driver_endpoint(0.0, 0.3),
            Err(Error::Swallowed { .. })
        ));
    }

    #[test]
    fn extremal_follow_endpoint_satisfies_integrated_law() {
        let (p, t) = (0.3, 0.2);
        let d = DrivingFunction::extremal_follow(p, f64::INFINITY, h(t)).unwrap();
        let e = integrate_phase(&d, h(t), 1e-11).unwrap();
        // independent: solve 2p² log Y + Y² = 1 - 4T by plain bisection
        let f = |y: f64| 2.0 * p * p * y.ln() + y * y - (1.0 - 4.0 * t);
        let (mut lo, mut hi) = (0.01, 1.0);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if f(m) < 0.0 {
                lo = m
            } else {
                hi = m
            }
        }
        let y = 0.5 * (lo + hi);
        assert_abs_diff_eq!(e.y, y, epsilon = 1e-9);
        assert_abs_diff_eq!(e.x, -p * y.ln(), epsilon = 1e-9);
        let closed = propagate_extremal(PhaseState::initial(), p, t).unwrap();
        assert_abs_diff_eq!(closed.y, y, epsilon = 1e-12);
        assert_abs_diff_eq!(closed.x, -p * y.ln(), epsilon = 1e-12);
    }

    #[test]
    fn hamiltonian_values() {
        let s = PhaseState::new(0.0, 1.0, 0.0);
        assert_eq!(
            hamiltonian(&s, &AdjointState::new(0.0, -1.0), 0.0).unwrap(),
            2.0
        );
        assert_eq!(
            hamiltonian(&s, &AdjointState::new(1.0, 0.0), -1.0).unwrap(),
            1.0
        );
        let flat = PhaseState::new(0.5, 0.0, 0.0);
        assert_eq!(
            hamiltonian(&flat, &AdjointState::new(1.0, 0.0), 0.5),
            Err(Error::DegenerateDenominator)
        );
    }

    #[test]
    fn hamiltonian_vanishes_at_infinity() {
        for &(x, y, p1, p2) in &[
            (0.3f64, 0.5, 1.0, -2.0),
            (-1.0, 2.0, -3.0, 0.5),
            (0.0, 0.1, 2.0, 2.0),
        ] {
            let s = PhaseState::new(x, y, 0.0);
            let a = AdjointState::new(p1, p2);
            assert!(hamiltonian(&s, &a, 1e9).unwrap().abs() < 1e-8);
            assert!(hamiltonian(&s, &a, -1e9).unwrap().abs() < 1e-8);
        }
    }

    #[test]
    fn lambda_star_values() {
        let s = PhaseState::new(0.5, 1.0, 0.0);
        assert_eq!(lambda_star(&s, &AdjointState::new(0.0, -1.0)).unwrap(), 0.5);
        let s = PhaseState::new(0.0, 1.0, 0.0);
        assert_eq!(lambda_star(&s, &AdjointState::new(1.0, 0.0)).unwrap(), -1.0);
        assert_eq!(
            lambda_star(&s, &AdjointState::new(0.0, 1.0)),
            Err(Error::UndefinedMaximizer)
        );
        assert_eq!(
            lambda_star(&s, &AdjointState::new(0.0, 0.0)),
            Err(Error::UndefinedMaximizer)
        );
    }

    #[test]
    fn lambda_star_matches_grid_search() {
        let cases = [
            (0.2, 0.7, 1.3, -0.4),
            (-0.5, 0.3, -0.8, 0.9),
            (0.0, 1.0, 0.5, 0.5),
        ];
        for &(x, y, p1, p2) in &cases {
            let s = PhaseState::new(x, y, 0.0);
            let a = AdjointState::new(p1, p2);
            let l0 = lambda_star(&s, &a).unwrap();
            let h0 = hamiltonian(&s, &a, l0).unwrap();
            for d in [1e-3, 1e-2, 0.1] {
                assert!(h0 >= hamiltonian(&s, &a, l0 + d).unwrap());
                assert!(h0 >= hamiltonian(&s, &a, l0 - d).unwrap());
            }
            let (mut best, mut arg) = (f64::NEG_INFINITY, 0.0);
            for i in 0..=200_000 {
                let l = -10.0 + 1e-4 * i as f64;
                let v = hamiltonian(&s, &a, l).unwrap();
                if v > best {
                    best = v;
                    arg = l;
                }
            }
            if l0.abs() < 10.0 {
                assert!((arg - l0).abs() < 1e-3, "{arg} vs {l0}");
            }
        }
    }

    #[test]
    fn symmetric_covector_gives_zero_driver() {
        let traj = integrate_full_hamiltonian(AdjointState::new(0.0, -1.0), h(0.2), 1e-12).unwrap();
        let last = traj.last().unwrap();
        assert_abs_diff_eq!(last.state.x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(last.state.y, 0.2f64.sqrt(), epsilon = 1e-9);
        assert!(traj
            .iter()
            .all(|s| s.offset == 0.0 && s.lambda.abs() < 1e-12));
    }

    #[test]
    fn full_hamiltonian_constancy() {
        let traj = integrate_full_hamiltonian(AdjointState::new(1.0, 0.0), h(0.1), 1e-10).unwrap();
        let (p0, h0) = (traj[0].offset, traj[0].hamiltonian);
        let dp = traj
            .iter()
            .map(|s| (s.offset - p0).abs())
            .fold(0.0, f64::max);
        let dh = traj
            .iter()
            .map(|s| (s.hamiltonian - h0).abs())
            .fold(0.0, f64::max);
        assert!(dp < 1e-8, "{dp}");
        assert!(dh < 1e-8, "{dh}");
    }

    #[test]
    fn drift_of_constant_driver() {
        let traj = integrate_phase_trajectory(
            &DrivingFunction::constant(0.0, 1.0, h(0.245)).unwrap(),
            h(0.245),
            1e-11,
        )
        .unwrap();
        let (a, b) = conserved_drift(&traj, 0.0);
        assert!(a < 1e-9 && b < 1e-9);
        for &(a, t) in &[(1.0, 0.2), (-0.05, 0.247)] {
            let traj = integrate_phase_trajectory(
                &DrivingFunction::constant(a, 1.0, h(t)).unwrap(),
                h(t),
                1e-10,
            )
            .unwrap();
            let (d1, d2) = conserved_drift(&traj, a);
            assert!(d1 < 1e-8 && d2 < 1e-8, "{d1} {d2}");
        }
    }

    #[test]
    fn schedule_at_p_equal_c_is_pure_follow() {
        let d = extremal_schedule(1.0, 1.0, h(0.245)).unwrap();
        assert_eq!(d.segments().len(), 1);
        assert_eq!(d.segments()[0].kind, DriverKind::ExtremalFollow(1.0));
    }

    #[test]
    fn schedule_switch_time() {
        let d = extremal_schedule(1.2, 1.0, h(0.245)).unwrap();
        let t1 = (1.44 - 1.0 / 1.44) / 4.0;
        assert_abs_diff_eq!(d.segments()[0].end_time, t1, epsilon = 1e-15);
        assert_abs_diff_eq!(t1, 0.186389, epsilon = 1e-6);
        // continuity of λ at t₁: x(t₁) - p = -c
        let head = DrivingFunction::constant(-1.0, 1.0, h(t1)).unwrap();
        let e = integrate_phase(&head, h(t1), 1e-11).unwrap();
        assert_abs_diff_eq!(e.x - 1.2, -1.0, epsilon = 1e-9);
    }

    #[test]
    fn schedule_rejects_out_of_range() {
        assert!(extremal_schedule(0.5, 1.0, h(0.245)).is_err());
        assert!(extremal_schedule(2.0, 1.0, h(0.245)).is_err());
        assert!(extremal_schedule(1.0, 0.0, h(0.245)).is_err());
    }

    #[test]
    fn malformed_schedules() {
        let seg = |e: f64, a: f64| Segment {
            end_time: e,
            kind: DriverKind::Constant(a),
        };
        assert!(DrivingFunction::new(vec![], 1.0).is_err());
        assert!(DrivingFunction::new(vec![seg(0.1, 0.0), seg(0.1, 0.0)], 1.0).is_err());
        assert!(DrivingFunction::new(vec![seg(0.1, 2.0)], 1.0).is_err());
        let d = DrivingFunction::new(vec![seg(0.1, 0.0)], 1.0).unwrap();
        assert!(matches!(
            integrate_phase(&d, h(0.2), 1e-8),
            Err(Error::MalformedSchedule(_))
        ));
        assert!(integrate_phase(&d, h(0.1), 0.0).is_err());
    }

    #[test]
    fn driver_value_and_mirror() {
        let d = extremal_schedule(1.1, 1.0, h(0.245)).unwrap();
        assert_eq!(d.value(0.0, 0.0), -1.0);
        let m = d.mirror();
        assert_eq!(m.value(0.0, 0.0), 1.0);
        assert_eq!(m.segments()[1].kind, DriverKind::ExtremalFollow(-1.1));
    }
}
