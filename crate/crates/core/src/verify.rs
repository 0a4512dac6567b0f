//! Independent checks of an assembled boundary: Monte-Carlo endpoints of
//! random admissible drivers, round trips of the extremal drivers, and a
//! maximum-principle spot check along a bang/follow extremal.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::curves::{assemble_boundary, BoundaryCurve, CurveId, Sampling, ValueRangeBoundary};
use crate::dynamics::{
    extremal_schedule, hamiltonian, integrate_adjoint_along, integrate_phase, lambda_star,
    propagate_constant, switch_time_t1, AdjointState, DriverKind, DrivingFunction, Horizon,
    PhaseState, Segment,
};
use crate::error::{Error, Result};
use crate::geometry::{Location, Polygon};
use crate::ode::Dopri5;
use crate::roots::{solve_p0, RegimeParams};
use crate::scalar::{lit, to_f64, Real};

/// Default half-width of the on-boundary band.
pub const DEFAULT_BAND: f64 = 1e-3;

/// Random piecewise-constant drivers bounded by `c`.
///
/// Each driver has `n_switches` segments. Values are i.i.d. uniform on
/// `[-c, c]` and the interior switch times are sorted uniform draws on
/// `[0, T]`. A `forced_value` replaces every drawn value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriverSampler<S> {
    pub c: S,
    pub n_switches: usize,
    pub horizon: Horizon<S>,
    pub forced_value: Option<S>,
}

impl<S: Real> DriverSampler<S> {
    pub fn new(c: S, horizon: Horizon<S>) -> Result<Self> {
        if !(c >= S::zero()) || !c.is_finite() {
            return Err(Error::InvalidParameter {
                name: "c",
                value: to_f64(c),
                reason: "must be finite and non-negative",
            });
        }
        Ok(Self {
            c,
            n_switches: 4,
            horizon,
            forced_value: None,
        })
    }

    pub fn with_switches(mut self, n_switches: usize) -> Result<Self> {
        if n_switches == 0 {
            return Err(Error::InvalidParameter {
                name: "n_switches",
                value: 0.0,
                reason: "at least one segment is required",
            });
        }
        self.n_switches = n_switches;
        Ok(self)
    }

    pub fn with_forced_value(mut self, value: S) -> Result<Self> {
        if !(value.abs() <= self.c) {
            return Err(Error::InvalidParameter {
                name: "forced_value",
                value: to_f64(value),
                reason: "exceeds the bound c",
            });
        }
        self.forced_value = Some(value);
        Ok(self)
    }

    /// Draws one driver.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> DrivingFunction<S> {
        let t_end = self.horizon.value();
        let mut times: Vec<S> = (1..self.n_switches)
            .map(|_| t_end * lit::<S>(rng.random_range(0.0..=1.0)))
            .collect();
        times.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        times.push(t_end);
        let mut segments: Vec<Segment<S>> = Vec::with_capacity(times.len());
        for end_time in times {
            let drawn = self.c * lit::<S>(rng.random_range(-1.0..=1.0));
            let value = self.forced_value.unwrap_or(drawn).max(-self.c).min(self.c);
            let prev = segments.last().map_or(S::zero(), |s| s.end_time);
            if end_time > prev {
                segments.push(Segment {
                    end_time,
                    kind: DriverKind::Constant(value),
                });
            }
        }
        // a zero-length tail would leave the horizon uncovered
        if let Some(last) = segments.last_mut() {
            last.end_time = t_end;
        }
        DrivingFunction::new(segments, self.c).expect("sampled values lie in [-c, c]")
    }

    /// The driver for sample `index` of the stream seeded by `seed`.
    pub fn draw_indexed(&self, seed: u64, index: u64) -> DrivingFunction<S> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        self.draw(&mut rng)
    }
}

/// How sampled drivers are pushed to the horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Propagation<S> {
    /// Exact per-segment constant-driver maps chained together.
    ClosedForm,
    /// Adaptive Runge-Kutta integration with the given tolerance.
    Ode(S),
}

/// Endpoint of a piecewise-constant driver by chaining exact segment maps.
pub fn chained_endpoint<S: Real>(driver: &DrivingFunction<S>) -> Result<PhaseState<S>> {
    let mut state = PhaseState::initial();
    for (i, seg) in driver.segments().iter().enumerate() {
        let DriverKind::Constant(a) = seg.kind else {
            return Err(Error::MalformedSchedule(format!(
                "segment {i} is not constant"
            )));
        };
        let dt = seg.end_time - driver.segment_start(i);
        state = propagate_constant(state, a, dt)?;
    }
    Ok(state)
}

/// Endpoints of `n` sampled drivers. Sample `i` uses its own random stream
/// derived from `(seed, i)`, so the result does not depend on scheduling.
pub fn sample_reachable<S: Real>(
    sampler: &DriverSampler<S>,
    n: usize,
    seed: u64,
    propagation: Propagation<S>,
) -> Result<Vec<PhaseState<S>>> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let driver = sampler.draw_indexed(seed, i as u64);
            let end = match propagation {
                Propagation::ClosedForm => chained_endpoint(&driver),
                Propagation::Ode(tol) => integrate_phase(&driver, sampler.horizon, tol),
            };
            end.map_err(|e| Error::SampleFailed {
                index: i,
                driver: format!("{:?}", driver.segments()),
                reason: e.to_string(),
            })
        })
        .collect()
}

/// Classifies `pt` against the assembled boundary.
pub fn point_in_boundary<S: Real>(
    boundary: &ValueRangeBoundary<S>,
    pt: &PhaseState<S>,
    band: S,
) -> Location {
    boundary.polygon.classify([pt.x, pt.y], band)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleReport<S> {
    pub n_samples: usize,
    pub n_inside: usize,
    pub n_on_boundary: usize,
    pub n_outside: usize,
    /// Largest outward distance over all samples, zero when every sample is
    /// inside the polygon.
    pub max_violation: S,
    pub seed: u64,
}

impl<S: Real> SampleReport<S> {
    pub fn passed(&self) -> bool {
        self.n_outside == 0
    }
}

/// Tallies `points` against `polygon`.
pub fn classify_points<S: Real>(
    polygon: &Polygon<S>,
    points: &[PhaseState<S>],
    band: S,
    seed: u64,
) -> SampleReport<S> {
    let tallies: Vec<(Location, S)> = points
        .par_iter()
        .map(|p| {
            let pt = [p.x, p.y];
            (polygon.classify(pt, band), polygon.signed_distance(pt))
        })
        .collect();
    let mut report = SampleReport {
        n_samples: points.len(),
        n_inside: 0,
        n_on_boundary: 0,
        n_outside: 0,
        max_violation: S::zero(),
        seed,
    };
    for (loc, d) in tallies {
        match loc {
            Location::Inside => report.n_inside += 1,
            Location::OnBoundary => report.n_on_boundary += 1,
            Location::Outside => report.n_outside += 1,
        }
        report.max_violation = report.max_violation.max(d);
    }
    report
}

/// Samples `n` drivers and classifies their endpoints against `polygon`.
pub fn audit_polygon<S: Real>(
    polygon: &Polygon<S>,
    sampler: &DriverSampler<S>,
    n: usize,
    seed: u64,
    band: S,
    propagation: Propagation<S>,
) -> Result<SampleReport<S>> {
    let pts = sample_reachable(sampler, n, seed, propagation)?;
    Ok(classify_points(polygon, &pts, band, seed))
}

/// Containment audit with the default sampler, band and boundary resolution.
pub fn containment_audit<S: Real>(t: S, c: S, n: usize, seed: u64) -> Result<SampleReport<S>> {
    let boundary = assemble_boundary(t, c, &Sampling::default())?;
    let sampler = DriverSampler::new(c, Horizon::new(t)?)?;
    audit_polygon(
        &boundary.polygon,
        &sampler,
        n,
        seed,
        lit(DEFAULT_BAND),
        Propagation::ClosedForm,
    )
}

/// Largest distance from a polygon vertex to its nearest sampled endpoint.
pub fn coverage_gap<S: Real>(polygon: &Polygon<S>, points: &[PhaseState<S>]) -> S {
    polygon
        .vertices()
        .par_iter()
        .map(|v| {
            points
                .iter()
                .map(|p| (p.x - v[0]).hypot(p.y - v[1]))
                .fold(S::infinity(), S::min)
        })
        .reduce(|| S::zero(), S::max)
}

/// Endpoint of the relaxed two-pole flow
/// `dz/dt = 2μ/(z - c) + 2(1 - μ)/(z + c)` started at `i`.
pub fn mu_field_endpoint<S: Real>(t: S, c: S, mu: S, tol: S) -> Result<[S; 2]> {
    let h = Horizon::new(t)?;
    let two: S = lit(2.0);
    let field = |_: S, s: &[S; 2]| {
        let z = Complex::new(s[0], s[1]);
        let w = Complex::new(two * mu, S::zero()) / (z - c)
            + Complex::new(two * (S::one() - mu), S::zero()) / (z + c);
        [w.re, w.im]
    };
    Dopri5::new(tol).integrate(
        field,
        S::zero(),
        [S::zero(), S::one()],
        h.value(),
        |_, _| Ok(()),
    )
}

/// The driver whose endpoint is the given boundary point, if the curve is
/// generated by a driving function.
fn synthesize_driver<S: Real>(
    id: CurveId,
    x: S,
    y: S,
    param: S,
    c: S,
    horizon: Horizon<S>,
) -> Result<Option<DrivingFunction<S>>> {
    Ok(match id {
        CurveId::L1 => {
            let p = if x == S::zero() {
                S::zero()
            } else {
                -x / y.ln()
            };
            Some(DrivingFunction::extremal_follow(p, c, horizon)?)
        }
        CurveId::L3 | CurveId::L5 | CurveId::L7 | CurveId::L9 => {
            Some(extremal_schedule(param, c, horizon)?)
        }
        CurveId::L4 | CurveId::L6 | CurveId::L8 | CurveId::L10 => {
            Some(extremal_schedule(param, c, horizon)?.mirror())
        }
        _ => None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessReport<S> {
    /// Largest round-trip distance over all checked points.
    pub max: S,
    /// Largest distance per curve, in stitch order.
    pub per_curve: Vec<(CurveId, S)>,
    pub n_points: usize,
}

/// Round-trip distance for one curve: every point is re-integrated through
/// its synthesized driver (or the relaxed two-pole flow on `l2`).
pub fn curve_round_trip<S: Real>(curve: &BoundaryCurve<S>, t: S, c: S, tol: S) -> Result<S> {
    let horizon = Horizon::new(t)?;
    let dists = curve
        .points
        .par_iter()
        .map(|pt| -> Result<S> {
            let end = if curve.id == CurveId::L2 {
                mu_field_endpoint(t, c, pt.param, tol)?
            } else {
                match synthesize_driver(curve.id, pt.x, pt.y, pt.param, c, horizon)? {
                    Some(d) => {
                        let s = integrate_phase(&d, horizon, tol)?;
                        [s.x, s.y]
                    }
                    None => return Ok(S::zero()),
                }
            };
            Ok((end[0] - pt.x).hypot(end[1] - pt.y))
        })
        .collect::<Result<Vec<S>>>()?;
    Ok(dists.into_iter().fold(S::zero(), S::max))
}

/// Re-integrates the drivers behind `m` uniformly spaced parameter values on
/// every curve of the boundary at `(T, c)`.
pub fn extremal_sharpness<S: Real>(t: S, c: S, m: usize, tol: S) -> Result<SharpnessReport<S>> {
    let boundary = assemble_boundary(t, c, &Sampling::uniform(m.max(2)))?;
    let mut per_curve = Vec::with_capacity(boundary.curves.len());
    let mut n_points = 0;
    for curve in &boundary.curves {
        per_curve.push((curve.id, curve_round_trip(curve, t, c, tol)?));
        n_points += curve.points.len();
    }
    let max = per_curve.iter().map(|&(_, d)| d).fold(S::zero(), S::max);
    Ok(SharpnessReport {
        max,
        per_curve,
        n_points,
    })
}

/// Worst maximum-principle defect along the bang/follow extremal with offset
/// `p ∈ (c, p0)`.
///
/// The covector at the first switch is `(p, (p² - y²)/(2y))`, the unique
/// choice with offset `p` and unit Hamiltonian. It is carried backward to
/// `t = 0` and forward to `T`. At every accepted step the value
/// `H(λ(t)) - max(H(-c), H(c), H(clamp λ₀))` is formed and the minimum is
/// returned.
pub fn pontryagin_spot_check<S: Real>(t: S, c: S, p: S, tol: S) -> Result<S> {
    let horizon = Horizon::new(t)?;
    let p0 = solve_p0(&RegimeParams::new(t, c)?);
    if !(p > c && p < p0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: to_f64(p),
            reason: "must lie strictly between c and p0",
        });
    }
    let driver = extremal_schedule(p, c, horizon)?;
    let t1 = switch_time_t1(p, c);
    if !(t1 < t) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: to_f64(p),
            reason: "first switch falls after the horizon",
        });
    }
    let s1 = propagate_constant(PhaseState::initial(), -c, t1)?;
    let two: S = lit(2.0);
    let z1 = [s1.x, s1.y, p, (p * p - s1.y * s1.y) / (two * s1.y)];
    let mut samples = integrate_adjoint_along(&driver, t1, z1, S::zero(), tol)?;
    samples.extend(integrate_adjoint_along(&driver, t1, z1, t, tol)?);
    let mut worst = S::infinity();
    for (time, z) in samples {
        let state = PhaseState::new(z[0], z[1], time);
        let adj = AdjointState::new(z[2], z[3]);
        let lam = driver.value(time, z[0]);
        let h = hamiltonian(&state, &adj, lam)?;
        let l0 = lambda_star(&state, &adj)?.max(-c).min(c);
        let best = hamiltonian(&state, &adj, -c)?
            .max(hamiltonian(&state, &adj, c)?)
            .max(hamiltonian(&state, &adj, l0)?);
        worst = worst.min(h - best);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::constant_driver_endpoint;

    fn sampler(c: f64, t: f64) -> DriverSampler<f64> {
        DriverSampler::new(c, Horizon::new(t).unwrap()).unwrap()
    }

    #[test]
    fn forced_zero_lands_on_axis() {
        let s = sampler(1.0, 0.245)
            .with_switches(1)
            .unwrap()
            .with_forced_value(0.0)
            .unwrap();
        let pts = sample_reachable(&s, 3, 7, Propagation::ClosedForm).unwrap();
        for p in pts {
            assert_eq!(p.x, 0.0);
            assert!((p.y - 0.02f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn forced_bound_matches_closed_form() {
        for v in [-1.0, 1.0] {
            let s = sampler(1.0, 0.2)
                .with_switches(1)
                .unwrap()
                .with_forced_value(v)
                .unwrap();
            let p = sample_reachable(&s, 1, 0, Propagation::Ode(1e-11)).unwrap()[0];
            let e = constant_driver_endpoint(v, 0.2).unwrap();
            assert!((p.x - e.x).abs() < 1e-9 && (p.y - e.y).abs() < 1e-9);
        }
        assert!(sampler(1.0, 0.2).with_forced_value(1.5).is_err());
        assert!(sampler(1.0, 0.2).with_switches(0).is_err());
    }

    #[test]
    fn sampled_drivers_respect_bound() {
        let s = sampler(0.3, 0.2).with_switches(6).unwrap();
        for i in 0..500 {
            let d = s.draw_indexed(3, i);
            assert!((d.horizon() - 0.2).abs() == 0.0);
            for seg in d.segments() {
                let DriverKind::Constant(a) = seg.kind else {
                    panic!()
                };
                assert!(a.abs() <= 0.3);
            }
        }
    }

    #[test]
    fn closed_form_chain_matches_ode() {
        let s = sampler(0.5, 0.245);
        let a = sample_reachable(&s, 40, 11, Propagation::ClosedForm).unwrap();
        let b = sample_reachable(&s, 40, 11, Propagation::Ode(1e-11)).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!(
                (p.x - q.x).abs() < 1e-8 && (p.y - q.y).abs() < 1e-8,
                "{p:?} {q:?}"
            );
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let s = sampler(1.0, 0.245);
        let a = sample_reachable(&s, 200, 42, Propagation::ClosedForm).unwrap();
        let b = sample_reachable(&s, 200, 42, Propagation::ClosedForm).unwrap();
        assert_eq!(a, b);
        let c = sample_reachable(&s, 200, 43, Propagation::ClosedForm).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn point_classification_examples() {
        let b = assemble_boundary(0.245, 1.0, &Sampling::with_points(64)).unwrap();
        let g = 0.02f64.sqrt();
        let at = |x, y| PhaseState::new(x, y, 0.245);
        assert_eq!(
            point_in_boundary(&b, &at(0.0, (1.0 + g) / 2.0), 1e-3),
            Location::Inside
        );
        assert_eq!(
            point_in_boundary(&b, &at(0.0, g), 1e-3),
            Location::OnBoundary
        );
        assert_eq!(
            point_in_boundary(&b, &at(10.0, 10.0), 1e-3),
            Location::Outside
        );
    }

    #[test]
    fn empty_audit() {
        let r = containment_audit(0.245, 1.0, 0, 42).unwrap();
        assert_eq!(
            (r.n_samples, r.n_inside, r.n_on_boundary, r.n_outside),
            (0, 0, 0, 0)
        );
        assert_eq!(r.max_violation, 0.0);
        assert!(r.passed());
    }

    #[test]
    fn small_audit_counts_add_up() {
        let r = containment_audit(0.245, 1.0, 500, 42).unwrap();
        assert_eq!(r.n_inside + r.n_on_boundary + r.n_outside, 500);
        assert_eq!(r.n_outside, 0);
        assert_eq!(r.seed, 42);
    }

    #[test]
    fn mu_field_ends() {
        let e = constant_driver_endpoint(-1.0, 0.245).unwrap();
        let z = mu_field_endpoint(0.245f64, 1.0, 0.0, 1e-12).unwrap();
        assert!((z[0] - e.x).abs() < 1e-9 && (z[1] - e.y).abs() < 1e-9);
        let z = mu_field_endpoint(0.245f64, 1.0, 0.5, 1e-12).unwrap();
        assert!(z[0].abs() < 1e-12);
    }

    #[test]
    fn sharpness_single_curves() {
        let b = assemble_boundary(0.245, 1.0, &Sampling::uniform(9)).unwrap();
        let l3 = &b.curves[1];
        assert_eq!(l3.id, CurveId::L3);
        // the p = c end is a pure follow driver
        let only_first = BoundaryCurve {
            points: vec![l3.points[0]],
            ..l3.clone()
        };
        assert!(curve_round_trip(&only_first, 0.245, 1.0, 1e-12).unwrap() < 1e-7);
        let l2 = &b.curves[2];
        let start = BoundaryCurve {
            points: vec![l2.points[0]],
            ..l2.clone()
        };
        assert!(curve_round_trip(&start, 0.245, 1.0, 1e-13).unwrap() < 1e-9);
    }

    #[test]
    fn spot_check_is_nonnegative() {
        let d = pontryagin_spot_check(0.245, 1.0, 1.1, 1e-11).unwrap();
        assert!(d >= -1e-6, "{d}");
        assert!(pontryagin_spot_check(0.245, 1.0, 1.0, 1e-11).is_err());
        assert!(pontryagin_spot_check(0.245, 1.0, 2.0, 1e-11).is_err());
    }
}
