//! Boundary curves of the value range and their assembly into a closed
//! polygon.
//!
//! The right half (`x >= 0`) of each curve is generated from its own
//! parameter: the height `Y` on the arc shared with the unrestricted
//! boundary, the extremal offset `p` on the bang/follow families, and the
//! mixing weight `μ` on the two-pole arc across the top. Left halves are
//! exact reflections.

use num_complex::Complex;

use crate::dynamics::Horizon;
use crate::error::{Error, Result};
use crate::geometry::{segment_distance, Polygon};
use crate::roots::{
    bracket_root, solve_c0, solve_p0, solve_switch_roots, solve_y0, RegimeParams, SwitchRoots,
};
use crate::scalar::{linspace, lit, mid, to_f64, Real};

/// Maximum allowed gap between consecutive curve endpoints.
pub const STITCH_TOLERANCE: f64 = 1e-6;

/// Curve labels. Even-numbered `L4..L10` are reflections of `L3..L9`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveId {
    L1,
    L2,
    L3,
    L4,
    L5,
    L6,
    L7,
    L8,
    L9,
    L10,
    Unrestricted,
    Parametric,
}

impl CurveId {
    pub fn label(self) -> &'static str {
        match self {
            CurveId::L1 => "l1",
            CurveId::L2 => "l2",
            CurveId::L3 => "l3",
            CurveId::L4 => "l4",
            CurveId::L5 => "l5",
            CurveId::L6 => "l6",
            CurveId::L7 => "l7",
            CurveId::L8 => "l8",
            CurveId::L9 => "l9",
            CurveId::L10 => "l10",
            CurveId::Unrestricted => "unrestricted",
            CurveId::Parametric => "parametric",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Some(match s {
            "l1" => CurveId::L1,
            "l2" => CurveId::L2,
            "l3" => CurveId::L3,
            "l4" => CurveId::L4,
            "l5" => CurveId::L5,
            "l6" => CurveId::L6,
            "l7" => CurveId::L7,
            "l8" => CurveId::L8,
            "l9" => CurveId::L9,
            "l10" => CurveId::L10,
            "unrestricted" => CurveId::Unrestricted,
            "parametric" => CurveId::Parametric,
            _ => return None,
        })
    }

    /// Label of the reflected curve.
    pub fn mirror(self) -> Self {
        match self {
            CurveId::L3 => CurveId::L4,
            CurveId::L4 => CurveId::L3,
            CurveId::L5 => CurveId::L6,
            CurveId::L6 => CurveId::L5,
            CurveId::L7 => CurveId::L8,
            CurveId::L8 => CurveId::L7,
            CurveId::L9 => CurveId::L10,
            CurveId::L10 => CurveId::L9,
            other => other,
        }
    }
}

impl std::fmt::Display for CurveId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint<S> {
    pub x: S,
    pub y: S,
    /// Generating parameter (`Y`, `μ`, `p` or `φ` depending on the curve).
    pub param: S,
}

impl<S: Real> BoundaryPoint<S> {
    pub fn xy(&self) -> [S; 2] {
        [self.x, self.y]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve<S> {
    pub id: CurveId,
    pub points: Vec<BoundaryPoint<S>>,
    pub param_range: (S, S),
}

impl<S: Real> BoundaryCurve<S> {
    fn new(id: CurveId, points: Vec<BoundaryPoint<S>>) -> Self {
        let param_range = (points[0].param, points[points.len() - 1].param);
        Self {
            id,
            points,
            param_range,
        }
    }

    pub fn first(&self) -> &BoundaryPoint<S> {
        &self.points[0]
    }

    pub fn last(&self) -> &BoundaryPoint<S> {
        &self.points[self.points.len() - 1]
    }

    /// Reflection in the imaginary axis, traversed in reverse.
    pub fn mirrored(&self) -> Self {
        let points: Vec<_> = self
            .points
            .iter()
            .rev()
            .map(|p| BoundaryPoint {
                x: -p.x,
                y: p.y,
                param: p.param,
            })
            .collect();
        Self::new(self.id.mirror(), points)
    }

    /// Longest distance between consecutive points.
    pub fn max_chord(&self) -> S {
        self.points
            .windows(2)
            .map(|w| (w[1].x - w[0].x).hypot(w[1].y - w[0].y))
            .fold(S::zero(), S::max)
    }
}

/// Parameter sampling for curve generation.
///
/// Parameters start on a uniform grid of `points` values. With `refine`,
/// intervals are bisected while the chord exceeds `chord_fraction` of the
/// curve's bounding-box diagonal or the parameter midpoint lies farther than
/// `sagitta` from the chord.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling<S> {
    pub points: usize,
    pub refine: bool,
    pub chord_fraction: S,
    pub sagitta: S,
    pub max_depth: u32,
}

impl<S: Real> Default for Sampling<S> {
    fn default() -> Self {
        Self {
            points: 256,
            refine: true,
            chord_fraction: lit(1.0 / 64.0),
            sagitta: lit(2.5e-7),
            max_depth: 24,
        }
    }
}

impl<S: Real> Sampling<S> {
    pub fn with_points(points: usize) -> Self {
        Self {
            points,
            ..Self::default()
        }
    }

    /// Exactly `points` uniform parameter values, no refinement.
    pub fn uniform(points: usize) -> Self {
        Self {
            points,
            refine: false,
            ..Self::default()
        }
    }
}

fn sample_curve<S: Real, F>(
    lo: S,
    hi: S,
    sampling: &Sampling<S>,
    mut eval: F,
) -> Result<Vec<BoundaryPoint<S>>>
where
    F: FnMut(S, Option<[S; 2]>) -> Result<[S; 2]>,
{
    let params = linspace(lo, hi, sampling.points.max(2));
    let mut coarse = Vec::with_capacity(params.len());
    let mut hint = None;
    for &q in &params {
        let xy = eval(q, hint)?;
        hint = Some(xy);
        coarse.push(BoundaryPoint {
            x: xy[0],
            y: xy[1],
            param: q,
        });
    }
    if !sampling.refine || lo == hi {
        return Ok(coarse);
    }
    let (mut x0, mut x1, mut y0, mut y1) = (
        S::infinity(),
        S::neg_infinity(),
        S::infinity(),
        S::neg_infinity(),
    );
    for p in &coarse {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let max_chord = (x1 - x0).hypot(y1 - y0) * sampling.chord_fraction;
    let mut out = vec![coarse[0]];
    for w in coarse.windows(2) {
        refine(w[0], w[1], 0, sampling, max_chord, &mut eval, &mut out)?;
    }
    Ok(out)
}

fn refine<S: Real, F>(
    a: BoundaryPoint<S>,
    b: BoundaryPoint<S>,
    depth: u32,
    sampling: &Sampling<S>,
    max_chord: S,
    eval: &mut F,
    out: &mut Vec<BoundaryPoint<S>>,
) -> Result<()>
where
    F: FnMut(S, Option<[S; 2]>) -> Result<[S; 2]>,
{
    let q = mid(a.param, b.param);
    if depth >= sampling.max_depth || q == a.param || q == b.param {
        out.push(b);
        return Ok(());
    }
    let xy = eval(q, Some([mid(a.x, b.x), mid(a.y, b.y)]))?;
    let m = BoundaryPoint {
        x: xy[0],
        y: xy[1],
        param: q,
    };
    let chord = (b.x - a.x).hypot(b.y - a.y);
    if chord > max_chord || segment_distance(m.xy(), a.xy(), b.xy()) > sampling.sagitta {
        refine(a, m, depth + 1, sampling, max_chord, eval, out)?;
        refine(m, b, depth + 1, sampling, max_chord, eval, out)
    } else {
        out.push(b);
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Unrestricted boundary and its parametric cross-check

/// Right-half abscissa of the unrestricted boundary `2X² = log Y (1 - 4T - Y²)`.
pub fn unrestricted_x<S: Real>(t: S, y: S) -> S {
    let g = S::one() - lit::<S>(4.0) * t;
    (y.ln() * (g - y * y) / lit(2.0)).max(S::zero()).sqrt()
}

/// `2X² - log Y (1 - 4T - Y²)`.
pub fn unrestricted_residual<S: Real>(t: S, x: S, y: S) -> S {
    let g = S::one() - lit::<S>(4.0) * t;
    lit::<S>(2.0) * x * x - y.ln() * (g - y * y)
}

/// Right half of the unrestricted boundary, `Y` from `√(1 - 4T)` to 1.
pub fn unrestricted_boundary<S: Real>(t: S, sampling: &Sampling<S>) -> Result<BoundaryCurve<S>> {
    let t = Horizon::new(t)?.value();
    let lo = (S::one() - lit::<S>(4.0) * t).sqrt();
    let pts = sample_curve(lo, S::one(), sampling, |y, _| Ok([unrestricted_x(t, y), y]))?;
    Ok(BoundaryCurve::new(CurveId::Unrestricted, pts))
}

/// Closed polygon of the unrestricted range: right half plus its mirror.
pub fn unrestricted_polygon<S: Real>(t: S, sampling: &Sampling<S>) -> Result<Polygon<S>> {
    let right = unrestricted_boundary(t, sampling)?;
    let left = right.mirrored();
    let mut v: Vec<[S; 2]> = right.points.iter().map(|p| p.xy()).collect();
    v.extend(left.points.iter().skip(1).map(|p| p.xy()));
    Polygon::new(v)
}

/// Point of the classical parametric boundary description for `T <= 1/4`.
pub fn parametric_point<S: Real>(phi: S, t: S) -> Result<BoundaryPoint<S>> {
    let c0 = solve_c0(phi, t)?;
    let s = S::one() - phi.sin();
    let x = (c0 * c0 * (lit::<S>(4.0) * t - S::one()) + s * s) / (lit::<S>(2.0) * c0 * phi.cos());
    Ok(BoundaryPoint {
        x,
        y: s / c0,
        param: phi,
    })
}

/// `n` parametric points with `φ` spread over the open interval `(-π/2, π/2)`.
pub fn parametric_curve<S: Real>(t: S, n: usize) -> Result<BoundaryCurve<S>> {
    let half = S::FRAC_PI_2();
    let step = (half + half) / S::from_usize(n + 1).unwrap();
    let pts = (1..=n)
        .map(|i| parametric_point(-half + step * S::from_usize(i).unwrap(), t))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundaryCurve::new(CurveId::Parametric, pts))
}

// ---------------------------------------------------------------------------
// Restricted boundary families

/// Arc of the unrestricted boundary reachable under `|λ| <= c`,
/// `Y ∈ [√(1 - 4T), Y₀]`.
pub fn curve_l1<S: Real>(t: S, c: S, sampling: &Sampling<S>) -> Result<BoundaryCurve<S>> {
    let rp = RegimeParams::new(t, c)?;
    rp.require_main_regime()?;
    let y0 = solve_y0(&rp)?;
    let lo = rp.gap().sqrt();
    let pts = sample_curve(lo, y0, sampling, |y, _| Ok([unrestricted_x(t, y), y]))?;
    Ok(BoundaryCurve::new(CurveId::L1, pts))
}

/// Endpoint reached by the bang-then-follow driver with offset `p`:
/// solves `2p² log(Yp/c) + Y² - p² = 1 - 4T - c²` and sets
/// `X = -c + p(1 - log(Yp/c))`.
pub fn l3_point<S: Real>(t: S, c: S, p: S) -> Result<[S; 2]> {
    let two: S = lit(2.0);
    let rhs = S::one() - lit::<S>(4.0) * t - c * c;
    let f = |y: S| two * p * p * (y * p / c).ln() + y * y - p * p - rhs;
    // the height at the switch, c/p, bounds the root from above
    let hi = c / p;
    let mut lo = hi / two;
    while f(lo) > S::zero() {
        lo = lo / two;
        if lo < lit(1e-300f64.max(to_f64(S::min_positive_value()))) {
            return Err(Error::NoSignChange {
                lo: to_f64(lo),
                hi: to_f64(hi),
                f_lo: to_f64(f(lo)),
                f_hi: to_f64(f(hi)),
            });
        }
    }
    let y = if f(hi) <= S::zero() {
        hi
    } else {
        bracket_root(f, lo, hi, hi * lit(1e-16))?
    };
    Ok([-c + p * (S::one() - (y * p / c).ln()), y])
}

/// Residuals of the two equations defining the bang/follow families.
pub fn l3_residuals<S: Real>(t: S, c: S, p: S, x: S, y: S) -> (S, S) {
    let two: S = lit(2.0);
    let l = (y * p / c).ln();
    (
        two * p * p * l + y * y - p * p - (S::one() - lit::<S>(4.0) * t - c * c),
        x - (-c + p * (S::one() - l)),
    )
}

/// `λ(T) = X - p` at the end of the bang/follow extremal.
pub fn terminal_driver<S: Real>(t: S, c: S, p: S) -> Result<S> {
    Ok(l3_point(t, c, p)?[0] - p)
}

fn check_p_range<S: Real>(c: S, p0: S, lo: S, hi: S) -> Result<()> {
    let slack: S = lit(1e-12);
    if !(lo >= c * (S::one() - slack)) || !(hi <= p0 * (S::one() + slack)) || !(lo <= hi) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: to_f64(lo),
            reason: "range outside [c, p0]",
        });
    }
    Ok(())
}

/// Bang/follow family on `p ∈ [p_lo, p_hi]`, labelled `id` (`L3`, `L5` or `L9`).
pub fn curve_l3<S: Real>(
    id: CurveId,
    t: S,
    c: S,
    p_lo: S,
    p_hi: S,
    sampling: &Sampling<S>,
) -> Result<BoundaryCurve<S>> {
    let rp = RegimeParams::new(t, c)?;
    check_p_range(c, solve_p0(&rp), p_lo, p_hi)?;
    let pts = sample_curve(p_lo, p_hi, sampling, |p, _| l3_point(t, c, p))?;
    Ok(BoundaryCurve::new(id, pts))
}

/// Endpoint of the bang/follow/bang driver with offset `p`.
///
/// With `k = c e^{-2c/p}` and `m = c² - 1 + 4T - 4cp`, the offset
/// `u = X - c > 0` solves `u² - k²/u² = m` and `Y = k/u`.
pub fn l7_point<S: Real>(t: S, c: S, p: S) -> [S; 2] {
    let two: S = lit(2.0);
    let four: S = lit(4.0);
    let k = c * (-two * c / p).exp();
    let m = c * c - S::one() + four * t - four * c * p;
    let r = (m * m + four * k * k).sqrt();
    let u2 = if m >= S::zero() {
        (m + r) / two
    } else {
        two * k * k / (r - m)
    };
    let u = u2.sqrt();
    [c + u, k / u]
}

/// Residuals of `4cp + (X-c)² - Y² - 4T = c² - 1` and
/// `-p log((X-c)Y/c) = 2c`.
pub fn l7_residuals<S: Real>(t: S, c: S, p: S, x: S, y: S) -> (S, S) {
    let four: S = lit(4.0);
    let u = x - c;
    (
        four * c * p + u * u - y * y - four * t - (c * c - S::one()),
        -p * (u * y / c).ln() - lit::<S>(2.0) * c,
    )
}

/// Bang/follow/bang family on `p ∈ [p1, p2]`.
pub fn curve_l7<S: Real>(
    t: S,
    c: S,
    p1: S,
    p2: S,
    sampling: &Sampling<S>,
) -> Result<BoundaryCurve<S>> {
    let rp = RegimeParams::new(t, c)?;
    check_p_range(c, solve_p0(&rp), p1, p2)?;
    if !(p1 < p2) {
        return Err(Error::InvalidParameter {
            name: "p1",
            value: to_f64(p1),
            reason: "must be below p2",
        });
    }
    let pts = sample_curve(p1, p2, sampling, |p, _| Ok(l7_point(t, c, p)))?;
    Ok(BoundaryCurve::new(CurveId::L7, pts))
}

/// Residual of the two-pole equation
/// `z² + 1 - 2b(z - i) + 2(b² - c²) log((z + b)/(i + b)) - 4T`, `b = c(2μ - 1)`.
pub fn l2_residual<S: Real>(t: S, c: S, mu: S, z: Complex<S>) -> Complex<S> {
    let two: S = lit(2.0);
    let b = c * (two * mu - S::one());
    let i = Complex::<S>::i();
    let k = two * (b * b - c * c);
    let log_ratio = (z + b).ln() - (i + b).ln();
    z * z + S::one() - (z - i) * (two * b) + log_ratio * k - lit::<S>(4.0) * t
}

/// Closed-form `μ = 0` end of the two-pole arc: `(z + c)² = 4T + c² - 1 + 2ci`.
pub fn l2_anchor<S: Real>(t: S, c: S) -> Complex<S> {
    let w = Complex::new(lit::<S>(4.0) * t + c * c - S::one(), lit::<S>(2.0) * c);
    w.sqrt() - c
}

/// Solves the two-pole equation for `z` in the upper half-plane by damped
/// Newton iteration started from `guess`.
///
/// `log(z + b) - log(i + b)` with principal logarithms is the continuous
/// logarithm along any path in the upper half-plane, so iterates are kept
/// there.
pub fn l2_point<S: Real>(t: S, c: S, mu: S, guess: Complex<S>) -> Result<Complex<S>> {
    if !(guess.im > S::zero()) {
        return Err(Error::BranchJump { mu: to_f64(mu) });
    }
    let two: S = lit(2.0);
    let b = c * (two * mu - S::one());
    let f = |z: Complex<S>| l2_residual(t, c, mu, z);
    let df = |z: Complex<S>| (z * z - c * c) * two / (z + b);
    let tol = lit::<S>(1e-14).max(S::epsilon() * lit(64.0));
    let mut z = guess;
    let mut fz = f(z);
    for _ in 0..200 {
        let scale = S::one() + z.norm_sqr();
        if fz.norm() <= tol * scale {
            return Ok(z);
        }
        let step = fz / df(z);
        let mut damping = S::one();
        let mut accepted = None;
        while damping > lit(1e-12) {
            let cand = z - step * damping;
            if cand.im > S::zero() {
                let fc = f(cand);
                if fc.norm() < fz.norm() {
                    accepted = Some((cand, fc));
                    break;
                }
            }
            damping = damping / two;
        }
        match accepted {
            Some((cand, fc)) => {
                let moved = (cand - z).norm();
                z = cand;
                fz = fc;
                if moved <= S::epsilon() * lit::<S>(4.0) * (S::one() + z.norm()) {
                    break;
                }
            }
            None => break,
        }
    }
    let scale = S::one() + z.norm_sqr();
    if fz.norm() <= lit::<S>(1e-10).max(S::epsilon() * lit(1e3)) * scale {
        Ok(z)
    } else {
        Err(Error::NewtonDiverged {
            mu: to_f64(mu),
            residual: to_f64(fz.norm()),
        })
    }
}

/// The two-pole arc over `μ ∈ [0, 1]`.
///
/// Continuation runs from the closed-form `μ = 0` end to `μ = 1/2`; the
/// other half is the reflection `z(1 - μ) = -conj z(μ)`.
pub fn curve_l2<S: Real>(t: S, c: S, sampling: &Sampling<S>) -> Result<BoundaryCurve<S>> {
    RegimeParams::new(t, c)?;
    let anchor = l2_anchor(t, c);
    let mut first = true;
    let half: S = lit(0.5);
    let right = sample_curve(S::zero(), half, sampling, |mu, hint| {
        let guess = match hint {
            _ if first => {
                first = false;
                anchor
            }
            Some([x, y]) => Complex::new(x, y),
            None => anchor,
        };
        let z = l2_point(t, c, mu, guess)?;
        // the symmetric mixture ends exactly on the imaginary axis
        Ok([if mu == half { S::zero() } else { z.re }, z.im])
    })?;
    let mut points = right.clone();
    points.extend(right.iter().rev().skip(1).map(|p| BoundaryPoint {
        x: -p.x,
        y: p.y,
        param: S::one() - p.param,
    }));
    Ok(BoundaryCurve::new(CurveId::L2, points))
}

// ---------------------------------------------------------------------------
// Assembly

/// Which boundary composition applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// The driver saturates at `+c` before `T` on part of the family:
    /// curves `l1, l2, l5..l10`.
    One,
    /// Curves `l1..l4`.
    Two,
}

impl CaseTag {
    pub fn number(self) -> u8 {
        match self {
            CaseTag::One => 1,
            CaseTag::Two => 2,
        }
    }
}

/// Closed boundary of the value range with the data used to build it.
#[derive(Debug, Clone)]
pub struct ValueRangeBoundary<S> {
    pub t: S,
    pub c: S,
    pub case_tag: CaseTag,
    pub y0: S,
    pub roots: SwitchRoots<S>,
    /// `λ(T) - c` of the bang/follow driver at the midpoint of the two
    /// switch roots, when both exist.
    pub midpoint_excess: Option<S>,
    /// Curves in counterclockwise stitch order starting at `(0, √(1-4T))`.
    pub curves: Vec<BoundaryCurve<S>>,
    pub polygon: Polygon<S>,
    pub max_stitch_gap: S,
    pub notes: Vec<String>,
}

/// Builds the boundary of the value range for `|λ| <= c` at horizon `T`.
pub fn assemble_boundary<S: Real>(
    t: S,
    c: S,
    sampling: &Sampling<S>,
) -> Result<ValueRangeBoundary<S>> {
    Horizon::new(t)?;
    let rp = RegimeParams::new(t, c)?;
    rp.require_main_regime()?;
    let y0 = solve_y0(&rp)?;
    let p0 = solve_p0(&rp);
    let roots = solve_switch_roots(&rp, p0)?;
    let mut notes = Vec::new();

    let (case_tag, midpoint_excess) = match (roots.p1, roots.p2) {
        (Some(p1), Some(p2)) => {
            let excess = terminal_driver(t, c, mid(p1, p2))? - c;
            if excess > S::zero() {
                (CaseTag::One, Some(excess))
            } else {
                notes.push(format!(
                    "two switch roots {p1} and {p2} without a terminal-driver violation (excess {excess})"
                ));
                (CaseTag::Two, Some(excess))
            }
        }
        (Some(p1), None) => {
            notes.push(format!(
                "single switch root p1={p1}; terminal driver stays within the bound"
            ));
            (CaseTag::Two, None)
        }
        _ => (CaseTag::Two, None),
    };

    let l1 = curve_l1(t, c, sampling)?;
    let mut right = vec![l1.clone()];
    match case_tag {
        CaseTag::Two => right.push(curve_l3(CurveId::L3, t, c, c, p0, sampling)?),
        CaseTag::One => {
            let (p1, p2) = (roots.p1.unwrap(), roots.p2.unwrap());
            right.push(curve_l3(CurveId::L5, t, c, c, p1, sampling)?);
            right.push(curve_l7(t, c, p1, p2, sampling)?);
            right.push(curve_l3(CurveId::L9, t, c, p2, p0, sampling)?);
        }
    }
    let mut curves = right.clone();
    curves.push(curve_l2(t, c, sampling)?);
    curves.extend(right.iter().rev().map(|cv| cv.mirrored()));

    let mut max_gap = S::zero();
    let n = curves.len();
    for i in 0..n {
        let (a, b) = (&curves[i], &curves[(i + 1) % n]);
        let gap = (a.last().x - b.first().x).hypot(a.last().y - b.first().y);
        if !(gap <= lit(STITCH_TOLERANCE)) {
            return Err(Error::StitchGap {
                from: a.id.label(),
                to: b.id.label(),
                gap: to_f64(gap),
            });
        }
        max_gap = max_gap.max(gap);
    }

    let mut vertices: Vec<[S; 2]> = Vec::new();
    for (i, cv) in curves.iter().enumerate() {
        let skip = usize::from(i > 0);
        let take = if i + 1 == n {
            cv.points.len() - 1 - skip
        } else {
            cv.points.len() - skip
        };
        vertices.extend(cv.points.iter().skip(skip).take(take).map(|p| p.xy()));
    }
    let polygon = Polygon::new(vertices)?;

    Ok(ValueRangeBoundary {
        t,
        c,
        case_tag,
        y0,
        roots,
        midpoint_excess,
        curves,
        polygon,
        max_stitch_gap: max_gap,
        notes,
    })
}

impl<S: Real> ValueRangeBoundary<S> {
    pub fn p0(&self) -> S {
        self.roots.p0
    }

    /// Curves generated directly (the right half and the top arc).
    pub fn generating_curves(&self) -> impl Iterator<Item = &BoundaryCurve<S>> {
        let k = self.curves.len() / 2 + 1;
        self.curves.iter().take(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::constant_driver_endpoint;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unrestricted_endpoints_and_value() {
        let t = 0.245;
        assert_eq!(unrestricted_x(t, (1.0 - 4.0 * 0.245f64).sqrt()), 0.0);
        assert_eq!(unrestricted_x(t, 1.0), 0.0);
        let x = unrestricted_x(t, 0.5);
        let expect = ((0.5f64).ln() * (0.02 - 0.25) / 2.0).sqrt();
        assert_abs_diff_eq!(x, expect, epsilon = 1e-15);
        assert_abs_diff_eq!(x, 0.282333, epsilon = 1e-6);
        // same point through the offset parameterisation
        let p = -x / 0.5f64.ln();
        assert!((2.0 * p * p * 0.5f64.ln() + 0.25 - 0.02).abs() < 1e-10);
        let cv = unrestricted_boundary(t, &Sampling::uniform(50)).unwrap();
        assert_eq!(cv.first().xy(), [0.0, (1.0 - 4.0 * 0.245f64).sqrt()]);
        assert_eq!(cv.last().xy(), [0.0, 1.0]);
    }

    #[test]
    fn parametric_points_on_unrestricted_boundary() {
        let t = 0.2f64;
        let cv = parametric_curve(t, 100).unwrap();
        for p in &cv.points {
            assert!(unrestricted_residual(t, p.x, p.y).abs() < 1e-8, "{p:?}");
        }
        let p = parametric_point(0.0, t).unwrap();
        let c0 = solve_c0(0.0, t).unwrap();
        assert_abs_diff_eq!(p.y, 1.0 / c0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            p.x * 2.0 * c0,
            c0 * c0 * (4.0 * t - 1.0) + 1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn parametric_limits() {
        let t = 0.2;
        let lo = parametric_point(-std::f64::consts::FRAC_PI_2 + 1e-4, t).unwrap();
        let hi = parametric_point(std::f64::consts::FRAC_PI_2 - 1e-4, t).unwrap();
        let ends = [[0.0, 1.0], [0.0, 0.2f64.sqrt()]];
        for p in [lo, hi] {
            let d = ends
                .iter()
                .map(|e| (p.x - e[0]).hypot(p.y - e[1]))
                .fold(f64::INFINITY, f64::min);
            assert!(d < 1e-2, "{p:?}");
        }
    }

    #[test]
    fn l1_endpoints_and_admissibility() {
        let (t, c) = (0.245, 1.0);
        let cv = curve_l1(t, c, &Sampling::with_points(64)).unwrap();
        assert_eq!(cv.first().xy(), [0.0, (1.0 - 4.0 * 0.245f64).sqrt()]);
        let y0 = cv.last().y;
        assert!((2.0 * y0.ln() + y0 * y0 - 0.02).abs() < 1e-10);
        for p in cv.points.iter().skip(1) {
            let off = -p.x / p.y.ln();
            assert!(off >= 0.0 && off <= c + 1e-9);
            assert!(-off >= -c - 1e-9);
            assert!(p.x - off <= c);
        }
    }

    #[test]
    fn l3_reduces_at_ends() {
        let (t, c) = (0.245f64, 1.0f64);
        let at_c = l3_point(t, c, c).unwrap();
        let rp = RegimeParams::new(t, c).unwrap();
        let y0 = solve_y0(&rp).unwrap();
        assert_abs_diff_eq!(at_c[1], y0, epsilon = 1e-10);
        assert_abs_diff_eq!(at_c[0], -c * y0.ln(), epsilon = 1e-10);
        let p0 = solve_p0(&rp);
        let at_p0 = l3_point(t, c, p0).unwrap();
        let e = constant_driver_endpoint(-c, t).unwrap();
        assert_abs_diff_eq!(at_p0[0], e.x, epsilon = 1e-8);
        assert_abs_diff_eq!(at_p0[1], e.y, epsilon = 1e-8);
    }

    #[test]
    fn l3_and_l7_residuals() {
        let (t, c) = (0.247f64, 0.05f64);
        for p in [0.06, 0.1, 0.2] {
            let [x, y] = l3_point(t, c, p).unwrap();
            let (a, b) = l3_residuals(t, c, p, x, y);
            assert!(a.abs() < 1e-12 && b.abs() < 1e-12);
        }
        for p in [0.062, 0.07, 0.08] {
            let [x, y] = l7_point(t, c, p);
            let (a, b) = l7_residuals(t, c, p, x, y);
            assert!(a.abs() < 1e-10 && b.abs() < 1e-10, "{a} {b}");
        }
    }

    #[test]
    fn l2_anchor_and_symmetry() {
        let (t, c) = (0.245, 1.0);
        let z0 = l2_point(t, c, 0.0, l2_anchor(t, c)).unwrap();
        let e = constant_driver_endpoint(-c, t).unwrap();
        assert_abs_diff_eq!(z0.re, e.x, epsilon = 1e-10);
        assert_abs_diff_eq!(z0.im, e.y, epsilon = 1e-10);
        // continuation all the way to μ = 1
        let mut z = z0;
        for i in 1..=200 {
            z = l2_point(t, c, i as f64 / 200.0, z).unwrap();
            if i == 100 {
                assert!(z.re.abs() < 1e-9);
            }
        }
        assert_abs_diff_eq!(z.re, -z0.re, epsilon = 1e-10);
        assert_abs_diff_eq!(z.im, z0.im, epsilon = 1e-10);
    }

    #[test]
    fn l2_midpoint_on_axis() {
        let (t, c) = (0.245f64, 0.1f64);
        let cv = curve_l2(t, c, &Sampling::uniform(33)).unwrap();
        let m = cv.points.iter().find(|p| p.param == 0.5).unwrap();
        assert!(m.x.abs() < 1e-9);
        // the symmetric control keeps |x - λ| = c in effect: Y² + 2c² log Y = 1 - 4T
        assert!((m.y * m.y + 2.0 * c * c * m.y.ln() - 0.02).abs() < 1e-10);
        assert!(l2_point(t, c, 0.3, Complex::new(0.1, -0.2)).is_err());
    }

    #[test]
    fn assemble_wide_bound_is_case_two() {
        let b = assemble_boundary(0.245, 1.0, &Sampling::with_points(64)).unwrap();
        assert_eq!(b.case_tag, CaseTag::Two);
        let ids: Vec<_> = b.curves.iter().map(|c| c.id).collect();
        assert_eq!(
            ids,
            vec![
                CurveId::L1,
                CurveId::L3,
                CurveId::L2,
                CurveId::L4,
                CurveId::L1
            ]
        );
        assert_eq!(
            b.polygon.vertices()[0],
            [0.0, (1.0 - 4.0 * 0.245f64).sqrt()]
        );
        assert!(b.polygon.signed_area() > 0.0);
        assert!(b.max_stitch_gap < 1e-6);
    }

    #[test]
    fn assemble_fig3_is_case_one() {
        let b = assemble_boundary(0.247, 0.05, &Sampling::with_points(64)).unwrap();
        assert_eq!(b.case_tag, CaseTag::One);
        let ids: Vec<_> = b.curves.iter().map(|c| c.id.label()).collect();
        assert_eq!(ids, ["l1", "l5", "l7", "l9", "l2", "l10", "l8", "l6", "l1"]);
        assert!(b.midpoint_excess.unwrap() > 0.0);
    }

    #[test]
    fn assemble_rejects_outside_hypothesis() {
        // threshold at T = 0.249 is about 3.58e-3
        assert!(matches!(
            assemble_boundary(0.249, 0.03, &Sampling::<f64>::default()),
            Err(Error::HypothesisViolated { .. })
        ));
        assert!(assemble_boundary(0.25, 1.0, &Sampling::<f64>::default()).is_err());
    }

    #[test]
    fn refinement_bounds_chords() {
        let s = Sampling::with_points(16);
        let cv = curve_l1(0.245, 1.0, &s).unwrap();
        let (mut w, mut h) = (0.0f64, 0.0f64);
        for p in &cv.points {
            w = w.max(p.x);
            h = h.max(p.y);
        }
        assert!(cv.max_chord() <= (w.hypot(h - (1.0 - 4.0 * 0.245f64).sqrt())) / 64.0 + 1e-12);
        assert!(cv.points.windows(2).all(|p| p[1].param > p[0].param));
    }

    #[test]
    fn single_precision_boundary() {
        let b = assemble_boundary(0.2f32, 1.0, &Sampling::with_points(32)).unwrap();
        assert_eq!(b.case_tag, CaseTag::Two);
        assert!(b.max_stitch_gap < 1e-4);
    }
}
