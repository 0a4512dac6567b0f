//! One-dimensional transcendental solves behind the boundary construction.

use crate::error::{Error, Result};
use crate::scalar::{linspace, lit, to_f64, Real};

/// Grid resolution for the multiplicity scan of the switch equation.
pub const SWITCH_SCAN_POINTS: usize = 100_000;

/// Brent's method on a sign-changing bracket.
///
/// Stops when the bracket is narrower than `tol` (relative floor of a few
/// ulps). Inverse quadratic and secant steps are only accepted while they
/// shrink the bracket fast enough; otherwise a bisection step is taken.
pub fn bracket_root<S: Real, F>(mut f: F, lo: S, hi: S, tol: S) -> Result<S>
where
    F: FnMut(S) -> S,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == S::zero() {
        return Ok(a);
    }
    if fb == S::zero() {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::NoSignChange {
            lo: to_f64(lo),
            hi: to_f64(hi),
            f_lo: to_f64(fa),
            f_hi: to_f64(fb),
        });
    }
    let two: S = lit(2.0);
    let three: S = lit(3.0);
    let half: S = lit(0.5);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..500 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * S::epsilon() * b.abs() + half * tol;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == S::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = S::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qq * (qq - r) - (b - a) * (r - S::one()));
                q = (qq - S::one()) * (r - S::one()) * (s - S::one());
            }
            if p > S::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = three * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 {
            b + d
        } else {
            b + tol1.copysign(xm)
        };
        fb = f(b);
    }
    Ok(b)
}

/// Horizon and driver bound together with the regime threshold
/// `T - (1 - e⁻⁴)/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeParams<S> {
    pub t: S,
    pub c: S,
    pub threshold: S,
}

impl<S: Real> RegimeParams<S> {
    pub fn new(t: S, c: S) -> Result<Self> {
        if !(t > S::zero() && t < lit(0.25)) {
            return Err(Error::InvalidHorizon { t: to_f64(t) });
        }
        if !(c > S::zero()) || !c.is_finite() {
            return Err(Error::InvalidParameter {
                name: "c",
                value: to_f64(c),
                reason: "must be positive and finite",
            });
        }
        Ok(Self {
            t,
            c,
            threshold: regime_threshold(t),
        })
    }

    /// `c² >= T - (1 - e⁻⁴)/4`, the hypothesis of the boundary description.
    pub fn in_main_regime(&self) -> bool {
        self.c * self.c >= self.threshold
    }

    /// `1 - 4T`.
    pub fn gap(&self) -> S {
        S::one() - lit::<S>(4.0) * self.t
    }

    pub fn require_main_regime(&self) -> Result<()> {
        if self.in_main_regime() {
            Ok(())
        } else {
            Err(Error::HypothesisViolated {
                c2: to_f64(self.c * self.c),
                threshold: to_f64(self.threshold),
            })
        }
    }
}

/// `T - (1 - e⁻⁴)/4`.
pub fn regime_threshold<S: Real>(t: S) -> S {
    t - (S::one() - lit::<S>(-4.0).exp()) / lit(4.0)
}

/// The two admissibility bounds on an unrestricted extremal ending at height
/// `Y`: `f₁ = p²` (start of the driver) and `f₂ = (X - p)²` (its end).
pub fn admissibility_bounds<S: Real>(t: S, y: S) -> (S, S) {
    let l = y.ln();
    let f1 = (S::one() - lit::<S>(4.0) * t - y * y) / (lit::<S>(2.0) * l);
    (f1, f1 * (S::one() + l) * (S::one() + l))
}

/// Upper end `Y₀` of the arc of the unrestricted boundary that stays
/// reachable under `|λ| <= c`.
pub fn solve_y0<S: Real>(rp: &RegimeParams<S>) -> Result<S> {
    let two: S = lit(2.0);
    let c2 = rp.c * rp.c;
    let g = rp.gap();
    let nudge: S = lit(1e-14);
    let lo = g.sqrt() + nudge;
    let tol: S = lit(1e-15);
    if rp.in_main_regime() {
        bracket_root(|y| two * c2 * y.ln() + y * y - g, lo, S::one() - nudge, tol)
    } else {
        let e2 = lit::<S>(-2.0).exp();
        let f = |y: S| {
            let l = y.ln();
            two * c2 * l / ((S::one() + l) * (S::one() + l)) + y * y - g
        };
        // only reachable by rounding when c² sits on the threshold
        if f(e2) <= S::zero() {
            return Ok(e2);
        }
        bracket_root(f, lo, e2, tol)
    }
}

/// Offset at which the initial bang segment fills the whole horizon:
/// `p₀² = (√((4T+c²-1)² + 4c²) + (4T+c²-1)) / 2`.
pub fn solve_p0<S: Real>(rp: &RegimeParams<S>) -> S {
    let two: S = lit(2.0);
    let c2 = rp.c * rp.c;
    let m = lit::<S>(4.0) * rp.t + c2 - S::one();
    let r = (m * m + lit::<S>(4.0) * c2).sqrt();
    let p2 = if m >= S::zero() {
        (r + m) / two
    } else {
        two * c2 / (r - m)
    };
    p2.sqrt()
}

/// Left side minus right side of the switch equation
/// `-4pc + (c²/p²) e^{-4c/p} - p² = 1 - 4T - c²`.
pub fn switch_residual<S: Real>(rp: &RegimeParams<S>, p: S) -> S {
    let c = rp.c;
    let four: S = lit(4.0);
    -four * p * c + c * c / (p * p) * (-four * c / p).exp() - p * p - (rp.gap() - c * c)
}

/// Roots of the switch equation on `(c, p₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchRoots<S> {
    pub p0: S,
    pub p1: Option<S>,
    pub p2: Option<S>,
}

impl<S: Real> SwitchRoots<S> {
    pub fn count(&self) -> usize {
        self.p1.is_some() as usize + self.p2.is_some() as usize
    }
}

/// Scans the switch equation on a uniform grid over `(c, p₀)` and refines
/// every sign change.
pub fn solve_switch_roots<S: Real>(rp: &RegimeParams<S>, p0: S) -> Result<SwitchRoots<S>> {
    let h = |p: S| switch_residual(rp, p);
    let grid = linspace(rp.c, p0, SWITCH_SCAN_POINTS + 1);
    let inner = &grid[1..grid.len() - 1];
    let values: Vec<S> = inner.iter().map(|&p| h(p)).collect();
    let mut brackets: Vec<(S, S)> = Vec::new();
    for i in 0..inner.len().saturating_sub(1) {
        if values[i] == S::zero() || values[i].signum() != values[i + 1].signum() {
            // rescan the neighbouring cells at ten times the density
            let lo = grid[i];
            let hi = grid[(i + 3).min(grid.len() - 1)];
            let fine = linspace(lo, hi, 31);
            for w in fine.windows(2) {
                let (fa, fb) = (h(w[0]), h(w[1]));
                let at_open_end = fa == S::zero() && w[0] == rp.c;
                if !at_open_end && (fa == S::zero() || fa.signum() != fb.signum()) {
                    brackets.push((w[0], w[1]));
                }
            }
        }
    }
    // neighbouring rescans overlap; keep distinct brackets
    brackets.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    brackets.dedup_by(|b, a| b.0 <= a.1);
    if brackets.len() > 2 {
        return Err(Error::TooManySignChanges {
            count: brackets.len(),
        });
    }
    let mut roots = Vec::with_capacity(2);
    for (lo, hi) in brackets {
        roots.push(bracket_root(h, lo, hi, lit(1e-12))?);
    }
    Ok(SwitchRoots {
        p0,
        p1: roots.first().copied(),
        p2: roots.get(1).copied(),
    })
}

/// Unique positive root `C₀` of
/// `2cos²φ log(1 - sinφ) + (1 - sinφ)² = 2cos²φ log C + C²(1 - 4T)`.
pub fn solve_c0<S: Real>(phi: S, t: S) -> Result<S> {
    let half_pi = S::FRAC_PI_2();
    if !(phi > -half_pi && phi < half_pi) {
        return Err(Error::InvalidParameter {
            name: "phi",
            value: to_f64(phi),
            reason: "outside (-pi/2, pi/2)",
        });
    }
    if !(t > S::zero() && t <= lit(0.25)) {
        return Err(Error::InvalidHorizon { t: to_f64(t) });
    }
    let two: S = lit(2.0);
    let s = S::one() - phi.sin();
    let cos2 = phi.cos() * phi.cos();
    let g = S::one() - lit::<S>(4.0) * t;
    let lhs = two * cos2 * s.ln() + s * s;
    let f = |c: S| two * cos2 * c.ln() + c * c * g - lhs;
    // f(s) = -4T s² < 0 and f increases in C
    let lo = s;
    let mut hi = s * two;
    let mut tries = 0;
    while f(hi) <= S::zero() {
        hi = hi * two;
        tries += 1;
        if tries > 2000 || !hi.is_finite() {
            return Err(Error::NoSignChange {
                lo: to_f64(lo),
                hi: to_f64(hi),
                f_lo: to_f64(f(lo)),
                f_hi: to_f64(f(hi)),
            });
        }
    }
    bracket_root(f, lo, hi, lo * lit(1e-15))
}
