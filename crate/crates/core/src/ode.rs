//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.
//!
//! Error control is per unit step: a step of length `h` over a span `L` is
//! accepted when `|err_i| <= tol * (h/L) * (1 + |y_i|)` for every component,
//! so local errors summed over the span stay near `tol`. Integration may run
//! forward or backward in time.

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Adaptive explicit Runge–Kutta stepper.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5<S> {
    pub tol: S,
    pub max_steps: usize,
}

impl<S: Real> Dopri5<S> {
    pub fn new(tol: S) -> Self {
        Self {
            tol,
            max_steps: 2_000_000,
        }
    }

    /// Integrates `y' = f(t, y)` from `(t0, y0)` to `t1`.
    ///
    /// `observe` sees the initial point and every accepted step (including
    /// the final one at exactly `t1`); returning an error aborts the run.
    pub fn integrate<const N: usize, F, O>(
        &self,
        mut f: F,
        t0: S,
        y0: [S; N],
        t1: S,
        mut observe: O,
    ) -> Result<[S; N]>
    where
        F: FnMut(S, &[S; N]) -> [S; N],
        O: FnMut(S, &[S; N]) -> Result<()>,
    {
        observe(t0, &y0)?;
        if t1 == t0 {
            return Ok(y0);
        }
        let span = t1 - t0;
        let dir = span.signum();
        let tol = self.tol;
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = initial_step(&k1, &y, span.abs(), tol) * dir;
        let safety: S = lit(0.9);
        let fmin: S = lit(0.2);
        let fmax: S = lit(5.0);
        let mut steps = 0usize;

        loop {
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::TooManySteps { t: to_f64(t) });
            }
            let remaining = t1 - t;
            let last =
                (h.abs() >= remaining.abs()) || (remaining - h).abs() <= S::epsilon() * t1.abs();
            if last {
                h = remaining;
            }
            let floor = lit::<S>(1e-14) * (S::one() + t.abs());
            if h.abs() < floor {
                return Err(Error::StepUnderflow { t: to_f64(t) });
            }

            let (y_new, k7, err) = step(&mut f, t, &y, &k1, h);
            let share = h.abs() / span.abs();
            let mut err_norm = S::zero();
            let mut finite = true;
            for i in 0..N {
                if !y_new[i].is_finite() || !err[i].is_finite() {
                    finite = false;
                    break;
                }
                let scale = tol * share * (S::one() + y[i].abs().max(y_new[i].abs()));
                err_norm = err_norm.max(err[i].abs() / scale);
            }

            if finite && err_norm <= S::one() {
                t = if last { t1 } else { t + h };
                y = y_new;
                k1 = k7;
                observe(t, &y)?;
                if last {
                    return Ok(y);
                }
                let factor = if err_norm == S::zero() {
                    fmax
                } else {
                    (safety * err_norm.powf(lit(-0.2))).min(fmax).max(fmin)
                };
                h = h * factor;
            } else {
                let factor = if finite {
                    (safety * err_norm.powf(lit(-0.2))).max(fmin).min(S::one())
                } else {
                    lit(0.25)
                };
                h = h * factor;
            }
        }
    }
}

fn initial_step<S: Real, const N: usize>(k1: &[S; N], y: &[S; N], span: S, tol: S) -> S {
    let mut d = S::zero();
    for i in 0..N {
        d = d.max(k1[i].abs() / (S::one() + y[i].abs()));
    }
    let guess = if d > S::zero() {
        lit::<S>(0.1) * tol.powf(lit(0.2)) / d
    } else {
        span
    };
    guess.min(span).min(span * lit(0.1)).max(span * lit(1e-8))
}

#[allow(clippy::type_complexity)]
fn step<S: Real, const N: usize, F>(
    f: &mut F,
    t: S,
    y: &[S; N],
    k1: &[S; N],
    h: S,
) -> ([S; N], [S; N], [S; N])
where
    F: FnMut(S, &[S; N]) -> [S; N],
{
    let c = |v: f64| lit::<S>(v);
    let comb = |terms: &[(&[S; N], f64)]| {
        let mut out = *y;
        for (k, a) in terms {
            let a = c(*a) * h;
            for i in 0..N {
                out[i] = out[i] + a * k[i];
            }
        }
        out
    };

    let y2 = comb(&[(k1, 1.0 / 5.0)]);
    let k2 = f(t + h * c(1.0 / 5.0), &y2);
    let y3 = comb(&[(k1, 3.0 / 40.0), (&k2, 9.0 / 40.0)]);
    let k3 = f(t + h * c(3.0 / 10.0), &y3);
    let y4 = comb(&[(k1, 44.0 / 45.0), (&k2, -56.0 / 15.0), (&k3, 32.0 / 9.0)]);
    let k4 = f(t + h * c(4.0 / 5.0), &y4);
    let y5 = comb(&[
        (k1, 19372.0 / 6561.0),
        (&k2, -25360.0 / 2187.0),
        (&k3, 64448.0 / 6561.0),
        (&k4, -212.0 / 729.0),
    ]);
    let k5 = f(t + h * c(8.0 / 9.0), &y5);
    let y6 = comb(&[
        (k1, 9017.0 / 3168.0),
        (&k2, -355.0 / 33.0),
        (&k3, 46732.0 / 5247.0),
        (&k4, 49.0 / 176.0),
        (&k5, -5103.0 / 18656.0),
    ]);
    let k6 = f(t + h, &y6);
    let y_new = comb(&[
        (k1, 35.0 / 384.0),
        (&k3, 500.0 / 1113.0),
        (&k4, 125.0 / 192.0),
        (&k5, -2187.0 / 6784.0),
        (&k6, 11.0 / 84.0),
    ]);
    let k7 = f(t + h, &y_new);

    // difference between the 5th and embedded 4th order solutions
    let e = [
        71.0 / 57600.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let mut err = [S::zero(); N];
    for i in 0..N {
        err[i] = h
            * (c(e[0]) * k1[i]
                + c(e[1]) * k3[i]
                + c(e[2]) * k4[i]
                + c(e[3]) * k5[i]
                + c(e[4]) * k6[i]
                + c(e[5]) * k7[i]);
    }
    (y_new, k7, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_obs<const N: usize>(_: f64, _: &[f64; N]) -> Result<()> {
        Ok(())
    }

    #[test]
    fn exponential_decay() {
        let solver = Dopri5::new(1e-12);
        let y = solver
            .integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 2.0, no_obs)
            .unwrap();
        assert!((y[0] - (-2.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn harmonic_oscillator_backward() {
        let solver = Dopri5::new(1e-12);
        let y = solver
            .integrate(
                |_, y: &[f64; 2]| [y[1], -y[0]],
                1.0,
                [1.0f64.cos(), -1.0f64.sin()],
                0.0,
                no_obs,
            )
            .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10);
        assert!(y[1].abs() < 1e-10);
    }

    #[test]
    fn observer_sees_endpoints_in_order() {
        let solver = Dopri5::new(1e-8);
        let mut ts = Vec::new();
        solver
            .integrate(
                |t, _: &[f64; 1]| [t.cos()],
                0.0,
                [0.0],
                3.0,
                |t, _| {
                    ts.push(t);
                    Ok(())
                },
            )
            .unwrap();
        assert_eq!(ts[0], 0.0);
        assert_eq!(*ts.last().unwrap(), 3.0);
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn observer_error_aborts() {
        let solver = Dopri5::new(1e-8);
        let r = solver.integrate(
            |_, _: &[f64; 1]| [1.0],
            0.0,
            [0.0],
            1.0,
            |t, _| {
                if t > 0.5 {
                    Err(Error::YFloor { t, y: 0.0 })
                } else {
                    Ok(())
                }
            },
        );
        assert!(matches!(r, Err(Error::YFloor { .. })));
    }

    #[test]
    fn single_precision_runs() {
        let solver = Dopri5::new(1e-5f32);
        let y = solver
            .integrate(|_, y: &[f32; 1]| [-y[0]], 0.0, [1.0], 1.0, |_, _| Ok(()))
            .unwrap();
        assert!((y[0] - (-1.0f32).exp()).abs() < 1e-4);
    }
}
