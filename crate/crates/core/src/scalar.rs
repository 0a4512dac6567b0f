//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar the solvers are generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<S: Real>(v: f64) -> S {
    S::from_f64(v).expect("literal representable in scalar type")
}

/// Lossy conversion used for diagnostics and error payloads.
#[inline]
pub fn to_f64<S: Real>(v: S) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Midpoint of two scalars.
#[inline]
pub(crate) fn mid<S: Real>(a: S, b: S) -> S {
    a + (b - a) / lit(2.0)
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace<S: Real>(lo: S, hi: S, n: usize) -> Vec<S> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let last = S::from_usize(n - 1).unwrap();
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        lo + (hi - lo) * S::from_usize(i).unwrap() / last
                    }
                })
                .collect()
        }
    }
}
