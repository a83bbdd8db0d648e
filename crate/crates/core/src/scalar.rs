//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `x^e` with a fast path for small integer exponents.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Power<T> {
    Int(i32),
    Frac(T),
}

impl<T: Real> Power<T> {
    pub(crate) fn new(e: T) -> Self {
        let r = e.round();
        if e == r && r.abs() <= T::lit(64.0) {
            Power::Int(r.to_i32().unwrap_or(0))
        } else {
            Power::Frac(e)
        }
    }

    #[inline]
    pub(crate) fn apply(self, x: T) -> T {
        match self {
            Power::Int(k) => x.powi(k),
            Power::Frac(e) if e == T::lit(0.5) => x.sqrt(),
            Power::Frac(e) => x.powf(e),
        }
    }
}

/// `log2(2 / t)`, the logarithmic factor attached to scale `t`.
#[inline]
pub fn log_factor<T: Real>(t: T) -> T {
    (T::lit(2.0) / t).log2()
}

/// `t (log2(2/t))^delta`: the half-width of a logarithmic approach region at scale `t`.
#[inline]
pub fn approach_width<T: Real>(t: T, delta: T) -> T {
    t * log_factor(t).powf(delta)
}
