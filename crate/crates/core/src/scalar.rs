//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::{DMatrix, DVector, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar type the geometry is evaluated in (`f32` or `f64`).
///
/// All tolerances quoted in the verification suites assume `f64`; `f32`
/// instantiations are supported for evaluation but will not meet them.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("scalar conversion from f64")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("scalar conversion from usize")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Vector<T> = DVector<T>;
pub type Matrix<T> = DMatrix<T>;
