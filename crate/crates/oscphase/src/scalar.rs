//! Scalar abstraction so the Chebyshev and linear-algebra kernels work for
//! both real and complex data.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

/// Element type of expansions, matrices and vectors: `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Mul<f64, Output = Self>
    + AddAssign
    + SubAssign
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    fn conj(self) -> Self;
    /// |x|^2, always a real number.
    fn abs_sq(self) -> f64;
    fn abs(self) -> f64 {
        self.abs_sq().sqrt()
    }
    fn is_finite(self) -> bool;

    /// Serialize as a JSON number (real) or `[re, im]` pair (complex).
    fn to_json(self) -> serde_json::Value;
    fn from_json(v: &serde_json::Value) -> Option<Self>;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn abs_sq(self) -> f64 {
        self * self
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn to_json(self) -> serde_json::Value {
        serde_json::json!(self)
    }
    fn from_json(v: &serde_json::Value) -> Option<Self> {
        v.as_f64()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn abs_sq(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn to_json(self) -> serde_json::Value {
        serde_json::json!([self.re, self.im])
    }
    fn from_json(v: &serde_json::Value) -> Option<Self> {
        let arr = v.as_array()?;
        if arr.len() != 2 {
            return None;
        }
        Some(Complex64::new(arr[0].as_f64()?, arr[1].as_f64()?))
    }
}
