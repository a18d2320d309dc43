//! Floating-point abstraction shared by the classifiers.
//!
//! Models are generic over [`Scalar`] so that the same training code runs in
//! `f32` (half the memory for large vocabularies) or `f64` (the default, needed
//! by the tight numerical checks).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Width tag written into model files.
    const TAG: u8;

    fn write_le(self, out: &mut Vec<u8>);

    /// Reads one value from the front of `bytes`. The caller guarantees the length.
    fn read_le(bytes: &[u8]) -> Self;

    #[inline]
    fn of(value: f64) -> Self {
        <Self as FromPrimitive>::from_f64(value).expect("finite conversion")
    }

    #[inline]
    fn of_count(count: u32) -> Self {
        <Self as FromPrimitive>::from_u32(count).expect("count conversion")
    }

    #[inline]
    fn f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    fn byte_width() -> usize {
        Self::TAG as usize
    }
}

impl Scalar for f32 {
    const TAG: u8 = 4;

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        f32::from_le_bytes(bytes[..4].try_into().unwrap())
    }
}

impl Scalar for f64 {
    const TAG: u8 = 8;

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes[..8].try_into().unwrap())
    }
}

/// Numerically stable logistic function.
pub fn sigmoid<F: Scalar>(z: F) -> F {
    if z >= F::zero() {
        F::one() / (F::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (F::one() + e)
    }
}

/// `ln(exp(a) + exp(b))` without overflow.
pub fn log_add_exp<F: Scalar>(a: F, b: F) -> F {
    let m = a.max(b);
    if m == F::neg_infinity() {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_is_symmetric_and_bounded() {
        for z in [-800.0f64, -30.0, -1.0, 0.0, 1.0, 30.0] {
            let p = sigmoid(z);
            assert!((p + sigmoid(-z) - 1.0).abs() < 1e-15);
            assert!(p.is_finite());
        }
        assert_eq!(sigmoid(0.0f32), 0.5);
    }

    #[test]
    fn log_add_exp_matches_naive() {
        let (a, b) = (-1.25f64, 0.5f64);
        assert!((log_add_exp(a, b) - (a.exp() + b.exp()).ln()).abs() < 1e-14);
        assert!(log_add_exp(-1000.0f64, -1000.0).is_finite());
    }

    #[test]
    fn round_trips_bytes() {
        let mut buf = Vec::new();
        1.5f64.write_le(&mut buf);
        (-0.25f32).write_le(&mut buf);
        assert_eq!(f64::read_le(&buf), 1.5);
        assert_eq!(f32::read_le(&buf[8..]), -0.25);
    }
}
