//! Scalar abstraction shared by the numeric modules.
//!
//! Everything that computes probabilities, influences or Fourier weights is
//! generic over [`Scalar`], which is implemented for `f32` and `f64`. The
//! crate root re-exports `f64` aliases for the common case. Exact dyadic
//! arithmetic lives in [`crate::influence`] and uses `num_rational::Ratio`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only if the target cannot represent
    /// finite `f64` values, which no implementor does.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<F> {
    sum: F,
    carry: F,
}

impl<F: Scalar> CompensatedSum<F> {
    pub fn new() -> Self {
        Self {
            sum: F::zero(),
            carry: F::zero(),
        }
    }

    pub fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> F {
        self.sum + self.carry
    }
}

pub fn compensated_sum<F: Scalar, I: IntoIterator<Item = F>>(iter: I) -> F {
    let mut acc = CompensatedSum::new();
    for x in iter {
        acc.add(x);
    }
    acc.value()
}

/// `x log(1/x)`, the entropy-like factor that appears in every influence bound.
pub fn x_log_inv<F: Scalar>(x: F) -> F {
    x * (F::one() / x).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut terms = vec![1.0e16_f64];
        terms.extend(std::iter::repeat(1.0).take(1000));
        terms.push(-1.0e16);
        assert_eq!(compensated_sum(terms.iter().copied()), 1000.0);
        let naive: f64 = terms.iter().sum();
        assert_ne!(naive, 1000.0);
    }

    #[test]
    fn x_log_inv_is_generic() {
        assert!((x_log_inv(0.5_f32) - 0.5 * 2f32.ln()).abs() < 1e-6);
        assert!((x_log_inv(0.25_f64) - 0.25 * 4f64.ln()).abs() < 1e-15);
    }
}
