//! Scalars for the reflection representation.
//!
//! The representation code is generic over [`RepScalar`]. [`CycNumber`] gives
//! exact answers; `f64` gives fast approximate ones with a fixed tolerance.

use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use num_traits::Signed;

use super::cyclotomic::{CycNumber, CyclotomicField};
use super::OracleError;

/// Absolute tolerance for zero tests in floating point.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

pub trait RepScalar: Signed + Clone + Debug + Send + Sync + 'static {
    /// Ambient number field shared by all entries of one representation.
    type Field: Clone + Debug + Send + Sync;
    /// Hashable identity used to deduplicate matrices.
    type Key: Hash + Eq + Clone + Debug + Send + Sync;

    const EXACT: bool;

    fn field_for_labels(labels: &[u32], max_modulus: u32) -> Result<Self::Field, OracleError>;

    /// `2 cos(π/m)`.
    fn two_cos_pi_over(field: &Self::Field, m: u32) -> Self;

    fn ratio(n: i64, d: i64) -> Self;

    /// Exact zero test (within [`FLOAT_TOLERANCE`] for floats).
    fn is_zero_value(&self) -> bool;

    /// Value under the real embedding that defines the representation.
    fn approx(&self) -> f64;

    /// Absolute values under every complex embedding of the ambient field.
    fn conjugate_magnitudes(&self) -> Vec<f64>;

    fn inverse(&self) -> Option<Self>;

    fn key(&self) -> Self::Key;

    fn mul_ref(&self, other: &Self) -> Self;
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;

    /// `Σ a_i b_i`.
    fn dot<'a>(terms: impl Iterator<Item = (&'a Self, &'a Self)>) -> Self
    where
        Self: 'a,
    {
        terms.fold(Self::zero(), |acc, (a, b)| acc.add_ref(&a.mul_ref(b)))
    }

    fn values_equal(&self, other: &Self) -> bool {
        self.sub_ref(other).is_zero_value()
    }
}

impl RepScalar for CycNumber {
    type Field = Arc<CyclotomicField>;
    type Key = CycNumber;
    const EXACT: bool = true;

    fn field_for_labels(labels: &[u32], max_modulus: u32) -> Result<Self::Field, OracleError> {
        CyclotomicField::for_labels(labels, max_modulus)
    }

    fn two_cos_pi_over(field: &Self::Field, m: u32) -> Self {
        field.two_cos_pi_over(m)
    }

    fn ratio(n: i64, d: i64) -> Self {
        CycNumber::ratio(n, d)
    }

    fn is_zero_value(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }

    fn approx(&self) -> f64 {
        self.to_f64()
    }

    fn conjugate_magnitudes(&self) -> Vec<f64> {
        CycNumber::conjugate_magnitudes(self)
    }

    fn inverse(&self) -> Option<Self> {
        CycNumber::inverse(self)
    }

    fn key(&self) -> Self::Key {
        self.clone()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }

    fn dot<'a>(terms: impl Iterator<Item = (&'a Self, &'a Self)>) -> Self {
        CycNumber::dot(terms)
    }

    fn values_equal(&self, other: &Self) -> bool {
        self == other
    }
}

impl RepScalar for f64 {
    type Field = ();
    type Key = i64;
    const EXACT: bool = false;

    fn field_for_labels(_labels: &[u32], _max_modulus: u32) -> Result<(), OracleError> {
        Ok(())
    }

    fn two_cos_pi_over(_: &(), m: u32) -> f64 {
        2.0 * (std::f64::consts::PI / f64::from(m)).cos()
    }

    fn ratio(n: i64, d: i64) -> f64 {
        n as f64 / d as f64
    }

    fn is_zero_value(&self) -> bool {
        self.abs() < FLOAT_TOLERANCE
    }

    fn approx(&self) -> f64 {
        *self
    }

    fn conjugate_magnitudes(&self) -> Vec<f64> {
        vec![self.abs()]
    }

    fn inverse(&self) -> Option<f64> {
        (!self.is_zero_value()).then(|| 1.0 / self)
    }

    fn key(&self) -> i64 {
        (self * 1e6).round() as i64
    }

    fn mul_ref(&self, other: &f64) -> f64 {
        self * other
    }

    fn add_ref(&self, other: &f64) -> f64 {
        self + other
    }

    fn sub_ref(&self, other: &f64) -> f64 {
        self - other
    }
}
