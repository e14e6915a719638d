use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Deref, DerefMut};

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{Error, Result};

/// Dense complex vector.
///
/// `From<Vec<Complex64>>` wraps without checks; use [`DenseVector::new`] at
/// input boundaries, where the non-empty and finite invariants are enforced.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct DenseVector(Vec<Complex64>);

impl DenseVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some(index) = entries.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![Complex64::new(1.0, 0.0); n])
    }

    /// The `k`-th canonical unit vector of length `n`.
    pub fn unit(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[k] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm_l2(&self) -> f64 {
        norm_l2(&self.0)
    }

    pub fn norm_linf(&self) -> f64 {
        norm_linf(&self.0)
    }

    /// `(‖x‖₂, ‖x‖∞)`.
    pub fn norms(&self) -> (f64, f64) {
        (self.norm_l2(), self.norm_linf())
    }
}

impl From<Vec<Complex64>> for DenseVector {
    fn from(v: Vec<Complex64>) -> Self {
        Self(v)
    }
}

impl From<DenseVector> for Vec<Complex64> {
    fn from(v: DenseVector) -> Self {
        v.0
    }
}

impl Deref for DenseVector {
    type Target = [Complex64];
    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl DerefMut for DenseVector {
    fn deref_mut(&mut self) -> &mut [Complex64] {
        &mut self.0
    }
}

impl FromIterator<Complex64> for DenseVector {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Euclidean norm, scaled to avoid overflow on large entries.
pub fn norm_l2(x: &[Complex64]) -> f64 {
    let scale = norm_linf(x);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let sum: f64 = x.iter().map(|z| (z / scale).norm_sqr()).sum();
    scale * sum.sqrt()
}

pub fn norm_linf(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖a − b‖₂ / ‖b‖₂`, or the absolute difference when `b` vanishes.
pub fn relative_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let diff: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let denom = norm_l2(b);
    if denom == 0.0 {
        norm_l2(&diff)
    } else {
        norm_l2(&diff) / denom
    }
}

pub(crate) fn check_len(op: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            op,
            expected,
            found,
        });
    }
    Ok(())
}
