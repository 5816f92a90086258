//! Dense state vectors and norms.
//!
//! [`StateVector`] is a fixed-length heap buffer of scalars. Every buffer
//! allocation is counted in a global audit counter (see
//! [`allocation_count`]) so tests can prove that steppers do not allocate
//! state-sized memory inside their hot loops.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::ops::{Index, IndexMut};
use std::sync::atomic::{AtomicU64, Ordering};

static STATE_ALLOCATIONS: AtomicU64 = AtomicU64::new(0);

/// Number of state-vector buffer allocations since process start.
///
/// Incremented by every constructor and clone of [`StateVector`]. Snapshot
/// it before and after a code region to verify the region allocated no
/// state-sized buffers.
pub fn allocation_count() -> u64 {
    STATE_ALLOCATIONS.load(Ordering::Relaxed)
}

/// Fixed-length vector of scalars.
#[derive(Debug, PartialEq)]
pub struct StateVector<S> {
    data: Box<[S]>,
}

impl<S: Scalar> StateVector<S> {
    /// Zero vector of length `n`.
    pub fn zeros(n: usize) -> Self {
        STATE_ALLOCATIONS.fetch_add(1, Ordering::Relaxed);
        Self {
            data: vec![S::zero(); n].into_boxed_slice(),
        }
    }

    /// Copies a slice into a fresh vector.
    pub fn from_slice(values: &[S]) -> Self {
        STATE_ALLOCATIONS.fetch_add(1, Ordering::Relaxed);
        Self {
            data: values.to_vec().into_boxed_slice(),
        }
    }

    /// Builds a vector from real components.
    pub fn from_re_slice(values: &[f64]) -> Self {
        STATE_ALLOCATIONS.fetch_add(1, Ordering::Relaxed);
        Self {
            data: values.iter().map(|&re| S::from_re(re)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [S] {
        &mut self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, S> {
        self.data.iter()
    }

    /// Overwrites `self` with the contents of `other`.
    ///
    /// # Panics
    /// Panics on length mismatch; callers pair buffers of equal dimension.
    pub fn copy_from(&mut self, other: &Self) {
        assert_eq!(self.len(), other.len(), "state vector length mismatch");
        self.data.copy_from_slice(&other.data);
    }

    /// Sets every component to zero.
    pub fn set_zero(&mut self) {
        self.data.fill(S::zero());
    }

    /// Multiplies every component by `c`.
    pub fn scale(&mut self, c: S) {
        for x in self.data.iter_mut() {
            *x *= c;
        }
    }

    /// In-place `self += c * other` without allocating.
    ///
    /// # Panics
    /// Panics on length mismatch.
    pub fn axpy(&mut self, c: S, other: &Self) {
        assert_eq!(self.len(), other.len(), "state vector length mismatch");
        for (y, &x) in self.data.iter_mut().zip(other.data.iter()) {
            *y += c * x;
        }
    }

    /// Euclidean norm `sqrt(Σ conj(xᵢ)·xᵢ)`.
    ///
    /// The summand is the squared modulus, so the result is real and
    /// non-negative for complex fields as well.
    pub fn norm_l2(&self) -> f64 {
        self.data.iter().map(|x| x.abs_sq()).sum::<f64>().sqrt()
    }

    /// Euclidean norm of `self - other`, computed in one fused traversal
    /// without forming the difference vector.
    pub fn distance_l2(&self, other: &Self) -> f64 {
        assert_eq!(self.len(), other.len(), "state vector length mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(&a, &b)| (a - b).abs_sq())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest component modulus.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// Euclidean norm of the componentwise imaginary parts.
    pub fn imag_norm_l2(&self) -> f64 {
        self.data
            .iter()
            .map(|x| {
                let im = x.im();
                im * im
            })
            .sum::<f64>()
            .sqrt()
    }

    /// True when every component is finite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Errors unless `self.len() == expected`.
    pub fn check_len(&self, expected: usize) -> Result<()> {
        if self.len() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                got: self.len(),
            })
        }
    }
}

impl<S: Scalar> Clone for StateVector<S> {
    fn clone(&self) -> Self {
        STATE_ALLOCATIONS.fetch_add(1, Ordering::Relaxed);
        Self {
            data: self.data.clone(),
        }
    }
}

impl<S> Index<usize> for StateVector<S> {
    type Output = S;

    fn index(&self, i: usize) -> &S {
        &self.data[i]
    }
}

impl<S> IndexMut<usize> for StateVector<S> {
    fn index_mut(&mut self, i: usize) -> &mut S {
        &mut self.data[i]
    }
}

/// Euclidean norm of a slice of components; free-function form of
/// [`StateVector::norm_l2`] usable on any state view.
pub fn norm_l2<S: Scalar>(x: &[S]) -> f64 {
    x.iter().map(|x| x.abs_sq()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn norm_of_three_four_is_five() {
        let x = StateVector::from_slice(&[3.0, 4.0]);
        assert_eq!(x.norm_l2(), 5.0);
    }

    #[test]
    fn complex_norm_uses_conjugation() {
        let x = StateVector::from_slice(&[Complex64::new(3.0, 4.0)]);
        assert_eq!(x.norm_l2(), 5.0);
        let y = StateVector::from_slice(&[Complex64::new(1.0, 1.0)]);
        assert!((y.norm_l2() - 2.0f64.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn empty_vector_has_zero_norm() {
        let x = StateVector::<f64>::zeros(0);
        assert_eq!(x.norm_l2(), 0.0);
    }

    #[test]
    fn distance_matches_norm_of_difference() {
        let x = StateVector::from_slice(&[1.0, -2.0, 3.0]);
        let y = StateVector::from_slice(&[0.5, 1.0, -1.0]);
        let mut d = x.clone();
        d.axpy(-1.0, &y);
        assert!((x.distance_l2(&y) - d.norm_l2()).abs() < 1e-15);
    }

    #[test]
    fn axpy_accumulates() {
        let mut y = StateVector::from_slice(&[1.0, 1.0]);
        let x = StateVector::from_slice(&[2.0, -3.0]);
        y.axpy(0.5, &x);
        assert_eq!(y.as_slice(), &[2.0, -0.5]);
    }

    #[test]
    fn allocation_counter_tracks_buffers() {
        let before = allocation_count();
        let x = StateVector::<f64>::zeros(8);
        let _y = x.clone();
        let _z = StateVector::from_slice(&[1.0]);
        assert_eq!(allocation_count() - before, 3);
    }

    #[test]
    fn finiteness_check_spots_nan_and_inf() {
        let mut x = StateVector::from_slice(&[1.0, 2.0]);
        assert!(x.is_finite());
        x[1] = f64::NAN;
        assert!(!x.is_finite());
        x[1] = f64::INFINITY;
        assert!(!x.is_finite());
    }
}
