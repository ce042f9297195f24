//! Dense coordinate vectors for decision variables, gradients and samples.

use std::ops::Index;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A dense real vector. Coordinates are guaranteed finite by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector<T>(Vec<T>);

impl<T: Real> Vector<T> {
    /// Builds a vector, rejecting NaN/Inf coordinates.
    pub fn new(coords: Vec<T>) -> Result<Self> {
        for (index, c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::NonFinite { index });
            }
        }
        Ok(Vector(coords))
    }

    /// Builds a vector from coordinates known to be finite.
    /// Callers combining finite inputs with +,-,* use this directly.
    pub fn from_raw(coords: Vec<T>) -> Self {
        debug_assert!(coords.iter().all(|c| c.is_finite()));
        Vector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![T::zero(); dim])
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize) -> T) -> Self {
        Vector((0..dim).map(f).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }

    pub fn dot(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(&a, &b)| a * b)
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: T) -> Self {
        Vector(self.0.iter().map(|&a| a * s).collect())
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: T, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + s * b)
    }

    /// Coordinate-wise maximum with a scalar.
    pub fn max_scalar(&self, s: T) -> Self {
        Vector(self.0.iter().map(|&a| a.max(s)).collect())
    }

    /// Coordinate-wise `x <= y`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(&a, &b)| a <= b)
    }

    pub fn sum(&self) -> T {
        self.0.iter().copied().sum()
    }

    pub fn norm2(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn dist2(&self, other: &Self) -> T {
        self.sub(other).norm2()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T: Real> From<Vec<T>> for Vector<T> {
    fn from(coords: Vec<T>) -> Self {
        Vector::from_raw(coords)
    }
}
