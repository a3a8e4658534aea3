use std::ops::Deref;

use crate::error::{Error, Result};
use crate::scalar::{all_finite, Real};

/// An iterate `x ∈ ℝ^d` whose entries are all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T>(Vec<T>);

impl<T: Real> Point<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput(
                "point must have at least one coordinate".into(),
            ));
        }
        if !all_finite(&coords) {
            return Err(Error::InvalidInput(
                "point has non-finite coordinates".into(),
            ));
        }
        Ok(Self(coords))
    }

    pub fn zeros(d: usize) -> Self {
        Self(vec![T::zero(); d.max(1)])
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
}

impl<T> Deref for Point<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T: Real> TryFrom<Vec<T>> for Point<T> {
    type Error = Error;
    fn try_from(value: Vec<T>) -> Result<Self> {
        Self::new(value)
    }
}
