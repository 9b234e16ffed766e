//! Flat parameter and gradient vectors.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{check_finite, check_len, Error, Result};

/// Model coefficients `w_k`. The length is fixed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector(Vec<f64>);

/// A gradient `∂L/∂w`, paired by length with a [`ParamVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct GradVector(Vec<f64>);

macro_rules! vector_common {
    ($ty:ident) => {
        impl $ty {
            pub fn new(values: Vec<f64>) -> Self {
                Self(values)
            }

            pub fn zeros(len: usize) -> Self {
                Self(vec![0.0; len])
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            pub fn into_inner(self) -> Vec<f64> {
                self.0
            }

            /// Fails with [`Error::NonFinite`] on the first NaN or infinite element.
            pub fn check_finite(&self) -> Result<()> {
                check_finite(&self.0)
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|v| v.is_finite())
            }
        }

        impl Deref for $ty {
            type Target = [f64];

            fn deref(&self) -> &[f64] {
                &self.0
            }
        }

        impl From<Vec<f64>> for $ty {
            fn from(values: Vec<f64>) -> Self {
                Self(values)
            }
        }

        impl From<&[f64]> for $ty {
            fn from(values: &[f64]) -> Self {
                Self(values.to_vec())
            }
        }
    };
}

vector_common!(ParamVector);
vector_common!(GradVector);

impl GradVector {
    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

/// Returns `y + alpha·x` without touching either input.
pub fn axpy(alpha: f64, x: &GradVector, y: &ParamVector) -> Result<ParamVector> {
    check_len(y.len(), x.len())?;
    if !alpha.is_finite() {
        return Err(Error::InvalidHyper {
            name: "alpha",
            value: alpha,
        });
    }
    Ok(ParamVector(
        y.iter().zip(x.iter()).map(|(y, x)| y + alpha * x).collect(),
    ))
}

/// Euclidean norm.
pub fn norm2(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::Empty);
    }
    Ok(libm::sqrt(x.iter().map(|v| v * v).sum()))
}
