use std::fmt;

use serde::{Deserialize, Serialize};

use super::{check_scalar, Cone, ConeError};

/// A point of `ℝᵈ`, `d ≥ 1`, with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorElement(Vec<f64>);

impl VectorElement {
    pub fn new(coords: Vec<f64>) -> Result<Self, ConeError> {
        if coords.is_empty() {
            return Err(ConeError::EmptyDimension);
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(ConeError::InvalidValue(*bad));
        }
        Ok(VectorElement(coords.into_iter().map(|c| c + 0.0).collect()))
    }

    pub fn zeros(dim: usize) -> Self {
        VectorElement(vec![0.0; dim.max(1)])
    }

    pub fn splat(dim: usize, value: f64) -> Self {
        assert!(value.is_finite());
        VectorElement(vec![value + 0.0; dim.max(1)])
    }

    pub fn scalar(value: f64) -> Self {
        Self::splat(1, value)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    fn from_raw(coords: Vec<f64>) -> Result<Self, ConeError> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(ConeError::Overflow);
        }
        Ok(VectorElement(coords.into_iter().map(|c| c + 0.0).collect()))
    }
}

impl fmt::Display for VectorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// `ℝᵈ` viewed as a cone with the componentwise order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Euclidean {
    dim: usize,
}

impl Euclidean {
    pub fn new(dim: usize) -> Result<Self, ConeError> {
        if dim == 0 {
            return Err(ConeError::EmptyDimension);
        }
        Ok(Euclidean { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check(&self, a: &VectorElement) -> Result<(), ConeError> {
        if a.dim() == self.dim {
            Ok(())
        } else {
            Err(ConeError::DimensionMismatch {
                expected: self.dim,
                found: a.dim(),
            })
        }
    }
}

impl Cone for Euclidean {
    type Elem = VectorElement;

    fn name(&self) -> &'static str {
        "vector"
    }

    fn zero(&self) -> VectorElement {
        VectorElement::zeros(self.dim)
    }

    fn add(&self, a: &VectorElement, b: &VectorElement) -> Result<VectorElement, ConeError> {
        self.check(a)?;
        self.check(b)?;
        VectorElement::from_raw(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    }

    fn scale(&self, lambda: f64, a: &VectorElement) -> Result<VectorElement, ConeError> {
        check_scalar(lambda)?;
        self.check(a)?;
        VectorElement::from_raw(a.0.iter().map(|x| lambda * x).collect())
    }

    fn leq(&self, a: &VectorElement, b: &VectorElement) -> bool {
        a.dim() == self.dim && b.dim() == self.dim && a.0.iter().zip(&b.0).all(|(x, y)| x <= y)
    }

    /// Every difference exists in a vector space.
    fn leq_natural(&self, a: &VectorElement, b: &VectorElement) -> Result<bool, ConeError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.checked_sub(b, a).is_some())
    }

    fn checked_sub(&self, a: &VectorElement, b: &VectorElement) -> Option<VectorElement> {
        if a.dim() != self.dim || b.dim() != self.dim {
            return None;
        }
        VectorElement::from_raw(a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect()).ok()
    }

    fn is_vector_space(&self) -> bool {
        true
    }
}
