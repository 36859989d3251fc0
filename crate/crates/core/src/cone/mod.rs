//! Cones: sets closed under addition and multiplication by non-negative
//! reals, carrying a neutral element and a (pre)order.
//!
//! A [`Cone`] value is an *instance descriptor*: it knows the dimension or
//! key set of its elements and performs the operations. Elements themselves
//! are plain immutable values.
//!
//! Concrete families:
//!
//! * [`ExtendedReals`] and [`NonnegExtendedReals`]: `ℝ ∪ {+∞}` and `[0, +∞]`
//!   with `0·(+∞) = 0`.
//! * [`Euclidean`]: `ℝᵈ` as a cone with the componentwise order.
//! * [`FunctionCone`]: `ℝ̄`-valued functions on a finite key set, pointwise.
//! * [`TwoPointPathology`]: the two-element structure where `0·1 = 1`, which
//!   satisfies every cone axiom but one.

mod extended;
mod function;
pub mod laws;
mod pathology;
mod vector;

use std::fmt;

use thiserror::Error;

pub use extended::{ExtendedReal, ExtendedReals, NonnegExtendedReals};
pub use function::{FunctionCone, FunctionElement};
pub use pathology::{TwoPoint, TwoPointPathology};
pub use vector::{Euclidean, VectorElement};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConeError {
    #[error("scalar {0} is not a non-negative real")]
    InvalidScalar(f64),
    #[error("value {0} is not an element of the cone")]
    InvalidValue(f64),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension must be at least 1")]
    EmptyDimension,
    #[error("function domains differ")]
    DomainMismatch,
    #[error("element lies outside the {0} cone")]
    NotInCone(&'static str),
    #[error("result overflows the element representation")]
    Overflow,
    #[error("natural order is undecidable for the {0} cone")]
    Undecidable(&'static str),
}

/// Checks that `lambda` is a finite, non-negative real.
pub(crate) fn check_scalar(lambda: f64) -> Result<(), ConeError> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(ConeError::InvalidScalar(lambda))
    }
}

/// A preordered cone instance.
pub trait Cone {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn name(&self) -> &'static str;

    fn zero(&self) -> Self::Elem;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, ConeError>;

    /// `λa` for `λ ≥ 0`. Negative or NaN scalars are domain errors.
    fn scale(&self, lambda: f64, a: &Self::Elem) -> Result<Self::Elem, ConeError>;

    /// The cone's declared order. Comparisons are exact; elements from a
    /// different instance (wrong dimension, wrong keys) compare as `false`.
    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;

    /// Decides whether some `c` in the cone satisfies `a + c = b`.
    fn leq_natural(&self, _a: &Self::Elem, _b: &Self::Elem) -> Result<bool, ConeError> {
        Err(ConeError::Undecidable(self.name()))
    }

    /// `a − b` when the difference exists inside the cone.
    fn checked_sub(&self, _a: &Self::Elem, _b: &Self::Elem) -> Option<Self::Elem> {
        None
    }

    /// Membership test for subcones that share an element type with a
    /// larger cone.
    fn contains(&self, _a: &Self::Elem) -> bool {
        true
    }

    /// Embeds the scalar neighborhood `ε` of the system `ξ`, if this cone
    /// carries it.
    fn xi_element(&self, _eps: f64) -> Option<Self::Elem> {
        None
    }

    /// Whether the cone is a real vector space (every element has a negative).
    fn is_vector_space(&self) -> bool {
        false
    }
}
