use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use super::{check_scalar, Cone, ConeError};

/// An element of `ℝ̄ = ℝ ∪ {+∞}`.
///
/// Finite values never hold NaN, ±inf or negative zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtendedReal {
    Finite(f64),
    PosInf,
}

impl ExtendedReal {
    pub const ZERO: ExtendedReal = ExtendedReal::Finite(0.0);
    pub const ONE: ExtendedReal = ExtendedReal::Finite(1.0);
    pub const INFINITY: ExtendedReal = ExtendedReal::PosInf;

    /// Converts a float, mapping `f64::INFINITY` to `+∞`. NaN and `-∞` are
    /// rejected.
    pub fn new(value: f64) -> Result<Self, ConeError> {
        if value.is_nan() || value == f64::NEG_INFINITY {
            Err(ConeError::InvalidValue(value))
        } else if value == f64::INFINITY {
            Ok(ExtendedReal::PosInf)
        } else {
            Ok(ExtendedReal::Finite(value + 0.0))
        }
    }

    /// Panicking constructor for literals known to be valid.
    pub fn finite(value: f64) -> Self {
        assert!(value.is_finite(), "finite() called with {value}");
        ExtendedReal::Finite(value + 0.0)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    /// The value as a float, with `+∞` mapped to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(x) => x,
            ExtendedReal::PosInf => f64::INFINITY,
        }
    }

    fn saturate(x: f64) -> Self {
        if x == f64::INFINITY {
            ExtendedReal::PosInf
        } else if x == f64::NEG_INFINITY {
            ExtendedReal::Finite(f64::MIN)
        } else {
            ExtendedReal::Finite(x + 0.0)
        }
    }

    /// Cone addition; `+∞` absorbs everything and finite overflow saturates.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Self) -> Self {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => Self::saturate(a + b),
            _ => ExtendedReal::PosInf,
        }
    }

    /// `λ·self`, with `0·(+∞) = 0`.
    pub fn scale(self, lambda: f64) -> Result<Self, ConeError> {
        check_scalar(lambda)?;
        Ok(match self {
            _ if lambda == 0.0 => ExtendedReal::ZERO,
            ExtendedReal::PosInf => ExtendedReal::PosInf,
            ExtendedReal::Finite(a) => Self::saturate(lambda * a),
        })
    }

    /// The usual order with `+∞` on top.
    pub fn leq(self, other: Self) -> bool {
        match (self, other) {
            (_, ExtendedReal::PosInf) => true,
            (ExtendedReal::PosInf, ExtendedReal::Finite(_)) => false,
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a <= b,
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.leq(*other), other.leq(*self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;

    fn add(self, rhs: Self) -> Self {
        ExtendedReal::add(self, rhs)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::PosInf => f.write_str("+inf"),
        }
    }
}

/// The cone `ℝ̄` with the usual order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtendedReals;

impl Cone for ExtendedReals {
    type Elem = ExtendedReal;

    fn name(&self) -> &'static str {
        "extended-real"
    }

    fn zero(&self) -> ExtendedReal {
        ExtendedReal::ZERO
    }

    fn add(&self, a: &ExtendedReal, b: &ExtendedReal) -> Result<ExtendedReal, ConeError> {
        Ok(a.add(*b))
    }

    fn scale(&self, lambda: f64, a: &ExtendedReal) -> Result<ExtendedReal, ConeError> {
        a.scale(lambda)
    }

    fn leq(&self, a: &ExtendedReal, b: &ExtendedReal) -> bool {
        a.leq(*b)
    }

    /// `a + c = b` is solvable iff `b = +∞` (take `c = +∞`) or `a` is finite
    /// (take `c = b − a`, any real being an element of `ℝ̄`).
    fn leq_natural(&self, a: &ExtendedReal, b: &ExtendedReal) -> Result<bool, ConeError> {
        Ok(match (a, b) {
            (_, ExtendedReal::PosInf) => true,
            (ExtendedReal::PosInf, ExtendedReal::Finite(_)) => false,
            (ExtendedReal::Finite(x), ExtendedReal::Finite(y)) => (y - x).is_finite(),
        })
    }

    fn checked_sub(&self, a: &ExtendedReal, b: &ExtendedReal) -> Option<ExtendedReal> {
        match (a, b) {
            (ExtendedReal::Finite(x), ExtendedReal::Finite(y)) => {
                let d = x - y;
                d.is_finite().then(|| ExtendedReal::finite(d))
            }
            _ => None,
        }
    }

    fn xi_element(&self, eps: f64) -> Option<ExtendedReal> {
        (eps.is_finite() && eps > 0.0).then(|| ExtendedReal::finite(eps))
    }
}

/// The subcone `ℝ̄₊ = [0, +∞]` of [`ExtendedReals`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NonnegExtendedReals;

impl NonnegExtendedReals {
    fn check(&self, a: &ExtendedReal) -> Result<(), ConeError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(ConeError::NotInCone(self.name()))
        }
    }
}

impl Cone for NonnegExtendedReals {
    type Elem = ExtendedReal;

    fn name(&self) -> &'static str {
        "nonneg-extended-real"
    }

    fn zero(&self) -> ExtendedReal {
        ExtendedReal::ZERO
    }

    fn add(&self, a: &ExtendedReal, b: &ExtendedReal) -> Result<ExtendedReal, ConeError> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.add(*b))
    }

    fn scale(&self, lambda: f64, a: &ExtendedReal) -> Result<ExtendedReal, ConeError> {
        self.check(a)?;
        a.scale(lambda)
    }

    fn leq(&self, a: &ExtendedReal, b: &ExtendedReal) -> bool {
        a.leq(*b)
    }

    /// Here `c` must itself be non-negative, so the natural order is the
    /// usual one.
    fn leq_natural(&self, a: &ExtendedReal, b: &ExtendedReal) -> Result<bool, ConeError> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (a, b) {
            (_, ExtendedReal::PosInf) => true,
            (ExtendedReal::PosInf, ExtendedReal::Finite(_)) => false,
            (ExtendedReal::Finite(x), ExtendedReal::Finite(y)) => y - x >= 0.0,
        })
    }

    fn checked_sub(&self, a: &ExtendedReal, b: &ExtendedReal) -> Option<ExtendedReal> {
        match (a, b) {
            (ExtendedReal::Finite(x), ExtendedReal::Finite(y)) if y <= x && *y >= 0.0 => {
                Some(ExtendedReal::finite(x - y))
            }
            _ => None,
        }
    }

    fn contains(&self, a: &ExtendedReal) -> bool {
        ExtendedReal::ZERO.leq(*a)
    }

    fn xi_element(&self, eps: f64) -> Option<ExtendedReal> {
        (eps.is_finite() && eps > 0.0).then(|| ExtendedReal::finite(eps))
    }
}
