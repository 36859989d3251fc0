use std::fmt;

use super::{check_scalar, Cone, ConeError};

/// Element of the two-point structure `{0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwoPoint {
    Zero,
    One,
}

impl fmt::Display for TwoPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TwoPoint::Zero => f.write_str("0"),
            TwoPoint::One => f.write_str("1"),
        }
    }
}

/// `{0, 1}` with `0+0 = 0`, `0+1 = 1+1 = 1` and `λa = a` for every `λ ≥ 0`.
///
/// Every cone axiom holds except `0a = 0`, which fails at `a = 1`. The order
/// is the natural one, `0 ≤ 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TwoPointPathology;

impl Cone for TwoPointPathology {
    type Elem = TwoPoint;

    fn name(&self) -> &'static str {
        "two-point-pathology"
    }

    fn zero(&self) -> TwoPoint {
        TwoPoint::Zero
    }

    fn add(&self, a: &TwoPoint, b: &TwoPoint) -> Result<TwoPoint, ConeError> {
        Ok(match (a, b) {
            (TwoPoint::Zero, TwoPoint::Zero) => TwoPoint::Zero,
            _ => TwoPoint::One,
        })
    }

    fn scale(&self, lambda: f64, a: &TwoPoint) -> Result<TwoPoint, ConeError> {
        check_scalar(lambda)?;
        Ok(*a)
    }

    fn leq(&self, a: &TwoPoint, b: &TwoPoint) -> bool {
        !(*a == TwoPoint::One && *b == TwoPoint::Zero)
    }

    /// `1 + c` is always `1`, so only `1 ≤ 0` is unsolvable.
    fn leq_natural(&self, a: &TwoPoint, b: &TwoPoint) -> Result<bool, ConeError> {
        Ok(self.leq(a, b))
    }
}
