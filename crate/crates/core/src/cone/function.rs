use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{check_scalar, Cone, ConeError, ExtendedReal, ExtendedReals};

/// An `ℝ̄`-valued function on a finite key set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionElement {
    values: BTreeMap<String, ExtendedReal>,
}

impl FunctionElement {
    pub fn new<K: Into<String>>(values: impl IntoIterator<Item = (K, ExtendedReal)>) -> Self {
        FunctionElement {
            values: values.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    pub fn get(&self, key: &str) -> Option<ExtendedReal> {
        self.values.get(key).copied()
    }

    pub fn values(&self) -> &BTreeMap<String, ExtendedReal> {
        &self.values
    }
}

/// The cone `F(X, ℝ̄)` with pointwise operations and order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionCone {
    domain: Vec<String>,
}

impl FunctionCone {
    pub fn new<K: Into<String>>(keys: impl IntoIterator<Item = K>) -> Result<Self, ConeError> {
        let mut domain: Vec<String> = keys.into_iter().map(Into::into).collect();
        domain.sort();
        domain.dedup();
        if domain.is_empty() {
            return Err(ConeError::EmptyDimension);
        }
        Ok(FunctionCone { domain })
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    /// Builds an element from values listed in domain order.
    pub fn element(&self, values: &[ExtendedReal]) -> Result<FunctionElement, ConeError> {
        if values.len() != self.domain.len() {
            return Err(ConeError::DimensionMismatch {
                expected: self.domain.len(),
                found: values.len(),
            });
        }
        Ok(FunctionElement::new(
            self.domain.iter().cloned().zip(values.iter().copied()),
        ))
    }

    pub fn constant(&self, value: ExtendedReal) -> FunctionElement {
        FunctionElement::new(self.domain.iter().map(|k| (k.clone(), value)))
    }

    fn check(&self, a: &FunctionElement) -> Result<(), ConeError> {
        if a.values.len() == self.domain.len() && a.values.keys().eq(self.domain.iter()) {
            Ok(())
        } else {
            Err(ConeError::DomainMismatch)
        }
    }

    fn zip_with(
        &self,
        a: &FunctionElement,
        b: &FunctionElement,
        op: impl Fn(ExtendedReal, ExtendedReal) -> ExtendedReal,
    ) -> Result<FunctionElement, ConeError> {
        self.check(a)?;
        self.check(b)?;
        Ok(FunctionElement::new(
            self.domain
                .iter()
                .map(|k| (k.clone(), op(a.values[k], b.values[k]))),
        ))
    }
}

impl Cone for FunctionCone {
    type Elem = FunctionElement;

    fn name(&self) -> &'static str {
        "function"
    }

    fn zero(&self) -> FunctionElement {
        self.constant(ExtendedReal::ZERO)
    }

    fn add(&self, a: &FunctionElement, b: &FunctionElement) -> Result<FunctionElement, ConeError> {
        self.zip_with(a, b, ExtendedReal::add)
    }

    fn scale(&self, lambda: f64, a: &FunctionElement) -> Result<FunctionElement, ConeError> {
        check_scalar(lambda)?;
        self.check(a)?;
        let values = self
            .domain
            .iter()
            .map(|k| Ok((k.clone(), a.values[k].scale(lambda)?)))
            .collect::<Result<Vec<_>, ConeError>>()?;
        Ok(FunctionElement::new(values))
    }

    fn leq(&self, a: &FunctionElement, b: &FunctionElement) -> bool {
        self.check(a).is_ok()
            && self.check(b).is_ok()
            && self.domain.iter().all(|k| a.values[k].leq(b.values[k]))
    }

    fn leq_natural(&self, a: &FunctionElement, b: &FunctionElement) -> Result<bool, ConeError> {
        self.check(a)?;
        self.check(b)?;
        for k in &self.domain {
            if !ExtendedReals.leq_natural(&a.values[k], &b.values[k])? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn checked_sub(&self, a: &FunctionElement, b: &FunctionElement) -> Option<FunctionElement> {
        self.check(a).ok()?;
        self.check(b).ok()?;
        let values = self
            .domain
            .iter()
            .map(|k| {
                Some((
                    k.clone(),
                    ExtendedReals.checked_sub(&a.values[k], &b.values[k])?,
                ))
            })
            .collect::<Option<Vec<_>>>()?;
        Some(FunctionElement::new(values))
    }

    /// The constant function `ε`.
    fn xi_element(&self, eps: f64) -> Option<FunctionElement> {
        ExtendedReals.xi_element(eps).map(|e| self.constant(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn er(x: f64) -> ExtendedReal {
        ExtendedReal::finite(x)
    }

    #[test]
    fn pointwise_operations() {
        let c = FunctionCone::new(["p", "q"]).unwrap();
        let a = c.element(&[er(1.0), ExtendedReal::INFINITY]).unwrap();
        let b = c.element(&[er(0.5), er(-3.0)]).unwrap();
        let s = c.add(&a, &b).unwrap();
        assert_eq!(s.get("p"), Some(er(1.5)));
        assert_eq!(s.get("q"), Some(ExtendedReal::INFINITY));
        let z = c.scale(0.0, &a).unwrap();
        assert_eq!(z, c.zero());
        assert!(c.leq(&b, &a));
        assert!(!c.leq(&a, &b));
    }

    #[test]
    fn domain_mismatch() {
        let c = FunctionCone::new(["p", "q"]).unwrap();
        let other = FunctionElement::new([("p", er(1.0))]);
        assert_eq!(c.add(&c.zero(), &other), Err(ConeError::DomainMismatch));
        assert!(!c.leq(&c.zero(), &other));
        assert!(c.element(&[er(1.0)]).is_err());
    }

    #[test]
    fn natural_order_is_pointwise() {
        let c = FunctionCone::new(["p", "q"]).unwrap();
        let a = c.element(&[er(1.0), ExtendedReal::INFINITY]).unwrap();
        let b = c.element(&[er(2.0), er(0.0)]).unwrap();
        assert!(!c.leq_natural(&a, &b).unwrap());
        assert!(c.leq_natural(&b, &a).unwrap());
    }
}
