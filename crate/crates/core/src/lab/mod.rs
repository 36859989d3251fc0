//! Ground-truth quadratic forms, bounded perturbations and parameter sweeps.
//!
//! A perturbed map `f = Q₀ + δ` with `sup|δ| ≤ ε/6` satisfies the approximate
//! quadratic condition at scale `ε`: the midpoint residual of `Q₀` vanishes
//! and the six `δ` terms of `2f(·) + 2f(·) − f(x) − f(y)` contribute at most
//! `6·sup|δ|`.

mod noise;
mod quadratic;
mod report;
mod sweep;

use thiserror::Error;

use crate::cone::{ConeError, Euclidean, ExtendedReal, ExtendedReals, VectorElement};
use crate::stability::{quad_residual, ApproxQuadraticMap, EvalError, StabilityError};
use crate::topology::{NeighborhoodScale, TopologyError};

pub use noise::{NoiseKind, NoiseModel};
pub use quadratic::{make_quadratic, QuadraticForm};
pub use report::{render_report, write_report, ReportFormat, CSV_HEADER};
pub use sweep::{
    run_cell, run_sweep, CellSetup, NoiseSpec, SweepCell, SweepConfig, SweepRecord, LAW_TOL_FACTOR,
};

/// Relative slack on the `ε/6` budget, so that `0.6/6` admits amplitude `0.1`.
pub const BUDGET_SLACK: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("dimension must be at least 1, got {0}")]
    InvalidDimension(usize),
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid noise: {0}")]
    InvalidNoise(String),
    #[error("noise amplitude {amplitude} exceeds the budget ε/6 = {budget}")]
    BudgetExceeded { amplitude: f64, budget: f64 },
    #[error("perturbed map fails the residual check at scale {epsilon}: residual {residual}")]
    ResidualCheck { epsilon: f64, residual: f64 },
    #[error("invalid sweep config: {0}")]
    InvalidConfig(String),
    #[error("writing report to {path}: {message}")]
    Report { path: String, message: String },
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

/// The largest admissible noise amplitude at scale `epsilon`.
pub fn noise_budget(epsilon: f64) -> f64 {
    epsilon / 6.0
}

/// `f(x) = Q₀(x) + δ(x)` as a map `ℝᵈ → ℝ̄`.
///
/// Fails if `sup|δ|` exceeds `ε/6`, and re-checks the residual condition on
/// `pairs` before returning.
pub fn build_perturbed(
    q0: &QuadraticForm,
    noise: NoiseModel,
    epsilon: f64,
    pairs: &[(VectorElement, VectorElement)],
) -> Result<ApproxQuadraticMap<Euclidean, ExtendedReals>, LabError> {
    let v = NeighborhoodScale::xi(epsilon)?;
    let dim = q0.dim();
    noise.validate(dim)?;
    let budget = noise_budget(epsilon);
    if noise.sup_norm() > budget * (1.0 + BUDGET_SLACK) {
        return Err(LabError::BudgetExceeded {
            amplitude: noise.sup_norm(),
            budget,
        });
    }
    let form = q0.clone();
    let f = ApproxQuadraticMap::new(
        Euclidean::new(dim)?,
        ExtendedReals,
        move |x: &VectorElement| {
            if x.dim() != dim {
                return Err(EvalError(format!(
                    "expected a point of dimension {dim}, got {}",
                    x.dim()
                )));
            }
            let value = form.evaluate(x.coords()) + noise.evaluate(x.coords());
            ExtendedReal::new(value).map_err(|e| EvalError(e.to_string()))
        },
    );
    let report = quad_residual(&f, pairs, &v)?;
    if !report.passed {
        return Err(LabError::ResidualCheck {
            epsilon,
            residual: report.max_residual,
        });
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::line_grid;
    use crate::stability::validation_pairs;

    fn square() -> QuadraticForm {
        QuadraticForm::new(&[vec![1.0]]).unwrap()
    }

    fn pairs() -> Vec<(VectorElement, VectorElement)> {
        let pts = line_grid(-4.0, 4.0, 0.5).unwrap();
        validation_pairs(&Euclidean::new(1).unwrap(), &pts, pts.len())
    }

    #[test]
    fn constant_offset_within_budget() {
        let f =
            build_perturbed(&square(), NoiseModel::ConstantOffset(1.0), 6.0001, &pairs()).unwrap();
        let r = quad_residual(&f, &pairs(), &NeighborhoodScale::xi(6.0001).unwrap()).unwrap();
        assert_eq!(r.max_residual, 2.0);
    }

    #[test]
    fn sine_at_exact_budget() {
        let noise = NoiseModel::Sine {
            amplitude: 0.1,
            frequency: vec![1.0],
        };
        assert!(build_perturbed(&square(), noise, 0.6, &pairs()).is_ok());
    }

    #[test]
    fn over_budget_rejected() {
        let noise = NoiseModel::Sine {
            amplitude: 0.2,
            frequency: vec![1.0],
        };
        let err = build_perturbed(&square(), noise, 0.6, &pairs()).unwrap_err();
        assert!(matches!(err, LabError::BudgetExceeded { .. }));
    }
}
