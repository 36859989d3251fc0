//! The normed-space specialization.
//!
//! When the codomain is a vector space with unit ball generated by `w`, the
//! uc-system `{λw}` makes `v(a)v` a norm ball and stabilization becomes the
//! classical estimate `‖Q − f + f(0)/3‖ ≤ ε/3`, with the refined telescoping
//! bound
//!
//! ```text
//! ‖4^{-(n+1)} f(2^{n+1}x) − 4^{-m} f(2^m x) + Σ_{k=m}^{n} 4^{-(k+1)} f(0)‖ ≤ Σ_{k=m}^{n} ε/4^{k+1}
//! ```
//!
//! for every `0 ≤ m ≤ n`.

use rayon::prelude::*;

use super::{
    hyers_iterate, iterations_for, min_lambda, quad_residual, tail_bound, validation_pairs,
    ApproxQuadraticMap, StabilityError, DEFAULT_MAX_ITER, DEFAULT_TOL, DEFAULT_VALIDATION_SIDE,
};
use crate::cone::Cone;
use crate::topology::{in_symmetric, NeighborhoodScale, NormedCone};

#[derive(Debug, Clone)]
pub struct BanachOptions<P> {
    pub tol: f64,
    pub max_iter: u32,
    /// Largest `n` in the telescoping check (`0 ≤ m ≤ n ≤ depth`).
    pub telescoping_depth: u32,
    /// Slack allowed on each telescoping inequality.
    pub telescoping_tol: f64,
    pub validation_pairs: Option<Vec<(P, P)>>,
}

impl<P> Default for BanachOptions<P> {
    fn default() -> Self {
        BanachOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            telescoping_depth: 8,
            telescoping_tol: 1e-12,
            validation_pairs: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BanachReport {
    pub epsilon: f64,
    pub r: f64,
    pub iterations: u32,
    /// `sup_x ‖Q(x) − f(x) + f(0)/3‖`.
    pub final_gauge_max: f64,
    /// `ε/3`.
    pub final_bound: f64,
    pub final_bound_holds: bool,
    /// `Q(x) ∈ (rε/3 · w)(f(x) − f(0)/3)(rε/3 · w)` at every sample.
    pub membership_holds: bool,
    pub telescoping_checked: usize,
    /// Largest `left − right` over all telescoping instances.
    pub telescoping_max_excess: f64,
    pub telescoping_holds: bool,
}

impl BanachReport {
    pub fn passed(&self) -> bool {
        self.final_bound_holds && self.membership_holds && self.telescoping_holds
    }
}

struct PointCheck {
    final_gauge: f64,
    inside: bool,
    excess: f64,
    checked: usize,
}

/// Verifies the normed-space estimates for `f` with tolerance `ε` and
/// enlargement factor `r > 1`.
pub fn banach_case_verify<D, C>(
    f: &ApproxQuadraticMap<D, C>,
    epsilon: f64,
    r: f64,
    samples: &[D::Elem],
    opts: &BanachOptions<D::Elem>,
) -> Result<BanachReport, StabilityError>
where
    D: Cone + Sync,
    C: NormedCone + Sync,
    D::Elem: Send + Sync,
    C::Elem: Send + Sync,
{
    let (dom, cod) = (f.domain(), f.codomain());
    if !cod.is_vector_space() {
        return Err(StabilityError::NotVectorSpace);
    }
    if !(r > 1.0 && r.is_finite()) {
        return Err(StabilityError::InvalidArgument(format!(
            "r must exceed 1, got {r}"
        )));
    }
    if !(opts.tol > 0.0) || !(opts.telescoping_tol >= 0.0) {
        return Err(StabilityError::InvalidArgument(
            "tolerances must be positive".into(),
        ));
    }
    let w = cod.canonical_unit();
    let v = NeighborhoodScale::uc(epsilon, w.clone())?;

    let default_pairs;
    let pairs = match &opts.validation_pairs {
        Some(p) => p.as_slice(),
        None => {
            default_pairs = validation_pairs(dom, samples, DEFAULT_VALIDATION_SIDE);
            default_pairs.as_slice()
        }
    };
    let residual = quad_residual(f, pairs, &v)?;
    if !residual.passed {
        return Err(StabilityError::HypothesisViolated {
            max_residual: residual.max_residual,
            worst_pair: format!("{:?}", residual.worst_pair),
        });
    }

    let f0 = f.evaluate(&dom.zero())?;
    let lambda = min_lambda(cod, &f0, &v)?;
    let iterations = iterations_for(lambda, epsilon, opts.tol, opts.max_iter).ok_or(
        StabilityError::NonConvergence {
            max_iter: opts.max_iter,
            tail: tail_bound(opts.max_iter, lambda, epsilon),
        },
    )?;
    let third_f0 = cod.scale(1.0 / 3.0, &f0)?;
    let ball = NeighborhoodScale::uc(r * epsilon / 3.0, w.clone())?;
    let zero = cod.zero();
    let sub =
        |a: &C::Elem, b: &C::Elem| cod.checked_sub(a, b).ok_or(StabilityError::NotVectorSpace);
    let depth = opts.telescoping_depth;

    let checks = samples
        .par_iter()
        .map(|x| {
            let fx = f.evaluate(x)?;
            let q = hyers_iterate(f, x, iterations)?;
            let shifted = cod.add(&sub(&q, &fx)?, &third_f0)?;
            let final_gauge = cod.symmetric_distance(&shifted, &zero, &w);
            let inside = in_symmetric(cod, &q, &sub(&fx, &third_f0)?, &ball)?;

            let iterates = (0..=depth + 1)
                .map(|k| hyers_iterate(f, x, k))
                .collect::<Result<Vec<_>, _>>()?;
            let mut excess = f64::NEG_INFINITY;
            let mut checked = 0;
            for m in 0..=depth {
                let mut coeff = 0.0;
                let mut right = 0.0;
                for n in m..=depth {
                    let p = 0.25f64.powi(n as i32 + 1);
                    coeff += p;
                    right += epsilon * p;
                    let diff = sub(&iterates[n as usize + 1], &iterates[m as usize])?;
                    let left_elem = cod.add(&diff, &cod.scale(coeff, &f0)?)?;
                    let left = cod.symmetric_distance(&left_elem, &zero, &w);
                    excess = excess.max(left - right);
                    checked += 1;
                }
            }
            Ok(PointCheck {
                final_gauge,
                inside,
                excess,
                checked,
            })
        })
        .collect::<Result<Vec<_>, StabilityError>>()?;

    let final_gauge_max = checks.iter().map(|c| c.final_gauge).fold(0.0, f64::max);
    let telescoping_max_excess = checks
        .iter()
        .map(|c| c.excess)
        .fold(f64::NEG_INFINITY, f64::max);
    let final_bound = epsilon / 3.0;
    Ok(BanachReport {
        epsilon,
        r,
        iterations,
        final_gauge_max,
        final_bound,
        final_bound_holds: final_gauge_max <= final_bound + opts.tol,
        membership_holds: checks.iter().all(|c| c.inside),
        telescoping_checked: checks.iter().map(|c| c.checked).sum(),
        telescoping_max_excess,
        telescoping_holds: telescoping_max_excess <= opts.telescoping_tol,
    })
}
