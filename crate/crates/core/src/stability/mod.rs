//! Hyers–Ulam stabilization of approximately quadratic maps between cones.
//!
//! Given `f: K₁ → K₂` with
//!
//! ```text
//! 2f((x+y)/2) + 2f((x−y)/2) ∈ v(f(x) + f(y))v      for all x, y, x−y ∈ K₁
//! ```
//!
//! and `f(0)` bounded, the Hyers iterates `4⁻ⁿ f(2ⁿx)` converge to the unique
//! quadratic map `Q` with `Q(x) ∈ (γv)(f(x))(γv)`, where `γ = (λ+2)/3` and
//! `λ` is any multiplier with `f(0) + λv ≥ 0` and `f(0) ≤ λv`. The distance
//! from iterate `m` to the limit is at most `(λ+1)/(3·4ᵐ)·v`, which is the
//! stopping rule used by [`stabilize`].
//!
//! All universal statements are verified on finite samples. Completeness of
//! the codomain is taken on sequences only: the iterates form a sequence, and
//! nothing here ranges over general nets.

mod banach;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::cone::{Cone, ConeError};
use crate::topology::{
    in_symmetric, realize, NeighborhoodScale, NormedCone, TopologyError, BRACKET_MAX,
};

pub use banach::{banach_case_verify, BanachOptions, BanachReport};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: u32 = 40;
/// Bisection resolution for the minimal multiplier `λ`.
pub const LAMBDA_TOL: f64 = 1e-12;
/// Largest schedule exponent accepted by the iterate functions.
pub const MAX_SCHEDULE_EXPONENT: u32 = 500;
/// Default validation set is the first `n×n` sample pairs.
pub const DEFAULT_VALIDATION_SIDE: usize = 32;

/// Failure to evaluate a map at a point.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct EvalError(pub String);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error("evaluating f at {point}: {source}")]
    Eval { point: String, source: EvalError },
    #[error("pair x={x}, y={y} is inadmissible: x−y is not in the domain cone")]
    InadmissiblePair { x: String, y: String },
    #[error("f(0) unbounded: stabilization refused")]
    UnboundedAtZero,
    #[error("f is unbounded at {point}: {value}")]
    UnboundedValue { point: String, value: String },
    #[error("schedule exponent {n} overflows the domain representation")]
    IterationOverflow { n: u32 },
    #[error("approximate quadratic condition fails: residual {max_residual} at {worst_pair}")]
    HypothesisViolated {
        max_residual: f64,
        worst_pair: String,
    },
    #[error("tail bound {tail} still above tolerance after {max_iter} iterations")]
    NonConvergence { max_iter: u32, tail: f64 },
    #[error("base-2 and base-4 schedules disagree by {max} (limit {limit})")]
    ScheduleDisagreement { max: f64, limit: f64 },
    #[error("sample set is not closed: missing {missing}")]
    NotClosed { missing: String },
    #[error("codomain is not a vector space; subtraction unavailable")]
    NotVectorSpace,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

type MapFn<X, Y> = dyn Fn(&X) -> Result<Y, EvalError> + Send + Sync;

/// A map `f: K₁ → K₂` between two cone instances.
///
/// `evaluate` must be deterministic and safe to call concurrently.
pub struct ApproxQuadraticMap<D: Cone, C: Cone> {
    domain: D,
    codomain: C,
    eval: Arc<MapFn<D::Elem, C::Elem>>,
}

impl<D: Cone + Clone, C: Cone + Clone> Clone for ApproxQuadraticMap<D, C> {
    fn clone(&self) -> Self {
        ApproxQuadraticMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            eval: Arc::clone(&self.eval),
        }
    }
}

impl<D: Cone, C: Cone> fmt::Debug for ApproxQuadraticMap<D, C>
where
    D: fmt::Debug,
    C: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ApproxQuadraticMap")
            .field("domain", &self.domain)
            .field("codomain", &self.codomain)
            .finish_non_exhaustive()
    }
}

impl<D: Cone, C: Cone> ApproxQuadraticMap<D, C> {
    pub fn new(
        domain: D,
        codomain: C,
        eval: impl Fn(&D::Elem) -> Result<C::Elem, EvalError> + Send + Sync + 'static,
    ) -> Self {
        ApproxQuadraticMap {
            domain,
            codomain,
            eval: Arc::new(eval),
        }
    }

    /// Wraps an infallible function.
    pub fn from_fn(
        domain: D,
        codomain: C,
        eval: impl Fn(&D::Elem) -> C::Elem + Send + Sync + 'static,
    ) -> Self {
        Self::new(domain, codomain, move |x| Ok(eval(x)))
    }

    pub fn domain(&self) -> &D {
        &self.domain
    }

    pub fn codomain(&self) -> &C {
        &self.codomain
    }

    pub fn evaluate(&self, x: &D::Elem) -> Result<C::Elem, StabilityError> {
        (self.eval)(x).map_err(|source| StabilityError::Eval {
            point: format!("{x:?}"),
            source,
        })
    }
}

/// Outcome of [`quad_residual`].
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport<P> {
    /// Largest `gauge(L − R)` in units of the scale's unit element; for
    /// `ℝ̄`-valued maps with `ξ` this is `|L − R|`.
    pub max_residual: f64,
    pub worst_pair: Option<(P, P)>,
    /// Every pair satisfied `L ∈ v(R)v`.
    pub passed: bool,
    pub pairs_checked: usize,
}

/// Midpoint terms `L = 2f((x+y)/2) + 2f((x−y)/2)` and `R = f(x) + f(y)`.
fn midpoint_terms<D: Cone, C: Cone>(
    f: &ApproxQuadraticMap<D, C>,
    x: &D::Elem,
    y: &D::Elem,
) -> Result<(C::Elem, C::Elem), StabilityError> {
    let (dom, cod) = (f.domain(), f.codomain());
    let diff = dom
        .checked_sub(x, y)
        .ok_or_else(|| StabilityError::InadmissiblePair {
            x: format!("{x:?}"),
            y: format!("{y:?}"),
        })?;
    let half_sum = dom.scale(0.5, &dom.add(x, y)?)?;
    let half_diff = dom.scale(0.5, &diff)?;
    let lhs = cod.add(
        &cod.scale(2.0, &f.evaluate(&half_sum)?)?,
        &cod.scale(2.0, &f.evaluate(&half_diff)?)?,
    )?;
    let rhs = cod.add(&f.evaluate(x)?, &f.evaluate(y)?)?;
    Ok((lhs, rhs))
}

/// Checks `2f((x+y)/2) + 2f((x−y)/2) ∈ v(f(x) + f(y))v` on every pair.
pub fn quad_residual<D: Cone, C: NormedCone>(
    f: &ApproxQuadraticMap<D, C>,
    pairs: &[(D::Elem, D::Elem)],
    v: &NeighborhoodScale<C::Elem>,
) -> Result<ResidualReport<D::Elem>, StabilityError> {
    let cod = f.codomain();
    let unit = realize(cod, &v.unit())?;
    let mut report = ResidualReport {
        max_residual: 0.0,
        worst_pair: None,
        passed: true,
        pairs_checked: 0,
    };
    for (x, y) in pairs {
        let (lhs, rhs) = midpoint_terms(f, x, y)?;
        report.passed &= in_symmetric(cod, &lhs, &rhs, v)?;
        let r = cod.symmetric_distance(&lhs, &rhs, &unit);
        if report.worst_pair.is_none() || r > report.max_residual {
            report.max_residual = r;
            report.worst_pair = Some((x.clone(), y.clone()));
        }
        report.pairs_checked += 1;
    }
    Ok(report)
}

/// Least `λ ≥ 0` with `f0 + λv ≥ 0` and `f0 ≤ λv`, by bisection to
/// [`LAMBDA_TOL`]. The returned value always satisfies both inequalities.
pub fn min_lambda<C: NormedCone>(
    codomain: &C,
    f0: &C::Elem,
    v: &NeighborhoodScale<C::Elem>,
) -> Result<f64, StabilityError> {
    if !codomain.is_bounded_element(f0) {
        return Err(StabilityError::UnboundedAtZero);
    }
    let v = realize(codomain, v)?;
    let zero = codomain.zero();
    let admissible = |lambda: f64| -> bool {
        let Ok(lv) = codomain.scale(lambda, &v) else {
            return false;
        };
        let Ok(shifted) = codomain.add(f0, &lv) else {
            return false;
        };
        codomain.leq(&zero, &shifted) && codomain.leq(f0, &lv)
    };
    if admissible(0.0) {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while !admissible(hi) {
        hi *= 2.0;
        if hi > BRACKET_MAX {
            return Err(StabilityError::UnboundedAtZero);
        }
    }
    let mut lo = if hi == 1.0 { 0.0 } else { hi / 2.0 };
    for _ in 0..200 {
        if hi - lo <= LAMBDA_TOL * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if admissible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn schedule<D: Cone, C: Cone>(
    f: &ApproxQuadraticMap<D, C>,
    x: &D::Elem,
    n: u32,
    base: f64,
) -> Result<C::Elem, StabilityError> {
    if n > MAX_SCHEDULE_EXPONENT {
        return Err(StabilityError::IterationOverflow { n });
    }
    let up = base.powi(n as i32);
    let down = (base * base).recip().powi(n as i32);
    if !up.is_finite() || down == 0.0 {
        return Err(StabilityError::IterationOverflow { n });
    }
    let xs = f
        .domain()
        .scale(up, x)
        .map_err(|_| StabilityError::IterationOverflow { n })?;
    Ok(f.codomain().scale(down, &f.evaluate(&xs)?)?)
}

/// The Hyers iterate `4⁻ⁿ f(2ⁿx)`.
pub fn hyers_iterate<D: Cone, C: Cone>(
    f: &ApproxQuadraticMap<D, C>,
    x: &D::Elem,
    n: u32,
) -> Result<C::Elem, StabilityError> {
    schedule(f, x, n, 2.0)
}

/// The base-4 schedule `16⁻ⁿ f(4ⁿx)`, a subsequence of the Hyers iterates.
pub fn hyers_iterate_base4<D: Cone, C: Cone>(
    f: &ApproxQuadraticMap<D, C>,
    x: &D::Elem,
    n: u32,
) -> Result<C::Elem, StabilityError> {
    schedule(f, x, n, 4.0)
}

/// A-priori distance `(λ+1)/(3·4ᵐ)·ε` from iterate `m` to the limit.
pub fn tail_bound(m: u32, lambda: f64, epsilon: f64) -> f64 {
    (lambda + 1.0) / (3.0 * 4f64.powi(m as i32)) * epsilon
}

/// First `m ≤ max_iter` whose tail bound is at most `tol`.
pub fn iterations_for(lambda: f64, epsilon: f64, tol: f64, max_iter: u32) -> Option<u32> {
    (0..=max_iter).find(|&m| tail_bound(m, lambda, epsilon) <= tol)
}

/// Constants certifying one stabilization run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyersCertificate {
    pub epsilon: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub iterations: u32,
    pub tail_bound: f64,
    pub converged: bool,
}

impl HyersCertificate {
    pub fn new(epsilon: f64, lambda: f64, iterations: u32, tol: f64) -> Self {
        let tail = tail_bound(iterations, lambda, epsilon);
        HyersCertificate {
            epsilon,
            lambda,
            gamma: (lambda + 2.0) / 3.0,
            iterations,
            tail_bound: tail,
            converged: tail <= tol,
        }
    }

    /// `γε`, the sandwich radius.
    pub fn bound(&self) -> f64 {
        self.gamma * self.epsilon
    }
}

impl fmt::Display for HyersCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "epsilon={} lambda={} gamma={} iterations={} tail_bound={:e} converged={}",
            self.epsilon, self.lambda, self.gamma, self.iterations, self.tail_bound, self.converged
        )
    }
}

#[derive(Debug, Clone)]
pub struct StabilizeOptions<P> {
    pub tol: f64,
    pub max_iter: u32,
    /// Pairs checked against the hypothesis before iterating; defaults to
    /// the admissible pairs among the first [`DEFAULT_VALIDATION_SIDE`]
    /// samples.
    pub validation_pairs: Option<Vec<(P, P)>>,
}

impl<P> Default for StabilizeOptions<P> {
    fn default() -> Self {
        StabilizeOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            validation_pairs: None,
        }
    }
}

/// All admissible pairs among the first `side` points.
pub fn validation_pairs<D: Cone>(
    domain: &D,
    points: &[D::Elem],
    side: usize,
) -> Vec<(D::Elem, D::Elem)> {
    let head = &points[..points.len().min(side)];
    head.iter()
        .flat_map(|x| head.iter().map(move |y| (x, y)))
        .filter(|(x, y)| domain.checked_sub(x, y).is_some())
        .map(|(x, y)| (x.clone(), y.clone()))
        .collect()
}

#[derive(Debug, Clone)]
pub struct StabilizationResult<P, V> {
    pub certificate: HyersCertificate,
    /// `(x, Q(x))` in sample order.
    pub q_values: Vec<(P, V)>,
    pub f_values: Vec<V>,
    /// `sup_x gauge(iterate(k+1, x) − iterate(k, x))` for `k < iterations`.
    pub residual_log: Vec<f64>,
    /// `sup_x gauge(Q(x) − f(x))`.
    pub max_sandwich_gap: f64,
    /// `Q(x) ∈ (γv)(f(x))(γv)` (widened by `tol`) at every sample.
    pub sandwich_holds: bool,
    /// `sup_x gauge(f(x))`, used to place the rounding floor of the log.
    pub value_scale: f64,
}

impl<P, V> StabilizationResult<P, V> {
    /// Entries of the residual log below this are rounding noise.
    pub fn noise_floor(&self) -> f64 {
        256.0 * f64::EPSILON * (1.0 + self.value_scale)
    }

    /// Least-squares slope of `ln d(k)` against `k` over the entries above
    /// the noise floor; `None` if fewer than three remain.
    pub fn log_slope(&self) -> Option<f64> {
        fit_log_slope(&self.residual_log, self.noise_floor())
    }
}

/// Least-squares slope of `ln d(k)` vs `k` over entries `d(k) > floor`.
pub fn fit_log_slope(log: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = log
        .iter()
        .enumerate()
        .filter(|(_, d)| d.is_finite() && **d > floor)
        .map(|(k, d)| (k as f64, d.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

struct PointTrace<V> {
    q: V,
    fx: V,
    diffs: Vec<f64>,
    gap: f64,
    inside: bool,
    magnitude: f64,
}

/// Runs the Hyers iteration at every sample point and certifies the result.
///
/// Refuses to run when `f(0)` is unbounded, when the hypothesis fails on the
/// validation pairs, or when `max_iter` iterations cannot push the tail
/// bound below `tol`. Points are processed in parallel; results keep sample
/// order.
pub fn stabilize<D, C>(
    f: &ApproxQuadraticMap<D, C>,
    samples: &[D::Elem],
    v: &NeighborhoodScale<C::Elem>,
    opts: &StabilizeOptions<D::Elem>,
) -> Result<StabilizationResult<D::Elem, C::Elem>, StabilityError>
where
    D: Cone + Sync,
    C: NormedCone + Sync,
    D::Elem: Send + Sync,
    C::Elem: Send + Sync,
{
    if !(opts.tol > 0.0) {
        return Err(StabilityError::InvalidArgument(format!(
            "tol must be positive, got {}",
            opts.tol
        )));
    }
    let (dom, cod) = (f.domain(), f.codomain());
    let f0 = f.evaluate(&dom.zero())?;
    if !cod.is_bounded_element(&f0) {
        return Err(StabilityError::UnboundedAtZero);
    }

    let default_pairs;
    let pairs = match &opts.validation_pairs {
        Some(p) => p.as_slice(),
        None => {
            default_pairs = validation_pairs(dom, samples, DEFAULT_VALIDATION_SIDE);
            default_pairs.as_slice()
        }
    };
    let residual = quad_residual(f, pairs, v)?;
    if !residual.passed {
        return Err(StabilityError::HypothesisViolated {
            max_residual: residual.max_residual,
            worst_pair: format!("{:?}", residual.worst_pair),
        });
    }

    let epsilon = v.magnitude();
    let lambda = min_lambda(cod, &f0, v)?;
    let iterations = iterations_for(lambda, epsilon, opts.tol, opts.max_iter).ok_or(
        StabilityError::NonConvergence {
            max_iter: opts.max_iter,
            tail: tail_bound(opts.max_iter, lambda, epsilon),
        },
    )?;
    let certificate = HyersCertificate::new(epsilon, lambda, iterations, opts.tol);
    let unit = realize(cod, &v.unit())?;
    let widened = v.with_magnitude(certificate.bound() + opts.tol)?;
    let zero = cod.zero();

    let traces = samples
        .par_iter()
        .map(|x| {
            let mut iterates = Vec::with_capacity(iterations as usize + 1);
            for k in 0..=iterations {
                let it = hyers_iterate(f, x, k)?;
                if !cod.is_bounded_element(&it) {
                    return Err(StabilityError::UnboundedValue {
                        point: format!("{x:?}"),
                        value: format!("{it:?}"),
                    });
                }
                iterates.push(it);
            }
            let diffs = iterates
                .windows(2)
                .map(|w| cod.symmetric_distance(&w[1], &w[0], &unit))
                .collect();
            let q = iterates.last().cloned().unwrap_or_else(|| cod.zero());
            let fx = iterates.swap_remove(0);
            Ok(PointTrace {
                gap: cod.symmetric_distance(&q, &fx, &unit),
                inside: in_symmetric(cod, &q, &fx, &widened)?,
                magnitude: cod.symmetric_distance(&fx, &zero, &unit),
                diffs,
                q,
                fx,
            })
        })
        .collect::<Result<Vec<_>, StabilityError>>()?;

    let mut residual_log = vec![0.0f64; iterations as usize];
    for t in &traces {
        for (acc, d) in residual_log.iter_mut().zip(&t.diffs) {
            *acc = acc.max(*d);
        }
    }
    let max_sandwich_gap = traces.iter().map(|t| t.gap).fold(0.0, f64::max);
    let value_scale = traces.iter().map(|t| t.magnitude).fold(0.0, f64::max);
    let sandwich_holds = traces.iter().all(|t| t.inside);
    let (q_values, f_values) = samples
        .iter()
        .zip(traces)
        .map(|(x, t)| ((x.clone(), t.q), t.fx))
        .unzip();
    Ok(StabilizationResult {
        certificate,
        q_values,
        f_values,
        residual_log,
        max_sandwich_gap,
        sandwich_holds,
        value_scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniquenessReport {
    pub base2_iterations: u32,
    pub base4_iterations: u32,
    pub max_disagreement: f64,
    pub limit: f64,
}

/// Builds `Q` with the base-2 schedule (via [`stabilize`]) and again with
/// the base-4 schedule `16⁻ⁿf(4ⁿx)`, and requires the two to agree within
/// `2·tol` at every sample.
pub fn uniqueness_crosscheck<D, C>(
    f: &ApproxQuadraticMap<D, C>,
    v: &NeighborhoodScale<C::Elem>,
    samples: &[D::Elem],
    opts: &StabilizeOptions<D::Elem>,
) -> Result<UniquenessReport, StabilityError>
where
    D: Cone + Sync,
    C: NormedCone + Sync,
    D::Elem: Send + Sync,
    C::Elem: Send + Sync,
{
    let base2 = stabilize(f, samples, v, opts)?;
    let m = base2.certificate.iterations;
    let n4 = m.div_ceil(2);
    let cod = f.codomain();
    let unit = realize(cod, &v.unit())?;
    let max_disagreement = base2
        .q_values
        .par_iter()
        .map(|(x, q2)| Ok(cod.symmetric_distance(q2, &hyers_iterate_base4(f, x, n4)?, &unit)))
        .collect::<Result<Vec<f64>, StabilityError>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let limit = 2.0 * opts.tol;
    if max_disagreement > limit {
        return Err(StabilityError::ScheduleDisagreement {
            max: max_disagreement,
            limit,
        });
    }
    Ok(UniquenessReport {
        base2_iterations: m,
        base4_iterations: n4,
        max_disagreement,
        limit,
    })
}

/// Points and pairs on which the quadratic laws are checked.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredSamples<P> {
    pub points: Vec<P>,
    pub pairs: Vec<(P, P)>,
}

impl<P: Clone + fmt::Debug> StructuredSamples<P> {
    /// Every point the laws need: `0`, `x`, `x/2`, `2x` for each point and
    /// `x`, `y`, `x+y`, `x−y` for each (admissible) pair. Order is stable.
    pub fn required_points<D: Cone<Elem = P>>(&self, domain: &D) -> Result<Vec<P>, StabilityError> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut push = |p: P| {
            if seen.insert(format!("{p:?}")) {
                out.push(p);
            }
        };
        push(domain.zero());
        for x in &self.points {
            push(x.clone());
            push(domain.scale(0.5, x)?);
            push(domain.scale(2.0, x)?);
        }
        for (x, y) in &self.pairs {
            let diff =
                domain
                    .checked_sub(x, y)
                    .ok_or_else(|| StabilityError::InadmissiblePair {
                        x: format!("{x:?}"),
                        y: format!("{y:?}"),
                    })?;
            push(x.clone());
            push(y.clone());
            push(domain.add(x, y)?);
            push(diff);
        }
        Ok(out)
    }
}

pub const LAW_ZERO: &str = "Q(0)=0";
pub const LAW_HALVING: &str = "4Q(x/2)=Q(x)";
pub const LAW_DOUBLING: &str = "Q(2x)=4Q(x)";
pub const LAW_PARALLELOGRAM: &str = "Q(x+y)+Q(x−y)=2Q(x)+2Q(y)";

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticLawEntry<P> {
    pub law: &'static str,
    pub passed: bool,
    pub max_deviation: f64,
    pub witness: Option<Vec<P>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticLawReport<P> {
    pub entries: Vec<QuadraticLawEntry<P>>,
}

impl<P> QuadraticLawReport<P> {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn entry(&self, law: &str) -> Option<&QuadraticLawEntry<P>> {
        self.entries.iter().find(|e| e.law == law)
    }
}

impl<P: fmt::Debug> fmt::Display for QuadraticLawReport<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let status = if e.passed { "pass" } else { "FAIL" };
            write!(
                f,
                "{status:4} {:<28} max deviation {:e}",
                e.law, e.max_deviation
            )?;
            if let Some(w) = &e.witness {
                write!(f, "  witness {w:?}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

struct LawTally<P> {
    law: &'static str,
    tol: f64,
    max_deviation: f64,
    witness: Option<Vec<P>>,
}

impl<P: Clone> LawTally<P> {
    fn record(&mut self, deviation: f64, at: &[&P]) {
        if deviation > self.max_deviation || deviation.is_nan() {
            self.max_deviation = if deviation.is_nan() {
                f64::INFINITY
            } else {
                deviation
            };
        }
        if !(deviation <= self.tol) && self.witness.is_none() {
            self.witness = Some(at.iter().map(|p| (*p).clone()).collect());
        }
    }

    fn finish(self) -> QuadraticLawEntry<P> {
        QuadraticLawEntry {
            law: self.law,
            passed: self.witness.is_none(),
            max_deviation: self.max_deviation,
            witness: self.witness,
        }
    }
}

/// Checks `Q(0) = 0`, `4Q(x/2) = Q(x)`, `Q(2x) = 4Q(x)` and the
/// parallelogram law on a table of `Q` values, each within `tol` in the
/// codomain's canonical gauge.
pub fn verify_quadratic_laws<D, C>(
    domain: &D,
    codomain: &C,
    table: &[(D::Elem, C::Elem)],
    samples: &StructuredSamples<D::Elem>,
    tol: f64,
) -> Result<QuadraticLawReport<D::Elem>, StabilityError>
where
    D: Cone,
    C: NormedCone,
{
    // Debug output of the elements is exact (shortest round-trip floats), so
    // it serves as a hash key for types that are only `PartialEq`.
    let index: HashMap<String, usize> = table
        .iter()
        .enumerate()
        .rev()
        .map(|(i, (x, _))| (format!("{x:?}"), i))
        .collect();
    let lookup = |p: &D::Elem| -> Result<&C::Elem, StabilityError> {
        index
            .get(&format!("{p:?}"))
            .map(|&i| &table[i].1)
            .ok_or_else(|| StabilityError::NotClosed {
                missing: format!("{p:?}"),
            })
    };
    let unit = codomain.canonical_unit();
    let dist = |a: &C::Elem, b: &C::Elem| codomain.symmetric_distance(a, b, &unit);
    let tally = |law| LawTally {
        law,
        tol,
        max_deviation: 0.0,
        witness: None,
    };
    let (mut zero_law, mut halving, mut doubling, mut parallelogram) = (
        tally(LAW_ZERO),
        tally(LAW_HALVING),
        tally(LAW_DOUBLING),
        tally(LAW_PARALLELOGRAM),
    );

    let zero = domain.zero();
    zero_law.record(dist(lookup(&zero)?, &codomain.zero()), &[&zero]);

    for x in &samples.points {
        let qx = lookup(x)?;
        let half = domain.scale(0.5, x)?;
        let twice = domain.scale(2.0, x)?;
        let four_q_half = codomain.scale(4.0, lookup(&half)?)?;
        halving.record(dist(&four_q_half, qx), &[x]);
        let four_qx = codomain.scale(4.0, qx)?;
        doubling.record(dist(lookup(&twice)?, &four_qx), &[x]);
    }

    for (x, y) in &samples.pairs {
        let sum = domain.add(x, y)?;
        let diff = domain
            .checked_sub(x, y)
            .ok_or_else(|| StabilityError::InadmissiblePair {
                x: format!("{x:?}"),
                y: format!("{y:?}"),
            })?;
        let lhs = codomain.add(lookup(&sum)?, lookup(&diff)?)?;
        let rhs = codomain.add(
            &codomain.scale(2.0, lookup(x)?)?,
            &codomain.scale(2.0, lookup(y)?)?,
        )?;
        parallelogram.record(dist(&lhs, &rhs), &[x, y]);
    }

    Ok(QuadraticLawReport {
        entries: vec![
            zero_law.finish(),
            halving.finish(),
            doubling.finish(),
            parallelogram.finish(),
        ],
    })
}
