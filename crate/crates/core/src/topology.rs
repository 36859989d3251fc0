//! Abstract 0-neighborhood systems and the topologies they induce.
//!
//! Two families of systems are supported: the scalar system `ξ = {ε > 0}`
//! on `ℝ̄`, `ℝ̄₊` (and its constant-function copy on `F(X, ℝ̄)`), and the
//! uc-systems `{λw : λ > 0}` generated by a single positive element `w`.
//!
//! Universal quantifiers over the (infinite) system are approximated by
//! finite geometric ladders of scales. Every operation that does so is a
//! semi-decision: a `true` from [`closure_contains`] means "in the closure
//! as far as the ladder can see".
//!
//! Convergence in the symmetric topology is two-sided here: `aₙ → a` means
//! `aₙ ∈ v(a)v` eventually, for every `v`. The one-sided condition
//! `aₙ ≤ a + v` alone describes upper-topology convergence.

use std::fmt;

use thiserror::Error;

use crate::cone::laws::{LawEntry, LawReport, Witness};
use crate::cone::{
    Cone, ConeError, Euclidean, ExtendedReal, ExtendedReals, FunctionCone, FunctionElement,
    NonnegExtendedReals, VectorElement,
};

/// Lower end of every bisection bracket.
pub const BRACKET_MIN: f64 = 8.673_617_379_884_035e-19; // 2^-60
/// Upper end of every bisection bracket; also the search cap.
pub const BRACKET_MAX: f64 = 1_152_921_504_606_846_976.0; // 2^60
pub const MAX_BISECTION_STEPS: usize = 200;
pub const DEFAULT_GAUGE_TOL: f64 = 1e-9;
/// Default ladder `2⁰, 2⁻¹, …, 2⁻²⁰`.
pub const DEFAULT_LADDER_DEPTH: u32 = 20;
/// Horizon of the null sequence `2⁻ⁿ` used by [`boundedness_check`].
pub const DEFAULT_NULL_HORIZON: u32 = 128;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("neighborhood magnitude must be a positive real, got {0}")]
    InvalidMagnitude(f64),
    #[error("scalar neighborhoods are not realizable in the {0} cone")]
    NotRealizable(&'static str),
    #[error("uc generator must be strictly positive")]
    NonPositiveGenerator,
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("at least one scale is required")]
    EmptyScales,
    #[error("no admissible multiplier below the search cap {cap}")]
    CapExceeded { cap: f64 },
    #[error(transparent)]
    Cone(#[from] ConeError),
}

/// An element `v` of a 0-neighborhood system.
#[derive(Debug, Clone, PartialEq)]
pub enum NeighborhoodScale<E> {
    /// `ε` in the scalar system `ξ`.
    Xi(f64),
    /// `λw` in the uc-system generated by `w`.
    Uc { lambda: f64, generator: E },
}

fn check_magnitude(m: f64) -> Result<(), TopologyError> {
    if m.is_finite() && m > 0.0 {
        Ok(())
    } else {
        Err(TopologyError::InvalidMagnitude(m))
    }
}

impl<E: Clone> NeighborhoodScale<E> {
    pub fn xi(eps: f64) -> Result<Self, TopologyError> {
        check_magnitude(eps)?;
        Ok(NeighborhoodScale::Xi(eps))
    }

    pub fn uc(lambda: f64, generator: E) -> Result<Self, TopologyError> {
        check_magnitude(lambda)?;
        Ok(NeighborhoodScale::Uc { lambda, generator })
    }

    /// `ε` or `λ`.
    pub fn magnitude(&self) -> f64 {
        match self {
            NeighborhoodScale::Xi(e) => *e,
            NeighborhoodScale::Uc { lambda, .. } => *lambda,
        }
    }

    /// The same kind of scale with magnitude replaced by `m`.
    pub fn with_magnitude(&self, m: f64) -> Result<Self, TopologyError> {
        check_magnitude(m)?;
        Ok(match self {
            NeighborhoodScale::Xi(_) => NeighborhoodScale::Xi(m),
            NeighborhoodScale::Uc { generator, .. } => NeighborhoodScale::Uc {
                lambda: m,
                generator: generator.clone(),
            },
        })
    }

    /// `c·v` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self, TopologyError> {
        self.with_magnitude(c * self.magnitude())
    }

    /// The magnitude-one member of the same system (`ε = 1` or `w`).
    pub fn unit(&self) -> Self {
        match self {
            NeighborhoodScale::Xi(_) => NeighborhoodScale::Xi(1.0),
            NeighborhoodScale::Uc { generator, .. } => NeighborhoodScale::Uc {
                lambda: 1.0,
                generator: generator.clone(),
            },
        }
    }
}

impl<E: fmt::Debug> fmt::Display for NeighborhoodScale<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NeighborhoodScale::Xi(e) => write!(f, "ε={e}"),
            NeighborhoodScale::Uc { lambda, generator } => write!(f, "{lambda}·{generator:?}"),
        }
    }
}

/// `ε = 2⁰, 2⁻¹, …, 2⁻ᵈᵉᵖᵗʰ`.
pub fn xi_ladder<E: Clone>(depth: u32) -> Vec<NeighborhoodScale<E>> {
    (0..=depth)
        .map(|k| NeighborhoodScale::Xi(0.5f64.powi(k as i32)))
        .collect()
}

/// `2⁰w, 2⁻¹w, …, 2⁻ᵈᵉᵖᵗʰw`.
pub fn uc_ladder<E: Clone>(generator: &E, depth: u32) -> Vec<NeighborhoodScale<E>> {
    (0..=depth)
        .map(|k| NeighborhoodScale::Uc {
            lambda: 0.5f64.powi(k as i32),
            generator: generator.clone(),
        })
        .collect()
}

/// Cones whose symmetric topology comes from a gauge with a closed form.
pub trait NormedCone: Cone {
    /// The canonical generator used to measure distances (`1`, all-ones, or
    /// the constant function `1`).
    fn canonical_unit(&self) -> Self::Elem;

    /// Least `t ≥ 0` with `a ≤ b + t·unit` and `b ≤ a + t·unit`, or `+∞`.
    fn symmetric_distance(&self, a: &Self::Elem, b: &Self::Elem, unit: &Self::Elem) -> f64;

    /// Whether `a` is a bounded (finite) element.
    fn is_bounded_element(&self, a: &Self::Elem) -> bool;
}

fn extended_distance(a: ExtendedReal, b: ExtendedReal, unit: ExtendedReal) -> f64 {
    match (a, b, unit) {
        (ExtendedReal::PosInf, ExtendedReal::PosInf, _) => 0.0,
        (ExtendedReal::Finite(x), ExtendedReal::Finite(y), ExtendedReal::Finite(u)) if u > 0.0 => {
            (x - y).abs() / u
        }
        (ExtendedReal::Finite(x), ExtendedReal::Finite(y), _) if x == y => 0.0,
        _ => f64::INFINITY,
    }
}

impl NormedCone for ExtendedReals {
    fn canonical_unit(&self) -> ExtendedReal {
        ExtendedReal::ONE
    }

    fn symmetric_distance(&self, a: &ExtendedReal, b: &ExtendedReal, unit: &ExtendedReal) -> f64 {
        extended_distance(*a, *b, *unit)
    }

    fn is_bounded_element(&self, a: &ExtendedReal) -> bool {
        a.is_finite()
    }
}

impl NormedCone for NonnegExtendedReals {
    fn canonical_unit(&self) -> ExtendedReal {
        ExtendedReal::ONE
    }

    fn symmetric_distance(&self, a: &ExtendedReal, b: &ExtendedReal, unit: &ExtendedReal) -> f64 {
        extended_distance(*a, *b, *unit)
    }

    fn is_bounded_element(&self, a: &ExtendedReal) -> bool {
        a.is_finite()
    }
}

impl NormedCone for Euclidean {
    fn canonical_unit(&self) -> VectorElement {
        VectorElement::splat(self.dim(), 1.0)
    }

    fn symmetric_distance(
        &self,
        a: &VectorElement,
        b: &VectorElement,
        unit: &VectorElement,
    ) -> f64 {
        if a.dim() != self.dim() || b.dim() != self.dim() || unit.dim() != self.dim() {
            return f64::INFINITY;
        }
        a.coords()
            .iter()
            .zip(b.coords())
            .zip(unit.coords())
            .map(|((x, y), u)| {
                let d = (x - y).abs();
                if d == 0.0 {
                    0.0
                } else if *u > 0.0 {
                    d / u
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }

    fn is_bounded_element(&self, _a: &VectorElement) -> bool {
        true
    }
}

impl NormedCone for FunctionCone {
    fn canonical_unit(&self) -> FunctionElement {
        self.constant(ExtendedReal::ONE)
    }

    fn symmetric_distance(
        &self,
        a: &FunctionElement,
        b: &FunctionElement,
        unit: &FunctionElement,
    ) -> f64 {
        self.domain()
            .iter()
            .map(|k| match (a.get(k), b.get(k), unit.get(k)) {
                (Some(x), Some(y), Some(u)) => extended_distance(x, y, u),
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }

    fn is_bounded_element(&self, a: &FunctionElement) -> bool {
        a.values().values().all(|v| v.is_finite())
    }
}

/// Converts a neighborhood scale to the cone element it denotes.
pub fn realize<C: Cone>(
    cone: &C,
    v: &NeighborhoodScale<C::Elem>,
) -> Result<C::Elem, TopologyError> {
    match v {
        NeighborhoodScale::Xi(eps) => {
            check_magnitude(*eps)?;
            cone.xi_element(*eps)
                .ok_or(TopologyError::NotRealizable(cone.name()))
        }
        NeighborhoodScale::Uc { lambda, generator } => {
            check_magnitude(*lambda)?;
            let zero = cone.zero();
            if !cone.leq(&zero, generator) || *generator == zero || !cone.contains(generator) {
                return Err(TopologyError::NonPositiveGenerator);
            }
            Ok(cone.scale(*lambda, generator)?)
        }
    }
}

/// `b ∈ v(a)`, i.e. `b ≤ a + v`.
pub fn in_upper<C: Cone>(
    cone: &C,
    b: &C::Elem,
    a: &C::Elem,
    v: &NeighborhoodScale<C::Elem>,
) -> Result<bool, TopologyError> {
    let v = realize(cone, v)?;
    Ok(cone.leq(b, &cone.add(a, &v)?))
}

/// `b ∈ (a)v`, i.e. `a ≤ b + v`.
pub fn in_lower<C: Cone>(
    cone: &C,
    b: &C::Elem,
    a: &C::Elem,
    v: &NeighborhoodScale<C::Elem>,
) -> Result<bool, TopologyError> {
    let v = realize(cone, v)?;
    Ok(cone.leq(a, &cone.add(b, &v)?))
}

/// `b ∈ v(a)v`.
pub fn in_symmetric<C: Cone>(
    cone: &C,
    b: &C::Elem,
    a: &C::Elem,
    v: &NeighborhoodScale<C::Elem>,
) -> Result<bool, TopologyError> {
    Ok(in_upper(cone, b, a, v)? && in_lower(cone, b, a, v)?)
}

pub const NBHD_UPPER_HOMOGENEOUS: &str = "λv(a)=(λv)(λa)";
pub const NBHD_LOWER_HOMOGENEOUS: &str = "λ(a)v=(λa)(λv)";
pub const NBHD_SYMMETRIC_HOMOGENEOUS: &str = "λv(a)v=(λv)(λa)(λv)";
pub const NBHD_UPPER_TRANSLATION: &str = "v(a)+b⊆v(a+b)";
pub const NBHD_LOWER_TRANSLATION: &str = "(a)v+b⊆(a+b)v";
pub const NBHD_SYMMETRIC_TRANSLATION: &str = "v(a)v+b⊆v(a+b)v";
pub const NBHD_UPPER_DECREASING: &str = "v(a) decreasing";
pub const NBHD_LOWER_INCREASING: &str = "(a)v increasing";
pub const NBHD_SYMMETRIC_ORDER_CONVEX: &str = "v(a)v order convex";

#[derive(Clone, Copy)]
enum Side {
    Upper,
    Lower,
    Symmetric,
}

fn member<C: Cone>(cone: &C, side: Side, b: &C::Elem, a: &C::Elem, v: &C::Elem) -> Option<bool> {
    let up = || Some(cone.leq(b, &cone.add(a, v).ok()?));
    let low = || Some(cone.leq(a, &cone.add(b, v).ok()?));
    match side {
        Side::Upper => up(),
        Side::Lower => low(),
        Side::Symmetric => Some(up()? && low()?),
    }
}

/// Checks the six neighborhood identities and the shape properties of
/// upper, lower and symmetric neighborhoods on every tuple drawn from
/// `samples`, positive `lambdas` and `scales`.
///
/// Identities (1)–(3) are checked as membership equivalences
/// (`x ∈ λS ⇔ λ⁻¹x ∈ S`), (4)–(6) as implications.
pub fn neighborhood_law_suite<C: Cone>(
    cone: &C,
    samples: &[C::Elem],
    lambdas: &[f64],
    scales: &[NeighborhoodScale<C::Elem>],
) -> Result<LawReport<C::Elem>, TopologyError> {
    if scales.is_empty() {
        return Err(TopologyError::EmptyScales);
    }
    for &l in lambdas {
        check_magnitude(l)?;
    }
    let realized = scales
        .iter()
        .map(|v| {
            let lambda_vs = lambdas
                .iter()
                .map(|&l| realize(cone, &v.scaled(l)?))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((v.magnitude(), realize(cone, v)?, lambda_vs))
        })
        .collect::<Result<Vec<_>, TopologyError>>()?;

    let sides = [Side::Upper, Side::Lower, Side::Symmetric];
    let names_hom = [
        NBHD_UPPER_HOMOGENEOUS,
        NBHD_LOWER_HOMOGENEOUS,
        NBHD_SYMMETRIC_HOMOGENEOUS,
    ];
    let names_tr = [
        NBHD_UPPER_TRANSLATION,
        NBHD_LOWER_TRANSLATION,
        NBHD_SYMMETRIC_TRANSLATION,
    ];
    let mut hom: Vec<Entry<C::Elem>> = names_hom.iter().map(|n| Entry::new(n)).collect();
    let mut tr: Vec<Entry<C::Elem>> = names_tr.iter().map(|n| Entry::new(n)).collect();
    let mut decreasing = Entry::new(NBHD_UPPER_DECREASING);
    let mut increasing = Entry::new(NBHD_LOWER_INCREASING);
    let mut convex = Entry::new(NBHD_SYMMETRIC_ORDER_CONVEX);

    for (mag, v, lambda_vs) in &realized {
        for a in samples {
            for x in samples {
                for (i, side) in sides.iter().enumerate() {
                    for (&l, lv) in lambdas.iter().zip(lambda_vs) {
                        let lhs = cone
                            .scale(1.0 / l, x)
                            .ok()
                            .and_then(|y| member(cone, *side, &y, a, v));
                        let rhs = cone
                            .scale(l, a)
                            .ok()
                            .and_then(|la| member(cone, *side, x, &la, lv));
                        hom[i].record(lhs.is_some() && lhs == rhs, [x, a], &[l, *mag]);
                    }
                    if member(cone, *side, x, a, v) == Some(true) {
                        for b in samples {
                            let holds = match (cone.add(x, b), cone.add(a, b)) {
                                (Ok(xb), Ok(ab)) => member(cone, *side, &xb, &ab, v) == Some(true),
                                _ => false,
                            };
                            tr[i].record(holds, [x, a, b], &[*mag]);
                        }
                    }
                }

                let x_up = member(cone, Side::Upper, x, a, v) == Some(true);
                let x_low = member(cone, Side::Lower, x, a, v) == Some(true);
                for y in samples {
                    if x_up && cone.leq(y, x) {
                        let ok = member(cone, Side::Upper, y, a, v) == Some(true);
                        decreasing.record(ok, [y, a, x], &[*mag]);
                    }
                    if x_low && cone.leq(x, y) {
                        let ok = member(cone, Side::Lower, y, a, v) == Some(true);
                        increasing.record(ok, [y, a, x], &[*mag]);
                    }
                    if x_up && x_low && cone.leq(x, y) {
                        for z in samples {
                            if cone.leq(y, z)
                                && member(cone, Side::Symmetric, z, a, v) == Some(true)
                            {
                                let ok = member(cone, Side::Symmetric, y, a, v) == Some(true);
                                convex.record(ok, [x, y, z], &[*mag]);
                            }
                        }
                    }
                }
            }
        }
    }

    let entries = hom
        .into_iter()
        .chain(tr)
        .chain([decreasing, increasing, convex])
        .map(Entry::finish)
        .collect();
    Ok(LawReport {
        cone: cone.name(),
        entries,
    })
}

struct Entry<E> {
    law: &'static str,
    checked: usize,
    witness: Option<Witness<E>>,
}

impl<E: Clone> Entry<E> {
    fn new(law: &'static str) -> Self {
        Entry {
            law,
            checked: 0,
            witness: None,
        }
    }

    fn record<const N: usize>(&mut self, holds: bool, elements: [&E; N], scalars: &[f64]) {
        self.checked += 1;
        if !holds && self.witness.is_none() {
            self.witness = Some(Witness {
                elements: elements.into_iter().cloned().collect(),
                scalars: scalars.to_vec(),
            });
        }
    }

    fn finish(self) -> LawEntry<E> {
        LawEntry {
            law: self.law,
            passed: self.witness.is_none(),
            checked: self.checked,
            witness: self.witness,
        }
    }
}

/// Semi-decides `b ∈ ā = ∩ v(a)` by testing every supplied scale.
pub fn closure_contains<C: Cone>(
    cone: &C,
    b: &C::Elem,
    a: &C::Elem,
    scales: &[NeighborhoodScale<C::Elem>],
) -> Result<bool, TopologyError> {
    if scales.is_empty() {
        return Err(TopologyError::EmptyScales);
    }
    for v in scales {
        if !in_upper(cone, b, a, v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of [`separated_witness`].
#[derive(Debug, Clone, PartialEq)]
pub enum Separation<E> {
    /// Not both `a ≤ b + v` and `b ≤ a + v` hold at this scale.
    Distinguished(NeighborhoodScale<E>),
    /// Every supplied scale failed to tell the pair apart.
    Indistinguishable,
    /// `a = b`; there is nothing to separate.
    Identical,
}

/// Returns the first (coarsest) supplied scale at which `a` and `b` are not
/// in each other's symmetric neighborhood.
pub fn separated_witness<C: Cone>(
    cone: &C,
    a: &C::Elem,
    b: &C::Elem,
    scales: &[NeighborhoodScale<C::Elem>],
) -> Result<Separation<C::Elem>, TopologyError> {
    if a == b {
        return Ok(Separation::Identical);
    }
    for v in scales {
        if !in_symmetric(cone, a, b, v)? {
            return Ok(Separation::Distinguished(v.clone()));
        }
    }
    Ok(Separation::Indistinguishable)
}

/// A value located by bisection and the width of its final bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeResult {
    pub value: f64,
    pub bracket_width: f64,
}

/// Least `ρ ≥ 0` with `0 ≤ a + ρv`, by doubling then bisection to `tol`.
///
/// Returns `0` when `0 ≤ a` already. The returned value always satisfies
/// the inequality.
pub fn lower_bound_rho<C: Cone>(
    cone: &C,
    a: &C::Elem,
    v: &NeighborhoodScale<C::Elem>,
    tol: f64,
) -> Result<GaugeResult, TopologyError> {
    if !(tol > 0.0) {
        return Err(TopologyError::InvalidTolerance(tol));
    }
    let v = realize(cone, v)?;
    let zero = cone.zero();
    let holds = |rho: f64| -> bool {
        cone.scale(rho, &v)
            .and_then(|rv| cone.add(a, &rv))
            .map(|s| cone.leq(&zero, &s))
            .unwrap_or(false)
    };
    if cone.leq(&zero, a) {
        return Ok(GaugeResult {
            value: 0.0,
            bracket_width: 0.0,
        });
    }
    let mut hi = 1.0;
    while !holds(hi) {
        hi *= 2.0;
        if hi > BRACKET_MAX {
            return Err(TopologyError::CapExceeded { cap: BRACKET_MAX });
        }
    }
    let mut lo = if hi == 1.0 { 0.0 } else { hi / 2.0 };
    let mut steps = 0;
    while hi - lo > tol && steps < MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
    }
    Ok(GaugeResult {
        value: hi,
        bracket_width: hi - lo,
    })
}

/// Result of [`boundedness_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct Boundedness {
    /// `0 ≤ a + ρv` solvable for every scale.
    pub lower: bool,
    /// `a ≤ λv` solvable for every scale.
    pub upper: bool,
    pub bounded: bool,
    /// `2⁻ⁿa` enters and stays in `v(0)v` within the horizon, per scale:
    /// the first index from which it stays.
    pub null_sequence_entry: Vec<Option<u32>>,
    /// Whether the null-sequence criterion matches `bounded`.
    pub criteria_agree: bool,
}

impl Boundedness {
    pub fn null_sequence_converges(&self) -> bool {
        self.null_sequence_entry.iter().all(Option::is_some)
    }
}

/// Decides lower and upper boundedness of `a` against every scale and
/// cross-checks the result with the null-sequence characterization: `a` is
/// bounded iff `λₙa → 0` symmetrically for a null sequence `λₙ`, here
/// `λₙ = 2⁻ⁿ` for `n = 1..=horizon`.
pub fn boundedness_check<C: Cone>(
    cone: &C,
    a: &C::Elem,
    scales: &[NeighborhoodScale<C::Elem>],
    horizon: u32,
) -> Result<Boundedness, TopologyError> {
    if scales.is_empty() {
        return Err(TopologyError::EmptyScales);
    }
    let zero = cone.zero();
    let mut lower = true;
    let mut upper = true;
    let mut entries = Vec::with_capacity(scales.len());
    for v in scales {
        match lower_bound_rho(cone, a, v, DEFAULT_GAUGE_TOL) {
            Ok(_) => {}
            Err(TopologyError::CapExceeded { .. }) => lower = false,
            Err(e) => return Err(e),
        }
        let top = realize(cone, &v.scaled(BRACKET_MAX)?)?;
        upper &= cone.leq(a, &top);

        let mut entry = None;
        for n in 1..=horizon {
            let term = cone.scale(0.5f64.powi(n as i32), a)?;
            if in_symmetric(cone, &term, &zero, v)? {
                entry.get_or_insert(n);
            } else {
                entry = None;
            }
        }
        entries.push(entry);
    }
    let bounded = lower && upper;
    let converges = entries.iter().all(Option::is_some);
    Ok(Boundedness {
        lower,
        upper,
        bounded,
        null_sequence_entry: entries,
        criteria_agree: converges == bounded,
    })
}

/// The uc-cone gauge `q(a) = inf{μ > 0 : μ⁻¹a ∈ w(0)w}`, by bisection of
/// the (up-closed) membership predicate over `[2⁻⁶⁰, 2⁶⁰]`.
///
/// Returns the final bracket midpoint, `0` if membership already holds at
/// the lower end, and `+∞` if it fails at the upper end.
pub fn gauge<C: Cone>(
    cone: &C,
    a: &C::Elem,
    w: &C::Elem,
    tol: f64,
) -> Result<GaugeResult, TopologyError> {
    if !(tol > 0.0) {
        return Err(TopologyError::InvalidTolerance(tol));
    }
    let unit = realize(
        cone,
        &NeighborhoodScale::Uc {
            lambda: 1.0,
            generator: w.clone(),
        },
    )?;
    let zero = cone.zero();
    let inside = |mu: f64| -> bool {
        match cone.scale(1.0 / mu, a) {
            Ok(b) => member(cone, Side::Symmetric, &b, &zero, &unit) == Some(true),
            Err(_) => false,
        }
    };
    let (mut lo, mut hi) = (BRACKET_MIN, BRACKET_MAX);
    if inside(lo) {
        return Ok(GaugeResult {
            value: 0.0,
            bracket_width: lo,
        });
    }
    if !inside(hi) {
        return Ok(GaugeResult {
            value: f64::INFINITY,
            bracket_width: f64::INFINITY,
        });
    }
    let mut steps = 0;
    while hi - lo > tol && steps < MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
    }
    Ok(GaugeResult {
        value: 0.5 * (lo + hi),
        bracket_width: hi - lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: ExtendedReal = ExtendedReal::PosInf;

    fn er(x: f64) -> ExtendedReal {
        ExtendedReal::finite(x)
    }

    fn xi(e: f64) -> NeighborhoodScale<ExtendedReal> {
        NeighborhoodScale::xi(e).unwrap()
    }

    fn vec2(a: f64, b: f64) -> VectorElement {
        VectorElement::new(vec![a, b]).unwrap()
    }

    #[test]
    fn membership_examples() {
        let c = ExtendedReals;
        assert!(in_upper(&c, &er(1.5), &er(1.0), &xi(1.0)).unwrap());
        assert!(!in_upper(&c, &INF, &er(1.0), &xi(1.0)).unwrap());
        assert!(in_upper(&c, &er(0.0), &INF, &xi(1.0)).unwrap());
        assert!(in_lower(&c, &er(0.5), &er(1.0), &xi(1.0)).unwrap());
        assert!(!in_symmetric(&c, &er(3.0), &er(1.0), &xi(1.0)).unwrap());

        let r2 = Euclidean::new(2).unwrap();
        let v = NeighborhoodScale::uc(1.0, vec2(1.0, 1.0)).unwrap();
        assert!(in_symmetric(&r2, &vec2(1.0, 1.0), &vec2(1.5, 0.5), &v).unwrap());
    }

    #[test]
    fn realization_errors() {
        let r2 = Euclidean::new(2).unwrap();
        assert_eq!(
            in_upper(
                &r2,
                &vec2(0.0, 0.0),
                &vec2(0.0, 0.0),
                &NeighborhoodScale::Xi(1.0)
            ),
            Err(TopologyError::NotRealizable("vector"))
        );
        let bad = NeighborhoodScale::uc(1.0, vec2(-1.0, 1.0)).unwrap();
        assert_eq!(
            in_upper(&r2, &vec2(0.0, 0.0), &vec2(0.0, 0.0), &bad),
            Err(TopologyError::NonPositiveGenerator)
        );
        assert!(NeighborhoodScale::<ExtendedReal>::xi(0.0).is_err());
        assert!(NeighborhoodScale::<ExtendedReal>::xi(f64::NAN).is_err());
    }

    #[test]
    fn order_convexity_example() {
        let c = ExtendedReals;
        let (a, v) = (er(1.0), xi(1.0));
        assert!(in_symmetric(&c, &er(0.5), &a, &v).unwrap());
        assert!(in_symmetric(&c, &er(1.5), &a, &v).unwrap());
        assert!(in_symmetric(&c, &er(1.0), &a, &v).unwrap());
    }

    #[test]
    fn closure_examples() {
        let c = ExtendedReals;
        let ladder = xi_ladder(DEFAULT_LADDER_DEPTH);
        assert!(closure_contains(&c, &er(1.0), &er(1.0), &ladder).unwrap());
        assert!(closure_contains(&c, &er(0.999), &er(1.0), &ladder).unwrap());
        assert!(!closure_contains(&c, &er(1.001), &er(1.0), &ladder).unwrap());
        assert_eq!(
            closure_contains(&c, &er(1.0), &er(1.0), &[]),
            Err(TopologyError::EmptyScales)
        );
    }

    #[test]
    fn separation_examples() {
        let c = ExtendedReals;
        let ladder = xi_ladder(DEFAULT_LADDER_DEPTH);
        assert_eq!(
            separated_witness(&c, &er(1.0), &er(2.0), &ladder).unwrap(),
            Separation::Distinguished(xi(0.5))
        );
        assert_eq!(
            separated_witness(&c, &er(3.0), &INF, &ladder).unwrap(),
            Separation::Distinguished(xi(1.0))
        );
        assert_eq!(
            separated_witness(&c, &er(3.0), &er(3.0), &ladder).unwrap(),
            Separation::Identical
        );
        assert_eq!(
            separated_witness(&c, &er(1.0), &er(1.0 + 1e-9), &ladder).unwrap(),
            Separation::Indistinguishable
        );
    }

    #[test]
    fn lower_bound_examples() {
        let c = ExtendedReals;
        let r = lower_bound_rho(&c, &er(-3.0), &xi(1.0), 1e-9).unwrap();
        assert!((r.value - 3.0).abs() <= 1e-9);
        assert_eq!(
            lower_bound_rho(&c, &er(5.0), &xi(1.0), 1e-9).unwrap().value,
            0.0
        );

        let r2 = Euclidean::new(2).unwrap();
        let v = NeighborhoodScale::uc(1.0, vec2(1.0, 1.0)).unwrap();
        let r = lower_bound_rho(&r2, &vec2(-1.0, 2.0), &v, 1e-9).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-9);
        assert!(lower_bound_rho(&c, &er(-3.0), &xi(1.0), 0.0).is_err());
    }

    #[test]
    fn lower_bound_cap() {
        let r = lower_bound_rho(&ExtendedReals, &er(-1e300), &xi(1.0), 1e-9);
        assert!(matches!(r, Err(TopologyError::CapExceeded { .. })));
    }

    #[test]
    fn boundedness_examples() {
        let c = ExtendedReals;
        let ladder = xi_ladder(DEFAULT_LADDER_DEPTH);
        let b = boundedness_check(&c, &er(7.0), &ladder, DEFAULT_NULL_HORIZON).unwrap();
        assert!(b.bounded && b.null_sequence_converges() && b.criteria_agree);

        let b = boundedness_check(&c, &INF, &ladder, DEFAULT_NULL_HORIZON).unwrap();
        assert!(!b.upper && !b.bounded);
        assert!(!b.null_sequence_converges() && b.criteria_agree);

        let b = boundedness_check(&c, &er(0.0), &ladder, DEFAULT_NULL_HORIZON).unwrap();
        assert!(b.bounded && b.criteria_agree);
        assert_eq!(b.null_sequence_entry[0], Some(1));
    }

    #[test]
    fn gauge_examples() {
        let r2 = Euclidean::new(2).unwrap();
        let g = gauge(&r2, &vec2(3.0, -4.0), &vec2(1.0, 1.0), 1e-9).unwrap();
        assert!((g.value - 4.0).abs() <= 1e-9, "{g:?}");
        assert!(g.bracket_width <= 1e-9);

        let c = ExtendedReals;
        assert_eq!(gauge(&c, &er(0.0), &er(1.0), 1e-9).unwrap().value, 0.0);
        assert_eq!(
            gauge(&c, &INF, &er(1.0), 1e-9).unwrap().value,
            f64::INFINITY
        );
        assert!((gauge(&c, &er(-5.0), &er(1.0), 1e-9).unwrap().value - 5.0).abs() <= 1e-9);
        assert!(gauge(&c, &er(1.0), &er(1.0), 0.0).is_err());
    }

    /// Oracle: scan a dense μ grid for the first member of the predicate.
    #[test]
    fn gauge_matches_grid_scan() {
        let r2 = Euclidean::new(2).unwrap();
        let a = vec2(3.0, -4.0);
        let w = vec2(1.0, 1.0);
        let zero = r2.zero();
        let v = NeighborhoodScale::uc(1.0, w.clone()).unwrap();
        let first = (1..=10_000)
            .map(|k| f64::from(k) * 1e-3)
            .find(|&mu| in_symmetric(&r2, &r2.scale(1.0 / mu, &a).unwrap(), &zero, &v).unwrap())
            .unwrap();
        let g = gauge(&r2, &a, &w, 1e-9).unwrap().value;
        assert!(
            first >= g - 1e-9 && first - g <= 1e-3 + 1e-9,
            "scan {first} vs gauge {g}"
        );
    }

    #[test]
    fn gauge_agrees_with_closed_form_distance() {
        let r3 = Euclidean::new(3).unwrap();
        let w = VectorElement::new(vec![1.0, 2.0, 0.5]).unwrap();
        let a = VectorElement::new(vec![0.3, -1.7, 0.2]).unwrap();
        let g = gauge(&r3, &a, &w, 1e-12).unwrap().value;
        let d = r3.symmetric_distance(&a, &r3.zero(), &w);
        assert!((g - d).abs() <= 1e-12, "{g} vs {d}");
    }

    #[test]
    fn scale_helpers() {
        let v = xi(2.0);
        assert_eq!(v.scaled(0.5).unwrap(), xi(1.0));
        assert_eq!(v.unit(), xi(1.0));
        assert!(v.scaled(-1.0).is_err());
        let ladder: Vec<NeighborhoodScale<ExtendedReal>> = xi_ladder(3);
        assert_eq!(ladder.len(), 4);
        assert_eq!(ladder[3].magnitude(), 0.125);
    }

    #[test]
    fn law_suite_on_small_grid() {
        let c = ExtendedReals;
        let samples: Vec<_> = [-1.0, 0.0, 0.5, 1.0, 2.0]
            .into_iter()
            .map(er)
            .chain([INF])
            .collect();
        let r = neighborhood_law_suite(&c, &samples, &[0.5, 2.0], &xi_ladder(3)).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.entries.len(), 9);
    }

    #[test]
    fn law_suite_detects_inconsistent_realization() {
        // A cone whose ξ-embedding is not homogeneous breaks identity (1).
        #[derive(Debug)]
        struct Skewed;
        impl Cone for Skewed {
            type Elem = ExtendedReal;
            fn name(&self) -> &'static str {
                "skewed"
            }
            fn zero(&self) -> ExtendedReal {
                ExtendedReal::ZERO
            }
            fn add(&self, a: &ExtendedReal, b: &ExtendedReal) -> Result<ExtendedReal, ConeError> {
                Ok(*a + *b)
            }
            fn scale(&self, l: f64, a: &ExtendedReal) -> Result<ExtendedReal, ConeError> {
                a.scale(l)
            }
            fn leq(&self, a: &ExtendedReal, b: &ExtendedReal) -> bool {
                a.leq(*b)
            }
            fn xi_element(&self, eps: f64) -> Option<ExtendedReal> {
                Some(ExtendedReal::finite(eps.sqrt()))
            }
        }
        let samples: Vec<_> = [-1.0, 0.0, 0.5, 1.0, 2.0].into_iter().map(er).collect();
        let r = neighborhood_law_suite(&Skewed, &samples, &[4.0], &xi_ladder(2)).unwrap();
        assert!(!r.entry(NBHD_UPPER_HOMOGENEOUS).unwrap().passed);
    }
}
