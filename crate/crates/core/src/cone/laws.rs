//! Executable law checks for cones: the eight algebraic axioms and the
//! order-compatibility laws, evaluated exhaustively over finite samples.
//!
//! Default sample sets are a fixed grid plus a seeded batch of random
//! dyadic values, so that every float operation in a check is exact and a
//! failure always points at the structure, never at rounding.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    Cone, Euclidean, ExtendedReal, ExtendedReals, FunctionCone, FunctionElement,
    NonnegExtendedReals, TwoPoint, TwoPointPathology, VectorElement,
};

/// Elements and scalars that falsify a law.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<E> {
    pub elements: Vec<E>,
    pub scalars: Vec<f64>,
}

impl<E: fmt::Debug> fmt::Display for Witness<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, e) in ["a", "b", "c"].iter().zip(&self.elements) {
            write!(f, "{name}={e:?} ")?;
        }
        for (name, s) in ["λ", "μ"].iter().zip(&self.scalars) {
            write!(f, "{name}={s} ")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawEntry<E> {
    pub law: &'static str,
    pub passed: bool,
    pub checked: usize,
    /// First counterexample found, if any.
    pub witness: Option<Witness<E>>,
}

/// Outcome of a law suite, one entry per law.
#[derive(Debug, Clone, PartialEq)]
pub struct LawReport<E> {
    pub cone: &'static str,
    pub entries: Vec<LawEntry<E>>,
}

/// Report over exactly the eight cone axioms.
pub type AxiomReport<E> = LawReport<E>;

impl<E> LawReport<E> {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawEntry<E>> {
        self.entries.iter().filter(|e| !e.passed)
    }

    pub fn entry(&self, law: &str) -> Option<&LawEntry<E>> {
        self.entries.iter().find(|e| e.law == law)
    }
}

impl<E: fmt::Debug> fmt::Display for LawReport<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let status = if e.passed { "pass" } else { "FAIL" };
            write!(
                f,
                "[{}] {status:4} {:<22} ({} cases)",
                self.cone, e.law, e.checked
            )?;
            if let Some(w) = &e.witness {
                write!(f, "  counterexample: {}", w.to_string().trim_end())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub const ADD_ASSOCIATIVE: &str = "a+(b+c)=(a+b)+c";
pub const ADD_COMMUTATIVE: &str = "a+b=b+a";
pub const ADD_NEUTRAL: &str = "a+0=a";
pub const SCALE_DISTRIBUTES_ELEMENTS: &str = "λ(a+b)=λa+λb";
pub const SCALE_DISTRIBUTES_SCALARS: &str = "(λ+μ)a=λa+μa";
pub const SCALE_COMPOSES: &str = "(λμ)a=λ(μa)";
pub const SCALE_ONE: &str = "1a=a";
pub const SCALE_ZERO: &str = "0a=0";

pub const ORDER_REFLEXIVE: &str = "a≤a";
pub const ORDER_TRANSITIVE: &str = "a≤b≤c ⇒ a≤c";
pub const ORDER_ADDITIVE: &str = "a≤b ⇒ a+c≤b+c";
pub const ORDER_SCALAR: &str = "a≤b ⇒ λa≤λb";
pub const ORDER_WEAK_CANCELLATION: &str = "a+c≤b+c ⇒ a+λc≤b+λc";

/// Accumulates the result of one law.
struct Tally<E> {
    law: &'static str,
    checked: usize,
    witness: Option<Witness<E>>,
}

impl<E> Tally<E> {
    fn new(law: &'static str) -> Self {
        Tally {
            law,
            checked: 0,
            witness: None,
        }
    }

    fn record(&mut self, holds: bool, witness: impl FnOnce() -> Witness<E>) {
        self.checked += 1;
        if !holds && self.witness.is_none() {
            self.witness = Some(witness());
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

fn w<E: Clone>(elements: &[&E], scalars: &[f64]) -> Witness<E> {
    Witness {
        elements: elements.iter().map(|e| (*e).clone()).collect(),
        scalars: scalars.to_vec(),
    }
}

/// Evaluates the eight cone axioms on every applicable tuple drawn from
/// `samples` and `scalars`. An operation error counts as a violation.
pub fn check_cone_axioms<C: Cone>(
    cone: &C,
    samples: &[C::Elem],
    scalars: &[f64],
) -> AxiomReport<C::Elem> {
    let zero = cone.zero();
    let add = |a: &C::Elem, b: &C::Elem| cone.add(a, b).ok();
    let scale = |l: f64, a: &C::Elem| cone.scale(l, a).ok();

    let mut assoc = Tally::new(ADD_ASSOCIATIVE);
    let mut comm = Tally::new(ADD_COMMUTATIVE);
    let mut neutral = Tally::new(ADD_NEUTRAL);
    let mut dist_el = Tally::new(SCALE_DISTRIBUTES_ELEMENTS);
    let mut dist_sc = Tally::new(SCALE_DISTRIBUTES_SCALARS);
    let mut compose = Tally::new(SCALE_COMPOSES);
    let mut one = Tally::new(SCALE_ONE);
    let mut annihilate = Tally::new(SCALE_ZERO);

    for a in samples {
        neutral.record(add(a, &zero).as_ref() == Some(a), || w(&[a], &[]));
        one.record(scale(1.0, a).as_ref() == Some(a), || w(&[a], &[]));
        annihilate.record(scale(0.0, a).as_ref() == Some(&zero), || w(&[a], &[]));

        for &l in scalars {
            for &m in scalars {
                let lhs = scale(l + m, a);
                let rhs = scale(l, a).zip(scale(m, a)).and_then(|(x, y)| add(&x, &y));
                dist_sc.record(lhs.is_some() && lhs == rhs, || w(&[a], &[l, m]));

                let lhs = scale(l * m, a);
                let rhs = scale(m, a).and_then(|x| scale(l, &x));
                compose.record(lhs.is_some() && lhs == rhs, || w(&[a], &[l, m]));
            }
        }

        for b in samples {
            let ab = add(a, b);
            comm.record(ab.is_some() && ab == add(b, a), || w(&[a, b], &[]));

            for &l in scalars {
                let lhs = ab.as_ref().and_then(|s| scale(l, s));
                let rhs = scale(l, a).zip(scale(l, b)).and_then(|(x, y)| add(&x, &y));
                dist_el.record(lhs.is_some() && lhs == rhs, || w(&[a, b], &[l]));
            }

            for c in samples {
                let lhs = add(b, c).and_then(|bc| add(a, &bc));
                let rhs = ab.as_ref().and_then(|s| add(s, c));
                assoc.record(lhs.is_some() && lhs == rhs, || w(&[a, b, c], &[]));
            }
        }
    }

    LawReport {
        cone: cone.name(),
        entries: vec![
            assoc.finish(),
            comm.finish(),
            neutral.finish(),
            dist_el.finish(),
            dist_sc.finish(),
            compose.finish(),
            one.finish(),
            annihilate.finish(),
        ],
    }
}

/// Checks reflexivity, transitivity, compatibility with addition and
/// scaling, and weak cancellation (`a+c ≤ b+c` implies `a+εc ≤ b+εc` for the
/// positive entries of `scalars`).
pub fn check_order_laws<C: Cone>(
    cone: &C,
    samples: &[C::Elem],
    scalars: &[f64],
) -> LawReport<C::Elem> {
    let leq = |a: &C::Elem, b: &C::Elem| cone.leq(a, b);
    let add = |a: &C::Elem, b: &C::Elem| cone.add(a, b).ok();
    let scale = |l: f64, a: &C::Elem| cone.scale(l, a).ok();
    let both = |x: Option<C::Elem>, y: Option<C::Elem>| match (x, y) {
        (Some(x), Some(y)) => leq(&x, &y),
        _ => false,
    };

    let mut refl = Tally::new(ORDER_REFLEXIVE);
    let mut trans = Tally::new(ORDER_TRANSITIVE);
    let mut additive = Tally::new(ORDER_ADDITIVE);
    let mut scalar = Tally::new(ORDER_SCALAR);
    let mut weak = Tally::new(ORDER_WEAK_CANCELLATION);

    for a in samples {
        refl.record(leq(a, a), || w(&[a], &[]));
        for b in samples {
            let ab = leq(a, b);
            if ab {
                for &l in scalars {
                    scalar.record(both(scale(l, a), scale(l, b)), || w(&[a, b], &[l]));
                }
            }
            for c in samples {
                if ab && leq(b, c) {
                    trans.record(leq(a, c), || w(&[a, b, c], &[]));
                }
                if ab {
                    additive.record(both(add(a, c), add(b, c)), || w(&[a, b, c], &[]));
                }
                if both(add(a, c), add(b, c)) {
                    for &eps in scalars.iter().filter(|&&s| s > 0.0) {
                        let ec = scale(eps, c);
                        let lhs = ec.as_ref().and_then(|ec| add(a, ec));
                        let rhs = ec.as_ref().and_then(|ec| add(b, ec));
                        weak.record(both(lhs, rhs), || w(&[a, b, c], &[eps]));
                    }
                } else {
                    // vacuous: premise fails
                    weak.checked += 1;
                }
            }
        }
    }

    LawReport {
        cone: cone.name(),
        entries: vec![
            refl.finish(),
            trans.finish(),
            additive.finish(),
            scalar.finish(),
            weak.finish(),
        ],
    }
}

/// Default scalar set for law checks.
pub const DEFAULT_SCALARS: [f64; 6] = [0.0, 0.25, 0.5, 1.0, 2.0, 3.0];

/// Number of seeded random elements appended to each grid.
pub const DEFAULT_RANDOM_BATCH: usize = 8;

/// Cones that can produce deterministic law-check samples.
pub trait LawSamples: Cone {
    fn grid(&self) -> Vec<Self::Elem>;

    fn random_element(&self, rng: &mut ChaCha8Rng) -> Self::Elem;

    /// The grid followed by `DEFAULT_RANDOM_BATCH` seeded random elements.
    fn default_samples(&self, seed: u64) -> Vec<Self::Elem> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = self.grid();
        out.extend((0..DEFAULT_RANDOM_BATCH).map(|_| self.random_element(&mut rng)));
        out
    }
}

/// A random multiple of 1/16 in `[-16, 16]`; sums and dyadic scalings of
/// these are exact in `f64`.
pub fn random_dyadic(rng: &mut ChaCha8Rng) -> f64 {
    f64::from(rng.gen_range(-256i32..=256)) / 16.0
}

fn random_extended(rng: &mut ChaCha8Rng, nonneg: bool) -> ExtendedReal {
    if rng.gen_ratio(1, 8) {
        ExtendedReal::INFINITY
    } else {
        let x = random_dyadic(rng);
        ExtendedReal::finite(if nonneg { x.abs() } else { x })
    }
}

pub const EXTENDED_GRID: [f64; 10] = [
    -4.0,
    -1.5,
    -0.5,
    0.0,
    0.25,
    1.0,
    2.5,
    3.0,
    8.0,
    f64::INFINITY,
];

impl LawSamples for ExtendedReals {
    fn grid(&self) -> Vec<ExtendedReal> {
        EXTENDED_GRID
            .iter()
            .map(|&x| ExtendedReal::new(x).unwrap())
            .collect()
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> ExtendedReal {
        random_extended(rng, false)
    }
}

impl LawSamples for NonnegExtendedReals {
    fn grid(&self) -> Vec<ExtendedReal> {
        EXTENDED_GRID
            .iter()
            .filter(|&&x| x >= 0.0)
            .map(|&x| ExtendedReal::new(x).unwrap())
            .collect()
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> ExtendedReal {
        random_extended(rng, true)
    }
}

impl LawSamples for Euclidean {
    fn grid(&self) -> Vec<VectorElement> {
        let d = self.dim();
        let mut out = vec![
            self.zero(),
            VectorElement::splat(d, 1.0),
            VectorElement::splat(d, -2.5),
        ];
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.5;
            out.push(VectorElement::new(e.clone()).unwrap());
            e[i] = -0.5;
            out.push(VectorElement::new(e).unwrap());
        }
        out
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> VectorElement {
        VectorElement::new((0..self.dim()).map(|_| random_dyadic(rng)).collect()).unwrap()
    }
}

impl LawSamples for FunctionCone {
    fn grid(&self) -> Vec<FunctionElement> {
        let n = self.domain().len();
        let grid = ExtendedReals.grid();
        // staggered picks so that the grid mixes +∞ with finite values
        (0..grid.len())
            .step_by(2)
            .map(|start| {
                let vals: Vec<ExtendedReal> =
                    (0..n).map(|i| grid[(start + 3 * i) % grid.len()]).collect();
                self.element(&vals).unwrap()
            })
            .collect()
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> FunctionElement {
        let vals: Vec<ExtendedReal> = (0..self.domain().len())
            .map(|_| random_extended(rng, false))
            .collect();
        self.element(&vals).unwrap()
    }
}

impl LawSamples for TwoPointPathology {
    fn grid(&self) -> Vec<TwoPoint> {
        vec![TwoPoint::Zero, TwoPoint::One]
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> TwoPoint {
        if rng.gen_bool(0.5) {
            TwoPoint::One
        } else {
            TwoPoint::Zero
        }
    }
}
