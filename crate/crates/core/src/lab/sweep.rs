use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_perturbed, make_quadratic, noise_budget, LabError, NoiseKind, NoiseModel};
use crate::cone::{Euclidean, ExtendedReal, ExtendedReals, VectorElement};
use crate::samples::{
    structured_samples, DEFAULT_PAIRS, DEFAULT_POINTS, DEFAULT_RADIUS, MAX_SAMPLE_RADIUS,
};
use crate::stability::{
    stabilize, verify_quadratic_laws, ApproxQuadraticMap, StabilizeOptions, StructuredSamples,
    DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use crate::topology::NeighborhoodScale;

/// Quadratic-law tolerance as a multiple of the stabilization tolerance;
/// the parallelogram law combines six `Q` values, each within `tol`.
pub const LAW_TOL_FACTOR: f64 = 8.0;

const SAMPLE_STREAM: u64 = 0x5A4D_504C_4553_0001;
const NOISE_STREAM: u64 = 0x4E4F_4953_4500_0002;

/// A noise kind with amplitude `fraction · ε/6`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub fraction: f64,
}

impl NoiseSpec {
    pub fn full(kind: NoiseKind) -> Self {
        NoiseSpec {
            kind,
            fraction: 1.0,
        }
    }

    fn cmp_key(&self, other: &Self) -> Ordering {
        self.kind
            .cmp(&other.kind)
            .then(self.fraction.total_cmp(&other.fraction))
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.fraction == 1.0 || self.kind == NoiseKind::Exact {
            write!(f, "{}", self.kind)
        } else {
            write!(f, "{}@{}", self.kind, self.fraction)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub epsilons: Vec<f64>,
    pub dimensions: Vec<usize>,
    pub seeds: Vec<u64>,
    pub noises: Vec<NoiseSpec>,
    pub tol: f64,
    pub max_iter: u32,
    /// Sample points per cell.
    pub points: usize,
    /// Sample pairs per cell, used for validation and the parallelogram law.
    pub pairs: usize,
    pub radius: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            epsilons: vec![0.06, 0.6, 6.0],
            dimensions: vec![1, 2, 3],
            seeds: (1..=5).collect(),
            noises: vec![
                NoiseSpec::full(NoiseKind::Sine),
                NoiseSpec::full(NoiseKind::SeededHash),
            ],
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            points: DEFAULT_POINTS,
            pairs: DEFAULT_PAIRS,
            radius: DEFAULT_RADIUS,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), LabError> {
        let bad = |msg: String| Err(LabError::InvalidConfig(msg));
        if self.epsilons.is_empty()
            || self.dimensions.is_empty()
            || self.seeds.is_empty()
            || self.noises.is_empty()
        {
            return bad("epsilon, dimension, seed and noise lists must be non-empty".into());
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return bad(format!("epsilon must be positive, got {e}"));
        }
        if self.dimensions.contains(&0) {
            return bad("dimension must be at least 1".into());
        }
        if let Some(n) = self
            .noises
            .iter()
            .find(|n| !(n.fraction.is_finite() && n.fraction >= 0.0))
        {
            return bad(format!(
                "noise fraction must be non-negative, got {}",
                n.fraction
            ));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.points == 0 {
            return bad("points must be positive".into());
        }
        if !(self.radius > 0.0 && self.radius <= MAX_SAMPLE_RADIUS) {
            return bad(format!(
                "radius must lie in (0, {MAX_SAMPLE_RADIUS}], got {}",
                self.radius
            ));
        }
        Ok(())
    }

    /// All `(ε, d, seed, noise)` combinations in report order.
    pub fn cells(&self) -> Vec<SweepCell> {
        let mut cells = Vec::new();
        for &epsilon in &self.epsilons {
            for &dimension in &self.dimensions {
                for &seed in &self.seeds {
                    for &noise in &self.noises {
                        cells.push(SweepCell {
                            epsilon,
                            dimension,
                            seed,
                            noise,
                        });
                    }
                }
            }
        }
        cells.sort_by(SweepCell::cmp_key);
        cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub epsilon: f64,
    pub dimension: usize,
    pub seed: u64,
    pub noise: NoiseSpec,
}

/// Everything needed to stabilize one cell.
pub struct CellSetup {
    pub map: ApproxQuadraticMap<Euclidean, ExtendedReals>,
    pub samples: StructuredSamples<VectorElement>,
    /// The sample points closed under the combinations the laws need.
    pub points: Vec<VectorElement>,
    pub scale: NeighborhoodScale<ExtendedReal>,
}

impl SweepCell {
    fn cmp_key(a: &Self, b: &Self) -> Ordering {
        a.epsilon
            .total_cmp(&b.epsilon)
            .then(a.dimension.cmp(&b.dimension))
            .then(a.seed.cmp(&b.seed))
            .then(a.noise.cmp_key(&b.noise))
    }

    pub fn noise_model(&self) -> NoiseModel {
        let amplitude = self.noise.fraction * noise_budget(self.epsilon);
        match self.noise.kind {
            NoiseKind::Exact => NoiseModel::none(),
            NoiseKind::ConstantOffset => NoiseModel::ConstantOffset(amplitude),
            NoiseKind::Sine => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ NOISE_STREAM);
                NoiseModel::Sine {
                    amplitude,
                    frequency: (0..self.dimension)
                        .map(|_| rng.gen_range(0.5..3.0))
                        .collect(),
                }
            }
            NoiseKind::SeededHash => NoiseModel::SeededHash {
                amplitude,
                seed: self.seed ^ NOISE_STREAM,
            },
        }
    }

    pub fn setup(&self, config: &SweepConfig) -> Result<CellSetup, LabError> {
        let q0 = make_quadratic(self.dimension, self.seed)?;
        let samples = structured_samples(
            self.dimension,
            config.points,
            config.pairs,
            config.radius,
            self.seed ^ SAMPLE_STREAM,
        )?;
        let map = build_perturbed(&q0, self.noise_model(), self.epsilon, &samples.pairs)?;
        let points = samples.required_points(map.domain())?;
        Ok(CellSetup {
            map,
            samples,
            points,
            scale: NeighborhoodScale::xi(self.epsilon)?,
        })
    }

    fn failure(&self, error: &LabError) -> SweepRecord {
        SweepRecord {
            epsilon: self.epsilon,
            dimension: self.dimension,
            seed: self.seed,
            noise: self.noise.to_string(),
            lambda: f64::NAN,
            gamma: f64::NAN,
            iterations: 0,
            max_gap: f64::NAN,
            bound: f64::NAN,
            slope: None,
            pass: false,
            error: Some(error.to_string()),
        }
    }
}

/// One row of a sweep report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub epsilon: f64,
    pub dimension: usize,
    pub seed: u64,
    pub noise: String,
    pub lambda: f64,
    pub gamma: f64,
    pub iterations: u32,
    /// `sup_x |Q(x) − f(x)|` over the cell's samples.
    pub max_gap: f64,
    /// `γε`.
    pub bound: f64,
    /// Fitted slope of the log successive differences.
    pub slope: Option<f64>,
    pub pass: bool,
    /// Why a cell failed to run; not part of the report.
    #[serde(skip)]
    pub error: Option<String>,
}

/// Runs one cell; any failure becomes a failing record.
pub fn run_cell(cell: &SweepCell, config: &SweepConfig) -> SweepRecord {
    try_cell(cell, config).unwrap_or_else(|e| cell.failure(&e))
}

fn try_cell(cell: &SweepCell, config: &SweepConfig) -> Result<SweepRecord, LabError> {
    let setup = cell.setup(config)?;
    let opts = StabilizeOptions {
        tol: config.tol,
        max_iter: config.max_iter,
        validation_pairs: Some(setup.samples.pairs.clone()),
    };
    let result = stabilize(&setup.map, &setup.points, &setup.scale, &opts)?;
    let laws = verify_quadratic_laws(
        setup.map.domain(),
        setup.map.codomain(),
        &result.q_values,
        &setup.samples,
        LAW_TOL_FACTOR * config.tol,
    )?;
    let cert = result.certificate;
    let bound = cert.bound();
    Ok(SweepRecord {
        epsilon: cell.epsilon,
        dimension: cell.dimension,
        seed: cell.seed,
        noise: cell.noise.to_string(),
        lambda: cert.lambda,
        gamma: cert.gamma,
        iterations: cert.iterations,
        max_gap: result.max_sandwich_gap,
        bound,
        slope: result.log_slope(),
        pass: result.max_sandwich_gap <= bound + config.tol
            && result.sandwich_holds
            && laws.passed(),
        error: None,
    })
}

/// Runs every cell in parallel; records come back sorted by
/// `(ε, d, seed, noise)`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>, LabError> {
    config.validate()?;
    let cells = config.cells();
    let mut records: Vec<(SweepCell, SweepRecord)> = cells
        .par_iter()
        .map(|c| (*c, run_cell(c, config)))
        .collect();
    records.sort_by(|a, b| SweepCell::cmp_key(&a.0, &b.0));
    Ok(records.into_iter().map(|(_, r)| r).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(noises: Vec<NoiseSpec>) -> SweepConfig {
        SweepConfig {
            epsilons: vec![0.6],
            dimensions: vec![1],
            seeds: vec![1],
            noises,
            points: 48,
            pairs: 64,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn constant_offset_closed_form() {
        let recs = run_sweep(&small(vec![NoiseSpec::full(NoiseKind::ConstantOffset)])).unwrap();
        let r = &recs[0];
        assert!(r.pass, "{r:?}");
        // c = ε/6, so λ = |c|/ε = 1/6
        assert!((r.lambda - 1.0 / 6.0).abs() < 1e-9);
        assert_eq!(r.gamma, (r.lambda + 2.0) / 3.0);
        assert!((r.max_gap - 0.1).abs() < 1e-9);
    }

    #[test]
    fn exact_quadratic_cell() {
        let recs = run_sweep(&small(vec![NoiseSpec::full(NoiseKind::Exact)])).unwrap();
        let r = &recs[0];
        assert!(r.pass);
        assert_eq!(r.lambda, 0.0);
        assert_eq!(r.gamma, 2.0 / 3.0);
        assert!(r.max_gap <= 1e-12);
        assert_eq!(r.slope, None);
    }

    #[test]
    fn over_budget_cell_is_a_fail_row() {
        let spec = NoiseSpec {
            kind: NoiseKind::Sine,
            fraction: 2.0,
        };
        let recs = run_sweep(&small(vec![spec, NoiseSpec::full(NoiseKind::Exact)])).unwrap();
        assert_eq!(recs.len(), 2);
        let bad = recs.iter().find(|r| r.noise == "sine@2").unwrap();
        assert!(!bad.pass);
        assert!(bad.lambda.is_nan());
        assert!(bad.error.as_deref().unwrap().contains("budget"));
    }

    #[test]
    fn invalid_configs() {
        let bad = [
            SweepConfig {
                epsilons: vec![-1.0],
                ..SweepConfig::default()
            },
            SweepConfig {
                dimensions: vec![],
                ..SweepConfig::default()
            },
            SweepConfig {
                radius: 4096.0,
                ..SweepConfig::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err());
        }
    }

    #[test]
    fn cells_are_sorted() {
        let c = SweepConfig {
            epsilons: vec![6.0, 0.06],
            seeds: vec![3, 1],
            ..SweepConfig::default()
        };
        let cells = c.cells();
        assert_eq!(cells.len(), 2 * 3 * 2 * 2);
        assert_eq!(cells[0].epsilon, 0.06);
        assert_eq!(cells[0].seed, 1);
        assert!(cells
            .windows(2)
            .all(|w| SweepCell::cmp_key(&w[0], &w[1]) != Ordering::Greater));
    }
}
