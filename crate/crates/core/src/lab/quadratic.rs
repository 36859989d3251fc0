use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LabError;

/// `x ↦ xᵀAx` for a symmetric `d×d` matrix `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    dim: usize,
    /// Row-major, exactly symmetric.
    matrix: Vec<f64>,
}

impl QuadraticForm {
    /// Symmetrizes `rows` as `(A + Aᵀ)/2`.
    pub fn new(rows: &[Vec<f64>]) -> Result<Self, LabError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(LabError::InvalidDimension(0));
        }
        if rows.iter().any(|r| r.len() != dim) {
            return Err(LabError::InvalidMatrix("matrix must be square".into()));
        }
        if rows.iter().flatten().any(|a| !a.is_finite()) {
            return Err(LabError::InvalidMatrix("entries must be finite".into()));
        }
        let mut matrix = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                matrix[i * dim + j] = if i == j {
                    rows[i][i]
                } else {
                    0.5 * (rows[i][j] + rows[j][i])
                };
            }
        }
        Ok(QuadraticForm { dim, matrix })
    }

    pub fn identity(dim: usize) -> Result<Self, LabError> {
        let rows: Vec<Vec<f64>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(&rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.matrix.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    /// `xᵀAx`; `x` must have length `dim`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let mut total = 0.0;
        for (i, xi) in x.iter().enumerate() {
            let row = &self.matrix[i * self.dim..(i + 1) * self.dim];
            let dot: f64 = row.iter().zip(x).map(|(a, xj)| a * xj).sum();
            total += xi * dot;
        }
        total
    }
}

/// A seeded symmetric form with entries uniform on `(−1, 1)` before
/// symmetrization.
pub fn make_quadratic(dim: usize, seed: u64) -> Result<QuadraticForm, LabError> {
    if dim == 0 {
        return Err(LabError::InvalidDimension(0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    QuadraticForm::new(&rows)
}
