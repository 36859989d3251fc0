//! Deterministic sample sets on `ℝᵈ`.
//!
//! Coordinates are multiples of `1/64`, so halving, doubling and the Hyers
//! scalings `2ⁿx` stay exact in binary floating point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cone::VectorElement;
use crate::stability::{StabilityError, StructuredSamples};

/// Largest admissible `|xᵢ|`; `2⁴⁰·2¹⁰` stays far inside `f64` range.
pub const MAX_SAMPLE_RADIUS: f64 = 1024.0;
pub const DEFAULT_POINTS: usize = 512;
pub const DEFAULT_PAIRS: usize = 1024;
pub const DEFAULT_RADIUS: f64 = 4.0;
pub const DYADIC_DENOMINATOR: f64 = 64.0;

fn check_radius(radius: f64) -> Result<(), StabilityError> {
    if radius > 0.0 && radius <= MAX_SAMPLE_RADIUS {
        Ok(())
    } else {
        Err(StabilityError::InvalidArgument(format!(
            "sample radius must lie in (0, {MAX_SAMPLE_RADIUS}], got {radius}"
        )))
    }
}

/// `count` seeded points with coordinates `k/64`, `|k/64| ≤ radius`.
pub fn dyadic_points(
    dim: usize,
    count: usize,
    radius: f64,
    seed: u64,
) -> Result<Vec<VectorElement>, StabilityError> {
    check_radius(radius)?;
    if dim == 0 {
        return Err(StabilityError::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    let k_max = (radius * DYADIC_DENOMINATOR).floor() as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let coords = (0..dim)
                .map(|_| rng.gen_range(-k_max..=k_max) as f64 / DYADIC_DENOMINATOR)
                .collect();
            Ok(VectorElement::new(coords)?)
        })
        .collect()
}

/// The one-dimensional grid `lo, lo+step, …, ≤ hi`.
pub fn line_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<VectorElement>, StabilityError> {
    check_radius(lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE))?;
    if !(step > 0.0) || !(lo <= hi) {
        return Err(StabilityError::InvalidArgument(format!(
            "bad grid [{lo}, {hi}] step {step}"
        )));
    }
    let n = ((hi - lo) / step).floor() as usize;
    Ok((0..=n)
        .map(|i| VectorElement::scalar(lo + i as f64 * step))
        .collect())
}

/// `count` seeded pairs drawn from `points`.
pub fn random_pairs(
    points: &[VectorElement],
    count: usize,
    seed: u64,
) -> Vec<(VectorElement, VectorElement)> {
    if points.is_empty() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let i = rng.gen_range(0..points.len());
            let j = rng.gen_range(0..points.len());
            (points[i].clone(), points[j].clone())
        })
        .collect()
}

/// Seeded points plus seeded pairs among them.
pub fn structured_samples(
    dim: usize,
    points: usize,
    pairs: usize,
    radius: f64,
    seed: u64,
) -> Result<StructuredSamples<VectorElement>, StabilityError> {
    let pts = dyadic_points(dim, points, radius, seed)?;
    let prs = random_pairs(&pts, pairs, seed.wrapping_add(1));
    Ok(StructuredSamples {
        points: pts,
        pairs: prs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_are_dyadic_and_bounded() {
        let pts = dyadic_points(3, 100, 4.0, 7).unwrap();
        assert_eq!(pts.len(), 100);
        for p in &pts {
            for c in p.coords() {
                assert!(c.abs() <= 4.0);
                assert_eq!((c * 64.0).fract(), 0.0);
            }
        }
        assert_eq!(pts, dyadic_points(3, 100, 4.0, 7).unwrap());
    }

    #[test]
    fn radius_is_clamped() {
        assert!(dyadic_points(1, 1, 2048.0, 0).is_err());
        assert!(dyadic_points(0, 1, 1.0, 0).is_err());
    }

    #[test]
    fn line_grid_endpoints() {
        let g = line_grid(-5.0, 5.0, 0.5).unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(g[0].coords(), &[-5.0]);
        assert_eq!(g[20].coords(), &[5.0]);
    }
}
