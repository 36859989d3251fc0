use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::LabError;

/// The kind of a bounded perturbation, without its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    Exact,
    ConstantOffset,
    Sine,
    SeededHash,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 4] = [
        NoiseKind::Exact,
        NoiseKind::ConstantOffset,
        NoiseKind::Sine,
        NoiseKind::SeededHash,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Exact => "exact",
            NoiseKind::ConstantOffset => "constant-offset",
            NoiseKind::Sine => "sine",
            NoiseKind::SeededHash => "seeded-hash",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        NoiseKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| LabError::InvalidNoise(format!("unknown noise kind `{s}`")))
    }
}

/// A bounded perturbation `δ: ℝᵈ → ℝ`.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseModel {
    /// `δ(x) = c`.
    ConstantOffset(f64),
    /// `δ(x) = amplitude · sin(ω·x)`.
    Sine { amplitude: f64, frequency: Vec<f64> },
    /// `δ(x) = amplitude · (2u − 1)` with `u ∈ [0, 1)` a hash of `(x, seed)`.
    SeededHash { amplitude: f64, seed: u64 },
}

impl NoiseModel {
    pub fn none() -> Self {
        NoiseModel::ConstantOffset(0.0)
    }

    pub fn kind(&self) -> NoiseKind {
        match self {
            NoiseModel::ConstantOffset(c) if *c == 0.0 => NoiseKind::Exact,
            NoiseModel::ConstantOffset(_) => NoiseKind::ConstantOffset,
            NoiseModel::Sine { .. } => NoiseKind::Sine,
            NoiseModel::SeededHash { .. } => NoiseKind::SeededHash,
        }
    }

    /// An upper bound on `sup |δ|`.
    pub fn sup_norm(&self) -> f64 {
        match self {
            NoiseModel::ConstantOffset(c) => c.abs(),
            NoiseModel::Sine { amplitude, .. } | NoiseModel::SeededHash { amplitude, .. } => {
                amplitude.abs()
            }
        }
    }

    pub fn validate(&self, dim: usize) -> Result<(), LabError> {
        let amp_ok = self.sup_norm().is_finite();
        let freq_ok = match self {
            NoiseModel::Sine { frequency, .. } => {
                if frequency.len() != dim {
                    return Err(LabError::InvalidNoise(format!(
                        "sine frequency has {} components, dimension is {dim}",
                        frequency.len()
                    )));
                }
                frequency.iter().all(|w| w.is_finite())
            }
            _ => true,
        };
        if amp_ok && freq_ok {
            Ok(())
        } else {
            Err(LabError::InvalidNoise(
                "noise parameters must be finite".into(),
            ))
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            NoiseModel::ConstantOffset(c) => *c,
            NoiseModel::Sine {
                amplitude,
                frequency,
            } => {
                let phase: f64 = frequency.iter().zip(x).map(|(w, xi)| w * xi).sum();
                amplitude * phase.sin()
            }
            NoiseModel::SeededHash { amplitude, seed } => {
                amplitude * (2.0 * unit_hash(x, *seed) - 1.0)
            }
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A value in `[0, 1)` determined by the bit patterns of `x` and `seed`.
fn unit_hash(x: &[f64], seed: u64) -> f64 {
    let h = x.iter().fold(splitmix64(seed), |h, xi| {
        splitmix64(h ^ (xi + 0.0).to_bits())
    });
    (h >> 11) as f64 / (1u64 << 53) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_noise_is_bounded_and_deterministic() {
        let n = NoiseModel::SeededHash {
            amplitude: 0.25,
            seed: 9,
        };
        let mut seen_neg = false;
        for k in -200..200 {
            let x = [k as f64 / 8.0, 1.5];
            let v = n.evaluate(&x);
            assert!(v.abs() <= 0.25);
            assert_eq!(v, n.evaluate(&x));
            seen_neg |= v < 0.0;
        }
        assert!(seen_neg);
        assert_eq!(n.evaluate(&[0.0]), n.evaluate(&[-0.0]));
    }

    #[test]
    fn sine_noise() {
        let n = NoiseModel::Sine {
            amplitude: 0.1,
            frequency: vec![1.0],
        };
        assert_eq!(n.evaluate(&[0.0]), 0.0);
        assert!((n.evaluate(&[std::f64::consts::FRAC_PI_2]) - 0.1).abs() < 1e-15);
        assert!(n.validate(1).is_ok());
        assert!(n.validate(2).is_err());
    }

    #[test]
    fn kinds_parse() {
        for k in NoiseKind::ALL {
            assert_eq!(k.name().parse::<NoiseKind>().unwrap(), k);
        }
        assert_eq!(
            "seeded_hash".parse::<NoiseKind>().unwrap(),
            NoiseKind::SeededHash
        );
        assert!("gaussian".parse::<NoiseKind>().is_err());
        assert_eq!(NoiseModel::none().kind(), NoiseKind::Exact);
    }
}
