//! Box domains and Latin hypercube designs.
//!
//! Model internals work on the unit cube; [`Domain::to_unit`] and
//! [`Domain::from_unit`] move points between physical and normalized space.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box `[lower, upper]` in `d` dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::Domain("domain needs at least one variable".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::Domain(format!(
                "{} lower bounds but {} upper bounds",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::Domain(format!(
                    "variable {}: lower {lo} must be finite and below upper {hi}",
                    i + 1
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval `[lo, hi]` repeated `d` times.
    pub fn hypercube(d: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; d], vec![hi; d])
    }

    pub fn unit(d: usize) -> Self {
        Self {
            lower: vec![0.0; d],
            upper: vec![1.0; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    /// Affine map `(x - lower) / (upper - lower)` per coordinate.
    pub fn to_unit(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        Ok(x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (lo, hi))| (v - lo) / (hi - lo))
            .collect())
    }

    /// Inverse of [`Domain::to_unit`].
    pub fn from_unit(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_len(u)?;
        Ok(u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (lo, hi))| lo + v * (hi - lo))
            .collect())
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(())
    }
}

/// A set of sites inside a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub points: Vec<Vec<f64>>,
    pub domain: Domain,
}

impl Design {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The design mapped onto `[0, 1]^d`.
    pub fn scale_to_unit(&self) -> Vec<Vec<f64>> {
        self.points
            .iter()
            .map(|p| self.domain.to_unit(p).expect("design points match domain dimension"))
            .collect()
    }
}

/// Random-permutation Latin hypercube with uniform jitter inside each stratum.
pub fn lhs(m: usize, domain: &Domain, seed: u64) -> Result<Design> {
    if m == 0 {
        return Err(Error::Input("a Latin hypercube needs at least one point".into()));
    }
    let d = domain.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unit = vec![vec![0.0; d]; m];
    let mut strata: Vec<usize> = (0..m).collect();
    for j in 0..d {
        strata.shuffle(&mut rng);
        for (row, &s) in unit.iter_mut().zip(&strata) {
            let jitter: f64 = rng.random();
            // Clamp keeps the point inside its own stratum when jitter rounds to 1.
            row[j] = ((s as f64 + jitter) / m as f64).min((s as f64 + 1.0 - 1e-12) / m as f64);
        }
    }
    let points = unit
        .iter()
        .map(|u| domain.from_unit(u))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .map(|mut p| {
            for (v, (lo, hi)) in p.iter_mut().zip(domain.lower.iter().zip(&domain.upper)) {
                *v = v.clamp(*lo, *hi);
            }
            p
        })
        .collect();
    Ok(Design {
        points,
        domain: domain.clone(),
    })
}

/// Deterministic child seed for stream `stream` of a base seed (splitmix64 mix).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
