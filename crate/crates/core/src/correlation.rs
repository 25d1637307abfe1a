//! Matérn 5/2 correlation, correlation matrices and their regularized
//! Cholesky factorization.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::kriging::Theta;

/// Nugget values tried in order until the Cholesky factorization succeeds.
pub const NUGGET_LADDER: [f64; 8] = [0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

const SQRT5: f64 = 2.236_067_977_499_79;

/// Matérn 5/2 correlation as a function of the squared scaled distance `a²`.
#[inline]
pub fn matern52_from_sq(a2: f64) -> f64 {
    let s = SQRT5 * a2.sqrt();
    (1.0 + s + 5.0 * a2 / 3.0) * (-s).exp()
}

#[inline]
fn scaled_sq_distance(x: &[f64], x2: &[f64], theta: &[f64]) -> f64 {
    let mut a2 = 0.0;
    for ((u, v), t) in x.iter().zip(x2).zip(theta) {
        let diff = u - v;
        a2 += t * (diff * diff);
    }
    a2
}

/// Correlation between two sites.
pub fn matern52(x: &[f64], x2: &[f64], theta: &Theta) -> Result<f64> {
    let t = theta.values();
    if x.len() != t.len() || x2.len() != t.len() {
        return Err(Error::DimensionMismatch {
            expected: t.len(),
            actual: if x.len() != t.len() { x.len() } else { x2.len() },
        });
    }
    if x.iter().chain(x2).any(|v| !v.is_finite()) {
        return Err(Error::Input("non-finite coordinate in correlation".into()));
    }
    Ok(matern52_from_sq(scaled_sq_distance(x, x2, t)))
}

/// Correlation vector between one query and every site.
pub(crate) fn corr_vector(sites: &[Vec<f64>], x: &[f64], theta: &[f64]) -> DVector<f64> {
    DVector::from_iterator(
        sites.len(),
        sites
            .iter()
            .map(|s| matern52_from_sq(scaled_sq_distance(s, x, theta))),
    )
}

/// Squared coordinate differences for every unordered site pair, cached so
/// that repeated likelihood evaluations only redo the weighted sums.
#[derive(Debug, Clone)]
pub struct PairwiseDistances {
    m: usize,
    d: usize,
    sq: Vec<f64>,
}

impl PairwiseDistances {
    pub fn new(sites: &[Vec<f64>]) -> Self {
        let m = sites.len();
        let d = sites.first().map_or(0, Vec::len);
        let mut sq = Vec::with_capacity(m * m.saturating_sub(1) / 2 * d);
        for i in 0..m {
            for j in (i + 1)..m {
                for (u, v) in sites[i].iter().zip(&sites[j]) {
                    let diff = u - v;
                    sq.push(diff * diff);
                }
            }
        }
        Self { m, d, sq }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Correlation matrix with `nugget` added on the diagonal.
    pub fn correlation(&self, theta: &[f64], nugget: f64) -> DMatrix<f64> {
        let m = self.m;
        let d = self.d;
        let mut r = DMatrix::<f64>::zeros(m, m);
        let mut k = 0;
        for i in 0..m {
            r[(i, i)] = 1.0 + nugget;
            for j in (i + 1)..m {
                let block = &self.sq[k..k + d];
                k += d;
                let mut a2 = 0.0;
                for (t, s) in theta.iter().zip(block) {
                    a2 += t * s;
                }
                let c = matern52_from_sq(a2);
                r[(i, j)] = c;
                r[(j, i)] = c;
            }
        }
        r
    }
}

/// Symmetric, unit-diagonal correlation matrix of a site set.
pub fn corr_matrix(sites: &[Vec<f64>], theta: &Theta) -> DMatrix<f64> {
    PairwiseDistances::new(sites).correlation(theta.values(), 0.0)
}

/// Cholesky factor of `R + nugget·I`.
#[derive(Debug, Clone)]
pub struct Factor {
    chol: Cholesky<f64, Dyn>,
    nugget: f64,
}

impl Factor {
    pub fn nugget(&self) -> f64 {
        self.nugget
    }

    pub fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    /// Lower-triangular factor `L` with `L·Lᵀ = R + nugget·I`.
    pub fn lower(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    /// `ln |R + nugget·I|` from the factor diagonal.
    pub fn ln_det(&self) -> f64 {
        let l = self.chol.l_dirty();
        2.0 * (0..l.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>()
    }

    /// Solves `L z = b`.
    pub fn forward(&self, b: &DVector<f64>) -> DVector<f64> {
        let l = self.chol.l_dirty();
        let n = l.nrows();
        let mut z = b.clone();
        for j in 0..n {
            let zj = z[j] / l[(j, j)];
            z[j] = zj;
            for i in (j + 1)..n {
                z[i] -= l[(i, j)] * zj;
            }
        }
        z
    }

    /// Solves `(R + nugget·I) x = b`.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }
}

fn try_cholesky(r: DMatrix<f64>, nugget: f64) -> Option<Factor> {
    let m = r.nrows();
    let chol = Cholesky::new(r)?;
    // Pivots at rounding level mean the matrix is numerically singular.
    let threshold = m as f64 * f64::EPSILON;
    let l = chol.l_dirty();
    let ok = (0..m).all(|i| {
        let p = l[(i, i)];
        p.is_finite() && p * p > threshold
    });
    ok.then_some(Factor { chol, nugget })
}

/// Factorizes `R + nugget·I` with the smallest ladder nugget that works.
pub fn factorize(r: &DMatrix<f64>) -> Result<Factor> {
    for &nugget in NUGGET_LADDER.iter() {
        let mut candidate = r.clone();
        if nugget > 0.0 {
            for i in 0..candidate.nrows() {
                candidate[(i, i)] += nugget;
            }
        }
        if let Some(f) = try_cholesky(candidate, nugget) {
            return Ok(f);
        }
    }
    Err(Error::SingularCorrelation {
        nugget: NUGGET_LADDER[NUGGET_LADDER.len() - 1],
    })
}

/// Same ladder, but assembling the matrix from cached distances.
pub(crate) fn factorize_cached(dist: &PairwiseDistances, theta: &[f64]) -> Result<Factor> {
    factorize(&dist.correlation(theta, 0.0))
}

/// Factorizes with a fixed, already-known nugget (model reload path).
pub(crate) fn factorize_fixed(dist: &PairwiseDistances, theta: &[f64], nugget: f64) -> Result<Factor> {
    let mut r = dist.correlation(theta, 0.0);
    if nugget > 0.0 {
        for i in 0..r.nrows() {
            r[(i, i)] += nugget;
        }
    }
    try_cholesky(r, nugget).ok_or(Error::SingularCorrelation { nugget })
}
