//! Ordinary Kriging with a Matérn 5/2 correlation and a constant trend.
//!
//! Sites are stored normalized to the unit cube and responses centered on
//! their mean. The trend and process variance are profiled out of the
//! likelihood, leaving the activity parameters `theta` as the only unknowns.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::correlation::{corr_vector, factorize_cached, factorize_fixed, Factor, PairwiseDistances};
use crate::error::{Error, Result};
use crate::sampling::Domain;

pub const THETA_MIN: f64 = 1e-4;
pub const THETA_MAX: f64 = 1e2;
pub const LOG10_THETA_MIN: f64 = -4.0;
pub const LOG10_THETA_MAX: f64 = 2.0;

/// Lower clamp applied to the profiled process variance before taking its log.
pub const SIGMA2_FLOOR: f64 = 1e-30;

/// Per-variable activity parameters, each in `[1e-4, 1e2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Theta(Vec<f64>);

impl Theta {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("theta must have at least one entry".into()));
        }
        if let Some(bad) = values
            .iter()
            .find(|v| !v.is_finite() || **v < THETA_MIN || **v > THETA_MAX)
        {
            return Err(Error::Input(format!(
                "theta entry {bad} outside [{THETA_MIN:e}, {THETA_MAX:e}]"
            )));
        }
        Ok(Self(values))
    }

    /// Clips every entry into the admissible range.
    pub fn clipped(values: &[f64]) -> Self {
        Self(
            values
                .iter()
                .map(|v| if v.is_nan() { THETA_MIN } else { v.clamp(THETA_MIN, THETA_MAX) })
                .collect(),
        )
    }

    /// `10^t` per coordinate, clipped into range.
    pub fn from_log10(log_theta: &[f64]) -> Self {
        Self::clipped(&log_theta.iter().map(|t| 10f64.powf(*t)).collect::<Vec<_>>())
    }

    pub fn uniform(d: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; d])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn log10(&self) -> Vec<f64> {
        self.0.iter().map(|v| v.log10()).collect()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fidelity {
    Low,
    High,
}

/// Training data of one fidelity level: normalized sites and centered responses.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    domain: Domain,
    sites: Vec<Vec<f64>>,
    responses: Vec<f64>,
    response_mean: f64,
    fidelity: Fidelity,
}

impl SampleSet {
    /// Builds a sample set from points in physical units.
    pub fn from_physical(
        domain: &Domain,
        points: &[Vec<f64>],
        raw_responses: &[f64],
        fidelity: Fidelity,
    ) -> Result<Self> {
        let sites = points
            .iter()
            .map(|p| domain.to_unit(p))
            .collect::<Result<Vec<_>>>()?;
        Self::from_unit(domain, sites, raw_responses, fidelity)
    }

    /// Builds a sample set from already-normalized sites; the responses are centered here.
    pub fn from_unit(
        domain: &Domain,
        sites: Vec<Vec<f64>>,
        raw_responses: &[f64],
        fidelity: Fidelity,
    ) -> Result<Self> {
        if raw_responses.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        let mean = raw_responses.iter().sum::<f64>() / raw_responses.len() as f64;
        let centered = raw_responses.iter().map(|y| y - mean).collect();
        Self::from_parts(domain.clone(), sites, centered, mean, fidelity)
    }

    /// Reassembles a sample set from stored, already-centered parts.
    pub fn from_parts(
        domain: Domain,
        sites: Vec<Vec<f64>>,
        centered: Vec<f64>,
        response_mean: f64,
        fidelity: Fidelity,
    ) -> Result<Self> {
        let d = domain.dim();
        if sites.len() != centered.len() {
            return Err(Error::Input(format!(
                "{} sites but {} responses",
                sites.len(),
                centered.len()
            )));
        }
        if sites.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        for s in &sites {
            if s.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: s.len(),
                });
            }
            if s.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
                return Err(Error::Input(format!("site {s:?} is outside the unit cube")));
            }
        }
        if !response_mean.is_finite() || centered.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite response".into()));
        }
        Ok(Self {
            domain,
            sites,
            responses: centered,
            response_mean,
            fidelity,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[Vec<f64>] {
        &self.sites
    }

    /// Centered responses.
    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    /// Responses in original units.
    pub fn raw_responses(&self) -> Vec<f64> {
        self.responses.iter().map(|y| y + self.response_mean).collect()
    }

    pub fn response_mean(&self) -> f64 {
        self.response_mean
    }

    pub fn fidelity(&self) -> Fidelity {
        self.fidelity
    }

    pub(crate) fn response_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.responses)
    }

    pub(crate) fn require_fit_size(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: self.len(),
            });
        }
        Ok(())
    }
}

/// GLS trend coefficient, process variance and likelihood for a fixed factor.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Profile {
    pub coef: f64,
    pub sigma2: f64,
    pub objective: f64,
}

/// Profiles the scalar trend `coef·t` and the variance out of the Gaussian
/// likelihood: `-(m/2) ln σ̂² - ½ ln|R|`.
pub(crate) fn profile(factor: &Factor, y: &DVector<f64>, trend: &DVector<f64>) -> Result<Profile> {
    let zy = factor.forward(y);
    let zt = factor.forward(trend);
    let tt = zt.dot(&zt);
    if !(tt > 0.0) || !tt.is_finite() {
        return Err(Error::DegenerateTrend(tt));
    }
    let coef = zt.dot(&zy) / tt;
    let resid = zy - zt * coef;
    let m = y.len() as f64;
    let sigma2 = (resid.dot(&resid) / m).max(SIGMA2_FLOOR);
    let objective = -0.5 * m * sigma2.ln() - 0.5 * factor.ln_det();
    Ok(Profile {
        coef,
        sigma2,
        objective,
    })
}

/// Reusable likelihood evaluator for one sample set (pairwise distances cached).
#[derive(Debug, Clone)]
pub struct KrigingObjective {
    dist: PairwiseDistances,
    y: DVector<f64>,
    ones: DVector<f64>,
    d: usize,
}

impl KrigingObjective {
    pub fn new(samples: &SampleSet) -> Result<Self> {
        samples.require_fit_size()?;
        Ok(Self {
            dist: PairwiseDistances::new(samples.sites()),
            y: samples.response_vector(),
            ones: DVector::from_element(samples.len(), 1.0),
            d: samples.dim(),
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn evaluate(&self, theta: &Theta) -> Result<f64> {
        if theta.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                actual: theta.dim(),
            });
        }
        let factor = factorize_cached(&self.dist, theta.values())?;
        Ok(profile(&factor, &self.y, &self.ones)?.objective)
    }
}

/// Concentrated log-likelihood of `theta` for a sample set.
pub fn concentrated_log_likelihood(samples: &SampleSet, theta: &Theta) -> Result<f64> {
    KrigingObjective::new(samples)?.evaluate(theta)
}

/// Fitted ordinary Kriging model. Immutable once built.
#[derive(Debug, Clone)]
pub struct KrigingModel {
    samples: SampleSet,
    theta: Theta,
    mu_star: f64,
    sigma2: f64,
    factor: Factor,
    alpha: DVector<f64>,
}

impl KrigingModel {
    pub fn fit(samples: SampleSet, theta: Theta) -> Result<Self> {
        samples.require_fit_size()?;
        check_theta_dim(&samples, &theta)?;
        let dist = PairwiseDistances::new(samples.sites());
        let factor = factorize_cached(&dist, theta.values())?;
        Self::assemble(samples, theta, factor)
    }

    fn assemble(samples: SampleSet, theta: Theta, factor: Factor) -> Result<Self> {
        let y = samples.response_vector();
        let ones = DVector::from_element(samples.len(), 1.0);
        let p = profile(&factor, &y, &ones)?;
        let alpha = factor.solve(&(y - ones * p.coef));
        Ok(Self {
            samples,
            theta,
            mu_star: p.coef,
            sigma2: p.sigma2,
            factor,
            alpha,
        })
    }

    pub fn samples(&self) -> &SampleSet {
        &self.samples
    }

    pub fn theta(&self) -> &Theta {
        &self.theta
    }

    pub fn mu_star(&self) -> f64 {
        self.mu_star
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn nugget(&self) -> f64 {
        self.factor.nugget()
    }

    pub fn factor(&self) -> &Factor {
        &self.factor
    }

    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.samples.dim()
    }

    /// Likelihood of the fitted parameters.
    pub fn log_likelihood(&self) -> f64 {
        let m = self.samples.len() as f64;
        -0.5 * m * self.sigma2.ln() - 0.5 * self.factor.ln_det()
    }

    /// Prediction on the centered scale (`μ* + rᵀα`) at a normalized site.
    pub fn predict_centered(&self, x: &[f64]) -> Result<f64> {
        self.check_query(x)?;
        let r = corr_vector(self.samples.sites(), x, self.theta.values());
        Ok(self.mu_star + r.dot(&self.alpha))
    }

    /// Prediction in response units at a normalized site.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(self.predict_centered(x)? + self.samples.response_mean())
    }

    pub fn predict_many(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.predict(x)).collect()
    }

    /// Prediction at a point given in physical units.
    pub fn predict_physical(&self, x: &[f64]) -> Result<f64> {
        self.predict(&self.samples.domain().to_unit(x)?)
    }

    fn check_query(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite query coordinate".into()));
        }
        Ok(())
    }

    pub fn to_file(&self) -> KrigingModelFile {
        KrigingModelFile {
            kind: KrigingModelFile::KIND.to_string(),
            dimension: self.dim(),
            domain: self.samples.domain().clone(),
            fidelity: self.samples.fidelity(),
            theta: self.theta.values().to_vec(),
            mu_star: self.mu_star,
            sigma2: self.sigma2,
            nugget: self.nugget(),
            response_mean: self.samples.response_mean(),
            sites: self.samples.sites().to_vec(),
            responses: self.samples.responses().to_vec(),
        }
    }

    /// Rebuilds a model; the factor is recomputed with the stored nugget.
    pub fn from_file(file: KrigingModelFile) -> Result<Self> {
        if file.domain.dim() != file.dimension {
            return Err(Error::DimensionMismatch {
                expected: file.dimension,
                actual: file.domain.dim(),
            });
        }
        let samples = SampleSet::from_parts(
            file.domain,
            file.sites,
            file.responses,
            file.response_mean,
            file.fidelity,
        )?;
        samples.require_fit_size()?;
        let theta = Theta::new(file.theta)?;
        check_theta_dim(&samples, &theta)?;
        let dist = PairwiseDistances::new(samples.sites());
        let factor = factorize_fixed(&dist, theta.values(), file.nugget)?;
        Self::assemble(samples, theta, factor)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }
}

fn check_theta_dim(samples: &SampleSet, theta: &Theta) -> Result<()> {
    if theta.dim() != samples.dim() {
        return Err(Error::DimensionMismatch {
            expected: samples.dim(),
            actual: theta.dim(),
        });
    }
    Ok(())
}

/// On-disk form of a [`KrigingModel`]. Sites are normalized and responses centered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrigingModelFile {
    pub kind: String,
    pub dimension: usize,
    pub domain: Domain,
    pub fidelity: Fidelity,
    pub theta: Vec<f64>,
    pub mu_star: f64,
    pub sigma2: f64,
    pub nugget: f64,
    pub response_mean: f64,
    pub sites: Vec<Vec<f64>>,
    pub responses: Vec<f64>,
}

impl KrigingModelFile {
    pub const KIND: &'static str = "kriging";
}
