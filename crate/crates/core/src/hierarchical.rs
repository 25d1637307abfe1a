//! Hierarchical Kriging: the low-fidelity Kriging predictor, scaled by the
//! GLS factor `β*`, serves as the trend of the high-fidelity model.
//!
//! Both levels are centered on their own response means. The trend vector at
//! the HF sites is therefore `F_i = ŷ_LF(x_i) - mean(y_HF)`, which keeps `β*`
//! a ratio between comparable centered quantities.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::correlation::{corr_vector, factorize_cached, factorize_fixed, Factor, PairwiseDistances};
use crate::error::{Error, Result};
use crate::kriging::{profile, KrigingModel, KrigingModelFile, SampleSet, Theta};

fn check_compatible(lf: &KrigingModel, hf: &SampleSet) -> Result<()> {
    if hf.dim() != lf.dim() {
        return Err(Error::DimensionMismatch {
            expected: lf.dim(),
            actual: hf.dim(),
        });
    }
    if hf.domain() != lf.samples().domain() {
        return Err(Error::Input(
            "low- and high-fidelity samples use different domains".into(),
        ));
    }
    hf.require_fit_size()
}

/// LF predictions at the HF sites, re-centered by the HF mean.
fn lf_trend(lf: &KrigingModel, hf: &SampleSet) -> Result<DVector<f64>> {
    let shift = hf.response_mean();
    let values = hf
        .sites()
        .iter()
        .map(|x| lf.predict(x).map(|v| v - shift))
        .collect::<Result<Vec<_>>>()?;
    Ok(DVector::from_vec(values))
}

/// Reusable HF-level likelihood evaluator for a fixed LF model.
#[derive(Debug, Clone)]
pub struct HkObjective {
    dist: PairwiseDistances,
    y: DVector<f64>,
    trend: DVector<f64>,
    d: usize,
}

impl HkObjective {
    pub fn new(lf_model: &KrigingModel, hf_samples: &SampleSet) -> Result<Self> {
        check_compatible(lf_model, hf_samples)?;
        Ok(Self {
            dist: PairwiseDistances::new(hf_samples.sites()),
            y: hf_samples.response_vector(),
            trend: lf_trend(lf_model, hf_samples)?,
            d: hf_samples.dim(),
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// The trend vector `F` used by this objective.
    pub fn trend(&self) -> &DVector<f64> {
        &self.trend
    }

    pub fn evaluate(&self, theta_hf: &Theta) -> Result<f64> {
        if theta_hf.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                actual: theta_hf.dim(),
            });
        }
        let factor = factorize_cached(&self.dist, theta_hf.values())?;
        Ok(profile(&factor, &self.y, &self.trend)?.objective)
    }
}

/// HF-level concentrated log-likelihood with `β` profiled out.
pub fn hk_log_likelihood(
    lf_model: &KrigingModel,
    hf_samples: &SampleSet,
    theta_hf: &Theta,
) -> Result<f64> {
    HkObjective::new(lf_model, hf_samples)?.evaluate(theta_hf)
}

/// Fitted two-level Hierarchical Kriging model.
#[derive(Debug, Clone)]
pub struct HkModel {
    lf: KrigingModel,
    hf_samples: SampleSet,
    theta_hf: Theta,
    beta_star: f64,
    sigma2_hf: f64,
    trend: DVector<f64>,
    factor: Factor,
    alpha: DVector<f64>,
}

impl HkModel {
    pub fn fit(lf_model: KrigingModel, hf_samples: SampleSet, theta_hf: Theta) -> Result<Self> {
        check_compatible(&lf_model, &hf_samples)?;
        let dist = PairwiseDistances::new(hf_samples.sites());
        let factor = factorize_cached(&dist, theta_hf.values())?;
        Self::assemble(lf_model, hf_samples, theta_hf, factor)
    }

    fn assemble(
        lf: KrigingModel,
        hf_samples: SampleSet,
        theta_hf: Theta,
        factor: Factor,
    ) -> Result<Self> {
        if theta_hf.dim() != hf_samples.dim() {
            return Err(Error::DimensionMismatch {
                expected: hf_samples.dim(),
                actual: theta_hf.dim(),
            });
        }
        let trend = lf_trend(&lf, &hf_samples)?;
        let y = hf_samples.response_vector();
        let p = profile(&factor, &y, &trend)?;
        let alpha = factor.solve(&(y - &trend * p.coef));
        Ok(Self {
            lf,
            hf_samples,
            theta_hf,
            beta_star: p.coef,
            sigma2_hf: p.sigma2,
            trend,
            factor,
            alpha,
        })
    }

    pub fn lf_model(&self) -> &KrigingModel {
        &self.lf
    }

    pub fn hf_samples(&self) -> &SampleSet {
        &self.hf_samples
    }

    pub fn theta_hf(&self) -> &Theta {
        &self.theta_hf
    }

    pub fn beta_star(&self) -> f64 {
        self.beta_star
    }

    pub fn sigma2_hf(&self) -> f64 {
        self.sigma2_hf
    }

    pub fn nugget_hf(&self) -> f64 {
        self.factor.nugget()
    }

    /// LF predictions at the HF sites on the HF-centered scale.
    pub fn trend(&self) -> &DVector<f64> {
        &self.trend
    }

    pub fn factor(&self) -> &Factor {
        &self.factor
    }

    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.lf.dim()
    }

    pub fn log_likelihood(&self) -> f64 {
        let k = self.hf_samples.len() as f64;
        -0.5 * k * self.sigma2_hf.ln() - 0.5 * self.factor.ln_det()
    }

    /// HF prediction at a normalized site, in response units.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let mean = self.hf_samples.response_mean();
        let lf = self.lf.predict(x)? - mean;
        let r = corr_vector(self.hf_samples.sites(), x, self.theta_hf.values());
        Ok(self.beta_star * lf + r.dot(&self.alpha) + mean)
    }

    pub fn predict_many(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.predict(x)).collect()
    }

    pub fn predict_physical(&self, x: &[f64]) -> Result<f64> {
        self.predict(&self.hf_samples.domain().to_unit(x)?)
    }

    pub fn to_file(&self) -> HkModelFile {
        HkModelFile {
            kind: HkModelFile::KIND.to_string(),
            lf_model: self.lf.to_file(),
            theta_hf: self.theta_hf.values().to_vec(),
            beta_star: self.beta_star,
            sigma2_hf: self.sigma2_hf,
            nugget_hf: self.nugget_hf(),
            hf_response_mean: self.hf_samples.response_mean(),
            hf_sites: self.hf_samples.sites().to_vec(),
            hf_responses: self.hf_samples.responses().to_vec(),
        }
    }

    pub fn from_file(file: HkModelFile) -> Result<Self> {
        let lf = KrigingModel::from_file(file.lf_model)?;
        let hf_samples = SampleSet::from_parts(
            lf.samples().domain().clone(),
            file.hf_sites,
            file.hf_responses,
            file.hf_response_mean,
            crate::kriging::Fidelity::High,
        )?;
        check_compatible(&lf, &hf_samples)?;
        let theta_hf = Theta::new(file.theta_hf)?;
        let dist = PairwiseDistances::new(hf_samples.sites());
        let factor = factorize_fixed(&dist, theta_hf.values(), file.nugget_hf)?;
        Self::assemble(lf, hf_samples, theta_hf, factor)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }
}

/// On-disk form of an [`HkModel`]: the LF model file plus the HF layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HkModelFile {
    pub kind: String,
    pub lf_model: KrigingModelFile,
    pub theta_hf: Vec<f64>,
    pub beta_star: f64,
    pub sigma2_hf: f64,
    pub nugget_hf: f64,
    pub hf_response_mean: f64,
    pub hf_sites: Vec<Vec<f64>>,
    pub hf_responses: Vec<f64>,
}

impl HkModelFile {
    pub const KIND: &'static str = "hierarchical";
}
