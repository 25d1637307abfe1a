//! Repeated, paired benchmark runs of both tuning strategies.

pub mod dataset;
pub mod report;

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use report::{Aggregate, BenchReport, RunRow};

use crate::benchlib::{evaluate_metrics, get_problem, make_validation_set, BiFidelityProblem};
use crate::error::{Error, Result};
use crate::kriging::{Fidelity, SampleSet};
use crate::sampling::{derive_seed, lhs, Domain};
use crate::tuning::{tune, Strategy, TuningConfig};

/// An externally produced bi-fidelity data set with its own HF validation file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalData {
    pub lf_csv: PathBuf,
    pub hf_csv: PathBuf,
    pub validation_csv: PathBuf,
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
    #[serde(default = "default_label")]
    pub label: String,
}

fn default_label() -> String {
    "external".into()
}

/// What to run. Sample counts default to `10d` LF and `5d` HF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunSpec {
    pub problem: Option<String>,
    pub external: Option<ExternalData>,
    pub strategies: Vec<Strategy>,
    pub n_lf: Option<usize>,
    pub n_hf: Option<usize>,
    /// Per-dimension LF multipliers for a sample-size sweep (HF uses half).
    pub sizes: Option<Vec<usize>>,
    pub repeats: usize,
    pub seed: u64,
    pub validation_count: Option<usize>,
    /// Fixed LF sites in physical units, replacing the LHS draw.
    pub lf_sites: Option<Vec<Vec<f64>>>,
    /// Fixed HF sites in physical units, replacing the LHS draw.
    pub hf_sites: Option<Vec<Vec<f64>>>,
    /// Record wall-clock fit times; when false they are written as 0.
    pub timing: bool,
    /// Run repeats concurrently (timings are then not comparable).
    pub parallel: bool,
    /// Overrides for the tuning budgets (strategy and seed are set per run).
    pub tuning: Option<TuningConfig>,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            problem: None,
            external: None,
            strategies: vec![Strategy::Conventional, Strategy::Hd],
            n_lf: None,
            n_hf: None,
            sizes: None,
            repeats: 10,
            seed: 0,
            validation_count: None,
            lf_sites: None,
            hf_sites: None,
            timing: true,
            parallel: false,
            tuning: None,
        }
    }
}

impl RunSpec {
    pub fn for_problem(id: &str, strategies: Vec<Strategy>, repeats: usize, seed: u64) -> Self {
        Self {
            problem: Some(id.to_string()),
            strategies,
            repeats,
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::Input("repeats must be at least 1".into()));
        }
        if self.strategies.is_empty() {
            return Err(Error::Input("no strategy selected".into()));
        }
        if self.problem.is_some() == self.external.is_some() {
            return Err(Error::Input(
                "specify exactly one of a problem id or an external dataset".into(),
            ));
        }
        Ok(())
    }
}

/// One configuration of sample sizes to run.
#[derive(Debug, Clone)]
struct Arm {
    label: String,
    n_lf: usize,
    n_hf: usize,
}

fn arms(spec: &RunSpec, problem_label: &str, d: usize) -> Result<Vec<Arm>> {
    let arms = match &spec.sizes {
        Some(sizes) => sizes
            .iter()
            .map(|m| Arm {
                label: format!("{problem_label}@{m}d+{}d", m / 2),
                n_lf: m * d,
                n_hf: (m * d) / 2,
            })
            .collect(),
        None => vec![Arm {
            label: problem_label.to_string(),
            n_lf: spec
                .lf_sites
                .as_ref()
                .map(Vec::len)
                .or(spec.n_lf)
                .unwrap_or(10 * d),
            n_hf: spec
                .hf_sites
                .as_ref()
                .map(Vec::len)
                .or(spec.n_hf)
                .unwrap_or(5 * d),
        }],
    };
    for a in &arms {
        if a.n_hf < 2 || a.n_lf < a.n_hf {
            return Err(Error::Input(format!(
                "{}: need n_lf >= n_hf >= 2 (got {} and {})",
                a.label, a.n_lf, a.n_hf
            )));
        }
    }
    Ok(arms)
}

/// Training and validation data for one repeat.
struct RepeatData {
    lf: SampleSet,
    hf: SampleSet,
    validation: Vec<Vec<f64>>,
    truth: Vec<f64>,
}

fn synthetic_repeat(
    problem: &BiFidelityProblem,
    spec: &RunSpec,
    arm: &Arm,
    sub_seed: u64,
) -> Result<RepeatData> {
    let dom = &problem.domain;
    let lf_pts = match &spec.lf_sites {
        Some(p) => p.clone(),
        None => lhs(arm.n_lf, dom, derive_seed(sub_seed, 10))?.points,
    };
    let hf_pts = match &spec.hf_sites {
        Some(p) => p.clone(),
        None => lhs(arm.n_hf, dom, derive_seed(sub_seed, 11))?.points,
    };
    let lf_y: Vec<f64> = lf_pts.iter().map(|x| problem.lf(x)).collect();
    let hf_y: Vec<f64> = hf_pts.iter().map(|x| problem.hf(x)).collect();
    let (vdesign, truth) =
        make_validation_set(problem, spec.validation_count, derive_seed(sub_seed, 12))?;
    Ok(RepeatData {
        lf: SampleSet::from_physical(dom, &lf_pts, &lf_y, Fidelity::Low)?,
        hf: SampleSet::from_physical(dom, &hf_pts, &hf_y, Fidelity::High)?,
        validation: vdesign.scale_to_unit(),
        truth,
    })
}

fn tuning_config(spec: &RunSpec, strategy: Strategy, seed: u64) -> TuningConfig {
    let mut cfg = spec.tuning.clone().unwrap_or_default();
    cfg.strategy = strategy;
    cfg.seed = seed;
    cfg
}

fn run_one(data: &RepeatData, spec: &RunSpec, label: &str, repeat: usize, sub_seed: u64, strategy: Strategy) -> RunRow {
    let cfg = tuning_config(spec, strategy, derive_seed(sub_seed, 13));
    let base = RunRow::failed(label, strategy, repeat, sub_seed, String::new());
    let tuned = match tune(&data.lf, &data.hf, &cfg) {
        Ok(t) => t,
        Err(e) => return RunRow { error: Some(e.to_string()), ..base },
    };
    let pred = match tuned.model.predict_many(&data.validation) {
        Ok(p) => p,
        Err(e) => return RunRow { error: Some(e.to_string()), ..base },
    };
    let metrics = match evaluate_metrics(&data.truth, &pred) {
        Ok(m) => m,
        Err(e) => return RunRow { error: Some(e.to_string()), ..base },
    };
    RunRow::success(label, repeat, sub_seed, &tuned, metrics, spec.timing)
}

/// Runs every repeat of every arm and strategy.
///
/// Within a repeat all strategies see the same training and validation sets.
pub fn run_benchmark(spec: &RunSpec) -> Result<BenchReport> {
    spec.validate()?;
    let mut rows = Vec::new();
    if let Some(id) = &spec.problem {
        let problem = get_problem(id)?;
        for arm in arms(spec, problem.id, problem.d)? {
            let per_repeat = |repeat: usize| -> Result<Vec<RunRow>> {
                let sub_seed = derive_seed(spec.seed, repeat as u64);
                let data = synthetic_repeat(&problem, spec, &arm, sub_seed)?;
                Ok(spec
                    .strategies
                    .iter()
                    .map(|s| run_one(&data, spec, &arm.label, repeat, sub_seed, *s))
                    .collect())
            };
            let chunks: Vec<Result<Vec<RunRow>>> = if spec.parallel {
                (0..spec.repeats).into_par_iter().map(per_repeat).collect()
            } else {
                (0..spec.repeats).map(per_repeat).collect()
            };
            for c in chunks {
                rows.extend(c?);
            }
        }
    } else if let Some(ext) = &spec.external {
        let data = external_repeat_data(ext)?;
        for repeat in 0..spec.repeats {
            let sub_seed = derive_seed(spec.seed, repeat as u64);
            for s in &spec.strategies {
                rows.push(run_one(&data, spec, &ext.label, repeat, sub_seed, *s));
            }
        }
    }
    Ok(BenchReport::from_rows(rows))
}

fn external_repeat_data(ext: &ExternalData) -> Result<RepeatData> {
    let domain = match (&ext.lower, &ext.upper) {
        (Some(lo), Some(hi)) => Some(Domain::new(lo.clone(), hi.clone())?),
        (None, None) => None,
        _ => return Err(Error::Input("give both lower and upper bounds or neither".into())),
    };
    let ing = dataset::ingest_dataset(&ext.lf_csv, &ext.hf_csv, domain.as_ref())?;
    let val = dataset::read_dataset(&ext.validation_csv)?;
    let dom = ing.lf.domain().clone();
    let validation = val
        .points
        .iter()
        .map(|p| dom.to_unit(p))
        .collect::<Result<Vec<_>>>()?;
    Ok(RepeatData {
        lf: ing.lf,
        hf: ing.hf,
        validation,
        truth: val.responses,
    })
}
