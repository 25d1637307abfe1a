//! Hyperparameter tuning for Hierarchical Kriging.
//!
//! Two strategies are provided:
//!
//! * [`Strategy::Conventional`]: a genetic algorithm maximizes the LF and
//!   then the HF likelihood over the full `d`-dimensional log-θ box.
//! * [`Strategy::Hd`]: MIC screening of the LF data gives relative
//!   magnitudes `ω`; a scalar search picks `λ` in `θ_LF = λω`, a local search
//!   frees the individual coordinates, and the HF level repeats the same two
//!   steps with `θ_HF = χθ_LF`.

mod ga;
mod scalar;
mod simplex;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use ga::{ga_maximize, GaSettings};
pub use scalar::{oned_maximize, ScalarOptimum};
pub use simplex::{local_refine, LocalOptimum};

use crate::error::{Error, Result};
use crate::hierarchical::{HkModel, HkObjective};
use crate::kriging::{KrigingModel, KrigingObjective, SampleSet, Theta, LOG10_THETA_MAX, LOG10_THETA_MIN};
use crate::mic::{mic_screen, MicResult};
use crate::sampling::derive_seed;

/// Closed search interval of one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: f64,
    pub hi: f64,
}

impl Bounds {
    pub const LOG_THETA: Bounds = Bounds {
        lo: LOG10_THETA_MIN,
        hi: LOG10_THETA_MAX,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Input(format!("bounds [{lo}, {hi}] are not ordered")));
        }
        Ok(Self { lo, hi })
    }

    pub fn clip(&self, v: f64) -> f64 {
        if v.is_nan() {
            self.lo
        } else {
            v.clamp(self.lo, self.hi)
        }
    }

    /// `log10` of both ends.
    pub fn log10(&self) -> Result<Self> {
        if self.lo <= 0.0 {
            return Err(Error::Input("log bounds need positive endpoints".into()));
        }
        Self::new(self.lo.log10(), self.hi.log10())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Conventional,
    Hd,
}

impl Strategy {
    pub fn label(&self) -> &'static str {
        match self {
            Strategy::Conventional => "conventional",
            Strategy::Hd => "hd",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conventional" | "hkc" => Ok(Strategy::Conventional),
            "hd" | "hkhd" => Ok(Strategy::Hd),
            other => Err(Error::Input(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Budgets and search ranges shared by both strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningConfig {
    pub strategy: Strategy,
    /// Admissible θ range per coordinate (searched in log10).
    pub theta_bounds: Bounds,
    /// Range of the λ and χ scale factors (searched in log10).
    pub scale_bounds: Bounds,
    /// GA population; `None` means `4d`.
    pub ga_population: Option<usize>,
    pub ga_generations: usize,
    pub ga_crossover_fraction: f64,
    pub ga_migration_fraction: f64,
    pub ga_mutation_sigma: f64,
    pub oned_budget: usize,
    pub oned_segments: usize,
    pub local_budget: usize,
    pub seed: u64,
}

impl Default for TuningConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::Hd,
            theta_bounds: Bounds { lo: 1e-4, hi: 1e2 },
            scale_bounds: Bounds { lo: 1e-4, hi: 1e2 },
            ga_population: None,
            ga_generations: 125,
            ga_crossover_fraction: 0.8,
            ga_migration_fraction: 0.2,
            ga_mutation_sigma: 0.1,
            oned_budget: 500,
            oned_segments: 3,
            local_budget: 500,
            seed: 0,
        }
    }
}

impl TuningConfig {
    pub fn with_strategy(strategy: Strategy, seed: u64) -> Self {
        Self {
            strategy,
            seed,
            ..Self::default()
        }
    }

    pub fn ga_settings(&self, d: usize) -> GaSettings {
        GaSettings {
            population: self.ga_population.unwrap_or(4 * d.max(1)),
            generations: self.ga_generations,
            crossover_fraction: self.ga_crossover_fraction,
            migration_fraction: self.ga_migration_fraction,
            mutation_sigma: self.ga_mutation_sigma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.oned_budget == 0 || self.local_budget == 0 || self.ga_generations == 0 {
            return Err(Error::Input("tuning budgets must be positive".into()));
        }
        if self.ga_population == Some(0) || self.ga_population == Some(1) {
            return Err(Error::Input("GA population must be at least 2".into()));
        }
        for b in [self.theta_bounds, self.scale_bounds] {
            Bounds::new(b.lo, b.hi)?;
            b.log10()?;
        }
        let t = self.theta_bounds;
        if t.lo < crate::kriging::THETA_MIN || t.hi > crate::kriging::THETA_MAX {
            return Err(Error::Input(format!(
                "theta bounds must lie within [{:e}, {:e}]",
                crate::kriging::THETA_MIN,
                crate::kriging::THETA_MAX
            )));
        }
        Ok(())
    }
}

/// One logged tuning stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub evals: usize,
    pub objective_before: Option<f64>,
    pub objective_after: f64,
    pub theta: Vec<f64>,
}

/// Evaluation count and stage history of one likelihood maximization.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TuneTrace {
    pub evaluations_used: usize,
    pub best_objective: f64,
    pub stage_log: Vec<StageRecord>,
}

impl TuneTrace {
    pub fn push(&mut self, record: StageRecord) {
        self.evaluations_used += record.evals;
        self.best_objective = if self.stage_log.is_empty() {
            record.objective_after
        } else {
            self.best_objective.max(record.objective_after)
        };
        self.stage_log.push(record);
    }

    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stage_log.iter().find(|r| r.stage == name)
    }

    /// Stage records as JSON lines.
    pub fn json_lines(&self) -> Vec<String> {
        self.stage_log
            .iter()
            .map(|r| serde_json::to_string(r).expect("stage records serialize"))
            .collect()
    }
}

/// A tuned HK model and how it was obtained.
#[derive(Debug, Clone)]
pub struct TunedHk {
    pub model: HkModel,
    pub strategy: Strategy,
    pub lf_trace: TuneTrace,
    pub hf_trace: TuneTrace,
    pub mic: Option<MicResult>,
    /// Optimal LF scale factor `λ*` (HD only).
    pub lambda: Option<f64>,
    /// Optimal HF scale factor `χ*` (HD only).
    pub chi: Option<f64>,
    pub fit_time: Duration,
}

fn lf_objective(obj: &KrigingObjective) -> impl Fn(&[f64]) -> f64 + '_ {
    move |log_theta| {
        obj.evaluate(&Theta::from_log10(log_theta))
            .unwrap_or(f64::NEG_INFINITY)
    }
}

fn hf_objective(obj: &HkObjective) -> impl Fn(&[f64]) -> f64 + '_ {
    move |log_theta| {
        obj.evaluate(&Theta::from_log10(log_theta))
            .unwrap_or(f64::NEG_INFINITY)
    }
}

/// Conventional tuning: GA on the LF likelihood, then GA on the HF likelihood.
pub fn tune_hkc(lf: &SampleSet, hf: &SampleSet, config: &TuningConfig) -> Result<TunedHk> {
    config.validate()?;
    let start = Instant::now();
    let d = lf.dim();
    let bounds = config.theta_bounds.log10()?;
    let settings = config.ga_settings(d);

    let lf_obj = KrigingObjective::new(lf)?;
    let (lf_best, lf_trace) = ga_maximize(
        lf_objective(&lf_obj),
        d,
        bounds,
        &settings,
        derive_seed(config.seed, 1),
    )?;
    let lf_model = KrigingModel::fit(lf.clone(), Theta::from_log10(&lf_best))?;

    let hf_obj = HkObjective::new(&lf_model, hf)?;
    let (hf_best, hf_trace) = ga_maximize(
        hf_objective(&hf_obj),
        d,
        bounds,
        &settings,
        derive_seed(config.seed, 2),
    )?;
    let model = HkModel::fit(lf_model, hf.clone(), Theta::from_log10(&hf_best))?;
    Ok(TunedHk {
        model,
        strategy: Strategy::Conventional,
        lf_trace,
        hf_trace,
        mic: None,
        lambda: None,
        chi: None,
        fit_time: start.elapsed(),
    })
}

/// Scalar search for `s` in `θ = 10^s · base` followed by a free local search.
fn scale_then_refine<F>(
    objective: F,
    base: &[f64],
    theta_bounds: Bounds,
    config: &TuningConfig,
    names: (&str, &str),
) -> Result<(Vec<f64>, f64, TuneTrace)>
where
    F: Fn(&[f64]) -> f64,
{
    let scale_bounds = config.scale_bounds.log10()?;
    let log_base: Vec<f64> = base.iter().map(|b| b.log10()).collect();
    let scaled = |s: f64| -> Vec<f64> { log_base.iter().map(|b| theta_bounds.clip(b + s)).collect() };

    let scale = oned_maximize(
        |s| objective(&scaled(s)),
        scale_bounds,
        config.oned_budget,
        config.oned_segments,
    )?;
    let seeded = scaled(scale.x);
    let local = local_refine(&objective, &seeded, theta_bounds, config.local_budget);
    let mut trace = TuneTrace::default();
    trace.push(StageRecord {
        stage: names.0.into(),
        evals: scale.evals,
        objective_before: None,
        objective_after: local.start_value,
        theta: seeded.iter().map(|t| 10f64.powf(*t)).collect(),
    });
    trace.push(StageRecord {
        stage: names.1.into(),
        evals: local.evals,
        objective_before: Some(local.start_value),
        objective_after: local.value,
        theta: local.x.iter().map(|t| 10f64.powf(*t)).collect(),
    });
    Ok((local.x, 10f64.powf(scale.x), trace))
}

/// MIC-seeded tuning: scalar searches for `λ` and `χ`, each refined locally.
pub fn tune_hkhd(lf: &SampleSet, hf: &SampleSet, config: &TuningConfig) -> Result<TunedHk> {
    config.validate()?;
    let start = Instant::now();
    let bounds = config.theta_bounds.log10()?;

    // With one input the scale factor alone spans every θ, so the screen is
    // skipped; it also needs more samples than a 1-D design usually has.
    let mic = if lf.dim() == 1 { None } else { Some(mic_screen(lf)?) };
    let omega = mic.as_ref().map_or_else(|| vec![1.0], |m| m.omega.clone());
    let lf_obj = KrigingObjective::new(lf)?;
    let (lf_log, lambda, lf_trace) = scale_then_refine(
        lf_objective(&lf_obj),
        &omega,
        bounds,
        config,
        ("lf_scale", "lf_local"),
    )?;
    let theta_lf = Theta::from_log10(&lf_log);
    let lf_model = KrigingModel::fit(lf.clone(), theta_lf.clone())?;

    let hf_obj = HkObjective::new(&lf_model, hf)?;
    let (hf_log, chi, hf_trace) = scale_then_refine(
        hf_objective(&hf_obj),
        theta_lf.values(),
        bounds,
        config,
        ("hf_scale", "hf_local"),
    )?;
    let model = HkModel::fit(lf_model, hf.clone(), Theta::from_log10(&hf_log))?;
    Ok(TunedHk {
        model,
        strategy: Strategy::Hd,
        lf_trace,
        hf_trace,
        mic,
        lambda: Some(lambda),
        chi: Some(chi),
        fit_time: start.elapsed(),
    })
}

/// Dispatches on `config.strategy`.
pub fn tune(lf: &SampleSet, hf: &SampleSet, config: &TuningConfig) -> Result<TunedHk> {
    match config.strategy {
        Strategy::Conventional => tune_hkc(lf, hf, config),
        Strategy::Hd => tune_hkhd(lf, hf, config),
    }
}
