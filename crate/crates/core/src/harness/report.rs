use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::benchlib::MetricSet;
use crate::error::Result;
use crate::tuning::{Strategy, TuneTrace, TunedHk};

pub const REPORT_HEADER: &str =
    "problem,strategy,repeat,seed,fit_time_s,r2,rmse,mae,beta_star,evals_lf,evals_hf";

/// One fitted-and-scored model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub problem: String,
    pub strategy: Strategy,
    pub repeat: usize,
    pub seed: u64,
    pub fit_time_s: f64,
    pub r2: f64,
    pub rmse: f64,
    pub mae: f64,
    pub beta_star: f64,
    pub evals_lf: usize,
    pub evals_hf: usize,
    pub error: Option<String>,
    pub theta_lf: Vec<f64>,
    pub theta_hf: Vec<f64>,
    pub lambda: Option<f64>,
    pub chi: Option<f64>,
    pub lf_trace: Option<TuneTrace>,
    pub hf_trace: Option<TuneTrace>,
}

impl RunRow {
    pub(crate) fn failed(problem: &str, strategy: Strategy, repeat: usize, seed: u64, error: String) -> Self {
        Self {
            problem: problem.to_string(),
            strategy,
            repeat,
            seed,
            fit_time_s: f64::NAN,
            r2: f64::NAN,
            rmse: f64::NAN,
            mae: f64::NAN,
            beta_star: f64::NAN,
            evals_lf: 0,
            evals_hf: 0,
            error: Some(error),
            theta_lf: Vec::new(),
            theta_hf: Vec::new(),
            lambda: None,
            chi: None,
            lf_trace: None,
            hf_trace: None,
        }
    }

    pub(crate) fn success(
        problem: &str,
        repeat: usize,
        seed: u64,
        tuned: &TunedHk,
        metrics: MetricSet,
        timing: bool,
    ) -> Self {
        Self {
            problem: problem.to_string(),
            strategy: tuned.strategy,
            repeat,
            seed,
            fit_time_s: if timing { tuned.fit_time.as_secs_f64() } else { 0.0 },
            r2: metrics.r2,
            rmse: metrics.rmse,
            mae: metrics.mae,
            beta_star: tuned.model.beta_star(),
            evals_lf: tuned.lf_trace.evaluations_used,
            evals_hf: tuned.hf_trace.evaluations_used,
            error: None,
            theta_lf: tuned.model.lf_model().theta().values().to_vec(),
            theta_hf: tuned.model.theta_hf().values().to_vec(),
            lambda: tuned.lambda,
            chi: tuned.chi,
            lf_trace: Some(tuned.lf_trace.clone()),
            hf_trace: Some(tuned.hf_trace.clone()),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.problem,
            self.strategy.label(),
            self.repeat,
            self.seed,
            self.fit_time_s,
            self.r2,
            self.rmse,
            self.mae,
            self.beta_star,
            self.evals_lf,
            self.evals_hf
        )
    }
}

/// Mean and sample standard deviation of one metric over successful rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub problem: String,
    pub strategy: Strategy,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
    pub failed: usize,
}

/// Mean and sample (n - 1) standard deviation; the deviation of a single value is 0.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

pub const AGGREGATED_METRICS: [&str; 7] =
    ["fit_time_s", "r2", "rmse", "mae", "beta_star", "evals_lf", "evals_hf"];

fn metric_of(row: &RunRow, metric: &str) -> f64 {
    match metric {
        "fit_time_s" => row.fit_time_s,
        "r2" => row.r2,
        "rmse" => row.rmse,
        "mae" => row.mae,
        "beta_star" => row.beta_star,
        "evals_lf" => row.evals_lf as f64,
        "evals_hf" => row.evals_hf as f64,
        _ => f64::NAN,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<RunRow>,
    pub aggregates: Vec<Aggregate>,
}

impl BenchReport {
    pub fn from_rows(rows: Vec<RunRow>) -> Self {
        let mut groups: Vec<(String, Strategy)> = Vec::new();
        for r in &rows {
            let key = (r.problem.clone(), r.strategy);
            if !groups.contains(&key) {
                groups.push(key);
            }
        }
        let mut aggregates = Vec::new();
        for (problem, strategy) in groups {
            let members: Vec<&RunRow> = rows
                .iter()
                .filter(|r| r.problem == problem && r.strategy == strategy)
                .collect();
            let ok: Vec<&RunRow> = members.iter().copied().filter(|r| r.is_ok()).collect();
            let failed = members.len() - ok.len();
            for metric in AGGREGATED_METRICS {
                let vals: Vec<f64> = ok.iter().map(|r| metric_of(r, metric)).collect();
                let (mean, std) = mean_std(&vals);
                aggregates.push(Aggregate {
                    problem: problem.clone(),
                    strategy,
                    metric: metric.to_string(),
                    mean,
                    std,
                    n: ok.len(),
                    failed,
                });
            }
        }
        Self { rows, aggregates }
    }

    pub fn aggregate(&self, problem: &str, strategy: Strategy, metric: &str) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.problem == problem && a.strategy == strategy && a.metric == metric)
    }

    pub fn rows_for(&self, problem: &str, strategy: Strategy) -> impl Iterator<Item = &RunRow> {
        let problem = problem.to_string();
        self.rows
            .iter()
            .filter(move |r| r.problem == problem && r.strategy == strategy)
    }

    pub fn failed_count(&self) -> usize {
        self.rows.iter().filter(|r| !r.is_ok()).count()
    }

    /// Per-run rows under the fixed report header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv_line());
            out.push('\n');
        }
        out
    }

    pub fn aggregates_csv(&self) -> String {
        let mut out = String::from("problem,strategy,metric,mean,std,n,failed\n");
        for a in &self.aggregates {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                a.problem,
                a.strategy.label(),
                a.metric,
                a.mean,
                a.std,
                a.n,
                a.failed
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `report.csv`, `aggregates.csv` and `report.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.csv"), self.to_csv())?;
        std::fs::write(dir.join("aggregates.csv"), self.aggregates_csv())?;
        std::fs::write(dir.join("report.json"), self.to_json()?)?;
        Ok(())
    }

    /// Mean/STD table in the layout of a comparison table, one line per group.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<16} {:<13} {:>10} {:>10} {:>8} {:>8} {:>12} {:>12} {:>12} {:>12} {:>6}",
            "problem", "strategy", "time_mean", "time_std", "r2_mean", "r2_std", "rmse_mean", "rmse_std", "mae_mean", "mae_std", "failed"
        );
        let mut seen: Vec<(String, Strategy)> = Vec::new();
        for a in &self.aggregates {
            let key = (a.problem.clone(), a.strategy);
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            let get = |m: &str| self.aggregate(&a.problem, a.strategy, m).map_or((f64::NAN, f64::NAN), |g| (g.mean, g.std));
            let (tm, ts) = get("fit_time_s");
            let (rm, rs) = get("r2");
            let (em, es) = get("rmse");
            let (mm, ms) = get("mae");
            let _ = writeln!(
                out,
                "{:<16} {:<13} {:>10.4} {:>10.4} {:>8.3} {:>8.3} {:>12.4} {:>12.4} {:>12.4} {:>12.4} {:>6}",
                a.problem,
                a.strategy.label(),
                tm,
                ts,
                rm,
                rs,
                em,
                es,
                mm,
                ms,
                a.failed
            );
        }
        out
    }
}
