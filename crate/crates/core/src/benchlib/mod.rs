//! Analytic bi-fidelity test problems and accuracy metrics.

mod metrics;
mod problems;

pub use metrics::{evaluate_metrics, MetricSet};
pub use problems::{get_problem, problem_ids, BiFidelityProblem};

use crate::error::Result;
use crate::sampling::{lhs, Design};

/// Default validation size: `200d`, capped at 5000.
pub fn default_validation_count(d: usize) -> usize {
    (200 * d).min(5000)
}

/// Latin hypercube validation design with exact HF responses.
pub fn make_validation_set(
    problem: &BiFidelityProblem,
    count: Option<usize>,
    seed: u64,
) -> Result<(Design, Vec<f64>)> {
    let n = count.unwrap_or_else(|| default_validation_count(problem.d));
    let design = lhs(n, &problem.domain, seed)?;
    let y = design.points.iter().map(|p| problem.hf(p)).collect();
    Ok((design, y))
}
