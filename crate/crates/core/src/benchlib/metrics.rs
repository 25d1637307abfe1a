use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accuracy of HF predictions on a validation set, in response units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub r2: f64,
    pub rmse: f64,
    /// Maximum absolute error.
    pub mae: f64,
    pub n_validation: usize,
}

/// Coefficient of determination, root mean square error and maximum
/// absolute error.
pub fn evaluate_metrics(y_true: &[f64], y_pred: &[f64]) -> Result<MetricSet> {
    if y_true.len() != y_pred.len() {
        return Err(Error::Input(format!(
            "{} true values but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    let n = y_true.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let mean = y_true.iter().sum::<f64>() / n as f64;
    let mut sse = 0.0;
    let mut sst = 0.0;
    let mut mae = 0.0f64;
    for (t, p) in y_true.iter().zip(y_pred) {
        let e = t - p;
        sse += e * e;
        sst += (t - mean) * (t - mean);
        mae = mae.max(e.abs());
    }
    let rmse = (sse / n as f64).sqrt();
    if sst == 0.0 {
        return Err(Error::UndefinedR2 { rmse, mae });
    }
    Ok(MetricSet {
        r2: 1.0 - sse / sst,
        rmse,
        mae,
        n_validation: n,
    })
}
