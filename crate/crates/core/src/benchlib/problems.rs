use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sampling::Domain;

type Evaluator = fn(&[f64]) -> f64;

/// A pair of analytic fidelities over a box domain.
#[derive(Debug, Clone)]
pub struct BiFidelityProblem {
    pub id: &'static str,
    pub d: usize,
    pub domain: Domain,
    f_hf: Evaluator,
    f_lf: Evaluator,
}

impl BiFidelityProblem {
    pub fn hf(&self, x: &[f64]) -> f64 {
        (self.f_hf)(x)
    }

    pub fn lf(&self, x: &[f64]) -> f64 {
        (self.f_lf)(x)
    }
}

const IDS: [&str; 10] = [
    "forrester", "no1", "no2", "no3", "no4", "no5", "no6", "no7", "no8", "no9",
];

pub fn problem_ids() -> &'static [&'static str] {
    &IDS
}

pub fn get_problem(id: &str) -> Result<BiFidelityProblem> {
    let id_static = IDS
        .iter()
        .copied()
        .find(|k| *k == id)
        .ok_or_else(|| Error::UnknownProblem(id.to_string()))?;
    let (domain, f_hf, f_lf): (Domain, Evaluator, Evaluator) = match id_static {
        "forrester" => (Domain::hypercube(1, 0.0, 1.0)?, forrester_hf, forrester_lf),
        "no1" => (Domain::hypercube(2, -2.0, 2.0)?, no1_hf, no1_lf),
        "no2" => (Domain::new(vec![-5.0, 0.0], vec![10.0, 15.0])?, no2_hf, no2_lf),
        "no3" => (Domain::hypercube(4, -4.0, 4.0)?, no3_hf, no3_lf),
        "no4" => (Domain::hypercube(10, -5.0, 5.0)?, no4_hf, no4_lf),
        "no5" => (Domain::hypercube(10, -3.0, 3.0)?, no5_hf, no5_lf),
        "no6" => (Domain::hypercube(10, -10.0, 11.0)?, no6_hf, no6_lf),
        "no7" => (Domain::hypercube(16, -5.0, 5.0)?, no7_hf, no7_lf),
        "no8" => (Domain::hypercube(30, -3.0, 3.0)?, no8_hf, no8_lf),
        "no9" => (Domain::hypercube(50, -2.0, 4.0)?, no9_hf, no9_lf),
        _ => unreachable!("ids are listed above"),
    };
    Ok(BiFidelityProblem {
        id: id_static,
        d: domain.dim(),
        domain,
        f_hf,
        f_lf,
    })
}

fn forrester_hf(x: &[f64]) -> f64 {
    let t = x[0];
    (6.0 * t - 2.0).powi(2) * (12.0 * t - 4.0).sin()
}

fn forrester_lf(x: &[f64]) -> f64 {
    0.5 * forrester_hf(x) + 10.0 * (x[0] - 0.5) - 5.0
}

fn no1_hf(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    4.0 * a * a - 2.1 * a.powi(4) + a.powi(6) / 3.0 + a * b - 4.0 * b * b + 4.0 * b.powi(4)
}

fn no1_lf(x: &[f64]) -> f64 {
    no1_hf(&[0.7 * x[0], 0.7 * x[1]]) + x[0] * x[1] - 65.0
}

// Signs follow the reference table, which differs from the textbook Branin.
fn no2_hf(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    (b - 1.275 * (a / PI).powi(2) - 5.0 * a / PI - 6.0).powi(2) + 10.0 * (1.0 - 0.125 / PI) * a.cos()
}

fn no2_lf(x: &[f64]) -> f64 {
    0.8 * no2_hf(x) - 2.5 * x[1] - 30.0
}

// The x3/x4 terms are unsquared as in the reference table.
fn no3_hf(x: &[f64]) -> f64 {
    let a: Vec<f64> = x.iter().map(|v| v - 1.0).collect();
    100.0 * (x[0] * x[0] - x[1]).powi(2)
        + a[0] * a[0]
        + a[2] * a[2]
        + 90.0 * (x[2] * x[2] - x[3])
        + 10.1 * (a[1] * a[1] + a[3] * a[3])
        + 19.8 * a[1] * a[3]
}

fn no3_lf(x: &[f64]) -> f64 {
    let a1 = 0.9 * x[0] - 1.0;
    let a3 = 0.9 * x[2] - 1.0;
    let a2 = 0.5 * x[1] - 1.0;
    let a4 = 0.5 * x[3] - 1.0;
    90.0 * (x[0] * x[0] - x[1]).powi(2)
        + a1 * a1
        + a3 * a3
        + 50.0 * (x[2] * x[2] - x[3])
        + 5.0 * (a2 * a2 + a4 * a4)
        + 10.0 * a2 * a4
}

const NO4_A: [f64; 10] = [
    -6.089, -17.164, -34.054, -5.914, -24.721, -14.986, -24.100, -10.708, -26.662, -22.179,
];
const NO4_B: [f64; 10] = [-5.0, -10.0, -30.0, -5.0, -25.0, -15.0, -20.0, -10.0, -25.0, -20.0];

fn log_sum_exp_weighted(x: &[f64], coef: &[f64; 10]) -> f64 {
    let lse = x.iter().map(|v| v.exp()).sum::<f64>().ln();
    x.iter()
        .zip(coef)
        .map(|(v, c)| v.exp() * (c + v - lse))
        .sum()
}

fn no4_hf(x: &[f64]) -> f64 {
    log_sum_exp_weighted(x, &NO4_A)
}

fn no4_lf(x: &[f64]) -> f64 {
    log_sum_exp_weighted(x, &NO4_B)
}

fn no5_hf(x: &[f64]) -> f64 {
    (0..9)
        .map(|i| (x[i + 1] * x[i + 1] - x[i]).powi(2) + (x[i] - 1.0).powi(2))
        .sum()
}

fn no5_lf(x: &[f64]) -> f64 {
    (0..9)
        .map(|i| 0.9 * x[i + 1].powi(4) + 2.2 * x[i] * x[i] - 1.8 * x[i] * x[i + 1] + 0.5)
        .sum()
}

fn no6_hf(x: &[f64]) -> f64 {
    x[0] * x[0] + x[1] * x[1] + x[0] * x[1] - 14.0 * x[0] - 16.0 * x[1]
        + (x[2] - 10.0).powi(2)
        + 4.0 * (x[3] - 5.0).powi(2)
        + (x[4] - 3.0).powi(2)
        + 2.0 * (x[5] - 1.0).powi(2)
        + 5.0 * x[6] * x[6]
        + 7.0 * (x[7] - 11.0).powi(2)
        + 2.0 * (x[8] - 10.0).powi(2)
        + (x[9] - 7.0).powi(2)
        + 45.0
}

fn no6_lf(x: &[f64]) -> f64 {
    0.8 * no6_hf(x) - x.iter().sum::<f64>() + 100.0
}

fn chained(x: &[f64]) -> f64 {
    (x[0] - 1.0).powi(2)
        + (1..x.len())
            .map(|i| (i + 1) as f64 * (2.0 * x[i] * x[i] - x[i - 1]).powi(2))
            .sum::<f64>()
}

fn no7_hf(x: &[f64]) -> f64 {
    chained(&x[..16])
}

fn no7_lf(x: &[f64]) -> f64 {
    0.9 * no7_hf(x) + 10.0
}

fn no8_hf(x: &[f64]) -> f64 {
    chained(&x[..30])
}

fn no8_lf(x: &[f64]) -> f64 {
    0.8 * no8_hf(x) - (0..29).map(|i| 0.4 * x[i] * x[i + 1]).sum::<f64>() - 50.0
}

fn no9_hf(x: &[f64]) -> f64 {
    x.iter()
        .take(50)
        .enumerate()
        .map(|(i, v)| (i + 1) as f64 * (v * v + v.powi(4)))
        .sum()
}

fn no9_lf(x: &[f64]) -> f64 {
    0.8 * no9_hf(x)
        - x.iter()
            .take(50)
            .enumerate()
            .map(|(i, v)| (i + 1) as f64 * v * v / 10.0 + v)
            .sum::<f64>()
        - 25.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::lhs;

    #[test]
    fn registry_dimensions() {
        let dims: Vec<usize> = problem_ids().iter().map(|id| get_problem(id).unwrap().d).collect();
        assert_eq!(dims, vec![1, 2, 2, 4, 10, 10, 10, 16, 30, 50]);
        assert!(matches!(get_problem("no10"), Err(Error::UnknownProblem(_))));
    }

    #[test]
    fn no6_at_origin() {
        let p = get_problem("no6").unwrap();
        let z = [0.0; 10];
        // 100 + 4*25 + 9 + 2 + 7*121 + 2*100 + 49 + 45
        assert_eq!(p.hf(&z), 1352.0);
        assert!((p.lf(&z) - 1181.6).abs() < 1e-9);
    }

    #[test]
    fn forrester_at_one() {
        let p = get_problem("forrester").unwrap();
        assert!((p.hf(&[1.0]) - 16.0 * 8f64.sin()).abs() < 1e-12);
        assert!((p.hf(&[1.0]) - 15.83).abs() < 5e-3);
        assert!((p.lf(&[1.0]) - (0.5 * 16.0 * 8f64.sin() + 5.0 - 5.0)).abs() < 1e-12);
    }

    #[test]
    fn spot_values() {
        // Hand-evaluated points.
        let p1 = get_problem("no1").unwrap();
        assert!((p1.hf(&[1.0, 1.0]) - (4.0 - 2.1 + 1.0 / 3.0 + 1.0 - 4.0 + 4.0)).abs() < 1e-12);
        let p3 = get_problem("no3").unwrap();
        assert!((p3.hf(&[1.0; 4]) - 0.0).abs() < 1e-12);
        let p5 = get_problem("no5").unwrap();
        assert_eq!(p5.hf(&[1.0; 10]), 0.0);
        assert!((p5.lf(&[1.0; 10]) - 9.0 * (0.9 + 2.2 - 1.8 + 0.5)).abs() < 1e-12);
        let p7 = get_problem("no7").unwrap();
        assert_eq!(p7.hf(&[0.0; 16]), 1.0);
        assert!((p7.lf(&[0.0; 16]) - 10.9).abs() < 1e-12);
        let p9 = get_problem("no9").unwrap();
        assert_eq!(p9.hf(&[1.0; 50]), 2.0 * (50.0 * 51.0 / 2.0));
        let p4 = get_problem("no4").unwrap();
        let lse = 10f64.ln();
        let expected: f64 = NO4_A.iter().map(|a| a - lse).sum();
        assert!((p4.hf(&[0.0; 10]) - expected).abs() < 1e-10);
    }

    #[test]
    fn all_finite_and_no6_transcription() {
        for id in problem_ids() {
            let p = get_problem(id).unwrap();
            let design = lhs(1000, &p.domain, 7).unwrap();
            for x in &design.points {
                assert!(p.hf(x).is_finite() && p.lf(x).is_finite(), "{id}");
            }
            if *id == "no6" {
                for x in &design.points {
                    let expect = 0.8 * p.hf(x) - x.iter().sum::<f64>() + 100.0;
                    assert!((p.lf(x) - expect).abs() <= 1e-9);
                }
            }
        }
    }
}
