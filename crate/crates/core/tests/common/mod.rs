#![allow(dead_code)]

use hierkrig::benchlib::get_problem;
use hierkrig::{lhs, Fidelity, SampleSet};
use nalgebra::{DMatrix, DVector};

/// LHS draws of both fidelities of a benchmark problem.
pub fn problem_sets(id: &str, n_lf: usize, n_hf: usize, seed: u64) -> (SampleSet, SampleSet) {
    let p = get_problem(id).unwrap();
    let lf_x = lhs(n_lf, &p.domain, seed).unwrap().points;
    let hf_x = lhs(n_hf, &p.domain, seed.wrapping_add(7919)).unwrap().points;
    let lf_y: Vec<f64> = lf_x.iter().map(|x| p.lf(x)).collect();
    let hf_y: Vec<f64> = hf_x.iter().map(|x| p.hf(x)).collect();
    (
        SampleSet::from_physical(&p.domain, &lf_x, &lf_y, Fidelity::Low).unwrap(),
        SampleSet::from_physical(&p.domain, &hf_x, &hf_y, Fidelity::High).unwrap(),
    )
}

/// Matérn 5/2 correlation matrix written out element by element.
pub fn dense_corr(sites: &[Vec<f64>], theta: &[f64], nugget: f64) -> DMatrix<f64> {
    let m = sites.len();
    DMatrix::from_fn(m, m, |i, j| {
        let k = dense_kernel(&sites[i], &sites[j], theta);
        if i == j { k + nugget } else { k }
    })
}

pub fn dense_kernel(a: &[f64], b: &[f64], theta: &[f64]) -> f64 {
    let a2: f64 = theta.iter().zip(a.iter().zip(b)).map(|(t, (u, v))| t * (u - v).powi(2)).sum();
    let r = a2.sqrt();
    let s5 = 5f64.sqrt();
    (1.0 + s5 * r + 5.0 * a2 / 3.0) * (-s5 * r).exp()
}

/// GLS coefficient and concentrated log-likelihood via an explicit inverse.
pub fn dense_profile(r: &DMatrix<f64>, y: &DVector<f64>, trend: &DVector<f64>) -> (f64, f64) {
    let m = y.len() as f64;
    let inv = r.clone().try_inverse().expect("invertible");
    let coef = (trend.transpose() * &inv * y)[0] / (trend.transpose() * &inv * trend)[0];
    let res = y - trend * coef;
    let s2 = ((res.transpose() * &inv * &res)[0] / m).max(1e-30);
    (coef, -0.5 * m * s2.ln() - 0.5 * r.determinant().ln())
}
