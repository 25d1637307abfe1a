//! Acceptance gate. Runs serially (timing comparisons must not share cores)
//! and prints one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use hierkrig::benchlib::get_problem;
use hierkrig::harness::dataset::{ingest_dataset, write_dataset};
use hierkrig::harness::{run_benchmark, BenchReport, RunSpec};
use hierkrig::mic::{mic_pairwise, mic_screen};
use hierkrig::{
    concentrated_log_likelihood, hk_log_likelihood, lhs, tune, tune_hkhd, Domain, Fidelity, HkModel,
    HkObjective, KrigingModel, KrigingObjective, SampleSet, Strategy, Theta, TuningConfig,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn column(report: &BenchReport, problem: &str, strategy: Strategy, f: impl Fn(&hierkrig::harness::RunRow) -> f64) -> Vec<f64> {
    report.rows_for(problem, strategy).filter(|r| r.is_ok()).map(f).collect()
}

fn forrester_beta() -> Outcome {
    let mut spec = RunSpec::for_problem("forrester", vec![Strategy::Conventional, Strategy::Hd], 1, 0);
    spec.lf_sites = Some(
        [0.0, 0.1429, 0.2857, 0.4286, 0.5714, 0.7143, 0.8571, 1.0]
            .iter()
            .map(|v| vec![*v])
            .collect(),
    );
    spec.hf_sites = Some([0.0, 0.4, 0.6, 1.0].iter().map(|v| vec![*v]).collect());
    let start = Instant::now();
    let report = match run_benchmark(&spec) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let betas: Vec<(Strategy, f64)> = report.rows.iter().map(|r| (r.strategy, r.beta_star)).collect();
    let in_band = betas.len() == 2 && betas.iter().all(|(_, b)| (1.80..=1.95).contains(b));
    outcome(
        in_band && elapsed < 1.0,
        format!("beta* {betas:?}, {elapsed:.3} s"),
    )
}

fn no6_accuracy(report: &BenchReport, elapsed: f64) -> Outcome {
    let r2 = column(report, "no6", Strategy::Hd, |r| r.r2);
    let hd = column(report, "no6", Strategy::Hd, |r| r.rmse);
    let conv = column(report, "no6", Strategy::Conventional, |r| r.rmse);
    let conv_r2 = column(report, "no6", Strategy::Conventional, |r| r.r2);
    let ok = r2.len() == 10 && conv.len() == 10 && mean(&r2) >= 0.95 && mean(&hd) < mean(&conv) && elapsed < 120.0;
    outcome(
        ok,
        format!(
            "mean R2 HKHD {:.4} vs HKC {:.4}, mean RMSE HKHD {:.3} vs HKC {:.3}, {elapsed:.1} s, failed rows {}",
            mean(&r2),
            mean(&conv_r2),
            mean(&hd),
            mean(&conv),
            report.failed_count()
        ),
    )
}

fn speedup(reports: &[(&str, usize, &BenchReport)]) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (id, d, report) in reports {
        let t_hd = mean(&column(report, id, Strategy::Hd, |r| r.fit_time_s));
        let t_c = mean(&column(report, id, Strategy::Conventional, |r| r.fit_time_s));
        let ev_hd = column(report, id, Strategy::Hd, |r| (r.evals_lf + r.evals_hf) as f64);
        let ev_c = column(report, id, Strategy::Conventional, |r| (r.evals_lf + r.evals_hf) as f64);
        let max_hd = ev_hd.iter().cloned().fold(0.0, f64::max);
        let max_c = ev_c.iter().cloned().fold(0.0, f64::max);
        let ok = t_hd <= t_c / 3.0 && max_hd <= 2000.0 && max_c <= 1000.0 * *d as f64 && max_hd < max_c;
        pass &= ok && report.failed_count() == 0;
        detail.push(format!(
            "{id}: time HKHD {t_hd:.3} s vs HKC {t_c:.3} s (ratio {:.3}), max evals {max_hd} vs {max_c}",
            t_hd / t_c
        ));
    }
    outcome(pass, detail.join("; "))
}

fn mic_ranking() -> Outcome {
    let p = get_problem("no6").unwrap();
    let mut tops = Vec::new();
    for seed in 0..10 {
        let design = lhs(100, &p.domain, seed).unwrap();
        let y: Vec<f64> = design.points.iter().map(|x| p.lf(x)).collect();
        let set = SampleSet::from_physical(&p.domain, &design.points, &y, Fidelity::Low).unwrap();
        let omega = mic_screen(&set).unwrap().omega;
        let top = (0..omega.len()).max_by(|a, b| omega[*a].total_cmp(&omega[*b])).unwrap();
        tops.push(top + 1);
    }
    let x8 = tops.iter().filter(|t| **t == 8).count();
    let low = tops.iter().any(|t| *t <= 3);
    outcome(x8 >= 7 && !low, format!("top variable per seed {tops:?}"))
}

fn interpolation() -> Outcome {
    let ids = ["no1", "no2", "no3"];
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut skipped = 0;
    let mut seed = 0u64;
    while checked < 50 && seed < 200 {
        let p = get_problem(ids[(seed % 3) as usize]).unwrap();
        let d = p.d;
        let lf_x = lhs(10 * d, &p.domain, 1000 + seed).unwrap().points;
        let hf_x = lhs(5 * d, &p.domain, 2000 + seed).unwrap().points;
        let lf_y: Vec<f64> = lf_x.iter().map(|x| p.lf(x)).collect();
        let hf_y: Vec<f64> = hf_x.iter().map(|x| p.hf(x)).collect();
        let lf = SampleSet::from_physical(&p.domain, &lf_x, &lf_y, Fidelity::Low).unwrap();
        let hf = SampleSet::from_physical(&p.domain, &hf_x, &hf_y, Fidelity::High).unwrap();
        let strategy = if seed.is_multiple_of(2) { Strategy::Hd } else { Strategy::Conventional };
        seed += 1;
        let tuned = match tune(&lf, &hf, &TuningConfig::with_strategy(strategy, seed)) {
            Ok(t) => t,
            Err(e) => return outcome(false, format!("fit failed: {e}")),
        };
        let hk = &tuned.model;
        let lf_model = hk.lf_model();
        if lf_model.nugget() > 1e-10 || hk.nugget_hf() > 1e-10 {
            skipped += 1;
            continue;
        }
        let range = |v: &[f64]| {
            v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - v.iter().cloned().fold(f64::INFINITY, f64::min)
        };
        for (x, y) in lf_x.iter().zip(&lf_y) {
            worst = worst.max((lf_model.predict_physical(x).unwrap() - y).abs() / range(&lf_y));
        }
        for (x, y) in hf_x.iter().zip(&hf_y) {
            worst = worst.max((hk.predict_physical(x).unwrap() - y).abs() / range(&hf_y));
        }
        checked += 1;
    }
    outcome(
        checked == 50 && worst <= 1e-6,
        format!("{checked} HK fits (with their LF models), {skipped} skipped for nugget > 1e-10, worst error / range {worst:.3e}"),
    )
}

fn dense_corr(sites: &[Vec<f64>], theta: &[f64], nugget: f64) -> DMatrix<f64> {
    let m = sites.len();
    DMatrix::from_fn(m, m, |i, j| {
        let a2: f64 = (0..theta.len()).map(|l| theta[l] * (sites[i][l] - sites[j][l]).powi(2)).sum();
        let a = a2.sqrt();
        let s5 = 5f64.sqrt();
        let k = (1.0 + s5 * a + 5.0 * a2 / 3.0) * (-s5 * a).exp();
        if i == j { k + nugget } else { k }
    })
}

/// Concentrated likelihood by explicit inverse and determinant.
fn dense_profile(r: &DMatrix<f64>, y: &DVector<f64>, trend: &DVector<f64>) -> (f64, f64) {
    let m = y.len() as f64;
    let inv = r.clone().try_inverse().expect("invertible");
    let coef = (trend.transpose() * &inv * y)[0] / (trend.transpose() * &inv * trend)[0];
    let res = y - trend * coef;
    let s2 = ((res.transpose() * &inv * &res)[0] / m).max(1e-30);
    (coef, -0.5 * m * s2.ln() - 0.5 * r.determinant().ln())
}

fn likelihood_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let d = rng.random_range(1..=4);
        let m = rng.random_range(4..=20);
        let k = rng.random_range(3..=m.min(20));
        let dom = Domain::unit(d);
        let lf_x: Vec<Vec<f64>> = lhs(m, &dom, rng.random()).unwrap().points;
        let hf_x: Vec<Vec<f64>> = lhs(k, &dom, rng.random()).unwrap().points;
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| ((i + 2) as f64 * v).sin()).sum::<f64>();
        let lf_y: Vec<f64> = lf_x.iter().map(|x| f(x) + 0.3 * x[0]).collect();
        let hf_y: Vec<f64> = hf_x.iter().map(|x| 2.0 * f(x) + x[0] * x[0]).collect();
        let theta_lf = Theta::from_log10(&(0..d).map(|_| rng.random_range(0.0..2.0)).collect::<Vec<_>>());
        let theta_hf = Theta::from_log10(&(0..d).map(|_| rng.random_range(0.0..2.0)).collect::<Vec<_>>());
        let lf = SampleSet::from_unit(&dom, lf_x.clone(), &lf_y, Fidelity::Low).unwrap();
        let hf = SampleSet::from_unit(&dom, hf_x.clone(), &hf_y, Fidelity::High).unwrap();

        let lf_model = KrigingModel::fit(lf.clone(), theta_lf.clone()).unwrap();
        let r = dense_corr(&lf_x, theta_lf.values(), lf_model.nugget());
        let yc = DVector::from_vec(lf.responses().to_vec());
        let (mu, dense_ll) = dense_profile(&r, &yc, &DVector::from_element(m, 1.0));
        worst = worst.max((concentrated_log_likelihood(&lf, &theta_lf).unwrap() - dense_ll).abs());

        let inv = r.try_inverse().unwrap();
        let alpha = &inv * (&yc - DVector::from_element(m, mu));
        let hf_mean = mean(&hf_y);
        let trend = DVector::from_iterator(
            k,
            hf_x.iter().map(|x| {
                let rv = DVector::from_iterator(m, lf_x.iter().map(|s| dense_corr(&[x.clone(), s.clone()], theta_lf.values(), 0.0)[(0, 1)]));
                lf.response_mean() + mu + rv.dot(&alpha) - hf_mean
            }),
        );
        let hk_nugget = HkModel::fit(lf_model.clone(), hf.clone(), theta_hf.clone()).unwrap().nugget_hf();
        let rh = dense_corr(&hf_x, theta_hf.values(), hk_nugget);
        let yh = DVector::from_iterator(k, hf_y.iter().map(|v| v - hf_mean));
        let (_, dense_hk) = dense_profile(&rh, &yh, &trend);
        worst = worst.max((hk_log_likelihood(&lf_model, &hf, &theta_hf).unwrap() - dense_hk).abs());
    }
    outcome(worst <= 1e-8, format!("100 instances, worst |difference| {worst:.3e}"))
}

fn stage_monotonicity() -> Outcome {
    let mut runs = 0;
    let mut good = 0;
    let mut detail = String::new();
    for id in ["no2", "no6"] {
        let p = get_problem(id).unwrap();
        for seed in 0..10u64 {
            let lf_x = lhs(10 * p.d, &p.domain, 3 * seed + 1).unwrap().points;
            let hf_x = lhs(5 * p.d, &p.domain, 3 * seed + 2).unwrap().points;
            let lf_y: Vec<f64> = lf_x.iter().map(|x| p.lf(x)).collect();
            let hf_y: Vec<f64> = hf_x.iter().map(|x| p.hf(x)).collect();
            let lf = SampleSet::from_physical(&p.domain, &lf_x, &lf_y, Fidelity::Low).unwrap();
            let hf = SampleSet::from_physical(&p.domain, &hf_x, &hf_y, Fidelity::High).unwrap();
            runs += 1;
            let tuned = match tune_hkhd(&lf, &hf, &TuningConfig::with_strategy(Strategy::Hd, seed)) {
                Ok(t) => t,
                Err(e) => {
                    detail = format!("{id} seed {seed}: {e}");
                    continue;
                }
            };
            let lf_obj = KrigingObjective::new(&lf).unwrap();
            let seeded_lf = Theta::new(tuned.lf_trace.stage("lf_scale").unwrap().theta.clone()).unwrap();
            let lf_ok = lf_obj.evaluate(tuned.model.lf_model().theta()).unwrap() >= lf_obj.evaluate(&seeded_lf).unwrap();
            let hf_obj = HkObjective::new(tuned.model.lf_model(), &hf).unwrap();
            let seeded_hf = Theta::new(tuned.hf_trace.stage("hf_scale").unwrap().theta.clone()).unwrap();
            let hf_ok = hf_obj.evaluate(tuned.model.theta_hf()).unwrap() >= hf_obj.evaluate(&seeded_hf).unwrap();
            if lf_ok && hf_ok {
                good += 1;
            } else {
                detail = format!("{id} seed {seed}: lf {lf_ok} hf {hf_ok}");
            }
        }
    }
    outcome(good == runs, format!("{good}/{runs} runs monotone {detail}"))
}

fn mic_sanity() -> Outcome {
    let x = lhs(100, &Domain::unit(1), 8).unwrap().points.into_iter().map(|p| p[0]).collect::<Vec<_>>();
    let identity = mic_pairwise(&x, &x).unwrap();
    let mut worst_null: f64 = 0.0;
    for seed in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<f64> = (0..100).map(|_| rng.random()).collect();
        let mut other = ChaCha8Rng::seed_from_u64(seed + 1_000_000);
        let b: Vec<f64> = (0..100).map(|_| other.random()).collect();
        worst_null = worst_null.max(mic_pairwise(&a, &b).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let y: Vec<f64> = x.iter().map(|v| (6.0 * v).sin() + 0.2 * rng.random::<f64>()).collect();
    let ex: Vec<f64> = x.iter().map(|v| v.exp()).collect();
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    let base = mic_pairwise(&x, &y).unwrap();
    let drift = (mic_pairwise(&ex, &y).unwrap() - base)
        .abs()
        .max((mic_pairwise(&neg, &y).unwrap() - base).abs())
        .max((mic_pairwise(&neg, &neg).unwrap() - mic_pairwise(&x, &neg).unwrap()).abs());
    outcome(
        identity >= 0.99 && worst_null <= 0.35 && drift <= 1e-9,
        format!("y=x {identity:.4}, worst independent {worst_null:.4} over 50 seeds, transform drift {drift:.1e}"),
    )
}

fn size_trend() -> Outcome {
    let mut spec = RunSpec::for_problem("no6", vec![Strategy::Hd], 10, 9);
    spec.sizes = Some(vec![8, 12]);
    spec.timing = false;
    let report = match run_benchmark(&spec) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let small = mean(&column(&report, "no6@8d+4d", Strategy::Hd, |r| r.rmse));
    let large = mean(&column(&report, "no6@12d+6d", Strategy::Hd, |r| r.rmse));
    outcome(
        large <= small && report.failed_count() == 0,
        format!("mean RMSE 8d+4d {small:.3}, 12d+6d {large:.3}"),
    )
}

fn determinism_and_roundtrip() -> Outcome {
    let mut spec = RunSpec::for_problem("no2", vec![Strategy::Conventional, Strategy::Hd], 3, 7);
    spec.timing = false;
    let a = run_benchmark(&spec).unwrap().to_csv();
    let b = run_benchmark(&spec).unwrap().to_csv();
    let identical = a == b;

    let p = get_problem("no6").unwrap();
    let lf_x = lhs(100, &p.domain, 71).unwrap().points;
    let hf_x = lhs(50, &p.domain, 72).unwrap().points;
    let lf_y: Vec<f64> = lf_x.iter().map(|x| p.lf(x)).collect();
    let hf_y: Vec<f64> = hf_x.iter().map(|x| p.hf(x)).collect();
    let lf = SampleSet::from_physical(&p.domain, &lf_x, &lf_y, Fidelity::Low).unwrap();
    let hf = SampleSet::from_physical(&p.domain, &hf_x, &hf_y, Fidelity::High).unwrap();
    let tuned = tune_hkhd(&lf, &hf, &TuningConfig::with_strategy(Strategy::Hd, 1)).unwrap();
    let hk = tuned.model;
    let kr = hk.lf_model().clone();
    let hk2 = HkModel::from_json(&hk.to_json().unwrap()).unwrap();
    let kr2 = KrigingModel::from_json(&kr.to_json().unwrap()).unwrap();

    let dir = tempfile::tempdir().unwrap();
    write_dataset(&dir.path().join("lf.csv"), &lf_x, &lf_y).unwrap();
    write_dataset(&dir.path().join("hf.csv"), &hf_x, &hf_y).unwrap();
    let ing = ingest_dataset(&dir.path().join("lf.csv"), &dir.path().join("hf.csv"), Some(&p.domain)).unwrap();
    let lf_re = KrigingModel::fit(ing.lf, kr.theta().clone()).unwrap();
    let hk_re = HkModel::fit(lf_re, ing.hf, hk.theta_hf().clone()).unwrap();

    let queries = lhs(100, &p.domain, 73).unwrap().points;
    let mut worst: f64 = 0.0;
    for q in &queries {
        let h = hk.predict_physical(q).unwrap();
        worst = worst
            .max((h - hk2.predict_physical(q).unwrap()).abs())
            .max((kr.predict_physical(q).unwrap() - kr2.predict_physical(q).unwrap()).abs())
            .max((h - hk_re.predict_physical(q).unwrap()).abs());
    }
    outcome(
        identical && worst <= 1e-12,
        format!("report CSVs identical {identical}, worst round-trip difference {worst:.1e}"),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut record = |n: usize, name: &'static str, o: Outcome| {
        println!("{} criterion {n:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((n, name, o));
    };

    record(1, "forrester beta*", forrester_beta());

    let start = Instant::now();
    let no6 = run_benchmark(&RunSpec::for_problem("no6", vec![Strategy::Conventional, Strategy::Hd], 10, 2024)).unwrap();
    let no6_time = start.elapsed().as_secs_f64();
    record(2, "no6 accuracy", no6_accuracy(&no6, no6_time));

    let no7 = run_benchmark(&RunSpec::for_problem("no7", vec![Strategy::Conventional, Strategy::Hd], 10, 2025)).unwrap();
    record(3, "relative speedup", speedup(&[("no6", 10, &no6), ("no7", 16, &no7)]));

    record(4, "mic ranking", mic_ranking());
    record(5, "interpolation", interpolation());
    record(6, "likelihood oracle", likelihood_oracle());
    record(7, "stage monotonicity", stage_monotonicity());
    record(8, "mic sanity", mic_sanity());
    record(9, "sample-size trend", size_trend());
    record(10, "determinism and round-trips", determinism_and_roundtrip());

    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!("{}/{} criteria passed", results.len() - failed.len(), results.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
