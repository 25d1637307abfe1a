//! Bound-clipped Nelder-Mead ascent with dimension-adaptive coefficients.

use super::Bounds;

/// Edge length of the initial simplex, in search units (decades for log-θ).
pub const INITIAL_STEP: f64 = 0.5;
const F_TOL: f64 = 1e-10;
const X_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalOptimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub start_value: f64,
    pub evals: usize,
}

/// Maximizes `objective` from `start` within `bounds`, using at most
/// `budget` evaluations (the start costs one). The returned value is never
/// below the start value.
pub fn local_refine<F>(mut objective: F, start: &[f64], bounds: Bounds, budget: usize) -> LocalOptimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    let x0: Vec<f64> = start.iter().map(|v| bounds.clip(*v)).collect();
    let mut evals = 0usize;
    // Minimize the negated objective; failures become +inf.
    let mut f = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = objective(x);
        if v.is_finite() {
            -v
        } else {
            f64::INFINITY
        }
    };
    let f0 = f(&x0, &mut evals);
    let start_value = -f0;
    if n == 0 || budget <= 1 {
        return LocalOptimum {
            x: x0,
            value: start_value,
            start_value,
            evals,
        };
    }

    let nf = n as f64;
    let alpha = 1.0;
    let gamma = 1.0 + 2.0 / nf;
    let rho = 0.75 - 1.0 / (2.0 * nf);
    let sigma = 1.0 - 1.0 / nf;

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.clone(), f0));
    for i in 0..n {
        if evals >= budget {
            break;
        }
        let mut v = x0.clone();
        let up = v[i] + INITIAL_STEP;
        v[i] = if up <= bounds.hi { up } else { v[i] - INITIAL_STEP };
        v[i] = bounds.clip(v[i]);
        let fv = f(&v, &mut evals);
        simplex.push((v, fv));
    }

    if simplex.len() == n + 1 {
        while evals < budget {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = simplex[0].1;
            let worst = simplex[n].1;
            let spread = simplex
                .iter()
                .skip(1)
                .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0f64, f64::max);
            if (worst - best).abs() <= F_TOL * (1.0 + best.abs()) && spread <= X_TOL {
                break;
            }

            let mut centroid = vec![0.0; n];
            for (v, _) in &simplex[..n] {
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x / nf;
                }
            }
            let toward = |coef: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| bounds.clip(c + coef * (c - w)))
                    .collect()
            };

            let xr = toward(alpha);
            let fr = f(&xr, &mut evals);
            if fr < simplex[0].1 {
                if evals >= budget {
                    simplex[n] = (xr, fr);
                    break;
                }
                let xe = toward(gamma);
                let fe = f(&xe, &mut evals);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            if evals >= budget {
                break;
            }
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = toward(alpha * rho);
                let fc = f(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = toward(-rho);
                let fc = f(&xc, &mut evals);
                (xc, fc)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
                continue;
            }
            // Shrink toward the best vertex.
            let best_x = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                if evals >= budget {
                    break;
                }
                let v: Vec<f64> = best_x
                    .iter()
                    .zip(&vertex.0)
                    .map(|(b, x)| bounds.clip(b + sigma * (x - b)))
                    .collect();
                let fv = f(&v, &mut evals);
                *vertex = (v, fv);
            }
        }
    }

    let (bx, bf) = simplex
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("simplex holds the start");
    if bf < f0 {
        LocalOptimum {
            x: bx,
            value: -bf,
            start_value,
            evals,
        }
    } else {
        LocalOptimum {
            x: x0,
            value: start_value,
            start_value,
            evals,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: Bounds = Bounds { lo: -4.0, hi: 2.0 };

    #[test]
    fn start_at_optimum_is_kept() {
        let f = |x: &[f64]| -(x[0] - 0.5).powi(2) - 2.0 * (x[1] + 1.0).powi(2);
        let r = local_refine(f, &[0.5, -1.0], B, 500);
        assert_eq!(r.value, 0.0);
        assert_eq!(r.x, vec![0.5, -1.0]);
    }

    #[test]
    fn tied_coordinates_come_apart() {
        // Separable objective with optima at -2 and 1; the start ties both at -0.5.
        let f = |x: &[f64]| -(x[0] + 2.0).powi(2) - (x[1] - 1.0).powi(2);
        let r = local_refine(f, &[-0.5, -0.5], B, 500);
        assert!(r.value > r.start_value);
        assert!((r.x[0] + 2.0).abs() < 1e-3 && (r.x[1] - 1.0).abs() < 1e-3, "{:?}", r.x);
    }

    #[test]
    fn never_worse_than_start_and_within_budget() {
        let f = |x: &[f64]| x.iter().map(|v| (3.0 * v).sin()).sum::<f64>();
        for budget in [1, 2, 5, 50, 500] {
            let mut calls = 0;
            let start = [0.2, -1.3, 1.9, -3.0];
            let r = local_refine(
                |x| {
                    calls += 1;
                    f(x)
                },
                &start,
                B,
                budget,
            );
            assert!(r.value >= f(&start));
            assert!(calls <= budget);
            assert_eq!(r.evals, calls);
            assert!(r.x.iter().all(|v| (B.lo..=B.hi).contains(v)));
        }
    }

    #[test]
    fn infeasible_neighbourhood_returns_start() {
        let f = |x: &[f64]| if x[0] == 0.0 { 1.0 } else { f64::NEG_INFINITY };
        let r = local_refine(f, &[0.0], B, 100);
        assert_eq!(r.x, vec![0.0]);
        assert_eq!(r.value, 1.0);
    }
}
