//! Bounded scalar maximization (golden section with parabolic steps).

use super::Bounds;
use crate::error::{Error, Result};

/// Location tolerance of each bracket search, in the search variable's units.
pub const SCALAR_XTOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarOptimum {
    pub x: f64,
    pub value: f64,
    pub evals: usize,
}

/// Brent's bounded minimizer on `[a, b]`, stopping after `max_evals` calls.
fn brent_bounded<F>(f: &mut F, mut a: f64, mut b: f64, xtol: f64, max_evals: usize) -> ScalarOptimum
where
    F: FnMut(f64) -> f64,
{
    let golden = 0.5 * (3.0 - 5f64.sqrt());
    let sqrt_eps = f64::EPSILON.sqrt();
    let mut call = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::MAX
        }
    };

    let mut fulc = a + golden * (b - a);
    let mut nfc = fulc;
    let mut xf = fulc;
    let mut rat: f64 = 0.0;
    let mut e: f64 = 0.0;
    let mut fx = call(xf);
    let mut evals = 1;
    let mut ffulc = fx;
    let mut fnfc = fx;
    let mut xm = 0.5 * (a + b);
    let mut tol1 = sqrt_eps * xf.abs() + xtol / 3.0;
    let mut tol2 = 2.0 * tol1;

    while (xf - xm).abs() > tol2 - 0.5 * (b - a) && evals < max_evals {
        let mut golden_step = true;
        if e.abs() > tol1 {
            golden_step = false;
            let mut r = (xf - nfc) * (fx - ffulc);
            let mut q = (xf - fulc) * (fx - fnfc);
            let mut p = (xf - fulc) * q - (xf - nfc) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            r = e;
            e = rat;
            if p.is_finite()
                && q.is_finite()
                && p.abs() < (0.5 * q * r).abs()
                && p > q * (a - xf)
                && p < q * (b - xf)
            {
                rat = p / q;
                let x = xf + rat;
                if (x - a) < tol2 || (b - x) < tol2 {
                    let si = if xm - xf >= 0.0 { 1.0 } else { -1.0 };
                    rat = tol1 * si;
                }
            } else {
                golden_step = true;
            }
        }
        if golden_step {
            e = if xf >= xm { a - xf } else { b - xf };
            rat = golden * e;
        }
        let si = if rat >= 0.0 { 1.0 } else { -1.0 };
        let x = xf + si * rat.abs().max(tol1);
        let fu = call(x);
        evals += 1;

        if fu <= fx {
            if x >= xf {
                a = xf;
            } else {
                b = xf;
            }
            fulc = nfc;
            ffulc = fnfc;
            nfc = xf;
            fnfc = fx;
            xf = x;
            fx = fu;
        } else {
            if x < xf {
                a = x;
            } else {
                b = x;
            }
            if fu <= fnfc || nfc == xf {
                fulc = nfc;
                ffulc = fnfc;
                nfc = x;
                fnfc = fu;
            } else if fu <= ffulc || fulc == xf || fulc == nfc {
                fulc = x;
                ffulc = fu;
            }
        }
        xm = 0.5 * (a + b);
        tol1 = sqrt_eps * xf.abs() + xtol / 3.0;
        tol2 = 2.0 * tol1;
    }
    ScalarOptimum {
        x: xf,
        value: fx,
        evals,
    }
}

/// Maximizes a scalar function on `bounds` with at most `budget` calls.
///
/// The interval is split into `segments` equal pieces, each searched with an
/// equal share of the budget; the best result is kept.
pub fn oned_maximize<F>(mut objective: F, bounds: Bounds, budget: usize, segments: usize) -> Result<ScalarOptimum>
where
    F: FnMut(f64) -> f64,
{
    let segments = segments.max(1);
    if budget < segments {
        return Err(Error::Input(format!(
            "scalar budget {budget} is smaller than the {segments} segments"
        )));
    }
    let share = budget / segments;
    let width = (bounds.hi - bounds.lo) / segments as f64;
    let mut best: Option<ScalarOptimum> = None;
    let mut evals = 0;
    let mut neg = |x: f64| -objective(x);
    for k in 0..segments {
        let a = bounds.lo + k as f64 * width;
        let b = if k + 1 == segments { bounds.hi } else { a + width };
        let r = brent_bounded(&mut neg, a, b, SCALAR_XTOL, share);
        evals += r.evals;
        if best.is_none_or(|cur| r.value < cur.value) {
            best = Some(r);
        }
    }
    let best = best.expect("at least one segment");
    if best.value == f64::MAX {
        return Err(Error::TuningFailed(
            "scalar search found no finite likelihood".into(),
        ));
    }
    Ok(ScalarOptimum {
        x: bounds.clip(best.x),
        value: -best.value,
        evals,
    })
}
