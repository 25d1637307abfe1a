//! Maximal information coefficient between each input and the response.
//!
//! Grid search follows the approximate MINE scheme: one axis is split into
//! equal-frequency rows, the other axis is optimized by dynamic programming
//! over clump boundaries, and both orientations are tried. Only orderings
//! matter, so the statistic is invariant under monotone transforms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kriging::SampleSet;

/// Exponent of the grid-size bound `n^α`.
pub const GRID_EXPONENT: f64 = 0.6;
/// Clump factor: at most `c·p` superclumps when optimizing `p` columns.
pub const CLUMP_FACTOR: usize = 15;
/// Relative floor applied to screened MIC values.
pub const OMEGA_FLOOR_FRACTION: f64 = 0.01;
pub const MIN_SAMPLES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicResult {
    /// Floored MIC value per input variable.
    pub omega: Vec<f64>,
    /// Raw MIC values before flooring.
    pub raw: Vec<f64>,
    /// Grid-size bound used.
    pub grid_bound: usize,
    /// Grid shape (columns on the input, rows on the response) that attained each maximum.
    pub per_variable_grid: Vec<(usize, usize)>,
}

/// Largest admissible cell count `a·b`. Shapes are compared against the real
/// value `n^α`, which for integer products is its floor (as minepy does).
pub fn grid_bound(n: usize) -> usize {
    ((n as f64).powf(GRID_EXPONENT).floor() as usize).max(4)
}

/// MIC of two paired samples, in `[0, 1]`.
pub fn mic_pairwise(x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(mic_with_grid(x, y)?.0)
}

fn mic_with_grid(x: &[f64], y: &[f64]) -> Result<(f64, (usize, usize))> {
    if x.len() != y.len() {
        return Err(Error::Input(format!(
            "paired samples differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < MIN_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_SAMPLES,
            got: n,
        });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Input("non-finite value in MIC input".into()));
    }
    if is_constant(x) || is_constant(y) {
        return Ok((0.0, (2, 2)));
    }
    let b = grid_bound(n);
    let xr = dense_ranks(x);
    let yr = dense_ranks(y);
    let (s1, (c1, r1)) = best_normalized_mi(&xr, &yr, b);
    let (s2, (c2, r2)) = best_normalized_mi(&yr, &xr, b);
    // The transposed orientation puts the response on the column axis.
    if s2 > s1 {
        Ok((s2.min(1.0), (r2, c2)))
    } else {
        Ok((s1.min(1.0), (c1, r1)))
    }
}

/// Screens every input column of a sample set against its responses.
pub fn mic_screen(samples: &SampleSet) -> Result<MicResult> {
    let n = samples.len();
    let y = samples.responses();
    let mut raw = Vec::with_capacity(samples.dim());
    let mut grids = Vec::with_capacity(samples.dim());
    for j in 0..samples.dim() {
        let col: Vec<f64> = samples.sites().iter().map(|s| s[j]).collect();
        let (v, g) = mic_with_grid(&col, y)?;
        raw.push(v);
        grids.push(g);
    }
    Ok(MicResult {
        omega: apply_floor(&raw),
        raw,
        grid_bound: grid_bound(n),
        per_variable_grid: grids,
    })
}

/// `ω_l ← max(ω_l, 0.01·max ω)`; an all-zero vector floors to 0.01 everywhere.
pub fn apply_floor(raw: &[f64]) -> Vec<f64> {
    let top = raw.iter().copied().fold(0.0f64, f64::max);
    let floor = OMEGA_FLOOR_FRACTION * if top > 0.0 { top } else { 1.0 };
    raw.iter().map(|v| v.max(floor)).collect()
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|a| *a == v[0])
}

/// Dense ranks (ties share a rank).
fn dense_ranks(v: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0usize; v.len()];
    let mut rank = 0;
    for w in 0..order.len() {
        if w > 0 && v[order[w]] != v[order[w - 1]] {
            rank += 1;
        }
        ranks[order[w]] = rank;
    }
    ranks
}

/// Best `I(p, q) / ln(min(p, q))` over shapes with `p·q ≤ b`, rows on `rows_of`.
fn best_normalized_mi(cols_of: &[usize], rows_of: &[usize], b: usize) -> (f64, (usize, usize)) {
    let mut best = 0.0;
    let mut shape = (2, 2);
    for q in 2..=(b / 2) {
        let max_cols = b / q;
        if max_cols < 2 {
            break;
        }
        let rows = equipartition(rows_of, q);
        let per_cols = optimize_columns(cols_of, &rows, max_cols);
        for (p, mi) in per_cols.into_iter().enumerate().skip(2) {
            let score = mi / (p.min(q) as f64).ln();
            if score > best {
                best = score;
                shape = (p, q);
            }
        }
    }
    (best, shape)
}

/// Equal-frequency partition into (at most) `q` rows; tied values share a row.
fn equipartition(ranks: &[usize], q: usize) -> Vec<usize> {
    let n = ranks.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| ranks[i]);
    let mut row_of = vec![0usize; n];
    let mut desired = n as f64 / q as f64;
    let mut current = 0usize;
    let mut size = 0usize;
    let mut i = 0;
    while i < n {
        let mut s = 1;
        while i + s < n && ranks[order[i + s]] == ranks[order[i]] {
            s += 1;
        }
        let with = (size as f64 + s as f64 - desired).abs();
        let without = (size as f64 - desired).abs();
        if size != 0 && with >= without && current + 1 < q {
            current += 1;
            size = 0;
            desired = (n - i) as f64 / (q - current) as f64;
        }
        for &idx in &order[i..i + s] {
            row_of[idx] = current;
        }
        size += s;
        i += s;
    }
    row_of
}

/// For a fixed row assignment, the maximal mutual information (nats) reachable
/// with at most `p` columns, for every `p` in `0..=max_cols` (entries 0, 1 unused).
fn optimize_columns(cols_of: &[usize], row_of: &[usize], max_cols: usize) -> Vec<f64> {
    let n = cols_of.len();
    let n_rows = row_of.iter().copied().max().unwrap_or(0) + 1;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| cols_of[i]);

    // Clumps: maximal runs (in column order) sharing a row; tied column
    // values spanning several rows form a clump of their own.
    let mut labels = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let mut s = 1;
        while i + s < n && cols_of[order[i + s]] == cols_of[order[i]] {
            s += 1;
        }
        let first = row_of[order[i]];
        let uniform = order[i..i + s].iter().all(|&k| row_of[k] == first);
        let label = if uniform { Some(first) } else { None };
        for &k in &order[i..i + s] {
            labels.push((label, k));
        }
        i += s;
    }
    let mut clump_ends = Vec::new();
    for w in 1..n {
        let (la, ka) = labels[w - 1];
        let (lb, kb) = labels[w];
        let same_tie = cols_of[ka] == cols_of[kb];
        let split = match (la, lb) {
            (Some(a), Some(b)) => a != b && !same_tie,
            _ => !same_tie,
        };
        if split {
            clump_ends.push(w);
        }
    }
    clump_ends.push(n);

    let limit = CLUMP_FACTOR * max_cols;
    let ends = if clump_ends.len() > limit {
        superclumps(&clump_ends, n, limit)
    } else {
        clump_ends
    };

    // Row counts for each prefix of groups.
    let k = ends.len();
    let mut prefix = vec![vec![0usize; n_rows]; k + 1];
    let mut start = 0;
    for (g, &end) in ends.iter().enumerate() {
        let mut counts = prefix[g].clone();
        for &(_, idx) in &labels[start..end] {
            counts[row_of[idx]] += 1;
        }
        prefix[g + 1] = counts;
        start = end;
    }
    let bounds: Vec<usize> = std::iter::once(0).chain(ends.iter().copied()).collect();

    // cost[s][t]: column holding groups s..t, weighted conditional entropy (count · H(rows | column)).
    let mut cost = vec![vec![0.0f64; k + 1]; k + 1];
    for s in 0..k {
        for t in (s + 1)..=k {
            let total = (bounds[t] - bounds[s]) as f64;
            let mut h = 0.0;
            for r in 0..n_rows {
                let c = (prefix[t][r] - prefix[s][r]) as f64;
                if c > 0.0 {
                    h -= c * (c / total).ln();
                }
            }
            cost[s][t] = h;
        }
    }

    let mut h_rows = 0.0;
    for r in 0..n_rows {
        let c = prefix[k][r] as f64;
        if c > 0.0 {
            h_rows -= (c / n as f64) * (c / n as f64).ln();
        }
    }

    // prev[t]: least cost of splitting the first t groups into at most l - 1 columns.
    let mut out = vec![0.0; max_cols + 1];
    let mut prev: Vec<f64> = (0..=k).map(|t| cost[0][t]).collect();
    for l in 2..=max_cols {
        let mut next = prev.clone();
        for t in 2..=k {
            for s in 1..t {
                let v = prev[s] + cost[s][t];
                if v < next[t] {
                    next[t] = v;
                }
            }
        }
        out[l] = (h_rows - next[k] / n as f64).max(0.0);
        prev = next;
    }
    out
}

/// Merges clumps into about `limit` groups of near-equal size.
fn superclumps(clump_ends: &[usize], n: usize, limit: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(limit);
    let mut desired = n as f64 / limit as f64;
    let mut start = 0usize;
    let mut prev_end = 0usize;
    for &end in clump_ends {
        let size = prev_end - start;
        let with = (end - start) as f64 - desired;
        if size > 0 && with.abs() >= (size as f64 - desired).abs() && out.len() + 1 < limit {
            out.push(prev_end);
            start = prev_end;
            let remaining = (limit - out.len()).max(1);
            desired = (n - start) as f64 / remaining as f64;
        }
        prev_end = end;
    }
    out.push(n);
    out
}
