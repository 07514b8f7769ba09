//! Order-statistic estimators of CRE and conditional CRE.
//!
//! The empirical CRE of `x_1..x_N` integrates `-F̄ ln F̄` of the empirical
//! survival function, which collapses to a weighted sum over sample spacings:
//!
//! ```text
//! Ê(X) = -Σ_{i=1}^{N-1} (x_(i+1) - x_(i)) (1 - i/N) ln(1 - i/N)
//! ```
//!
//! Conditional CRE given one variable sorts the pairs by the conditioning
//! variable, cuts the order statistic into grids of `m` consecutive samples
//! and averages the within-grid CRE of the response, weighted by grid size.
//! Given two variables, each conditioning variable is cut into equal-count
//! grids by rank and the response is binned into the `I × J` intersections.
//!
//! When the grid size does not divide `N`, the trailing samples are merged
//! into the last grid.

use serde::{Deserialize, Serialize};

use crate::error::{GsaError, Result};
use crate::exec::Execution;

/// Grid hyper-parameters of the conditional estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridParams {
    /// Samples per grid when conditioning on one variable.
    pub m: usize,
    /// Grid count for the first of two conditioning variables.
    pub i: usize,
    /// Grid count for the second of two conditioning variables.
    pub j: usize,
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams {
            m: 500,
            i: 20,
            j: 20,
        }
    }
}

impl GridParams {
    pub fn new(m: usize, i: usize, j: usize) -> Result<Self> {
        let g = GridParams { m, i, j };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 2 || self.i < 2 || self.j < 2 {
            return Err(GsaError::InvalidParameter(format!(
                "grid parameters must be at least 2, got m={}, I={}, J={}",
                self.m, self.i, self.j
            )));
        }
        Ok(())
    }
}

/// Empirical CRE of an unordered sample.
pub fn empirical_cre(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(GsaError::TooFewSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(cre_of_sorted(&sorted))
}

/// Empirical CRE of an ascending sample. Fewer than two values give zero.
pub fn cre_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    let mut acc = 0.0;
    for i in 1..n {
        let p = 1.0 - i as f64 / nf;
        let spacing = sorted[i] - sorted[i - 1];
        acc -= spacing * p * p.ln();
    }
    acc
}

/// Indices `0..n` ordered by `values`, ties broken by index.
pub(crate) fn argsort(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    // stable sort keeps equal values in index order
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx
}

/// Grid index of every sample, by rank, for `grids` equal-count grids with
/// the remainder merged into the last one.
pub(crate) fn rank_grids(values: &[f64], grids: usize) -> Vec<usize> {
    let n = values.len();
    let size = n / grids;
    let mut out = vec![0; n];
    for (rank, &idx) in argsort(values).iter().enumerate() {
        out[idx] = (rank / size).min(grids - 1);
    }
    out
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(GsaError::LengthMismatch { left: a, right: b });
    }
    Ok(())
}

/// Conditional CRE of `y` given `x` with `m` samples per grid.
pub fn conditional_cre_1(x: &[f64], y: &[f64], m: usize) -> Result<f64> {
    conditional_cre_1_with(x, y, m, Execution::default())
}

pub fn conditional_cre_1_with(x: &[f64], y: &[f64], m: usize, exec: Execution) -> Result<f64> {
    check_lengths(x.len(), y.len())?;
    let n = x.len();
    if m < 2 {
        return Err(GsaError::InvalidParameter(format!(
            "grid size m must be at least 2, got {m}"
        )));
    }
    if m > n {
        return Err(GsaError::GridTooLarge {
            cells: m,
            samples: n,
        });
    }
    let order = argsort(x);
    let grids = n / m;
    let terms = exec.map_range(grids, |g| {
        let start = g * m;
        let end = if g + 1 == grids { n } else { start + m };
        let mut ys: Vec<f64> = order[start..end].iter().map(|&r| y[r]).collect();
        ys.sort_unstable_by(f64::total_cmp);
        (end - start) as f64 * cre_of_sorted(&ys)
    });
    Ok(terms.iter().sum::<f64>() / n as f64)
}

/// Conditional CRE of `y` given the pair `(x1, x2)` on an `I × J` rank grid.
pub fn conditional_cre_2(
    x1: &[f64],
    x2: &[f64],
    y: &[f64],
    i_grids: usize,
    j_grids: usize,
) -> Result<f64> {
    conditional_cre_2_with(x1, x2, y, i_grids, j_grids, Execution::default())
}

pub fn conditional_cre_2_with(
    x1: &[f64],
    x2: &[f64],
    y: &[f64],
    i_grids: usize,
    j_grids: usize,
    exec: Execution,
) -> Result<f64> {
    check_lengths(x1.len(), y.len())?;
    check_lengths(x2.len(), y.len())?;
    let n = y.len();
    if i_grids < 2 || j_grids < 2 {
        return Err(GsaError::InvalidParameter(format!(
            "grid counts must be at least 2, got I={i_grids}, J={j_grids}"
        )));
    }
    let cells = i_grids.saturating_mul(j_grids);
    if cells > n {
        return Err(GsaError::GridTooLarge { cells, samples: n });
    }
    let (g1, g2) = match exec {
        Execution::Parallel => join(exec, || rank_grids(x1, i_grids), || rank_grids(x2, j_grids)),
        Execution::Sequential => (rank_grids(x1, i_grids), rank_grids(x2, j_grids)),
    };
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); cells];
    for k in 0..n {
        buckets[g1[k] * j_grids + g2[k]].push(y[k]);
    }
    let terms = exec.map_slice(&buckets, |cell| {
        let mut ys = cell.clone();
        ys.sort_unstable_by(f64::total_cmp);
        ys.len() as f64 * cre_of_sorted(&ys)
    });
    Ok(terms.iter().sum::<f64>() / n as f64)
}

fn join<A, B, FA, FB>(exec: Execution, fa: FA, fb: FB) -> (A, B)
where
    A: Send,
    B: Send,
    FA: FnOnce() -> A + Send,
    FB: FnOnce() -> B + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => rayon::join(fa, fb),
        _ => (fa(), fb()),
    }
}
