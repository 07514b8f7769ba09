//! CRE-based importance measures.
//!
//! For output `Y` and input `X_i`:
//!
//! ```text
//! κ_i  = 1 - E(Y|X_i) / E(Y)
//! CRMI = E(Y) - E(Y|X_i)
//! κ_ij = [E(Y|X_i) + E(Y|X_j) - E(Y|X_i,X_j) - E(Y)] / E(Y)
//! ```
//!
//! where `E` is the cumulative residual entropy. With independent inputs the
//! single, pairwise and higher-order terms sum to one; terms of order three
//! and above are reported only as that complement.
//!
//! Finite-sample estimates can leave the theoretical ranges `[0, 1]` (κ_i)
//! and `[0, 1)` (κ_ij). Reported values are clipped and the raw estimates are
//! kept alongside.

use serde::{Deserialize, Serialize};

use crate::error::{GsaError, Result};
use crate::estimators::{
    conditional_cre_1_with, conditional_cre_2_with, empirical_cre, GridParams,
};
use crate::exec::Execution;
use crate::rng::RngSeed;
use crate::sample::SampleMatrix;

/// Largest reportable pair contribution.
const PAIR_UPPER: f64 = 1.0 - f64::EPSILON;

fn output_cre(samples: &SampleMatrix) -> Result<f64> {
    let total = empirical_cre(samples.output())?;
    if total <= 0.0 {
        return Err(GsaError::DegenerateOutput);
    }
    Ok(total)
}

fn conditional_on(
    samples: &SampleMatrix,
    i: usize,
    grid: &GridParams,
    exec: Execution,
) -> Result<f64> {
    conditional_cre_1_with(samples.column(i)?, samples.output(), grid.m, exec)
}

fn conditional_on_pair(
    samples: &SampleMatrix,
    i: usize,
    j: usize,
    grid: &GridParams,
    exec: Execution,
) -> Result<f64> {
    conditional_cre_2_with(
        samples.column(i)?,
        samples.column(j)?,
        samples.output(),
        grid.i,
        grid.j,
        exec,
    )
}

/// Unclipped κ_i.
pub fn kappa_single_raw(samples: &SampleMatrix, i: usize, grid: &GridParams) -> Result<f64> {
    let total = output_cre(samples)?;
    let cond = conditional_on(samples, i, grid, Execution::default())?;
    Ok(1.0 - cond / total)
}

/// κ_i clipped to `[0, 1]`.
pub fn kappa_single(samples: &SampleMatrix, i: usize, grid: &GridParams) -> Result<f64> {
    Ok(kappa_single_raw(samples, i, grid)?.clamp(0.0, 1.0))
}

/// Cumulative residual mutual information `E(Y) - E(Y|X_i)`, floored at zero.
pub fn cr_mutual_information(samples: &SampleMatrix, i: usize, grid: &GridParams) -> Result<f64> {
    let total = output_cre(samples)?;
    let cond = conditional_on(samples, i, grid, Execution::default())?;
    Ok((total - cond).max(0.0))
}

/// Unclipped κ_ij.
pub fn kappa_pair_raw(
    samples: &SampleMatrix,
    i: usize,
    j: usize,
    grid: &GridParams,
) -> Result<f64> {
    if i == j {
        return Err(GsaError::SameIndex(i));
    }
    let exec = Execution::default();
    let total = output_cre(samples)?;
    let ci = conditional_on(samples, i, grid, exec)?;
    let cj = conditional_on(samples, j, grid, exec)?;
    let cij = conditional_on_pair(samples, i, j, grid, exec)?;
    Ok(pair_term(total, ci, cj, cij))
}

/// κ_ij clipped to `[0, 1)`.
pub fn kappa_pair(samples: &SampleMatrix, i: usize, j: usize, grid: &GridParams) -> Result<f64> {
    Ok(kappa_pair_raw(samples, i, j, grid)?.clamp(0.0, PAIR_UPPER))
}

fn pair_term(total: f64, ci: f64, cj: f64, cij: f64) -> f64 {
    (ci + cj - cij - total) / total
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleTerm {
    pub label: String,
    pub index: usize,
    /// Clipped κ_i.
    pub kappa: f64,
    pub raw: f64,
    /// Estimated E(Y|X_i).
    pub conditional_cre: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTerm {
    pub labels: (String, String),
    pub indices: (usize, usize),
    /// Clipped κ_ij.
    pub kappa: f64,
    pub raw: f64,
    /// Estimated E(Y|X_i, X_j).
    pub conditional_cre: f64,
}

/// Full first- and second-order decomposition of the output CRE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub total_cre: f64,
    pub singles: Vec<SingleTerm>,
    pub pairs: Vec<PairTerm>,
    /// `1 - Σκ_i - Σκ_ij` over the clipped terms.
    pub higher_order_residual: f64,
    /// Same complement over the raw terms.
    pub raw_residual: f64,
    pub sample_size: usize,
    pub seed: Option<RngSeed>,
    pub grid: GridParams,
}

impl DecompositionResult {
    pub fn kappa(&self, label: &str) -> Option<f64> {
        self.singles
            .iter()
            .find(|t| t.label == label)
            .map(|t| t.kappa)
    }

    pub fn pair(&self, a: &str, b: &str) -> Option<&PairTerm> {
        self.pairs
            .iter()
            .find(|t| (t.labels.0 == a && t.labels.1 == b) || (t.labels.0 == b && t.labels.1 == a))
    }

    pub fn kappa_pair(&self, a: &str, b: &str) -> Option<f64> {
        self.pair(a, b).map(|t| t.kappa)
    }

    pub fn single_kappas(&self) -> Vec<f64> {
        self.singles.iter().map(|t| t.kappa).collect()
    }
}

/// κ_i for every input, without pair terms.
pub fn single_terms(
    samples: &SampleMatrix,
    grid: &GridParams,
    exec: Execution,
) -> Result<Vec<SingleTerm>> {
    grid.validate()?;
    let total = output_cre(samples)?;
    single_terms_with_total(samples, grid, total, exec)
}

fn single_terms_with_total(
    samples: &SampleMatrix,
    grid: &GridParams,
    total: f64,
    exec: Execution,
) -> Result<Vec<SingleTerm>> {
    // inner estimators run sequentially; the fan-out is across inputs
    let cond = exec.try_map_range(samples.arity(), |i| {
        conditional_on(samples, i, grid, Execution::Sequential)
    })?;
    let labels = samples.labels();
    Ok(cond
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let raw = 1.0 - c / total;
            SingleTerm {
                label: labels[i].clone(),
                index: i,
                kappa: raw.clamp(0.0, 1.0),
                raw,
                conditional_cre: c,
            }
        })
        .collect())
}

/// Estimates every κ_i and κ_ij from one shared sample matrix.
pub fn decompose(samples: &SampleMatrix, grid: &GridParams) -> Result<DecompositionResult> {
    decompose_with(samples, grid, None, Execution::default())
}

pub fn decompose_with(
    samples: &SampleMatrix,
    grid: &GridParams,
    seed: Option<RngSeed>,
    exec: Execution,
) -> Result<DecompositionResult> {
    grid.validate()?;
    let n = samples.arity();
    if n == 0 {
        return Err(GsaError::InvalidParameter(
            "decomposition needs at least one input".into(),
        ));
    }
    let total = output_cre(samples)?;
    let singles = single_terms_with_total(samples, grid, total, exec)?;

    let pair_idx: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let cond2 = exec.try_map_range(pair_idx.len(), |k| {
        let (i, j) = pair_idx[k];
        conditional_on_pair(samples, i, j, grid, Execution::Sequential)
    })?;

    let labels = samples.labels();
    let pairs: Vec<PairTerm> = pair_idx
        .iter()
        .zip(&cond2)
        .map(|(&(i, j), &cij)| {
            let raw = pair_term(
                total,
                singles[i].conditional_cre,
                singles[j].conditional_cre,
                cij,
            );
            PairTerm {
                labels: (labels[i].clone(), labels[j].clone()),
                indices: (i, j),
                kappa: raw.clamp(0.0, PAIR_UPPER),
                raw,
                conditional_cre: cij,
            }
        })
        .collect();

    let clipped_sum: f64 =
        singles.iter().map(|t| t.kappa).sum::<f64>() + pairs.iter().map(|t| t.kappa).sum::<f64>();
    let raw_sum: f64 =
        singles.iter().map(|t| t.raw).sum::<f64>() + pairs.iter().map(|t| t.raw).sum::<f64>();
    Ok(DecompositionResult {
        total_cre: total,
        singles,
        pairs,
        higher_order_residual: 1.0 - clipped_sum,
        raw_residual: 1.0 - raw_sum,
        sample_size: samples.len(),
        seed,
        grid: *grid,
    })
}
