//! Comparison indices: Sobol main and total effects, the Borgonovo delta
//! index and binned Shannon mutual information, plus the differential entropy
//! of a uniform variable.

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{GsaError, Result};
use crate::estimators::argsort;
use crate::exec::Execution;
use crate::models::Model;
use crate::rng::RngSeed;
use crate::sample::{evaluate_rows, SampleMatrix};

/// Smallest base sample size accepted by the given-data and pick-freeze
/// estimators.
pub const MIN_BASELINE_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolIndices {
    pub labels: Vec<String>,
    /// Main effects, clipped to `[0, 1]`.
    pub main: Vec<f64>,
    /// Total effects, clipped to `[0, 1]`.
    pub total: Vec<f64>,
    pub main_raw: Vec<f64>,
    pub total_raw: Vec<f64>,
    pub output_variance: f64,
    pub base_samples: usize,
    pub model_evaluations: usize,
}

/// Pick-freeze estimate of first-order and total Sobol indices.
///
/// Two independent `N × n` matrices `A` and `B` are drawn, and for each input
/// the hybrid `A_B^(i)` takes column `i` from `B`. With outputs centered on
/// their pooled mean,
///
/// ```text
/// S_i   = mean(f(B) (f(A_B^i) - f(A))) / V
/// S_T,i = mean((f(A) - f(A_B^i))²) / (2V)
/// ```
///
/// (Saltelli's main-effect and Jansen's total-effect estimators).
pub fn sobol_indices(
    model: &dyn Model,
    specs: &[DistributionSpec],
    n: usize,
    seed: RngSeed,
    exec: Execution,
) -> Result<SobolIndices> {
    let k = specs.len();
    if k != model.arity() {
        return Err(GsaError::Config(format!(
            "model `{}` takes {} inputs but {} distributions were given",
            model.label(),
            model.arity(),
            k
        )));
    }
    if n < MIN_BASELINE_SAMPLES {
        return Err(GsaError::TooFewSamples {
            needed: MIN_BASELINE_SAMPLES,
            got: n,
        });
    }
    let a = exec.try_map_range(k, |j| specs[j].sample_stream(n, seed, j as u64))?;
    let b = exec.try_map_range(k, |j| specs[j].sample_stream(n, seed, (k + j) as u64))?;
    let fa = evaluate_rows(model, &a, exec)?;
    let fb = evaluate_rows(model, &b, exec)?;

    let nf = n as f64;
    let mean = (fa.iter().sum::<f64>() + fb.iter().sum::<f64>()) / (2.0 * nf);
    let ca: Vec<f64> = fa.iter().map(|v| v - mean).collect();
    let cb: Vec<f64> = fb.iter().map(|v| v - mean).collect();
    let variance = (ca.iter().map(|v| v * v).sum::<f64>() + cb.iter().map(|v| v * v).sum::<f64>())
        / (2.0 * nf);
    if !(variance > 0.0) {
        return Err(GsaError::DegenerateOutput);
    }

    let mut main_raw = Vec::with_capacity(k);
    let mut total_raw = Vec::with_capacity(k);
    for i in 0..k {
        let mut hybrid = a.clone();
        hybrid[i].clone_from(&b[i]);
        let fab = evaluate_rows(model, &hybrid, exec)?;
        let mut main = 0.0;
        let mut total = 0.0;
        for r in 0..n {
            let cab = fab[r] - mean;
            main += cb[r] * (cab - ca[r]);
            total += (ca[r] - cab) * (ca[r] - cab);
        }
        main_raw.push(main / nf / variance);
        total_raw.push(total / (2.0 * nf) / variance);
    }

    Ok(SobolIndices {
        labels: specs.iter().map(|s| s.label.clone()).collect(),
        main: main_raw.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
        total: total_raw.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
        main_raw,
        total_raw,
        output_variance: variance,
        base_samples: n,
        model_evaluations: n * (k + 2),
    })
}

/// Bin settings of the given-data estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BinSettings {
    /// Equal-count partitions of the input for δ.
    pub delta_x_bins: usize,
    /// Equal-width histogram bins of the output for δ.
    pub delta_y_bins: usize,
    /// Equal-width bins per axis for mutual information.
    pub mi_bins: usize,
}

impl Default for BinSettings {
    fn default() -> Self {
        BinSettings {
            delta_x_bins: 20,
            delta_y_bins: 100,
            mi_bins: 20,
        }
    }
}

/// Equal-width bin index of each value over `[min, max]`.
fn equal_width_bins(values: &[f64], bins: usize) -> Result<Vec<usize>> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if !(hi > lo) {
        return Err(GsaError::DegenerateOutput);
    }
    let width = (hi - lo) / bins as f64;
    Ok(values
        .iter()
        .map(|&v| (((v - lo) / width) as usize).min(bins - 1))
        .collect())
}

fn check_given_data(samples: &SampleMatrix, i: usize, bins: usize) -> Result<()> {
    if samples.len() < MIN_BASELINE_SAMPLES {
        return Err(GsaError::TooFewSamples {
            needed: MIN_BASELINE_SAMPLES,
            got: samples.len(),
        });
    }
    samples.column(i)?;
    if bins < 2 {
        return Err(GsaError::InvalidParameter(format!(
            "need at least 2 bins, got {bins}"
        )));
    }
    Ok(())
}

/// Histogram estimate of the delta index
/// `δ_i = ½ E_{X_i} ∫ |f_Y(y) - f_{Y|X_i}(y)| dy`.
///
/// `X_i` is cut into `x_bins` equal-count classes (remainder merged into the
/// last); output densities are compared on a shared `y_bins` equal-width
/// histogram.
pub fn delta_index(samples: &SampleMatrix, i: usize, x_bins: usize, y_bins: usize) -> Result<f64> {
    check_given_data(samples, i, x_bins.min(y_bins))?;
    let n = samples.len();
    if x_bins > n {
        return Err(GsaError::GridTooLarge {
            cells: x_bins,
            samples: n,
        });
    }
    let ybin = equal_width_bins(samples.output(), y_bins)?;
    let mut marginal = vec![0.0; y_bins];
    for &b in &ybin {
        marginal[b] += 1.0;
    }
    marginal.iter_mut().for_each(|c| *c /= n as f64);

    let order = argsort(samples.column(i)?);
    let size = n / x_bins;
    let mut delta = 0.0;
    let mut cond = vec![0.0; y_bins];
    for g in 0..x_bins {
        let start = g * size;
        let end = if g + 1 == x_bins { n } else { start + size };
        cond.iter_mut().for_each(|c| *c = 0.0);
        for &r in &order[start..end] {
            cond[ybin[r]] += 1.0;
        }
        let count = (end - start) as f64;
        let l1: f64 = cond
            .iter()
            .zip(&marginal)
            .map(|(c, m)| (c / count - m).abs())
            .sum();
        delta += count / n as f64 * l1;
    }
    Ok((0.5 * delta).clamp(0.0, 1.0))
}

/// Plug-in mutual information `I(X_i; Y)` in nats on a `bins × bins`
/// equal-width histogram.
pub fn shannon_mi(samples: &SampleMatrix, i: usize, bins: usize) -> Result<f64> {
    check_given_data(samples, i, bins)?;
    let n = samples.len() as f64;
    let xb = equal_width_bins(samples.column(i)?, bins)?;
    let yb = equal_width_bins(samples.output(), bins)?;
    let mut joint = vec![0.0; bins * bins];
    let mut px = vec![0.0; bins];
    let mut py = vec![0.0; bins];
    for (&a, &b) in xb.iter().zip(&yb) {
        joint[a * bins + b] += 1.0;
        px[a] += 1.0;
        py[b] += 1.0;
    }
    let mut mi = 0.0;
    for a in 0..bins {
        for b in 0..bins {
            let c = joint[a * bins + b];
            if c > 0.0 {
                mi += c / n * (c * n / (px[a] * py[b])).ln();
            }
        }
    }
    Ok(mi.max(0.0))
}

/// Differential entropy `ln(b - a)` of `U(a, b)`.
pub fn differential_entropy_uniform(a: f64, b: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(GsaError::Domain(format!(
            "uniform support requires a < b, got a={a}, b={b}"
        )));
    }
    Ok((b - a).ln())
}

/// δ and η for every input of a given-data sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GivenDataIndices {
    pub delta: Vec<f64>,
    pub shannon_mi: Vec<f64>,
    pub bins: BinSettings,
}

pub fn given_data_indices(
    samples: &SampleMatrix,
    bins: &BinSettings,
    exec: Execution,
) -> Result<GivenDataIndices> {
    let k = samples.arity();
    let delta = exec.try_map_range(k, |i| {
        delta_index(samples, i, bins.delta_x_bins, bins.delta_y_bins)
    })?;
    let shannon = exec.try_map_range(k, |i| shannon_mi(samples, i, bins.mi_bins))?;
    Ok(GivenDataIndices {
        delta,
        shannon_mi: shannon,
        bins: *bins,
    })
}
