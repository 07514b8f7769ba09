use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{GsaError, Result};
use crate::exec::Execution;
use crate::models::Model;
use crate::rng::RngSeed;

/// Input samples (column-major, one column per input) and the matching model
/// outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMatrix {
    labels: Vec<String>,
    columns: Vec<Vec<f64>>,
    output: Vec<f64>,
}

impl SampleMatrix {
    pub fn new(labels: Vec<String>, columns: Vec<Vec<f64>>, output: Vec<f64>) -> Result<Self> {
        if labels.len() != columns.len() {
            return Err(GsaError::LengthMismatch {
                left: labels.len(),
                right: columns.len(),
            });
        }
        let n = output.len();
        if n < 2 {
            return Err(GsaError::TooFewSamples { needed: 2, got: n });
        }
        for col in &columns {
            if col.len() != n {
                return Err(GsaError::LengthMismatch {
                    left: col.len(),
                    right: n,
                });
            }
        }
        let all_finite = columns
            .iter()
            .flatten()
            .chain(output.iter())
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(GsaError::NonFinite(
                "sample matrix contains NaN or infinity".into(),
            ));
        }
        Ok(SampleMatrix {
            labels,
            columns,
            output,
        })
    }

    /// Draws `n` rows from independent marginals and evaluates `model` on each.
    ///
    /// Column `j` is drawn from stream `j` of `seed`, so the matrix does not
    /// depend on the execution mode.
    pub fn generate(
        model: &dyn Model,
        specs: &[DistributionSpec],
        n: usize,
        seed: RngSeed,
        exec: Execution,
    ) -> Result<Self> {
        if specs.len() != model.arity() {
            return Err(GsaError::Config(format!(
                "model `{}` takes {} inputs but {} distributions were given",
                model.label(),
                model.arity(),
                specs.len()
            )));
        }
        let columns =
            exec.try_map_range(specs.len(), |j| specs[j].sample_stream(n, seed, j as u64))?;
        let output = evaluate_rows(model, &columns, exec)?;
        let labels = specs.iter().map(|s| s.label.clone()).collect();
        SampleMatrix::new(labels, columns, output)
    }

    pub fn len(&self) -> usize {
        self.output.len()
    }

    pub fn is_empty(&self) -> bool {
        self.output.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn column(&self, j: usize) -> Result<&[f64]> {
        self.columns
            .get(j)
            .map(Vec::as_slice)
            .ok_or(GsaError::IndexOutOfRange {
                index: j,
                arity: self.columns.len(),
            })
    }

    pub fn output(&self) -> &[f64] {
        &self.output
    }

    /// Same inputs with every output replaced by `f(y)`.
    pub fn map_output(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let output = self.output.iter().map(|&y| f(y)).collect();
        SampleMatrix::new(self.labels.clone(), self.columns.clone(), output)
    }
}

/// Evaluates `model` on each row of a column-major matrix.
pub(crate) fn evaluate_rows(
    model: &dyn Model,
    columns: &[Vec<f64>],
    exec: Execution,
) -> Result<Vec<f64>> {
    let n = columns.first().map_or(0, Vec::len);
    const CHUNK: usize = 4096;
    let chunks = n.div_ceil(CHUNK);
    let parts = exec.try_map_range(chunks, |c| {
        let start = c * CHUNK;
        let end = (start + CHUNK).min(n);
        let mut row = vec![0.0; columns.len()];
        let mut out = Vec::with_capacity(end - start);
        for r in start..end {
            for (slot, col) in row.iter_mut().zip(columns) {
                *slot = col[r];
            }
            out.push(model.eval(&row)?);
        }
        Ok::<_, GsaError>(out)
    })?;
    Ok(parts.concat())
}
