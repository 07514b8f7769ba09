//! Uncertainty-reduction cost model and the importance/cost strategy table.
//!
//! The cost of shrinking a variable's relative uncertainty to `u` is
//!
//! ```text
//! K(u) = K0 ((u_ref / u)^α - 1),   0 < u ≤ u_ref
//! ```
//!
//! Relative uncertainty is the CRE over the mean (`0.9032 σ/μ` for a normal)
//! or, in the variance framework, the coefficient of variation `σ/μ`.

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{GsaError, Result};
use crate::importance::DecompositionResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Framework {
    Cre,
    Variance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostSpec {
    /// Reference relative uncertainty, reached at zero cost.
    pub u_reference: f64,
    /// Cost scale.
    pub k0: f64,
    /// Nonlinearity of the cost growth.
    pub alpha: f64,
    pub framework: Framework,
    /// Largest acceptable cost for a recommendation. `None` means unlimited.
    #[serde(default)]
    pub budget: Option<f64>,
}

impl CostSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("u_reference", self.u_reference),
            ("K0", self.k0),
            ("alpha", self.alpha),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(GsaError::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if let Some(b) = self.budget {
            if b.is_nan() || b < 0.0 {
                return Err(GsaError::InvalidParameter(format!(
                    "budget must be non-negative, got {b}"
                )));
            }
        }
        Ok(())
    }
}

/// Relative uncertainty of `spec` in the given framework.
///
/// The CRE framework accepts any family with a closed-form CRE; the variance
/// framework uses `sd / mean`.
pub fn relative_uncertainty(spec: &DistributionSpec, framework: Framework) -> Result<f64> {
    let mean = spec.mean();
    if mean == 0.0 {
        return Err(GsaError::Domain(format!("`{}` has zero mean", spec.label)));
    }
    let magnitude = match framework {
        Framework::Cre => spec.analytic_cre()?,
        Framework::Variance => spec.sd(),
    };
    Ok(magnitude / mean.abs())
}

/// Cost of reducing relative uncertainty to `u`.
pub fn reduction_cost(u: f64, spec: &CostSpec) -> Result<f64> {
    if !(u > 0.0) {
        return Err(GsaError::Domain(format!(
            "relative uncertainty must be positive, got {u}"
        )));
    }
    if u > spec.u_reference {
        return Err(GsaError::Domain(format!(
            "relative uncertainty {u} exceeds the reference {}",
            spec.u_reference
        )));
    }
    Ok(spec.k0 * ((spec.u_reference / u).powf(spec.alpha) - 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    pub label: String,
    /// Uncertainty magnitude in the chosen framework (CRE or standard deviation).
    pub magnitude: f64,
    pub variance: f64,
    pub relative_uncertainty: f64,
    pub cost: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostResult {
    pub spec: CostSpec,
    pub rows: Vec<CostRow>,
    pub recommendation: String,
}

impl CostResult {
    pub fn row(&self, label: &str) -> Option<&CostRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

/// Tabulates magnitude, relative uncertainty, cost and κ for every input and
/// picks the input to control first.
///
/// The recommendation is the input with the largest κ among those whose cost
/// fits the budget; if nothing fits, the cheapest input is chosen. Ties are
/// broken by label so the result does not depend on input order.
pub fn strategy_table(
    specs: &[DistributionSpec],
    decomposition: &DecompositionResult,
    cost: &CostSpec,
) -> Result<CostResult> {
    cost.validate()?;
    if specs.is_empty() {
        return Err(GsaError::InvalidParameter(
            "strategy table needs at least one input".into(),
        ));
    }
    let mut rows = Vec::with_capacity(specs.len());
    for spec in specs {
        let kappa = decomposition.kappa(&spec.label).ok_or_else(|| {
            GsaError::Config(format!(
                "input `{}` is missing from the decomposition",
                spec.label
            ))
        })?;
        let magnitude = match cost.framework {
            Framework::Cre => spec.analytic_cre()?,
            Framework::Variance => spec.sd(),
        };
        let u = relative_uncertainty(spec, cost.framework)?;
        rows.push(CostRow {
            label: spec.label.clone(),
            magnitude,
            variance: spec.sd() * spec.sd(),
            relative_uncertainty: u,
            cost: reduction_cost(u, cost)?,
            kappa,
        });
    }

    let budget = cost.budget.unwrap_or(f64::INFINITY);
    let by_kappa = |a: &&CostRow, b: &&CostRow| {
        a.kappa
            .total_cmp(&b.kappa)
            .then_with(|| b.label.cmp(&a.label))
    };
    let by_cost = |a: &&CostRow, b: &&CostRow| {
        b.cost
            .total_cmp(&a.cost)
            .then_with(|| b.label.cmp(&a.label))
    };
    let pick = rows
        .iter()
        .filter(|r| r.cost <= budget)
        .max_by(by_kappa)
        .or_else(|| rows.iter().max_by(by_cost))
        .expect("rows is non-empty");
    Ok(CostResult {
        spec: *cost,
        recommendation: pick.label.clone(),
        rows,
    })
}
