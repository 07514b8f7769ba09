//! Benchmark models.
//!
//! All models are pure functions of their input vector. [`BenchmarkModel`]
//! names the shipped ones so they can be selected from a config file;
//! [`ModelFn`] wraps an arbitrary closure for library use and tests.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::distributions::{lognormal_from_mean_ef, DistributionSpec};
use crate::error::{GsaError, Result};

/// A deterministic map from an input vector to a scalar output.
pub trait Model: Send + Sync {
    fn arity(&self) -> usize;
    fn label(&self) -> &str;
    fn eval(&self, x: &[f64]) -> Result<f64>;
}

/// Closure-backed model.
#[derive(Clone)]
pub struct ModelFn {
    label: String,
    arity: usize,
    f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl ModelFn {
    pub fn new(
        label: impl Into<String>,
        arity: usize,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ModelFn {
            label: label.into(),
            arity,
            f: Arc::new(f),
        }
    }
}

impl fmt::Debug for ModelFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelFn")
            .field("label", &self.label)
            .field("arity", &self.arity)
            .finish()
    }
}

impl Model for ModelFn {
    fn arity(&self) -> usize {
        self.arity
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn eval(&self, x: &[f64]) -> Result<f64> {
        let y = (self.f)(x);
        if !y.is_finite() {
            return Err(GsaError::NonFinite(format!(
                "model `{}` returned {y}",
                self.label
            )));
        }
        Ok(y)
    }
}

/// `sin x1 + a sin² x2 + b x3⁴ sin x1`.
pub fn ishigami(x1: f64, x2: f64, x3: f64, a: f64, b: f64) -> f64 {
    let s1 = x1.sin();
    let s2 = x2.sin();
    s1 + a * s2 * s2 + b * x3.powi(4) * s1
}

/// Top-event frequency of the fault-tree model as a sum of minimal cut set
/// products (rare-event approximation).
pub fn risk_top_event(x: &[f64; 7]) -> f64 {
    let [x1, x2, x3, x4, x5, x6, x7] = *x;
    x1 * x3 * x5
        + x1 * x3 * x6
        + x1 * x4 * x5
        + x1 * x4 * x6
        + x2 * x3 * x4
        + x2 * x3 * x5
        + x2 * x4 * x5
        + x2 * x5 * x6
        + x2 * x4 * x7
        + x2 * x6 * x7
}

pub fn appendix_b_model(x1: f64, x2: f64) -> f64 {
    x1 + x2
}

pub fn appendix_c_model(x1: f64, x2: f64, x3: f64) -> f64 {
    x1 + x2 + x3
}

/// Inputs of the ISO 281 life modification factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BearingInputs {
    /// Viscosity ratio.
    pub k0: f64,
    /// Contamination factor.
    pub ec: f64,
    /// Fatigue load limit, kN.
    pub cu: f64,
    /// Dynamic equivalent load, kN.
    pub p: f64,
}

/// ISO 281 life modification factor `a_ISO` for ball bearings.
///
/// The branch is chosen by the viscosity ratio on `[0.1, 0.4)`, `[0.4, 1)`
/// and `[1, 4)`. The formula is used verbatim and is slightly discontinuous
/// at the branch boundaries.
pub fn bearing_a_iso(inp: &BearingInputs) -> Result<f64> {
    let BearingInputs { k0, ec, cu, p } = *inp;
    if !(0.1..4.0).contains(&k0) {
        return Err(GsaError::Domain(format!(
            "viscosity ratio k0={k0} outside [0.1, 4)"
        )));
    }
    if !(ec > 0.0 && cu > 0.0 && p > 0.0) {
        return Err(GsaError::Domain(format!(
            "bearing inputs must be positive, got ec={ec}, Cu={cu}, P={p}"
        )));
    }
    let (coef, expo) = if k0 < 0.4 {
        (2.2649, 0.054381)
    } else if k0 < 1.0 {
        (1.9987, 0.19087)
    } else {
        (1.9987, 0.071739)
    };
    let lubrication = 2.5671 - coef / k0.powf(expo);
    let load = (ec * cu / p).cbrt();
    let base = 1.0 - lubrication.powf(0.83) * load;
    if !(base > 0.0) {
        return Err(GsaError::NonFinite(format!(
            "a_ISO bracket is {base} at k0={k0}, ec={ec}, Cu={cu}, P={p}"
        )));
    }
    let a = 0.1 * base.powf(-9.3);
    if !a.is_finite() {
        return Err(GsaError::NonFinite(format!("a_ISO overflowed at k0={k0}")));
    }
    Ok(a)
}

/// The shipped benchmark models, addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum BenchmarkModel {
    Ishigami {
        #[serde(default = "default_ishigami_a")]
        a: f64,
        #[serde(default = "default_ishigami_b")]
        b: f64,
    },
    RiskFaultTree,
    BearingAIso,
    /// `Y = X1 + X2`.
    AppendixB,
    /// `Y = X1 + X2 + X3`.
    AppendixC,
}

fn default_ishigami_a() -> f64 {
    5.0
}

fn default_ishigami_b() -> f64 {
    1.0
}

pub const MODEL_NAMES: [&str; 5] = [
    "ishigami",
    "risk_fault_tree",
    "bearing_a_iso",
    "appendix_b",
    "appendix_c",
];

impl BenchmarkModel {
    pub fn ishigami_default() -> Self {
        BenchmarkModel::Ishigami {
            a: default_ishigami_a(),
            b: default_ishigami_b(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BenchmarkModel::Ishigami { .. } => "ishigami",
            BenchmarkModel::RiskFaultTree => "risk_fault_tree",
            BenchmarkModel::BearingAIso => "bearing_a_iso",
            BenchmarkModel::AppendixB => "appendix_b",
            BenchmarkModel::AppendixC => "appendix_c",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            BenchmarkModel::Ishigami { .. } => {
                "sin x1 + a sin^2 x2 + b x3^4 sin x1, inputs U(-pi, pi)"
            }
            BenchmarkModel::RiskFaultTree => {
                "fault-tree top event, ten triple cut sets over 7 lognormal inputs"
            }
            BenchmarkModel::BearingAIso => "ISO 281 life modification factor a_ISO(k0, ec, Cu, P)",
            BenchmarkModel::AppendixB => "X1 + X2 with X1 ~ Exp(0.5), X2 ~ N(40, 2^2)",
            BenchmarkModel::AppendixC => {
                "X1 + X2 + X3 with X1 ~ Exp(0.5), X2 ~ Exp(0.1), X3 ~ N(40, 2^2)"
            }
        }
    }

    /// Input labels in evaluation order.
    pub fn input_labels(&self) -> Vec<&'static str> {
        match self {
            BenchmarkModel::Ishigami { .. } => vec!["X1", "X2", "X3"],
            BenchmarkModel::RiskFaultTree => vec!["X1", "X2", "X3", "X4", "X5", "X6", "X7"],
            BenchmarkModel::BearingAIso => vec!["k0", "ec", "Cu", "P"],
            BenchmarkModel::AppendixB => vec!["X1", "X2"],
            BenchmarkModel::AppendixC => vec!["X1", "X2", "X3"],
        }
    }

    /// Input distributions of the published benchmark setups.
    pub fn default_inputs(&self) -> Vec<DistributionSpec> {
        let labels = self.input_labels();
        let built: Result<Vec<DistributionSpec>> = match self {
            BenchmarkModel::Ishigami { .. } => labels
                .iter()
                .map(|l| DistributionSpec::uniform(*l, -PI, PI))
                .collect(),
            BenchmarkModel::RiskFaultTree => {
                let means = [2.0, 3.0, 0.001, 0.002, 0.004, 0.005, 0.003];
                labels
                    .iter()
                    .zip(means)
                    .map(|(l, m)| lognormal_from_mean_ef(*l, m, 2.0))
                    .collect()
            }
            BenchmarkModel::BearingAIso => vec![
                DistributionSpec::normal("k0", 0.39, 0.015),
                DistributionSpec::normal("ec", 0.75, 0.08),
                DistributionSpec::normal("Cu", 0.28, 0.01),
                DistributionSpec::normal("P", 11.5, 0.6),
            ]
            .into_iter()
            .collect(),
            BenchmarkModel::AppendixB => vec![
                DistributionSpec::exponential("X1", 0.5),
                DistributionSpec::normal("X2", 40.0, 2.0),
            ]
            .into_iter()
            .collect(),
            BenchmarkModel::AppendixC => vec![
                DistributionSpec::exponential("X1", 0.5),
                DistributionSpec::exponential("X2", 0.1),
                DistributionSpec::normal("X3", 40.0, 2.0),
            ]
            .into_iter()
            .collect(),
        };
        built.expect("built-in parameters are valid")
    }
}

impl FromStr for BenchmarkModel {
    type Err = GsaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ishigami" => Ok(BenchmarkModel::ishigami_default()),
            "risk_fault_tree" => Ok(BenchmarkModel::RiskFaultTree),
            "bearing_a_iso" => Ok(BenchmarkModel::BearingAIso),
            "appendix_b" => Ok(BenchmarkModel::AppendixB),
            "appendix_c" => Ok(BenchmarkModel::AppendixC),
            other => Err(GsaError::Config(format!(
                "unknown model `{other}` (expected one of {})",
                MODEL_NAMES.join(", ")
            ))),
        }
    }
}

impl Model for BenchmarkModel {
    fn arity(&self) -> usize {
        match self {
            BenchmarkModel::Ishigami { .. } | BenchmarkModel::AppendixC => 3,
            BenchmarkModel::RiskFaultTree => 7,
            BenchmarkModel::BearingAIso => 4,
            BenchmarkModel::AppendixB => 2,
        }
    }

    fn label(&self) -> &str {
        self.name()
    }

    fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.arity() {
            return Err(GsaError::LengthMismatch {
                left: x.len(),
                right: self.arity(),
            });
        }
        match *self {
            BenchmarkModel::Ishigami { a, b } => Ok(ishigami(x[0], x[1], x[2], a, b)),
            BenchmarkModel::RiskFaultTree => {
                let arr: [f64; 7] = x.try_into().expect("arity checked");
                Ok(risk_top_event(&arr))
            }
            BenchmarkModel::BearingAIso => bearing_a_iso(&BearingInputs {
                k0: x[0],
                ec: x[1],
                cu: x[2],
                p: x[3],
            }),
            BenchmarkModel::AppendixB => Ok(appendix_b_model(x[0], x[1])),
            BenchmarkModel::AppendixC => Ok(appendix_c_model(x[0], x[1], x[2])),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSeed;
    use crate::sample::SampleMatrix;
    use crate::Execution;
    use rand::Rng;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn ishigami_points() {
        assert_eq!(ishigami(0.0, 0.0, 0.0, 5.0, 1.0), 0.0);
        assert!((ishigami(FRAC_PI_2, FRAC_PI_2, 0.0, 5.0, 1.0) - 6.0).abs() < 1e-12);
        assert!((ishigami(FRAC_PI_2, 0.0, 1.0, 5.0, 1.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn risk_points() {
        assert_eq!(risk_top_event(&[0.0; 7]), 0.0);
        assert_eq!(risk_top_event(&[1.0; 7]), 10.0);
        assert_eq!(risk_top_event(&[1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0]), 4.0);
    }

    #[test]
    fn risk_is_multilinear() {
        let mut rng = RngSeed(8).stream(0);
        for _ in 0..100 {
            let mut x = [0.0; 7];
            x.iter_mut().for_each(|v| *v = rng.gen_range(0.0..3.0));
            for i in 0..7 {
                let (mut lo, mut mid, mut hi) = (x, x, x);
                lo[i] = 0.5;
                mid[i] = 1.5;
                hi[i] = 2.5;
                let (a, b, c) = (
                    risk_top_event(&lo),
                    risk_top_event(&mid),
                    risk_top_event(&hi),
                );
                assert!((b - 0.5 * (a + c)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn appendix_sums() {
        assert_eq!(appendix_b_model(0.0, 0.0), 0.0);
        assert_eq!(appendix_b_model(2.0, 40.0), 42.0);
        assert_eq!(appendix_c_model(2.0, 10.0, 40.0), 52.0);
    }

    fn a_iso(k0: f64, ec: f64, cu: f64, p: f64) -> Result<f64> {
        bearing_a_iso(&BearingInputs { k0, ec, cu, p })
    }

    #[test]
    fn bearing_nominal_regression() {
        // independent evaluation of branch 1 at the nominal point
        let v = a_iso(0.39, 0.75, 0.28, 11.5).unwrap();
        assert!((v - 0.185_681_821_501_869_13).abs() < 1e-12, "{v}");
    }

    #[test]
    fn bearing_branch_selection() {
        let at = |k0: f64| {
            let load = (0.75f64 * 0.28 / 11.5).cbrt();
            let br = |c: f64, e: f64| {
                0.1 * (1.0 - (2.5671 - c / k0.powf(e)).powf(0.83) * load).powf(-9.3)
            };
            (
                br(2.2649, 0.054381),
                br(1.9987, 0.19087),
                br(1.9987, 0.071739),
            )
        };
        let (b1, _, _) = at(0.39);
        assert_eq!(a_iso(0.39, 0.75, 0.28, 11.5).unwrap(), b1);
        let (_, b2, _) = at(0.40);
        assert_eq!(a_iso(0.40, 0.75, 0.28, 11.5).unwrap(), b2);
        let (_, _, b3) = at(1.0);
        assert_eq!(a_iso(1.0, 0.75, 0.28, 11.5).unwrap(), b3);
    }

    #[test]
    fn bearing_zero_contamination_limit() {
        let v = a_iso(0.39, 1e-300, 0.28, 11.5).unwrap();
        assert!((v - 0.1).abs() < 1e-9);
    }

    #[test]
    fn bearing_domain_errors() {
        assert!(matches!(
            a_iso(0.05, 0.75, 0.28, 11.5),
            Err(GsaError::Domain(_))
        ));
        assert!(matches!(
            a_iso(4.0, 0.75, 0.28, 11.5),
            Err(GsaError::Domain(_))
        ));
        assert!(matches!(
            a_iso(0.39, -0.1, 0.28, 11.5),
            Err(GsaError::Domain(_))
        ));
        // huge contamination factor pushes the bracket below zero
        assert!(matches!(
            a_iso(3.9, 1.0e4, 10.0, 0.1),
            Err(GsaError::NonFinite(_))
        ));
    }

    #[test]
    fn bearing_monotone_by_finite_differences() {
        let mut rng = RngSeed(99).stream(0);
        let h = 1e-6;
        for _ in 0..100 {
            let k0 = rng.gen_range(0.35..0.43);
            let ec = rng.gen_range(0.5..1.0);
            let cu = rng.gen_range(0.25..0.31);
            let p = rng.gen_range(10.0..13.0);
            let f = a_iso(k0, ec, cu, p).unwrap();
            assert!(a_iso(k0, ec + h, cu, p).unwrap() > f);
            assert!(a_iso(k0, ec, cu + h, p).unwrap() > f);
            assert!(a_iso(k0, ec, cu, p + h).unwrap() < f);
        }
    }

    #[test]
    fn shipped_inputs_stay_in_domain() {
        for model in [
            BenchmarkModel::BearingAIso,
            BenchmarkModel::RiskFaultTree,
            BenchmarkModel::ishigami_default(),
        ] {
            let specs = model.default_inputs();
            SampleMatrix::generate(&model, &specs, 100_000, RngSeed(2), Execution::Parallel)
                .unwrap();
        }
    }

    #[test]
    fn names_round_trip() {
        for name in MODEL_NAMES {
            let m: BenchmarkModel = name.parse().unwrap();
            assert_eq!(m.name(), name);
            assert_eq!(m.input_labels().len(), m.arity());
            assert_eq!(m.default_inputs().len(), m.arity());
        }
        assert!("nope".parse::<BenchmarkModel>().is_err());
    }

    #[test]
    fn closure_model_rejects_non_finite() {
        let m = ModelFn::new("inv", 1, |x| 1.0 / x[0]);
        assert!(m.eval(&[0.0]).is_err());
        assert_eq!(m.eval(&[2.0]).unwrap(), 0.5);
    }
}
