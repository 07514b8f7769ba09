//! Parametric input marginals.
//!
//! Each [`DistributionSpec`] can be sampled under a seed and, for the
//! exponential, uniform and normal families, reports its CRE in closed form:
//!
//! ```text
//! Exp(λ)      CRE = 1/λ
//! U(a, b)     CRE = (b - a)/4
//! N(μ, σ²)    CRE ≈ 0.9032 σ
//! ```
//!
//! Lognormals are parameterized on the log scale. [`lognormal_from_mean_ef`]
//! converts the (mean, error factor) pair used in risk assessment tables,
//! where the error factor is the ratio of the 95th percentile to the median.

use rand::Rng;
use rand_distr::{Distribution, Exp, LogNormal, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{GsaError, Result};
use crate::rng::RngSeed;

/// CRE of a standard normal, rounded to four places.
pub const GAUSSIAN_CRE_FACTOR: f64 = 0.9032;

/// Standard normal 95th percentile used by the error-factor convention.
pub const Z95: f64 = 1.645;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Uniform { a: f64, b: f64 },
    Normal { mean: f64, sd: f64 },
    Exponential { rate: f64 },
    Lognormal { mu_ln: f64, sigma_ln: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Uniform { .. } => "uniform",
            Family::Normal { .. } => "normal",
            Family::Exponential { .. } => "exponential",
            Family::Lognormal { .. } => "lognormal",
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(GsaError::InvalidParameter(msg));
        let finite = |v: f64| v.is_finite();
        match *self {
            Family::Uniform { a, b } => {
                if !(finite(a) && finite(b) && a < b) {
                    return bad(format!("uniform requires a < b, got a={a}, b={b}"));
                }
            }
            Family::Normal { mean, sd } => {
                if !(finite(mean) && finite(sd) && sd > 0.0) {
                    return bad(format!("normal requires sd > 0, got mean={mean}, sd={sd}"));
                }
            }
            Family::Exponential { rate } => {
                if !(finite(rate) && rate > 0.0) {
                    return bad(format!("exponential requires rate > 0, got {rate}"));
                }
            }
            Family::Lognormal { mu_ln, sigma_ln } => {
                if !(finite(mu_ln) && finite(sigma_ln) && sigma_ln > 0.0) {
                    return bad(format!(
                        "lognormal requires sigma_ln > 0, got mu_ln={mu_ln}, sigma_ln={sigma_ln}"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// A labeled, validated marginal distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct DistributionSpec {
    pub label: String,
    #[serde(flatten)]
    family: Family,
}

#[derive(Deserialize)]
struct RawSpec {
    label: String,
    #[serde(flatten)]
    family: Family,
}

impl TryFrom<RawSpec> for DistributionSpec {
    type Error = GsaError;

    fn try_from(raw: RawSpec) -> Result<Self> {
        DistributionSpec::new(raw.label, raw.family)
    }
}

impl DistributionSpec {
    pub fn new(label: impl Into<String>, family: Family) -> Result<Self> {
        family.validate()?;
        Ok(DistributionSpec {
            label: label.into(),
            family,
        })
    }

    pub fn uniform(label: impl Into<String>, a: f64, b: f64) -> Result<Self> {
        Self::new(label, Family::Uniform { a, b })
    }

    pub fn normal(label: impl Into<String>, mean: f64, sd: f64) -> Result<Self> {
        Self::new(label, Family::Normal { mean, sd })
    }

    pub fn exponential(label: impl Into<String>, rate: f64) -> Result<Self> {
        Self::new(label, Family::Exponential { rate })
    }

    pub fn lognormal(label: impl Into<String>, mu_ln: f64, sigma_ln: f64) -> Result<Self> {
        Self::new(label, Family::Lognormal { mu_ln, sigma_ln })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn mean(&self) -> f64 {
        match self.family {
            Family::Uniform { a, b } => 0.5 * (a + b),
            Family::Normal { mean, .. } => mean,
            Family::Exponential { rate } => 1.0 / rate,
            Family::Lognormal { mu_ln, sigma_ln } => (mu_ln + 0.5 * sigma_ln * sigma_ln).exp(),
        }
    }

    pub fn sd(&self) -> f64 {
        match self.family {
            Family::Uniform { a, b } => (b - a) / 12f64.sqrt(),
            Family::Normal { sd, .. } => sd,
            Family::Exponential { rate } => 1.0 / rate,
            Family::Lognormal { mu_ln, sigma_ln } => {
                let s2 = sigma_ln * sigma_ln;
                ((s2.exp() - 1.0) * (2.0 * mu_ln + s2).exp()).sqrt()
            }
        }
    }

    /// Closed-form CRE. Lognormals have no closed form and are rejected.
    pub fn analytic_cre(&self) -> Result<f64> {
        match self.family {
            Family::Exponential { rate } => Ok(1.0 / rate),
            Family::Uniform { a, b } => Ok((b - a) / 4.0),
            Family::Normal { sd, .. } => Ok(GAUSSIAN_CRE_FACTOR * sd),
            Family::Lognormal { .. } => Err(GsaError::UnsupportedFamily {
                family: "lognormal",
                op: "analytic CRE",
            }),
        }
    }

    /// Draws `n` values from `rng`.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        // Parameters were validated at construction, so the rand_distr
        // constructors cannot fail here.
        match self.family {
            Family::Uniform { a, b } => {
                let d = Uniform::new_inclusive(a, b);
                d.sample_iter(rng).take(n).collect()
            }
            Family::Normal { mean, sd } => {
                let d = Normal::new(mean, sd).expect("validated normal");
                d.sample_iter(rng).take(n).collect()
            }
            Family::Exponential { rate } => {
                let d = Exp::new(rate).expect("validated exponential");
                d.sample_iter(rng).take(n).collect()
            }
            Family::Lognormal { mu_ln, sigma_ln } => {
                let d = LogNormal::new(mu_ln, sigma_ln).expect("validated lognormal");
                d.sample_iter(rng).take(n).collect()
            }
        }
    }

    /// Draws `n` i.i.d. values on stream 0 of `seed`.
    pub fn sample(&self, n: usize, seed: RngSeed) -> Result<Vec<f64>> {
        self.sample_stream(n, seed, 0)
    }

    pub fn sample_stream(&self, n: usize, seed: RngSeed, stream: u64) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(GsaError::TooFewSamples { needed: 1, got: 0 });
        }
        Ok(self.sample_with(&mut seed.stream(stream), n))
    }
}

/// Lognormal with the given arithmetic mean and error factor
/// `EF = exp(1.645 σ_ln)`.
pub fn lognormal_from_mean_ef(
    label: impl Into<String>,
    mean: f64,
    error_factor: f64,
) -> Result<DistributionSpec> {
    if !(mean.is_finite() && mean > 0.0) {
        return Err(GsaError::Domain(format!(
            "lognormal mean must be positive, got {mean}"
        )));
    }
    if !(error_factor.is_finite() && error_factor > 1.0) {
        return Err(GsaError::Domain(format!(
            "error factor must exceed 1, got {error_factor}"
        )));
    }
    let sigma_ln = error_factor.ln() / Z95;
    let mu_ln = mean.ln() - 0.5 * sigma_ln * sigma_ln;
    DistributionSpec::lognormal(label, mu_ln, sigma_ln)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean(v: &[f64]) -> f64 {
        v.iter().sum::<f64>() / v.len() as f64
    }

    fn quantile(v: &[f64], q: f64) -> f64 {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        s[((s.len() - 1) as f64 * q).round() as usize]
    }

    #[test]
    fn uniform_samples_stay_in_support() {
        let pi = std::f64::consts::PI;
        let d = DistributionSpec::uniform("x", -pi, pi).unwrap();
        let v = d.sample(4, RngSeed(11)).unwrap();
        assert_eq!(v.len(), 4);
        assert!(v.iter().all(|x| (-pi..=pi).contains(x)));
    }

    #[test]
    fn normal_sample_mean() {
        let d = DistributionSpec::normal("k0", 0.39, 0.015).unwrap();
        let v = d.sample(100_000, RngSeed(3)).unwrap();
        assert!((mean(&v) - 0.39).abs() < 0.001);
    }

    #[test]
    fn exponential_sample_mean() {
        let d = DistributionSpec::exponential("x", 0.5).unwrap();
        let v = d.sample(100_000, RngSeed(5)).unwrap();
        assert!((mean(&v) - 2.0).abs() < 0.05);
    }

    #[test]
    fn sampling_is_deterministic() {
        let d = DistributionSpec::exponential("x", 0.5).unwrap();
        assert_eq!(
            d.sample(50, RngSeed(9)).unwrap(),
            d.sample(50, RngSeed(9)).unwrap()
        );
        assert_ne!(
            d.sample(50, RngSeed(9)).unwrap(),
            d.sample(50, RngSeed(10)).unwrap()
        );
    }

    #[test]
    fn zero_samples_rejected() {
        let d = DistributionSpec::exponential("x", 0.5).unwrap();
        assert!(matches!(
            d.sample(0, RngSeed(1)),
            Err(GsaError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn invalid_parameters() {
        assert!(DistributionSpec::uniform("x", 1.0, 1.0).is_err());
        assert!(DistributionSpec::uniform("x", 2.0, 1.0).is_err());
        assert!(DistributionSpec::normal("x", 0.0, 0.0).is_err());
        assert!(DistributionSpec::normal("x", 0.0, -1.0).is_err());
        assert!(DistributionSpec::exponential("x", 0.0).is_err());
        assert!(DistributionSpec::lognormal("x", 0.0, 0.0).is_err());
        assert!(DistributionSpec::normal("x", f64::NAN, 1.0).is_err());
    }

    #[test]
    fn analytic_cre_values() {
        assert_eq!(
            DistributionSpec::exponential("x", 0.5)
                .unwrap()
                .analytic_cre()
                .unwrap(),
            2.0
        );
        assert_eq!(
            DistributionSpec::uniform("x", 0.0, 0.5)
                .unwrap()
                .analytic_cre()
                .unwrap(),
            0.125
        );
        assert_eq!(
            DistributionSpec::normal("x", 17.0, 1.0)
                .unwrap()
                .analytic_cre()
                .unwrap(),
            0.9032
        );
        let ln = DistributionSpec::lognormal("x", 0.0, 1.0).unwrap();
        assert!(matches!(
            ln.analytic_cre(),
            Err(GsaError::UnsupportedFamily { .. })
        ));
    }

    #[test]
    fn gaussian_cre_scales_with_sd() {
        let base = DistributionSpec::normal("x", 1.0, 0.7)
            .unwrap()
            .analytic_cre()
            .unwrap();
        for c in [0.1, 2.0, 13.5] {
            let scaled = DistributionSpec::normal("x", 1.0, 0.7 * c)
                .unwrap()
                .analytic_cre()
                .unwrap();
            assert!((scaled - c * base).abs() < 1e-12);
        }
    }

    #[test]
    fn lognormal_mean_ef_parameters() {
        let d = lognormal_from_mean_ef("x1", 2.0, 2.0).unwrap();
        let Family::Lognormal { mu_ln, sigma_ln } = *d.family() else {
            panic!()
        };
        // independent evaluation: ln(2)/1.645 and ln(2) - s^2/2
        assert!((sigma_ln - 0.421_366_067).abs() < 1e-8);
        assert!((mu_ln - 0.604_372_499).abs() < 1e-8);
        assert!((d.mean() - 2.0).abs() < 1e-12);
        let v = d.sample(200_000, RngSeed(21)).unwrap();
        assert!((mean(&v) - 2.0).abs() < 0.01);
    }

    #[test]
    fn lognormal_ef_limit_is_degenerate() {
        let d = lognormal_from_mean_ef("x", 1.0, 1.0 + 1e-12).unwrap();
        let Family::Lognormal { mu_ln, sigma_ln } = *d.family() else {
            panic!()
        };
        assert!(sigma_ln < 1e-11 && mu_ln.abs() < 1e-20);
    }

    #[test]
    fn lognormal_ef_quantile_ratio() {
        let d = lognormal_from_mean_ef("x3", 0.001, 2.0).unwrap();
        let v = d.sample(200_000, RngSeed(4)).unwrap();
        let ratio = quantile(&v, 0.95) / quantile(&v, 0.5);
        assert!((ratio - 2.0).abs() < 0.04, "ratio {ratio}");
    }

    #[test]
    fn lognormal_ef_domain() {
        assert!(matches!(
            lognormal_from_mean_ef("x", 0.0, 2.0),
            Err(GsaError::Domain(_))
        ));
        assert!(matches!(
            lognormal_from_mean_ef("x", 1.0, 1.0),
            Err(GsaError::Domain(_))
        ));
        assert!(matches!(
            lognormal_from_mean_ef("x", 1.0, 0.5),
            Err(GsaError::Domain(_))
        ));
    }

    #[test]
    fn spec_serde_shape() {
        let d = DistributionSpec::normal("P", 11.5, 0.6).unwrap();
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(
            json,
            r#"{"label":"P","family":"normal","mean":11.5,"sd":0.6}"#
        );
        let back: DistributionSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        let bad = r#"{"label":"P","family":"normal","mean":1.0,"sd":-1.0}"#;
        assert!(serde_json::from_str::<DistributionSpec>(bad).is_err());
    }
}
