//! Config-driven experiment runner.
//!
//! An experiment config is a TOML document naming a benchmark model, its
//! input distributions, the sample size and seed, the methods to run and
//! their hyper-parameters. [`run_experiment`] turns it into a
//! [`SensitivityReport`], and [`write_report`] writes
//!
//! - `report.json`: the full report,
//! - `indices.csv`: one row per input with every index and its rank,
//! - `decomposition.csv`: κ terms, when pairs were requested,
//! - `costs.csv`: the strategy table, when a `[cost]` section is present,
//!
//! plus `timing.json` with wall-clock times. Everything except `timing.json`
//! is a pure function of the config, so reruns produce identical bytes.
//!
//! Example config:
//!
//! ```toml
//! model = "ishigami"
//! n = 20000
//! seed = 7
//! methods = ["kappa", "kappa_pairs", "sobol", "delta", "shannon_mi"]
//!
//! [grid]
//! m = 500
//! i = 20
//! j = 20
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baselines::{given_data_indices, sobol_indices, BinSettings, MIN_BASELINE_SAMPLES};
use crate::costs::{strategy_table, CostResult, CostSpec};
use crate::distributions::{lognormal_from_mean_ef, DistributionSpec, Family};
use crate::error::{GsaError, Result};
use crate::estimators::{
    conditional_cre_1_with, conditional_cre_2_with, empirical_cre, GridParams,
};
use crate::exec::Execution;
use crate::importance::{decompose_with, single_terms, DecompositionResult};
use crate::models::{BenchmarkModel, Model};
use crate::rng::RngSeed;
use crate::sample::SampleMatrix;

/// Environment variable that overrides the output directory of a config.
pub const OUTPUT_DIR_ENV: &str = "CREGSA_OUTPUT_DIR";

/// Stream offset separating the pick-freeze design from the given-data wave.
const SOBOL_SEED_SALT: u64 = 0x5AB0_1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Kappa,
    KappaPairs,
    Sobol,
    Delta,
    ShannonMi,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Kappa => "kappa",
            Method::KappaPairs => "kappa_pairs",
            Method::Sobol => "sobol",
            Method::Delta => "delta",
            Method::ShannonMi => "shannon_mi",
        }
    }
}

/// One input as written in a config file. `lognormal_ef` takes the
/// arithmetic mean and error factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum InputConfig {
    Uniform {
        label: String,
        a: f64,
        b: f64,
    },
    Normal {
        label: String,
        mean: f64,
        sd: f64,
    },
    Exponential {
        label: String,
        rate: f64,
    },
    Lognormal {
        label: String,
        mu_ln: f64,
        sigma_ln: f64,
    },
    LognormalEf {
        label: String,
        mean: f64,
        error_factor: f64,
    },
}

impl InputConfig {
    pub fn to_spec(&self) -> Result<DistributionSpec> {
        match self {
            InputConfig::Uniform { label, a, b } => {
                DistributionSpec::new(label, Family::Uniform { a: *a, b: *b })
            }
            InputConfig::Normal { label, mean, sd } => DistributionSpec::new(
                label,
                Family::Normal {
                    mean: *mean,
                    sd: *sd,
                },
            ),
            InputConfig::Exponential { label, rate } => {
                DistributionSpec::new(label, Family::Exponential { rate: *rate })
            }
            InputConfig::Lognormal {
                label,
                mu_ln,
                sigma_ln,
            } => DistributionSpec::new(
                label,
                Family::Lognormal {
                    mu_ln: *mu_ln,
                    sigma_ln: *sigma_ln,
                },
            ),
            InputConfig::LognormalEf {
                label,
                mean,
                error_factor,
            } => lognormal_from_mean_ef(label, *mean, *error_factor),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelConfig {
    Name(String),
    Full(BenchmarkModel),
}

impl ModelConfig {
    pub fn resolve(&self) -> Result<BenchmarkModel> {
        match self {
            ModelConfig::Name(name) => name.parse(),
            ModelConfig::Full(m) => Ok(*m),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    /// Input distributions; the model's published inputs when omitted.
    #[serde(default)]
    pub inputs: Vec<InputConfig>,
    pub n: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub grid: GridParams,
    #[serde(default)]
    pub bins: BinSettings,
    #[serde(default)]
    pub cost: Option<CostSpec>,
    #[serde(default)]
    pub execution: Execution,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| GsaError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| GsaError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn seed(&self) -> RngSeed {
        self.seed.map(RngSeed).unwrap_or_default()
    }

    pub fn model(&self) -> Result<BenchmarkModel> {
        self.model.resolve()
    }

    pub fn input_specs(&self) -> Result<Vec<DistributionSpec>> {
        let model = self.model()?;
        if self.inputs.is_empty() {
            return Ok(model.default_inputs());
        }
        self.inputs.iter().map(InputConfig::to_spec).collect()
    }

    pub fn methods(&self) -> BTreeSet<Method> {
        self.methods.iter().copied().collect()
    }

    /// Checks model arity, method list and sample-size minimums.
    pub fn validate(&self) -> Result<()> {
        let model = self.model()?;
        let specs = self.input_specs()?;
        if specs.len() != model.arity() {
            return Err(GsaError::Config(format!(
                "model `{}` takes {} inputs, config lists {}",
                model.name(),
                model.arity(),
                specs.len()
            )));
        }
        let mut labels = BTreeSet::new();
        for s in &specs {
            if !labels.insert(s.label.as_str()) {
                return Err(GsaError::Config(format!(
                    "duplicate input label `{}`",
                    s.label
                )));
            }
        }
        let methods = self.methods();
        if methods.is_empty() {
            return Err(GsaError::Config("no methods requested".into()));
        }
        self.grid.validate()?;
        if self.n < 2 {
            return Err(GsaError::Config(format!(
                "sample size must be at least 2, got {}",
                self.n
            )));
        }
        let needs_kappa = methods.contains(&Method::Kappa) || methods.contains(&Method::KappaPairs);
        if needs_kappa && self.n < self.grid.m {
            return Err(GsaError::Config(format!(
                "n={} is smaller than the grid size m={}",
                self.n, self.grid.m
            )));
        }
        if methods.contains(&Method::KappaPairs) && self.n < self.grid.i * self.grid.j {
            return Err(GsaError::Config(format!(
                "n={} is smaller than the {}x{} pair grid",
                self.n, self.grid.i, self.grid.j
            )));
        }
        let needs_baseline = methods
            .iter()
            .any(|m| matches!(m, Method::Sobol | Method::Delta | Method::ShannonMi));
        if needs_baseline && self.n < MIN_BASELINE_SAMPLES {
            return Err(GsaError::Config(format!(
                "sobol, delta and shannon_mi need n >= {MIN_BASELINE_SAMPLES}, got {}",
                self.n
            )));
        }
        if let Some(cost) = &self.cost {
            cost.validate()?;
            if !needs_kappa {
                return Err(GsaError::Config(
                    "a [cost] section requires the kappa method".into(),
                ));
            }
        }
        Ok(())
    }

    /// Output directory: the environment override, then the config value,
    /// then `default`.
    pub fn resolve_output_dir(&self, default: &Path) -> PathBuf {
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()) {
            return PathBuf::from(dir);
        }
        self.output_dir
            .clone()
            .unwrap_or_else(|| default.to_path_buf())
    }
}

/// Per-method ranks (1 = most important).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Ranks {
    pub sobol_main: Option<usize>,
    pub sobol_total: Option<usize>,
    pub delta: Option<usize>,
    pub shannon_mi: Option<usize>,
    pub kappa: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: String,
    pub sobol_main: Option<f64>,
    pub sobol_total: Option<f64>,
    pub delta: Option<f64>,
    pub shannon_mi: Option<f64>,
    pub kappa: Option<f64>,
    pub ranks: Ranks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolSettings {
    pub seed: RngSeed,
    pub base_samples: usize,
    pub model_evaluations: usize,
    pub output_variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub model: String,
    pub inputs: Vec<DistributionSpec>,
    pub seed: RngSeed,
    pub n: usize,
    pub methods: Vec<Method>,
    pub grid: GridParams,
    pub bins: BinSettings,
    /// Output CRE of the given-data wave.
    pub output_cre: Option<f64>,
    pub sobol: Option<SobolSettings>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub metadata: ReportMetadata,
    pub rows: Vec<ReportRow>,
    pub decomposition: Option<DecompositionResult>,
    pub costs: Option<CostResult>,
}

impl SensitivityReport {
    pub fn row(&self, label: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// Labels ordered from most to least important under `select`.
    pub fn ranking(&self, select: impl Fn(&Ranks) -> Option<usize>) -> Option<Vec<String>> {
        let mut ranked: Vec<(usize, &str)> = self
            .rows
            .iter()
            .map(|r| select(&r.ranks).map(|k| (k, r.label.as_str())))
            .collect::<Option<_>>()?;
        ranked.sort();
        Some(ranked.into_iter().map(|(_, l)| l.to_string()).collect())
    }
}

/// Wall-clock time per stage, in milliseconds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub sampling_ms: f64,
    pub kappa_ms: f64,
    pub sobol_ms: f64,
    pub given_data_ms: f64,
    pub total_ms: f64,
}

/// Ranks of `values`, 1 for the largest; ties keep input order.
pub fn rank_descending(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ranks = vec![0; values.len()];
    for (r, &i) in idx.iter().enumerate() {
        ranks[i] = r + 1;
    }
    ranks
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<SensitivityReport> {
    run_experiment_timed(config).map(|(r, _)| r)
}

pub fn run_experiment_timed(config: &ExperimentConfig) -> Result<(SensitivityReport, Timing)> {
    let start = Instant::now();
    config.validate()?;
    let model = config.model()?;
    let specs = config.input_specs()?;
    let methods = config.methods();
    let seed = config.seed();
    let exec = config.execution;
    let k = specs.len();
    let mut timing = Timing::default();

    let needs_wave = methods.iter().any(|m| !matches!(m, Method::Sobol));
    let wave = if needs_wave {
        let t = Instant::now();
        let s = SampleMatrix::generate(&model, &specs, config.n, seed, exec)?;
        timing.sampling_ms = ms(t);
        Some(s)
    } else {
        None
    };

    let t = Instant::now();
    let mut decomposition = None;
    let mut kappa = None;
    let mut output_cre = None;
    if let Some(samples) = &wave {
        output_cre = Some(empirical_cre(samples.output())?);
        if methods.contains(&Method::KappaPairs) {
            let d = decompose_with(samples, &config.grid, Some(seed), exec)
                .map_err(|e| e.in_method("kappa_pairs"))?;
            kappa = Some(d.single_kappas());
            decomposition = Some(d);
        } else if methods.contains(&Method::Kappa) {
            let terms =
                single_terms(samples, &config.grid, exec).map_err(|e| e.in_method("kappa"))?;
            kappa = Some(terms.iter().map(|t| t.kappa).collect::<Vec<_>>());
        }
    }
    timing.kappa_ms = ms(t);

    let t = Instant::now();
    let mut sobol_meta = None;
    let mut sobol = None;
    if methods.contains(&Method::Sobol) {
        let sobol_seed = seed.derive(SOBOL_SEED_SALT);
        let s = sobol_indices(&model, &specs, config.n, sobol_seed, exec)
            .map_err(|e| e.in_method("sobol"))?;
        sobol_meta = Some(SobolSettings {
            seed: sobol_seed,
            base_samples: s.base_samples,
            model_evaluations: s.model_evaluations,
            output_variance: s.output_variance,
        });
        sobol = Some(s);
    }
    timing.sobol_ms = ms(t);

    let t = Instant::now();
    let mut delta = None;
    let mut shannon = None;
    if let Some(samples) = &wave {
        if methods.contains(&Method::Delta) || methods.contains(&Method::ShannonMi) {
            let g = given_data_indices(samples, &config.bins, exec)
                .map_err(|e| e.in_method("delta/shannon_mi"))?;
            if methods.contains(&Method::Delta) {
                delta = Some(g.delta);
            }
            if methods.contains(&Method::ShannonMi) {
                shannon = Some(g.shannon_mi);
            }
        }
    }
    timing.given_data_ms = ms(t);

    let column = |v: &Option<Vec<f64>>| v.as_ref().map(|v| (v.clone(), rank_descending(v)));
    let s_main = column(&sobol.as_ref().map(|s| s.main.clone()));
    let s_total = column(&sobol.as_ref().map(|s| s.total.clone()));
    let delta_c = column(&delta);
    let mi_c = column(&shannon);
    let kappa_c = column(&kappa);
    let pick = |c: &Option<(Vec<f64>, Vec<usize>)>, i: usize| c.as_ref().map(|(v, r)| (v[i], r[i]));

    let rows = (0..k)
        .map(|i| {
            let (sm, sm_r) = pick(&s_main, i).unzip();
            let (st, st_r) = pick(&s_total, i).unzip();
            let (d, d_r) = pick(&delta_c, i).unzip();
            let (mi, mi_r) = pick(&mi_c, i).unzip();
            let (kp, kp_r) = pick(&kappa_c, i).unzip();
            ReportRow {
                label: specs[i].label.clone(),
                sobol_main: sm,
                sobol_total: st,
                delta: d,
                shannon_mi: mi,
                kappa: kp,
                ranks: Ranks {
                    sobol_main: sm_r,
                    sobol_total: st_r,
                    delta: d_r,
                    shannon_mi: mi_r,
                    kappa: kp_r,
                },
            }
        })
        .collect();

    let costs = match (&config.cost, &wave) {
        (Some(cost), Some(samples)) => {
            let d = match &decomposition {
                Some(d) => d.clone(),
                None => singles_only(samples, &config.grid, seed, exec)?,
            };
            Some(strategy_table(&specs, &d, cost).map_err(|e| e.in_method("cost"))?)
        }
        _ => None,
    };

    let report = SensitivityReport {
        metadata: ReportMetadata {
            model: model.name().to_string(),
            inputs: specs,
            seed,
            n: config.n,
            methods: methods.into_iter().collect(),
            grid: config.grid,
            bins: config.bins,
            output_cre,
            sobol: sobol_meta,
        },
        rows,
        decomposition,
        costs,
    };
    timing.total_ms = ms(start);
    Ok((report, timing))
}

fn singles_only(
    samples: &SampleMatrix,
    grid: &GridParams,
    seed: RngSeed,
    exec: Execution,
) -> Result<DecompositionResult> {
    let singles = single_terms(samples, grid, exec)?;
    let sum: f64 = singles.iter().map(|t| t.kappa).sum();
    let raw: f64 = singles.iter().map(|t| t.raw).sum();
    Ok(DecompositionResult {
        total_cre: empirical_cre(samples.output())?,
        singles,
        pairs: Vec::new(),
        higher_order_residual: 1.0 - sum,
        raw_residual: 1.0 - raw,
        sample_size: samples.len(),
        seed: Some(seed),
        grid: *grid,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn fmt_rank(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Table of every index per input, with ranks.
pub fn indices_csv(report: &SensitivityReport) -> String {
    let mut out =
        String::from("label,S,S_rank,ST,ST_rank,delta,delta_rank,eta,eta_rank,kappa,kappa_rank\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.label,
            fmt_opt(r.sobol_main),
            fmt_rank(r.ranks.sobol_main),
            fmt_opt(r.sobol_total),
            fmt_rank(r.ranks.sobol_total),
            fmt_opt(r.delta),
            fmt_rank(r.ranks.delta),
            fmt_opt(r.shannon_mi),
            fmt_rank(r.ranks.shannon_mi),
            fmt_opt(r.kappa),
            fmt_rank(r.ranks.kappa),
        );
    }
    out
}

/// κ terms of a decomposition, one per line, ending with the higher-order
/// complement.
pub fn decomposition_csv(d: &DecompositionResult) -> String {
    let mut out = String::from("term,kappa,raw,conditional_cre\n");
    for t in &d.singles {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.6e}",
            t.label, t.kappa, t.raw, t.conditional_cre
        );
    }
    for t in &d.pairs {
        let _ = writeln!(
            out,
            "{}|{},{:.6},{:.6},{:.6e}",
            t.labels.0, t.labels.1, t.kappa, t.raw, t.conditional_cre
        );
    }
    let _ = writeln!(
        out,
        "higher_order,{:.6},{:.6},",
        d.higher_order_residual, d.raw_residual
    );
    out
}

pub fn costs_csv(c: &CostResult) -> String {
    let mut out =
        String::from("label,magnitude,variance,relative_uncertainty,cost,kappa,recommended\n");
    for r in &c.rows {
        let _ = writeln!(
            out,
            "{},{:.6e},{:.6e},{:.6},{:.6},{:.6},{}",
            r.label,
            r.magnitude,
            r.variance,
            r.relative_uncertainty,
            r.cost,
            r.kappa,
            r.label == c.recommendation
        );
    }
    out
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes the report files into `dir` and returns their paths.
pub fn write_report(
    report: &SensitivityReport,
    timing: Option<&Timing>,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut put = |name: &str, body: String| -> Result<()> {
        let p = dir.join(name);
        write_atomic(&p, body.as_bytes())?;
        written.push(p);
        Ok(())
    };
    let json = serde_json::to_string_pretty(report).map_err(|e| GsaError::Config(e.to_string()))?;
    put("report.json", json + "\n")?;
    put("indices.csv", indices_csv(report))?;
    if let Some(d) = &report.decomposition {
        put("decomposition.csv", decomposition_csv(d))?;
    }
    if let Some(c) = &report.costs {
        put("costs.csv", costs_csv(c))?;
    }
    if let Some(t) = timing {
        let json = serde_json::to_string_pretty(t).map_err(|e| GsaError::Config(e.to_string()))?;
        put("timing.json", json + "\n")?;
    }
    Ok(written)
}

/// Quantity tracked by a convergence study.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StudyTarget {
    /// Empirical CRE of the model output.
    OutputCre,
    /// Empirical CRE of one input column.
    InputCre(String),
    /// E(Y | X_a).
    Conditional(String),
    /// E(Y | X_a, X_b).
    ConditionalPair(String, String),
    /// κ_a.
    Kappa(String),
}

impl std::str::FromStr for StudyTarget {
    type Err = GsaError;

    /// Parses `output_cre`, `input_cre:X1`, `conditional:X2`,
    /// `conditional:X2,X3` or `kappa:X1`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        let labels: Vec<String> = arg
            .split(',')
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        match (kind, labels.as_slice()) {
            ("output_cre", []) => Ok(StudyTarget::OutputCre),
            ("input_cre", [a]) => Ok(StudyTarget::InputCre(a.clone())),
            ("conditional", [a]) => Ok(StudyTarget::Conditional(a.clone())),
            ("conditional", [a, b]) => Ok(StudyTarget::ConditionalPair(a.clone(), b.clone())),
            ("kappa", [a]) => Ok(StudyTarget::Kappa(a.clone())),
            _ => Err(GsaError::Config(format!(
                "bad study target `{s}` (expected output_cre, input_cre:X, conditional:X, conditional:X,Y or kappa:X)"
            ))),
        }
    }
}

impl std::fmt::Display for StudyTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StudyTarget::OutputCre => write!(f, "output_cre"),
            StudyTarget::InputCre(a) => write!(f, "input_cre:{a}"),
            StudyTarget::Conditional(a) => write!(f, "conditional:{a}"),
            StudyTarget::ConditionalPair(a, b) => write!(f, "conditional:{a},{b}"),
            StudyTarget::Kappa(a) => write!(f, "kappa:{a}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub size: usize,
    pub repeats: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    pub mean_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub target: String,
    pub model: String,
    pub seed: RngSeed,
    pub grid: GridParams,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("target,size,repeats,mean,sd,min,max,mean_time_ms\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.6},{:.6},{:.6},{:.6},{:.4}",
                self.target, r.size, r.repeats, r.mean, r.sd, r.min, r.max, r.mean_time_ms
            );
        }
        out
    }
}

fn label_index(labels: &[String], label: &str) -> Result<usize> {
    labels
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| GsaError::Config(format!("no input labelled `{label}`")))
}

fn evaluate_target(
    samples: &SampleMatrix,
    target: &StudyTarget,
    grid: &GridParams,
    exec: Execution,
) -> Result<f64> {
    let labels = samples.labels();
    match target {
        StudyTarget::OutputCre => empirical_cre(samples.output()),
        StudyTarget::InputCre(a) => empirical_cre(samples.column(label_index(labels, a)?)?),
        StudyTarget::Conditional(a) => conditional_cre_1_with(
            samples.column(label_index(labels, a)?)?,
            samples.output(),
            grid.m,
            exec,
        ),
        StudyTarget::ConditionalPair(a, b) => conditional_cre_2_with(
            samples.column(label_index(labels, a)?)?,
            samples.column(label_index(labels, b)?)?,
            samples.output(),
            grid.i,
            grid.j,
            exec,
        ),
        StudyTarget::Kappa(a) => {
            let i = label_index(labels, a)?;
            let total = empirical_cre(samples.output())?;
            if total <= 0.0 {
                return Err(GsaError::DegenerateOutput);
            }
            let c = conditional_cre_1_with(samples.column(i)?, samples.output(), grid.m, exec)?;
            Ok((1.0 - c / total).clamp(0.0, 1.0))
        }
    }
}

/// Repeats the estimate of `target` at each sample size.
///
/// Repeat `r` uses seed `seed.derive(r)` at every size. Sizes are processed
/// one at a time so the timing column is not distorted by contention; the
/// estimator itself runs in the config's execution mode.
pub fn convergence_study(
    config: &ExperimentConfig,
    target: &StudyTarget,
    sizes: &[usize],
    repeats: usize,
) -> Result<ConvergenceTable> {
    if repeats == 0 {
        return Err(GsaError::Config("repeats must be at least 1".into()));
    }
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(GsaError::Config(
            "sizes must be non-empty and strictly ascending".into(),
        ));
    }
    config.grid.validate()?;
    let model = config.model()?;
    let specs = config.input_specs()?;
    let seed = config.seed();
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let mut values = Vec::with_capacity(repeats);
        let mut elapsed = 0.0;
        for r in 0..repeats {
            let samples = SampleMatrix::generate(
                &model,
                &specs,
                size,
                seed.derive(r as u64),
                config.execution,
            )?;
            let t = Instant::now();
            values.push(evaluate_target(
                &samples,
                target,
                &config.grid,
                config.execution,
            )?);
            elapsed += ms(t);
        }
        let mean = values.iter().sum::<f64>() / repeats as f64;
        let sd = if repeats > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (repeats - 1) as f64)
                .sqrt()
        } else {
            0.0
        };
        rows.push(ConvergenceRow {
            size,
            repeats,
            mean,
            sd,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean_time_ms: elapsed / repeats as f64,
        });
    }
    Ok(ConvergenceTable {
        target: target.to_string(),
        model: model.name().to_string(),
        seed,
        grid: config.grid,
        rows,
    })
}
