use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cre_gsa::experiment::{
    convergence_study, run_experiment_timed, write_atomic, write_report, ExperimentConfig,
    StudyTarget, OUTPUT_DIR_ENV,
};
use cre_gsa::models::{BenchmarkModel, Model, MODEL_NAMES};
use cre_gsa::{Execution, Result};

const DEFAULT_OUTPUT: &str = "cregsa-out";

#[derive(Parser)]
#[command(
    name = "cregsa",
    version,
    about = "CRE-based global sensitivity analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every method in a config and write the report files.
    Analyze {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Repeat one estimate over increasing sample sizes.
    Converge {
        config: PathBuf,
        /// Ascending sample sizes, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        /// output_cre, input_cre:X, conditional:X, conditional:X,Y or kappa:X
        #[arg(long, default_value = "output_cre")]
        target: StudyTarget,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the built-in benchmark models.
    ListModels,
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Samples per grid for single-variable conditioning.
    #[arg(long)]
    m: Option<usize>,
    /// Pair grid as I,J.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    #[arg(long)]
    sequential: bool,
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (i, j) = s
        .split_once(',')
        .ok_or_else(|| format!("expected I,J, got `{s}`"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|e| format!("bad grid value `{v}`: {e}"))
    };
    Ok((parse(i)?, parse(j)?))
}

impl Overrides {
    fn apply(&self, c: &mut ExperimentConfig) {
        if let Some(n) = self.n {
            c.n = n;
        }
        if let Some(s) = self.seed {
            c.seed = Some(s);
        }
        if let Some(m) = self.m {
            c.grid.m = m;
        }
        if let Some((i, j)) = self.grid {
            c.grid.i = i;
            c.grid.j = j;
        }
        if self.sequential {
            c.execution = Execution::Sequential;
        }
    }
}

fn load(path: &Path, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::load(path)?;
    overrides.apply(&mut c);
    Ok(c)
}

fn analyze(path: &Path, overrides: &Overrides) -> Result<()> {
    let config = load(path, overrides)?;
    let (report, timing) = run_experiment_timed(&config)?;
    let dir = config.resolve_output_dir(Path::new(DEFAULT_OUTPUT));
    let files = write_report(&report, Some(&timing), &dir)?;

    println!(
        "model {}  n={}  seed={}",
        report.metadata.model, report.metadata.n, report.metadata.seed.0
    );
    print!("{}", cre_gsa::experiment::indices_csv(&report));
    if let Some(d) = &report.decomposition {
        println!("higher-order residual {:.4}", d.higher_order_residual);
    }
    if let Some(c) = &report.costs {
        println!("recommended: {}", c.recommendation);
    }
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn converge(
    path: &Path,
    sizes: &[usize],
    repeats: usize,
    target: &StudyTarget,
    overrides: &Overrides,
) -> Result<()> {
    let config = load(path, overrides)?;
    let table = convergence_study(&config, target, sizes, repeats)?;
    let csv = table.to_csv();
    let dir = config.resolve_output_dir(Path::new(DEFAULT_OUTPUT));
    let file = dir.join("convergence.csv");
    write_atomic(&file, csv.as_bytes())?;
    print!("{csv}");
    eprintln!("wrote {}", file.display());
    Ok(())
}

fn list_models() {
    for name in MODEL_NAMES {
        let m: BenchmarkModel = name.parse().expect("built-in model names parse");
        println!("{:<16} {} inputs  {}", name, m.arity(), m.description());
        let labels: Vec<String> = m.default_inputs().iter().map(|s| s.label.clone()).collect();
        println!("{:<16} inputs: {}", "", labels.join(", "));
    }
    println!();
    println!("output directory: ${OUTPUT_DIR_ENV}, then output_dir in the config, then ./{DEFAULT_OUTPUT}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Analyze { config, overrides } => analyze(config, overrides),
        Command::Converge {
            config,
            sizes,
            repeats,
            target,
            overrides,
        } => converge(config, sizes, *repeats, target, overrides),
        Command::ListModels => {
            list_models();
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cregsa: error: {e}");
            ExitCode::FAILURE
        }
    }
}
