//! Benchmark harness for QAOA parameter-setting strategies on random k-SAT.
//!
//! Subcommands: `gen`, `spectrum`, `run`, `scan`, `precompute-tqa`,
//! `aggregate`, `config`. Exit code 0 means every run succeeded, 2 means
//! partial failures were recorded in the results file.

use std::fs;
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use apqaoa_cli::aggregate::{aggregate, write_figure_data};
use apqaoa_cli::config::{ExperimentConfig, NormalizationChoice};
use apqaoa_cli::records::{read_records, write_records};
use apqaoa_cli::suite::{
    generate_suite, precompute_tqa_priors, run_suite, InstanceSource, TqaPriorFile,
};
use apqaoa_core::optimize::grid_scan;
use apqaoa_core::sat::parse_dimacs;
use apqaoa_core::schedules::linear_angles;
use apqaoa_core::simulator::{expectation, run_circuit, target_probability};
use apqaoa_core::spectrum::{build_spectrum, exact_g0, normalize, NormalizationMode};
use apqaoa_core::strategies::StrategyKind;

#[derive(Parser)]
#[command(name = "apqaoa", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Experiment config file (TOML); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides config and $APQAOA_OUT_DIR).
    #[arg(long)]
    out: Option<String>,
    /// Override suite.base_seed.
    #[arg(long)]
    base_seed: Option<u64>,
    /// Override suite.size.
    #[arg(long)]
    suite_size: Option<usize>,
    /// Override model.n_values (repeatable).
    #[arg(long = "n", value_name = "N")]
    n_values: Vec<usize>,
    /// Override run.strategies (comma separated names).
    #[arg(long, value_delimiter = ',')]
    strategies: Vec<StrategyKind>,
    /// Override run.normalization (estimated|exact|raw).
    #[arg(long)]
    normalization: Option<NormalizationChoice>,
    /// Override run.parallelism (0 = all cores).
    #[arg(long)]
    parallelism: Option<usize>,
    /// Override run.depth with a fixed value.
    #[arg(long)]
    depth: Option<usize>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.base_seed {
            config.suite.base_seed = seed;
        }
        if let Some(size) = self.suite_size {
            config.suite.size = size;
        }
        if !self.n_values.is_empty() {
            config.model.n_values = self.n_values.clone();
        }
        if !self.strategies.is_empty() {
            config.run.strategies = self.strategies.clone();
        }
        if let Some(norm) = self.normalization {
            config.run.normalization = norm;
        }
        if let Some(par) = self.parallelism {
            config.run.parallelism = par;
        }
        if let Some(depth) = self.depth {
            config.run.depth = apqaoa_cli::config::DepthRule::Fixed(depth);
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate the instance suite as DIMACS + metadata sidecars.
    Gen(ConfigArgs),
    /// Print spectral data {G_E, G_0, c_max, c_min, maximizers} for one instance.
    Spectrum {
        /// DIMACS CNF file.
        #[arg(long)]
        input: PathBuf,
        /// Bound multiplier for the spread estimate.
        #[arg(long, default_value_t = 3.0)]
        c0: f64,
    },
    /// Run every (instance, strategy) pair and stream records to results.jsonl.
    Run {
        #[command(flatten)]
        common: ConfigArgs,
        /// Run on instances previously written by `gen` instead of
        /// regenerating from seeds.
        #[arg(long)]
        instances: Option<PathBuf>,
        /// Pre-computed tqa prior file (from `precompute-tqa`).
        #[arg(long)]
        tqa_prior: Option<PathBuf>,
    },
    /// Exhaustive (theta, rho) surface scan on one instance.
    Scan {
        /// DIMACS CNF file.
        #[arg(long)]
        input: PathBuf,
        /// probability (target state, exact-G0 normalization) or
        /// expectation (normalized objective).
        #[arg(long, default_value = "probability")]
        mode: ScanMode,
        #[arg(long, default_value_t = 0.0)]
        theta_min: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        theta_max: f64,
        #[arg(long, default_value_t = 0.1)]
        rho_min: f64,
        #[arg(long, default_value_t = 4.0)]
        rho_max: f64,
        /// Grid points per axis.
        #[arg(long, default_value_t = 33)]
        resolution: usize,
        /// Circuit depth; defaults to the instance's variable count.
        #[arg(long)]
        depth: Option<usize>,
        /// Surface CSV destination.
        #[arg(long)]
        output: PathBuf,
        /// c0 for estimated normalization in expectation mode.
        #[arg(long, default_value_t = 3.0)]
        c0: f64,
    },
    /// Average the linear-schedule optimum over sample instances per n.
    PrecomputeTqa(ConfigArgs),
    /// Fold a results file into aggregate rows and figure data files.
    Aggregate {
        /// results.jsonl produced by `run`.
        #[arg(long)]
        results: PathBuf,
        /// Output directory for aggregates.csv and fig_*.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Configuration helpers.
    Config {
        /// Print the default config as TOML.
        #[arg(long)]
        dump: bool,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ScanMode {
    Probability,
    Expectation,
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen(args) => {
            let config = args.resolve()?;
            let dir = config.output_dir(args.out.as_deref());
            let paths = generate_suite(&config, &dir)?;
            eprintln!("wrote {} instances under {}", paths.len(), dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Spectrum { input, c0 } => {
            let text = fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let formula = parse_dimacs(text.as_slice(), None)?;
            let table = build_spectrum(&formula)?;
            let norm = normalize(&table, NormalizationMode::Estimated { c0 })?;
            let record = serde_json::json!({
                "n": table.n(),
                "m": table.m(),
                "k": table.k(),
                "g_e": norm.g_e,
                "g_0": exact_g0(&table),
                "c_max": table.c_max(),
                "c_min": table.c_min(),
                "maximizer_count": table.maximizers().len(),
            });
            println!("{record}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            common,
            instances,
            tqa_prior,
        } => {
            let config = common.resolve()?;
            let dir = config.output_dir(common.out.as_deref());
            fs::create_dir_all(&dir)?;
            let source = match instances {
                Some(path) => InstanceSource::Directory(path),
                None => InstanceSource::Generate,
            };
            let priors: Option<TqaPriorFile> = match tqa_prior {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    Some(toml::from_str(&text)?)
                }
                None => None,
            };
            let outcome = run_suite(&config, &source, priors.as_ref())?;
            let results_path = dir.join("results.jsonl");
            let file = fs::File::create(&results_path)?;
            write_records(std::io::BufWriter::new(file), &outcome.records)?;
            eprintln!(
                "wrote {} records to {} ({} failures)",
                outcome.records.len(),
                results_path.display(),
                outcome.failures
            );
            if outcome.failures > 0 {
                Ok(ExitCode::from(2))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::Scan {
            input,
            mode,
            theta_min,
            theta_max,
            rho_min,
            rho_max,
            resolution,
            depth,
            output,
            c0,
        } => {
            let text = fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let formula = parse_dimacs(text.as_slice(), None)?;
            let table = build_spectrum(&formula)?;
            let depth = depth.unwrap_or(table.n());
            let norm_mode = match mode {
                ScanMode::Probability => NormalizationMode::Exact,
                ScanMode::Expectation => NormalizationMode::Estimated { c0 },
            };
            let norm = normalize(&table, norm_mode)?;
            let scan = grid_scan(
                |theta, rho| {
                    let gb = linear_angles(theta, rho, depth);
                    let state =
                        run_circuit(&table, &norm, &gb).expect("depth validated by table build");
                    match mode {
                        ScanMode::Probability => target_probability(&state, &table),
                        ScanMode::Expectation => {
                            expectation(&state, &table, norm.phase_scale, None)
                        }
                    }
                },
                (theta_min, theta_max),
                (rho_min, rho_max),
                (resolution, resolution),
            );
            let mut w = csv::Writer::from_path(&output)?;
            w.write_record(["theta", "rho", "value"])?;
            for (ti, &theta) in scan.theta_axis.iter().enumerate() {
                for (ri, &rho) in scan.rho_axis.iter().enumerate() {
                    let v = scan.values[ti * scan.rho_axis.len() + ri];
                    w.write_record([
                        format!("{theta:.9}"),
                        format!("{rho:.9}"),
                        format!("{v:.9}"),
                    ])?;
                }
            }
            w.flush()?;
            let summary = serde_json::json!({
                "best_theta": scan.best_point.0,
                "best_rho": scan.best_point.1,
                "best_value": scan.best_value,
                "evals": scan.evals,
                "surface": output.display().to_string(),
            });
            println!("{summary}");
            Ok(ExitCode::SUCCESS)
        }
        Command::PrecomputeTqa(args) => {
            let config = args.resolve()?;
            let dir = config.output_dir(args.out.as_deref());
            fs::create_dir_all(&dir)?;
            let priors = precompute_tqa_priors(&config)?;
            let path = dir.join("tqa_prior.toml");
            fs::write(&path, toml::to_string_pretty(&priors)?)?;
            let spent: u64 = priors.priors.iter().map(|p| p.precompute_evals).sum();
            eprintln!(
                "wrote {} priors to {} ({} pre-computation evals)",
                priors.priors.len(),
                path.display(),
                spent
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Aggregate { results, out } => {
            let file = fs::File::open(&results)
                .with_context(|| format!("opening {}", results.display()))?;
            let records = read_records(BufReader::new(file))?;
            let rows = aggregate(&records)?;
            let written = write_figure_data(&records, &out)?;
            eprintln!(
                "aggregated {} records into {} rows; wrote {} under {}",
                records.len(),
                rows.len(),
                written.join(", "),
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Config { dump } => {
            if dump {
                print!("{}", ExperimentConfig::default().to_toml());
            } else {
                eprintln!("nothing to do; try --dump");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
