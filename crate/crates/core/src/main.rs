use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use edml::bench::{
    emit_curves, iteration_speedup_table, run_experiment, time_speedup_table, write_results, write_table,
    ExperimentResults, ExperimentSpec,
};
use edml::data::{forward_sample, hide, read_csv, write_csv, Dataset, HidingMode, HidingPolicy};
use edml::learn::{run, Algorithm, Clock, LearnerConfig};
use edml::model::{read_json, read_network, write_json, write_network, Network, Parameterization};

/// MAP parameter learning for discrete Bayesian networks from incomplete data.
#[derive(Parser)]
#[command(name = "edml", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw complete examples from a network's CPTs.
    Sample {
        #[arg(long)]
        network: PathBuf,
        #[arg(long, default_value_t = 1024)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV file to write.
        #[arg(long)]
        output: PathBuf,
    },
    /// Remove values from a dataset.
    Hide {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        /// Fraction in [0, 1] of variables (or cells) to hide.
        #[arg(long)]
        percentage: f64,
        #[arg(long, value_enum, default_value_t = Mode::HiddenVariables)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Learn MAP parameters from a dataset and write the trace and the learned network.
    Learn {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "em")]
        algorithm: Algorithm,
        #[command(flatten)]
        learner: LearnerArgs,
        /// Seed of the random starting parameters.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Run learners on generated problems and write curves, traces and tables.
    Bench {
        /// Network file (JSON or .bif); repeat for several networks.
        #[arg(long, required = true)]
        network: Vec<PathBuf>,
        #[arg(long, default_value_t = 1024)]
        size: usize,
        /// Comma-separated hiding fractions.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.25,0.35,0.5,0.7")]
        hiding: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Mode::HiddenVariables)]
        mode: Mode,
        #[arg(long, default_value_t = 3)]
        replicates: usize,
        /// Comma-separated learners.
        #[arg(long, value_delimiter = ',', default_value = "em,edml,hybrid")]
        learners: Vec<Algorithm>,
        #[command(flatten)]
        learner: LearnerArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Rebuild the speedup tables from result bundles written by `bench`.
    Tables {
        #[arg(long, required = true)]
        results: Vec<PathBuf>,
        /// Directory for the .txt/.csv tables; printed to stdout only when omitted.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Mode {
    HiddenVariables,
    PerCell,
}

impl From<Mode> for HidingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::HiddenVariables => HidingMode::HiddenVariables,
            Mode::PerCell => HidingMode::PerCell,
        }
    }
}

#[derive(Args)]
struct LearnerArgs {
    /// Dirichlet exponent ψ for every parameter.
    #[arg(long, default_value_t = 2.0)]
    prior: f64,
    /// Weight of the previous value in EDML's damped updates, in [0, 1).
    #[arg(long, default_value_t = 0.5)]
    damping: f64,
    #[arg(long, default_value_t = 1000)]
    max_iterations: usize,
    /// Stop once the log posterior moves less than this ...
    #[arg(long, default_value_t = 1e-7)]
    log_posterior_tolerance: f64,
    /// ... and no parameter moves more than this.
    #[arg(long, default_value_t = 1e-6)]
    parameter_tolerance: f64,
    #[arg(long, default_value_t = 1e-8)]
    local_tolerance: f64,
    #[arg(long, default_value_t = 512)]
    local_max_iterations: usize,
    /// Record zero for every timestamp, making outputs byte-for-byte reproducible.
    #[arg(long)]
    no_clock: bool,
}

impl LearnerArgs {
    fn config(&self, algorithm: Algorithm, seed: u64) -> LearnerConfig {
        LearnerConfig {
            algorithm,
            prior_exponent: self.prior,
            seed,
            max_iterations: self.max_iterations,
            log_posterior_tolerance: self.log_posterior_tolerance,
            parameter_tolerance: self.parameter_tolerance,
            local_max_iterations: self.local_max_iterations,
            local_tolerance: self.local_tolerance,
            damping: self.damping,
            clock: self.clock(),
            ..LearnerConfig::default()
        }
    }

    fn clock(&self) -> Clock {
        if self.no_clock {
            Clock::Disabled
        } else {
            Clock::WallClock
        }
    }
}

fn load_network(path: &Path) -> Result<(Network, Option<Parameterization>)> {
    Ok(read_network(path)?)
}

fn load_dataset(network: &Network, path: &Path) -> Result<Dataset> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(read_csv(BufReader::new(file), network, path)?)
}

fn save_dataset(network: &Network, dataset: &Dataset, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_csv(BufWriter::new(file), network, dataset)?;
    Ok(())
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn print_tables(results: &[ExperimentResults], output_dir: Option<&Path>) -> Result<()> {
    let merged = ExperimentResults {
        spec: results.first().map(|r| r.spec.clone()).unwrap_or_default(),
        problems: results.iter().flat_map(|r| r.problems.iter().cloned()).collect(),
    };
    let has = |a: Algorithm| merged.problems.iter().any(|p| p.run(a).is_some());
    let mut tables = Vec::new();
    if has(Algorithm::Edml) && has(Algorithm::Em) {
        tables.push((
            "iterations",
            iteration_speedup_table(&merged, Algorithm::Edml, Algorithm::Em),
        ));
        tables.push(("time-edml", time_speedup_table(&merged, Algorithm::Edml, Algorithm::Em)));
    }
    if has(Algorithm::Hybrid) && has(Algorithm::Em) {
        tables.push((
            "iterations-hybrid",
            iteration_speedup_table(&merged, Algorithm::Hybrid, Algorithm::Em),
        ));
        tables.push(("time", time_speedup_table(&merged, Algorithm::Hybrid, Algorithm::Em)));
    }
    if tables.is_empty() {
        bail!("the results hold no learner pair to compare (EM with EDML or hybrid)");
    }
    for (stem, table) in &tables {
        println!("{}", table.to_text());
        if let Some(dir) = output_dir {
            write_table(table, dir, stem)?;
        }
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sample {
            network,
            size,
            seed,
            output,
        } => {
            let (net, params) = load_network(&network)?;
            let Some(params) = params else {
                bail!("{} has no CPTs to sample from", network.display());
            };
            let data = forward_sample(&net, &params, size, seed)?;
            save_dataset(&net, &data, &output)?;
            println!("wrote {} examples to {}", data.len(), output.display());
        }
        Command::Hide {
            network,
            dataset,
            percentage,
            mode,
            seed,
            output,
        } => {
            let (net, _) = load_network(&network)?;
            let data = load_dataset(&net, &dataset)?;
            let hidden = hide(&data, &HidingPolicy::new(mode.into(), percentage, seed)?)?;
            save_dataset(&net, &hidden, &output)?;
            println!("wrote {} examples to {}", hidden.len(), output.display());
        }
        Command::Learn {
            network,
            dataset,
            algorithm,
            learner,
            seed,
            output_dir,
        } => {
            let (net, _) = load_network(&network)?;
            let data = load_dataset(&net, &dataset)?;
            let trace = run(&net, &data, &learner.config(algorithm, seed))?;
            create_dir(&output_dir)?;
            write_json(&output_dir.join("trace.json"), &trace)?;
            write_network(&output_dir.join("learned.json"), &net, Some(&trace.final_params))?;
            println!(
                "{algorithm}: {} iterations, status {:?}, log posterior {}",
                trace.global_iterations(),
                trace.status,
                trace.final_log_posterior()
            );
        }
        Command::Bench {
            network,
            size,
            hiding,
            mode,
            replicates,
            learners,
            learner,
            seed,
            output_dir,
        } => {
            let mut all = Vec::new();
            for path in network {
                let spec = ExperimentSpec {
                    network: path.clone(),
                    dataset_size: size,
                    hiding: hiding.clone(),
                    hiding_mode: mode.into(),
                    replicates,
                    learners: learners.iter().map(|&a| learner.config(a, seed)).collect(),
                    prior_exponent: learner.prior,
                    master_seed: seed,
                    clock: learner.clock(),
                    record_parameters: false,
                };
                let results = run_experiment(&spec)?;
                let name = results
                    .problems
                    .first()
                    .map_or("network".to_string(), |p| p.network.clone());
                let dir = output_dir.join(&name);
                let curves = emit_curves(&results, &dir.join("curves"))?;
                let bundle = write_results(&results, &dir)?;
                println!(
                    "{name}: {} problems, {} curves, results in {}",
                    results.problems.len(),
                    curves.len(),
                    bundle.display()
                );
                all.push(results);
            }
            print_tables(&all, Some(&output_dir))?;
        }
        Command::Tables { results, output_dir } => {
            let bundles = results
                .iter()
                .map(|p| read_json::<ExperimentResults>(p).map_err(Into::into))
                .collect::<Result<Vec<_>>>()?;
            print_tables(&bundles, output_dir.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
