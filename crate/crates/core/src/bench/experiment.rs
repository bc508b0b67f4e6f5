use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{forward_sample, hide, HidingMode, HidingPolicy};
use crate::error::{Error, Result};
use crate::learn::{run_with_prior, Algorithm, Clock, LearnerConfig, LearningTrace};
use crate::model::{read_network, DirichletPrior, Network, Parameterization};

/// A sweep of learning problems: every hiding level times every replicate, each solved by
/// every configured learner from a shared starting point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentSpec {
    pub network: PathBuf,
    pub dataset_size: usize,
    /// Fractions of variables hidden, each in [0, 1].
    pub hiding: Vec<f64>,
    pub hiding_mode: HidingMode,
    pub replicates: usize,
    /// One learner per algorithm; their `seed` fields are overridden per problem.
    pub learners: Vec<LearnerConfig>,
    pub prior_exponent: f64,
    pub master_seed: u64,
    /// Overrides the clock of every learner.
    pub clock: Clock,
    /// Keep a parameter snapshot per iteration in the traces (large bundles).
    pub record_parameters: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            network: PathBuf::new(),
            dataset_size: 1 << 10,
            hiding: vec![0.10, 0.25, 0.35, 0.50, 0.70],
            hiding_mode: HidingMode::HiddenVariables,
            replicates: 3,
            learners: vec![LearnerConfig::new(Algorithm::Em), LearnerConfig::new(Algorithm::Edml)],
            prior_exponent: 2.0,
            master_seed: 0,
            clock: Clock::WallClock,
            record_parameters: false,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("replicates must be >= 1".into()));
        }
        if self.dataset_size == 0 {
            return Err(Error::InvalidConfig("dataset_size must be >= 1".into()));
        }
        if let Some(p) = self.hiding.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidConfig(format!("hiding percentage {p} outside [0, 1]")));
        }
        if self.learners.is_empty() {
            return Err(Error::InvalidConfig("no learners configured".into()));
        }
        for (i, a) in self.learners.iter().enumerate() {
            a.validate()?;
            if self.learners[..i].iter().any(|b| b.algorithm == a.algorithm) {
                return Err(Error::InvalidConfig(format!("learner {} listed twice", a.algorithm)));
            }
        }
        if !(self.prior_exponent >= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "prior exponent must be >= 1, got {}",
                self.prior_exponent
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnerRun {
    pub algorithm: Algorithm,
    pub trace: LearningTrace,
}

/// One (hiding level, replicate) cell of the sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemResult {
    pub network: String,
    pub hiding: f64,
    pub replicate: usize,
    pub sample_seed: u64,
    pub hiding_seed: u64,
    pub init_seed: u64,
    /// Highest log posterior reached by any learner at any iteration.
    pub best_log_posterior: f64,
    pub runs: Vec<LearnerRun>,
}

impl ProblemResult {
    /// File-name friendly identifier, e.g. `asia-h25-r0`.
    pub fn id(&self) -> String {
        format!(
            "{}-h{}-r{}",
            self.network,
            (self.hiding * 100.0).round() as u32,
            self.replicate
        )
    }

    pub fn run(&self, algorithm: Algorithm) -> Option<&LearnerRun> {
        self.runs.iter().find(|r| r.algorithm == algorithm)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResults {
    pub spec: ExperimentSpec,
    pub problems: Vec<ProblemResult>,
}

impl ExperimentResults {
    pub fn traces(&self) -> impl Iterator<Item = (&ProblemResult, &LearnerRun)> {
        self.problems.iter().flat_map(|p| p.runs.iter().map(move |r| (p, r)))
    }
}

/// Runs the sweep on the network file named in `spec`. The file's CPTs generate the data;
/// a file without CPTs gets random ones derived from the master seed.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResults> {
    let (network, truth) = read_network(&spec.network)?;
    run_experiment_on(&network, truth.as_ref(), spec)
}

pub fn run_experiment_on(
    network: &Network,
    truth: Option<&Parameterization>,
    spec: &ExperimentSpec,
) -> Result<ExperimentResults> {
    spec.validate()?;
    let mut seeds = ChaCha8Rng::seed_from_u64(spec.master_seed);
    let truth_seed: u64 = seeds.random();
    let truth = match truth {
        Some(t) => t.clone(),
        None => Parameterization::random(network, truth_seed),
    };
    let prior = DirichletPrior::uniform(network, spec.prior_exponent)?;

    let mut problems = Vec::new();
    for &hiding in &spec.hiding {
        for replicate in 0..spec.replicates {
            let (sample_seed, hiding_seed, init_seed) = (seeds.random(), seeds.random(), seeds.random());
            let complete = forward_sample(network, &truth, spec.dataset_size, sample_seed)?;
            let dataset = hide(&complete, &HidingPolicy::new(spec.hiding_mode, hiding, hiding_seed)?)?;
            let initial = Parameterization::random(network, init_seed);

            let mut runs = Vec::with_capacity(spec.learners.len());
            for learner in &spec.learners {
                let config = LearnerConfig {
                    seed: init_seed,
                    clock: spec.clock,
                    record_parameters: spec.record_parameters,
                    ..learner.clone()
                };
                let trace = run_with_prior(network, &dataset, &prior, &config, Some(&initial))?;
                runs.push(LearnerRun {
                    algorithm: learner.algorithm,
                    trace,
                });
            }
            let best_log_posterior = runs
                .iter()
                .flat_map(|r| r.trace.iterations.iter().map(|i| i.log_posterior))
                .fold(f64::NEG_INFINITY, f64::max);
            problems.push(ProblemResult {
                network: network.name().to_string(),
                hiding,
                replicate,
                sample_seed,
                hiding_seed,
                init_seed,
                best_log_posterior,
                runs,
            });
        }
    }
    Ok(ExperimentResults {
        spec: spec.clone(),
        problems,
    })
}

/// Best log posterior minus the learner's log posterior, per iteration, in nats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub algorithm: Algorithm,
    pub iteration: Vec<usize>,
    pub elapsed_ms: Vec<f64>,
    pub log_posterior: Vec<f64>,
    pub error: Vec<f64>,
}

impl ErrorCurve {
    pub fn new(problem: &ProblemResult, run: &LearnerRun) -> Self {
        let it = &run.trace.iterations;
        ErrorCurve {
            algorithm: run.algorithm,
            iteration: it.iter().map(|r| r.iteration).collect(),
            elapsed_ms: it.iter().map(|r| r.elapsed_ms).collect(),
            log_posterior: it.iter().map(|r| r.log_posterior).collect(),
            error: it
                .iter()
                .map(|r| problem.best_log_posterior - r.log_posterior)
                .collect(),
        }
    }

    /// Error at `iteration`, holding the last value once the trace has stopped.
    pub fn error_at(&self, iteration: usize) -> f64 {
        self.error[iteration.min(self.error.len() - 1)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{random_network, RandomNetworkSpec};

    fn small_spec() -> ExperimentSpec {
        let quick = |a| LearnerConfig {
            max_iterations: 30,
            ..LearnerConfig::new(a)
        };
        ExperimentSpec {
            dataset_size: 64,
            hiding: vec![0.0, 0.4],
            replicates: 2,
            learners: vec![quick(Algorithm::Em), quick(Algorithm::Edml)],
            master_seed: 11,
            clock: Clock::Disabled,
            ..Default::default()
        }
    }

    #[test]
    fn shared_start_and_zero_best_error() {
        let net = random_network(&RandomNetworkSpec::default(), 3);
        let results = run_experiment_on(&net, None, &small_spec()).unwrap();
        assert_eq!(results.problems.len(), 4);
        for p in &results.problems {
            let start: Vec<f64> = p.runs.iter().map(|r| r.trace.iterations[0].log_posterior).collect();
            assert_eq!(start[0], start[1]);
            let curves: Vec<_> = p.runs.iter().map(|r| ErrorCurve::new(p, r)).collect();
            let min = curves
                .iter()
                .flat_map(|c| c.error.iter().copied())
                .fold(f64::INFINITY, f64::min);
            assert_eq!(min, 0.0);
            assert!(curves.iter().flat_map(|c| &c.error).all(|&e| e >= 0.0));
        }
    }

    #[test]
    fn deterministic_bundle() {
        let net = random_network(&RandomNetworkSpec::default(), 3);
        let a = serde_json::to_string(&run_experiment_on(&net, None, &small_spec()).unwrap()).unwrap();
        let b = serde_json::to_string(&run_experiment_on(&net, None, &small_spec()).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_specs() {
        for spec in [
            ExperimentSpec {
                replicates: 0,
                ..small_spec()
            },
            ExperimentSpec {
                hiding: vec![1.5],
                ..small_spec()
            },
            ExperimentSpec {
                learners: vec![],
                ..small_spec()
            },
            ExperimentSpec {
                learners: vec![LearnerConfig::default(), LearnerConfig::default()],
                ..small_spec()
            },
        ] {
            assert!(spec.validate().is_err());
        }
    }
}
