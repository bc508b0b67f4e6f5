use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{Algorithm, Clock, LearnerConfig};
use super::edml::edml_step_from;
use super::em::em_update_from;
use super::expectations::Expectations;
use super::hybrid::{hybrid_step_from, Branch};
use super::soft_evidence::SoftEvidence;
use crate::data::{Dataset, DistinctExamples};
use crate::error::{Error, Result};
use crate::infer::JoinTree;
use crate::model::{DirichletPrior, Network, Parameterization};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    MaxIterations,
    /// Learning stopped on an example that became impossible.
    Aborted(String),
}

/// State after one global iteration; iteration 0 is the starting point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub log_posterior: f64,
    /// Milliseconds since the learner started, including the inference that scored
    /// this iteration's parameters.
    pub elapsed_ms: f64,
    /// Max-abs parameter change from the previous iteration.
    pub max_change: f64,
    /// EDML and hybrid: local iterations per parameter set, `[variable][parent config]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_iterations: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Parameterization>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearningTrace {
    pub algorithm: Algorithm,
    pub iterations: Vec<IterationRecord>,
    pub final_params: Parameterization,
    pub status: Status,
}

impl LearningTrace {
    /// Number of global iterations performed (excluding the starting point).
    pub fn global_iterations(&self) -> usize {
        self.iterations.len().saturating_sub(1)
    }

    pub fn final_log_posterior(&self) -> f64 {
        self.iterations.last().map_or(f64::NEG_INFINITY, |r| r.log_posterior)
    }

    pub fn log_posteriors(&self) -> Vec<f64> {
        self.iterations.iter().map(|r| r.log_posterior).collect()
    }

    /// Largest drop of the log posterior between consecutive iterations (0 if none).
    pub fn largest_decrease(&self) -> f64 {
        self.iterations
            .windows(2)
            .map(|w| w[0].log_posterior - w[1].log_posterior)
            .fold(0.0, f64::max)
    }

    /// How many hybrid iterations kept each branch, as `(em, edml)`.
    pub fn branch_counts(&self) -> (usize, usize) {
        self.iterations.iter().fold((0, 0), |(em, edml), r| match r.branch {
            Some(Branch::Em) => (em + 1, edml),
            Some(Branch::Edml) => (em, edml + 1),
            None => (em, edml),
        })
    }
}

/// Learns with the uniform prior of exponent `config.prior_exponent`, starting from the
/// random parameterization seeded by `config.seed`.
pub fn run(network: &Network, dataset: &Dataset, config: &LearnerConfig) -> Result<LearningTrace> {
    let prior = DirichletPrior::uniform(network, config.prior_exponent)?;
    run_with_prior(network, dataset, &prior, config, None)
}

/// Learns under an explicit prior, from `initial` if given.
pub fn run_with_prior(
    network: &Network,
    dataset: &Dataset,
    prior: &DirichletPrior,
    config: &LearnerConfig,
    initial: Option<&Parameterization>,
) -> Result<LearningTrace> {
    config.validate()?;
    let tree = JoinTree::new(network)?;
    let data = dataset.distinct();
    let start = Instant::now();
    let elapsed = || match config.clock {
        Clock::WallClock => start.elapsed().as_secs_f64() * 1e3,
        Clock::Disabled => 0.0,
    };
    let mut params = match initial {
        Some(p) => p.clone(),
        None => Parameterization::random(network, config.seed),
    };
    let snapshot = |p: &Parameterization| config.record_parameters.then(|| p.clone());

    let mut trace = LearningTrace {
        algorithm: config.algorithm,
        iterations: Vec::new(),
        final_params: params.clone(),
        status: Status::MaxIterations,
    };
    let mut expectations = match Expectations::compute(&tree, &params, &data) {
        Ok(e) => e,
        Err(e) => return abort(trace, e),
    };
    let mut log_posterior = expectations.log_posterior(&params, prior);
    trace.iterations.push(IterationRecord {
        iteration: 0,
        log_posterior,
        elapsed_ms: elapsed(),
        max_change: 0.0,
        local_iterations: None,
        branch: None,
        params: snapshot(&params),
    });

    let mut previous: Option<SoftEvidence> = None;
    for iteration in 1..=config.max_iterations {
        let step = global_step(
            network,
            &tree,
            &params,
            &expectations,
            &data,
            prior,
            config,
            previous.as_ref(),
        );
        let step = match step {
            Ok(s) => s,
            Err(e) => {
                trace.final_params = params;
                return abort(trace, e);
            }
        };
        let next_log_posterior = step.expectations.log_posterior(&step.params, prior);
        let max_change = step.params.max_abs_difference(&params);
        trace.iterations.push(IterationRecord {
            iteration,
            log_posterior: next_log_posterior,
            elapsed_ms: elapsed(),
            max_change,
            local_iterations: step.local_iterations,
            branch: step.branch,
            params: snapshot(&step.params),
        });
        let settled = (next_log_posterior - log_posterior).abs() < config.log_posterior_tolerance
            && max_change < config.parameter_tolerance;
        params = step.params;
        expectations = step.expectations;
        log_posterior = next_log_posterior;
        if step.soft_evidence.is_some() {
            previous = step.soft_evidence;
        }
        if settled {
            trace.status = Status::Converged;
            break;
        }
    }
    trace.final_params = params;
    Ok(trace)
}

fn abort(mut trace: LearningTrace, error: Error) -> Result<LearningTrace> {
    match error {
        Error::ImpossibleEvidence { .. } => {
            trace.status = Status::Aborted(error.to_string());
            Ok(trace)
        }
        other => Err(other),
    }
}

struct GlobalStep {
    params: Parameterization,
    expectations: Expectations,
    local_iterations: Option<Vec<Vec<usize>>>,
    branch: Option<Branch>,
    soft_evidence: Option<SoftEvidence>,
}

#[allow(clippy::too_many_arguments)]
fn global_step(
    network: &Network,
    tree: &JoinTree,
    params: &Parameterization,
    expectations: &Expectations,
    data: &DistinctExamples,
    prior: &DirichletPrior,
    config: &LearnerConfig,
    previous: Option<&SoftEvidence>,
) -> Result<GlobalStep> {
    Ok(match config.algorithm {
        Algorithm::Em => {
            let next = em_update_from(network, expectations, prior)?;
            let expectations = Expectations::compute(tree, &next, data)?;
            GlobalStep {
                params: next,
                expectations,
                local_iterations: None,
                branch: None,
                soft_evidence: None,
            }
        }
        Algorithm::Edml => {
            let step = edml_step_from(network, params, expectations, data, prior, config, previous)?;
            let expectations = Expectations::compute(tree, &step.params, data)?;
            GlobalStep {
                params: step.params,
                expectations,
                local_iterations: Some(step.local_iterations),
                branch: None,
                soft_evidence: Some(step.soft_evidence),
            }
        }
        Algorithm::Hybrid => {
            let step = hybrid_step_from(network, tree, params, expectations, data, prior, config, previous)?;
            GlobalStep {
                params: step.params,
                expectations: step.expectations,
                local_iterations: Some(step.local_iterations),
                branch: Some(step.branch),
                soft_evidence: Some(step.soft_evidence),
            }
        }
    })
}
