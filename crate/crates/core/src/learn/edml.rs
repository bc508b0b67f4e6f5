use super::config::{LearnerConfig, LocalSeed};
use super::expectations::Expectations;
use super::island::Island;
use super::soft_evidence::{soft_evidence_from, SoftEvidence};
use crate::data::{Dataset, DistinctExamples};
use crate::error::{Error, Result};
use crate::infer::JoinTree;
use crate::model::{DirichletPrior, Network, Parameterization};

/// Result of one EDML global iteration.
#[derive(Clone, Debug)]
pub struct EdmlStep {
    pub params: Parameterization,
    /// Local iterations spent on each parameter set, `[variable][parent config]`.
    pub local_iterations: Vec<Vec<usize>>,
    /// Parameter sets whose island solve hit the local iteration cap.
    pub unconverged_islands: usize,
    /// The normalized, damped soft evidence the islands were solved with; pass it back as
    /// `previous` on the next iteration.
    pub soft_evidence: SoftEvidence,
}

/// The island of parameter set `v|u` given per-pattern soft evidence.
///
/// A constant λ vector (in particular that of an example irrelevant to `v|u`) adds only a
/// constant to the island objective. Unless `keep_irrelevant` is set such observations are
/// dropped, which leaves the optimum unchanged but removes their pull toward the seed from
/// the local update; otherwise they count as neutral weight.
pub(crate) fn build_island(
    v: usize,
    u: usize,
    psi: &[f64],
    soft: &SoftEvidence,
    data: &DistinctExamples,
    keep_irrelevant: bool,
) -> Island {
    let mut island = Island {
        psi: psi.to_vec(),
        observations: Vec::new(),
        neutral: 0.0,
    };
    for (p, &w) in data.counts.iter().enumerate() {
        let l = soft.pattern_lambda(p, v, u);
        if l.iter().all(|&x| x == l[0]) {
            if keep_irrelevant {
                island.neutral += w;
            }
        } else {
            island.observations.push((w, l.to_vec()));
        }
    }
    island
}

/// EDML global iteration from marginals already computed under `params`.
pub fn edml_step_from(
    network: &Network,
    params: &Parameterization,
    expectations: &Expectations,
    data: &DistinctExamples,
    prior: &DirichletPrior,
    config: &LearnerConfig,
    previous: Option<&SoftEvidence>,
) -> Result<EdmlStep> {
    let raw = soft_evidence_from(network, params, expectations, &data.example_pattern)?.normalized();
    let soft = match previous {
        Some(old) if config.damping > 0.0 => raw.damped(old, config.damping),
        _ => raw,
    };

    let mut out = params.clone();
    let mut local_iterations = Vec::with_capacity(network.len());
    let mut unconverged_islands = 0;
    for v in 0..network.len() {
        let k = network.cardinality(v);
        let mut counts = Vec::with_capacity(network.num_parent_configs(v));
        for u in 0..network.num_parent_configs(v) {
            let island = build_island(v, u, prior.row(v, u), &soft, data, config.keep_irrelevant_examples);
            let seed = match config.local_seed {
                LocalSeed::Previous => params.row(v, u).to_vec(),
                LocalSeed::Uniform => vec![1.0 / k as f64; k],
            };
            let solution = island
                .solve(&seed, config.local_tolerance, config.local_max_iterations)
                .map_err(|e| match e {
                    Error::InvalidPrior(_) => Error::DegenerateUpdate {
                        variable: network.variable(v).name().to_string(),
                        parent_config: u,
                    },
                    other => other,
                })?;
            unconverged_islands += usize::from(!solution.converged);
            counts.push(solution.iterations);

            let row = out.row_mut(v, u);
            let old = params.row(v, u);
            let g = config.damping;
            for ((t, &new), &o) in row.iter_mut().zip(&solution.theta).zip(old) {
                *t = (1.0 - g) * new + g * o;
            }
            let sum: f64 = row.iter().sum();
            row.iter_mut().for_each(|t| *t /= sum);
        }
        local_iterations.push(counts);
    }
    Ok(EdmlStep {
        params: out,
        local_iterations,
        unconverged_islands,
        soft_evidence: soft,
    })
}

/// One EDML global iteration: soft evidence under `params`, then every island solved.
///
/// `previous` is the soft evidence of the preceding iteration, used for damping.
pub fn edml_global_iteration(
    network: &Network,
    params: &Parameterization,
    dataset: &Dataset,
    prior: &DirichletPrior,
    config: &LearnerConfig,
    previous: Option<&SoftEvidence>,
) -> Result<EdmlStep> {
    config.validate()?;
    let tree = JoinTree::new(network)?;
    let data = dataset.distinct();
    let expectations = Expectations::compute(&tree, params, &data)?;
    edml_step_from(network, params, &expectations, &data, prior, config, previous)
}
