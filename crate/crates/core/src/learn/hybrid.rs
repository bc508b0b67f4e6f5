use serde::{Deserialize, Serialize};

use super::config::LearnerConfig;
use super::edml::edml_step_from;
use super::em::em_update_from;
use super::expectations::Expectations;
use super::soft_evidence::SoftEvidence;
use crate::data::{Dataset, DistinctExamples};
use crate::error::Result;
use crate::infer::JoinTree;
use crate::model::{DirichletPrior, Network, Parameterization};

/// Which candidate a hybrid step kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Em,
    Edml,
}

#[derive(Clone, Debug)]
pub struct HybridStep {
    pub params: Parameterization,
    pub branch: Branch,
    /// Marginals under the chosen parameters, reusable by the next step.
    pub expectations: Expectations,
    pub em_log_posterior: f64,
    pub edml_log_posterior: f64,
    pub local_iterations: Vec<Vec<usize>>,
    pub soft_evidence: SoftEvidence,
}

impl HybridStep {
    pub fn log_posterior(&self) -> f64 {
        self.em_log_posterior.max(self.edml_log_posterior)
    }
}

/// Both candidates come from the marginals in `expectations`; the one with the higher
/// log posterior wins, EM on ties.
#[allow(clippy::too_many_arguments)]
pub fn hybrid_step_from(
    network: &Network,
    tree: &JoinTree,
    params: &Parameterization,
    expectations: &Expectations,
    data: &DistinctExamples,
    prior: &DirichletPrior,
    config: &LearnerConfig,
    previous: Option<&SoftEvidence>,
) -> Result<HybridStep> {
    let em = em_update_from(network, expectations, prior)?;
    let edml = edml_step_from(network, params, expectations, data, prior, config, previous)?;

    let em_expectations = Expectations::compute(tree, &em, data)?;
    let edml_expectations = Expectations::compute(tree, &edml.params, data)?;
    let em_log_posterior = em_expectations.log_posterior(&em, prior);
    let edml_log_posterior = edml_expectations.log_posterior(&edml.params, prior);

    let (params, branch, expectations) = if edml_log_posterior > em_log_posterior {
        (edml.params, Branch::Edml, edml_expectations)
    } else {
        (em, Branch::Em, em_expectations)
    };
    Ok(HybridStep {
        params,
        branch,
        expectations,
        em_log_posterior,
        edml_log_posterior,
        local_iterations: edml.local_iterations,
        soft_evidence: edml.soft_evidence,
    })
}

pub fn hybrid_step(
    network: &Network,
    params: &Parameterization,
    dataset: &Dataset,
    prior: &DirichletPrior,
    config: &LearnerConfig,
    previous: Option<&SoftEvidence>,
) -> Result<HybridStep> {
    config.validate()?;
    let tree = JoinTree::new(network)?;
    let data = dataset.distinct();
    let expectations = Expectations::compute(&tree, params, &data)?;
    hybrid_step_from(network, &tree, params, &expectations, &data, prior, config, previous)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infer::{log_posterior, Evidence};
    use crate::model::Variable;

    #[test]
    fn never_worse_than_em() {
        let vars = (0..3)
            .map(|i| Variable::with_cardinality(format!("V{i}"), 2).unwrap())
            .collect();
        let net = Network::new("t", vars, vec![vec![], vec![0], vec![1]]).unwrap();
        let examples = vec![
            Evidence::from_values(vec![Some(0), None, Some(1)]),
            Evidence::from_values(vec![None, None, Some(0)]),
            Evidence::from_values(vec![Some(1), None, Some(1)]),
            Evidence::from_values(vec![None, Some(1), None]),
        ];
        let data = Dataset::new(&net, examples.clone()).unwrap();
        let prior = DirichletPrior::laplace(&net);
        let mut params = Parameterization::random(&net, 17);
        let cfg = LearnerConfig::default();
        let mut previous = None;
        for _ in 0..20 {
            let before = log_posterior(&net, &params, &examples, &prior).unwrap();
            let step = hybrid_step(&net, &params, &data, &prior, &cfg, previous.as_ref()).unwrap();
            let em = super::super::em::em_update(&net, &params, &data, &prior).unwrap();
            let em_lp = log_posterior(&net, &em, &examples, &prior).unwrap();
            let after = log_posterior(&net, &step.params, &examples, &prior).unwrap();
            assert!(after >= em_lp - 1e-12 && em_lp >= before - 1e-9);
            assert!((after - step.log_posterior()).abs() < 1e-9);
            previous = Some(step.soft_evidence);
            params = step.params;
        }
    }
}
