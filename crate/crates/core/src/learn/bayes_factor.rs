use serde::{Deserialize, Serialize};

use super::soft_evidence::SoftEvidence;
use crate::error::{Error, Result};
use crate::infer::FamilyMarginals;
use crate::model::{Network, Parameterization};

/// Odds form κ = λ_x / λ_x̄ of soft evidence on a binary parameter set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BayesFactor {
    Finite(f64),
    /// λ_x̄ = 0 < λ_x.
    Infinite,
    /// Both entries zero.
    Undefined,
}

impl BayesFactor {
    pub fn from_ratio(numerator: f64, denominator: f64) -> Self {
        if denominator > 0.0 {
            BayesFactor::Finite(numerator / denominator)
        } else if numerator > 0.0 {
            BayesFactor::Infinite
        } else {
            BayesFactor::Undefined
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            BayesFactor::Finite(k) => Some(k),
            BayesFactor::Infinite => Some(f64::INFINITY),
            BayesFactor::Undefined => None,
        }
    }
}

fn require_binary(network: &Network, v: usize) -> Result<()> {
    if network.cardinality(v) != 2 {
        return Err(Error::InvalidConfig(format!(
            "Bayes factors need a binary variable; {} has {} values",
            network.variable(v).name(),
            network.cardinality(v)
        )));
    }
    Ok(())
}

/// κ^i_{x|u} for the first value x of binary `v`, one per example.
pub fn binary_bayes_factor(network: &Network, soft: &SoftEvidence, v: usize, u: usize) -> Result<Vec<BayesFactor>> {
    require_binary(network, v)?;
    Ok((0..soft.num_examples())
        .map(|i| {
            let l = soft.lambda(i, v, u);
            BayesFactor::from_ratio(l[0], l[1])
        })
        .collect())
}

/// κ_{x|u} evaluated directly from the family marginals of one example:
/// (Pr(xu|d)/Pr(x|u) − Pr(u|d) + 1) / (Pr(x̄u|d)/Pr(x̄|u) − Pr(u|d) + 1).
pub fn bayes_factor_from_marginals(
    network: &Network,
    params: &Parameterization,
    marginals: &FamilyMarginals,
    v: usize,
    u: usize,
) -> Result<BayesFactor> {
    require_binary(network, v)?;
    let pu = marginals.parent(v, u);
    let side = |x: usize| marginals.family(v, u, x) / params.theta(v, u, x) - pu + 1.0;
    Ok(BayesFactor::from_ratio(side(0), side(1)))
}
