use super::expectations::Expectations;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::infer::JoinTree;
use crate::model::{DirichletPrior, Network, Parameterization};

/// MAP EM update from already-computed expected counts:
/// θ_{x|u} ← (ψ_{x|u} − 1 + Σ_i Pr(xu|d_i)) / (ψ_{X|u} − |X| + Σ_i Pr(u|d_i)).
pub fn em_update_from(
    network: &Network,
    expectations: &Expectations,
    prior: &DirichletPrior,
) -> Result<Parameterization> {
    let mut out = Parameterization::uniform(network);
    for v in 0..network.len() {
        let k = network.cardinality(v);
        for u in 0..network.num_parent_configs(v) {
            let psi = prior.row(v, u);
            let counts = expectations.joint_counts[v].row(u);
            let denom = psi.iter().sum::<f64>() - k as f64 + expectations.parent_counts[v][u];
            if !(denom > 0.0) {
                return Err(Error::DegenerateUpdate {
                    variable: network.variable(v).name().to_string(),
                    parent_config: u,
                });
            }
            for (theta, (&e, &c)) in out.row_mut(v, u).iter_mut().zip(psi.iter().zip(counts)) {
                *theta = (e - 1.0 + c) / denom;
            }
        }
    }
    Ok(out)
}

/// One EM update of `params` on `dataset`.
pub fn em_update(
    network: &Network,
    params: &Parameterization,
    dataset: &Dataset,
    prior: &DirichletPrior,
) -> Result<Parameterization> {
    let tree = JoinTree::new(network)?;
    let expectations = Expectations::compute(&tree, params, &dataset.distinct())?;
    em_update_from(network, &expectations, prior)
}
