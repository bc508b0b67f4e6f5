use super::em::em_update_from;
use super::expectations::Expectations;
use crate::data::Dataset;
use crate::error::Result;
use crate::infer::JoinTree;
use crate::model::{DirichletPrior, Network, Parameterization};

/// Largest violation of the EM fixed-point condition
/// Pr(x|u) = (ψ_{x|u} − 1 + Σ_i Pr(xu|d_i)) / (ψ_{X|u} − |X| + Σ_i Pr(u|d_i)).
///
/// Zero exactly at the common fixed points of EM and EDML.
pub fn em_fixed_point_residual(
    network: &Network,
    params: &Parameterization,
    dataset: &Dataset,
    prior: &DirichletPrior,
) -> Result<f64> {
    let tree = JoinTree::new(network)?;
    let expectations = Expectations::compute(&tree, params, &dataset.distinct())?;
    residual_from(network, params, &expectations, prior)
}

pub(crate) fn residual_from(
    network: &Network,
    params: &Parameterization,
    expectations: &Expectations,
    prior: &DirichletPrior,
) -> Result<f64> {
    Ok(em_update_from(network, expectations, prior)?.max_abs_difference(params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infer::Evidence;
    use crate::model::Variable;

    fn net() -> Network {
        let vars = (0..3)
            .map(|i| Variable::with_cardinality(format!("V{i}"), 2).unwrap())
            .collect();
        Network::new("t", vars, vec![vec![], vec![0], vec![0, 1]]).unwrap()
    }

    #[test]
    fn closed_form_on_complete_data_is_fixed() {
        let net = net();
        let rows = [[0, 1, 1], [1, 1, 0], [0, 0, 0], [0, 1, 1], [1, 0, 1]];
        let data = Dataset::new(&net, rows.iter().map(|r| Evidence::complete(r)).collect()).unwrap();
        let prior = DirichletPrior::laplace(&net);
        let map = super::super::em::em_update(&net, &Parameterization::uniform(&net), &data, &prior).unwrap();
        assert!(em_fixed_point_residual(&net, &map, &data, &prior).unwrap() < 1e-10);
    }

    #[test]
    fn random_point_is_not_fixed() {
        let net = net();
        let data = Dataset::new(
            &net,
            vec![
                Evidence::from_values(vec![Some(1), None, Some(0)]),
                Evidence::complete(&[0, 0, 1]),
            ],
        )
        .unwrap();
        let prior = DirichletPrior::laplace(&net);
        let r = em_fixed_point_residual(&net, &Parameterization::random(&net, 3), &data, &prior).unwrap();
        assert!(r > 1e-3);
    }
}
