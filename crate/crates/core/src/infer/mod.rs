//! Exact inference: per-example family marginals from a calibrated clique tree, an
//! enumeration oracle, and dataset-level likelihood and posterior.

mod brute;
mod evidence;
mod factor;
mod jointree;

pub use brute::{brute_force_marginals, BRUTE_FORCE_LIMIT};
pub use evidence::{Evidence, FamilyMarginals};
pub use factor::Factor;
pub use jointree::{calibrate, JoinTree};

use crate::error::Result;
use crate::model::{DirichletPrior, Network, Parameterization};

/// Σ_i log Pr(d_i) using a prebuilt tree.
pub fn log_likelihood_with(tree: &JoinTree, params: &Parameterization, examples: &[Evidence]) -> Result<f64> {
    examples
        .iter()
        .enumerate()
        .map(|(i, e)| tree.log_evidence(params, e, i))
        .sum()
}

/// Σ_i log Pr(d_i).
pub fn log_likelihood(network: &Network, params: &Parameterization, examples: &[Evidence]) -> Result<f64> {
    for e in examples {
        e.check(network)?;
    }
    log_likelihood_with(&JoinTree::new(network)?, params, examples)
}

/// Unnormalized log posterior: Σ (ψ_{x|u} − 1) log θ_{x|u} + log-likelihood.
///
/// Returns `-inf` (without running inference) when a zero parameter carries an
/// exponent above 1.
pub fn log_posterior(
    network: &Network,
    params: &Parameterization,
    examples: &[Evidence],
    prior: &DirichletPrior,
) -> Result<f64> {
    let log_prior = prior.log_density(params);
    if log_prior == f64::NEG_INFINITY {
        return Ok(log_prior);
    }
    Ok(log_prior + log_likelihood(network, params, examples)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FamilyTable, Variable};

    fn chain() -> Network {
        let vars = (0..3)
            .map(|i| Variable::with_cardinality(format!("V{i}"), 2 + i % 2).unwrap())
            .collect();
        Network::new("c", vars, vec![vec![], vec![0], vec![1]]).unwrap()
    }

    #[test]
    fn complete_data_factorizes() {
        let net = chain();
        let params = Parameterization::random(&net, 11);
        let rows = [[0, 2, 1], [1, 0, 0], [1, 1, 1]];
        let data: Vec<Evidence> = rows.iter().map(|r| Evidence::complete(r)).collect();
        let expected: f64 = rows
            .iter()
            .map(|r| {
                (0..3)
                    .map(|v| params.theta(v, net.parent_config(v, r), r[v]).ln())
                    .sum::<f64>()
            })
            .sum();
        assert!((log_likelihood(&net, &params, &data).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn empty_examples_have_zero_log_likelihood() {
        let net = chain();
        let params = Parameterization::random(&net, 1);
        let data = vec![Evidence::empty(3); 5];
        assert!(log_likelihood(&net, &params, &data).unwrap().abs() < 1e-12);
    }

    #[test]
    fn flat_prior_equals_likelihood() {
        let net = chain();
        let params = Parameterization::random(&net, 5);
        let data = vec![
            Evidence::from_values(vec![Some(1), None, Some(0)]),
            Evidence::complete(&[0, 1, 1]),
        ];
        let prior = DirichletPrior::uniform(&net, 1.0).unwrap();
        assert_eq!(
            log_posterior(&net, &params, &data, &prior).unwrap(),
            log_likelihood(&net, &params, &data).unwrap()
        );
    }

    #[test]
    fn zero_parameter_is_negative_infinity() {
        let net = chain();
        let mut params = Parameterization::random(&net, 5);
        params.row_mut(0, 0).copy_from_slice(&[1.0, 0.0]);
        let lp = log_posterior(&net, &params, &[], &DirichletPrior::laplace(&net)).unwrap();
        assert_eq!(lp, f64::NEG_INFINITY);
    }

    #[test]
    fn empty_dataset_maximized_at_mode() {
        let net = chain();
        let prior = DirichletPrior::new(
            (0..3)
                .map(|v| {
                    let rows = net.num_parent_configs(v);
                    let k = net.cardinality(v);
                    FamilyTable::from_flat(k, (0..rows * k).map(|i| 1.5 + i as f64).collect()).unwrap()
                })
                .collect(),
        )
        .unwrap();
        let mode = prior.mode().unwrap();
        let at_mode = log_posterior(&net, &mode, &[], &prior).unwrap();
        for seed in 0..100 {
            let other = Parameterization::random(&net, seed);
            assert!(at_mode >= log_posterior(&net, &other, &[], &prior).unwrap());
        }
    }

    #[test]
    fn impossible_example_names_index() {
        let net = chain();
        let mut params = Parameterization::random(&net, 2);
        params.row_mut(0, 0).copy_from_slice(&[1.0, 0.0]);
        let data = vec![Evidence::empty(3), Evidence::from_values(vec![Some(1), None, None])];
        assert!(matches!(
            log_likelihood(&net, &params, &data),
            Err(crate::Error::ImpossibleEvidence { example: 1 })
        ));
    }
}
