use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Dataset, Provenance};
use crate::error::{Error, Result};
use crate::infer::Evidence;
use crate::model::{validate, Network, Parameterization};

/// Draws `n` complete examples i.i.d. from the network, sampling variables in
/// topological order.
pub fn forward_sample(network: &Network, params: &Parameterization, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::InvalidConfig("sample size must be at least 1".into()));
    }
    let report = validate(network, params);
    if !report.is_valid() {
        return Err(Error::InvalidParameters(report.to_string()));
    }
    let order = network.require_acyclic()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; network.len()];
    let examples = (0..n)
        .map(|_| {
            for &v in &order {
                let row = params.row(v, network.parent_config(v, &assignment));
                assignment[v] = draw(row, rng.random::<f64>());
            }
            Evidence::complete(&assignment)
        })
        .collect();
    Ok(Dataset {
        examples,
        provenance: Provenance {
            sample_seed: Some(seed),
            hiding: None,
        },
    })
}

/// Inverse-CDF draw that never lands on a zero-probability value.
fn draw(row: &[f64], r: f64) -> usize {
    let total: f64 = row.iter().sum();
    let target = r * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (x, &p) in row.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = x;
        if target < acc {
            return x;
        }
    }
    last
}
