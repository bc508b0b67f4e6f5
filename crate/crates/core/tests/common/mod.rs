#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use edml::infer::Evidence;
use edml::model::{FamilyTable, Network, Parameterization};

/// Each variable observed with probability `observed`, at a uniformly drawn value.
pub fn random_evidence(network: &Network, observed: f64, rng: &mut impl Rng) -> Evidence {
    Evidence::from_values(
        (0..network.len())
            .map(|v| {
                rng.random_bool(observed)
                    .then(|| rng.random_range(0..network.cardinality(v)))
            })
            .collect(),
    )
}

/// A point drawn uniformly from the interior of the simplex of size `k`.
pub fn random_simplex(k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / sum).collect()
}

/// Closed-form MAP estimate from complete data: (ψ − 1 + N(xu)) / Σ_x (ψ − 1 + N(xu)).
pub fn count_map(network: &Network, rows: &[Vec<usize>], psi: f64) -> Parameterization {
    let tables = (0..network.len())
        .map(|v| {
            let k = network.cardinality(v);
            let mut counts = vec![psi - 1.0; network.num_parent_configs(v) * k];
            for r in rows {
                counts[network.parent_config(v, r) * k + r[v]] += 1.0;
            }
            for row in counts.chunks_mut(k) {
                let s: f64 = row.iter().sum();
                row.iter_mut().for_each(|c| *c /= s);
            }
            FamilyTable::from_flat(k, counts).unwrap()
        })
        .collect();
    Parameterization::from_tables(tables)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
