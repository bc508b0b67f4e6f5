use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::network::{Network, Variable};

/// Shape of a randomly generated network.
#[derive(Clone, Debug)]
pub struct RandomNetworkSpec {
    pub variables: usize,
    pub min_cardinality: usize,
    pub max_cardinality: usize,
    pub max_parents: usize,
}

impl Default for RandomNetworkSpec {
    fn default() -> Self {
        RandomNetworkSpec {
            variables: 6,
            min_cardinality: 2,
            max_cardinality: 3,
            max_parents: 2,
        }
    }
}

/// A random DAG; each variable draws its parents among the variables declared before it.
pub fn random_network(spec: &RandomNetworkSpec, seed: u64) -> Network {
    assert!(spec.min_cardinality >= 2 && spec.min_cardinality <= spec.max_cardinality);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let variables = (0..spec.variables)
        .map(|i| {
            let k = rng.random_range(spec.min_cardinality..=spec.max_cardinality);
            Variable::with_cardinality(format!("X{i}"), k).expect("cardinality >= 2")
        })
        .collect();
    let parents = (0..spec.variables)
        .map(|i| {
            let count = rng.random_range(0..=spec.max_parents.min(i));
            let mut ps = sample(&mut rng, i.max(1), count).into_vec();
            ps.sort_unstable();
            ps
        })
        .collect();
    Network::new(format!("random-{seed}"), variables, parents).expect("parents precede children")
}
