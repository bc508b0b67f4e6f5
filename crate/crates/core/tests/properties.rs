mod common;

use proptest::prelude::*;

use common::{count_map, random_evidence, rng};
use edml::data::{forward_sample, hide, Dataset, HidingMode, HidingPolicy};
use edml::infer::{brute_force_marginals, calibrate, log_posterior};
use edml::learn::{
    edml_global_iteration, edml_local_update, em_update, run, Algorithm, Clock, Island, LearnerConfig, LearningTrace,
};
use edml::model::{dirichlet_mode, random_network, DirichletPrior, Parameterization, RandomNetworkSpec};

fn network_spec() -> impl Strategy<Value = RandomNetworkSpec> {
    (2usize..=7, 2usize..=3, 1usize..=3).prop_map(|(variables, max_cardinality, max_parents)| RandomNetworkSpec {
        variables,
        min_cardinality: 2,
        max_cardinality,
        max_parents,
    })
}

fn island() -> impl Strategy<Value = (Island, Vec<f64>)> {
    (2usize..=4).prop_flat_map(|k| {
        (
            prop::collection::vec(1.0f64..5.0, k),
            prop::collection::vec((0.1f64..3.0, prop::collection::vec(0.0f64..4.0, k)), 1..20),
            0.0f64..5.0,
            prop::collection::vec(0.05f64..1.0, k),
        )
            .prop_filter("every λ vector needs mass", |(_, obs, _, _)| {
                obs.iter().all(|(_, l)| l.iter().any(|&x| x > 0.0))
            })
            .prop_map(|(psi, observations, neutral, raw)| {
                let s: f64 = raw.iter().sum();
                let theta = raw.iter().map(|x| x / s).collect();
                (
                    Island {
                        psi,
                        observations,
                        neutral,
                    },
                    theta,
                )
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn calibration_matches_enumeration(spec in network_spec(), seed in any::<u64>()) {
        let net = random_network(&spec, seed);
        let params = Parameterization::random(&net, seed ^ 1);
        let e = random_evidence(&net, 0.5, &mut rng(seed));
        let got = calibrate(&net, &params, &e).unwrap();
        let want = brute_force_marginals(&net, &params, &e).unwrap();
        prop_assert!(got.max_abs_difference(&want) < 1e-10);
        prop_assert!((got.evidence_probability() - want.evidence_probability()).abs() < 1e-12);
    }

    #[test]
    fn local_update_stays_on_simplex_and_climbs((island, theta) in island()) {
        let next = island.local_update(&theta).unwrap();
        prop_assert!((next.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(next.iter().all(|&t| t > 0.0));
        prop_assert!(island.log_objective(&next) >= island.log_objective(&theta) - 1e-12);
    }

    #[test]
    fn neutral_examples_do_not_move_the_optimum((island, theta) in island()) {
        let bare = Island { neutral: 0.0, ..island.clone() };
        let a = island.solve(&theta, 1e-14, 1_000_000).unwrap();
        let b = bare.solve(&theta, 1e-14, 1_000_000).unwrap();
        let d = a.theta.iter().zip(&b.theta).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(d < 1e-9, "{:?} vs {:?}", a.theta, b.theta);
    }

    #[test]
    fn em_never_lowers_the_posterior(spec in network_spec(), seed in any::<u64>(), hidden in 0.1f64..0.8) {
        let net = random_network(&spec, seed);
        let truth = Parameterization::random(&net, seed ^ 2);
        let complete = forward_sample(&net, &truth, 60, seed ^ 3).unwrap();
        let data = hide(&complete, &HidingPolicy::new(HidingMode::PerCell, hidden, seed ^ 4).unwrap()).unwrap();
        let prior = DirichletPrior::uniform(&net, 2.0).unwrap();
        let mut params = Parameterization::random(&net, seed ^ 5);
        let mut last = log_posterior(&net, &params, data.examples(), &prior).unwrap();
        for _ in 0..10 {
            params = em_update(&net, &params, &data, &prior).unwrap();
            let now = log_posterior(&net, &params, data.examples(), &prior).unwrap();
            prop_assert!(now >= last - 1e-9);
            last = now;
        }
    }

    #[test]
    fn edml_and_em_share_the_complete_data_solution(spec in network_spec(), seed in any::<u64>()) {
        let net = random_network(&spec, seed);
        let truth = Parameterization::random(&net, seed ^ 6);
        let data = forward_sample(&net, &truth, 50, seed ^ 7).unwrap();
        let rows: Vec<Vec<usize>> = data
            .examples()
            .iter()
            .map(|e| e.values().iter().map(|v| v.unwrap()).collect())
            .collect();
        let expected = count_map(&net, &rows, 2.0);
        let prior = DirichletPrior::uniform(&net, 2.0).unwrap();
        let start = Parameterization::random(&net, seed ^ 8);
        let config = LearnerConfig { damping: 0.0, local_tolerance: 1e-14, local_max_iterations: 100_000, ..LearnerConfig::default() };
        let edml = edml_global_iteration(&net, &start, &data, &prior, &config, None).unwrap();
        prop_assert!(edml.params.max_abs_difference(&expected) < 1e-9);
        prop_assert!(em_update(&net, &start, &data, &prior).unwrap().max_abs_difference(&expected) < 1e-12);
    }

    #[test]
    fn no_data_learns_the_prior_mode(spec in network_spec(), seed in any::<u64>(), psi in 1.5f64..6.0) {
        let net = random_network(&spec, seed);
        let prior = DirichletPrior::uniform(&net, psi).unwrap();
        let data = Dataset::new(&net, vec![edml::infer::Evidence::empty(net.len()); 3]).unwrap();
        let mode = dirichlet_mode(&prior).unwrap();
        let config = LearnerConfig { damping: 0.0, local_tolerance: 1e-14, ..LearnerConfig::default() };
        let step = edml_global_iteration(&net, &Parameterization::random(&net, seed), &data, &prior, &config, None).unwrap();
        prop_assert!(step.params.max_abs_difference(&mode) < 1e-10);
        for row in mode.cpts().iter().flat_map(|t| t.rows()) {
            let k = row.len() as f64;
            prop_assert!(row.iter().all(|&t| (t - 1.0 / k).abs() < 1e-12));
        }
    }

    #[test]
    fn trace_survives_json(spec in network_spec(), seed in 0u64..1000, alg in prop::sample::select(vec![Algorithm::Em, Algorithm::Edml, Algorithm::Hybrid])) {
        let net = random_network(&spec, seed);
        let truth = Parameterization::random(&net, seed + 1);
        let complete = forward_sample(&net, &truth, 40, seed + 2).unwrap();
        let data = hide(&complete, &HidingPolicy::hidden_variables(0.3, seed + 3).unwrap()).unwrap();
        let config = LearnerConfig {
            algorithm: alg,
            seed,
            max_iterations: 5,
            record_parameters: true,
            clock: Clock::Disabled,
            ..LearnerConfig::default()
        };
        let trace = run(&net, &data, &config).unwrap();
        let back: LearningTrace = serde_json::from_str(&serde_json::to_string(&trace).unwrap()).unwrap();
        prop_assert_eq!(back, trace);
    }
}

#[test]
fn free_function_matches_island_update() {
    let lambdas = vec![vec![0.5, 2.0, 1.0], vec![3.0, 0.0, 1.0]];
    let psi = [2.0, 1.5, 3.0];
    let theta = [0.3, 0.3, 0.4];
    let island = Island {
        psi: psi.to_vec(),
        observations: lambdas.iter().map(|l| (1.0, l.clone())).collect(),
        neutral: 3.0,
    };
    assert_eq!(
        edml_local_update(&theta, &lambdas, &psi, 5).unwrap(),
        island.local_update(&theta).unwrap()
    );
}

#[test]
fn flat_prior_gives_relative_frequencies() {
    use edml::model::{Network, Variable};
    let vars = vec![
        Variable::with_cardinality("A", 2).unwrap(),
        Variable::with_cardinality("B", 3).unwrap(),
        Variable::with_cardinality("C", 2).unwrap(),
    ];
    let net = Network::new("abc", vars, vec![vec![], vec![0], vec![0, 1]]).unwrap();
    let data = forward_sample(&net, &Parameterization::random(&net, 5), 2000, 6).unwrap();
    let rows: Vec<Vec<usize>> = data
        .examples()
        .iter()
        .map(|e| e.values().iter().map(|v| v.unwrap()).collect())
        .collect();
    let prior = DirichletPrior::uniform(&net, 1.0).unwrap();
    let learned = em_update(&net, &Parameterization::uniform(&net), &data, &prior).unwrap();
    assert!(learned.max_abs_difference(&count_map(&net, &rows, 1.0)) < 1e-12);
}
