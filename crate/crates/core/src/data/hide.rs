use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HidingMode {
    /// The same randomly chosen variables are removed from every example.
    #[default]
    HiddenVariables,
    /// Each (example, variable) cell is removed independently.
    PerCell,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HidingPolicy {
    pub mode: HidingMode,
    /// Fraction in [0, 1].
    pub percentage: f64,
    pub seed: u64,
}

impl HidingPolicy {
    pub fn new(mode: HidingMode, percentage: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&percentage) {
            return Err(Error::InvalidConfig(format!(
                "hiding percentage {percentage} outside [0, 1]"
            )));
        }
        Ok(HidingPolicy { mode, percentage, seed })
    }

    pub fn hidden_variables(percentage: f64, seed: u64) -> Result<Self> {
        HidingPolicy::new(HidingMode::HiddenVariables, percentage, seed)
    }
}

/// Removes observations according to `policy`. Surviving values are untouched.
pub fn hide(dataset: &Dataset, policy: &HidingPolicy) -> Result<Dataset> {
    let policy = HidingPolicy::new(policy.mode, policy.percentage, policy.seed)?;
    let Some(first) = dataset.examples.first() else {
        return Ok(dataset.clone());
    };
    let n_vars = first.len();
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    let mut out = dataset.clone();
    match policy.mode {
        HidingMode::HiddenVariables => {
            let count = (policy.percentage * n_vars as f64).round() as usize;
            let hidden = sample(&mut rng, n_vars, count.min(n_vars));
            for e in &mut out.examples {
                for v in hidden.iter() {
                    e.set(v, None);
                }
            }
        }
        HidingMode::PerCell => {
            for e in &mut out.examples {
                for v in 0..n_vars {
                    if rng.random_bool(policy.percentage) {
                        e.set(v, None);
                    }
                }
            }
        }
    }
    out.provenance.hiding = Some(policy);
    Ok(out)
}
