use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Em,
    Edml,
    Hybrid,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Em => "em",
            Algorithm::Edml => "edml",
            Algorithm::Hybrid => "hybrid",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "em" => Ok(Algorithm::Em),
            "edml" => Ok(Algorithm::Edml),
            "hybrid" => Ok(Algorithm::Hybrid),
            other => Err(Error::InvalidConfig(format!("unknown algorithm {other}"))),
        }
    }
}

/// Starting point of the local (island) iterations inside an EDML global iteration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalSeed {
    /// The estimate from the previous global iteration.
    #[default]
    Previous,
    Uniform,
}

/// Source of the per-iteration timestamps in a trace.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clock {
    /// Monotonic wall clock.
    #[default]
    WallClock,
    /// Every timestamp is zero, so traces are reproducible byte for byte.
    Disabled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LearnerConfig {
    pub algorithm: Algorithm,
    /// Dirichlet exponent ψ used for every parameter when no explicit prior is given.
    pub prior_exponent: f64,
    /// Seed of the random initial parameterization.
    pub seed: u64,
    pub max_iterations: usize,
    /// Online stop: |Δ log posterior| below this ...
    pub log_posterior_tolerance: f64,
    /// ... and max parameter change below this.
    pub parameter_tolerance: f64,
    pub local_max_iterations: usize,
    /// Island iterations stop once no parameter moves by this much.
    pub local_tolerance: f64,
    /// Weight of the previous value when damping soft evidence and EDML parameters.
    pub damping: f64,
    pub local_seed: LocalSeed,
    /// Keep examples that are irrelevant to a parameter set (neutral soft evidence)
    /// inside its island. They do not change the island optimum, only slow its solver.
    pub keep_irrelevant_examples: bool,
    /// Store a parameter snapshot in every trace record.
    pub record_parameters: bool,
    pub clock: Clock,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            algorithm: Algorithm::Em,
            prior_exponent: 2.0,
            seed: 0,
            max_iterations: 1000,
            log_posterior_tolerance: 1e-7,
            parameter_tolerance: 1e-6,
            local_max_iterations: 512,
            local_tolerance: 1e-8,
            damping: 0.5,
            local_seed: LocalSeed::Previous,
            keep_irrelevant_examples: false,
            record_parameters: true,
            clock: Clock::WallClock,
        }
    }
}

impl LearnerConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        LearnerConfig {
            algorithm,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("log_posterior_tolerance", self.log_posterior_tolerance),
            ("parameter_tolerance", self.parameter_tolerance),
            ("local_tolerance", self.local_tolerance),
        ];
        for (name, value) in positive {
            if !(value > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be > 0, got {value}")));
            }
        }
        if !(self.prior_exponent >= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "prior_exponent must be >= 1, got {}",
                self.prior_exponent
            )));
        }
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::InvalidConfig(format!(
                "damping must lie in [0, 1), got {}",
                self.damping
            )));
        }
        if self.local_max_iterations == 0 {
            return Err(Error::InvalidConfig("local_max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}
