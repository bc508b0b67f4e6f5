use super::expectations::Expectations;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::infer::JoinTree;
use crate::model::{FamilyTable, Network, Parameterization};

/// Below this, θ_{x|u} is treated as zero and the quotient Pr(xu|d)/θ_{x|u} as 0.
pub const ZERO_PARAMETER_GUARD: f64 = 1e-12;

/// Largest negative rounding excursion tolerated (and clamped to 0) in a λ entry.
const NEGATIVE_SLACK: f64 = 1e-9;

/// Soft evidence λ^i_{x|u} that each example contributes to each parameter set.
///
/// Stored once per distinct example pattern; [`SoftEvidence::lambda`] addresses it by
/// original example index.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftEvidence {
    /// `[pattern][variable]`, laid out like the CPT of the variable.
    pub(crate) lambdas: Vec<Vec<FamilyTable>>,
    pub(crate) example_pattern: Vec<usize>,
}

impl SoftEvidence {
    /// λ^i_{X|u} for example `i`.
    pub fn lambda(&self, example: usize, v: usize, u: usize) -> &[f64] {
        self.lambdas[self.example_pattern[example]][v].row(u)
    }

    pub fn pattern_lambda(&self, pattern: usize, v: usize, u: usize) -> &[f64] {
        self.lambdas[pattern][v].row(u)
    }

    pub fn num_examples(&self) -> usize {
        self.example_pattern.len()
    }

    pub fn num_patterns(&self) -> usize {
        self.lambdas.len()
    }

    /// Same ratios, each vector rescaled to sum to its cardinality.
    pub fn normalized(&self) -> SoftEvidence {
        let mut out = self.clone();
        for table in out.lambdas.iter_mut().flatten() {
            let k = table.cardinality() as f64;
            for row in table.values_mut().chunks_exact_mut(k as usize) {
                let sum: f64 = row.iter().sum();
                if sum > 0.0 {
                    row.iter_mut().for_each(|l| *l *= k / sum);
                }
            }
        }
        out
    }

    /// `(1 − weight) · self + weight · previous`, entrywise.
    pub fn damped(&self, previous: &SoftEvidence, weight: f64) -> SoftEvidence {
        let mut out = self.clone();
        for (new, old) in out.lambdas.iter_mut().flatten().zip(previous.lambdas.iter().flatten()) {
            for (l, &o) in new.values_mut().iter_mut().zip(old.values()) {
                *l = (1.0 - weight) * *l + weight * o;
            }
        }
        out
    }
}

/// λ^i_{x|u} = Pr(xu|d_i)/θ_{x|u} − Pr(u|d_i) + 1 from one inference pass.
pub fn soft_evidence_from(
    network: &Network,
    params: &Parameterization,
    expectations: &Expectations,
    example_pattern: &[usize],
) -> Result<SoftEvidence> {
    let mut lambdas = Vec::with_capacity(expectations.marginals.len());
    for m in &expectations.marginals {
        let mut per_var = Vec::with_capacity(network.len());
        for v in 0..network.len() {
            let mut table = m.joint[v].clone();
            for u in 0..network.num_parent_configs(v) {
                let pu = m.parents[v][u];
                let theta = params.row(v, u);
                for (x, l) in table.row_mut(u).iter_mut().enumerate() {
                    let quotient = if theta[x] < ZERO_PARAMETER_GUARD {
                        0.0
                    } else {
                        *l / theta[x]
                    };
                    let value = quotient - pu + 1.0;
                    if value < -NEGATIVE_SLACK || !value.is_finite() {
                        return Err(Error::SoftEvidence {
                            variable: network.variable(v).name().to_string(),
                            parent_config: u,
                            detail: format!("λ for value #{x} is {value}"),
                        });
                    }
                    *l = value.max(0.0);
                }
            }
            per_var.push(table);
        }
        lambdas.push(per_var);
    }
    Ok(SoftEvidence {
        lambdas,
        example_pattern: example_pattern.to_vec(),
    })
}

/// Soft evidence of every example on every parameter set under `params`.
pub fn soft_evidence(network: &Network, params: &Parameterization, dataset: &Dataset) -> Result<SoftEvidence> {
    let tree = JoinTree::new(network)?;
    let distinct = dataset.distinct();
    let expectations = Expectations::compute(&tree, params, &distinct)?;
    soft_evidence_from(network, params, &expectations, &distinct.example_pattern)
}
