use crate::data::DistinctExamples;
use crate::error::Result;
use crate::infer::{FamilyMarginals, JoinTree};
use crate::model::{DirichletPrior, FamilyTable, Parameterization};

/// Everything one inference pass over the data yields for a parameterization.
#[derive(Clone, Debug)]
pub struct Expectations {
    /// Family marginals per distinct example pattern.
    pub marginals: Vec<FamilyMarginals>,
    /// Σ_i Pr(xu | d_i).
    pub joint_counts: Vec<FamilyTable>,
    /// Σ_i Pr(u | d_i).
    pub parent_counts: Vec<Vec<f64>>,
    pub log_likelihood: f64,
}

impl Expectations {
    pub fn compute(tree: &JoinTree, params: &Parameterization, data: &DistinctExamples) -> Result<Self> {
        let mut joint_counts: Vec<FamilyTable> = params
            .cpts()
            .iter()
            .map(|t| FamilyTable::filled(t.num_rows(), t.cardinality(), 0.0))
            .collect();
        let mut parent_counts: Vec<Vec<f64>> = params.cpts().iter().map(|t| vec![0.0; t.num_rows()]).collect();
        let mut log_likelihood = 0.0;
        let mut marginals = Vec::with_capacity(data.len());
        for (p, evidence) in data.patterns.iter().enumerate() {
            let m = tree.calibrate_example(params, evidence, data.first_example[p])?;
            let w = data.counts[p];
            log_likelihood += w * m.log_evidence;
            for (v, table) in m.joint.iter().enumerate() {
                for (acc, &q) in joint_counts[v].values_mut().iter_mut().zip(table.values()) {
                    *acc += w * q;
                }
                for (acc, &q) in parent_counts[v].iter_mut().zip(&m.parents[v]) {
                    *acc += w * q;
                }
            }
            marginals.push(m);
        }
        Ok(Expectations {
            marginals,
            joint_counts,
            parent_counts,
            log_likelihood,
        })
    }

    pub fn log_posterior(&self, params: &Parameterization, prior: &DirichletPrior) -> f64 {
        prior.log_density(params) + self.log_likelihood
    }
}
