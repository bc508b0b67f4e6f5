use crate::error::{Error, Result};
use crate::model::{FamilyTable, Network};

/// Hard evidence: an optional observed value per network variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Evidence(Vec<Option<usize>>);

impl Evidence {
    /// No variable observed.
    pub fn empty(variables: usize) -> Self {
        Evidence(vec![None; variables])
    }

    pub fn complete(values: &[usize]) -> Self {
        Evidence(values.iter().copied().map(Some).collect())
    }

    pub fn from_values(values: Vec<Option<usize>>) -> Self {
        Evidence(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: usize) -> Option<usize> {
        self.0[v]
    }

    pub fn set(&mut self, v: usize, value: Option<usize>) {
        self.0[v] = value;
    }

    pub fn values(&self) -> &[Option<usize>] {
        &self.0
    }

    pub fn observed_count(&self) -> usize {
        self.0.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.0.iter().all(Option::is_some)
    }

    /// True if the full assignment agrees with every observation.
    pub fn is_consistent_with(&self, assignment: &[usize]) -> bool {
        self.0.iter().zip(assignment).all(|(e, &a)| e.is_none_or(|e| e == a))
    }

    pub fn check(&self, network: &Network) -> Result<()> {
        if self.0.len() != network.len() {
            return Err(Error::InvalidEvidence(format!(
                "evidence covers {} variables, network has {}",
                self.0.len(),
                network.len()
            )));
        }
        for (v, value) in self.0.iter().enumerate() {
            if let Some(x) = *value {
                if x >= network.cardinality(v) {
                    return Err(Error::InvalidEvidence(format!(
                        "value #{x} out of range for {}",
                        network.variable(v).name()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Posterior family marginals for one example.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyMarginals {
    /// Pr(xu | d) per variable, laid out like its CPT.
    pub joint: Vec<FamilyTable>,
    /// Pr(u | d) per variable, one entry per parent instantiation.
    pub parents: Vec<Vec<f64>>,
    /// log Pr(d).
    pub log_evidence: f64,
}

impl FamilyMarginals {
    pub(crate) fn from_joint(joint: Vec<FamilyTable>, log_evidence: f64) -> Self {
        let parents = joint
            .iter()
            .map(|t| t.rows().map(|r| r.iter().sum()).collect())
            .collect();
        FamilyMarginals {
            joint,
            parents,
            log_evidence,
        }
    }

    pub fn evidence_probability(&self) -> f64 {
        self.log_evidence.exp()
    }

    /// Pr(xu | d).
    pub fn family(&self, v: usize, u: usize, x: usize) -> f64 {
        self.joint[v].row(u)[x]
    }

    /// Pr(u | d).
    pub fn parent(&self, v: usize, u: usize) -> f64 {
        self.parents[v][u]
    }

    pub fn max_abs_difference(&self, other: &FamilyMarginals) -> f64 {
        self.joint
            .iter()
            .zip(&other.joint)
            .flat_map(|(a, b)| a.values().iter().zip(b.values()))
            .fold(0.0_f64, |m, (p, q)| m.max((p - q).abs()))
    }
}
