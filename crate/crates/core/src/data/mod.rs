//! Synthetic datasets: forward sampling, hiding values, and CSV I/O.

mod csv_io;
mod hide;
mod sample;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use csv_io::{read_csv, write_csv, MISSING};
pub use hide::{hide, HidingMode, HidingPolicy};
pub use sample::forward_sample;

use crate::error::Result;
use crate::infer::Evidence;
use crate::model::Network;

/// How a dataset came about.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub sample_seed: Option<u64>,
    pub hiding: Option<HidingPolicy>,
}

/// A sequence of (possibly partial) examples over one network's variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    examples: Vec<Evidence>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn new(network: &Network, examples: Vec<Evidence>) -> Result<Self> {
        for e in &examples {
            e.check(network)?;
        }
        Ok(Dataset {
            examples,
            provenance: Provenance::default(),
        })
    }

    pub fn examples(&self) -> &[Evidence] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.examples.iter().all(Evidence::is_complete)
    }

    pub fn distinct(&self) -> DistinctExamples {
        DistinctExamples::new(&self.examples)
    }
}

/// Examples grouped by identical observation pattern, in order of first appearance.
///
/// Every per-example sum in the learners is a weighted sum over patterns, so identical
/// examples are calibrated once.
#[derive(Clone, Debug)]
pub struct DistinctExamples {
    pub patterns: Vec<Evidence>,
    /// Number of examples per pattern.
    pub counts: Vec<f64>,
    /// Pattern of each original example.
    pub example_pattern: Vec<usize>,
    /// First original example of each pattern (used to label errors).
    pub first_example: Vec<usize>,
}

impl DistinctExamples {
    pub fn new(examples: &[Evidence]) -> Self {
        let mut lookup: HashMap<&Evidence, usize> = HashMap::new();
        let mut out = DistinctExamples {
            patterns: Vec::new(),
            counts: Vec::new(),
            example_pattern: Vec::with_capacity(examples.len()),
            first_example: Vec::new(),
        };
        for (i, e) in examples.iter().enumerate() {
            let p = *lookup.entry(e).or_insert_with(|| {
                out.patterns.push(e.clone());
                out.counts.push(0.0);
                out.first_example.push(i);
                out.patterns.len() - 1
            });
            out.counts[p] += 1.0;
            out.example_pattern.push(p);
        }
        out
    }

    pub fn total(&self) -> f64 {
        self.example_pattern.len() as f64
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_groups_in_first_seen_order() {
        let a = Evidence::from_values(vec![Some(0), None]);
        let b = Evidence::complete(&[1, 1]);
        let d = DistinctExamples::new(&[a.clone(), b.clone(), a.clone(), a.clone()]);
        assert_eq!(d.patterns, vec![a, b]);
        assert_eq!(d.counts, vec![3.0, 1.0]);
        assert_eq!(d.example_pattern, vec![0, 1, 0, 0]);
        assert_eq!(d.first_example, vec![0, 1]);
        assert_eq!(d.total(), 4.0);
    }
}
