use std::fmt;

use super::network::Network;
use super::params::{Parameterization, SIMPLEX_TOLERANCE};

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Cycle {
        variables: Vec<String>,
    },
    MissingFamily {
        variable: String,
    },
    ExtraFamilies {
        count: usize,
    },
    RowCount {
        variable: String,
        expected: usize,
        found: usize,
    },
    RowLength {
        variable: String,
        expected: usize,
        found: usize,
    },
    OutOfRange {
        variable: String,
        parent_config: usize,
        value: usize,
        probability: f64,
    },
    RowSum {
        variable: String,
        parent_config: usize,
        sum: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Cycle { variables } => {
                write!(f, "directed cycle through {}", variables.join(", "))
            }
            Violation::MissingFamily { variable } => write!(f, "no table for {variable}"),
            Violation::ExtraFamilies { count } => {
                write!(f, "{count} tables beyond the network's variables")
            }
            Violation::RowCount {
                variable,
                expected,
                found,
            } => {
                write!(
                    f,
                    "{variable}: expected {expected} parent instantiations, found {found}"
                )
            }
            Violation::RowLength {
                variable,
                expected,
                found,
            } => {
                write!(f, "{variable}: expected rows of {expected} values, found {found}")
            }
            Violation::OutOfRange {
                variable,
                parent_config,
                value,
                probability,
            } => write!(
                f,
                "{variable}|u{parent_config}: entry {value} = {probability} is outside [0, 1]"
            ),
            Violation::RowSum {
                variable,
                parent_config,
                sum,
            } => {
                write!(f, "{variable}|u{parent_config}: row sums to {sum}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Collects every violated structural or simplex invariant.
pub fn validate(network: &Network, params: &Parameterization) -> ValidationReport {
    let mut violations = Vec::new();
    let cyclic = network.cyclic_variables();
    if !cyclic.is_empty() {
        violations.push(Violation::Cycle {
            variables: cyclic.iter().map(|&v| network.variable(v).name().to_string()).collect(),
        });
    }
    let cpts = params.cpts();
    for v in 0..network.len() {
        let name = network.variable(v).name().to_string();
        let Some(table) = cpts.get(v) else {
            violations.push(Violation::MissingFamily { variable: name });
            continue;
        };
        let k = network.cardinality(v);
        if table.cardinality() != k {
            violations.push(Violation::RowLength {
                variable: name,
                expected: k,
                found: table.cardinality(),
            });
            continue;
        }
        let rows = network.num_parent_configs(v);
        if table.num_rows() != rows {
            violations.push(Violation::RowCount {
                variable: name.clone(),
                expected: rows,
                found: table.num_rows(),
            });
        }
        for (u, row) in table.rows().enumerate() {
            for (x, &p) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&p) {
                    violations.push(Violation::OutOfRange {
                        variable: name.clone(),
                        parent_config: u,
                        value: x,
                        probability: p,
                    });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > SIMPLEX_TOLERANCE || !sum.is_finite() {
                violations.push(Violation::RowSum {
                    variable: name.clone(),
                    parent_config: u,
                    sum,
                });
            }
        }
    }
    if cpts.len() > network.len() {
        violations.push(Violation::ExtraFamilies {
            count: cpts.len() - network.len(),
        });
    }
    ValidationReport { violations }
}
