//! Network structure, parameterizations, Dirichlet priors and their file formats.

mod bif;
mod json;
mod network;
mod params;
mod random;
mod validate;

pub use bif::parse_bif;
pub use json::{read_json, read_network, write_json, write_network, NetworkFile, VariableEntry};
pub use network::{Network, Variable};
pub use params::{
    dirichlet_mode, random_parameterization, uniform_parameterization, DirichletPrior, FamilyTable, Parameterization,
    INTERIOR_FLOOR, SIMPLEX_TOLERANCE,
};
pub use random::{random_network, RandomNetworkSpec};
pub use validate::{validate, ValidationReport, Violation};
