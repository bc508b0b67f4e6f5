//! Canonical JSON network format.
//!
//! ```json
//! {
//!   "name": "chain",
//!   "variables": [
//!     { "name": "A", "states": ["a0", "a1"], "parents": [], "cpt": [[0.3, 0.7]] },
//!     { "name": "B", "states": ["b0", "b1"], "parents": ["A"],
//!       "cpt": [[0.9, 0.1], [0.2, 0.8]] }
//!   ]
//! }
//! ```
//!
//! `cpt` rows follow parent instantiations in row-major order (last parent fastest);
//! each row lists child-state probabilities in `states` order. `cpt` may be omitted
//! for a structure-only file, but then it must be omitted for every variable.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::bif;
use super::network::{Network, Variable};
use super::params::{FamilyTable, Parameterization};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkFile {
    #[serde(default)]
    pub name: String,
    pub variables: Vec<VariableEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariableEntry {
    pub name: String,
    pub states: Vec<String>,
    #[serde(default)]
    pub parents: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpt: Option<Vec<Vec<f64>>>,
}

impl NetworkFile {
    pub fn from_model(network: &Network, params: Option<&Parameterization>) -> Self {
        let variables = network
            .variables()
            .iter()
            .enumerate()
            .map(|(v, var)| VariableEntry {
                name: var.name().to_string(),
                states: var.states().to_vec(),
                parents: network
                    .parents(v)
                    .iter()
                    .map(|&p| network.variable(p).name().to_string())
                    .collect(),
                cpt: params.map(|p| p.cpt(v).rows().map(<[f64]>::to_vec).collect()),
            })
            .collect();
        NetworkFile {
            name: network.name().to_string(),
            variables,
        }
    }

    pub fn into_model(self) -> Result<(Network, Option<Parameterization>)> {
        let with_cpt = self.variables.iter().filter(|v| v.cpt.is_some()).count();
        if with_cpt != 0 && with_cpt != self.variables.len() {
            return Err(Error::InvalidNetwork(
                "either every variable or no variable must carry a cpt".into(),
            ));
        }
        let mut variables = Vec::with_capacity(self.variables.len());
        let mut parents = Vec::with_capacity(self.variables.len());
        let mut tables = Vec::with_capacity(with_cpt);
        for entry in self.variables {
            variables.push(Variable::new(entry.name, entry.states)?);
            parents.push(entry.parents);
            if let Some(rows) = entry.cpt {
                tables.push(FamilyTable::from_rows(rows)?);
            }
        }
        let parent_refs: Vec<Vec<&str>> = parents
            .iter()
            .map(|ps| ps.iter().map(String::as_str).collect())
            .collect();
        let network = Network::from_named(self.name, variables, &parent_refs)?;
        let params = (with_cpt > 0).then(|| Parameterization::from_tables(tables));
        Ok((network, params))
    }
}

fn json_error(path: &Path, e: serde_json::Error) -> Error {
    Error::parse(path, e.line(), e.to_string())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| json_error(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a network in the JSON format, or a BIF file when the extension is `.bif`.
pub fn read_network(path: &Path) -> Result<(Network, Option<Parameterization>)> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("bif")) {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let (net, params) = bif::parse_bif(&text).map_err(|e| match e {
            Error::Parse { line, message, .. } => Error::parse(path, line, message),
            other => other,
        })?;
        return Ok((net, Some(params)));
    }
    let file: NetworkFile = read_json(path)?;
    file.into_model().map_err(|e| Error::parse(path, 0, e.to_string()))
}

pub fn write_network(path: &Path, network: &Network, params: Option<&Parameterization>) -> Result<()> {
    write_json(path, &NetworkFile::from_model(network, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate, DirichletPrior};

    const CHAIN: &str = r#"{
        "name": "chain",
        "variables": [
            { "name": "A", "states": ["a0", "a1"], "parents": [], "cpt": [[0.3, 0.7]] },
            { "name": "B", "states": ["b0", "b1", "b2"], "parents": ["A"],
              "cpt": [[0.2, 0.3, 0.5], [0.6, 0.1, 0.3]] }
        ]
    }"#;

    #[test]
    fn parses_documented_example() {
        let file: NetworkFile = serde_json::from_str(CHAIN).unwrap();
        let (net, params) = file.into_model().unwrap();
        let params = params.unwrap();
        assert_eq!(net.len(), 2);
        assert_eq!(net.parents(1), &[0]);
        assert_eq!(params.row(1, 1), &[0.6, 0.1, 0.3]);
        assert!(validate(&net, &params).is_valid());
    }

    #[test]
    fn round_trip_network_params_prior() {
        let file: NetworkFile = serde_json::from_str(CHAIN).unwrap();
        let (net, _) = file.into_model().unwrap();
        let params = Parameterization::random(&net, 3);
        let prior = DirichletPrior::uniform(&net, 2.5).unwrap();

        let text = serde_json::to_string(&NetworkFile::from_model(&net, Some(&params))).unwrap();
        let (net2, params2) = serde_json::from_str::<NetworkFile>(&text)
            .unwrap()
            .into_model()
            .unwrap();
        assert_eq!(net, net2);
        assert_eq!(params, params2.unwrap());

        let p: Parameterization = serde_json::from_str(&serde_json::to_string(&params).unwrap()).unwrap();
        assert_eq!(p, params);
        let q: DirichletPrior = serde_json::from_str(&serde_json::to_string(&prior).unwrap()).unwrap();
        assert_eq!(q, prior);
    }

    #[test]
    fn partial_cpts_rejected() {
        let text = r#"{"variables": [
            {"name": "A", "states": ["0","1"], "cpt": [[0.5, 0.5]]},
            {"name": "B", "states": ["0","1"], "parents": ["A"]}
        ]}"#;
        let file: NetworkFile = serde_json::from_str(text).unwrap();
        assert!(file.into_model().is_err());
    }

    #[test]
    fn prior_json_rejects_small_exponents() {
        assert!(serde_json::from_str::<DirichletPrior>(r#"{"exponents": [[[0.5, 2.0]]]}"#).is_err());
    }

    #[test]
    fn read_reports_line_of_syntax_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, "{\n  \"variables\": [\n    oops\n  ]\n}\n").unwrap();
        match read_network(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
