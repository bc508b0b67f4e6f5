use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

/// A discrete variable with named states. The cardinality is the number of states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    name: String,
    states: Vec<String>,
}

impl Variable {
    pub fn new(name: impl Into<String>, states: Vec<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidNetwork("variable with empty name".into()));
        }
        if states.len() < 2 {
            return Err(Error::InvalidNetwork(format!(
                "variable {name} needs at least two states, got {}",
                states.len()
            )));
        }
        let distinct: HashSet<&str> = states.iter().map(String::as_str).collect();
        if distinct.len() != states.len() {
            return Err(Error::InvalidNetwork(format!(
                "variable {name} has duplicate state labels"
            )));
        }
        Ok(Variable { name, states })
    }

    /// A variable whose states are labelled `0..cardinality`.
    pub fn with_cardinality(name: impl Into<String>, cardinality: usize) -> Result<Self> {
        Variable::new(name, (0..cardinality).map(|s| s.to_string()).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }
}

/// Directed structure over discrete variables.
///
/// Variables are addressed by their position. Parent lists are ordered; a parent
/// instantiation `u` is indexed in row-major order with the last parent varying
/// fastest, which is also the row order of every conditional probability table.
///
/// Construction checks that parent references resolve, but a cyclic parent relation
/// is representable so that [`validate`](crate::model::validate) can report it.
#[derive(Clone, Debug)]
pub struct Network {
    name: String,
    variables: Vec<Variable>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    index: HashMap<String, usize>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.variables == other.variables && self.parents == other.parents
    }
}

impl Network {
    pub fn new(name: impl Into<String>, variables: Vec<Variable>, parents: Vec<Vec<usize>>) -> Result<Self> {
        if variables.len() != parents.len() {
            return Err(Error::InvalidNetwork(format!(
                "{} variables but {} parent lists",
                variables.len(),
                parents.len()
            )));
        }
        let mut index = HashMap::with_capacity(variables.len());
        for (i, v) in variables.iter().enumerate() {
            if index.insert(v.name.clone(), i).is_some() {
                return Err(Error::InvalidNetwork(format!("duplicate variable {}", v.name)));
            }
        }
        let n = variables.len();
        let mut children = vec![Vec::new(); n];
        for (child, ps) in parents.iter().enumerate() {
            let mut seen = HashSet::new();
            for &p in ps {
                if p >= n {
                    return Err(Error::InvalidNetwork(format!(
                        "variable {} references undeclared parent #{p}",
                        variables[child].name
                    )));
                }
                if !seen.insert(p) {
                    return Err(Error::InvalidNetwork(format!(
                        "variable {} lists parent {} twice",
                        variables[child].name, variables[p].name
                    )));
                }
                children[p].push(child);
            }
        }
        Ok(Network {
            name: name.into(),
            variables,
            parents,
            children,
            index,
        })
    }

    /// Builds a network from parent lists given by variable name.
    pub fn from_named(name: impl Into<String>, variables: Vec<Variable>, parents: &[Vec<&str>]) -> Result<Self> {
        let lookup: HashMap<&str, usize> = variables.iter().enumerate().map(|(i, v)| (v.name(), i)).collect();
        let mut resolved = Vec::with_capacity(parents.len());
        for (child, ps) in parents.iter().enumerate() {
            let mut row = Vec::with_capacity(ps.len());
            for p in ps {
                let idx = lookup.get(p).copied().ok_or_else(|| {
                    let child = variables.get(child).map(|v| v.name()).unwrap_or("?");
                    Error::InvalidNetwork(format!("variable {child} references undeclared parent {p}"))
                })?;
                row.push(idx);
            }
            resolved.push(row);
        }
        Network::new(name, variables, resolved)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, v: usize) -> &Variable {
        &self.variables[v]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn cardinality(&self, v: usize) -> usize {
        self.variables[v].cardinality()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.variables.iter().map(Variable::cardinality).collect()
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Number of parent instantiations of `v`.
    pub fn num_parent_configs(&self, v: usize) -> usize {
        self.parents[v].iter().map(|&p| self.cardinality(p)).product()
    }

    /// Index of the parent instantiation of `v` under a full assignment.
    pub fn parent_config(&self, v: usize, assignment: &[usize]) -> usize {
        self.parents[v]
            .iter()
            .fold(0, |acc, &p| acc * self.cardinality(p) + assignment[p])
    }

    /// Parent values (in parent-list order) of instantiation `u` of `v`.
    pub fn decode_parent_config(&self, v: usize, mut u: usize) -> Vec<usize> {
        let ps = &self.parents[v];
        let mut values = vec![0; ps.len()];
        for (slot, &p) in ps.iter().enumerate().rev() {
            let c = self.cardinality(p);
            values[slot] = u % c;
            u /= c;
        }
        values
    }

    /// Total number of family instantiations `xu` over all variables.
    pub fn num_parameters(&self) -> usize {
        (0..self.len())
            .map(|v| self.num_parent_configs(v) * self.cardinality(v))
            .sum()
    }

    /// Kahn's algorithm; ties broken by declaration order so the result is stable.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &self.children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Variables left over once every variable that can be topologically ordered is removed;
    /// empty iff the network is acyclic.
    pub fn cyclic_variables(&self) -> Vec<usize> {
        let n = self.len();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut stack: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut removed = vec![false; n];
        while let Some(v) = stack.pop() {
            removed[v] = true;
            for &c in &self.children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    stack.push(c);
                }
            }
        }
        (0..n).filter(|&v| !removed[v]).collect()
    }

    pub(crate) fn require_acyclic(&self) -> Result<Vec<usize>> {
        self.topological_order().ok_or_else(|| {
            Error::Cyclic(
                self.cyclic_variables()
                    .into_iter()
                    .map(|v| self.variables[v].name.clone())
                    .collect(),
            )
        })
    }
}
