use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::network::Network;
use crate::error::{Error, Result};

/// Smallest entry of a randomly seeded parameter set.
pub const INTERIOR_FLOOR: f64 = 1e-6;

/// Tolerance on the sum of every parameter set.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// Dense per-variable table: one row per parent instantiation, one column per child value.
///
/// Serialized as a list of rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<f64>>", try_from = "Vec<Vec<f64>>")]
pub struct FamilyTable {
    cardinality: usize,
    values: Vec<f64>,
}

impl FamilyTable {
    pub fn filled(rows: usize, cardinality: usize, value: f64) -> Self {
        FamilyTable {
            cardinality,
            values: vec![value; rows * cardinality],
        }
    }

    pub fn from_flat(cardinality: usize, values: Vec<f64>) -> Result<Self> {
        if cardinality == 0 || values.is_empty() || !values.len().is_multiple_of(cardinality) {
            return Err(Error::InvalidParameters(format!(
                "table of {} entries does not split into rows of {cardinality}",
                values.len()
            )));
        }
        Ok(FamilyTable { cardinality, values })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let cardinality = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != cardinality) {
            return Err(Error::InvalidParameters("ragged table rows".into()));
        }
        FamilyTable::from_flat(cardinality, rows.into_iter().flatten().collect())
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn num_rows(&self) -> usize {
        self.values.len() / self.cardinality
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.values[u * self.cardinality..(u + 1) * self.cardinality]
    }

    pub fn row_mut(&mut self, u: usize) -> &mut [f64] {
        &mut self.values[u * self.cardinality..(u + 1) * self.cardinality]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.cardinality)
    }

    /// Flat view, indexed `u * cardinality + x`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

impl From<FamilyTable> for Vec<Vec<f64>> {
    fn from(t: FamilyTable) -> Self {
        t.rows().map(<[f64]>::to_vec).collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for FamilyTable {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        FamilyTable::from_rows(rows)
    }
}

fn max_abs_difference(a: &[FamilyTable], b: &[FamilyTable]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.values.iter().zip(&y.values))
        .fold(0.0_f64, |m, (p, q)| m.max((p - q).abs()))
}

/// One conditional probability table per variable, in network order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parameterization {
    cpts: Vec<FamilyTable>,
}

impl Parameterization {
    /// Wraps tables without checking them; see [`validate`](crate::model::validate).
    pub fn from_tables(cpts: Vec<FamilyTable>) -> Self {
        Parameterization { cpts }
    }

    pub fn uniform(network: &Network) -> Self {
        let cpts = (0..network.len())
            .map(|v| {
                let k = network.cardinality(v);
                FamilyTable::filled(network.num_parent_configs(v), k, 1.0 / k as f64)
            })
            .collect();
        Parameterization { cpts }
    }

    /// Every parameter set drawn uniformly from its simplex, then pulled towards the
    /// centre so that each entry is at least [`INTERIOR_FLOOR`].
    pub fn random(network: &Network, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cpts = (0..network.len())
            .map(|v| {
                let k = network.cardinality(v);
                let mut table = FamilyTable::filled(network.num_parent_configs(v), k, 0.0);
                let shrink = 1.0 - k as f64 * INTERIOR_FLOOR;
                for row in table.values.chunks_exact_mut(k) {
                    for p in row.iter_mut() {
                        *p = Exp1.sample(&mut rng);
                    }
                    let total: f64 = row.iter().sum();
                    for p in row.iter_mut() {
                        *p = INTERIOR_FLOOR + shrink * (*p / total);
                    }
                }
                table
            })
            .collect();
        Parameterization { cpts }
    }

    pub fn cpts(&self) -> &[FamilyTable] {
        &self.cpts
    }

    pub fn cpt(&self, v: usize) -> &FamilyTable {
        &self.cpts[v]
    }

    pub fn cpt_mut(&mut self, v: usize) -> &mut FamilyTable {
        &mut self.cpts[v]
    }

    pub fn row(&self, v: usize, u: usize) -> &[f64] {
        self.cpts[v].row(u)
    }

    pub fn row_mut(&mut self, v: usize, u: usize) -> &mut [f64] {
        self.cpts[v].row_mut(u)
    }

    /// θ_{x|u} for family `v`.
    pub fn theta(&self, v: usize, u: usize, x: usize) -> f64 {
        self.cpts[v].row(u)[x]
    }

    pub fn max_abs_difference(&self, other: &Parameterization) -> f64 {
        max_abs_difference(&self.cpts, &other.cpts)
    }

    pub fn is_interior(&self) -> bool {
        self.cpts.iter().all(|t| t.values.iter().all(|&p| p > 0.0))
    }

    /// Joint probability of a full assignment.
    pub fn joint_probability(&self, network: &Network, assignment: &[usize]) -> f64 {
        (0..network.len())
            .map(|v| self.theta(v, network.parent_config(v, assignment), assignment[v]))
            .product()
    }
}

/// Dirichlet exponents ψ_{x|u}, shaped like a [`Parameterization`].
///
/// Exponents of exactly 1 are accepted (a flat prior, reducing MAP to maximum
/// likelihood); the uniqueness and mode results need every exponent > 1, which
/// [`DirichletPrior::is_strict`] reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PriorRepr", into = "PriorRepr")]
pub struct DirichletPrior {
    exponents: Vec<FamilyTable>,
}

#[derive(Serialize, Deserialize)]
struct PriorRepr {
    exponents: Vec<FamilyTable>,
}

impl TryFrom<PriorRepr> for DirichletPrior {
    type Error = Error;

    fn try_from(r: PriorRepr) -> Result<Self> {
        DirichletPrior::new(r.exponents)
    }
}

impl From<DirichletPrior> for PriorRepr {
    fn from(p: DirichletPrior) -> Self {
        PriorRepr { exponents: p.exponents }
    }
}

impl DirichletPrior {
    pub fn new(exponents: Vec<FamilyTable>) -> Result<Self> {
        for (v, t) in exponents.iter().enumerate() {
            if let Some(&bad) = t.values.iter().find(|&&e| !e.is_finite() || e < 1.0) {
                return Err(Error::InvalidPrior(format!(
                    "exponent {bad} for variable #{v}; exponents must be finite and >= 1"
                )));
            }
        }
        Ok(DirichletPrior { exponents })
    }

    /// The same exponent for every parameter.
    pub fn uniform(network: &Network, exponent: f64) -> Result<Self> {
        DirichletPrior::new(
            (0..network.len())
                .map(|v| FamilyTable::filled(network.num_parent_configs(v), network.cardinality(v), exponent))
                .collect(),
        )
    }

    /// ψ ≡ 2.
    pub fn laplace(network: &Network) -> Self {
        DirichletPrior::uniform(network, 2.0).expect("2 is a valid exponent")
    }

    pub fn tables(&self) -> &[FamilyTable] {
        &self.exponents
    }

    pub fn row(&self, v: usize, u: usize) -> &[f64] {
        self.exponents[v].row(u)
    }

    pub fn is_strict(&self) -> bool {
        self.exponents.iter().all(|t| t.values.iter().all(|&e| e > 1.0))
    }

    /// Σ (ψ_{x|u} − 1) log θ_{x|u}; −∞ if some θ with ψ > 1 is zero.
    pub fn log_density(&self, params: &Parameterization) -> f64 {
        let mut total = 0.0;
        for (psi, theta) in self.exponents.iter().zip(params.cpts()) {
            for (&e, &p) in psi.values.iter().zip(&theta.values) {
                if e != 1.0 {
                    total += (e - 1.0) * p.ln();
                }
            }
        }
        total
    }

    /// The unique maximiser of the prior density: (ψ_{x|u} − 1) / (ψ_{X|u} − |X|).
    pub fn mode(&self) -> Result<Parameterization> {
        if !self.is_strict() {
            return Err(Error::InvalidPrior(
                "the Dirichlet mode is unique only when every exponent is > 1".into(),
            ));
        }
        let cpts = self
            .exponents
            .iter()
            .map(|t| {
                let k = t.cardinality;
                let mut out = t.clone();
                for row in out.values.chunks_exact_mut(k) {
                    let denom: f64 = row.iter().sum::<f64>() - k as f64;
                    for e in row.iter_mut() {
                        *e = (*e - 1.0) / denom;
                    }
                }
                out
            })
            .collect();
        Ok(Parameterization { cpts })
    }
}

pub fn uniform_parameterization(network: &Network) -> Parameterization {
    Parameterization::uniform(network)
}

pub fn random_parameterization(network: &Network, seed: u64) -> Parameterization {
    Parameterization::random(network, seed)
}

pub fn dirichlet_mode(prior: &DirichletPrior) -> Result<Parameterization> {
    prior.mode()
}
