//! Clique-tree (jointree) calibration.
//!
//! The tree is built once per network from a min-fill elimination order: eliminating
//! `v` creates the clique `{v} ∪ neighbours(v)`, whose parent is the clique of the
//! earliest-eliminated variable among those neighbours. Components of a disconnected
//! network are chained through empty separators. Each family lives in the clique of
//! its first-eliminated member, which contains the whole family.
//!
//! Calibration is a Hugin-style two-pass propagation over flat clique tables; all
//! index arithmetic (separator projections and family projections) is precomputed.

use std::collections::BTreeSet;

use super::evidence::{Evidence, FamilyMarginals};
use super::factor::Factor;
use crate::error::{Error, Result};
use crate::model::{FamilyTable, Network, Parameterization};

#[derive(Clone, Debug)]
struct Clique {
    scope: Vec<usize>,
    cards: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct JoinTree {
    cards: Vec<usize>,
    cliques: Vec<Clique>,
    /// Cliques in collect order: every clique precedes its parent; the root is last.
    order: Vec<usize>,
    parent: Vec<Option<usize>>,
    separator_size: Vec<usize>,
    /// Clique entries → separator with the parent.
    up_map: Vec<Vec<u32>>,
    /// Parent clique entries → separator with this clique.
    down_map: Vec<Vec<u32>>,
    /// Families homed in each clique.
    homed: Vec<Vec<usize>>,
    home: Vec<usize>,
    /// Home clique entries → `u * |X| + x` of the family.
    family_map: Vec<Vec<u32>>,
    /// Home clique entries → value of the family's child variable.
    child_map: Vec<Vec<u32>>,
    family_size: Vec<usize>,
    /// Start of each clique's table in the concatenated potentials (one extra at the end).
    clique_offset: Vec<usize>,
    /// Start of each clique's upward message in the concatenated separators.
    sep_offset: Vec<usize>,
    rescale: bool,
}

fn prefix_sums(sizes: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut out = vec![0];
    for s in sizes {
        out.push(out.last().unwrap() + s);
    }
    out
}

fn min_fill_order(network: &Network) -> Vec<usize> {
    let n = network.len();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for v in 0..n {
        let family: Vec<usize> = network.parents(v).iter().copied().chain([v]).collect();
        for (i, &a) in family.iter().enumerate() {
            for &b in &family[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
    }
    let mut eliminated = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let best = (0..n)
            .filter(|&v| !eliminated[v])
            .min_by_key(|&v| {
                let nb: Vec<usize> = adj[v].iter().copied().collect();
                let mut fill = 0usize;
                for (i, &a) in nb.iter().enumerate() {
                    fill += nb[i + 1..].iter().filter(|b| !adj[a].contains(b)).count();
                }
                let weight: u128 = nb.iter().chain([&v]).map(|&u| network.cardinality(u) as u128).product();
                (fill, weight, v)
            })
            .expect("a variable remains");
        let nb: Vec<usize> = adj[best].iter().copied().collect();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
            adj[a].remove(&best);
        }
        adj[best].clear();
        eliminated[best] = true;
        order.push(best);
    }
    order
}

impl JoinTree {
    pub fn new(network: &Network) -> Result<Self> {
        network.require_acyclic()?;
        let n = network.len();
        if n == 0 {
            return Err(Error::InvalidNetwork("network has no variables".into()));
        }
        let cards = network.cardinalities();
        let order = min_fill_order(network);
        let mut position = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }

        // Replay the elimination to collect cliques.
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for v in 0..n {
            let family: Vec<usize> = network.parents(v).iter().copied().chain([v]).collect();
            for (i, &a) in family.iter().enumerate() {
                for &b in &family[i + 1..] {
                    adj[a].insert(b);
                    adj[b].insert(a);
                }
            }
        }
        let mut cliques = Vec::with_capacity(n);
        let mut parent = vec![None; n];
        let mut separators: Vec<Vec<usize>> = Vec::with_capacity(n);
        let mut last_root: Option<usize> = None;
        for (i, &v) in order.iter().enumerate() {
            let nb: Vec<usize> = adj[v].iter().copied().collect();
            for (j, &a) in nb.iter().enumerate() {
                for &b in &nb[j + 1..] {
                    adj[a].insert(b);
                    adj[b].insert(a);
                }
                adj[a].remove(&v);
            }
            let mut scope: Vec<usize> = nb.iter().copied().chain([v]).collect();
            scope.sort_unstable();
            let clique_cards = scope.iter().map(|&u| cards[u]).collect();
            cliques.push(Clique {
                scope,
                cards: clique_cards,
            });
            // Clique i belongs to the i-th eliminated variable.
            match nb.iter().map(|&u| position[u]).min() {
                Some(p) => {
                    parent[i] = Some(p);
                    separators.push(nb);
                }
                None => {
                    separators.push(Vec::new());
                    if let Some(r) = last_root {
                        parent[r] = Some(i);
                    }
                    last_root = Some(i);
                }
            }
        }
        // Roots chained above point forward, so elimination order is still a collect order.
        let tree_order: Vec<usize> = (0..n).collect();

        let factor_of = |c: usize| Factor::ones(cliques[c].scope.clone(), cliques[c].cards.clone());
        let mut up_map = vec![Vec::new(); n];
        let mut down_map = vec![Vec::new(); n];
        let mut separator_size = vec![1; n];
        for c in 0..n {
            if let Some(p) = parent[c] {
                let mut sep = separators[c].clone();
                sep.sort_unstable();
                separator_size[c] = sep.iter().map(|&u| cards[u]).product();
                up_map[c] = factor_of(c).projection_map(&sep);
                down_map[c] = factor_of(p).projection_map(&sep);
            }
        }

        let mut homed = vec![Vec::new(); n];
        let mut home = vec![0; n];
        let mut family_map = vec![Vec::new(); n];
        for v in 0..n {
            let family: Vec<usize> = network.parents(v).iter().copied().chain([v]).collect();
            let c = family.iter().map(|&u| position[u]).min().expect("family is non-empty");
            debug_assert!(family.iter().all(|u| cliques[c].scope.contains(u)));
            home[v] = c;
            homed[c].push(v);
            family_map[v] = factor_of(c).projection_map(&family);
        }

        let child_map = family_map
            .iter()
            .enumerate()
            .map(|(v, m)| m.iter().map(|&i| i % cards[v] as u32).collect())
            .collect();
        Ok(JoinTree {
            clique_offset: prefix_sums(cliques.iter().map(|c| c.cards.iter().product())),
            sep_offset: prefix_sums(separator_size.iter().copied()),
            family_size: (0..n).map(|v| network.num_parent_configs(v) * cards[v]).collect(),
            cards,
            cliques,
            order: tree_order,
            parent,
            separator_size,
            up_map,
            down_map,
            homed,
            home,
            child_map,
            family_map,
            rescale: true,
        })
    }

    /// Enables or disables per-message rescaling; results agree either way up to
    /// rounding unless unscaled messages underflow.
    pub fn with_rescaling(mut self, rescale: bool) -> Self {
        self.rescale = rescale;
        self
    }

    pub fn num_cliques(&self) -> usize {
        self.cliques.len()
    }

    /// Largest clique table size.
    pub fn max_clique_size(&self) -> usize {
        self.cliques
            .iter()
            .map(|c| c.cards.iter().product::<usize>())
            .max()
            .unwrap_or(0)
    }

    /// Clique potentials (CPTs times evidence indicators), concatenated.
    fn load_potentials(&self, params: &Parameterization, evidence: &Evidence, pot: &mut Vec<f64>) {
        pot.clear();
        pot.resize(self.clique_offset[self.cliques.len()], 1.0);
        for (c, homed) in self.homed.iter().enumerate() {
            let table = &mut pot[self.clique_offset[c]..self.clique_offset[c + 1]];
            for &v in homed {
                let cpt = params.cpt(v).values();
                let map = &self.family_map[v];
                match evidence.get(v) {
                    Some(x) => {
                        let x = x as u32;
                        for ((t, &i), &child) in table.iter_mut().zip(map).zip(&self.child_map[v]) {
                            *t *= if child == x { cpt[i as usize] } else { 0.0 };
                        }
                    }
                    None => {
                        for (t, &i) in table.iter_mut().zip(map) {
                            *t *= cpt[i as usize];
                        }
                    }
                }
            }
        }
    }

    /// Collect pass: leaves the outgoing messages in `sep` and returns log Pr(d). With
    /// `rescale` off, messages keep their raw mass.
    fn collect(&self, pot: &mut [f64], sep: &mut [f64], rescale: bool, example: usize) -> Result<f64> {
        // Message masses are multiplied up and only folded into the log when the running
        // product nears the edge of the floating-point range.
        let mut log_scale = 0.0;
        let mut scale = 1.0f64;
        for &c in &self.order {
            let Some(p) = self.parent[c] else { continue };
            let msg = &mut sep[self.sep_offset[c]..self.sep_offset[c + 1]];
            msg.fill(0.0);
            let own = &mut pot[self.clique_offset[c]..self.clique_offset[c + 1]];
            for (&t, &i) in own.iter().zip(&self.up_map[c]) {
                msg[i as usize] += t;
            }
            if rescale {
                let mass: f64 = msg.iter().sum();
                if !(mass > 0.0) {
                    return Err(Error::ImpossibleEvidence { example });
                }
                let inv = 1.0 / mass;
                msg.iter_mut().for_each(|m| *m *= inv);
                own.iter_mut().for_each(|t| *t *= inv);
                scale *= mass;
                if !(1e-250..=1e250).contains(&scale) {
                    log_scale += scale.ln();
                    scale = 1.0;
                }
            }
            let parent = &mut pot[self.clique_offset[p]..self.clique_offset[p + 1]];
            for (t, &i) in parent.iter_mut().zip(&self.down_map[c]) {
                *t *= msg[i as usize];
            }
        }
        let root = *self.order.last().expect("tree has a root");
        let z: f64 = pot[self.clique_offset[root]..self.clique_offset[root + 1]].iter().sum();
        if !(z > 0.0) {
            return Err(Error::ImpossibleEvidence { example });
        }
        Ok(z.ln() + scale.ln() + log_scale)
    }

    /// Calibrates the tree on one example. `example` only labels the error.
    pub fn calibrate_example(
        &self,
        params: &Parameterization,
        evidence: &Evidence,
        example: usize,
    ) -> Result<FamilyMarginals> {
        let mut pot = Vec::new();
        self.load_potentials(params, evidence, &mut pot);
        let mut sep = vec![0.0; self.sep_offset[self.cliques.len()]];
        let log_evidence = self.collect(&mut pot, &mut sep, self.rescale, example)?;

        let root = *self.order.last().expect("tree has a root");
        let beliefs = &mut pot;
        let root_table = &mut beliefs[self.clique_offset[root]..self.clique_offset[root + 1]];
        let z: f64 = root_table.iter().sum();
        root_table.iter_mut().for_each(|t| *t /= z);

        let mut incoming = vec![0.0; self.separator_size.iter().copied().max().unwrap_or(1)];
        for &c in self.order.iter().rev() {
            let Some(p) = self.parent[c] else { continue };
            let incoming = &mut incoming[..self.separator_size[c]];
            incoming.fill(0.0);
            let parent = &beliefs[self.clique_offset[p]..self.clique_offset[p + 1]];
            for (&t, &i) in parent.iter().zip(&self.down_map[c]) {
                incoming[i as usize] += t;
            }
            let sent = &sep[self.sep_offset[c]..self.sep_offset[c + 1]];
            for (s, &old) in incoming.iter_mut().zip(sent) {
                // 0/0 = 0: a zero outgoing message means the clique mass there is zero too.
                *s = if old > 0.0 { *s / old } else { 0.0 };
            }
            let own = &mut beliefs[self.clique_offset[c]..self.clique_offset[c + 1]];
            for (t, &i) in own.iter_mut().zip(&self.up_map[c]) {
                *t *= incoming[i as usize];
            }
        }

        let joint = (0..self.cards.len())
            .map(|v| {
                let mut values = vec![0.0; self.family_size[v]];
                let h = self.home[v];
                let table = &beliefs[self.clique_offset[h]..self.clique_offset[h + 1]];
                for (&b, &i) in table.iter().zip(&self.family_map[v]) {
                    values[i as usize] += b;
                }
                FamilyTable::from_flat(self.cards[v], values).expect("family table shape")
            })
            .collect();
        Ok(FamilyMarginals::from_joint(joint, log_evidence))
    }

    pub fn calibrate(&self, params: &Parameterization, evidence: &Evidence) -> Result<FamilyMarginals> {
        self.calibrate_example(params, evidence, 0)
    }

    /// log Pr(d) only.
    pub fn log_evidence(&self, params: &Parameterization, evidence: &Evidence, example: usize) -> Result<f64> {
        let mut pot = Vec::new();
        self.load_potentials(params, evidence, &mut pot);
        let mut sep = vec![0.0; self.sep_offset[self.cliques.len()]];
        self.collect(&mut pot, &mut sep, true, example)
    }
}

/// One-shot calibration; builds the clique tree for this call.
pub fn calibrate(network: &Network, params: &Parameterization, evidence: &Evidence) -> Result<FamilyMarginals> {
    evidence.check(network)?;
    JoinTree::new(network)?.calibrate(params, evidence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Variable;

    fn chain() -> (Network, Parameterization) {
        let vars = vec![
            Variable::with_cardinality("A", 2).unwrap(),
            Variable::with_cardinality("B", 3).unwrap(),
        ];
        let net = Network::new("ab", vars, vec![vec![], vec![0]]).unwrap();
        let params = Parameterization::from_tables(vec![
            FamilyTable::from_rows(vec![vec![0.3, 0.7]]).unwrap(),
            FamilyTable::from_rows(vec![vec![0.2, 0.3, 0.5], vec![0.6, 0.1, 0.3]]).unwrap(),
        ]);
        (net, params)
    }

    #[test]
    fn empty_evidence_gives_prior_marginals() {
        let (net, params) = chain();
        let m = calibrate(&net, &params, &Evidence::empty(2)).unwrap();
        assert!(m.log_evidence.abs() < 1e-15);
        for a in 0..2 {
            for b in 0..3 {
                let expected = params.theta(0, 0, a) * params.theta(1, a, b);
                assert!((m.family(1, a, b) - expected).abs() < 1e-15);
            }
            assert!((m.parent(1, a) - params.theta(0, 0, a)).abs() < 1e-15);
        }
    }

    #[test]
    fn full_evidence_is_indicator() {
        let (net, params) = chain();
        let m = calibrate(&net, &params, &Evidence::complete(&[1, 2])).unwrap();
        assert!((m.evidence_probability() - 0.7 * 0.3).abs() < 1e-15);
        for a in 0..2 {
            for b in 0..3 {
                let expected = if (a, b) == (1, 2) { 1.0 } else { 0.0 };
                assert_eq!(m.family(1, a, b), expected);
            }
        }
    }

    #[test]
    fn zero_probability_evidence_is_reported() {
        let (net, mut params) = chain();
        params.row_mut(1, 0).copy_from_slice(&[1.0, 0.0, 0.0]);
        params.row_mut(1, 1).copy_from_slice(&[1.0, 0.0, 0.0]);
        let err = JoinTree::new(&net)
            .unwrap()
            .calibrate_example(&params, &Evidence::from_values(vec![None, Some(1)]), 17)
            .unwrap_err();
        assert!(matches!(err, Error::ImpossibleEvidence { example: 17 }));
    }

    #[test]
    fn cyclic_network_rejected() {
        let vars = vec![
            Variable::with_cardinality("A", 2).unwrap(),
            Variable::with_cardinality("B", 2).unwrap(),
        ];
        let net = Network::new("ab", vars, vec![vec![1], vec![0]]).unwrap();
        assert!(matches!(JoinTree::new(&net), Err(Error::Cyclic(_))));
    }

    #[test]
    fn disconnected_components() {
        let vars = (0..3)
            .map(|i| Variable::with_cardinality(format!("V{i}"), 2).unwrap())
            .collect();
        let net = Network::new("d", vars, vec![vec![], vec![], vec![1]]).unwrap();
        let params = Parameterization::random(&net, 1);
        let ev = Evidence::from_values(vec![Some(0), None, Some(1)]);
        let m = calibrate(&net, &params, &ev).unwrap();
        let expected = params.theta(0, 0, 0)
            * (params.theta(1, 0, 0) * params.theta(2, 0, 1) + params.theta(1, 0, 1) * params.theta(2, 1, 1));
        assert!((m.evidence_probability() - expected).abs() < 1e-15);
    }
}
