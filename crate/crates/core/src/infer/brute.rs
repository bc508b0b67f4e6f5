use super::evidence::{Evidence, FamilyMarginals};
use crate::error::{Error, Result};
use crate::model::{FamilyTable, Network, Parameterization};

/// Largest joint state space the enumeration oracle accepts.
pub const BRUTE_FORCE_LIMIT: u128 = 1 << 22;

/// Exact family marginals by enumerating the full joint distribution.
///
/// Independent of the clique tree: it only multiplies CPT entries per full
/// assignment, keeps the assignments consistent with the evidence and sums.
pub fn brute_force_marginals(
    network: &Network,
    params: &Parameterization,
    evidence: &Evidence,
) -> Result<FamilyMarginals> {
    evidence.check(network)?;
    let cards = network.cardinalities();
    let states: u128 = cards.iter().map(|&c| c as u128).product();
    if states > BRUTE_FORCE_LIMIT {
        return Err(Error::StateSpaceTooLarge {
            states,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let n = network.len();
    let mut joint: Vec<FamilyTable> = (0..n)
        .map(|v| FamilyTable::filled(network.num_parent_configs(v), cards[v], 0.0))
        .collect();
    let mut assignment = vec![0usize; n];
    let mut total = 0.0;
    for _ in 0..states {
        if evidence.is_consistent_with(&assignment) {
            let p = params.joint_probability(network, &assignment);
            if p > 0.0 {
                total += p;
                for (v, table) in joint.iter_mut().enumerate() {
                    let u = network.parent_config(v, &assignment);
                    table.row_mut(u)[assignment[v]] += p;
                }
            }
        }
        for v in (0..n).rev() {
            assignment[v] += 1;
            if assignment[v] < cards[v] {
                break;
            }
            assignment[v] = 0;
        }
    }
    if !(total > 0.0) {
        return Err(Error::ImpossibleEvidence { example: 0 });
    }
    for table in &mut joint {
        table.values_mut().iter_mut().for_each(|p| *p /= total);
    }
    Ok(FamilyMarginals::from_joint(joint, total.ln()))
}
