//! Neighborhood bisimulations: checking candidate relations and computing
//! the greatest one by refinement.
//!
//! The zig/zag clauses quantify over generator antichains on both sides;
//! this matches quantifying over the full neighborhood families because a
//! universally chosen neighborhood may be shrunk to a generator below it and
//! an existentially chosen one is witnessed by a generator below it. The
//! `UpwardClosure` variant checks the clauses against the explicit families
//! as an oracle.
//!
//! Pairs must also agree on the valuation of every shared proposition:
//! without atomic harmony, bisimilar points could disagree on a bare
//! proposition, which is exactly what bisimulations must not allow.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::game::NeighborhoodChoice;
use crate::model::{GuardError, NeighborhoodModel};
use crate::set::StateSet;

pub type Pairs = BTreeSet<(usize, usize)>;

#[derive(Debug, Error)]
pub enum BisimError {
    #[error("models do not share a vocabulary")]
    VocabularyMismatch,
    #[error("relation mentions state {0} outside its model")]
    BadPair(usize),
    #[error(transparent)]
    Guard(#[from] GuardError),
}

fn families(
    m: &NeighborhoodModel,
    choice: NeighborhoodChoice,
) -> Result<Vec<Vec<StateSet>>, GuardError> {
    (0..m.num_states())
        .map(|s| match choice {
            NeighborhoodChoice::Generators => Ok(m.generators(s).to_vec()),
            NeighborhoodChoice::UpwardClosure => m.upward_closure(s),
        })
        .collect()
}

fn atomic_harmony(
    left: &NeighborhoodModel,
    right: &NeighborhoodModel,
    s: usize,
    t: usize,
) -> bool {
    left.vocabulary().iter().all(|p| {
        let lv = left.valuation(p).map_or(false, |set| set.contains(s));
        let rv = right.valuation(p).map_or(false, |set| set.contains(t));
        lv == rv
    })
}

fn zig_zag(
    from: &[StateSet],
    to: &[StateSet],
    related: impl Fn(usize, usize) -> bool,
) -> bool {
    // for every neighborhood on one side there is one on the other side all
    // of whose members are matched backwards
    from.iter().all(|z| {
        to.iter()
            .any(|z2| z2.iter().all(|u2| z.iter().any(|u| related(u, u2))))
    })
}

fn pair_ok(
    left: &NeighborhoodModel,
    right: &NeighborhoodModel,
    fam_l: &[Vec<StateSet>],
    fam_r: &[Vec<StateSet>],
    pairs: &Pairs,
    s: usize,
    t: usize,
) -> bool {
    atomic_harmony(left, right, s, t)
        && zig_zag(&fam_l[s], &fam_r[t], |u, u2| pairs.contains(&(u, u2)))
        && zig_zag(&fam_r[t], &fam_l[s], |u2, u| pairs.contains(&(u, u2)))
}

pub fn is_bisimulation(
    left: &NeighborhoodModel,
    right: &NeighborhoodModel,
    pairs: &Pairs,
) -> Result<bool, BisimError> {
    is_bisimulation_with(left, right, pairs, NeighborhoodChoice::Generators)
}

pub fn is_bisimulation_with(
    left: &NeighborhoodModel,
    right: &NeighborhoodModel,
    pairs: &Pairs,
    choice: NeighborhoodChoice,
) -> Result<bool, BisimError> {
    if !left.same_vocabulary(right) {
        return Err(BisimError::VocabularyMismatch);
    }
    for &(s, t) in pairs {
        if s >= left.num_states() {
            return Err(BisimError::BadPair(s));
        }
        if t >= right.num_states() {
            return Err(BisimError::BadPair(t));
        }
    }
    let fam_l = families(left, choice)?;
    let fam_r = families(right, choice)?;
    Ok(pairs
        .iter()
        .all(|&(s, t)| pair_ok(left, right, &fam_l, &fam_r, pairs, s, t)))
}

/// The union of all bisimulations between two models, computed by deleting
/// violating pairs from the atomically harmonious relation until stable.
pub fn greatest_bisimulation(
    left: &NeighborhoodModel,
    right: &NeighborhoodModel,
) -> Result<Pairs, BisimError> {
    greatest_bisimulation_with(left, right, NeighborhoodChoice::Generators)
}

pub fn greatest_bisimulation_with(
    left: &NeighborhoodModel,
    right: &NeighborhoodModel,
    choice: NeighborhoodChoice,
) -> Result<Pairs, BisimError> {
    if !left.same_vocabulary(right) {
        return Err(BisimError::VocabularyMismatch);
    }
    let fam_l = families(left, choice)?;
    let fam_r = families(right, choice)?;

    let mut pairs: Pairs = (0..left.num_states())
        .flat_map(|s| (0..right.num_states()).map(move |t| (s, t)))
        .filter(|&(s, t)| atomic_harmony(left, right, s, t))
        .collect();

    loop {
        let bad: Vec<(usize, usize)> = pairs
            .iter()
            .copied()
            .filter(|&(s, t)| !pair_ok(left, right, &fam_l, &fam_r, &pairs, s, t))
            .collect();
        if bad.is_empty() {
            return Ok(pairs);
        }
        for p in bad {
            pairs.remove(&p);
        }
    }
}

pub fn bisimilar(
    left: &NeighborhoodModel,
    s: usize,
    right: &NeighborhoodModel,
    t: usize,
) -> Result<bool, BisimError> {
    Ok(greatest_bisimulation(left, right)?.contains(&(s, t)))
}

/// Global bisimilarity: the greatest bisimulation must be full on both state
/// sets and contain the pair of points. Any global bisimulation is contained
/// in the greatest one, so fullness of some implies fullness of the greatest,
/// which is then itself global.
pub fn globally_bisimilar(
    left: &NeighborhoodModel,
    s: usize,
    right: &NeighborhoodModel,
    t: usize,
) -> Result<bool, BisimError> {
    let pairs = greatest_bisimulation(left, right)?;
    Ok(pairs.contains(&(s, t)) && is_full(&pairs, left.num_states(), right.num_states()))
}

pub fn is_full(pairs: &Pairs, left_states: usize, right_states: usize) -> bool {
    let mut left_hit = vec![false; left_states];
    let mut right_hit = vec![false; right_states];
    for &(s, t) in pairs {
        left_hit[s] = true;
        right_hit[t] = true;
    }
    left_hit.iter().all(|&b| b) && right_hit.iter().all(|&b| b)
}

#[cfg(test)]
mod tests;
