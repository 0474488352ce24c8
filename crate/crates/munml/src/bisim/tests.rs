use super::*;
use crate::model::{disjoint_union, enumerate_models, NeighborhoodModel};
use crate::testutil::{m1, vocab};
use std::collections::BTreeMap as Map;

fn identity(n: usize) -> Pairs {
    (0..n).map(|i| (i, i)).collect()
}

/// Single p-state with an empty generator family.
fn lone_p() -> NeighborhoodModel {
    NeighborhoodModel::new(
        vec!["t0".into()],
        Map::new(),
        Map::from([("p".into(), vec!["t0".into()])]),
    )
    .unwrap()
}

#[test]
fn identity_is_a_bisimulation() {
    let m = m1();
    assert!(is_bisimulation(&m, &m, &identity(2)).unwrap());
}

#[test]
fn insertion_graphs_are_bisimulations() {
    let m = m1();
    let (union, ins) = disjoint_union(&[&m, &m]).unwrap();
    for i in 0..2 {
        let graph: Pairs = ins[i].map.iter().enumerate().map(|(u, &w)| (u, w)).collect();
        assert!(is_bisimulation(&m, &union, &graph).unwrap());
    }
}

#[test]
fn missing_neighborhood_breaks_zig() {
    // s0 has a generator, the lone state has none: clause 1 fails
    let m = m1();
    let bare = NeighborhoodModel::new(
        vec!["t0".into()],
        Map::new(),
        Map::from([("p".into(), vec![])]),
    )
    .unwrap();
    let s0 = m.state_index("s0").unwrap();
    let pairs: Pairs = [(s0, 0)].into();
    assert!(!is_bisimulation(&m, &bare, &pairs).unwrap());
}

#[test]
fn vocabulary_mismatch_is_an_error() {
    let m = m1();
    let other = NeighborhoodModel::new(vec!["t0".into()], Map::new(), Map::new()).unwrap();
    assert!(matches!(
        is_bisimulation(&m, &other, &Pairs::new()),
        Err(BisimError::VocabularyMismatch)
    ));
}

#[test]
fn greatest_contains_identity() {
    let m = m1();
    let g = greatest_bisimulation(&m, &m).unwrap();
    assert!(identity(2).is_subset(&g));
}

#[test]
fn duplicated_target_state_stays_bisimilar() {
    // duplicate s1 into two p-states with empty generator families; s0's
    // generator points at one duplicate
    let m = m1();
    let dup = NeighborhoodModel::new(
        vec!["s0".into(), "s1".into(), "s1b".into()],
        Map::from([("s0".into(), vec![vec!["s1".into()]])]),
        Map::from([("p".into(), vec!["s1".into(), "s1b".into()])]),
    )
    .unwrap();
    let g = greatest_bisimulation(&m, &dup).unwrap();
    assert!(g.contains(&(
        m.state_index("s0").unwrap(),
        dup.state_index("s0").unwrap()
    )));
}

#[test]
fn lost_generator_separates() {
    // remove s0's generator: the refuter now wins the neighborhood game
    let m = m1();
    let broken = NeighborhoodModel::new(
        vec!["s0".into(), "s1".into()],
        Map::new(),
        Map::from([("p".into(), vec!["s1".into()])]),
    )
    .unwrap();
    let g = greatest_bisimulation(&m, &broken).unwrap();
    assert!(!g.contains(&(0, 0)));
}

#[test]
fn bisimilar_examples() {
    let m = m1();
    let (union, ins) = disjoint_union(&[&m, &m]).unwrap();
    let s0 = m.state_index("s0").unwrap();
    assert!(bisimilar(&m, s0, &union, ins[0].map[s0]).unwrap());

    for s in 0..m.num_states() {
        assert!(bisimilar(&m, s, &m, s).unwrap());
    }

    assert!(!bisimilar(&m, s0, &lone_p(), 0).unwrap());
}

#[test]
fn globally_bisimilar_examples() {
    let m = m1();
    assert!(globally_bisimilar(&m, 0, &m, 0).unwrap());
    assert!(!globally_bisimilar(&m, 1, &lone_p(), 0).unwrap());
}

#[test]
fn bisimulations_are_closed_under_union() {
    let m = m1();
    let (union, ins) = disjoint_union(&[&m, &m]).unwrap();
    let r1: Pairs = ins[0].map.iter().enumerate().map(|(u, &w)| (w, u)).collect();
    let r2: Pairs = ins[1].map.iter().enumerate().map(|(u, &w)| (w, u)).collect();
    assert!(is_bisimulation(&union, &m, &r1).unwrap());
    assert!(is_bisimulation(&union, &m, &r2).unwrap());
    let both: Pairs = r1.union(&r2).copied().collect();
    assert!(is_bisimulation(&union, &m, &both).unwrap());
}

#[test]
fn greatest_is_a_bisimulation_and_maximal() {
    let models: Vec<NeighborhoodModel> = enumerate_models(2, &vocab(&["p"]))
        .unwrap()
        .step_by(17)
        .collect();
    for a in &models {
        for b in &models {
            let g = greatest_bisimulation(a, b).unwrap();
            assert!(is_bisimulation(a, b, &g).unwrap());
            for s in 0..a.num_states() {
                for t in 0..b.num_states() {
                    if !g.contains(&(s, t)) {
                        let mut extended = g.clone();
                        extended.insert((s, t));
                        assert!(!is_bisimulation(a, b, &extended).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn generator_refinement_matches_closure_refinement() {
    let models: Vec<NeighborhoodModel> = enumerate_models(2, &vocab(&["p"]))
        .unwrap()
        .step_by(19)
        .collect();
    for a in &models {
        for b in &models {
            let by_gens = greatest_bisimulation_with(a, b, NeighborhoodChoice::Generators).unwrap();
            let by_closure =
                greatest_bisimulation_with(a, b, NeighborhoodChoice::UpwardClosure).unwrap();
            assert_eq!(by_gens, by_closure);
        }
    }
}
