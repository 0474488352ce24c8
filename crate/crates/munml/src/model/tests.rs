use super::*;
use crate::testutil::{m1, var, vocab};

const M1_DOC: &str = r#"{"states":["s0","s1"],"neighborhoods":{"s0":[["s1"]],"s1":[]},"valuation":{"p":["s1"]},"point":"s0"}"#;

#[test]
fn validate_examples() {
    assert!(m1().validate().is_ok());

    let bad = NeighborhoodModel::new(
        vec!["s0".into(), "s1".into()],
        BTreeMap::from([(
            "s0".into(),
            vec![vec!["s1".into()], vec!["s0".into(), "s1".into()]],
        )]),
        BTreeMap::new(),
    );
    match bad {
        Err(ModelError::Invalid(violations)) => {
            assert!(violations.iter().any(|v| v.contains("antichain")));
        }
        other => panic!("expected an antichain violation, got {other:?}"),
    }

    let bad = NeighborhoodModel::new(
        vec!["s0".into(), "s1".into()],
        BTreeMap::new(),
        BTreeMap::from([("p".into(), vec!["s2".into()])]),
    );
    assert!(matches!(bad, Err(ModelError::Invalid(_))));
}

#[test]
fn contains_neighborhood_examples() {
    let m = m1();
    let s0 = m.state_index("s0").unwrap();
    let s1 = m.state_index("s1").unwrap();
    assert!(m.contains_neighborhood(s0, &StateSet::from_indices(2, [s1])));
    assert!(m.contains_neighborhood(s0, &StateSet::full(2)));
    assert!(!m.contains_neighborhood(s1, &StateSet::full(2)));
}

#[test]
fn upward_closure_examples() {
    let m = m1();
    let s0 = m.state_index("s0").unwrap();
    let s1 = m.state_index("s1").unwrap();
    let closure = m.upward_closure(s0).unwrap();
    assert_eq!(closure.len(), 2);
    assert!(closure.contains(&StateSet::from_indices(2, [s1])));
    assert!(closure.contains(&StateSet::full(2)));
    assert!(m.upward_closure(s1).unwrap().is_empty());

    // an empty generator makes every subset a neighborhood
    let all = NeighborhoodModel::new(
        vec!["s0".into()],
        BTreeMap::from([("s0".into(), vec![vec![]])]),
        BTreeMap::new(),
    )
    .unwrap();
    assert_eq!(all.upward_closure(0).unwrap().len(), 2);
}

#[test]
fn closure_guard() {
    let m = random_model(13, &vocab(&[]), &Density::default(), 0);
    assert!(m.upward_closure(0).is_err());
}

#[test]
fn contains_neighborhood_matches_closure() {
    for (k, m) in enumerate_models(2, &vocab(&["p"])).unwrap().enumerate() {
        let n = m.num_states();
        for s in 0..n {
            let closure = m.upward_closure(s).unwrap();
            for z in all_subsets(n) {
                assert_eq!(
                    m.contains_neighborhood(s, &z),
                    closure.contains(&z),
                    "model #{k}, state {s}"
                );
            }
        }
    }
}

#[test]
fn monotonicity_by_construction() {
    for m in enumerate_models(2, &vocab(&["p"])).unwrap() {
        let n = m.num_states();
        for s in 0..n {
            for z in all_subsets(n) {
                for z2 in all_subsets(n) {
                    if z.is_subset(&z2) && m.contains_neighborhood(s, &z) {
                        assert!(m.contains_neighborhood(s, &z2));
                    }
                }
            }
        }
    }
}

#[test]
fn disjoint_union_examples() {
    let m = m1();
    let (u, ins) = disjoint_union(&[&m, &m]).unwrap();
    assert_eq!(u.num_states(), 4);
    let s0_copy0 = ins[0].map[m.state_index("s0").unwrap()];
    let s1_copy0 = ins[0].map[m.state_index("s1").unwrap()];
    assert_eq!(
        u.generators(s0_copy0),
        &[StateSet::from_indices(4, [s1_copy0])]
    );
    assert_eq!(u.state_name(s0_copy0), "0:s0");

    let (single, _) = disjoint_union(&[&m]).unwrap();
    assert_eq!(single.num_states(), m.num_states());
    for s in 0..m.num_states() {
        assert_eq!(single.generators(s).len(), m.generators(s).len());
    }

    let other = random_model(2, &vocab(&["q"]), &Density::default(), 1);
    assert!(matches!(
        disjoint_union(&[&m, &other]),
        Err(ModelError::VocabularyMismatch)
    ));
}

#[test]
fn disjoint_union_neighborhood_law() {
    // Z is a neighborhood of the copy of u iff its preimage is one of u.
    let ones: Vec<NeighborhoodModel> = enumerate_models(1, &vocab(&["p"])).unwrap().collect();
    let twos: Vec<NeighborhoodModel> = enumerate_models(2, &vocab(&["p"]))
        .unwrap()
        .step_by(7)
        .collect();
    let mut pairs = Vec::new();
    for a in &ones {
        for b in &twos {
            pairs.push((a, b));
        }
    }
    for (a, b) in pairs {
        let (u, ins) = disjoint_union(&[a, b]).unwrap();
        let n = u.num_states();
        for (i, m) in [a, b].into_iter().enumerate() {
            for s in 0..m.num_states() {
                let w = ins[i].map[s];
                for z in all_subsets(n) {
                    let preimage = StateSet::from_indices(
                        m.num_states(),
                        (0..m.num_states()).filter(|&x| z.contains(ins[i].map[x])),
                    );
                    assert_eq!(
                        u.contains_neighborhood(w, &z),
                        m.contains_neighborhood(s, &preimage)
                    );
                }
            }
        }
    }
}

#[test]
fn kripke_examples() {
    // edges {(a,b)} over two states
    let k = KripkeModel {
        names: vec!["a".into(), "b".into()],
        edges: BTreeSet::from([(0, 1)]),
        valuation: BTreeMap::new(),
    };
    let m = from_kripke(&k);
    assert_eq!(m.generators(0), &[StateSet::from_indices(2, [1])]);
    assert_eq!(m.generators(1), &[StateSet::empty(2)]);

    // edgeless single state: everything is a neighborhood
    let lone = KripkeModel {
        names: vec!["a".into()],
        edges: BTreeSet::new(),
        valuation: BTreeMap::new(),
    };
    assert_eq!(from_kripke(&lone).upward_closure(0).unwrap().len(), 2);

    // complete 2-state graph
    let complete = KripkeModel {
        names: vec!["a".into(), "b".into()],
        edges: BTreeSet::from([(0, 0), (0, 1), (1, 0), (1, 1)]),
        valuation: BTreeMap::new(),
    };
    let mc = from_kripke(&complete);
    assert_eq!(mc.generators(0), &[StateSet::full(2)]);
    assert_eq!(mc.generators(1), &[StateSet::full(2)]);
}

#[test]
fn to_kripke_examples() {
    let m = m1();
    let k = to_kripke(&m);
    // s0 sees s1; s1 has no generators, so it sees everything
    assert_eq!(k.edges, BTreeSet::from([(0, 1), (1, 0), (1, 1)]));

    // intersection of two generators
    let m2 = NeighborhoodModel::new(
        vec!["a".into(), "b".into(), "u".into()],
        BTreeMap::from([(
            "u".into(),
            vec![vec!["a".into()], vec!["b".into()]],
        )]),
        BTreeMap::new(),
    )
    .unwrap();
    let k2 = to_kripke(&m2);
    let u = m2.state_index("u").unwrap();
    assert!(k2.edges.iter().all(|&(x, _)| x != u));
}

#[test]
fn kripke_roundtrip() {
    for seed in 0..20 {
        let k = random_kripke(4, &vocab(&["p"]), 0.4, seed);
        assert_eq!(to_kripke(&from_kripke(&k)), k);
    }
}

#[test]
fn enumeration_counts() {
    assert_eq!(antichains(1).len(), 3);
    assert_eq!(antichains(2).len(), 6);
    assert_eq!(antichains(3).len(), 20);
    assert_eq!(enumerate_models(1, &vocab(&["p"])).unwrap().count(), 6);
    assert_eq!(enumerate_models(2, &vocab(&["p"])).unwrap().count(), 144);
    assert_eq!(enumerate_models(1, &vocab(&[])).unwrap().count(), 3);
    assert!(enumerate_models(4, &vocab(&[])).is_err());
}

#[test]
fn enumeration_yields_distinct_models() {
    let models: Vec<NeighborhoodModel> =
        enumerate_models(2, &vocab(&["p"])).unwrap().collect();
    for (i, a) in models.iter().enumerate() {
        for b in &models[i + 1..] {
            assert_ne!(a, b);
        }
    }
}

#[test]
fn random_model_properties() {
    let d = Density::default();
    let a = random_model(5, &vocab(&["p", "q"]), &d, 42);
    let b = random_model(5, &vocab(&["p", "q"]), &d, 42);
    assert_eq!(a, b);
    assert!(a.validate().is_ok());

    let sparse = Density {
        gens_per_state: 0.0,
        ..d
    };
    let empty = random_model(4, &vocab(&["p"]), &sparse, 7);
    assert!((0..4).all(|s| empty.generators(s).is_empty()));
}

#[test]
fn document_roundtrip() {
    let doc = read_model(M1_DOC.as_bytes()).unwrap();
    assert_eq!(doc.model, m1());
    assert_eq!(doc.point, doc.model.state_index("s0"));
    assert_eq!(write_model(&doc), M1_DOC.as_bytes());

    let bad = r#"{"states":["s0","s1"],"neighborhoods":{"s0":[["s1"],["s0","s1"]],"s1":[]},"valuation":{}}"#;
    assert!(matches!(
        read_model(bad.as_bytes()),
        Err(ModelError::Invalid(_))
    ));

    assert!(matches!(
        read_model(b"not json"),
        Err(ModelError::Json(_))
    ));

    for seed in 0..20 {
        let m = random_model(3, &vocab(&["p"]), &Density::default(), seed);
        let doc = ModelDocument {
            model: m.clone(),
            point: Some(0),
            provenance: None,
        };
        let back = read_model(&write_model(&doc)).unwrap();
        assert_eq!(back.model, m);
        assert_eq!(back.point, Some(0));
    }
}

#[test]
fn valuation_mentions_every_prop_on_write() {
    let m = NeighborhoodModel::new(
        vec!["s0".into()],
        BTreeMap::new(),
        BTreeMap::from([("p".into(), vec![])]),
    )
    .unwrap();
    let bytes = write_model(&ModelDocument {
        model: m.clone(),
        point: None,
        provenance: None,
    });
    let back = read_model(&bytes).unwrap();
    assert_eq!(back.model.vocabulary(), vocab(&["p"]));
    assert_eq!(back.model, m);
    let _ = var("p");
}
