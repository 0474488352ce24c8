use super::*;
use crate::model::{enumerate_models, NeighborhoodModel};
use crate::syntax::{atom, desugar_nmso, negate, parse_mu, parse_nmso, well_name};
use crate::testutil::{m1, var, vocab};
use std::collections::BTreeMap as Map;

fn ext(m: &NeighborhoodModel, text: &str) -> StateSet {
    eval_mu(m, &parse_mu(text).unwrap()).unwrap()
}

fn names(m: &NeighborhoodModel, s: &StateSet) -> Vec<String> {
    s.iter().map(|i| m.state_name(i).to_string()).collect()
}

#[test]
fn eval_mu_examples() {
    let m = m1();
    assert_eq!(names(&m, &ext(&m, "[]p")), ["s0"]);
    assert_eq!(names(&m, &ext(&m, "<>p")), ["s0", "s1"]);
    assert!(ext(&m, "mu r. []r").is_empty());
    assert!(ext(&m, "true").is_full());
    assert!(ext(&m, "[E]p").is_full());
    assert!(ext(&m, "[A]p").is_empty());
}

#[test]
fn eval_mu_rejects_unknown_variables() {
    assert!(matches!(
        eval_mu(&m1(), &atom("nope")),
        Err(EvalError::UnboundVariable(_))
    ));
}

#[test]
fn approximant_chain_shape() {
    for (k, m) in enumerate_models(2, &vocab(&["p"])).unwrap().enumerate() {
        let f = parse_mu("mu r. []r \\/ []p").unwrap();
        let chain = approximants(&m, &f, 100).unwrap();
        assert!(chain.len() <= m.num_states() + 1, "model #{k}");
        for w in chain.windows(2) {
            assert!(w[0].is_subset(&w[1]));
        }
        assert_eq!(chain.last().unwrap(), &eval_mu(&m, &f).unwrap());
    }
}

#[test]
fn finite_unfolding_is_a_lower_bound() {
    // Each disjunct of the unfolding implies the fixpoint, so the truncated
    // disjunction is contained in it on every model.
    for m in enumerate_models(2, &vocab(&["q"])).unwrap() {
        let fix = ext(&m, "mu r. []r \\/ []q");
        let unfolding = ext(&m, "[]q \\/ [][]q");
        assert!(unfolding.is_subset(&fix));
    }
}

/// The reverse inclusion fails: uniform-depth unfoldings cannot mimic a
/// strategy whose depth varies across branches. Three states suffice.
#[test]
fn finite_unfolding_is_strictly_weaker() {
    let m = NeighborhoodModel::new(
        vec!["a".into(), "b".into(), "s".into()],
        Map::from([
            ("a".into(), vec![vec!["s".into()]]),
            ("b".into(), vec![vec!["a".into()]]),
            ("s".into(), vec![vec!["a".into(), "b".into()]]),
        ]),
        Map::from([("q".into(), vec!["s".into()])]),
    )
    .unwrap();
    let fix = ext(&m, "mu r. []r \\/ []q");
    let unfolding = ext(&m, "[]q \\/ [][]q \\/ [][][]q");
    assert!(fix.is_full());
    assert_eq!(names(&m, &unfolding), ["a", "b"]);
}

#[test]
fn fixpoints_are_fixpoints() {
    let formulas = ["mu r. []r \\/ []p", "nu r. p /\\ <>r", "mu r. <>r \\/ p"];
    for (k, m) in enumerate_models(2, &vocab(&["p"])).unwrap().enumerate() {
        for text in formulas {
            let f = parse_mu(text).unwrap();
            let (MuFormula::Mu(v, body) | MuFormula::Nu(v, body)) = &f else {
                unreachable!()
            };
            let fix = eval_mu(&m, &f).unwrap();
            let mut env = Map::new();
            env.insert(v.clone(), fix.clone());
            let once_more = eval_mu_in(&m, body, &env).unwrap();
            assert_eq!(once_more, fix, "model #{k}, {text}");
        }
    }
}

#[test]
fn bodies_are_monotone_in_the_variable() {
    let body = parse_mu("[]r \\/ <>(p /\\ r)").unwrap();
    let r = var("r");
    for m in enumerate_models(2, &vocab(&["p"])).unwrap() {
        let subsets = crate::set::all_subsets(m.num_states());
        for z in &subsets {
            for z2 in &subsets {
                if z.is_subset(z2) {
                    let small = eval_mu_in(&m, &body, &Map::from([(r.clone(), z.clone())])).unwrap();
                    let large = eval_mu_in(&m, &body, &Map::from([(r.clone(), z2.clone())])).unwrap();
                    assert!(small.is_subset(&large));
                }
            }
        }
    }
}

#[test]
fn box_dia_duality() {
    let arguments = ["p", "p /\\ q", "<>p", "mu r. []r \\/ p"];
    for m in enumerate_models(2, &vocab(&["p", "q"])).unwrap().step_by(13) {
        for text in arguments {
            let f = parse_mu(text).unwrap();
            let dia = eval_mu(&m, &MuFormula::dia(f.clone())).unwrap();
            let box_neg = eval_mu(&m, &MuFormula::boxed(negate(&f))).unwrap();
            assert_eq!(dia, box_neg.complement());
        }
    }
}

#[test]
fn negation_complements_the_extension() {
    let formulas = [
        "[]p",
        "mu p. <>p",
        "nu q. []q /\\ p",
        "[A]p \\/ <>~p",
        "mu r. []r \\/ []p",
    ];
    for m in enumerate_models(2, &vocab(&["p"])).unwrap() {
        for text in formulas {
            let f = well_name(&parse_mu(text).unwrap());
            let pos = eval_mu(&m, &f).unwrap();
            let neg = eval_mu(&m, &negate(&f)).unwrap();
            assert_eq!(neg, pos.complement(), "{text}");
        }
    }
}

#[test]
fn well_naming_preserves_extensions() {
    let formulas = [
        "(mu p. []p) /\\ (mu p. <>p)",
        "p \\/ (mu p. []p)",
        "mu x. (nu x. p /\\ []x) \\/ <>x",
    ];
    for m in enumerate_models(2, &vocab(&["p"])).unwrap() {
        for text in formulas {
            let f = parse_mu(text).unwrap();
            let g = well_name(&f);
            assert_eq!(eval_mu(&m, &f).unwrap(), eval_mu(&m, &g).unwrap(), "{text}");
        }
    }
}

// ---------------------------------------------------------------------------
// second-order evaluation
// ---------------------------------------------------------------------------

fn m1_with_q(q_states: &[&str]) -> NeighborhoodModel {
    NeighborhoodModel::new(
        vec!["s0".into(), "s1".into()],
        Map::from([("s0".into(), vec![vec!["s1".into()]])]),
        Map::from([
            ("p".into(), vec!["s1".into()]),
            ("q".into(), q_states.iter().map(|s| s.to_string()).collect()),
        ]),
    )
    .unwrap()
}

fn holds(m: &NeighborhoodModel, point: &str, text: &str) -> bool {
    let pm = PointedModel {
        model: m,
        point: m.state_index(point).unwrap(),
    };
    eval_nmso(pm, &parse_nmso(text).unwrap()).unwrap()
}

#[test]
fn eval_nmso_examples() {
    let m = m1_with_q(&["s0"]);
    assert!(holds(&m, "s0", "sr(q)"));
    assert!(!holds(&m, "s1", "sr(q)"));
    assert!(holds(&m, "s0", "box(q, p)"));
    assert!(holds(&m, "s0", "exists r. p <= r"));
    let wide = m1_with_q(&["s0", "s1"]);
    assert!(!holds(&wide, "s0", "box(q, p)"));
}

#[test]
fn sing_example() {
    let cases = [(vec!["s0"], true), (vec![], false), (vec!["s0", "s1"], false)];
    for (states, expected) in cases {
        let m = m1_with_q(&states.iter().copied().collect::<Vec<_>>());
        assert_eq!(holds(&m, "s0", "sing(q)"), expected, "{states:?}");
    }
}

#[test]
fn sugar_agrees_with_its_desugaring() {
    let texts = [
        "sing(q)",
        "empty(q)",
        "eqv(p, q)",
        "forall r. (q <= r -> (empty(r) | eqv(r, q)))",
        "(sr(q) <-> sing(q))",
    ];
    let models = [m1_with_q(&[]), m1_with_q(&["s0"]), m1_with_q(&["s0", "s1"])];
    for m in &models {
        for point in ["s0", "s1"] {
            let pm = PointedModel {
                model: m,
                point: m.state_index(point).unwrap(),
            };
            for text in texts {
                let f = parse_nmso(text).unwrap();
                let core = desugar_nmso(&f);
                assert_eq!(
                    eval_nmso(pm, &f).unwrap(),
                    eval_nmso(pm, &core).unwrap(),
                    "{text} at {point}"
                );
            }
        }
    }
}

#[test]
fn nmso_mu_agreement_on_atoms() {
    // s satisfies the proposition iff the second-order rendering holds at s
    for m in enumerate_models(2, &vocab(&["p"])).unwrap() {
        let ext = eval_mu(&m, &atom("p")).unwrap();
        for s in 0..m.num_states() {
            let pm = PointedModel { model: &m, point: s };
            let f = parse_nmso("exists r. (sr(r) & r <= p)").unwrap();
            assert_eq!(eval_nmso(pm, &f).unwrap(), ext.contains(s));
        }
    }
}

#[test]
fn nmso_guards() {
    let m = crate::model::random_model(13, &vocab(&["p"]), &Default::default(), 3);
    let pm = PointedModel { model: &m, point: 0 };
    assert!(matches!(
        eval_nmso(pm, &parse_nmso("sr(p)").unwrap()),
        Err(EvalError::Guard(_))
    ));

    let m = m1();
    let pm = PointedModel { model: &m, point: 0 };
    let deep = "exists a. exists b. exists c. exists d. exists e. exists f. exists g. exists h. exists i. a <= b";
    assert!(matches!(
        eval_nmso(pm, &parse_nmso(deep).unwrap()),
        Err(EvalError::Guard(_))
    ));
}
