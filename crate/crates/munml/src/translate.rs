//! The two syntactic translations and the finite universe they run against.
//!
//! `eq_formula` pins a second-order variable to a modal formula's extension;
//! `to_nmso` wraps it into a membership statement for the designated point.
//! `eliminate_global` removes the global modalities from a formula by
//! solving one evaluation game over a universe model that realizes, up to
//! bisimilarity, every pointed model below a size bound: a boxed-universal
//! subformula becomes ⊤ when its argument is won at every universe point and
//! ⊥ otherwise, a boxed-existential one becomes ⊤ when it is won somewhere.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bisim::{greatest_bisimulation, Pairs};
use crate::denotation::{eval_mu, EvalError};
use crate::game::{build_arena, solve, Arena, GameError, Player, Solution};
use crate::model::{
    disjoint_union, enumerate_models, random_model, Density, GuardError, ModelError,
    NeighborhoodModel, Provenance,
};
use crate::set::{all_subsets, StateSet};
use crate::syntax::{
    fresh_or_base, rename_free, subformulas, MuFormula, NmsoFormula, Var,
};

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error("formula contains a global modality")]
    GlobalModality,
    #[error("formula is not well-named")]
    NotWellNamed,
    #[error("target variable `{0}` occurs in the formula")]
    TargetNotFresh(String),
    #[error("model has {states} states, universe only covers up to {bound}")]
    CoverageExceeded { states: usize, bound: usize },
    #[error("model vocabulary differs from the universe vocabulary")]
    VocabularyMismatch,
    #[error(transparent)]
    Guard(#[from] GuardError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

// ---------------------------------------------------------------------------
// Eq and c
// ---------------------------------------------------------------------------

/// `eq_formula(f, p)` holds at a pointed model iff the value of `p` is
/// exactly the extension of `f`. Requires a well-named, global-modality-free
/// `f` and a `p` not occurring in it.
pub fn eq_formula(f: &MuFormula, p: &Var) -> Result<NmsoFormula, TranslateError> {
    if !f.is_global_free() {
        return Err(TranslateError::GlobalModality);
    }
    if !f.is_well_named() {
        return Err(TranslateError::NotWellNamed);
    }
    if f.all_names().contains(p.name()) {
        return Err(TranslateError::TargetNotFresh(p.name().to_string()));
    }
    let mut used = f.all_names();
    used.insert(p.name().to_string());
    Ok(eq_in(f, p, &mut used))
}

/// `p` and `q` agree on all singletons below them; pins membership pointwise.
fn pointwise(p: &Var, rhs: impl Fn(&Var) -> NmsoFormula, used: &mut BTreeSet<String>) -> NmsoFormula {
    let w = fresh_or_base("w", used);
    NmsoFormula::forall(
        w.clone(),
        NmsoFormula::implies(
            NmsoFormula::Sing(w.clone()),
            NmsoFormula::iff(NmsoFormula::Sub(w.clone(), p.clone()), rhs(&w)),
        ),
    )
}

/// The value of `c` is the complement of the value of `r`.
fn complement_of(c: &Var, r: &Var, used: &mut BTreeSet<String>) -> NmsoFormula {
    pointwise(
        c,
        |w| NmsoFormula::not(NmsoFormula::Sub(w.clone(), r.clone())),
        used,
    )
}

fn eq_in(f: &MuFormula, p: &Var, used: &mut BTreeSet<String>) -> NmsoFormula {
    match f {
        MuFormula::Atom(q) => NmsoFormula::Eqv(p.clone(), q.clone()),
        MuFormula::NegAtom(q) => complement_of(p, q, used),
        MuFormula::Top => pointwise(p, |w| NmsoFormula::Sub(w.clone(), w.clone()), used),
        MuFormula::Bot => NmsoFormula::Empty(p.clone()),
        MuFormula::And(a, b) | MuFormula::Or(a, b) => {
            let conjunctive = matches!(f, MuFormula::And(..));
            let r1 = fresh_or_base("r", used);
            let r2 = fresh_or_base("r", used);
            let member = pointwise(
                p,
                |w| {
                    let left = NmsoFormula::Sub(w.clone(), r1.clone());
                    let right = NmsoFormula::Sub(w.clone(), r2.clone());
                    if conjunctive {
                        NmsoFormula::and(left, right)
                    } else {
                        NmsoFormula::or(left, right)
                    }
                },
                used,
            );
            let eq1 = eq_in(a, &r1, used);
            let eq2 = eq_in(b, &r2, used);
            NmsoFormula::exists(
                r1.clone(),
                NmsoFormula::exists(r2, NmsoFormula::and(eq1, NmsoFormula::and(eq2, member))),
            )
        }
        MuFormula::Box(a) => {
            // ∀q(q ⊆ p ↔ ∃r(Eq(a, r) ∧ box(q, r)))
            let q = fresh_or_base("q", used);
            let r = fresh_or_base("r", used);
            let eq = eq_in(a, &r, used);
            NmsoFormula::forall(
                q.clone(),
                NmsoFormula::iff(
                    NmsoFormula::Sub(q.clone(), p.clone()),
                    NmsoFormula::exists(
                        r.clone(),
                        NmsoFormula::and(eq, NmsoFormula::BoxRel(q, r)),
                    ),
                ),
            )
        }
        MuFormula::Dia(a) => {
            // through complements: u satisfies the diamond iff the complement
            // of a's extension is not a neighborhood of u
            let r = fresh_or_base("r", used);
            let rc = fresh_or_base("r", used);
            let eq = eq_in(a, &r, used);
            let co = complement_of(&rc, &r, used);
            let member = pointwise(
                p,
                |w| NmsoFormula::not(NmsoFormula::BoxRel(w.clone(), rc.clone())),
                used,
            );
            NmsoFormula::exists(
                r,
                NmsoFormula::exists(rc.clone(), NmsoFormula::and(eq, NmsoFormula::and(co, member))),
            )
        }
        MuFormula::Mu(q, body) | MuFormula::Nu(q, body) => {
            let least = matches!(f, MuFormula::Mu(..));
            // p is a fixpoint of the body ...
            let fixed = eq_in(&rename_free(body, q, p), p, used);
            // ... and every fixpoint bounds it from the right side
            let other = fresh_or_base(p.name(), used);
            let other_fixed = eq_in(&rename_free(body, q, &other), &other, used);
            let bound = if least {
                NmsoFormula::Sub(p.clone(), other.clone())
            } else {
                NmsoFormula::Sub(other.clone(), p.clone())
            };
            NmsoFormula::and(
                fixed,
                NmsoFormula::forall(other, NmsoFormula::implies(other_fixed, bound)),
            )
        }
        MuFormula::GBox(_) | MuFormula::GDia(_) => {
            unreachable!("checked global-free before recursing")
        }
    }
}

/// The membership translation: `c(f) = ∃p∃q(sr(q) ∧ q ⊆ p ∧ Eq(f, p))`
/// holds at a pointed model iff the point satisfies `f`.
pub fn to_nmso(f: &MuFormula) -> Result<NmsoFormula, TranslateError> {
    if !f.is_global_free() {
        return Err(TranslateError::GlobalModality);
    }
    if !f.is_well_named() {
        return Err(TranslateError::NotWellNamed);
    }
    let mut used = f.all_names();
    let p = fresh_or_base("p", &mut used);
    let eq = eq_in(f, &p, &mut used);
    let q = fresh_or_base("q", &mut used);
    Ok(NmsoFormula::exists(
        p.clone(),
        NmsoFormula::exists(
            q.clone(),
            NmsoFormula::and(
                NmsoFormula::and(NmsoFormula::Sr(q.clone()), NmsoFormula::Sub(q, p)),
                eq,
            ),
        ),
    ))
}

// ---------------------------------------------------------------------------
// the universe
// ---------------------------------------------------------------------------

/// A disjoint union of every model with at most `max_states` states over a
/// vocabulary: each such pointed model is bisimilar to one of its points.
#[derive(Clone, Debug)]
pub struct UniverseModel {
    pub model: NeighborhoodModel,
    pub provenance: Provenance,
}

impl UniverseModel {
    pub fn bound(&self) -> usize {
        self.provenance.max_states
    }

    pub fn vocab(&self) -> BTreeSet<Var> {
        self.provenance
            .vocab
            .iter()
            .map(|n| Var::new(n).expect("stored vocabulary is valid"))
            .collect()
    }
}

pub const DEFAULT_UNIVERSE_BOUND: usize = 2;
pub const DEFAULT_UNIVERSE_VOCAB: usize = 1;

pub fn build_universe(
    max_states: usize,
    vocab: &BTreeSet<Var>,
) -> Result<UniverseModel, GuardError> {
    if max_states > DEFAULT_UNIVERSE_BOUND {
        return Err(GuardError(format!(
            "universe bound {max_states} exceeds the default of {DEFAULT_UNIVERSE_BOUND}; force to override"
        )));
    }
    if vocab.len() > DEFAULT_UNIVERSE_VOCAB {
        return Err(GuardError(format!(
            "universe vocabulary of {} exceeds the default of {DEFAULT_UNIVERSE_VOCAB}; force to override",
            vocab.len()
        )));
    }
    build_universe_forced(max_states, vocab)
}

/// Universe construction without the default guard (the enumeration guard
/// still applies).
pub fn build_universe_forced(
    max_states: usize,
    vocab: &BTreeSet<Var>,
) -> Result<UniverseModel, GuardError> {
    if max_states == 0 {
        return Err(GuardError("universe bound must be at least 1".into()));
    }
    let mut summands = Vec::new();
    for k in 1..=max_states {
        summands.extend(enumerate_models(k, vocab)?);
    }
    let refs: Vec<&NeighborhoodModel> = summands.iter().collect();
    let (model, _) = disjoint_union(&refs).expect("summands share the vocabulary");
    Ok(UniverseModel {
        model,
        provenance: Provenance {
            max_states,
            vocab: vocab.iter().map(|v| v.name().to_string()).collect(),
        },
    })
}

// ---------------------------------------------------------------------------
// the translation t
// ---------------------------------------------------------------------------

/// One translated subformula: its winning universe points and its image.
#[derive(Clone, Debug)]
pub struct TableEntry {
    pub source: MuFormula,
    pub translated: MuFormula,
    pub winning: StateSet,
}

/// The translation table of a fixed well-named formula: one entry per
/// subformula, with the verifier's winning universe points cached from the
/// single game solved over the universe.
#[derive(Clone, Debug)]
pub struct TranslationTable {
    pub entries: Vec<TableEntry>,
}

impl TranslationTable {
    pub fn lookup(&self, sub: &MuFormula) -> Option<&TableEntry> {
        self.entries.iter().find(|e| &e.source == sub)
    }
}

/// Replaces every global-modality subformula by ⊤ or ⊥ according to the
/// winning regions of the evaluation game over the universe. The result is
/// global-modality-free, well-named, and commutes with binding definitions
/// for every surviving bound variable.
pub fn eliminate_global(
    f: &MuFormula,
    universe: &UniverseModel,
) -> Result<(MuFormula, TranslationTable), TranslateError> {
    let arena = build_arena(&universe.model, f)?;
    let solution = solve(&arena);
    let subs = subformulas(f);
    let n = universe.model.num_states();

    let winning_of = |arena: &Arena, solution: &Solution, sub: usize| -> StateSet {
        StateSet::from_indices(
            n,
            (0..n).filter(|&u| solution.winner[arena.basic(u, sub)] == Player::Exists),
        )
    };

    let mut winning: BTreeMap<&MuFormula, StateSet> = BTreeMap::new();
    for (i, sub) in subs.iter().enumerate() {
        winning.insert(sub, winning_of(&arena, &solution, i));
    }

    fn translate(f: &MuFormula, winning: &BTreeMap<&MuFormula, StateSet>) -> MuFormula {
        match f {
            MuFormula::Atom(_) | MuFormula::NegAtom(_) | MuFormula::Top | MuFormula::Bot => {
                f.clone()
            }
            MuFormula::And(l, r) => {
                MuFormula::and(translate(l, winning), translate(r, winning))
            }
            MuFormula::Or(l, r) => MuFormula::or(translate(l, winning), translate(r, winning)),
            MuFormula::Box(a) => MuFormula::boxed(translate(a, winning)),
            MuFormula::Dia(a) => MuFormula::dia(translate(a, winning)),
            MuFormula::GBox(a) => {
                if winning[&**a].is_full() {
                    MuFormula::Top
                } else {
                    MuFormula::Bot
                }
            }
            MuFormula::GDia(a) => {
                if winning[&**a].is_empty() {
                    MuFormula::Bot
                } else {
                    MuFormula::Top
                }
            }
            MuFormula::Mu(v, b) => MuFormula::mu(v.clone(), translate(b, winning)),
            MuFormula::Nu(v, b) => MuFormula::nu(v.clone(), translate(b, winning)),
        }
    }

    let entries = subs
        .iter()
        .map(|sub| TableEntry {
            source: sub.clone(),
            translated: translate(sub, &winning),
            winning: winning[sub].clone(),
        })
        .collect();
    let image = translate(f, &winning);
    Ok((image, TranslationTable { entries }))
}

// ---------------------------------------------------------------------------
// the main lemma at desk scale
// ---------------------------------------------------------------------------

/// Pointwise comparison of `t(f)` on a model against `f` on the universe
/// extended by that model.
#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub translated: MuFormula,
    pub agreements: usize,
    pub mismatches: Vec<String>,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks that a state satisfies the translation in the model alone iff its
/// copy satisfies the original in the universe extended by the model. Only
/// models covered by the universe's provenance qualify.
pub fn main_lemma_check(
    f: &MuFormula,
    model: &NeighborhoodModel,
    universe: &UniverseModel,
) -> Result<LemmaReport, TranslateError> {
    if model.num_states() > universe.bound() {
        return Err(TranslateError::CoverageExceeded {
            states: model.num_states(),
            bound: universe.bound(),
        });
    }
    if !model.same_vocabulary(&universe.model) {
        return Err(TranslateError::VocabularyMismatch);
    }
    let (translated, _) = eliminate_global(f, universe)?;
    let (extended, insertions) = disjoint_union(&[&universe.model, model])?;

    let on_model = eval_mu(model, &translated)?;
    let on_extended = eval_mu(&extended, f)?;

    let mut agreements = 0;
    let mut mismatches = Vec::new();
    for s in 0..model.num_states() {
        let copy = insertions[1].map[s];
        if on_model.contains(s) == on_extended.contains(copy) {
            agreements += 1;
        } else {
            mismatches.push(model.state_name(s).to_string());
        }
    }
    Ok(LemmaReport {
        translated,
        agreements,
        mismatches,
    })
}

/// The full relation witnessing that the universe absorbs a covered model:
/// identity on the universe part of `universe + model`, plus the greatest
/// bisimulation between the model and the universe, both lifted through the
/// insertions. Pairs relate states of `universe + model` to universe states.
pub fn universe_absorption_relation(
    universe: &UniverseModel,
    model: &NeighborhoodModel,
) -> Result<(NeighborhoodModel, Pairs), TranslateError> {
    if model.num_states() > universe.bound() {
        return Err(TranslateError::CoverageExceeded {
            states: model.num_states(),
            bound: universe.bound(),
        });
    }
    let (extended, insertions) = disjoint_union(&[&universe.model, model])?;
    let mut pairs: Pairs = (0..universe.model.num_states())
        .map(|u| (insertions[0].map[u], u))
        .collect();
    let greatest = greatest_bisimulation(model, &universe.model)
        .map_err(|_| TranslateError::VocabularyMismatch)?;
    for (s, u) in greatest {
        pairs.insert((insertions[1].map[s], u));
    }
    Ok((extended, pairs))
}

// ---------------------------------------------------------------------------
// invariance probing
// ---------------------------------------------------------------------------

/// A bisimilar pair on which the formula disagrees.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub left: NeighborhoodModel,
    pub left_point: usize,
    pub right: NeighborhoodModel,
    pub right_point: usize,
    pub left_holds: bool,
    pub right_holds: bool,
}

/// Outcome of sampling bisimilar pairs. Agreement on every sample is
/// evidence of invariance, not a proof; a counterexample is a refutation.
#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub pairs_checked: usize,
    pub counterexample: Option<Counterexample>,
}

/// Evaluates the formula across constructed bisimilar pairs: insertions into
/// disjoint unions (exhaustive over one-state summands, then random) and
/// duplicate-state quotient witnesses.
pub fn invariance_probe(
    f: &MuFormula,
    samples: usize,
    seed: u64,
) -> Result<ProbeReport, TranslateError> {
    let vocab: BTreeSet<Var> = f.free_vars();
    let mut checked = 0;

    let mut try_pair = |left: &NeighborhoodModel,
                        left_point: usize,
                        right: &NeighborhoodModel,
                        right_point: usize|
     -> Result<Option<Counterexample>, TranslateError> {
        let left_holds = eval_mu(left, f)?.contains(left_point);
        let right_holds = eval_mu(right, f)?.contains(right_point);
        checked += 1;
        if left_holds != right_holds {
            Ok(Some(Counterexample {
                left: left.clone(),
                left_point,
                right: right.clone(),
                right_point,
                left_holds,
                right_holds,
            }))
        } else {
            Ok(None)
        }
    };

    // exhaustive one-state battery: a point is bisimilar to its copy in any
    // disjoint union containing it
    let ones: Vec<NeighborhoodModel> = enumerate_models(1, &vocab)?.collect();
    for a in &ones {
        for b in &ones {
            let (union, ins) = disjoint_union(&[a, b])?;
            if let Some(ce) = try_pair(a, 0, &union, ins[0].map[0])? {
                return Ok(ProbeReport {
                    pairs_checked: checked,
                    counterexample: Some(ce),
                });
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let density = Density::default();
    for _ in 0..samples {
        let n = rng.random_range(1..=3);
        let m = random_model(n, &vocab, &density, rng.random());
        let m2 = random_model(rng.random_range(1..=3), &vocab, &density, rng.random());
        let s = rng.random_range(0..n);

        let (union, ins) = disjoint_union(&[&m, &m2])?;
        if let Some(ce) = try_pair(&m, s, &union, ins[0].map[s])? {
            return Ok(ProbeReport {
                pairs_checked: checked,
                counterexample: Some(ce),
            });
        }

        let (dup, orig_point, dup_point) = duplicate_state(&m, s);
        if let Some(ce) = try_pair(&m, orig_point, &dup, dup_point)? {
            return Ok(ProbeReport {
                pairs_checked: checked,
                counterexample: Some(ce),
            });
        }
    }

    Ok(ProbeReport {
        pairs_checked: checked,
        counterexample: None,
    })
}

/// Clones state `x` into a fresh twin with the same generators and atomic
/// facts; the original point and its twin are bisimilar.
pub fn duplicate_state(m: &NeighborhoodModel, x: usize) -> (NeighborhoodModel, usize, usize) {
    let mut twin = format!("{}'", m.state_name(x));
    while m.state_index(&twin).is_some() {
        twin.push('\'');
    }

    let mut names: Vec<String> = m.state_names().to_vec();
    names.push(twin.clone());
    names.sort();
    let new_index = |name: &str| names.binary_search_by(|n| n.as_str().cmp(name)).unwrap();
    let n = names.len();

    let mut gens = vec![Vec::new(); n];
    for s in 0..m.num_states() {
        let family: Vec<StateSet> = m
            .generators(s)
            .iter()
            .map(|g| {
                StateSet::from_indices(n, g.iter().map(|u| new_index(m.state_name(u))))
            })
            .collect();
        gens[new_index(m.state_name(s))] = family.clone();
        if s == x {
            gens[new_index(&twin)] = family;
        }
    }
    let mut sorted_gens = gens;
    for family in &mut sorted_gens {
        family.sort_by_cached_key(StateSet::canonical_key);
    }

    let mut valuation = BTreeMap::new();
    for p in m.vocabulary() {
        let old = m.valuation(&p).cloned().unwrap_or_else(|| StateSet::empty(m.num_states()));
        let mut set = StateSet::from_indices(n, old.iter().map(|u| new_index(m.state_name(u))));
        if old.contains(x) {
            set.insert(new_index(&twin));
        }
        valuation.insert(p.clone(), set);
    }

    let out = NeighborhoodModel::from_parts(names.clone(), sorted_gens, valuation);
    let x_new = out.state_index(m.state_name(x)).unwrap();
    let twin_new = out.state_index(&twin).unwrap();
    (out, x_new, twin_new)
}

/// All assignments of a variable over a model's subsets, for oracle loops.
pub fn subsets_of(m: &NeighborhoodModel) -> Vec<StateSet> {
    all_subsets(m.num_states())
}

#[cfg(test)]
mod tests;
