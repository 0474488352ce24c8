//! Finite monotone neighborhood models.
//!
//! A model stores, per state, the antichain of ⊆-minimal neighborhoods (its
//! *generators*); the full neighborhood family is the upward closure of the
//! generators and is never materialized except as a test oracle. States are
//! kept sorted by name, generator lists are kept in canonical order, so two
//! models are equal iff their documents are byte-identical.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::set::{all_subsets, StateSet};
use crate::syntax::Var;

/// Hard bound for explicit upward-closure computations.
pub const DEFAULT_CLOSURE_BOUND: usize = 12;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed model document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid model:\n{}", .0.join("\n"))]
    Invalid(Vec<String>),
    #[error("models do not share a vocabulary")]
    VocabularyMismatch,
    #[error("empty model list")]
    EmptyUnion,
}

#[derive(Debug, Error)]
#[error("guard exceeded: {0}")]
pub struct GuardError(pub String);

/// A finite monotone neighborhood model, represented by generator antichains.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NeighborhoodModel {
    names: Vec<String>,
    gens: Vec<Vec<StateSet>>,
    valuation: BTreeMap<Var, StateSet>,
}

/// A model together with a designated state.
#[derive(Clone, Copy, Debug)]
pub struct PointedModel<'a> {
    pub model: &'a NeighborhoodModel,
    pub point: usize,
}

impl NeighborhoodModel {
    /// Builds a model from named parts, canonicalizes and validates it.
    pub fn new(
        states: Vec<String>,
        neighborhoods: BTreeMap<String, Vec<Vec<String>>>,
        valuation: BTreeMap<String, Vec<String>>,
    ) -> Result<Self, ModelError> {
        let mut violations = Vec::new();
        let mut names = states;
        names.sort();
        let before = names.len();
        names.dedup();
        if names.len() != before {
            violations.push("duplicate state names".to_string());
        }
        let index: BTreeMap<&str, usize> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let n = names.len();

        let resolve = |set: &[String], what: &str, violations: &mut Vec<String>| -> StateSet {
            let mut out = StateSet::empty(n);
            for name in set {
                match index.get(name.as_str()) {
                    Some(&i) => out.insert(i),
                    None => violations.push(format!("{what} mentions unknown state `{name}`")),
                }
            }
            out
        };

        let mut gens = vec![Vec::new(); n];
        for (state, family) in &neighborhoods {
            let Some(&s) = index.get(state.as_str()) else {
                violations.push(format!("neighborhoods listed for unknown state `{state}`"));
                continue;
            };
            let mut antichain: Vec<StateSet> = family
                .iter()
                .map(|g| resolve(g, &format!("generator of `{state}`"), &mut violations))
                .collect();
            antichain.sort_by_cached_key(StateSet::canonical_key);
            antichain.dedup();
            gens[s] = antichain;
        }

        let mut val = BTreeMap::new();
        for (name, set) in &valuation {
            match Var::new(name) {
                Ok(var) => {
                    let set = resolve(set, &format!("valuation of `{name}`"), &mut violations);
                    val.insert(var, set);
                }
                Err(e) => violations.push(format!("bad proposition name: {e}")),
            }
        }

        let model = NeighborhoodModel {
            names,
            gens,
            valuation: val,
        };
        match model.validate() {
            Ok(()) if violations.is_empty() => Ok(model),
            Ok(()) => Err(ModelError::Invalid(violations)),
            Err(ModelError::Invalid(mut more)) => {
                violations.append(&mut more);
                Err(ModelError::Invalid(violations))
            }
            Err(e) => Err(e),
        }
    }

    /// Internal constructor for models that are canonical by construction.
    pub(crate) fn from_parts(
        names: Vec<String>,
        gens: Vec<Vec<StateSet>>,
        valuation: BTreeMap<Var, StateSet>,
    ) -> Self {
        debug_assert!(names.windows(2).all(|w| w[0] < w[1]));
        let m = NeighborhoodModel {
            names,
            gens,
            valuation,
        };
        debug_assert!(m.validate().is_ok());
        m
    }

    /// Confirms the representation invariants, listing every violation.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.names.len();
        let mut violations = Vec::new();
        for (s, family) in self.gens.iter().enumerate() {
            for g in family {
                if g.universe() != n {
                    violations.push(format!(
                        "generator of `{}` ranges over {} states, model has {n}",
                        self.names[s],
                        g.universe()
                    ));
                }
            }
            for (i, g) in family.iter().enumerate() {
                for (j, h) in family.iter().enumerate() {
                    if i != j && g.is_subset(h) {
                        violations.push(format!(
                            "antichain violation at `{}`: {} is a subset of {}",
                            self.names[s],
                            self.set_to_string(g),
                            self.set_to_string(h),
                        ));
                    }
                }
            }
        }
        for (v, set) in &self.valuation {
            if set.universe() != n {
                violations.push(format!(
                    "valuation of `{v}` ranges over {} states, model has {n}",
                    set.universe()
                ));
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ModelError::Invalid(violations))
        }
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn state_name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn generators(&self, s: usize) -> &[StateSet] {
        &self.gens[s]
    }

    pub fn vocabulary(&self) -> BTreeSet<Var> {
        self.valuation.keys().cloned().collect()
    }

    pub fn valuation(&self, v: &Var) -> Option<&StateSet> {
        self.valuation.get(v)
    }

    pub fn same_vocabulary(&self, other: &NeighborhoodModel) -> bool {
        self.valuation.keys().eq(other.valuation.keys())
    }

    /// True iff `z` is a neighborhood of `s`, i.e. some generator of `s` is
    /// contained in `z`.
    pub fn contains_neighborhood(&self, s: usize, z: &StateSet) -> bool {
        self.gens[s].iter().any(|g| g.is_subset(z))
    }

    /// The explicit family σ(s), as a sorted list of subsets. Test oracle
    /// only; guarded by [`DEFAULT_CLOSURE_BOUND`].
    pub fn upward_closure(&self, s: usize) -> Result<Vec<StateSet>, GuardError> {
        self.upward_closure_with(s, DEFAULT_CLOSURE_BOUND)
    }

    pub fn upward_closure_with(&self, s: usize, bound: usize) -> Result<Vec<StateSet>, GuardError> {
        let n = self.num_states();
        if n > bound {
            return Err(GuardError(format!(
                "upward closure over {n} states exceeds the bound of {bound}"
            )));
        }
        Ok(all_subsets(n)
            .into_iter()
            .filter(|z| self.contains_neighborhood(s, z))
            .collect())
    }

    fn set_to_string(&self, set: &StateSet) -> String {
        let names: Vec<&str> = set.iter().map(|i| self.names[i].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// The injection of one summand into a disjoint union.
#[derive(Clone, Debug)]
pub struct InsertionMap {
    /// Index of the source model in the union's input list.
    pub source: usize,
    /// `map[u]` is the union state corresponding to source state `u`.
    pub map: Vec<usize>,
}

/// Disjoint union of models over a shared vocabulary. State `u` of summand
/// `i` becomes `"i:u"`; a set is a neighborhood of the copy of `u` exactly
/// when its preimage under the insertion is a neighborhood of `u`.
pub fn disjoint_union(
    ms: &[&NeighborhoodModel],
) -> Result<(NeighborhoodModel, Vec<InsertionMap>), ModelError> {
    let first = *ms.first().ok_or(ModelError::EmptyUnion)?;
    if !ms.iter().all(|m| m.same_vocabulary(first)) {
        return Err(ModelError::VocabularyMismatch);
    }

    let mut tagged: Vec<(String, usize, usize)> = Vec::new(); // (name, model, state)
    for (i, m) in ms.iter().enumerate() {
        for (u, name) in m.state_names().iter().enumerate() {
            tagged.push((format!("{i}:{name}"), i, u));
        }
    }
    tagged.sort();
    let n = tagged.len();
    let names: Vec<String> = tagged.iter().map(|(name, _, _)| name.clone()).collect();

    let mut insertions: Vec<InsertionMap> = ms
        .iter()
        .enumerate()
        .map(|(i, m)| InsertionMap {
            source: i,
            map: vec![usize::MAX; m.num_states()],
        })
        .collect();
    for (w, (_, i, u)) in tagged.iter().enumerate() {
        insertions[*i].map[*u] = w;
    }

    let mut gens = vec![Vec::new(); n];
    for (i, m) in ms.iter().enumerate() {
        for u in 0..m.num_states() {
            let w = insertions[i].map[u];
            let mut family: Vec<StateSet> = m
                .generators(u)
                .iter()
                .map(|g| StateSet::from_indices(n, g.iter().map(|x| insertions[i].map[x])))
                .collect();
            family.sort_by_cached_key(StateSet::canonical_key);
            gens[w] = family;
        }
    }

    let mut valuation = BTreeMap::new();
    for p in first.vocabulary() {
        let mut set = StateSet::empty(n);
        for (i, m) in ms.iter().enumerate() {
            if let Some(v) = m.valuation(&p) {
                for u in v.iter() {
                    set.insert(insertions[i].map[u]);
                }
            }
        }
        valuation.insert(p, set);
    }

    Ok((
        NeighborhoodModel::from_parts(names, gens, valuation),
        insertions,
    ))
}

// ---------------------------------------------------------------------------
// Kripke conversions
// ---------------------------------------------------------------------------

/// A Kripke model: plain edges instead of neighborhood families.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KripkeModel {
    pub names: Vec<String>,
    pub edges: BTreeSet<(usize, usize)>,
    pub valuation: BTreeMap<Var, StateSet>,
}

impl KripkeModel {
    pub fn successors(&self, u: usize) -> StateSet {
        StateSet::from_indices(
            self.names.len(),
            self.edges
                .range((u, 0)..=(u, usize::MAX))
                .map(|&(_, v)| v),
        )
    }
}

/// The neighborhood rendering of a Kripke model: each state gets the single
/// generator `R[u]`, whose up-set is exactly the supersets of the successor
/// set.
pub fn from_kripke(k: &KripkeModel) -> NeighborhoodModel {
    let n = k.names.len();
    let gens = (0..n).map(|u| vec![k.successors(u)]).collect();
    NeighborhoodModel::from_parts(k.names.clone(), gens, k.valuation.clone())
}

/// The Kripke companion: `u` sees the intersection of all of `u`'s
/// neighborhoods. An empty generator family intersects to the full state
/// set.
pub fn to_kripke(m: &NeighborhoodModel) -> KripkeModel {
    let n = m.num_states();
    let mut edges = BTreeSet::new();
    for u in 0..n {
        let mut reach = StateSet::full(n);
        for g in m.generators(u) {
            reach = reach.intersection(g);
        }
        for v in reach.iter() {
            edges.insert((u, v));
        }
    }
    let valuation = m
        .vocabulary()
        .into_iter()
        .map(|p| {
            let set = m.valuation(&p).cloned().unwrap_or_else(|| StateSet::empty(n));
            (p, set)
        })
        .collect();
    KripkeModel {
        names: m.state_names().to_vec(),
        edges,
        valuation,
    }
}

// ---------------------------------------------------------------------------
// enumeration and random generation
// ---------------------------------------------------------------------------

/// All antichains of subsets of an `n`-element set, canonically ordered.
pub fn antichains(n: usize) -> Vec<Vec<StateSet>> {
    assert!(n <= 3, "antichain enumeration over {n} states");
    let subsets = all_subsets(n);
    let m = subsets.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << m) {
        let family: Vec<&StateSet> = (0..m).filter(|i| mask & (1 << i) != 0).map(|i| &subsets[i]).collect();
        let antichain = family
            .iter()
            .all(|g| family.iter().all(|h| g == h || !g.is_subset(h)));
        if antichain {
            out.push(family.into_iter().cloned().collect());
        }
    }
    out
}

/// Exactly one model per (generator assignment, valuation) over canonical
/// state names `s0..`, lazily and restartably.
pub fn enumerate_models(
    n_states: usize,
    vocab: &BTreeSet<Var>,
) -> Result<impl Iterator<Item = NeighborhoodModel> + Clone, GuardError> {
    if n_states > 3 || n_states == 0 {
        return Err(GuardError(format!(
            "model enumeration needs 1..=3 states, got {n_states}"
        )));
    }
    if vocab.len() > 2 {
        return Err(GuardError(format!(
            "model enumeration allows at most 2 propositions, got {}",
            vocab.len()
        )));
    }
    let chains = antichains(n_states);
    let names: Vec<String> = (0..n_states).map(|i| format!("s{i}")).collect();
    let subsets = all_subsets(n_states);
    let vocab: Vec<Var> = vocab.iter().cloned().collect();

    let per_state = chains.len();
    let gen_combos = per_state.pow(n_states as u32);
    let val_combos = subsets.len().pow(vocab.len() as u32);

    Ok((0..gen_combos * val_combos).map(move |counter| {
        let mut g = counter / val_combos;
        let mut v = counter % val_combos;
        let mut gens = Vec::with_capacity(n_states);
        for _ in 0..n_states {
            gens.push(chains[g % per_state].clone());
            g /= per_state;
        }
        let mut valuation = BTreeMap::new();
        for p in &vocab {
            valuation.insert(p.clone(), subsets[v % subsets.len()].clone());
            v /= subsets.len();
        }
        NeighborhoodModel::from_parts(names.clone(), gens, valuation)
    }))
}

/// Knobs for [`random_model`].
#[derive(Clone, Copy, Debug)]
pub struct Density {
    /// Expected number of generator candidates per state.
    pub gens_per_state: f64,
    /// Probability of each state joining a sampled generator.
    pub member_prob: f64,
    /// Probability of each state satisfying each proposition.
    pub valuation_prob: f64,
}

impl Default for Density {
    fn default() -> Self {
        Density {
            gens_per_state: 1.6,
            member_prob: 0.45,
            valuation_prob: 0.5,
        }
    }
}

/// Seed-deterministic random model; sampled generator families are reduced
/// to their minimal elements, so the result always validates.
pub fn random_model(
    n_states: usize,
    vocab: &BTreeSet<Var>,
    density: &Density,
    seed: u64,
) -> NeighborhoodModel {
    assert!(n_states >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names: Vec<String> = (0..n_states).map(|i| format!("s{i}")).collect();
    names.sort();

    let mut gens = Vec::with_capacity(n_states);
    for _ in 0..n_states {
        let whole = density.gens_per_state.floor() as usize;
        let extra = rng.random_bool(density.gens_per_state.fract());
        let count = whole + usize::from(extra);
        let mut candidates: Vec<StateSet> = (0..count)
            .map(|_| {
                StateSet::from_indices(
                    n_states,
                    (0..n_states).filter(|_| rng.random_bool(density.member_prob)),
                )
            })
            .collect();
        candidates.sort_by_cached_key(StateSet::canonical_key);
        candidates.dedup();
        let minimal: Vec<StateSet> = candidates
            .iter()
            .filter(|g| !candidates.iter().any(|h| h != *g && h.is_subset(g)))
            .cloned()
            .collect();
        gens.push(minimal);
    }

    let mut valuation = BTreeMap::new();
    for p in vocab {
        valuation.insert(
            p.clone(),
            StateSet::from_indices(
                n_states,
                (0..n_states).filter(|_| rng.random_bool(density.valuation_prob)),
            ),
        );
    }
    NeighborhoodModel::from_parts(names, gens, valuation)
}

/// Seed-deterministic random Kripke model.
pub fn random_kripke(n_states: usize, vocab: &BTreeSet<Var>, edge_prob: f64, seed: u64) -> KripkeModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names: Vec<String> = (0..n_states).map(|i| format!("s{i}")).collect();
    names.sort();
    let mut edges = BTreeSet::new();
    for u in 0..n_states {
        for v in 0..n_states {
            if rng.random_bool(edge_prob) {
                edges.insert((u, v));
            }
        }
    }
    let mut valuation = BTreeMap::new();
    for p in vocab {
        valuation.insert(
            p.clone(),
            StateSet::from_indices(n_states, (0..n_states).filter(|_| rng.random_bool(0.5))),
        );
    }
    KripkeModel {
        names,
        edges,
        valuation,
    }
}

// ---------------------------------------------------------------------------
// documents
// ---------------------------------------------------------------------------

/// Provenance of a universe model: which models it enumerates.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub max_states: usize,
    pub vocab: Vec<String>,
}

/// A model document: the model plus the optional designated point and
/// universe provenance.
#[derive(Clone, PartialEq, Debug)]
pub struct ModelDocument {
    pub model: NeighborhoodModel,
    pub point: Option<usize>,
    pub provenance: Option<Provenance>,
}

#[derive(Serialize, Deserialize)]
struct RawDocument {
    states: Vec<String>,
    neighborhoods: BTreeMap<String, Vec<Vec<String>>>,
    valuation: BTreeMap<String, Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    point: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    provenance: Option<Provenance>,
}

pub fn read_model(bytes: &[u8]) -> Result<ModelDocument, ModelError> {
    let raw: RawDocument = serde_json::from_slice(bytes)?;
    let model = NeighborhoodModel::new(raw.states, raw.neighborhoods, raw.valuation)?;
    let point = match raw.point {
        None => None,
        Some(name) => Some(model.state_index(&name).ok_or_else(|| {
            ModelError::Invalid(vec![format!("point `{name}` is not a state")])
        })?),
    };
    Ok(ModelDocument {
        model,
        point,
        provenance: raw.provenance,
    })
}

pub fn write_model(doc: &ModelDocument) -> Vec<u8> {
    let m = &doc.model;
    let names = m.state_names();
    let set_names = |s: &StateSet| -> Vec<String> {
        s.iter().map(|i| names[i].to_string()).collect()
    };
    let raw = RawDocument {
        states: names.to_vec(),
        neighborhoods: (0..m.num_states())
            .map(|s| {
                (
                    names[s].clone(),
                    m.generators(s).iter().map(&set_names).collect(),
                )
            })
            .collect(),
        valuation: m
            .vocabulary()
            .into_iter()
            .map(|p| {
                let set = m.valuation(&p).cloned().unwrap_or_else(|| StateSet::empty(m.num_states()));
                (p.name().to_string(), set_names(&set))
            })
            .collect(),
        point: doc.point.map(|i| names[i].clone()),
        provenance: doc.provenance.clone(),
    };
    serde_json::to_vec(&raw).expect("model documents always serialize")
}

#[cfg(test)]
mod tests;
