//! Denotational semantics: direct fixpoint evaluation of modal formulas and
//! brute-force evaluation of second-order formulas.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{NeighborhoodModel, PointedModel};
use crate::set::{all_subsets, StateSet};
use crate::syntax::{MuFormula, NmsoFormula, Var};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("free variable `{0}` is not in the model vocabulary")]
    UnboundVariable(String),
    #[error("guard exceeded: {0}")]
    Guard(String),
}

/// Guards for the brute-force second-order evaluator. Every quantifier
/// enumerates all subsets of the state space, so both knobs bound a double
/// exponential.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_states: usize,
    pub max_quantifier_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 12,
            max_quantifier_depth: 8,
        }
    }
}

/// The extension of a formula: the set of states satisfying it.
pub fn eval_mu(m: &NeighborhoodModel, f: &MuFormula) -> Result<StateSet, EvalError> {
    eval_mu_in(m, f, &BTreeMap::new())
}

/// Evaluation under an explicit assignment for (fixpoint) variables; the
/// assignment overrides the model valuation.
pub fn eval_mu_in(
    m: &NeighborhoodModel,
    f: &MuFormula,
    env: &BTreeMap<Var, StateSet>,
) -> Result<StateSet, EvalError> {
    let mut env = env.clone();
    go(m, f, &mut env)
}

fn go(
    m: &NeighborhoodModel,
    f: &MuFormula,
    env: &mut BTreeMap<Var, StateSet>,
) -> Result<StateSet, EvalError> {
    let n = m.num_states();
    let value = |v: &Var, env: &BTreeMap<Var, StateSet>| -> Result<StateSet, EvalError> {
        env.get(v)
            .or_else(|| m.valuation(v))
            .cloned()
            .ok_or_else(|| EvalError::UnboundVariable(v.name().to_string()))
    };
    Ok(match f {
        MuFormula::Atom(v) => value(v, env)?,
        MuFormula::NegAtom(v) => value(v, env)?.complement(),
        MuFormula::Top => StateSet::full(n),
        MuFormula::Bot => StateSet::empty(n),
        MuFormula::And(l, r) => go(m, l, env)?.intersection(&go(m, r, env)?),
        MuFormula::Or(l, r) => go(m, l, env)?.union(&go(m, r, env)?),
        MuFormula::Box(a) => {
            let inner = go(m, a, env)?;
            StateSet::from_indices(n, (0..n).filter(|&u| m.contains_neighborhood(u, &inner)))
        }
        MuFormula::Dia(a) => {
            // u satisfies the diamond iff the complement of the argument's
            // extension is not a neighborhood of u
            let co = go(m, a, env)?.complement();
            StateSet::from_indices(n, (0..n).filter(|&u| !m.contains_neighborhood(u, &co)))
        }
        MuFormula::GBox(a) => {
            if go(m, a, env)?.is_full() {
                StateSet::full(n)
            } else {
                StateSet::empty(n)
            }
        }
        MuFormula::GDia(a) => {
            if go(m, a, env)?.is_empty() {
                StateSet::empty(n)
            } else {
                StateSet::full(n)
            }
        }
        MuFormula::Mu(v, body) => {
            let saved = env.get(v).cloned();
            let mut current = StateSet::empty(n);
            for _ in 0..=n {
                env.insert(v.clone(), current.clone());
                let next = go(m, body, env)?;
                if next == current {
                    break;
                }
                debug_assert!(current.is_subset(&next), "non-monotone fixpoint body");
                current = next;
            }
            restore(env, v, saved);
            current
        }
        MuFormula::Nu(v, body) => {
            let saved = env.get(v).cloned();
            let mut current = StateSet::full(n);
            for _ in 0..=n {
                env.insert(v.clone(), current.clone());
                let next = go(m, body, env)?;
                if next == current {
                    break;
                }
                debug_assert!(next.is_subset(&current), "non-monotone fixpoint body");
                current = next;
            }
            restore(env, v, saved);
            current
        }
    })
}

/// The approximant chain of a least-fixpoint formula: X₀ = ∅ and
/// X₍ₖ₊₁₎ = body with the variable sent to Xₖ, cut off at `limit` entries
/// past X₀ or at stability.
pub fn approximants(
    m: &NeighborhoodModel,
    f: &MuFormula,
    limit: usize,
) -> Result<Vec<StateSet>, EvalError> {
    let MuFormula::Mu(v, body) = f else {
        panic!("approximants expects a least-fixpoint formula");
    };
    let mut chain = vec![StateSet::empty(m.num_states())];
    let mut env = BTreeMap::new();
    for _ in 0..limit {
        env.insert(v.clone(), chain.last().unwrap().clone());
        let next = eval_mu_in(m, body, &env)?;
        if &next == chain.last().unwrap() {
            break;
        }
        chain.push(next);
    }
    Ok(chain)
}

/// Brute-force truth of a second-order formula at a pointed model. Sugar
/// constructors are evaluated directly; quantifiers enumerate subsets in
/// increasing-cardinality, then lexicographic, order.
pub fn eval_nmso(pm: PointedModel<'_>, f: &NmsoFormula) -> Result<bool, EvalError> {
    eval_nmso_with(pm, f, &Limits::default())
}

pub fn eval_nmso_with(
    pm: PointedModel<'_>,
    f: &NmsoFormula,
    limits: &Limits,
) -> Result<bool, EvalError> {
    let n = pm.model.num_states();
    if n > limits.max_states {
        return Err(EvalError::Guard(format!(
            "second-order evaluation over {n} states exceeds the bound of {}",
            limits.max_states
        )));
    }
    let depth = f.quantifier_depth();
    if depth > limits.max_quantifier_depth {
        return Err(EvalError::Guard(format!(
            "quantifier depth {depth} exceeds the bound of {}",
            limits.max_quantifier_depth
        )));
    }
    let subsets = all_subsets(n);
    let mut env: BTreeMap<Var, StateSet> = BTreeMap::new();
    eval_nmso_in(pm, f, &subsets, &mut env)
}

fn eval_nmso_in(
    pm: PointedModel<'_>,
    f: &NmsoFormula,
    subsets: &[StateSet],
    env: &mut BTreeMap<Var, StateSet>,
) -> Result<bool, EvalError> {
    let value = |v: &Var, env: &BTreeMap<Var, StateSet>| -> Result<StateSet, EvalError> {
        env.get(v)
            .or_else(|| pm.model.valuation(v))
            .cloned()
            .ok_or_else(|| EvalError::UnboundVariable(v.name().to_string()))
    };
    Ok(match f {
        NmsoFormula::Sr(p) => {
            let v = value(p, env)?;
            v.len() == 1 && v.contains(pm.point)
        }
        NmsoFormula::Sub(p, q) => value(p, env)?.is_subset(&value(q, env)?),
        NmsoFormula::BoxRel(p, q) => {
            let pv = value(p, env)?;
            let qv = value(q, env)?;
            let all = pv.iter().all(|t| pm.model.contains_neighborhood(t, &qv));
            all
        }
        NmsoFormula::Not(a) => !eval_nmso_in(pm, a, subsets, env)?,
        NmsoFormula::And(l, r) => {
            eval_nmso_in(pm, l, subsets, env)? && eval_nmso_in(pm, r, subsets, env)?
        }
        NmsoFormula::Or(l, r) => {
            eval_nmso_in(pm, l, subsets, env)? || eval_nmso_in(pm, r, subsets, env)?
        }
        NmsoFormula::Implies(l, r) => {
            !eval_nmso_in(pm, l, subsets, env)? || eval_nmso_in(pm, r, subsets, env)?
        }
        NmsoFormula::Iff(l, r) => {
            eval_nmso_in(pm, l, subsets, env)? == eval_nmso_in(pm, r, subsets, env)?
        }
        NmsoFormula::Exists(v, body) => {
            let saved = env.get(v).cloned();
            let mut found = false;
            for z in subsets {
                env.insert(v.clone(), z.clone());
                if eval_nmso_in(pm, body, subsets, env)? {
                    found = true;
                    break;
                }
            }
            restore(env, v, saved);
            found
        }
        NmsoFormula::Forall(v, body) => {
            let saved = env.get(v).cloned();
            let mut holds = true;
            for z in subsets {
                env.insert(v.clone(), z.clone());
                if !eval_nmso_in(pm, body, subsets, env)? {
                    holds = false;
                    break;
                }
            }
            restore(env, v, saved);
            holds
        }
        NmsoFormula::Sing(p) => value(p, env)?.len() == 1,
        NmsoFormula::Empty(p) => value(p, env)?.is_empty(),
        NmsoFormula::Eqv(p, q) => value(p, env)? == value(q, env)?,
    })
}

fn restore(env: &mut BTreeMap<Var, StateSet>, v: &Var, saved: Option<StateSet>) {
    match saved {
        Some(z) => {
            env.insert(v.clone(), z);
        }
        None => {
            env.remove(v);
        }
    }
}

#[cfg(test)]
mod tests;
