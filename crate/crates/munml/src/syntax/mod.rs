//! Formula syntax: the fixpoint modal language with and without global
//! modalities, and the monadic second-order language over neighborhood
//! structures.
//!
//! Both languages are kept in negation normal form at the type level: the
//! modal ASTs have no general negation constructor, and binders may not
//! capture a negated occurrence of their own variable.

mod parse;
mod print;

pub use parse::{parse_mu, parse_nmso};
pub use print::{print_mu, print_nmso};

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Words that can never be used as variable names.
pub const RESERVED_WORDS: [&str; 13] = [
    "mu", "nu", "true", "false", "exists", "forall", "sr", "box", "sing", "empty", "eqv", "A", "E",
];

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A propositional (equivalently, second-order) variable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(String);

impl Var {
    pub fn new(name: &str) -> Result<Var, SyntaxError> {
        if !is_ident(name) {
            return Err(SyntaxError::BadVariable(name.to_string()));
        }
        if RESERVED_WORDS.contains(&name) {
            return Err(SyntaxError::ReservedWord(name.to_string()));
        }
        Ok(Var(name.to_string()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Var({})", self.0)
    }
}

impl std::str::FromStr for Var {
    type Err = SyntaxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Var::new(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: reserved word `{word}` used as a variable")]
    Reserved { line: usize, col: usize, word: String },
    #[error("`{0}` is not a valid variable name")]
    BadVariable(String),
    #[error("`{0}` is a reserved word")]
    ReservedWord(String),
    #[error("variable `{0}` occurs negated under its own binder")]
    NegatedBoundVariable(String),
    #[error("variable `{0}` is not bound in the formula")]
    NotBound(String),
    #[error("variable `{0}` already occurs in the formula")]
    NotFresh(String),
    #[error("cycle in the rank order over {0:?}")]
    RankCycle(Vec<String>),
}

/// Fixpoint binder kind.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum FixKind {
    /// Least fixpoint.
    Mu,
    /// Greatest fixpoint.
    Nu,
}

impl fmt::Display for FixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixKind::Mu => f.write_str("mu"),
            FixKind::Nu => f.write_str("nu"),
        }
    }
}

/// Formulas of the fixpoint modal language, in negation normal form.
///
/// `GBox`/`GDia` are the global modalities; a formula avoiding them lies in
/// the base (bisimulation-invariant) fragment, see [`MuFormula::is_global_free`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum MuFormula {
    Atom(Var),
    NegAtom(Var),
    Top,
    Bot,
    And(Box<MuFormula>, Box<MuFormula>),
    Or(Box<MuFormula>, Box<MuFormula>),
    Box(Box<MuFormula>),
    Dia(Box<MuFormula>),
    GBox(Box<MuFormula>),
    GDia(Box<MuFormula>),
    Mu(Var, Box<MuFormula>),
    Nu(Var, Box<MuFormula>),
}

impl fmt::Display for MuFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_mu(self))
    }
}

pub fn atom(name: &str) -> MuFormula {
    MuFormula::Atom(Var::new(name).expect("valid variable name"))
}

pub fn neg_atom(name: &str) -> MuFormula {
    MuFormula::NegAtom(Var::new(name).expect("valid variable name"))
}

impl MuFormula {
    pub fn and(l: MuFormula, r: MuFormula) -> MuFormula {
        MuFormula::And(Box::new(l), Box::new(r))
    }
    pub fn or(l: MuFormula, r: MuFormula) -> MuFormula {
        MuFormula::Or(Box::new(l), Box::new(r))
    }
    pub fn boxed(a: MuFormula) -> MuFormula {
        MuFormula::Box(Box::new(a))
    }
    pub fn dia(a: MuFormula) -> MuFormula {
        MuFormula::Dia(Box::new(a))
    }
    pub fn gbox(a: MuFormula) -> MuFormula {
        MuFormula::GBox(Box::new(a))
    }
    pub fn gdia(a: MuFormula) -> MuFormula {
        MuFormula::GDia(Box::new(a))
    }
    pub fn mu(v: Var, body: MuFormula) -> MuFormula {
        MuFormula::Mu(v, Box::new(body))
    }
    pub fn nu(v: Var, body: MuFormula) -> MuFormula {
        MuFormula::Nu(v, Box::new(body))
    }
    pub fn fix(kind: FixKind, v: Var, body: MuFormula) -> MuFormula {
        match kind {
            FixKind::Mu => MuFormula::mu(v, body),
            FixKind::Nu => MuFormula::nu(v, body),
        }
    }

    /// True iff no global modality occurs anywhere in the formula.
    pub fn is_global_free(&self) -> bool {
        use MuFormula::*;
        match self {
            Atom(_) | NegAtom(_) | Top | Bot => true,
            And(l, r) | Or(l, r) => l.is_global_free() && r.is_global_free(),
            Box(a) | Dia(a) => a.is_global_free(),
            GBox(_) | GDia(_) => false,
            Mu(_, b) | Nu(_, b) => b.is_global_free(),
        }
    }

    /// Variables with a free occurrence.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        fn go(f: &MuFormula, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
            use MuFormula::*;
            match f {
                Atom(v) | NegAtom(v) => {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
                Top | Bot => {}
                And(l, r) | Or(l, r) => {
                    go(l, bound, out);
                    go(r, bound, out);
                }
                Box(a) | Dia(a) | GBox(a) | GDia(a) => go(a, bound, out),
                Mu(v, b) | Nu(v, b) => {
                    bound.push(v.clone());
                    go(b, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Variables bound by some fixpoint binder.
    pub fn bound_vars(&self) -> BTreeSet<Var> {
        use MuFormula::*;
        match self {
            Atom(_) | NegAtom(_) | Top | Bot => BTreeSet::new(),
            And(l, r) | Or(l, r) => {
                let mut s = l.bound_vars();
                s.extend(r.bound_vars());
                s
            }
            Box(a) | Dia(a) | GBox(a) | GDia(a) => a.bound_vars(),
            Mu(v, b) | Nu(v, b) => {
                let mut s = b.bound_vars();
                s.insert(v.clone());
                s
            }
        }
    }

    /// All variable names occurring anywhere (free, bound or as binders).
    pub fn all_names(&self) -> BTreeSet<String> {
        use MuFormula::*;
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Atom(v) | NegAtom(v) => {
                    out.insert(v.name().to_string());
                }
                Top | Bot => {}
                And(l, r) | Or(l, r) => {
                    stack.push(l);
                    stack.push(r);
                }
                Box(a) | Dia(a) | GBox(a) | GDia(a) => stack.push(a),
                Mu(v, b) | Nu(v, b) => {
                    out.insert(v.name().to_string());
                    stack.push(b);
                }
            }
        }
        out
    }

    /// Number of operators on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        use MuFormula::*;
        match self {
            Atom(_) | NegAtom(_) | Top | Bot => 0,
            And(l, r) | Or(l, r) => 1 + l.depth().max(r.depth()),
            Box(a) | Dia(a) | GBox(a) | GDia(a) => 1 + a.depth(),
            Mu(_, b) | Nu(_, b) => 1 + b.depth(),
        }
    }

    /// Checks the negation-normal-form binder invariant: no binder captures
    /// a negated occurrence of its own variable.
    pub fn check_nnf_binders(&self) -> Result<(), SyntaxError> {
        fn go(f: &MuFormula, bound: &mut Vec<Var>) -> Result<(), SyntaxError> {
            use MuFormula::*;
            match f {
                NegAtom(v) if bound.contains(v) => {
                    Err(SyntaxError::NegatedBoundVariable(v.name().to_string()))
                }
                Atom(_) | NegAtom(_) | Top | Bot => Ok(()),
                And(l, r) | Or(l, r) => {
                    go(l, bound)?;
                    go(r, bound)
                }
                Box(a) | Dia(a) | GBox(a) | GDia(a) => go(a, bound),
                Mu(v, b) | Nu(v, b) => {
                    bound.push(v.clone());
                    let r = go(b, bound);
                    bound.pop();
                    r
                }
            }
        }
        go(self, &mut Vec::new())
    }

    /// True iff no variable is both bound and free and every bound variable
    /// has exactly one binder.
    pub fn is_well_named(&self) -> bool {
        fn binder_count(f: &MuFormula, counts: &mut std::collections::BTreeMap<Var, usize>) {
            use MuFormula::*;
            match f {
                Atom(_) | NegAtom(_) | Top | Bot => {}
                And(l, r) | Or(l, r) => {
                    binder_count(l, counts);
                    binder_count(r, counts);
                }
                Box(a) | Dia(a) | GBox(a) | GDia(a) => binder_count(a, counts),
                Mu(v, b) | Nu(v, b) => {
                    *counts.entry(v.clone()).or_insert(0) += 1;
                    binder_count(b, counts);
                }
            }
        }
        let mut counts = std::collections::BTreeMap::new();
        binder_count(self, &mut counts);
        if counts.values().any(|&c| c > 1) {
            return false;
        }
        let free = self.free_vars();
        counts.keys().all(|v| !free.contains(v))
    }
}

/// All subformulas, collapsed by structural equality, in first-occurrence
/// pre-order; the formula itself comes first.
pub fn subformulas(f: &MuFormula) -> Vec<MuFormula> {
    fn go(f: &MuFormula, out: &mut Vec<MuFormula>, seen: &mut BTreeSet<MuFormula>) {
        if seen.insert(f.clone()) {
            out.push(f.clone());
        }
        use MuFormula::*;
        match f {
            Atom(_) | NegAtom(_) | Top | Bot => {}
            And(l, r) | Or(l, r) => {
                go(l, out, seen);
                go(r, out, seen);
            }
            Box(a) | Dia(a) | GBox(a) | GDia(a) => go(a, out, seen),
            Mu(_, b) | Nu(_, b) => go(b, out, seen),
        }
    }
    let mut out = Vec::new();
    go(f, &mut out, &mut BTreeSet::new());
    out
}

/// The body of `p`'s unique binder in a well-named formula.
pub fn binding_definition(f: &MuFormula, p: &Var) -> Result<MuFormula, SyntaxError> {
    fn go(f: &MuFormula, p: &Var) -> Option<MuFormula> {
        use MuFormula::*;
        match f {
            Atom(_) | NegAtom(_) | Top | Bot => None,
            And(l, r) | Or(l, r) => go(l, p).or_else(|| go(r, p)),
            Box(a) | Dia(a) | GBox(a) | GDia(a) => go(a, p),
            Mu(v, b) | Nu(v, b) => {
                if v == p {
                    Some((**b).clone())
                } else {
                    go(b, p)
                }
            }
        }
    }
    go(f, p).ok_or_else(|| SyntaxError::NotBound(p.name().to_string()))
}

/// The binder kind of a bound variable in a well-named formula.
pub fn binder_kind(f: &MuFormula, p: &Var) -> Result<FixKind, SyntaxError> {
    fn go(f: &MuFormula, p: &Var) -> Option<FixKind> {
        use MuFormula::*;
        match f {
            Atom(_) | NegAtom(_) | Top | Bot => None,
            And(l, r) | Or(l, r) => go(l, p).or_else(|| go(r, p)),
            Box(a) | Dia(a) | GBox(a) | GDia(a) => go(a, p),
            Mu(v, b) => {
                if v == p {
                    Some(FixKind::Mu)
                } else {
                    go(b, p)
                }
            }
            Nu(v, b) => {
                if v == p {
                    Some(FixKind::Nu)
                } else {
                    go(b, p)
                }
            }
        }
    }
    go(f, p).ok_or_else(|| SyntaxError::NotBound(p.name().to_string()))
}

/// NNF dual: on every model the extension of the result is the complement
/// of the input's extension. Requires a well-named input.
pub fn negate(f: &MuFormula) -> MuFormula {
    fn go(f: &MuFormula, bound: &mut Vec<Var>) -> MuFormula {
        use MuFormula::*;
        match f {
            // A bound fixpoint variable stays positive: dualizing the binder
            // re-dualizes its occurrences.
            Atom(v) => {
                if bound.contains(v) {
                    Atom(v.clone())
                } else {
                    NegAtom(v.clone())
                }
            }
            NegAtom(v) => Atom(v.clone()),
            Top => Bot,
            Bot => Top,
            And(l, r) => MuFormula::or(go(l, bound), go(r, bound)),
            Or(l, r) => MuFormula::and(go(l, bound), go(r, bound)),
            Box(a) => MuFormula::dia(go(a, bound)),
            Dia(a) => MuFormula::boxed(go(a, bound)),
            GBox(a) => MuFormula::gdia(go(a, bound)),
            GDia(a) => MuFormula::gbox(go(a, bound)),
            Mu(v, b) => {
                bound.push(v.clone());
                let body = go(b, bound);
                bound.pop();
                MuFormula::nu(v.clone(), body)
            }
            Nu(v, b) => {
                bound.push(v.clone());
                let body = go(b, bound);
                bound.pop();
                MuFormula::mu(v.clone(), body)
            }
        }
    }
    go(f, &mut Vec::new())
}

/// Smallest positive integer suffix of `base` not present in `used`; the
/// fresh name is recorded in `used` before returning.
pub fn fresh_name(base: &str, used: &mut BTreeSet<String>) -> Var {
    let mut k = 1usize;
    loop {
        let candidate = format!("{base}{k}");
        if !used.contains(&candidate) && !RESERVED_WORDS.contains(&candidate.as_str()) {
            used.insert(candidate.clone());
            return Var(candidate);
        }
        k += 1;
    }
}

/// `base` itself when unused, otherwise the smallest suffixed variant.
pub fn fresh_or_base(base: &str, used: &mut BTreeSet<String>) -> Var {
    if !used.contains(base) && !RESERVED_WORDS.contains(&base) && is_ident(base) {
        used.insert(base.to_string());
        return Var(base.to_string());
    }
    fresh_name(base, used)
}

/// Renames bound occurrences of `old` under one binder (stopping at
/// re-binders of `old`, which shadow it).
fn rename_occurrences(f: &MuFormula, old: &Var, new: &Var) -> MuFormula {
    use MuFormula::*;
    match f {
        Atom(v) => Atom(if v == old { new.clone() } else { v.clone() }),
        NegAtom(v) => NegAtom(if v == old { new.clone() } else { v.clone() }),
        Top => Top,
        Bot => Bot,
        And(l, r) => MuFormula::and(
            rename_occurrences(l, old, new),
            rename_occurrences(r, old, new),
        ),
        Or(l, r) => MuFormula::or(
            rename_occurrences(l, old, new),
            rename_occurrences(r, old, new),
        ),
        Box(a) => MuFormula::boxed(rename_occurrences(a, old, new)),
        Dia(a) => MuFormula::dia(rename_occurrences(a, old, new)),
        GBox(a) => MuFormula::gbox(rename_occurrences(a, old, new)),
        GDia(a) => MuFormula::gdia(rename_occurrences(a, old, new)),
        Mu(v, b) if v == old => MuFormula::mu(v.clone(), (**b).clone()),
        Nu(v, b) if v == old => MuFormula::nu(v.clone(), (**b).clone()),
        Mu(v, b) => MuFormula::mu(v.clone(), rename_occurrences(b, old, new)),
        Nu(v, b) => MuFormula::nu(v.clone(), rename_occurrences(b, old, new)),
    }
}

/// Renames binders so that no variable is both bound and free and every
/// bound variable has exactly one binder. Renaming is deterministic:
/// binders are visited in pre-order and fresh names take the smallest
/// unused integer suffix.
pub fn well_name(f: &MuFormula) -> MuFormula {
    struct Ctx {
        taken: BTreeSet<Var>,        // free vars plus binder names already kept
        pool: BTreeSet<String>,      // every name that exists anywhere
    }
    fn go(f: &MuFormula, ctx: &mut Ctx) -> MuFormula {
        use MuFormula::*;
        match f {
            Atom(_) | NegAtom(_) | Top | Bot => f.clone(),
            And(l, r) => MuFormula::and(go(l, ctx), go(r, ctx)),
            Or(l, r) => MuFormula::or(go(l, ctx), go(r, ctx)),
            Box(a) => MuFormula::boxed(go(a, ctx)),
            Dia(a) => MuFormula::dia(go(a, ctx)),
            GBox(a) => MuFormula::gbox(go(a, ctx)),
            GDia(a) => MuFormula::gdia(go(a, ctx)),
            Mu(..) | Nu(..) => {
                let (kind, v, b) = match f {
                    Mu(v, b) => (FixKind::Mu, v, b),
                    Nu(v, b) => (FixKind::Nu, v, b),
                    _ => unreachable!(),
                };
                let (name, body) = if ctx.taken.contains(v) {
                    let fresh = fresh_name(v.name(), &mut ctx.pool);
                    ctx.taken.insert(fresh.clone());
                    let renamed = rename_occurrences(b, v, &fresh);
                    (fresh, renamed)
                } else {
                    ctx.taken.insert(v.clone());
                    ctx.pool.insert(v.name().to_string());
                    (v.clone(), (**b).clone())
                };
                MuFormula::fix(kind, name, go(&body, ctx))
            }
        }
    }
    let mut ctx = Ctx {
        taken: f.free_vars(),
        pool: f.all_names(),
    };
    go(f, &mut ctx)
}

/// Renaming without the freshness check, for internal constructions that
/// deliberately reuse a target variable; capture-free as long as `new` is
/// never a binder.
pub(crate) fn rename_free(f: &MuFormula, old: &Var, new: &Var) -> MuFormula {
    rename_occurrences(f, old, new)
}

/// Uniform renaming of free occurrences of `old` to `new`; `new` must not
/// occur anywhere in `f` (capture-freedom via freshness).
pub fn substitute(f: &MuFormula, old: &Var, new: &Var) -> Result<MuFormula, SyntaxError> {
    if f.all_names().contains(new.name()) {
        return Err(SyntaxError::NotFresh(new.name().to_string()));
    }
    Ok(rename_occurrences(f, old, new))
}

/// A linearization of the bound variables of a well-named formula that
/// extends the ranks-higher relation: variables free in another variable's
/// binding definition come strictly later.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOrder {
    pub vars: Vec<(Var, FixKind)>,
}

pub fn rank_order(f: &MuFormula) -> Result<RankOrder, SyntaxError> {
    let bound: Vec<Var> = f.bound_vars().into_iter().collect();
    let mut defs = Vec::new();
    for v in &bound {
        defs.push(binding_definition(f, v)?);
    }
    // preds[i] holds the set of variables that must precede bound[i]:
    // j precedes i whenever bound[i] occurs free in the definition of bound[j].
    let mut preds: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); bound.len()];
    for (j, def) in defs.iter().enumerate() {
        let free = def.free_vars();
        for (i, v) in bound.iter().enumerate() {
            if i != j && free.contains(v) {
                preds[i].insert(j);
            }
        }
    }
    let mut order = Vec::new();
    let mut done = vec![false; bound.len()];
    for _ in 0..bound.len() {
        // alphabetical tie-break: bound is sorted, pick the first ready one
        let next = (0..bound.len())
            .find(|&i| !done[i] && preds[i].iter().all(|&j| done[j]))
            .ok_or_else(|| {
                SyntaxError::RankCycle(
                    bound
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| !done[*i])
                        .map(|(_, v)| v.name().to_string())
                        .collect(),
                )
            })?;
        done[next] = true;
        order.push((bound[next].clone(), binder_kind(f, &bound[next])?));
    }
    Ok(RankOrder { vars: order })
}

// ---------------------------------------------------------------------------
// NMSO
// ---------------------------------------------------------------------------

/// Formulas of the monadic second-order language. The last six constructors
/// are sugar eliminated by [`desugar_nmso`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum NmsoFormula {
    /// The designated point is the single member of the variable.
    Sr(Var),
    /// Set inclusion between two variables.
    Sub(Var, Var),
    /// `BoxRel(p, q)`: q's value is a neighborhood of every member of p.
    BoxRel(Var, Var),
    Not(Box<NmsoFormula>),
    And(Box<NmsoFormula>, Box<NmsoFormula>),
    Or(Box<NmsoFormula>, Box<NmsoFormula>),
    Exists(Var, Box<NmsoFormula>),
    // sugar
    Implies(Box<NmsoFormula>, Box<NmsoFormula>),
    Iff(Box<NmsoFormula>, Box<NmsoFormula>),
    Forall(Var, Box<NmsoFormula>),
    Sing(Var),
    Empty(Var),
    Eqv(Var, Var),
}

impl NmsoFormula {
    pub fn not(a: NmsoFormula) -> NmsoFormula {
        NmsoFormula::Not(Box::new(a))
    }
    pub fn and(l: NmsoFormula, r: NmsoFormula) -> NmsoFormula {
        NmsoFormula::And(Box::new(l), Box::new(r))
    }
    pub fn or(l: NmsoFormula, r: NmsoFormula) -> NmsoFormula {
        NmsoFormula::Or(Box::new(l), Box::new(r))
    }
    pub fn exists(v: Var, a: NmsoFormula) -> NmsoFormula {
        NmsoFormula::Exists(v, Box::new(a))
    }
    pub fn implies(l: NmsoFormula, r: NmsoFormula) -> NmsoFormula {
        NmsoFormula::Implies(Box::new(l), Box::new(r))
    }
    pub fn iff(l: NmsoFormula, r: NmsoFormula) -> NmsoFormula {
        NmsoFormula::Iff(Box::new(l), Box::new(r))
    }
    pub fn forall(v: Var, a: NmsoFormula) -> NmsoFormula {
        NmsoFormula::Forall(v, Box::new(a))
    }

    pub fn all_names(&self) -> BTreeSet<String> {
        use NmsoFormula::*;
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Sr(v) | Sing(v) | Empty(v) => {
                    out.insert(v.name().to_string());
                }
                Sub(v, w) | BoxRel(v, w) | Eqv(v, w) => {
                    out.insert(v.name().to_string());
                    out.insert(w.name().to_string());
                }
                Not(a) => stack.push(a),
                And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r) => {
                    stack.push(l);
                    stack.push(r);
                }
                Exists(v, a) | Forall(v, a) => {
                    out.insert(v.name().to_string());
                    stack.push(a);
                }
            }
        }
        out
    }

    /// Nesting depth of second-order quantifiers (sugar included).
    pub fn quantifier_depth(&self) -> usize {
        use NmsoFormula::*;
        match self {
            Sr(_) | Sub(_, _) | BoxRel(_, _) | Sing(_) | Empty(_) | Eqv(_, _) => 0,
            Not(a) => a.quantifier_depth(),
            And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r) => {
                l.quantifier_depth().max(r.quantifier_depth())
            }
            Exists(_, a) | Forall(_, a) => 1 + a.quantifier_depth(),
        }
    }

    pub fn is_core(&self) -> bool {
        use NmsoFormula::*;
        match self {
            Sr(_) | Sub(_, _) | BoxRel(_, _) => true,
            Not(a) => a.is_core(),
            And(l, r) | Or(l, r) => l.is_core() && r.is_core(),
            Exists(_, a) => a.is_core(),
            Implies(..) | Iff(..) | Forall(..) | Sing(_) | Empty(_) | Eqv(_, _) => false,
        }
    }
}

impl fmt::Display for NmsoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_nmso(self))
    }
}

/// Eliminates the sugar constructors, leaving only the core grammar.
pub fn desugar_nmso(f: &NmsoFormula) -> NmsoFormula {
    let mut used = f.all_names();
    desugar_in(f, &mut used)
}

fn desugar_in(f: &NmsoFormula, used: &mut BTreeSet<String>) -> NmsoFormula {
    use NmsoFormula::*;
    match f {
        Sr(_) | Sub(_, _) | BoxRel(_, _) => f.clone(),
        Not(a) => NmsoFormula::not(desugar_in(a, used)),
        And(l, r) => NmsoFormula::and(desugar_in(l, used), desugar_in(r, used)),
        Or(l, r) => NmsoFormula::or(desugar_in(l, used), desugar_in(r, used)),
        Exists(v, a) => NmsoFormula::exists(v.clone(), desugar_in(a, used)),
        Forall(v, a) => NmsoFormula::not(NmsoFormula::exists(
            v.clone(),
            NmsoFormula::not(desugar_in(a, used)),
        )),
        Implies(l, r) => NmsoFormula::or(
            NmsoFormula::not(desugar_in(l, used)),
            desugar_in(r, used),
        ),
        Iff(l, r) => {
            let l = desugar_in(l, used);
            let r = desugar_in(r, used);
            NmsoFormula::and(
                NmsoFormula::or(NmsoFormula::not(l.clone()), r.clone()),
                NmsoFormula::or(NmsoFormula::not(r), l),
            )
        }
        Empty(v) => {
            let w = fresh_or_base("w", used);
            desugar_in(&NmsoFormula::forall(w.clone(), Sub(v.clone(), w)), used)
        }
        Eqv(v, w) => NmsoFormula::and(Sub(v.clone(), w.clone()), Sub(w.clone(), v.clone())),
        Sing(v) => {
            let w = fresh_or_base("w", used);
            let sugar = NmsoFormula::and(
                NmsoFormula::not(Empty(v.clone())),
                NmsoFormula::forall(
                    w.clone(),
                    NmsoFormula::implies(
                        Sub(w.clone(), v.clone()),
                        NmsoFormula::or(Empty(w.clone()), Eqv(w, v.clone())),
                    ),
                ),
            );
            desugar_in(&sugar, used)
        }
    }
}
