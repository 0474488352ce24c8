//! The evaluation game: a (model, formula) pair compiled into a finite
//! max-parity game, solved by attractor recursion into exact winning regions
//! with positional strategies.
//!
//! Basic positions pair a state with a subformula. At box positions the
//! verifier picks a neighborhood, at diamond positions the refuter does; both
//! pick from the generator antichain only, which never changes the winner:
//! whoever must later defend every member of the chosen set prefers a
//! smaller set, so minimal neighborhoods dominate. `UpwardClosure` rebuilds
//! the arena with the full neighborhood family to cross-check exactly that.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::model::{GuardError, NeighborhoodModel};
use crate::set::StateSet;
use crate::syntax::{
    binding_definition, rank_order, subformulas, FixKind, MuFormula, SyntaxError, Var,
};

#[derive(Debug, Error)]
pub enum GameError {
    #[error("formula is not well-named")]
    NotWellNamed,
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("free variable `{0}` is not in the model vocabulary")]
    UnboundVariable(String),
    #[error(transparent)]
    Guard(#[from] GuardError),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Exists,
    Forall,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Exists => Player::Forall,
            Player::Forall => Player::Exists,
        }
    }

    /// The player winning an infinite play whose maximal recurring priority
    /// is `d`: the verifier wins on even.
    pub fn of_priority(d: u32) -> Player {
        if d % 2 == 0 {
            Player::Exists
        } else {
            Player::Forall
        }
    }
}

/// Which neighborhood family box/diamond positions quantify over.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NeighborhoodChoice {
    Generators,
    UpwardClosure,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PositionKind {
    /// A state paired with a subformula.
    Basic { state: usize, sub: usize },
    /// A chosen neighborhood whose members `chooser` now picks from.
    Choice {
        chooser: Player,
        set: StateSet,
        sub: usize,
    },
}

#[derive(Clone, Debug)]
pub struct Arena {
    pub subs: Vec<MuFormula>,
    pub kinds: Vec<PositionKind>,
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    pub moves: Vec<Vec<usize>>,
    num_subs: usize,
    pub num_states: usize,
}

impl Arena {
    pub fn num_positions(&self) -> usize {
        self.kinds.len()
    }

    pub fn basic(&self, state: usize, sub: usize) -> usize {
        state * self.num_subs + sub
    }

    pub fn sub_index(&self, f: &MuFormula) -> Option<usize> {
        self.subs.iter().position(|g| g == f)
    }

    pub fn is_terminal(&self, p: usize) -> bool {
        self.moves[p].is_empty()
    }
}

/// Priorities for the bound variables: walking the rank order upward, each
/// variable gets the smallest number exceeding everything assigned so far
/// that is odd for least-fixpoint variables and even for greatest-fixpoint
/// ones. An infinite play is then won by the verifier exactly when the
/// highest infinitely recurring variable is a greatest-fixpoint variable.
pub fn assign_priorities(f: &MuFormula) -> Result<BTreeMap<Var, u32>, SyntaxError> {
    let order = rank_order(f)?;
    let mut out = BTreeMap::new();
    let mut prev = 0u32;
    for (v, kind) in order.vars {
        let mut cand = prev + 1;
        let want_odd = kind == FixKind::Mu;
        if (cand % 2 == 1) != want_odd {
            cand += 1;
        }
        out.insert(v, cand);
        prev = cand;
    }
    Ok(out)
}

pub fn build_arena(m: &NeighborhoodModel, f: &MuFormula) -> Result<Arena, GameError> {
    build_arena_with(m, f, NeighborhoodChoice::Generators)
}

pub fn build_arena_with(
    m: &NeighborhoodModel,
    f: &MuFormula,
    choice: NeighborhoodChoice,
) -> Result<Arena, GameError> {
    if !f.is_well_named() {
        return Err(GameError::NotWellNamed);
    }
    let subs = subformulas(f);
    let sub_index: BTreeMap<&MuFormula, usize> =
        subs.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let priorities = assign_priorities(f)?;
    let bound = f.bound_vars();
    let mut definitions: BTreeMap<Var, usize> = BTreeMap::new();
    for v in &bound {
        let def = binding_definition(f, v)?;
        definitions.insert(v.clone(), sub_index[&def]);
    }

    let n = m.num_states();
    let num_subs = subs.len();
    let mut kinds: Vec<PositionKind> = Vec::with_capacity(n * num_subs);
    for state in 0..n {
        for sub in 0..num_subs {
            kinds.push(PositionKind::Basic { state, sub });
        }
    }
    let mut owner = vec![Player::Forall; kinds.len()];
    let mut priority = vec![0u32; kinds.len()];
    let mut moves: Vec<Vec<usize>> = vec![Vec::new(); kinds.len()];
    let mut choice_ids: BTreeMap<(Player, Vec<usize>, usize), usize> = BTreeMap::new();

    // families quantified over at box/diamond positions, per state
    let mut families: Vec<Vec<StateSet>> = Vec::with_capacity(n);
    for s in 0..n {
        families.push(match choice {
            NeighborhoodChoice::Generators => m.generators(s).to_vec(),
            NeighborhoodChoice::UpwardClosure => m.upward_closure(s)?,
        });
    }

    let valuation = |v: &Var| -> Result<&StateSet, GameError> {
        m.valuation(v)
            .ok_or_else(|| GameError::UnboundVariable(v.name().to_string()))
    };

    for state in 0..n {
        for (sub, formula) in subs.iter().enumerate() {
            let id = state * num_subs + sub;
            match formula {
                MuFormula::Or(l, r) => {
                    owner[id] = Player::Exists;
                    let (li, ri) = (sub_index[&**l], sub_index[&**r]);
                    moves[id].push(state * num_subs + li);
                    if ri != li {
                        moves[id].push(state * num_subs + ri);
                    }
                }
                MuFormula::And(l, r) => {
                    owner[id] = Player::Forall;
                    let (li, ri) = (sub_index[&**l], sub_index[&**r]);
                    moves[id].push(state * num_subs + li);
                    if ri != li {
                        moves[id].push(state * num_subs + ri);
                    }
                }
                MuFormula::Atom(v) if bound.contains(v) => {
                    // regeneration: the single move unfolds the binding definition
                    owner[id] = Player::Forall;
                    priority[id] = priorities[v];
                    moves[id].push(state * num_subs + definitions[v]);
                }
                MuFormula::Atom(v) => {
                    owner[id] = if valuation(v)?.contains(state) {
                        Player::Forall
                    } else {
                        Player::Exists
                    };
                }
                MuFormula::NegAtom(v) => {
                    owner[id] = if valuation(v)?.contains(state) {
                        Player::Exists
                    } else {
                        Player::Forall
                    };
                }
                MuFormula::Top => owner[id] = Player::Forall,
                MuFormula::Bot => owner[id] = Player::Exists,
                MuFormula::Box(a) => {
                    owner[id] = Player::Exists;
                    let ai = sub_index[&**a];
                    for z in &families[state] {
                        let choice = intern_choice(
                            Player::Forall,
                            z,
                            ai,
                            &mut choice_ids,
                            &mut kinds,
                            &mut owner,
                            &mut priority,
                            &mut moves,
                        );
                        moves[id].push(choice);
                    }
                }
                MuFormula::Dia(a) => {
                    owner[id] = Player::Forall;
                    let ai = sub_index[&**a];
                    for z in &families[state] {
                        let choice = intern_choice(
                            Player::Exists,
                            z,
                            ai,
                            &mut choice_ids,
                            &mut kinds,
                            &mut owner,
                            &mut priority,
                            &mut moves,
                        );
                        moves[id].push(choice);
                    }
                }
                MuFormula::GBox(a) => {
                    owner[id] = Player::Forall;
                    let ai = sub_index[&**a];
                    moves[id].extend((0..n).map(|t| t * num_subs + ai));
                }
                MuFormula::GDia(a) => {
                    owner[id] = Player::Exists;
                    let ai = sub_index[&**a];
                    moves[id].extend((0..n).map(|t| t * num_subs + ai));
                }
                MuFormula::Mu(_, b) | MuFormula::Nu(_, b) => {
                    owner[id] = Player::Forall;
                    moves[id].push(state * num_subs + sub_index[&**b]);
                }
            }
        }
    }

    // fill in members of choice positions
    for id in 0..kinds.len() {
        if let PositionKind::Choice { set, sub, .. } = kinds[id].clone() {
            moves[id] = set.iter().map(|t| t * num_subs + sub).collect();
        }
    }

    Ok(Arena {
        subs,
        kinds,
        owner,
        priority,
        moves,
        num_subs,
        num_states: n,
    })
}

#[allow(clippy::too_many_arguments)]
fn intern_choice(
    chooser: Player,
    set: &StateSet,
    sub: usize,
    choice_ids: &mut BTreeMap<(Player, Vec<usize>, usize), usize>,
    kinds: &mut Vec<PositionKind>,
    owner: &mut Vec<Player>,
    priority: &mut Vec<u32>,
    moves: &mut Vec<Vec<usize>>,
) -> usize {
    let key = (chooser, set.iter().collect::<Vec<_>>(), sub);
    *choice_ids.entry(key).or_insert_with(|| {
        let id = kinds.len();
        kinds.push(PositionKind::Choice {
            chooser,
            set: set.clone(),
            sub,
        });
        owner.push(chooser);
        priority.push(0);
        moves.push(Vec::new());
        id
    })
}

// ---------------------------------------------------------------------------
// solving
// ---------------------------------------------------------------------------

/// Winning regions plus a positional strategy for each player, defined on
/// the player's own positions inside their region.
#[derive(Clone, Debug)]
pub struct Solution {
    pub winner: Vec<Player>,
    strategies: [Vec<Option<usize>>; 2],
}

impl Solution {
    pub fn strategy(&self, p: Player) -> &[Option<usize>] {
        &self.strategies[p as usize]
    }

    pub fn region(&self, p: Player) -> impl Iterator<Item = usize> + '_ {
        self.winner
            .iter()
            .enumerate()
            .filter(move |(_, w)| **w == p)
            .map(|(i, _)| i)
    }
}

struct Solver<'a> {
    arena: &'a Arena,
    preds: Vec<Vec<usize>>,
    winner: Vec<Player>,
    strategies: [Vec<Option<usize>>; 2],
}

pub fn solve(arena: &Arena) -> Solution {
    let n = arena.num_positions();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (p, succs) in arena.moves.iter().enumerate() {
        for &q in succs {
            preds[q].push(p);
        }
    }
    let mut solver = Solver {
        arena,
        preds,
        winner: vec![Player::Exists; n],
        strategies: [vec![None; n], vec![None; n]],
    };

    let mut view = vec![true; n];

    // Terminal positions lose for their owner. Resolve them and everything
    // either player can force into them; the rest is a total game.
    for player in [Player::Exists, Player::Forall] {
        let stuck: Vec<usize> = (0..n)
            .filter(|&p| arena.is_terminal(p) && arena.owner[p] == player.opponent())
            .collect();
        let region = solver.attractor(&view, player, &stuck);
        for &p in &region {
            solver.winner[p] = player;
            view[p] = false;
        }
    }

    solver.zielonka(view);

    // strategies live only on own positions inside the own region
    for player in [Player::Exists, Player::Forall] {
        for p in 0..n {
            if solver.winner[p] != player || arena.owner[p] != player {
                solver.strategies[player as usize][p] = None;
            }
        }
    }

    Solution {
        winner: solver.winner,
        strategies: solver.strategies,
    }
}

impl Solver<'_> {
    /// Positions from which `player` can force the play into `targets`,
    /// relative to the active `view`. Writes the forcing strategy for
    /// newly attracted positions owned by `player`.
    fn attractor(&mut self, view: &[bool], player: Player, targets: &[usize]) -> Vec<usize> {
        let arena = self.arena;
        let mut in_attr = vec![false; arena.num_positions()];
        let mut queue: Vec<usize> = Vec::new();
        for &t in targets {
            if view[t] && !in_attr[t] {
                in_attr[t] = true;
                queue.push(t);
            }
        }
        let mut out = queue.clone();
        while let Some(q) = queue.pop() {
            for &p in &self.preds[q] {
                if !view[p] || in_attr[p] {
                    continue;
                }
                let attracted = if arena.owner[p] == player {
                    self.strategies[player as usize][p] = Some(q);
                    true
                } else {
                    arena.moves[p]
                        .iter()
                        .all(|&r| !view[r] || in_attr[r])
                };
                if attracted {
                    in_attr[p] = true;
                    queue.push(p);
                    out.push(p);
                }
            }
        }
        out
    }

    /// Attractor recursion on a total subgame.
    fn zielonka(&mut self, view: Vec<bool>) {
        let arena = self.arena;
        let Some(top) = view
            .iter()
            .enumerate()
            .filter(|(_, &v)| v)
            .map(|(p, _)| arena.priority[p])
            .max()
        else {
            return;
        };
        let player = Player::of_priority(top);
        let targets: Vec<usize> = (0..arena.num_positions())
            .filter(|&p| view[p] && arena.priority[p] == top)
            .collect();

        let head = self.attractor(&view, player, &targets);
        let mut inner = view.clone();
        for &p in &head {
            inner[p] = false;
        }
        self.zielonka(inner.clone());

        let opponent_region: Vec<usize> = (0..arena.num_positions())
            .filter(|&p| inner[p] && self.winner[p] == player.opponent())
            .collect();

        if opponent_region.is_empty() {
            // the whole subgame goes to `player`: attractor strategy on the
            // head, any move that stays inside the subgame on the targets
            for &p in view.iter().enumerate().filter(|(_, &v)| v).map(|(p, _)| p).collect::<Vec<_>>().iter() {
                self.winner[p] = player;
            }
            for &t in &targets {
                if arena.owner[t] == player {
                    let next = arena.moves[t].iter().find(|&&q| view[q]);
                    debug_assert!(next.is_some(), "subgame must be total");
                    self.strategies[player as usize][t] = next.copied();
                }
            }
        } else {
            let escape = self.attractor(&view, player.opponent(), &opponent_region);
            let mut rest = view;
            for &p in &escape {
                rest[p] = false;
            }
            self.zielonka(rest);
            for &p in &escape {
                self.winner[p] = player.opponent();
            }
        }
    }
}

/// Adequacy front end: does the verifier win the basic position of `f`
/// itself at `s`?
pub fn winning(m: &NeighborhoodModel, s: usize, f: &MuFormula) -> Result<bool, GameError> {
    let arena = build_arena(m, f)?;
    let solution = solve(&arena);
    Ok(solution.winner[arena.basic(s, 0)] == Player::Exists)
}

// ---------------------------------------------------------------------------
// strategy verification
// ---------------------------------------------------------------------------

/// Independent check of a solved game: inside `player`'s region, following
/// the strategy at own positions and keeping all opponent moves, the player
/// is never stuck, never leaves the region, and every reachable cycle's
/// maximal priority has the player's parity.
pub fn verify_strategy(arena: &Arena, solution: &Solution, player: Player) -> bool {
    let n = arena.num_positions();
    let region: Vec<bool> = (0..n).map(|p| solution.winner[p] == player).collect();
    let strategy = solution.strategy(player);

    let mut edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for p in 0..n {
        if !region[p] {
            continue;
        }
        if arena.owner[p] == player {
            if arena.is_terminal(p) {
                return false; // the player is stuck in their own region
            }
            let Some(q) = strategy[p] else {
                return false; // no strategy at an own position
            };
            if !arena.moves[p].contains(&q) || !region[q] {
                return false;
            }
            edges[p].push(q);
        } else {
            for &q in &arena.moves[p] {
                if !region[q] {
                    return false; // the opponent can escape the region
                }
                edges[p].push(q);
            }
        }
    }

    // no cycle whose maximal priority favors the opponent
    let bad_parity = |d: u32| Player::of_priority(d) != player;
    let mut bad_priorities: Vec<u32> = (0..n)
        .filter(|&p| region[p] && bad_parity(arena.priority[p]))
        .map(|p| arena.priority[p])
        .collect();
    bad_priorities.sort_unstable();
    bad_priorities.dedup();

    for d in bad_priorities {
        let keep: Vec<bool> = (0..n)
            .map(|p| region[p] && arena.priority[p] <= d)
            .collect();
        let comp = sccs(&edges, &keep);
        let mut comp_size = BTreeMap::new();
        for p in 0..n {
            if keep[p] {
                *comp_size.entry(comp[p]).or_insert(0usize) += 1;
            }
        }
        for p in 0..n {
            if !keep[p] || arena.priority[p] != d {
                continue;
            }
            let on_cycle = comp_size[&comp[p]] > 1
                || edges[p].iter().any(|&q| q == p && keep[q]);
            if on_cycle {
                return false;
            }
        }
    }
    true
}

/// Strongly connected components (Kosaraju) of the subgraph induced by
/// `keep`; returns a component id per kept node.
fn sccs(edges: &[Vec<usize>], keep: &[bool]) -> Vec<usize> {
    let n = edges.len();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for start in 0..n {
        if !keep[start] || seen[start] {
            continue;
        }
        // iterative post-order
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        seen[start] = true;
        while let Some(&mut (p, ref mut next)) = stack.last_mut() {
            if *next < edges[p].len() {
                let q = edges[p][*next];
                *next += 1;
                if keep[q] && !seen[q] {
                    seen[q] = true;
                    stack.push((q, 0));
                }
            } else {
                order.push(p);
                stack.pop();
            }
        }
    }

    let mut redges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for p in 0..n {
        if keep[p] {
            for &q in &edges[p] {
                if keep[q] {
                    redges[q].push(p);
                }
            }
        }
    }

    let mut comp = vec![usize::MAX; n];
    let mut current = 0;
    for &start in order.iter().rev() {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = current;
        while let Some(p) = stack.pop() {
            for &q in &redges[p] {
                if comp[q] == usize::MAX {
                    comp[q] = current;
                    stack.push(q);
                }
            }
        }
        current += 1;
    }
    comp
}

// ---------------------------------------------------------------------------
// debugging dump
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct DumpPosition {
    id: usize,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chooser: Option<Player>,
    #[serde(skip_serializing_if = "Option::is_none")]
    set: Option<Vec<String>>,
    formula: String,
    owner: Player,
    priority: u32,
    moves: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    winner: Option<Player>,
}

/// JSON rendering of an arena (and optionally its solution) for debugging.
pub fn dump_arena(
    m: &NeighborhoodModel,
    arena: &Arena,
    solution: Option<&Solution>,
) -> serde_json::Value {
    let positions: Vec<DumpPosition> = (0..arena.num_positions())
        .map(|id| {
            let (kind, state, chooser, set, sub) = match &arena.kinds[id] {
                PositionKind::Basic { state, sub } => (
                    "basic",
                    Some(m.state_name(*state).to_string()),
                    None,
                    None,
                    *sub,
                ),
                PositionKind::Choice { chooser, set, sub } => (
                    "choice",
                    None,
                    Some(*chooser),
                    Some(set.iter().map(|t| m.state_name(t).to_string()).collect()),
                    *sub,
                ),
            };
            DumpPosition {
                id,
                kind,
                state,
                chooser,
                set,
                formula: arena.subs[sub].to_string(),
                owner: arena.owner[id],
                priority: arena.priority[id],
                moves: arena.moves[id].clone(),
                winner: solution.map(|s| s.winner[id]),
            }
        })
        .collect();
    serde_json::json!({ "positions": positions })
}
