//! A workbench for the fixpoint modal logic of monotone neighborhood
//! structures: denotational and game semantics, neighborhood bisimulations,
//! a second-order companion language with a syntactic embedding, and the
//! elimination of global modalities against a finite universe model.

pub mod bisim;
pub mod denotation;
pub mod game;
pub mod harness;
pub mod model;
pub mod set;
pub mod syntax;
pub mod translate;

pub use model::{NeighborhoodModel, PointedModel};
pub use set::StateSet;
pub use syntax::{MuFormula, NmsoFormula, Var};
