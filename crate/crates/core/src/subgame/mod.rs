//! Subgame bundles: detection, the lattice of subgame sets, restriction and
//! factor games, perfect recall, S-perfectness, composition and solvability.

mod compose;
mod construct;
mod perfect;
mod recall;
mod sets;
mod solvable;

use thiserror::Error;

pub use compose::{compose, Composition};
pub use construct::{factor, factor_classes, restrict, root_values};
pub use perfect::{is_s_perfect, PerfectnessReport, Verdict};
pub use recall::{has_perfect_recall, RecallReport};
pub use sets::{
    closure, enumerate_subgame_sets, is_subgame_set, relevant_subgame_sets, SubgameCheck,
    SubgameLattice, SubgameReport, SubgameSet, DEFAULT_FAMILY_CAP,
};
pub use solvable::{coarsen_chain, factor_moves_once, is_solvable};

use crate::model::ModelError;
use crate::solver::SolverError;
use crate::strategies::StrategyError;

#[derive(Clone, Debug, Error)]
pub enum SubgameError {
    #[error("not a subgame set: {}", .0.join("; "))]
    NotSubgameSet(Vec<String>),
    #[error("the subgame family has more than {cap} members")]
    TooMany { cap: usize },
    #[error("perfect recall fails: {0}")]
    Recall(String),
    #[error("subgame root distribution differs from the induced conditional by {distance:.3e}")]
    ConditionalMismatch { distance: f64 },
    #[error(
        "factor payoffs at the subgame roots differ from the subgame values by {distance:.3e}"
    )]
    PayoffMismatch { distance: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("solver: {0}")]
    Solver(Box<SolverError>),
}

impl From<SolverError> for SubgameError {
    fn from(e: SolverError) -> Self {
        SubgameError::Solver(Box::new(e))
    }
}
