//! Pure, mixed and behaviour strategies, reach probabilities, plans and the
//! per-strategy payoffs f^n_φ(s).

mod form;
mod plan;
mod profile;
mod reach;

use thiserror::Error;

pub use form::{enumerate_pure, GameForm, PureStrategy, StrategySpace, TerminalPath};
pub(crate) use plan::values_from_table;
pub use plan::{
    action_values, all_action_values, check_plan, make_plan, make_plan_with_witness, Plan,
    Selector, MEMBERSHIP_TOL,
};
pub use profile::{
    behaviour_to_mixed, mixed_to_behaviour, BehaviourProfile, KuhnTranslation, MixedProfile,
    ProfileFile, WeightedStrategy,
};
pub use reach::{reach, terminal_reach, vertex_reach, ReachReport, REACH_EPS};

/// Default cap on |S_n| for a single player.
pub const DEFAULT_STRATEGY_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum StrategyError {
    #[error("player {player} has {count} pure strategies, above the cap of {cap}")]
    TooManyStrategies {
        player: String,
        count: u128,
        cap: usize,
    },
    #[error("no plan: the continuation of class {class:?} is empty at {w:?}")]
    NoPlan { class: Vec<String>, w: Vec<f64> },
    #[error("shape mismatch: {0}")]
    Shape(String),
}
