//! Myopic equilibria: the retraction r, certificates, the equilibrium
//! search, λ-regularization, sweeps over root distributions and the
//! inductive subgame-bundle-perfect solver.

mod certificate;
mod commitment;
mod dynamics;
mod evaluate;
mod myopic;
mod perfect;
mod regularize;
mod simplex;
mod support;
mod sweep;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use certificate::{myopic_residual, verify_myopic, MyopicCertificate};
pub use commitment::{commitment_optimum, CommitmentOptimum};
pub use myopic::{solve_myopic, Diagnostics, Equilibrium, FreeDirection, SolveReport, Source};
pub use perfect::{
    solve_bundle_perfect, solve_perfect_at, PerfectEquilibrium, PerfectPoint, PerfectReport, Route,
};
pub use regularize::{
    epsilon_diagnostic, lambda, lambda_exact, regularized_payoffs, EpsilonRow,
    RegularizationConfig, RegularizedPayoffs,
};
pub use simplex::{nash_residual, retract, simplex_project};
pub use sweep::{barycentric_grid, sweep, SweepEquilibrium, SweepPoint, SweepTable};

use crate::model::ModelError;
use crate::strategies::{Selector, StrategyError};
use crate::subgame::SubgameError;

#[derive(Clone, Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("subgame: {0}")]
    Subgame(Box<SubgameError>),
    #[error("the plan is not valid for its profile: {0}")]
    InvalidPlan(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("perfect recall fails: {0}")]
    Recall(String),
    #[error("grid of {points} points exceeds the cap of {cap}")]
    GridTooLarge { points: usize, cap: usize },
}

impl From<SubgameError> for SolverError {
    fn from(e: SubgameError) -> Self {
        SolverError::Subgame(Box::new(e))
    }
}

/// Knobs shared by the equilibrium search, sweeps and the perfect solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// certificate tolerance τ
    pub tol: f64,
    /// support enumeration runs when the product over players of the
    /// payoff-distinct strategy counts is at most this
    pub support_cap: usize,
    /// and when the number of support combinations is at most this
    pub support_combination_cap: usize,
    /// multistart count for the damped iteration
    pub starts: usize,
    pub eta: f64,
    pub max_iters: usize,
    pub step_tol: f64,
    /// iterations without halving the residual before η is halved
    pub stall_window: usize,
    pub max_halvings: usize,
    /// L∞ distance under which two equilibria are the same
    pub dedupe_tol: f64,
    pub selector: Selector,
    /// cap on selector branches for set-valued continuations
    pub branch_cap: usize,
    pub seed: u64,
    /// grid mesh 1/k on Δ(R)
    pub mesh: usize,
    pub grid_cap: usize,
    /// size of the probe step used to detect directions of equilibrium continua
    pub probe: f64,
    pub regularization: Option<RegularizationConfig>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            support_cap: 64,
            support_combination_cap: 100_000,
            starts: 32,
            eta: 0.25,
            max_iters: 100_000,
            step_tol: 1e-11,
            stall_window: 500,
            max_halvings: 8,
            dedupe_tol: 1e-6,
            selector: Selector::First,
            branch_cap: 16,
            seed: 0,
            mesh: 16,
            grid_cap: 20_000,
            probe: 1e-4,
            regularization: None,
        }
    }
}

impl SolverConfig {
    pub fn check(&self) -> Result<(), SolverError> {
        if !(self.tol > 0.0) {
            return Err(SolverError::Config("tolerance must be positive".into()));
        }
        if self.mesh < 1 {
            return Err(SolverError::Config(
                "mesh denominator must be at least 1".into(),
            ));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(SolverError::Config("damping must lie in (0, 1]".into()));
        }
        if let Some(r) = &self.regularization {
            r.check()?;
        }
        Ok(())
    }
}
