use serde::{Deserialize, Serialize};

use super::simplex::nash_residual;
use super::SolverError;
use crate::model::GameBundle;
use crate::strategies::{all_action_values, check_plan, Plan, MEMBERSHIP_TOL};

/// Evidence that (σ, φ) is a myopic equilibrium: the per-strategy payoffs
/// and the largest weighted shortfall max σ^a (max_b v^b − v^a).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MyopicCertificate {
    pub sigma: Vec<Vec<f64>>,
    /// f^n_φ(s) per player and pure strategy
    pub values: Vec<Vec<f64>>,
    pub residual: f64,
    pub per_player: Vec<f64>,
    /// ‖r(σ + v) − σ‖ for the same (σ, v)
    pub nash_residual: f64,
    pub tol: f64,
    pub valid: bool,
}

fn player_residual(sigma: &[f64], values: &[f64]) -> f64 {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    sigma
        .iter()
        .zip(values)
        .map(|(s, v)| s * (best - v))
        .fold(0.0, f64::max)
}

/// max over players and labels of σ^a (max_b v^b − v^a).
pub fn myopic_residual(sigma: &[Vec<f64>], values: &[Vec<f64>]) -> f64 {
    sigma
        .iter()
        .zip(values)
        .map(|(s, v)| player_residual(s, v))
        .fold(0.0, f64::max)
}

impl MyopicCertificate {
    pub fn from_values(sigma: &[Vec<f64>], values: Vec<Vec<f64>>, tol: f64) -> Self {
        let per_player: Vec<f64> = sigma
            .iter()
            .zip(&values)
            .map(|(s, v)| player_residual(s, v))
            .collect();
        let residual = per_player.iter().copied().fold(0.0, f64::max);
        let sizes: Vec<usize> = sigma.iter().map(Vec::len).collect();
        let flat_s: Vec<f64> = sigma.iter().flatten().copied().collect();
        let flat_v: Vec<f64> = values.iter().flatten().copied().collect();
        Self {
            sigma: sigma.to_vec(),
            nash_residual: nash_residual(&flat_s, &flat_v, &sizes),
            values,
            residual,
            per_player,
            tol,
            valid: residual <= tol,
        }
    }

    /// Best payoff per player, r^n = max_s f^n_φ(s).
    pub fn best_values(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|v| v.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }
}

/// Certificate for the profile and plan stored in `plan`. The plan must be
/// consistent with the continuations of `bundle`.
pub fn verify_myopic(
    bundle: &GameBundle,
    plan: &Plan,
    tol: f64,
) -> Result<MyopicCertificate, SolverError> {
    check_plan(bundle, plan, MEMBERSHIP_TOL).map_err(SolverError::InvalidPlan)?;
    let values = all_action_values(bundle, plan)?;
    Ok(MyopicCertificate::from_values(
        &plan.sigma.weights,
        values,
        tol,
    ))
}
