use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::model::{GameBundle, Table};
use crate::strategies::{reach, MixedProfile, Selector, StrategyError};

/// ε and the large constant B of the blended continuation F_ε.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizationConfig {
    pub epsilon: f64,
    pub bound: f64,
}

impl RegularizationConfig {
    pub fn check(&self) -> Result<(), SolverError> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(SolverError::Config("epsilon must lie in (0, 1/2)".into()));
        }
        if !self.bound.is_finite() {
            return Err(SolverError::Config("bound B must be finite".into()));
        }
        Ok(())
    }

    /// Also requires B to exceed every payoff the bundle can produce.
    pub fn check_for(&self, bundle: &GameBundle) -> Result<(), SolverError> {
        self.check()?;
        // payoff_bound is max |payoff| + 1
        let sup = bundle.payoff_bound() - 1.0;
        if !(self.bound > sup) {
            return Err(SolverError::Config(format!(
                "bound B = {} does not exceed the payoff bound {sup}",
                self.bound
            )));
        }
        Ok(())
    }
}

/// λ(p) = 1 for p ≥ 2ε, 0 for p ≤ ε, (p − ε)/ε in between.
pub fn lambda(p: f64, epsilon: f64) -> f64 {
    if p >= 2.0 * epsilon {
        1.0
    } else if p <= epsilon {
        0.0
    } else {
        (p - epsilon) / epsilon
    }
}

/// [`lambda`] over exact rationals.
pub fn lambda_exact(p: Ratio<i64>, epsilon: Ratio<i64>) -> Ratio<i64> {
    let two = Ratio::from_integer(2);
    if p >= two * epsilon {
        Ratio::from_integer(1)
    } else if p <= epsilon {
        Ratio::from_integer(0)
    } else {
        (p - epsilon) / epsilon
    }
}

/// The F_ε payoffs at (q, σ): per class, λ·F_C(w) + (1 − λ)·r_B.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizedPayoffs {
    /// p_{q,σ}(C) per meet block
    pub reach: Vec<f64>,
    pub lambda: Vec<f64>,
    /// `[terminal position][player]`
    pub y: Table,
    /// the distribution F_C was evaluated at, when λ > 0
    pub at: Vec<Option<Vec<f64>>>,
}

/// Blends the continuations with the constant B. Classes with λ = 0 never
/// evaluate F_C, so they need no witness.
pub fn regularized_payoffs(
    bundle: &GameBundle,
    q: &[f64],
    sigma: &MixedProfile,
    selector: &Selector,
    config: &RegularizationConfig,
) -> Result<RegularizedPayoffs, SolverError> {
    let report = reach(bundle, q, sigma)?;
    let bush = bundle.bush();
    let n = bush.num_players();
    let mut y = vec![vec![config.bound; n]; bush.terminals().len()];
    let mut lambdas = Vec::with_capacity(bundle.meet().len());
    let mut at = Vec::with_capacity(bundle.meet().len());
    for (b, block) in bundle.meet().blocks().iter().enumerate() {
        let l = lambda(report.class[b], config.epsilon);
        lambdas.push(l);
        if l == 0.0 {
            at.push(None);
            continue;
        }
        let w = report.conditional[b]
            .clone()
            .expect("a class with positive λ is reached");
        let model = bundle.continuation(b);
        let values = match selector {
            Selector::Nearest => model.evaluate_nearest(&w),
            _ => model.evaluate(&w),
        };
        let pick = match selector {
            Selector::Branch(choice) => choice.get(b).copied().unwrap_or(0),
            _ => 0,
        };
        let Some(table) = values.get(pick.min(values.len().saturating_sub(1))) else {
            return Err(StrategyError::NoPlan {
                class: bundle.class_names(block),
                w,
            }
            .into());
        };
        for (&t, row) in block.iter().zip(table) {
            let pos = bush.terminal_position(t).expect("terminal");
            for (o, v) in y[pos].iter_mut().zip(row) {
                *o = l * v + (1.0 - l) * config.bound;
            }
        }
        at.push(Some(w));
    }
    Ok(RegularizedPayoffs {
        reach: report.class,
        lambda: lambdas,
        y,
        at,
    })
}

/// One row of the ε → 0 diagnostic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonRow {
    pub epsilon: f64,
    /// expected payoffs of each certified equilibrium of G_ε
    pub payoffs: Vec<Vec<f64>>,
    pub profiles: Vec<MixedProfile>,
}

/// Solves the regularized game for each ε in turn. Purely descriptive: the
/// rows show how the G_ε equilibria move as ε shrinks.
pub fn epsilon_diagnostic(
    bundle: &GameBundle,
    q: &[f64],
    epsilons: &[f64],
    bound: f64,
    config: &super::SolverConfig,
) -> Result<Vec<EpsilonRow>, SolverError> {
    let mut rows = Vec::new();
    for &epsilon in epsilons {
        let mut cfg = config.clone();
        cfg.regularization = Some(RegularizationConfig { epsilon, bound });
        let report = super::solve_myopic(bundle, q, &cfg)?;
        rows.push(EpsilonRow {
            epsilon,
            payoffs: report
                .equilibria
                .iter()
                .map(|e| e.payoffs.clone())
                .collect(),
            profiles: report.equilibria.into_iter().map(|e| e.sigma).collect(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn breakpoints() {
        let e = 0.125;
        assert_eq!(lambda(2.0 * e, e), 1.0);
        assert_eq!(lambda(e, e), 0.0);
        assert_eq!(lambda(1.5 * e, e), 0.5);
        assert_eq!(lambda(0.0, e), 0.0);
        assert_eq!(lambda(1.0, e), 1.0);
    }

    #[test]
    fn exact_matches_float_on_dyadics() {
        let e = Ratio::new(1, 64);
        for k in 0..=256 {
            let p = Ratio::new(k, 2048);
            let exact = lambda_exact(p, e);
            let float = lambda(k as f64 / 2048.0, 1.0 / 64.0);
            assert_eq!(*exact.numer() as f64 / *exact.denom() as f64, float);
        }
    }
}
