use serde::{Deserialize, Serialize};

use super::certificate::MyopicCertificate;
use super::dynamics::multistart;
use super::evaluate::Evaluator;
use super::support::{combination_count, enumerate_supports, representatives};
use super::{SolverConfig, SolverError};
use crate::model::{table_distance, GameBundle};
use crate::strategies::{MixedProfile, Plan, Selector};

/// Iteration budget for the damped runs when support enumeration already
/// covered the game.
const COMPLEMENT_ITERS: usize = 2_000;

/// Where a certified equilibrium came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Support,
    Dynamics,
    /// assembled from a factor solution and a subgame solution
    Composed,
}

/// Moving `probe` mass of `player` from strategy `from` to `to` keeps the
/// profile certified: a direction along a continuum of equilibria.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeDirection {
    pub player: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub sigma: MixedProfile,
    pub plan: Plan,
    pub certificate: MyopicCertificate,
    /// expected payoff Σ_t P(t) y_t per player
    pub payoffs: Vec<f64>,
    pub selector: Selector,
    pub source: Source,
    pub free_directions: Vec<FreeDirection>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub support_enumeration: bool,
    pub support_combinations: u128,
    pub dynamics_starts: usize,
    pub dynamics_converged: usize,
    pub dynamics_iterations: usize,
    /// candidates discarded because their certificate failed
    pub uncertified: usize,
    /// secondary finds dropped because a certified segment joins them to an
    /// equilibrium already listed
    pub collapsed: usize,
    pub branches: usize,
    pub branches_truncated: bool,
    /// evaluation failures, e.g. empty continuations
    pub errors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub equilibria: Vec<Equilibrium>,
    pub diagnostics: Diagnostics,
}

fn check_q(bundle: &GameBundle, q: &[f64]) -> Result<(), SolverError> {
    let k = bundle.bush().roots().len();
    if q.len() != k {
        return Err(SolverError::Config(format!(
            "q has {} entries for {k} roots",
            q.len()
        )));
    }
    if q.iter().any(|&x| !(x >= 0.0)) || (q.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(SolverError::Config(format!(
            "q = {q:?} is not a distribution"
        )));
    }
    Ok(())
}

/// Selector branches to explore: the configured selector, or every
/// combination of value indices when some continuation is set-valued.
fn branches(bundle: &GameBundle, config: &SolverConfig) -> (Vec<Selector>, bool) {
    if config.selector != Selector::First {
        return (vec![config.selector.clone()], false);
    }
    let counts: Vec<usize> = bundle
        .continuations()
        .iter()
        .map(|m| m.max_branches().max(1))
        .collect();
    if counts.iter().all(|&c| c == 1) {
        return (vec![Selector::First], false);
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; counts.len()];
    let cap = config.branch_cap.max(1);
    loop {
        if out.len() == cap {
            return (out, true);
        }
        out.push(Selector::Branch(idx.clone()));
        let mut p = 0;
        loop {
            if p == idx.len() {
                return (out, false);
            }
            idx[p] += 1;
            if idx[p] < counts[p] {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

/// Certified myopic equilibria at root distribution `q`: support
/// enumeration when the game is small, plus damped multistart iteration.
/// Candidates that fail their certificate are counted, never returned.
pub fn solve_myopic(
    bundle: &GameBundle,
    q: &[f64],
    config: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    config.check()?;
    check_q(bundle, q)?;
    let form = bundle.bush().form()?.clone();
    let (selectors, truncated) = branches(bundle, config);
    let mut diag = Diagnostics {
        branches: selectors.len(),
        branches_truncated: truncated,
        ..Diagnostics::default()
    };
    let mut found: Vec<Equilibrium> = Vec::new();
    for selector in selectors {
        let ev = Evaluator::new(bundle, q, selector.clone(), config.regularization.clone());
        let ev = match ev {
            Ok(ev) => ev,
            Err(SolverError::Strategy(e)) => {
                diag.errors.push(e.to_string());
                continue;
            }
            Err(e) => return Err(e),
        };
        // (profile, source, may be dropped when joined to a listed equilibrium)
        let mut candidates: Vec<(MixedProfile, Source, bool)> = Vec::new();
        let reduced: Vec<usize> = representatives(&form).iter().map(Vec::len).collect();
        let combos = combination_count(&reduced);
        diag.support_combinations = diag.support_combinations.max(combos);
        let enumerate = reduced.iter().product::<usize>() <= config.support_cap
            && combos <= config.support_combination_cap as u128;
        if enumerate {
            diag.support_enumeration = true;
            candidates.extend(
                enumerate_supports(&ev, config.seed)
                    .into_iter()
                    .map(|(s, primary)| (s, Source::Support, !primary)),
            );
        }
        let iters = if enumerate {
            config.max_iters.min(COMPLEMENT_ITERS)
        } else {
            config.max_iters
        };
        let (dyn_found, converged, iterations) = multistart(&ev, config, iters);
        diag.dynamics_starts += config.starts;
        diag.dynamics_converged += converged;
        diag.dynamics_iterations += iterations;
        candidates.extend(dyn_found.into_iter().map(|s| (s, Source::Dynamics, true)));

        for (sigma, source, collapsible) in candidates {
            let (plan, cert) = match ev.certify(&sigma, config.tol) {
                Ok(x) => x,
                Err(e) => {
                    let msg = e.to_string();
                    if !diag.errors.contains(&msg) {
                        diag.errors.push(msg);
                    }
                    continue;
                }
            };
            if !cert.valid {
                diag.uncertified += 1;
                continue;
            }
            let duplicate = found.iter().any(|e| {
                e.sigma.linf_distance(&sigma) <= config.dedupe_tol
                    && table_distance(&e.plan.y, &plan.y) <= config.dedupe_tol
            });
            if duplicate {
                continue;
            }
            if collapsible
                && found
                    .iter()
                    .any(|e| e.selector == selector && joined(&ev, &e.sigma, &sigma, config.tol))
            {
                diag.collapsed += 1;
                continue;
            }
            let free_directions = free_directions(&ev, &sigma, config);
            found.push(Equilibrium {
                payoffs: plan.expected_payoffs(),
                sigma,
                plan,
                certificate: cert,
                selector: selector.clone(),
                source,
                free_directions,
            });
        }
    }
    found.sort_by(|a, b| {
        a.sigma
            .flat()
            .iter()
            .zip(b.sigma.flat().iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(SolveReport {
        equilibria: found,
        diagnostics: diag,
    })
}

/// Whether the segment from `a` to `b` stays certified at its quarter
/// points, i.e. both lie on one continuum of equilibria.
fn joined(ev: &Evaluator, a: &MixedProfile, b: &MixedProfile, tol: f64) -> bool {
    [0.25, 0.5, 0.75].iter().all(|&t| {
        let weights = a
            .weights
            .iter()
            .zip(&b.weights)
            .map(|(x, y)| {
                x.iter()
                    .zip(y)
                    .map(|(u, v)| (1.0 - t) * u + t * v)
                    .collect()
            })
            .collect();
        matches!(ev.certify(&MixedProfile::new(weights), tol), Ok((_, c)) if c.valid)
    })
}

/// Probes every single-player mass transfer of size `config.probe` and
/// keeps those that stay certified.
fn free_directions(
    ev: &Evaluator,
    sigma: &MixedProfile,
    config: &SolverConfig,
) -> Vec<FreeDirection> {
    let mut out = Vec::new();
    for (n, w) in sigma.weights.iter().enumerate() {
        for from in 0..w.len() {
            if w[from] < config.probe {
                continue;
            }
            for to in 0..w.len() {
                if to == from {
                    continue;
                }
                let mut moved = sigma.clone();
                moved.weights[n][from] -= config.probe;
                moved.weights[n][to] += config.probe;
                if let Ok((_, cert)) = ev.certify(&moved, config.tol) {
                    if cert.valid {
                        out.push(FreeDirection {
                            player: n,
                            from,
                            to,
                        });
                    }
                }
            }
        }
    }
    out
}
