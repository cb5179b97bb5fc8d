use serde::{Deserialize, Serialize};

use super::profile::MixedProfile;
use super::reach::{player_reach, report_from_terminal, terminal_reach, ReachReport};
use super::StrategyError;
use crate::model::{GameBundle, Table};

/// Membership tolerance for `(w, y) ∈ F_C` (L2 distance to the value set).
pub const MEMBERSHIP_TOL: f64 = 1e-6;

/// How one element is picked from a set-valued continuation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selector {
    /// The first value in the model's order.
    #[default]
    First,
    /// The first value of the sample point nearest to the conditional.
    Nearest,
    /// Per meet block, the index of the value to take (clamped to the
    /// number available; missing entries mean 0).
    Branch(Vec<usize>),
}

impl Selector {
    fn pick(&self, bundle: &GameBundle, block: usize, w: &[f64]) -> Option<Table> {
        let model = bundle.continuation(block);
        match self {
            Selector::First => model.evaluate(w).into_iter().next(),
            Selector::Nearest => model.evaluate_nearest(w).into_iter().next(),
            Selector::Branch(choice) => {
                let mut values = model.evaluate(w);
                if values.is_empty() {
                    return None;
                }
                let k = choice
                    .get(block)
                    .copied()
                    .unwrap_or(0)
                    .min(values.len() - 1);
                Some(values.swap_remove(k))
            }
        }
    }
}

/// A payoff table y consistent with the continuations at the conditionals
/// induced by (q, σ).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub q: Vec<f64>,
    pub sigma: MixedProfile,
    /// `[terminal position][player]`
    pub y: Table,
    /// per meet block: the distribution used for an unreached class
    pub witness: Vec<Option<Vec<f64>>>,
    pub reach: ReachReport,
}

impl Plan {
    /// Σ_t P(t) y^n_t for every player.
    pub fn expected_payoffs(&self) -> Vec<f64> {
        let n = self.y.first().map_or(0, |r| r.len());
        let mut out = vec![0.0; n];
        for (p, row) in self.reach.terminal.iter().zip(&self.y) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += p * v;
            }
        }
        out
    }
}

pub fn make_plan(
    bundle: &GameBundle,
    q: &[f64],
    sigma: &MixedProfile,
    selector: &Selector,
) -> Result<Plan, StrategyError> {
    make_plan_with_witness(bundle, q, sigma, selector, &[])
}

/// Like [`make_plan`]; `witness[b]`, when given, replaces the barycenter as
/// the distribution for block `b` if that block is unreached.
pub fn make_plan_with_witness(
    bundle: &GameBundle,
    q: &[f64],
    sigma: &MixedProfile,
    selector: &Selector,
    witness: &[Option<Vec<f64>>],
) -> Result<Plan, StrategyError> {
    let bush = bundle.bush();
    let form = bush.form()?;
    if q.len() != bush.roots().len() {
        return Err(StrategyError::Shape(format!(
            "q has {} entries for {} roots",
            q.len(),
            bush.roots().len()
        )));
    }
    let terminal = terminal_reach(form, q, sigma);
    let reach = report_from_terminal(bundle, q, terminal);
    let n = bush.num_players();
    let mut y = vec![vec![0.0; n]; bush.terminals().len()];
    let mut witnesses = vec![None; bundle.meet().len()];
    for (b, block) in bundle.meet().blocks().iter().enumerate() {
        let w = match &reach.conditional[b] {
            Some(c) => c.clone(),
            None => {
                let w = witness
                    .get(b)
                    .cloned()
                    .flatten()
                    .unwrap_or_else(|| vec![1.0 / block.len() as f64; block.len()]);
                witnesses[b] = Some(w.clone());
                w
            }
        };
        let Some(table) = selector.pick(bundle, b, &w) else {
            return Err(StrategyError::NoPlan {
                class: bundle.class_names(block),
                w,
            });
        };
        for (&t, row) in block.iter().zip(table) {
            y[bush.terminal_position(t).expect("terminal")] = row;
        }
    }
    Ok(Plan {
        q: q.to_vec(),
        sigma: sigma.clone(),
        y,
        witness: witnesses,
        reach,
    })
}

/// Checks the plan invariants: every block's payoffs lie within `tol` of the
/// continuation at its conditional, or at its witness when unreached.
pub fn check_plan(bundle: &GameBundle, plan: &Plan, tol: f64) -> Result<(), String> {
    let bush = bundle.bush();
    for (b, block) in bundle.meet().blocks().iter().enumerate() {
        let w = match (&plan.reach.conditional[b], &plan.witness[b]) {
            (Some(c), _) => c.clone(),
            (None, Some(w)) => w.clone(),
            (None, None) => {
                return Err(format!(
                    "class {:?} is unreached and has no witness",
                    bundle.class_names(block)
                ))
            }
        };
        let y: Table = block
            .iter()
            .map(|&t| plan.y[bush.terminal_position(t).expect("terminal")].clone())
            .collect();
        let d = bundle.continuation(b).distance(&w, &y);
        if !(d <= tol) {
            return Err(format!(
                "payoffs of class {:?} are {d:.3e} away from the continuation",
                bundle.class_names(block)
            ));
        }
    }
    Ok(())
}

/// f^n_φ(s) for every pure strategy s of `player`: the expected frozen
/// payoff y^n when `player` switches to s and everyone else keeps σ.
pub fn action_values(
    bundle: &GameBundle,
    plan: &Plan,
    player: usize,
) -> Result<Vec<f64>, StrategyError> {
    let form = bundle.bush().form()?;
    let pr = player_reach(form, &plan.sigma);
    Ok(values_for(form, &pr, plan, player))
}

pub fn all_action_values(bundle: &GameBundle, plan: &Plan) -> Result<Vec<Vec<f64>>, StrategyError> {
    let form = bundle.bush().form()?;
    let pr = player_reach(form, &plan.sigma);
    Ok((0..form.num_players())
        .map(|n| values_for(form, &pr, plan, n))
        .collect())
}

fn values_for(form: &super::GameForm, pr: &[Vec<f64>], plan: &Plan, player: usize) -> Vec<f64> {
    let mut out = vec![0.0; form.spaces[player].count];
    for (ti, path) in form.paths.iter().enumerate() {
        let mut base = plan.q[path.root] * path.nature * plan.y[ti][player];
        if base == 0.0 {
            continue;
        }
        for (m, per) in pr.iter().enumerate() {
            if m != player {
                base *= per[ti];
            }
        }
        if base == 0.0 {
            continue;
        }
        for &s in &form.consistent[player][ti] {
            out[s as usize] += base;
        }
    }
    out
}

/// f^n(s) for all players against a fixed payoff table `y`.
pub(crate) fn values_from_table(
    form: &super::GameForm,
    q: &[f64],
    sigma: &MixedProfile,
    y: &Table,
) -> Vec<Vec<f64>> {
    let pr = player_reach(form, sigma);
    let shim = Plan {
        q: q.to_vec(),
        sigma: sigma.clone(),
        y: y.clone(),
        witness: Vec::new(),
        reach: ReachReport {
            q: Vec::new(),
            terminal: Vec::new(),
            class: Vec::new(),
            conditional: Vec::new(),
        },
    };
    (0..form.num_players())
        .map(|n| values_for(form, &pr, &shim, n))
        .collect()
}
