use serde::{Deserialize, Serialize};

use super::form::GameForm;
use super::profile::MixedProfile;
use super::StrategyError;
use crate::model::GameBundle;

/// Classes reached with probability at most this are treated as unreached.
pub const REACH_EPS: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachReport {
    pub q: Vec<f64>,
    /// aligned with `GameBush::terminals`
    pub terminal: Vec<f64>,
    /// p_{q,σ}(C) per meet block
    pub class: Vec<f64>,
    /// P_{q,σ}(·|C) in block member order, when the class is reached
    pub conditional: Vec<Option<Vec<f64>>>,
}

impl ReachReport {
    pub fn total(&self) -> f64 {
        self.terminal.iter().sum()
    }
}

/// Per-player probability that the player's own choices follow each
/// terminal's path.
pub(crate) fn player_reach(form: &GameForm, sigma: &MixedProfile) -> Vec<Vec<f64>> {
    form.consistent
        .iter()
        .enumerate()
        .map(|(n, per_t)| {
            per_t
                .iter()
                .map(|list| list.iter().map(|&s| sigma.weights[n][s as usize]).sum())
                .collect()
        })
        .collect()
}

/// Terminal probabilities q(root) · chance · ∏_n Σ_{s consistent} σ^n(s).
pub fn terminal_reach(form: &GameForm, q: &[f64], sigma: &MixedProfile) -> Vec<f64> {
    let pr = player_reach(form, sigma);
    form.paths
        .iter()
        .enumerate()
        .map(|(ti, path)| {
            let mut p = q[path.root] * path.nature;
            for per in &pr {
                p *= per[ti];
            }
            p
        })
        .collect()
}

pub fn reach(
    bundle: &GameBundle,
    q: &[f64],
    sigma: &MixedProfile,
) -> Result<ReachReport, StrategyError> {
    let bush = bundle.bush();
    let form = bush.form()?;
    if q.len() != bush.roots().len() {
        return Err(StrategyError::Shape(format!(
            "q has {} entries for {} roots",
            q.len(),
            bush.roots().len()
        )));
    }
    sigma.check(form)?;
    let terminal = terminal_reach(form, q, sigma);
    Ok(report_from_terminal(bundle, q, terminal))
}

pub(crate) fn report_from_terminal(
    bundle: &GameBundle,
    q: &[f64],
    terminal: Vec<f64>,
) -> ReachReport {
    let bush = bundle.bush();
    let meet = bundle.meet();
    let mut class = Vec::with_capacity(meet.len());
    let mut conditional = Vec::with_capacity(meet.len());
    for block in meet.blocks() {
        let probs: Vec<f64> = block
            .iter()
            .map(|&t| terminal[bush.terminal_position(t).expect("terminal")])
            .collect();
        let total: f64 = probs.iter().sum();
        class.push(total);
        conditional.push((total > REACH_EPS).then(|| probs.iter().map(|p| p / total).collect()));
    }
    ReachReport {
        q: q.to_vec(),
        terminal,
        class,
        conditional,
    }
}

/// Probability of passing through `v`.
pub fn vertex_reach(
    bush: &crate::model::GameBush,
    form: &GameForm,
    q: &[f64],
    sigma: &MixedProfile,
    v: crate::model::VertexId,
) -> f64 {
    use crate::model::Owner;
    let path = bush.path_to(v);
    let mut p = q[bush.root_position(path[0]).unwrap_or(0)];
    for n in 0..form.num_players() {
        let needs = super::form::own_choices(bush, &form.spaces[n], v);
        let mass: f64 = (0..form.spaces[n].count)
            .filter(|&s| super::form::consistent_with(&form.spaces[n].decode(s), &needs))
            .map(|s| sigma.weights[n][s])
            .sum();
        p *= mass;
    }
    for w in path.windows(2) {
        if let Some(Owner::Nature(k)) = bush.owner(w[0]) {
            p *= bush.nature_nodes()[k]
                .outcomes
                .iter()
                .find(|(c, _)| *c == w[1])
                .map_or(0.0, |(_, pr)| pr.value());
        }
    }
    p
}
