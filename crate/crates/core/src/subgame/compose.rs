use super::construct::{root_values, transfer_behaviour};
use super::recall::has_perfect_recall;
use super::sets::SubgameSet;
use super::SubgameError;
use crate::model::{table_distance, GameBundle, Table, VertexId};
use crate::strategies::{behaviour_to_mixed, reach, BehaviourProfile, MixedProfile, Plan};

/// A profile and plan of the full bundle assembled from a factor solution
/// and a subgame solution.
#[derive(Clone, Debug, PartialEq)]
pub struct Composition {
    pub sigma: MixedProfile,
    pub plan: Plan,
}

/// Glues an m-equilibrium of Γ/S (`factor`, `factor_plan`) with one of
/// Γ|_S (`sub`, `sub_plan`). Behaviour at every information set comes from
/// whichever game contains it; payoffs of T∖S come from the factor plan and
/// those of T∩S from the subgame plan.
///
/// When S is reached with probability above `tau` the subgame plan must sit
/// at the induced conditional on R'. With `payoff_tol` set, the factor's
/// payoffs at R' must also match the subgame's root values.
#[allow(clippy::too_many_arguments)]
pub fn compose(
    bundle: &GameBundle,
    s: &SubgameSet,
    factor: &GameBundle,
    factor_plan: &Plan,
    sub: &GameBundle,
    sub_plan: &Plan,
    tau: f64,
    payoff_tol: Option<f64>,
) -> Result<Composition, SubgameError> {
    let bush = bundle.bush();
    let recall = has_perfect_recall(bush);
    if !recall.ok {
        return Err(SubgameError::Recall(recall.describe(bush)));
    }
    let fbush = factor.bush();
    let sbush = sub.bush();
    let at_roots: Vec<f64> = sbush
        .roots()
        .iter()
        .map(|&u| {
            let t = fbush.v(sbush.name(u));
            factor_plan.reach.terminal[fbush.terminal_position(t).expect("R' is terminal in Γ/S")]
        })
        .collect();
    let total: f64 = at_roots.iter().sum();
    if total > tau {
        let distance = at_roots
            .iter()
            .zip(&sub_plan.q)
            .map(|(p, q)| (p / total - q).abs())
            .fold(0.0, f64::max);
        if distance > tau {
            return Err(SubgameError::ConditionalMismatch { distance });
        }
    }
    if let Some(tol) = payoff_tol {
        let values = root_values(sub, sub_plan)?;
        let factor_rows: Table = sbush
            .roots()
            .iter()
            .map(|&u| {
                let t = fbush.v(sbush.name(u));
                factor_plan.y[fbush.terminal_position(t).expect("terminal")].clone()
            })
            .collect();
        let distance = table_distance(&values, &factor_rows);
        if distance > tol {
            return Err(SubgameError::PayoffMismatch { distance });
        }
    }

    let mut probs = BehaviourProfile::uniform(bush).probs;
    transfer_behaviour(fbush, &factor_plan.sigma, bush, &mut probs)?;
    transfer_behaviour(sbush, &sub_plan.sigma, bush, &mut probs)?;
    let form = bush.form()?;
    let sigma = behaviour_to_mixed(form, &BehaviourProfile { probs });

    let y: Table = bush
        .terminals()
        .iter()
        .map(|&t| {
            let name = bush.name(t);
            if s.contains(t) {
                let st = sbush.v(name);
                sub_plan.y[sbush.terminal_position(st).expect("terminal")].clone()
            } else {
                let ft = fbush.v(name);
                factor_plan.y[fbush.terminal_position(ft).expect("terminal")].clone()
            }
        })
        .collect();

    let report = reach(bundle, &factor_plan.q, &sigma)?;
    let witness = bundle
        .meet()
        .blocks()
        .iter()
        .enumerate()
        .map(|(b, block)| {
            if report.conditional[b].is_some() {
                return None;
            }
            let (game, plan) = if block.iter().all(|&t| s.contains(t)) {
                (sub, sub_plan)
            } else {
                (factor, factor_plan)
            };
            let ids: Vec<VertexId> = block.iter().map(|&t| game.bush().v(bush.name(t))).collect();
            let k = game.meet().find(&ids)?;
            match (&plan.reach.conditional[k], &plan.witness[k]) {
                (Some(c), _) => Some(c.clone()),
                (None, w) => w.clone(),
            }
        })
        .collect();
    let plan = Plan {
        q: factor_plan.q.clone(),
        sigma: sigma.clone(),
        y,
        witness,
        reach: report,
    };
    Ok(Composition { sigma, plan })
}
