use serde::{Deserialize, Serialize};

use super::construct::{restrict, transfer_behaviour};
use super::sets::SubgameSet;
use super::SubgameError;
use crate::model::{GameBundle, Table, VertexId};
use crate::solver::{barycentric_grid, verify_myopic};
use crate::strategies::{
    behaviour_to_mixed, make_plan_with_witness, vertex_reach, BehaviourProfile, MixedProfile, Plan,
    Selector,
};

/// Size of the uniform tremble used to build a conditional for an
/// unreached subgame.
const TREMBLE: f64 = 1e-3;

/// Outcome of an S-perfectness check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    /// the restriction is an m-equilibrium of Γ|_S at `q_prime`
    CertifiedTrue {
        q_prime: Vec<f64>,
        residual: f64,
    },
    CertifiedFalse {
        reason: String,
    },
    /// S is unreached and no grid point of mesh `resolution` worked
    Unresolved {
        resolution: f64,
    },
}

impl Verdict {
    pub fn is_true(&self) -> bool {
        matches!(self, Verdict::CertifiedTrue { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerfectnessReport {
    pub set: Vec<String>,
    /// probability that play enters S
    pub reach: f64,
    pub verdict: Verdict,
}

/// The profile σ restricted to Γ|_S through behaviour strategies.
pub(crate) fn restrict_profile(
    bundle: &GameBundle,
    sub: &GameBundle,
    sigma: &MixedProfile,
) -> Result<MixedProfile, SubgameError> {
    let mut probs = BehaviourProfile::uniform(sub.bush()).probs;
    transfer_behaviour(bundle.bush(), sigma, sub.bush(), &mut probs)?;
    Ok(behaviour_to_mixed(
        sub.bush().form()?,
        &BehaviourProfile { probs },
    ))
}

/// Probability of entering S through each of its roots R'.
pub(crate) fn root_reach(
    bundle: &GameBundle,
    s: &SubgameSet,
    q: &[f64],
    sigma: &MixedProfile,
) -> Result<Vec<f64>, SubgameError> {
    let bush = bundle.bush();
    let form = bush.form()?;
    Ok(s.roots
        .iter()
        .map(|&u| vertex_reach(bush, form, q, sigma, u))
        .collect())
}

/// Whether the m-equilibrium in `plan` restricts to an m-equilibrium of
/// Γ|_S. A reached S is judged at its conditional root distribution with
/// the payoffs of `plan` frozen. An unreached S may use any root
/// distribution: a trembled conditional is tried first, then the grid of
/// mesh 1/`mesh` on Δ(R').
pub fn is_s_perfect(
    bundle: &GameBundle,
    s: &SubgameSet,
    plan: &Plan,
    tau: f64,
    mesh: usize,
) -> Result<PerfectnessReport, SubgameError> {
    let bush = bundle.bush();
    let sub = restrict(bundle, s)?;
    let sigma = restrict_profile(bundle, &sub, &plan.sigma)?;
    let per_root = root_reach(bundle, s, &plan.q, &plan.sigma)?;
    let total: f64 = per_root.iter().sum();
    let names = s.names(bush);
    let witness = sub_witnesses(bundle, &sub, plan);
    if total >= tau {
        let q_prime: Vec<f64> = per_root.iter().map(|p| p / total).collect();
        let y: Table = sub
            .bush()
            .terminals()
            .iter()
            .map(|&t| {
                let full = bush.v(sub.bush().name(t));
                plan.y[bush.terminal_position(full).expect("terminal")].clone()
            })
            .collect();
        let mut sub_plan =
            make_plan_with_witness(&sub, &q_prime, &sigma, &Selector::First, &witness)?;
        sub_plan.y = y;
        let verdict = match verify_myopic(&sub, &sub_plan, tau) {
            Ok(cert) if cert.valid => Verdict::CertifiedTrue {
                q_prime,
                residual: cert.residual,
            },
            Ok(cert) => Verdict::CertifiedFalse {
                reason: format!(
                    "restricted profile has myopic residual {:.3e} at the induced conditional",
                    cert.residual
                ),
            },
            Err(e) => Verdict::CertifiedFalse {
                reason: e.to_string(),
            },
        };
        return Ok(PerfectnessReport {
            set: names,
            reach: total,
            verdict,
        });
    }

    let mut candidates = Vec::new();
    if let Some(q) = trembled_conditional(bundle, s, plan)? {
        candidates.push(q);
    }
    candidates.extend(barycentric_grid(s.roots.len(), mesh.max(1)));
    let mut last_residual = f64::INFINITY;
    for q_prime in candidates {
        let Ok(sub_plan) =
            make_plan_with_witness(&sub, &q_prime, &sigma, &Selector::First, &witness)
        else {
            continue;
        };
        if let Ok(cert) = verify_myopic(&sub, &sub_plan, tau) {
            if cert.valid {
                return Ok(PerfectnessReport {
                    set: names,
                    reach: total,
                    verdict: Verdict::CertifiedTrue {
                        q_prime,
                        residual: cert.residual,
                    },
                });
            }
            last_residual = last_residual.min(cert.residual);
        }
    }
    let verdict = if s.roots.len() == 1 {
        Verdict::CertifiedFalse {
            reason: format!(
                "S has a single root and the restricted profile has myopic residual {last_residual:.3e}"
            ),
        }
    } else {
        Verdict::Unresolved {
            resolution: 1.0 / mesh.max(1) as f64,
        }
    };
    Ok(PerfectnessReport {
        set: names,
        reach: total,
        verdict,
    })
}

/// Witnesses of the full plan carried over to the matching classes of
/// Γ|_S.
fn sub_witnesses(bundle: &GameBundle, sub: &GameBundle, plan: &Plan) -> Vec<Option<Vec<f64>>> {
    let bush = bundle.bush();
    sub.meet()
        .blocks()
        .iter()
        .map(|block| {
            let full: Vec<VertexId> = block.iter().map(|&t| bush.v(sub.bush().name(t))).collect();
            let b = bundle.meet().find(&full)?;
            match (&plan.reach.conditional[b], &plan.witness[b]) {
                (Some(c), _) => Some(c.clone()),
                (None, w) => w.clone(),
            }
        })
        .collect()
}

/// Conditional on R' under σ mixed with a small uniform tremble.
fn trembled_conditional(
    bundle: &GameBundle,
    s: &SubgameSet,
    plan: &Plan,
) -> Result<Option<Vec<f64>>, SubgameError> {
    let form = bundle.bush().form()?;
    let uniform = MixedProfile::uniform(form);
    let weights = plan
        .sigma
        .weights
        .iter()
        .zip(&uniform.weights)
        .map(|(w, u)| {
            w.iter()
                .zip(u)
                .map(|(a, b)| (1.0 - TREMBLE) * a + TREMBLE * b)
                .collect()
        })
        .collect();
    let trembled = MixedProfile::new(weights);
    let q: Vec<f64> = plan
        .q
        .iter()
        .map(|x| (1.0 - TREMBLE) * x + TREMBLE / plan.q.len() as f64)
        .collect();
    let per_root = root_reach(bundle, s, &q, &trembled)?;
    let total: f64 = per_root.iter().sum();
    Ok((total > 0.0).then(|| per_root.iter().map(|p| p / total).collect()))
}
