use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::form::{consistent_with, own_choices, GameForm};
use super::StrategyError;
use crate::model::GameBush;

/// A point of ∏_n Δ(S_n), indexed `[player][pure strategy]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedProfile {
    pub weights: Vec<Vec<f64>>,
}

impl MixedProfile {
    pub fn new(weights: Vec<Vec<f64>>) -> Self {
        Self { weights }
    }

    pub fn uniform(form: &GameForm) -> Self {
        Self {
            weights: form
                .spaces
                .iter()
                .map(|s| vec![1.0 / s.count as f64; s.count])
                .collect(),
        }
    }

    /// Point masses on the given strategy indices.
    pub fn pure(form: &GameForm, picks: &[usize]) -> Self {
        Self {
            weights: form
                .spaces
                .iter()
                .zip(picks)
                .map(|(s, &i)| {
                    let mut w = vec![0.0; s.count];
                    w[i] = 1.0;
                    w
                })
                .collect(),
        }
    }

    pub fn player(&self, n: usize) -> &[f64] {
        &self.weights[n]
    }

    /// Checks shape, non-negativity and normalization within 1e-12.
    pub fn check(&self, form: &GameForm) -> Result<(), StrategyError> {
        if self.weights.len() != form.num_players() {
            return Err(StrategyError::Shape(format!(
                "profile has {} players, game has {}",
                self.weights.len(),
                form.num_players()
            )));
        }
        for (n, (w, s)) in self.weights.iter().zip(&form.spaces).enumerate() {
            if w.len() != s.count {
                return Err(StrategyError::Shape(format!(
                    "player {n} has {} weights for {} strategies",
                    w.len(),
                    s.count
                )));
            }
            if w.iter().any(|&x| !(x >= -1e-12) || !x.is_finite()) {
                return Err(StrategyError::Shape(format!(
                    "player {n} has a negative weight"
                )));
            }
            let total: f64 = w.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(StrategyError::Shape(format!(
                    "weights of player {n} sum to {total}"
                )));
            }
        }
        Ok(())
    }

    pub fn flat(&self) -> Vec<f64> {
        self.weights.iter().flatten().copied().collect()
    }

    pub fn from_flat(form: &GameForm, x: &[f64]) -> Self {
        let mut at = 0;
        let weights = form
            .spaces
            .iter()
            .map(|s| {
                let w = x[at..at + s.count].to_vec();
                at += s.count;
                w
            })
            .collect();
        Self { weights }
    }

    pub fn linf_distance(&self, other: &Self) -> f64 {
        self.weights
            .iter()
            .flatten()
            .zip(other.weights.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Strategies of player `n` with weight above `tol`.
    pub fn support(&self, n: usize, tol: f64) -> Vec<usize> {
        (0..self.weights[n].len())
            .filter(|&i| self.weights[n][i] > tol)
            .collect()
    }
}

/// Action distributions per information set, indexed by the global
/// information set index of the bush.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehaviourProfile {
    pub probs: Vec<Vec<f64>>,
}

impl BehaviourProfile {
    pub fn uniform(bush: &GameBush) -> Self {
        Self {
            probs: bush
                .info_sets()
                .iter()
                .map(|w| vec![1.0 / w.actions.len() as f64; w.actions.len()])
                .collect(),
        }
    }

    pub fn check(&self, bush: &GameBush) -> Result<(), StrategyError> {
        if self.probs.len() != bush.info_sets().len() {
            return Err(StrategyError::Shape(
                "one distribution per information set".into(),
            ));
        }
        for (p, w) in self.probs.iter().zip(bush.info_sets()) {
            let total: f64 = p.iter().sum();
            if p.len() != w.actions.len() || (total - 1.0).abs() > 1e-12 {
                return Err(StrategyError::Shape(format!(
                    "bad distribution at `{}`",
                    w.id
                )));
            }
        }
        Ok(())
    }
}

/// Result of translating a mixed profile into behaviour strategies.
#[derive(Clone, Debug, PartialEq)]
pub struct KuhnTranslation {
    pub behaviour: BehaviourProfile,
    /// Without perfect recall the translation is still computed but reach
    /// probabilities need not be preserved.
    pub perfect_recall: bool,
    pub warning: Option<String>,
}

/// b(a|W) is the σ-weight of strategies that can reach W and pick a, over
/// the weight of those that can reach W; when no strategy in the support
/// reaches W the marginal of σ on W is used.
pub fn mixed_to_behaviour(
    bush: &GameBush,
    form: &GameForm,
    sigma: &MixedProfile,
) -> KuhnTranslation {
    let mut probs: Vec<Vec<f64>> = bush
        .info_sets()
        .iter()
        .map(|w| vec![0.0; w.actions.len()])
        .collect();
    for space in &form.spaces {
        let n = space.player;
        let needs: Vec<Vec<Vec<(usize, usize)>>> = space
            .info_sets
            .iter()
            .map(|&k| {
                bush.info_sets()[k]
                    .nodes()
                    .map(|v| own_choices(bush, space, v))
                    .collect()
            })
            .collect();
        let k_len = space.info_sets.len();
        let mut reach_mass = vec![vec![0.0; 0]; k_len];
        let mut marginal = vec![vec![0.0; 0]; k_len];
        for (local, &k) in space.info_sets.iter().enumerate() {
            let a = bush.info_sets()[k].actions.len();
            reach_mass[local] = vec![0.0; a];
            marginal[local] = vec![0.0; a];
        }
        for s in 0..space.count {
            let w = sigma.weights[n][s];
            if w == 0.0 {
                continue;
            }
            let choice = space.decode(s);
            for local in 0..k_len {
                let a = choice[local];
                marginal[local][a] += w;
                if needs[local].iter().any(|nd| consistent_with(&choice, nd)) {
                    reach_mass[local][a] += w;
                }
            }
        }
        for (local, &k) in space.info_sets.iter().enumerate() {
            let total: f64 = reach_mass[local].iter().sum();
            let src = if total > 0.0 {
                &reach_mass[local]
            } else {
                &marginal[local]
            };
            let t: f64 = src.iter().sum();
            probs[k] = if t > 0.0 {
                src.iter().map(|x| x / t).collect()
            } else {
                vec![1.0 / src.len() as f64; src.len()]
            };
        }
    }
    let recall = crate::subgame::has_perfect_recall(bush);
    KuhnTranslation {
        behaviour: BehaviourProfile { probs },
        perfect_recall: recall.ok,
        warning: (!recall.ok).then(|| {
            format!(
                "no perfect recall ({}); reach probabilities may differ",
                recall.describe(bush)
            )
        }),
    }
}

/// The product-form mixed profile σ(s) = ∏_W b(s(W) | W).
pub fn behaviour_to_mixed(form: &GameForm, b: &BehaviourProfile) -> MixedProfile {
    let weights = form
        .spaces
        .iter()
        .map(|space| {
            (0..space.count)
                .map(|s| {
                    let choice = space.decode(s);
                    choice
                        .iter()
                        .zip(&space.info_sets)
                        .map(|(&a, &k)| b.probs[k][a])
                        .product()
                })
                .collect()
        })
        .collect();
    MixedProfile { weights }
}

/// One weighted pure strategy in a profile file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedStrategy {
    /// information set id -> action
    pub strategy: BTreeMap<String, String>,
    pub weight: f64,
}

/// The `"profile"` key of a bundle file: player -> weighted pure strategies.
/// Strategies not listed get weight zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProfileFile(pub BTreeMap<String, Vec<WeightedStrategy>>);

impl ProfileFile {
    pub fn from_mixed(bush: &GameBush, form: &GameForm, sigma: &MixedProfile) -> Self {
        let mut map = BTreeMap::new();
        for space in &form.spaces {
            let mut list = Vec::new();
            for (s, &w) in sigma.weights[space.player].iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let choice = space.decode(s);
                let strategy = choice
                    .iter()
                    .zip(&space.info_sets)
                    .map(|(&a, &k)| {
                        let set = &bush.info_sets()[k];
                        (set.id.clone(), set.actions[a].clone())
                    })
                    .collect();
                list.push(WeightedStrategy {
                    strategy,
                    weight: w,
                });
            }
            map.insert(bush.players()[space.player].clone(), list);
        }
        Self(map)
    }

    pub fn to_mixed(
        &self,
        bush: &GameBush,
        form: &GameForm,
    ) -> Result<MixedProfile, StrategyError> {
        let mut weights: Vec<Vec<f64>> = form.spaces.iter().map(|s| vec![0.0; s.count]).collect();
        for (name, list) in &self.0 {
            let n = bush
                .players()
                .iter()
                .position(|p| p == name)
                .ok_or_else(|| StrategyError::Shape(format!("unknown player `{name}`")))?;
            let space = &form.spaces[n];
            for ws in list {
                let mut choice = Vec::with_capacity(space.info_sets.len());
                for &k in &space.info_sets {
                    let set = &bush.info_sets()[k];
                    let a = ws
                        .strategy
                        .get(&set.id)
                        .and_then(|a| set.actions.iter().position(|x| x == a))
                        .ok_or_else(|| {
                            StrategyError::Shape(format!("no valid action for `{}`", set.id))
                        })?;
                    choice.push(a);
                }
                weights[n][space.encode(&choice)] += ws.weight;
            }
        }
        for (n, w) in weights.iter_mut().enumerate() {
            if w.len() == 1 && w[0] == 0.0 {
                w[0] = 1.0;
            } else if !self.0.contains_key(&bush.players()[n]) {
                return Err(StrategyError::Shape(format!(
                    "no strategies listed for `{}`",
                    bush.players()[n]
                )));
            }
        }
        let sigma = MixedProfile { weights };
        sigma.check(form)?;
        Ok(sigma)
    }
}
