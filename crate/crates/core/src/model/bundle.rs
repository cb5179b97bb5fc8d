use std::collections::BTreeMap;
use std::sync::Arc;

use super::bush::{GameBush, VertexId};
use super::partition::MeetPartition;
use super::payoff::PayoffModel;
use super::ModelError;

/// A game bush together with a continuation payoff model for every block of
/// the meet partition of its terminal partitions.
#[derive(Clone, Debug)]
pub struct GameBundle {
    bush: Arc<GameBush>,
    meet: MeetPartition,
    /// indexed by meet block
    continuations: Vec<PayoffModel>,
    parameters: BTreeMap<String, f64>,
}

impl GameBundle {
    /// Validates the bush and checks that the continuations are keyed by
    /// exactly the blocks of the meet partition.
    pub fn new(bush: GameBush, continuations: Vec<PayoffModel>) -> Result<Self, ModelError> {
        Self::with_parameters(bush, continuations, BTreeMap::new())
    }

    pub fn with_parameters(
        bush: GameBush,
        continuations: Vec<PayoffModel>,
        parameters: BTreeMap<String, f64>,
    ) -> Result<Self, ModelError> {
        let violations = bush.validate();
        if !violations.is_empty() {
            return Err(ModelError::Validation(violations));
        }
        let meet = MeetPartition::of_bush(&bush);
        let names = |c: &[VertexId]| c.iter().map(|&v| bush.name(v).to_string()).collect();
        let mut slots: Vec<Option<PayoffModel>> = vec![None; meet.len()];
        for model in continuations {
            let Some(b) = meet.find(model.class()) else {
                return Err(ModelError::UnknownClass(names(model.class())));
            };
            if model.players() != bush.num_players() {
                return Err(ModelError::PlayerCount {
                    class: names(model.class()),
                    got: model.players(),
                    expected: bush.num_players(),
                });
            }
            if slots[b].is_some() {
                return Err(ModelError::DuplicateContinuation(names(model.class())));
            }
            slots[b] = Some(model);
        }
        let mut out = Vec::with_capacity(slots.len());
        for (b, slot) in slots.into_iter().enumerate() {
            match slot {
                Some(m) => out.push(m),
                None => return Err(ModelError::MissingContinuation(names(&meet.blocks()[b]))),
            }
        }
        Ok(Self {
            bush: Arc::new(bush),
            meet,
            continuations: out,
            parameters,
        })
    }

    pub fn bush(&self) -> &GameBush {
        &self.bush
    }

    pub fn shared_bush(&self) -> Arc<GameBush> {
        Arc::clone(&self.bush)
    }

    pub fn meet(&self) -> &MeetPartition {
        &self.meet
    }

    pub fn continuation(&self, block: usize) -> &PayoffModel {
        &self.continuations[block]
    }

    pub fn continuations(&self) -> &[PayoffModel] {
        &self.continuations
    }

    pub fn parameters(&self) -> &BTreeMap<String, f64> {
        &self.parameters
    }

    pub fn num_players(&self) -> usize {
        self.bush.num_players()
    }

    /// Strict bound on every payoff any continuation can produce.
    pub fn payoff_bound(&self) -> f64 {
        self.continuations
            .iter()
            .map(PayoffModel::bound)
            .fold(1.0, f64::max)
    }

    /// Whether every continuation is a constant table, so that payoffs are
    /// multilinear in the mixed strategies.
    pub fn is_multilinear(&self) -> bool {
        self.continuations
            .iter()
            .all(PayoffModel::is_multilinear_constant)
    }

    /// Names of the vertices in `class`.
    pub fn class_names(&self, class: &[VertexId]) -> Vec<String> {
        class
            .iter()
            .map(|&v| self.bush.name(v).to_string())
            .collect()
    }
}
