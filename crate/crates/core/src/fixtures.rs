//! The three worked examples as bundle files, plus constructors.

use std::collections::BTreeMap;

use crate::model::{bundle_from_str, GameBundle};
use crate::subgame::{restrict, SubgameSet};

pub const EX1: &str = include_str!("../fixtures/ex1.gb.json");
pub const EX1_FACTOR: &str = include_str!("../fixtures/ex1-factor.gb.json");
pub const EX2: &str = include_str!("../fixtures/ex2.gb.json");
pub const EX3: &str = include_str!("../fixtures/ex3.gb.json");

/// Fixture text by short name (`ex1`, `ex1-factor`, `ex2`, `ex3`).
pub fn source(name: &str) -> Option<&'static str> {
    match name {
        "ex1" => Some(EX1),
        "ex1-factor" => Some(EX1_FACTOR),
        "ex2" => Some(EX2),
        "ex3" => Some(EX3),
        _ => None,
    }
}

fn with_s(text: &str, s: f64) -> GameBundle {
    let overrides = BTreeMap::from([("s".to_string(), s)]);
    bundle_from_str(text, &overrides).expect("fixture parses")
}

/// Three players: One picks X or Y, then Two and Three play the zero-sum
/// game of the reached state without observing it.
pub fn ex1(s: f64) -> GameBundle {
    with_s(EX1, s)
}

/// One's choice alone; X and Y form one class whose payoffs are the
/// equilibrium values of the continuation game at (p, 1 − p).
pub fn ex1_factor(s: f64) -> GameBundle {
    with_s(EX1_FACTOR, s)
}

/// The part of [`ex1`] after One's move, as a bundle with roots X and Y.
pub fn ex1_subgame(s: f64) -> (GameBundle, SubgameSet) {
    let full = ex1(s);
    let bush = full.bush();
    let vertices: Vec<_> = bush.vertices().filter(|&v| bush.name(v) != "r").collect();
    let set = SubgameSet::new(bush, &vertices).expect("post-move region is a subgame set");
    let sub = restrict(&full, &set).expect("restriction of a fixture");
    (sub, set)
}

pub fn ex2() -> GameBundle {
    bundle_from_str(EX2, &BTreeMap::new()).expect("fixture parses")
}

pub fn ex3() -> GameBundle {
    bundle_from_str(EX3, &BTreeMap::new()).expect("fixture parses")
}

/// p* = (s − 1 + √(1 + s + s²)) / (3s), maximizer of p(1 − p)(1 + sp).
pub fn ex1_commitment_point(s: f64) -> f64 {
    (s - 1.0 + (1.0 + s + s * s).sqrt()) / (3.0 * s)
}

/// One's committed payoff p(1 − p)(1 + sp) when X is played with
/// probability p.
pub fn ex1_commitment_value(s: f64, p: f64) -> f64 {
    p * (1.0 - p) * (1.0 + s * p)
}
