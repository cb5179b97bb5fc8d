//! Game bushes, game bundles and their validation.

mod bundle;
mod bush;
mod io;
mod partition;
mod payoff;
mod scalar;
mod validate;

use thiserror::Error;

pub use bundle::GameBundle;
pub use bush::{BushBuilder, GameBush, InfoSet, InfoSetSpec, NatureNode, Owner, VertexId};
pub use io::{
    bundle_from_json, bundle_from_str, bundle_to_json, load_bundle, BundleFile, ContinuationFile,
    InfoSetFile, SamplePointFile,
};
pub use partition::MeetPartition;
pub use payoff::{
    ex1_subgame_table, table_distance, Builtin, Interpolation, PayoffKind, PayoffModel,
    SamplePoint, SampledGraph, Table,
};
pub use scalar::{Probability, Scalar};
pub use validate::{Rule, Violation};

#[derive(Clone, Debug, Error)]
pub enum ModelError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid game bush: {}", summarize(.0))]
    Validation(Vec<Violation>),
    #[error("continuation keyed by {0:?}, which is not a block of the meet partition")]
    UnknownClass(Vec<String>),
    #[error("no continuation for terminal class {0:?}")]
    MissingContinuation(Vec<String>),
    #[error("continuation for class {0:?} given twice")]
    DuplicateContinuation(Vec<String>),
    #[error("continuation for class {class:?} has {got} players, expected {expected}")]
    PlayerCount {
        class: Vec<String>,
        got: usize,
        expected: usize,
    },
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

fn summarize(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
