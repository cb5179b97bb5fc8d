//! Exact Z₂ checks of the spanning property for piecewise-linear
//! correspondences.
//!
//! A correspondence F: W → Y spans when the mod-2 fundamental class of
//! (W, ∂W) lies in the image of the projection-induced map on relative
//! homology H(F, F|∂W) → H(W, ∂W). The checker works with finite
//! simplicial complexes only, where simplicial homology computes the same
//! groups as Čech homology; it says nothing about correspondences that are
//! not piecewise linear. Regions have dimension 1 or 2, and the operations
//! in [`ops`] are implemented for dimension 1.
//!
//! The limit criterion for spanning (closeness of approximating spanning
//! sets) has no finite counterpart and is not an operation here; it is
//! what justifies treating a sampled, piecewise-linear surrogate of a
//! continuous correspondence as a stand-in for it.

mod check;
mod complex;
mod correspondence;
pub mod generate;
pub mod gf2;
mod io;
pub mod ops;
mod pair;

use thiserror::Error;

pub use check::{has_spanning, has_spanning_with, verify_witness, SpanningVerdict};
pub use complex::{ChainSystem, Complex};
pub use correspondence::{glue, restrict_correspondence, SimplicialCorrespondence};
pub use io::{
    span_instance_from_str, span_instance_to_string, BaseFile, CorrespondenceFile, SpanFile,
};
pub use ops::{compose_correspondences, product, scale_correspondence, sum_correspondences};
pub use pair::{Ambient, FundamentalClass, TriangulatedPair};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SpanError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("degenerate region: {0}")]
    Degenerate(String),
    #[error("{operation} is implemented for one-dimensional regions, not dimension {dimension}")]
    Dimension {
        operation: &'static str,
        dimension: usize,
    },
}
