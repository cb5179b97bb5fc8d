//! Game bushes and game bundles: extensive-form games whose terminal
//! payoffs are correspondences of the induced conditional distribution.
//! Includes myopic equilibrium computation, subgame-bundle perfection and a
//! Z₂ homology checker for the spanning property of correspondences.

pub mod fixtures;
pub mod model;
pub mod solver;
pub mod spanning;
pub mod strategies;
pub mod subgame;
pub mod testing;
