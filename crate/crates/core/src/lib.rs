//! Reconstruction of the governing equations of weakly coupled discrete
//! chaotic map networks from multivariate time series, and prediction of
//! their synchronization transitions.
//!
//! The crate covers the full chain: simulate coupled maps on weighted
//! directed networks, identify a per-node model by sparse regression over
//! a candidate-function library, classify nodes by model distance to
//! recover the local dynamics and the coupling function, solve for the
//! connectivity with compressed sensing, and analyse the reconstructed
//! model's stability under a coupling control parameter.

pub mod analysis;
pub mod basis;
pub mod dynamics;
pub mod error;
pub mod network;
pub mod pipeline;
pub mod regression;
pub mod simulator;

pub use error::{Error, Result};
