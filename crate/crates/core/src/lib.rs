//! Fixed-architecture neural networks as a laboratory for the topology of
//! their realization sets: exact networks and operations, an activation
//! table, explicit witness constructions, grid probes and a small
//! gradient-descent harness.

pub mod activations;
pub mod constructions;
pub mod domain;
pub mod error;
pub mod network;
pub mod probes;
mod serialize;
pub mod training;

pub use activations::{Activation, Anchor, HomogeneityOrder, Smoothness};
pub use domain::DomainBox;
pub use error::{Error, Result};
pub use network::{Architecture, Layer, Matrix, Network};
