//! Discriminative community detection for pairs of multiplex networks.
//!
//! Two alternating spectral solvers (MX-DSC and MX-DCSC) learn subspaces that
//! separate the community structure of two related multiplex networks, next
//! to the shared (consensus) structure. The crate also ships the synthetic
//! benchmark generator, evaluation metrics and model selection used to study
//! the solvers.

pub mod benchmark;
pub mod eigen;
pub mod error;
pub mod io;
pub mod kmeans;
pub mod metrics;
pub mod model_selection;
pub mod multiplex;
pub mod mx_dcsc;
pub mod mx_dsc;
pub mod spectral;
pub mod subgraph;

mod lowrank;

pub use error::{MxError, Result};
pub use lowrank::EigenMode;
