//! Quantum-volume transpiler and benchmark toolkit.
//!
//! The pipeline runs random QV circuit generation ([`qvgen`]), exact layout
//! and routing ([`router`]), pulse-efficient two-qubit synthesis
//! ([`synth`]), duration-aware scheduling with dynamical decoupling
//! ([`scheduler`]), trajectory simulation ([`simkit`]) and heavy-output
//! statistics ([`stats`]). [`pipeline`] ties the stages together.

pub mod error;
pub mod linalg;
pub mod model;
pub mod pipeline;
pub mod qvgen;
pub mod router;
pub mod rng;
pub mod scheduler;
pub mod simkit;
pub mod stats;
pub mod synth;

pub use error::{QvfError, Result};
