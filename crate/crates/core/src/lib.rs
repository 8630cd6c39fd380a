//! Flooding-based data dissemination and collection on time-varying
//! digraphs.
//!
//! The crate simulates the synchronous flooding update over per-round
//! digraphs, constructs deterministic schedules with linear-time verifiable
//! certificates, cross-checks the set-based engine against a boolean-matrix
//! reachability oracle, evaluates closed-form expected-time bounds, and
//! estimates earliest/latest full-knowledge times by Monte Carlo over random
//! Hamiltonian-cycle ensembles.
//!
//! All randomness flows through [`graph::seeded_rng`] (ChaCha8 from a u64
//! seed), so every artifact is bit-reproducible across machines.

#![forbid(unsafe_code)]

pub mod bits;
pub mod bounds;
pub mod cords;
pub mod error;
pub mod graph;
pub mod knowledge;
pub mod montecarlo;
pub mod oracle;
pub mod schedules;

pub use error::{Error, Result};
pub use graph::seeded_rng;
