//! Surface-17 quantum memory workbench.
//!
//! Simulates a distance-3 surface code memory under circuit-level Pauli
//! noise and decodes the syndrome record two ways: exact minimum-weight
//! perfect matching on the space-time defect graph, and a two-network
//! recurrent decoder trained purely on measurable data.  The `eval`
//! module turns either decoder's output into logical fidelity decay
//! curves and per-cycle logical error rates.

pub mod dataset;
pub mod error;
pub mod layout;
pub mod mwpm;
pub mod nn;
pub mod rng;
pub mod sim;

pub use dataset::{DatasetKind, GenerateConfig, Manifest};
pub use error::{Error, Result};
pub use layout::{build_surface17, single_error_defects, CodeLayout, Pauli, StabKind};
pub use mwpm::{build_graph, decode, mwpm, Matching, MatchingGraph, MwpmDecoder};
pub use sim::{run_experiment, ErrorParams, PauliFrame, SyndromeSequence};
