//! Spectral statistics and survival-probability dynamics of interacting
//! bosons in a one-dimensional quasiperiodic (Aubry-André) chain.
//!
//! The pipeline is: enumerate the Fock basis ([`basis`]), assemble the
//! Hamiltonian ([`hamiltonian`]), diagonalize it densely ([`spectrum`]),
//! classify initial states ([`classify`]) and evolve them ([`dynamics`]),
//! averaging over a seeded ensemble of phases ([`ensemble`]).
//! [`experiments`] strings these together and writes result files.

pub mod basis;
pub mod classify;
pub mod config;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod hamiltonian;
pub mod output;
pub mod spectrum;
pub mod stats;

pub use basis::{BasisTable, FockState};
pub use config::{EtaAveraging, RunConfig};
pub use error::{Error, Result};
pub use hamiltonian::{assemble, ModelParams, SparseHamiltonian};
pub use spectrum::{diagonalize, SpectralDecomposition};
