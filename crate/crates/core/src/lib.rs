//! Trotter error statistics for small spin chains.
//!
//! The crate evaluates the state-dependent leading Trotter error `s_E(ψ) = ‖E|ψ⟩‖²`
//! over random-state ensembles and compares sampled variance and kurtosis with
//! exact predictions driven by entanglement and stabilizer entropy.

pub mod clifford;
pub mod error;
pub mod experiments;
pub mod gates;
pub mod hamiltonian;
pub mod moments;
pub mod pauli;
pub mod resources;
pub mod rng;
pub mod stats;
pub mod statevector;
pub mod trotter;

pub use clifford::{CliffordTableau, Gate};
pub use error::{Error, Result};
pub use hamiltonian::{HamiltonianSpec, Propagator};
pub use moments::{KurtosisLaw, VarianceBoundReport};
pub use pauli::{Pauli, PauliKey, PauliOperator, PauliString};
pub use resources::PauliSpectrum;
pub use stats::{BootstrapCI, Ensemble, SampleSummary, Statistic};
pub use statevector::{DensityMatrix, StateVector};
pub use experiments::{ExperimentConfig, ExperimentResult};
pub use trotter::ProductFormula;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
