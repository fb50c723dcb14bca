//! Quantum Fisher information for parameter-dependent su(1,1) Hamiltonians
//! `H(λ) = r(λ)·K`, with a brute-force Fock-space oracle for cross-checks.

pub mod error;
pub mod fock;
pub mod generator;
pub mod models;
pub mod operator;
pub mod oracle;
pub mod qfi;
pub mod su11;

pub use error::{Error, Result};
pub use fock::{build_state, one_mode_k, two_mode_k, FockRepresentation, ModeCount, ProbeSpec, StateVector};
pub use generator::{generator_vector, generator_vector_with, h_vectors, scalar_profiles};
pub use models::{apt, lmg, qrm_effective, ModelSpec};
pub use oracle::{OracleConfig, TruncationPolicy};
pub use qfi::{asymptotic_coefficients, crb, qfi_closed_form, QfiReport};
pub use su11::{boxdot, boxtimes, casimir_radicand, AlgebraVector, Regime};
