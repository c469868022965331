//! Macroscopic superposition diagnostics for adiabatic quantum algorithms.
//!
//! Builds ground and post-measurement states of adiabatic Grover,
//! Deutsch–Jozsa, Bernstein–Vazirani, Simon and glued-trees algorithms,
//! evaluates the variance-covariance matrix (VCM) of local Pauli operators,
//! and fits how its largest eigenvalue scales with system size.

pub mod algos;
pub mod error;
pub mod evolve;
pub mod exec;
pub mod fit;
pub mod gluedtrees;
pub mod linalg;
pub mod pipeline;
pub mod qstate;
pub mod vcm;

pub use error::{Error, Result};
pub use exec::Exec;
pub use qstate::{PauliAxis, PureState, C64};
