//! Adiabatic treatment of two qubits coupled to a single oscillator mode with a
//! parametric (two-photon) term.
//!
//! The library diagonalizes the qubit-pair + oscillator Hamiltonian in a
//! displaced-squeezed oscillator frame, evolves tripartite initial states in
//! closed form, and derives the reduced density matrices and the information
//! measures built on them (population inversion, relative entropy of coherence,
//! geometric discord, concurrence, Bell-state reconstruction, quadrature
//! variance, Husimi Q). A dense exact-diagonalization oracle validates the
//! approximation on a truncated Fock space.
//!
//! All frequencies are in units of the oscillator frequency and times are
//! scaled times ωt.

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod qmat;
pub mod specfun;
pub mod validate;

pub use error::{Error, Result};
