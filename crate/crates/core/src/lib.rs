//! Simulation and verification toolkit for adiabatic quantum computation
//! driven along the dark state of a pointer qubit chain.
//!
//! A circuit of `n` unitary gates on an `N`-qubit register is compiled into
//! a one-parameter family of Hamiltonians `H(s)` on the composite space
//! (counter chain of `n + 3` sites) ⊗ (2^N register). Sweeping `s` from 0
//! to 1 transports the zero-energy dark state from `|0⟩_c|φ⟩` to
//! `|n+2⟩_c (U_n···U_1)|φ⟩`, so the circuit output appears deterministically
//! on the last counter site.
//!
//! Modules:
//! - [`circuit`]: gate definitions, the circuit DSL, and the symmetric /
//!   antisymmetric Hermitian decomposition of each gate.
//! - [`pointer_model`]: the chain ⊗ register Hamiltonian `H(s)`, state
//!   constructors, and the closed-form dark state.
//! - [`spin_model`]: the equivalent spin-1/2 Hamiltonian as a sum of Pauli
//!   strings, plus the single-excitation sector restriction.
//! - [`spectral`]: dense Hermitian eigensolves, gap extraction, and the
//!   gap-versus-n scaling scan.
//! - [`evolve`]: time-dependent Schrödinger propagation of the sweep with
//!   fidelity and population diagnostics.

pub mod circuit;
pub mod error;
pub mod evolve;
pub mod linalg;
pub mod pointer_model;
pub mod spectral;
pub mod spin_model;

pub use error::{Error, Result};
