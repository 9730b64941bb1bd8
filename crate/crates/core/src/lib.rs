//! Quantum Rabi model on a truncated Fock ⊗ spin-1/2 space.
//!
//! The crate builds the Rabi Hamiltonian together with its Jaynes-Cummings /
//! anti-Jaynes-Cummings decomposition, the parity and duality symmetry
//! operators `Π_j = σ_j 𝒫`, and the three effective Hamiltonians obtained
//! from symmetric and antisymmetric duality conjugation (bosonic, fermionic,
//! coupling-only). Every operator identity relating these objects can be
//! checked numerically with [`symmetry::verify_algebra`], and the
//! [`dynamics`] module propagates states under any of them.
//!
//! Conventions: `ħ = 1`, all frequencies dimensionless. Composite basis index
//! is `s·(N_max+1) + n` with the spin ordered `(|e⟩, |g⟩)` and Fock states
//! ascending.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod model;
pub mod observables;
pub mod output;
pub mod symmetry;

pub use error::{Error, Result};
pub use hilbert::{FockSpec, Operator, Space, SpinLevel, SpinState, StateVector, C64};
pub use model::{Model, ModelKind, ModelParams};
