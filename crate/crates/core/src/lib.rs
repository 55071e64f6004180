//! Core library for simulating repeated unsharp (POVM) qubit measurements.
//!
//! The crate provides the numeric substrate (dense complex matrices, POVM
//! moment operators), input-state representations (product, separable, and
//! permutation-symmetric spin-J states), outcome samplers including an
//! O(N)-per-step symmetric-subspace sampler with a brute-force oracle, and
//! the statistics used to compare empirical frequency distributions against
//! Gaussian-mixture models and their convergence-rate bounds.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats and the CLI
//! live in the companion `unsharp-cli` crate.
//!
//! # Conventions
//!
//! All matrix and spin conventions are fixed here once and used everywhere:
//!
//! * Single-qubit basis is ordered `{|0>, |1>}`; matrices are row-major, and
//!   `pauli(Z) = diag(1, -1)` so that `|1>` has Bloch z-component -1.
//! * An `N`-qubit permutation-symmetric state is stored as coefficients
//!   `c[k]`, `k = 0..=2J` with `J = N/2`, over the spin basis `|J, m>` with
//!   `m = k - J`. `|J, m>` is the normalized symmetrization of basis strings
//!   with exactly `k = J + m` qubits in `|1>`; in particular
//!   `|J, J> = |1>^(x)N`.
//! * Collective spin operators follow the ladder convention
//!   `S-|J,m> = sqrt(J(J+1) - m(m-1)) |J,m-1>`; with the mapping above,
//!   `S_z` counts `(#|1> - #|0>)/2`, i.e. it corresponds to the qubit
//!   operator `-(1/2) sum_i pauli(Z)_i`.
//! * Kraus operators for sequential sampling are fixed to the positive
//!   square root `K_i = sqrt(E_i)`; the sampled distribution does not depend
//!   on this choice (each qubit is measured exactly once), which the oracle
//!   tests check against randomly twisted variants `U_i K_i`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub(crate) mod math;
pub mod operator;
pub mod povm;
pub mod states;
pub mod exact;
pub mod rng;
pub mod sampler;
pub mod statistics;
pub mod trine;

pub use error::CoreError;
pub use operator::{Operator, PauliAxis, C64};
