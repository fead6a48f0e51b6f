// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Numerical laboratory for the open infinite-spin Dicke (OISD) model.
//!
//! The crate realizes, on truncated Hilbert spaces, the superoperator calculus
//! of commutator maps `K_A` and dissipators `D_{B∘C}`, the closed-form CPTP
//! semigroups of the open oscillator and of the dissipative infinite spin, the
//! decoupling transformation `V(σ)`, the factorized OISD propagator, and the
//! synchronized-decoupled asymptotics. Every closed form is paired with an
//! independent oracle (dense `expm`, adaptive Runge–Kutta, finite differences).
//!
//! Module map:
//! - [`hilbert`]: truncated Fock/spin spaces, tensor embeddings, projectors, partial traces
//! - [`superop`]: `K`, `D`, linear combinations, compositions, vectorization
//! - [`numerics`]: ODE integration, `expm`, trace norm, density checks, quadrature
//! - [`propagators`]: Kraus semigroups, spin evolution, `W(η)`, `V(σ)`, product formula
//! - [`models`]: Liouvillians, decoupling checks, asymptotic-equivalence experiment
//! - [`cli`]: configuration, reports and the `oisd` command-line front end

pub mod cli;
pub mod error;
pub mod hilbert;
pub mod models;
pub mod numerics;
pub mod propagators;
pub mod superop;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix used for operators and states.
pub type Mat = ndarray::Array2<C64>;

/// Shorthand for a real complex number.
#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Shorthand for a purely imaginary complex number.
#[inline]
pub fn im(x: f64) -> C64 {
    C64::new(0.0, x)
}
