// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A constructor or operation precondition was violated.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A dense route would exceed the configured size cap.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// A negative-direction map amplified its input beyond the threshold.
    #[error("ill-conditioned {what}: measured {measured:.3e} exceeds threshold {threshold:.3e}")]
    IllConditioned { what: String, measured: f64, threshold: f64 },

    /// The adaptive integrator could not make progress.
    #[error("step size underflow at t = {t:.6e} (h = {h:.3e}); the problem looks stiff, use the expm route")]
    Stiffness { t: f64, h: f64 },

    /// The bi-infinite spin series lost more mass than allowed.
    #[error("spin series tail {deficit:.3e} exceeds tolerance; widen kmax to at least {suggested}")]
    WidenKmax { deficit: f64, suggested: usize },

    /// LAPACK or another numerical kernel failed.
    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
