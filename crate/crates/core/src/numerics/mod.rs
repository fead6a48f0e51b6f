// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Shared numerical machinery: master-equation integration, matrix
//! exponentials, trace norms, density-matrix validation, quadrature,
//! finite-difference generator checks and seeded sampling.

mod expm;
mod fd;
mod norms;
mod ode;
pub mod quad;
pub mod sampling;

pub use expm::{expm, expm_blockwise, expm_capped, DENSE_EXPM_CAP};
pub use fd::generator_fd_check;
pub use norms::{check_density, frobenius, hermitian_part, min_eigenvalue, trace, trace_norm, DensityReport};
pub use ode::{integrate, integrate_master, OdeStats, Trajectory};

use serde::{Deserialize, Serialize};

/// Tolerances shared by integrators, identity checks and density validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub ode_rel: f64,
    pub ode_abs: f64,
    pub identity_tol: f64,
    pub trace_tol: f64,
    pub psd_tol: f64,
    pub fd_step: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self { ode_rel: 1e-8, ode_abs: 1e-10, identity_tol: 1e-10, trace_tol: 1e-10, psd_tol: 1e-8, fd_step: 1e-4 }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> crate::Result<()> {
        let fields = [
            ("ode_rel", self.ode_rel),
            ("ode_abs", self.ode_abs),
            ("identity_tol", self.identity_tol),
            ("trace_tol", self.trace_tol),
            ("psd_tol", self.psd_tol),
            ("fd_step", self.fd_step),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(crate::error::invalid(name, format!("tolerance must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Hermiticity tolerance used by density checks.
    pub fn herm_tol(&self) -> f64 {
        self.trace_tol
    }
}
