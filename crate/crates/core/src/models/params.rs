// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Physical parameters shared by every model.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Parameters of the oscillator, spin and OISD Liouvillians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Oscillator frequency `ω > 0`.
    pub omega: f64,
    /// Spin frequency `μ > 0`.
    pub mu: f64,
    /// Oscillator dissipation `γ ≥ 0`.
    pub gamma: f64,
    /// Spin dissipation `γ̄ ≥ 0` of the general model.
    pub gamma_bar: f64,
    /// Coupling `λ`.
    pub lambda: f64,
    /// Bath parameter `J ≥ 0`.
    pub j: f64,
    /// Standalone spin model rates `α₋, α₊ ≥ 0`.
    pub alpha_minus: f64,
    pub alpha_plus: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { omega: 1.0, mu: 0.7, gamma: 0.3, gamma_bar: 0.0, lambda: 0.2, j: 0.5, alpha_minus: 0.3, alpha_plus: 0.1 }
    }
}

fn finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, "must be finite"))
    }
}

impl ModelParams {
    /// Sign constraints common to all models.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega", self.omega),
            ("mu", self.mu),
            ("gamma", self.gamma),
            ("gamma_bar", self.gamma_bar),
            ("lambda", self.lambda),
            ("J", self.j),
            ("alpha_minus", self.alpha_minus),
            ("alpha_plus", self.alpha_plus),
        ] {
            finite(name, v)?;
        }
        if self.omega <= 0.0 {
            return Err(invalid("omega", "must be positive"));
        }
        if self.mu <= 0.0 {
            return Err(invalid("mu", "must be positive"));
        }
        for (name, v) in [
            ("gamma", self.gamma),
            ("gamma_bar", self.gamma_bar),
            ("J", self.j),
            ("alpha_minus", self.alpha_minus),
            ("alpha_plus", self.alpha_plus),
        ] {
            if v < 0.0 {
                return Err(invalid(name, "must be non-negative"));
            }
        }
        Ok(())
    }

    /// Constraints of the core OISD model (`γ > 0`).
    pub fn validate_core(&self) -> Result<()> {
        self.validate()?;
        if self.gamma <= 0.0 {
            return Err(invalid("gamma", "the OISD model requires γ > 0"));
        }
        Ok(())
    }

    /// Detuning `ω − μ`.
    pub fn detuning(&self) -> f64 {
        self.omega - self.mu
    }

    /// `δ = λ / (γ² + (ω − μ)²)`.
    pub fn delta(&self) -> Result<f64> {
        let den = self.gamma * self.gamma + self.detuning().powi(2);
        if den == 0.0 {
            return Err(invalid("delta", "undefined for γ = 0 and ω = μ"));
        }
        Ok(self.lambda / den)
    }

    /// Spin dissipation strength `λγδ` generated by decoupling.
    pub fn induced_spin_rate(&self) -> Result<f64> {
        Ok(self.lambda * self.gamma * self.delta()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_values() {
        let p = ModelParams { omega: 2.0, mu: 1.0, gamma: 1.0, lambda: 1.0, ..Default::default() };
        assert!((p.delta().unwrap() - 0.5).abs() < 1e-15);
        let q = ModelParams { gamma: 0.0, mu: 2.0, ..p };
        assert!(q.delta().is_err());
    }

    #[test]
    fn validation() {
        assert!(ModelParams::default().validate_core().is_ok());
        let bad = ModelParams { omega: -1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let g0 = ModelParams { gamma: 0.0, ..Default::default() };
        assert!(g0.validate().is_ok() && g0.validate_core().is_err());
    }
}
