// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Intertwining checks `L ∘ V = V ∘ L_dec` on interior-supported probes.

use serde::Serialize;

use super::liouvillians::{build_l_decoupled_general, build_l_oisd_general, LiouvillianHandle};
use super::ModelParams;
use crate::error::{invalid, Result};
use crate::hilbert::{interior_mask, project, TensorSpace};
use crate::numerics::frobenius;
use crate::numerics::sampling::{random_supported, rng};
use crate::propagators::{TransformParams, VTransform};
use crate::C64;

/// Probe set used by the intertwining checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeConfig {
    pub margin_spin: usize,
    pub margin_fock: usize,
    pub probes: usize,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self { margin_spin: 4, margin_fock: 10, probes: 3, seed: 11 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecouplingRow {
    pub sigma: f64,
    pub zeta1: C64,
    pub zeta2: C64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecouplingReport {
    /// Spin dissipation rate of the decoupled generator.
    pub spin_rate: f64,
    pub rows: Vec<DecouplingRow>,
}

impl DecouplingReport {
    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    /// Ratio of the largest to the smallest residual across the sweep.
    pub fn spread(&self) -> f64 {
        let lo = self.rows.iter().map(|r| r.residual).fold(f64::INFINITY, f64::min);
        self.max_residual() / lo.max(f64::MIN_POSITIVE)
    }
}

/// `max ‖P(L V X − V L_dec X)P‖_F / ‖P L X P‖_F` over random interior `X`.
pub fn intertwining_residual(
    l: &LiouvillianHandle,
    l_dec: &LiouvillianHandle,
    v: &VTransform,
    space: &TensorSpace,
    probes: &ProbeConfig,
) -> Result<f64> {
    if probes.probes == 0 {
        return Err(invalid("probes", "need at least one probe"));
    }
    let mask = interior_mask(space.geometry.into(), probes.margin_spin, probes.margin_fock)?;
    let mut r = rng(probes.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..probes.probes {
        let x = random_supported(&mut r, &mask);
        let lhs = l.superop.apply(&v.apply(&x)?)?;
        let rhs = v.apply(&l_dec.superop.apply(&x)?)?;
        let num = frobenius(&project(&mask, &(lhs - rhs)));
        let den = frobenius(&project(&mask, &l.superop.apply(&x)?));
        worst = worst.max(num / den.max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Checks `L_OISD V(σ) = V(σ) L_decoupled` for each `σ` in the sweep. With
/// `γ̄ ≠ 0` the general model and its shifted spin rate are used.
pub fn verify_decoupling(
    p: &ModelParams,
    sigmas: &[f64],
    space: &TensorSpace,
    probes: &ProbeConfig,
) -> Result<DecouplingReport> {
    p.validate_core()?;
    if sigmas.is_empty() {
        return Err(invalid("sigma_sweep", "must not be empty"));
    }
    let l = build_l_oisd_general(p, space)?;
    let l_dec = build_l_decoupled_general(p, space)?;
    let mut rows = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let tp = TransformParams::new(sigma, p)?;
        let v = VTransform::new(&tp, space)?;
        rows.push(DecouplingRow {
            sigma,
            zeta1: tp.zeta1,
            zeta2: tp.zeta2,
            residual: intertwining_residual(&l, &l_dec, &v, space, probes)?,
        });
    }
    Ok(DecouplingReport { spin_rate: p.induced_spin_rate()? + p.gamma_bar, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaZeroReport {
    /// Argument `λ/(μ−ω)` of the `W` factor.
    pub w_argument: f64,
    pub residual: f64,
    /// Oscillator dissipation rate in the decoupled generator (always zero).
    pub photon_dissipation: f64,
    pub spin_rate: f64,
}

/// The undamped variant: `L_OISD(γ=0, γ̄) V = V L_decoupled(γ=0, γ̄)` with
/// `V = W(λ/(μ−ω)) ∘ e^{σD_ph}`.
pub fn gamma_zero_transform(
    p: &ModelParams,
    sigma: f64,
    space: &TensorSpace,
    probes: &ProbeConfig,
) -> Result<GammaZeroReport> {
    if p.gamma != 0.0 {
        return Err(invalid("gamma", "the undamped variant requires γ = 0"));
    }
    let v = VTransform::gamma_zero(sigma, p, space)?;
    let l = build_l_oisd_general(p, space)?;
    let l_dec = build_l_decoupled_general(p, space)?;
    Ok(GammaZeroReport {
        w_argument: v.zeta1.re,
        residual: intertwining_residual(&l, &l_dec, &v, space, probes)?,
        photon_dissipation: l_dec.params.gamma,
        spin_rate: p.gamma_bar,
    })
}
