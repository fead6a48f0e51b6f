// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Liouvillian builders.

use std::fmt;

use serde::Serialize;

use super::ModelParams;
use crate::error::{invalid, Result};
use crate::hilbert::{FockSpace, Operator, SpinSpace, TensorSpace};
use crate::superop::{combine, d, k, OisdBlocks, SuperOperator};
use crate::{im, re};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LiouvillianLabel {
    Photon,
    Spin,
    Oisd,
    OisdGeneral,
    Decoupled,
    DecoupledGeneral,
    SynchronizedDecoupled,
    FiniteSpinHamiltonian,
    InfiniteSpinHamiltonian,
}

impl LiouvillianLabel {
    /// Whether the generator carries dissipators.
    pub fn is_dissipative(self) -> bool {
        !matches!(self, Self::FiniteSpinHamiltonian | Self::InfiniteSpinHamiltonian)
    }
}

impl fmt::Display for LiouvillianLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Photon => "L_ph",
            Self::Spin => "L_sp",
            Self::Oisd => "L_OISD",
            Self::OisdGeneral => "L_OISD_general",
            Self::Decoupled => "L_decoupled",
            Self::DecoupledGeneral => "L_decoupled_general",
            Self::SynchronizedDecoupled => "L_syn_dec",
            Self::FiniteSpinHamiltonian => "H_ell",
            Self::InfiniteSpinHamiltonian => "H",
        };
        f.write_str(s)
    }
}

/// A generator together with the model it was built from.
#[derive(Debug, Clone)]
pub struct LiouvillianHandle {
    pub superop: SuperOperator,
    pub label: LiouvillianLabel,
    pub params: ModelParams,
}

impl LiouvillianHandle {
    fn new(superop: SuperOperator, label: LiouvillianLabel, params: &ModelParams) -> Self {
        Self { superop, label, params: *params }
    }
}

/// `−iωK_N + γ((J+1)D_{a∘a†} + J D_{a†∘a})` on `F`.
pub fn build_l_ph(p: &ModelParams, fock: &FockSpace) -> Result<LiouvillianHandle> {
    p.validate()?;
    if p.gamma <= 0.0 {
        return Err(invalid("gamma", "the open oscillator requires γ > 0"));
    }
    let down = d(&fock.a, &fock.adag)?;
    let up = d(&fock.adag, &fock.a)?;
    let kn = k(&fock.n);
    let s = combine(&[(im(-p.omega), &kn), (re(p.gamma * (p.j + 1.0)), &down), (re(p.gamma * p.j), &up)])?;
    Ok(LiouvillianHandle::new(s, LiouvillianLabel::Photon, p))
}

/// `−iμK_M + α₋D_{l₋∘l₊} + α₊D_{l₊∘l₋}` on `G`.
pub fn build_l_sp(p: &ModelParams, spin: &SpinSpace) -> Result<LiouvillianHandle> {
    p.validate()?;
    let km = k(&spin.m);
    let down = d(&spin.l_minus, &spin.l_plus)?;
    let up = d(&spin.l_plus, &spin.l_minus)?;
    let s = combine(&[(im(-p.mu), &km), (re(p.alpha_minus), &down), (re(p.alpha_plus), &up)])?;
    Ok(LiouvillianHandle::new(s, LiouvillianLabel::Spin, p))
}

fn oisd(p: &ModelParams, space: &TensorSpace, gamma_bar: f64) -> Result<SuperOperator> {
    let b = OisdBlocks::new(space, p.j)?;
    let mut terms = vec![
        (im(-p.mu), &b.k_sp),
        (im(-p.lambda), &b.k_mp),
        (im(-p.lambda), &b.k_pm),
        (im(-p.omega), &b.k_ph),
        (re(p.gamma), &b.d_ph),
    ];
    if gamma_bar != 0.0 {
        terms.push((re(gamma_bar), &b.d_sp));
    }
    combine(&terms)
}

/// `−iμK_sp − iλ(K_{l₋a†} + K_{l₊a}) − iωK_ph + γD_ph`.
pub fn build_l_oisd(p: &ModelParams, space: &TensorSpace) -> Result<LiouvillianHandle> {
    p.validate_core()?;
    Ok(LiouvillianHandle::new(oisd(p, space, 0.0)?, LiouvillianLabel::Oisd, p))
}

/// [`build_l_oisd`] plus `γ̄D_sp`; `γ = 0` is admitted.
pub fn build_l_oisd_general(p: &ModelParams, space: &TensorSpace) -> Result<LiouvillianHandle> {
    p.validate()?;
    Ok(LiouvillianHandle::new(oisd(p, space, p.gamma_bar)?, LiouvillianLabel::OisdGeneral, p))
}

fn decoupled(p: &ModelParams, space: &TensorSpace, spin_rate: f64) -> Result<SuperOperator> {
    let b = OisdBlocks::new(space, p.j)?;
    combine(&[(im(-p.mu), &b.k_sp), (re(spin_rate), &b.d_sp), (im(-p.omega), &b.k_ph), (re(p.gamma), &b.d_ph)])
}

/// `−iμK_sp + λγδ D_sp − iωK_ph + γD_ph`.
pub fn build_l_decoupled(p: &ModelParams, space: &TensorSpace) -> Result<LiouvillianHandle> {
    p.validate_core()?;
    let s = decoupled(p, space, p.induced_spin_rate()?)?;
    Ok(LiouvillianHandle::new(s, LiouvillianLabel::Decoupled, p))
}

/// Decoupled generator of the general model: spin rate `λγδ + γ̄`.
pub fn build_l_decoupled_general(p: &ModelParams, space: &TensorSpace) -> Result<LiouvillianHandle> {
    p.validate()?;
    let s = decoupled(p, space, p.induced_spin_rate()? + p.gamma_bar)?;
    Ok(LiouvillianHandle::new(s, LiouvillianLabel::DecoupledGeneral, p))
}

/// Decoupled form with an explicit spin rate, for perturbation studies.
pub fn build_l_decoupled_with_rate(p: &ModelParams, space: &TensorSpace, spin_rate: f64) -> Result<LiouvillianHandle> {
    p.validate()?;
    if !spin_rate.is_finite() {
        return Err(invalid("spin_rate", "must be finite"));
    }
    let s = decoupled(p, space, spin_rate)?;
    Ok(LiouvillianHandle::new(s, LiouvillianLabel::DecoupledGeneral, p))
}

/// `−iμ(K_sp + K_ph) + λγδ D_sp`.
pub fn build_l_syn_dec(p: &ModelParams, space: &TensorSpace) -> Result<LiouvillianHandle> {
    p.validate_core()?;
    let b = OisdBlocks::new(space, p.j)?;
    let s = combine(&[(im(-p.mu), &b.k_sp), (im(-p.mu), &b.k_ph), (re(p.induced_spin_rate()?), &b.d_sp)])?;
    Ok(LiouvillianHandle::new(s, LiouvillianLabel::SynchronizedDecoupled, p))
}

/// `−iK_H` for a Hamiltonian `H`.
pub fn hamiltonian_generator(h: &Operator, label: LiouvillianLabel, p: &ModelParams) -> LiouvillianHandle {
    LiouvillianHandle::new(k(h).scaled(im(-1.0)), label, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{build_fock, build_spin, interior_mask, project, SpinScheme};
    use crate::numerics::sampling::{random_matrix, random_supported, rng};
    use crate::numerics::{frobenius, trace, trace_norm};
    use crate::superop::commutator;
    use crate::Mat;

    #[test]
    fn trace_annihilation() {
        let p = ModelParams { gamma_bar: 0.1, ..Default::default() };
        let space = TensorSpace::new(3, SpinScheme::Hard, 4).unwrap();
        let mut r = rng(4);
        let hs = [
            build_l_oisd(&p, &space).unwrap(),
            build_l_oisd_general(&p, &space).unwrap(),
            build_l_decoupled(&p, &space).unwrap(),
            build_l_decoupled_general(&p, &space).unwrap(),
            build_l_syn_dec(&p, &space).unwrap(),
        ];
        for h in &hs {
            for _ in 0..5 {
                let x = random_matrix(&mut r, space.dim());
                let y = h.superop.apply(&x).unwrap();
                assert!(trace(&y).norm() <= 1e-12 * trace_norm(&x), "{}", h.label);
            }
        }
    }

    #[test]
    fn general_reduces_and_lambda_zero_decouples() {
        let space = TensorSpace::new(2, SpinScheme::Hard, 3).unwrap();
        let p = ModelParams::default();
        let a = build_l_oisd(&p, &space).unwrap().superop.to_matrix_capped(usize::MAX).unwrap();
        let b = build_l_oisd_general(&p, &space).unwrap().superop.to_matrix_capped(usize::MAX).unwrap();
        assert!(frobenius(&(a - b)) < 1e-14);
        let q = ModelParams { lambda: 0.0, ..p };
        let a = build_l_oisd(&q, &space).unwrap().superop.to_matrix_capped(usize::MAX).unwrap();
        let b = build_l_decoupled(&q, &space).unwrap().superop.to_matrix_capped(usize::MAX).unwrap();
        assert!(frobenius(&(a - b)) < 1e-14);
    }

    #[test]
    fn decoupled_is_a_sum_of_factor_generators() {
        let space = TensorSpace::new(4, SpinScheme::Hard, 4).unwrap();
        let p = ModelParams::default();
        let c = p.induced_spin_rate().unwrap();
        let sp = ModelParams { alpha_minus: c * (p.j + 1.0), alpha_plus: c * p.j, ..p };
        let lsp = build_l_sp(&sp, &space.spin).unwrap();
        let lph = build_l_ph(&p, &space.fock).unwrap();
        let dec = build_l_decoupled(&p, &space).unwrap();
        let x = random_matrix(&mut rng(8), space.dim());
        let g = space.geometry;
        let want = crate::hilbert::map_spin_factor(&g, &x, |b| lsp.superop.apply_unchecked(b))
            + crate::hilbert::map_fock_factor(&g, &x, |b| lph.superop.apply_unchecked(b));
        assert!(frobenius(&(dec.superop.apply(&x).unwrap() - want)) < 1e-12);
    }

    #[test]
    fn photon_commutation_and_vacuum() {
        let fock = build_fock(8).unwrap();
        let p = ModelParams { j: 0.0, ..Default::default() };
        let l = build_l_ph(&p, &fock).unwrap();
        let mut vac = Mat::zeros((9, 9));
        vac[[0, 0]] = re(1.0);
        assert!(frobenius(&l.superop.apply(&vac).unwrap()) < 1e-15);
        let dph = combine(&[(re(1.5), &d(&fock.a, &fock.adag).unwrap()), (re(0.5), &d(&fock.adag, &fock.a).unwrap())])
            .unwrap();
        let c = commutator(&k(&fock.n), &dph).unwrap();
        let mask = interior_mask(fock.geometry.into(), 0, 2).unwrap();
        let x = random_supported(&mut rng(1), &mask);
        assert!(frobenius(&project(&mask, &c.apply(&x).unwrap())) < 1e-12);
    }

    #[test]
    fn syn_dec_commutes_with_its_parts() {
        let space = TensorSpace::new(4, SpinScheme::Hard, 4).unwrap();
        let p = ModelParams::default();
        let l = build_l_syn_dec(&p, &space).unwrap();
        let b = OisdBlocks::new(&space, p.j).unwrap();
        let rot = b.k_sp.add(&b.k_ph).unwrap();
        let mask = interior_mask(space.geometry.into(), 2, 2).unwrap();
        let x = random_supported(&mut rng(2), &mask);
        for other in [&b.d_sp, &rot] {
            let c = commutator(&l.superop, other).unwrap();
            assert!(frobenius(&project(&mask, &c.apply(&x).unwrap())) < 1e-12);
        }
    }

    #[test]
    fn sign_violations_rejected() {
        let space = build_spin(2, SpinScheme::Hard).unwrap();
        let p = ModelParams { alpha_plus: -1.0, ..Default::default() };
        assert!(build_l_sp(&p, &space).is_err());
        let fock = build_fock(2).unwrap();
        let p = ModelParams { gamma: 0.0, ..Default::default() };
        assert!(build_l_ph(&p, &fock).is_err());
    }
}
