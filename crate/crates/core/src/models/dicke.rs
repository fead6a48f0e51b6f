// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Finite-component Dicke Hamiltonians `H_ℓ` against the infinite-spin limit `H`.

use ndarray::Array1;
use serde::Serialize;

use super::ModelParams;
use crate::error::{invalid, Result};
use crate::hilbert::{build_fock, tensor_embed, Operator, SpinGeometry, SpinScheme, TensorGeometry, TensorSpace};
use crate::numerics::expm_blockwise;
use crate::{re, Mat, C64};

/// `⟨m+1| J₊,ℓ/ℓ |m⟩ = √((ℓ−m)(ℓ+m+1))/ℓ`.
pub fn ladder_ratio(ell: usize, m: i64) -> f64 {
    let l = ell as f64;
    let m = m as f64;
    ((l - m) * (l + m + 1.0)).max(0.0).sqrt() / l
}

/// `ωN + μJ₃ + (λ/ℓ)(J₊ ⊗ a + J₋ ⊗ a†)` on spin `ℓ`.
pub fn finite_spin_hamiltonian(ell: usize, p: &ModelParams, cutoff: usize) -> Result<Operator> {
    if ell == 0 {
        return Err(invalid("ell", "must be positive"));
    }
    let sg = SpinGeometry::new(ell, SpinScheme::Hard)?;
    let fock = build_fock(cutoff)?;
    let d = sg.dim();
    let mut jp = Mat::zeros((d, d));
    for i in 0..d - 1 {
        jp[[i + 1, i]] = re(ladder_ratio(ell, sg.value(i)));
    }
    let jp = Operator::new(sg, jp)?;
    let j3 = Operator::diagonal(sg, (0..d).map(|i| re(sg.value(i) as f64)))?;
    assemble(p, &j3, &jp, &fock.a, TensorGeometry::new(sg, fock.geometry))
}

/// `ωN + μM + λ(l₊ ⊗ a + l₋ ⊗ a†)` on a spin window of the given half-width.
pub fn infinite_spin_hamiltonian(halfwidth: usize, p: &ModelParams, cutoff: usize) -> Result<Operator> {
    let space = TensorSpace::new(halfwidth, SpinScheme::Hard, cutoff)?;
    assemble(p, &space.spin.m, &space.spin.l_plus, &space.fock.a, space.geometry)
}

fn assemble(p: &ModelParams, m: &Operator, lp: &Operator, a: &Operator, geo: TensorGeometry) -> Result<Operator> {
    let n = a.adjoint().mul(a)?;
    let hf = tensor_embed(None, Some(&n), geo)?.scaled(re(p.omega));
    let hs = tensor_embed(Some(m), None, geo)?.scaled(re(p.mu));
    let x = tensor_embed(Some(lp), Some(a), geo)?;
    let hi = x.add(&x.adjoint())?.scaled(re(p.lambda));
    hf.add(&hs)?.add(&hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllDeviation {
    pub ell: usize,
    /// `‖(e^{−itH_ℓ} − e^{−itH})ψ‖`.
    pub deviation: f64,
    /// `max |m| / ℓ` over the support of `ψ`.
    pub support_ratio: f64,
    /// Set when the support is not small against `ℓ`.
    pub support_warning: bool,
}

/// A vector state given by amplitudes on `|m) ⊗ |n⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    pub amplitudes: Vec<(i64, usize, C64)>,
}

impl SparseState {
    fn max_m(&self) -> i64 {
        self.amplitudes.iter().map(|a| a.0.abs()).max().unwrap_or(0)
    }

    fn to_vector(&self, geo: TensorGeometry) -> Result<Array1<C64>> {
        let mut v = Array1::<C64>::zeros(geo.dim());
        for &(m, n, z) in &self.amplitudes {
            let s = geo.spin().index(m).ok_or_else(|| invalid("psi", format!("spin label {m} outside the window")))?;
            if n > geo.fock().cutoff() {
                return Err(invalid("psi", format!("occupation {n} above the cutoff")));
            }
            v[geo.index(s, n)] += z;
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(invalid("psi", "state vector is zero"));
        }
        Ok(v.mapv(|z| z / norm))
    }
}

const SUPPORT_GUIDE: f64 = 0.25;

/// Compares the two unitary evolutions of `ψ` at time `t`. `H` is built on the
/// half-width `reference ≥ ℓ` and `H_ℓ` is embedded into the same window.
pub fn finite_ell_demo(
    ell: usize,
    p: &ModelParams,
    t: f64,
    psi: &SparseState,
    cutoff: usize,
    reference: usize,
) -> Result<EllDeviation> {
    if ell > reference {
        return Err(invalid("ell", "must not exceed the reference half-width"));
    }
    let max_m = psi.max_m();
    if max_m > ell as i64 {
        return Err(invalid("psi", "support exceeds the spin-ℓ multiplet"));
    }
    let href = infinite_spin_hamiltonian(reference, p, cutoff)?;
    let hl = finite_spin_hamiltonian(ell, p, cutoff)?;
    let gref = href.geometry().as_tensor()?;
    let gl = hl.geometry().as_tensor()?;
    let u_ref = expm_blockwise(&href.matrix().mapv(|z| z * C64::new(0.0, -t)))?;
    let u_l = expm_blockwise(&hl.matrix().mapv(|z| z * C64::new(0.0, -t)))?;
    let a = u_ref.dot(&psi.to_vector(gref)?);
    let b_small = u_l.dot(&psi.to_vector(gl)?);
    let shift = reference - ell;
    let mut b = Array1::<C64>::zeros(gref.dim());
    for (i, z) in b_small.iter().enumerate() {
        let (s, f) = gl.split(i);
        b[gref.index(s + shift, f)] = *z;
    }
    let deviation = (&a - &b).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let support_ratio = max_m as f64 / ell as f64;
    Ok(EllDeviation { ell, deviation, support_ratio, support_warning: support_ratio > SUPPORT_GUIDE })
}
