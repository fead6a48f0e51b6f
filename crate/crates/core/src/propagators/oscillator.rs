// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form semigroups of the damped oscillator on the truncated Fock space.
//!
//! Both dressing semigroups are sums of single-band maps
//! `X ↦ Σ_n s_n B_n X B_nᵀ` where `B_n` moves `|k⟩` to `|k∓n⟩` with a real
//! coefficient. Coefficients are evaluated in log space so that large and
//! negative times stay finite.

use std::sync::Arc;

use ndarray::Array2;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::hilbert::build_fock;
use crate::hilbert::{map_fock_factor, FockGeometry, FockSpace, Operator, TensorGeometry};
use crate::numerics::{expm_capped, DENSE_EXPM_CAP};
use crate::superop::{combine, d, k, vec};
use crate::{re, Mat, C64};

/// Which dressing semigroup a Kraus family realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// `S_t = e^{tD_{a†∘a}}`, members `∝ a†ⁿ e^{−t aa†}`.
    LoweringDress,
    /// `e^{tD_{a∘a†}}`, members `∝ aⁿ e^{−t a†a}`.
    RaisingDress,
}

/// Kraus operators `{E_n}` of a dressing semigroup at time `t ≥ 0`.
#[derive(Debug, Clone)]
pub struct KrausFamily {
    pub time: f64,
    pub direction: Direction,
    pub members: Vec<Operator>,
}

impl KrausFamily {
    /// `Σ E_n X E_n†`.
    pub fn apply(&self, x: &Mat) -> Mat {
        let mut out = Array2::zeros(x.raw_dim());
        for e in &self.members {
            out += &e.left_mul(x).dot(&e.matrix().t().mapv(|z| z.conj()));
        }
        out
    }

    /// `Σ E_n† E_n`.
    pub fn normalization(&self) -> Mat {
        let d = self.members.first().map_or(0, |e| e.dim());
        let mut out = Array2::zeros((d, d));
        for e in &self.members {
            out += &e.matrix().t().mapv(|z| z.conj()).dot(e.matrix());
        }
        out
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

#[derive(Debug, Clone)]
struct Band {
    n: usize,
    sign: f64,
    /// Coefficient of the source state `|k⟩`; zero where the band vanishes.
    coeff: Vec<f64>,
}

/// `X ↦ Σ_bands sign · B X Bᵀ` with single-band `B`.
#[derive(Debug, Clone)]
struct Banded {
    raising: bool,
    bands: Vec<Band>,
}

impl Banded {
    /// `e^{tD_{a†∘a}}` for any real `t`.
    fn lowering_dress(t: f64, cutoff: usize) -> Self {
        let d = cutoff + 1;
        let lf = ln_factorials(2 * d);
        // (aa†)_kk on the truncated space
        let lam = |k: usize| if k < cutoff { (k + 1) as f64 } else { 0.0 };
        let ln_x = if t == 0.0 { f64::NEG_INFINITY } else { (-(-2.0 * t).exp_m1()).abs().ln() };
        let sign_step: f64 = if t < 0.0 { -1.0 } else { 1.0 };
        let mut bands = Vec::new();
        for n in 0..d {
            if n > 0 && t == 0.0 {
                break;
            }
            let coeff = (0..d)
                .map(|k| {
                    if k + n > cutoff {
                        return 0.0;
                    }
                    let base = if n == 0 { 0.0 } else { 0.5 * n as f64 * ln_x };
                    (base + 0.5 * (lf[k + n] - lf[k] - lf[n]) - t * lam(k)).exp()
                })
                .collect();
            bands.push(Band { n, sign: sign_step.powi(n as i32), coeff });
        }
        Self { raising: true, bands }
    }

    /// `e^{tD_{a∘a†}}` for any real `t`.
    fn raising_dress(t: f64, cutoff: usize) -> Self {
        let d = cutoff + 1;
        let lf = ln_factorials(d);
        // ln|e^{2t} − 1|
        let ln_y = if t == 0.0 {
            f64::NEG_INFINITY
        } else if t > 0.0 {
            2.0 * t + (-(-2.0 * t).exp_m1()).ln()
        } else {
            (-(2.0 * t).exp_m1()).ln()
        };
        let sign_step: f64 = if t < 0.0 { -1.0 } else { 1.0 };
        let mut bands = Vec::new();
        for n in 0..d {
            if n > 0 && t == 0.0 {
                break;
            }
            let coeff = (0..d)
                .map(|k| {
                    if k < n {
                        return 0.0;
                    }
                    let base = if n == 0 { 0.0 } else { 0.5 * n as f64 * ln_y };
                    (base + 0.5 * (lf[k] - lf[k - n] - lf[n]) - t * k as f64).exp()
                })
                .collect();
            bands.push(Band { n, sign: sign_step.powi(n as i32), coeff });
        }
        Self { raising: false, bands }
    }

    fn target(&self, n: usize, k: usize) -> usize {
        if self.raising {
            k + n
        } else {
            k - n
        }
    }

    fn apply(&self, x: &Mat) -> Mat {
        let d = x.nrows();
        let mut out = Array2::zeros((d, d));
        for band in &self.bands {
            for k in 0..d {
                let ck = band.coeff[k];
                if ck == 0.0 {
                    continue;
                }
                let tk = self.target(band.n, k);
                for l in 0..d {
                    let cl = band.coeff[l];
                    if cl == 0.0 {
                        continue;
                    }
                    out[[tk, self.target(band.n, l)]] += x[[k, l]] * (band.sign * ck * cl);
                }
            }
        }
        out
    }

    fn members(&self, geo: FockGeometry) -> Result<Vec<Operator>> {
        let d = geo.dim();
        self.bands
            .iter()
            .filter(|b| b.coeff.iter().any(|c| *c != 0.0))
            .map(|b| {
                let mut m = Array2::zeros((d, d));
                for (k, c) in b.coeff.iter().enumerate() {
                    if *c != 0.0 {
                        m[[self.target(b.n, k), k]] = re(b.sign.sqrt() * c);
                    }
                }
                Operator::new(geo, m)
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
enum Stage {
    Banded(Banded),
    /// `X ↦ e^{−iθK_N}(X)`.
    Phase(f64),
    /// Column-stacked superoperator matrix.
    Dense(Arc<Mat>),
}

/// A composition of closed-form Fock-factor maps, applied right to left as
/// listed (the first stage acts first).
#[derive(Debug, Clone)]
pub struct FockMap {
    cutoff: usize,
    stages: Vec<Stage>,
}

impl FockMap {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `S_t = e^{tD_{a†∘a}}`; negative `t` gives the (non-CPTP) inverse.
    pub fn lowering_dress(t: f64, cutoff: usize) -> Self {
        Self { cutoff, stages: vec![Stage::Banded(Banded::lowering_dress(t, cutoff))] }
    }

    /// `e^{tD_{a∘a†}}`; negative `t` gives the (non-CPTP) inverse.
    pub fn raising_dress(t: f64, cutoff: usize) -> Self {
        Self { cutoff, stages: vec![Stage::Banded(Banded::raising_dress(t, cutoff))] }
    }

    /// `e^{−iθK_N}`.
    pub fn rotation(theta: f64, cutoff: usize) -> Self {
        Self { cutoff, stages: vec![Stage::Phase(theta)] }
    }

    /// `e^{sD_ph}` with `D_ph = (J+1)D_{a∘a†} + J D_{a†∘a}`, any real `s`.
    pub fn exp_dph(s: f64, j: f64, cutoff: usize) -> Result<Self> {
        let sigma = s.abs();
        let t1 = tau1(sigma, j)?;
        Ok(if s >= 0.0 {
            Self::raising_dress(sigma + t1, cutoff).then(&Self::lowering_dress(t1, cutoff))
        } else {
            Self::lowering_dress(-t1, cutoff).then(&Self::raising_dress(-(sigma + t1), cutoff))
        })
    }

    /// `e^{sD_ph}` by dense exponentiation of the truncated generator. Unlike
    /// [`Self::exp_dph`] the pair `±s` is an exact inverse pair in truncation.
    pub fn exp_dph_dense(s: f64, j: f64, cutoff: usize) -> Result<Self> {
        if !s.is_finite() {
            return Err(invalid("s", "must be finite"));
        }
        if !(j >= 0.0 && j.is_finite()) {
            return Err(invalid("J", "must be finite and non-negative"));
        }
        let f = build_fock(cutoff)?;
        let gen = combine(&[(re(s * (j + 1.0)), &d(&f.a, &f.adag)?), (re(s * j), &d(&f.adag, &f.a)?)])?;
        let dim = f.geometry.dim();
        let e = expm_capped(&gen.to_matrix_capped(dim)?, DENSE_EXPM_CAP)?;
        Ok(Self { cutoff, stages: vec![Stage::Dense(Arc::new(e))] })
    }

    /// `e^{tL_ph}` with `L_ph = −iωK_N + γD_ph`, `t ≥ 0`.
    pub fn exp_lph(t: f64, omega: f64, gamma: f64, j: f64, cutoff: usize) -> Result<Self> {
        if t < 0.0 {
            return Err(invalid("t", "propagator time must be non-negative"));
        }
        Ok(Self::exp_dph(t * gamma, j, cutoff)?.then(&Self::rotation(omega * t, cutoff)))
    }

    /// `next ∘ self`.
    pub fn then(mut self, next: &FockMap) -> Self {
        self.stages.extend(next.stages.iter().cloned());
        self
    }

    /// Applies the map to a Fock-space matrix.
    pub fn apply(&self, x: &Mat) -> Result<Mat> {
        let d = self.cutoff + 1;
        if x.nrows() != d || x.ncols() != d {
            return Err(invalid("rho", "matrix does not match the Fock cutoff"));
        }
        Ok(self.apply_unchecked(x))
    }

    fn apply_unchecked(&self, x: &Mat) -> Mat {
        let mut cur = x.clone();
        for stage in &self.stages {
            cur = match stage {
                Stage::Banded(b) => b.apply(&cur),
                Stage::Phase(theta) => {
                    let mut y = cur;
                    for ((k, l), z) in y.indexed_iter_mut() {
                        *z *= C64::from_polar(1.0, -theta * (k as f64 - l as f64));
                    }
                    y
                }
                Stage::Dense(e) => {
                    let d = cur.nrows();
                    let v = e.dot(&vec(&cur));
                    Array2::from_shape_fn((d, d), |(k, l)| v[k + l * d])
                }
            };
        }
        cur
    }

    /// Applies `1 ⊗ map` on `G ⊗ F`.
    pub fn apply_tensor(&self, geo: &TensorGeometry, x: &Mat) -> Result<Mat> {
        if geo.fock().cutoff() != self.cutoff {
            return Err(invalid("geometry", "Fock cutoff of the map and the state differ"));
        }
        if x.nrows() != geo.dim() || x.ncols() != geo.dim() {
            return Err(invalid("rho", "matrix does not live on the tensor geometry"));
        }
        Ok(map_fock_factor(geo, x, |b| self.apply_unchecked(b)))
    }
}

/// `τ₁(s) = ½ log(J + 1 − J e^{−2s})`.
pub fn tau1(s: f64, j: f64) -> Result<f64> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(invalid("s", "must be finite and non-negative"));
    }
    if !(j >= 0.0 && j.is_finite()) {
        return Err(invalid("J", "must be finite and non-negative"));
    }
    Ok(0.5 * (-j * (-2.0 * s).exp_m1()).ln_1p())
}

/// `τ` with `e^{2τ} = J + 1`.
pub fn tau_of_j(j: f64) -> f64 {
    0.5 * j.ln_1p()
}

/// Kraus family of a dressing semigroup at `t ≥ 0`; the family is finite
/// because operator powers vanish past the cutoff.
pub fn kraus_family(direction: Direction, t: f64, geo: FockGeometry) -> Result<KrausFamily> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", "Kraus families are defined for finite t ≥ 0"));
    }
    let banded = match direction {
        Direction::LoweringDress => Banded::lowering_dress(t, geo.cutoff()),
        Direction::RaisingDress => Banded::raising_dress(t, geo.cutoff()),
    };
    Ok(KrausFamily { time: t, direction, members: banded.members(geo)? })
}

fn check_t(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", "semigroup time must be finite and non-negative"));
    }
    Ok(())
}

/// `S_t(ρ)`, `t ≥ 0`.
pub fn s_semigroup(t: f64, rho: &Mat, geo: FockGeometry) -> Result<Mat> {
    check_t(t)?;
    FockMap::lowering_dress(t, geo.cutoff()).apply(rho)
}

/// `S_{−t}(ρ)`. The output need not be positive. Rejects `t` outside the
/// region `|1 − e^{2t}| < 1` where the untruncated series converges.
pub fn s_semigroup_inverse(t: f64, rho: &Mat, geo: FockGeometry) -> Result<Mat> {
    if !t.is_finite() {
        return Err(invalid("t", "must be finite"));
    }
    let x = (2.0 * t).exp_m1().abs();
    if x >= 1.0 {
        return Err(Error::ResourceLimit(format!(
            "inverse dressing series diverges: |1 − e^(2t)| = {x:.3e} ≥ 1 at t = {t}"
        )));
    }
    FockMap::lowering_dress(-t, geo.cutoff()).apply(rho)
}

/// `e^{tD_{a∘a†}}(ρ)`, `t ≥ 0`.
pub fn d_aad_semigroup(t: f64, rho: &Mat, geo: FockGeometry) -> Result<Mat> {
    check_t(t)?;
    FockMap::raising_dress(t, geo.cutoff()).apply(rho)
}

/// `e^{tL_ph}(ρ)` through the dressing factorization.
pub fn exp_lph(t: f64, rho: &Mat, geo: FockGeometry, omega: f64, gamma: f64, j: f64) -> Result<Mat> {
    if !(omega > 0.0 && gamma > 0.0 && j >= 0.0) {
        return Err(invalid("params", "require ω > 0, γ > 0, J ≥ 0"));
    }
    FockMap::exp_lph(t, omega, gamma, j, geo.cutoff())?.apply(rho)
}

/// `Φ_{n,m} = K_{a†}ⁿ K_aᵐ (|0⟩⟨0|)`.
pub fn phi_basis(n: usize, m: usize, fock: &FockSpace) -> Result<Mat> {
    let c = fock.geometry.cutoff();
    if n > c || m > c {
        return Err(invalid("n, m", "indices must not exceed the cutoff"));
    }
    let d = fock.geometry.dim();
    let mut x = Array2::zeros((d, d));
    x[[0, 0]] = re(1.0);
    let ka = k(&fock.a);
    let kad = k(&fock.adag);
    for _ in 0..m {
        x = ka.apply_unchecked(&x);
    }
    for _ in 0..n {
        x = kad.apply_unchecked(&x);
    }
    Ok(x)
}

/// Thermal state of the oscillator.
#[derive(Debug, Clone)]
pub struct GibbsState {
    pub rho: Mat,
    /// Inverse temperature; infinite at `J = 0`.
    pub beta: f64,
    /// Set when `J = 0` and the vacuum is returned.
    pub zero_temperature: bool,
    /// Untruncated probability mass beyond the cutoff.
    pub truncation_tail: f64,
}

/// Diagonal Gibbs state with `p_n ∝ (J/(J+1))ⁿ`, normalized on the truncated basis.
pub fn gibbs_state(omega: f64, j: f64, geo: FockGeometry) -> Result<GibbsState> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(invalid("omega", "must be positive"));
    }
    if !(j >= 0.0 && j.is_finite()) {
        return Err(invalid("J", "must be finite and non-negative"));
    }
    let d = geo.dim();
    let mut rho = Array2::zeros((d, d));
    if j == 0.0 {
        rho[[0, 0]] = re(1.0);
        return Ok(GibbsState { rho, beta: f64::INFINITY, zero_temperature: true, truncation_tail: 0.0 });
    }
    let r = j / (j + 1.0);
    let weights: Vec<f64> = (0..d).map(|n| r.powi(n as i32)).collect();
    let z: f64 = weights.iter().sum();
    for (n, w) in weights.iter().enumerate() {
        rho[[n, n]] = re(w / z);
    }
    Ok(GibbsState { rho, beta: (1.0 / j).ln_1p() / omega, zero_temperature: false, truncation_tail: r.powi(d as i32) })
}
