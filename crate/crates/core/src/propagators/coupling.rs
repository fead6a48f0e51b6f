// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Interaction-dressing maps on `G ⊗ F`: `W(η)`, the decoupling transformation
//! `V(σ)`, and the product formula for the OISD semigroup.

use serde::Serialize;

use super::oscillator::{tau1, tau_of_j, FockMap};
use super::spin::SpinMap;
use crate::error::{invalid, Error, Result};
use crate::hilbert::{TensorGeometry, TensorSpace};
use crate::models::ModelParams;
use crate::numerics::quad;
use crate::numerics::{expm_blockwise, trace_norm};
use crate::{Mat, C64};

/// `W(η): ρ ↦ UρU†` with `U = exp(η l₋a† − η̄ l₊a)`.
#[derive(Debug, Clone)]
pub struct WMap {
    pub eta: C64,
    u: Mat,
    udag: Mat,
}

impl WMap {
    pub fn new(eta: C64, space: &TensorSpace) -> Result<Self> {
        let g = space.l_minus.mul(&space.adag)?.scaled(eta).sub(&space.l_plus.mul(&space.a)?.scaled(eta.conj()))?;
        let u = expm_blockwise(g.matrix())?;
        let udag = u.t().mapv(|z| z.conj());
        Ok(Self { eta, u, udag })
    }

    pub fn apply(&self, x: &Mat) -> Mat {
        self.u.dot(x).dot(&self.udag)
    }

    /// `W(−η)`.
    pub fn apply_inverse(&self, x: &Mat) -> Mat {
        self.udag.dot(x).dot(&self.u)
    }

    pub fn unitary(&self) -> &Mat {
        &self.u
    }
}

/// `e^{−i(θ_s K_M + θ_f K_N)}` on `G ⊗ F`.
pub fn rotate(geo: &TensorGeometry, x: &Mat, theta_spin: f64, theta_fock: f64) -> Mat {
    let phase: Vec<C64> = (0..geo.dim())
        .map(|i| {
            let (s, f) = geo.split(i);
            C64::from_polar(1.0, -(theta_spin * geo.spin().value(s) as f64 + theta_fock * f as f64))
        })
        .collect();
    let mut out = x.clone();
    for ((i, j), z) in out.indexed_iter_mut() {
        *z *= phase[i] * phase[j].conj();
    }
    out
}

/// Constants of `V(σ) = W(ζ₁) e^{σD_ph} W(ζ₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformParams {
    pub sigma: f64,
    pub delta: f64,
    pub zeta1: C64,
    pub zeta2: C64,
    /// `τ` with `e^{2τ} = J + 1`.
    pub tau: f64,
    pub j: f64,
}

impl TransformParams {
    pub fn new(sigma: f64, p: &ModelParams) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid("sigma", "must be positive and finite"));
        }
        p.validate_core()?;
        let delta = p.delta()?;
        let zeta1 = -C64::new(p.detuning(), p.gamma / sigma.tanh()) * delta;
        let zeta2 = C64::new(0.0, p.gamma * delta / sigma.sinh());
        Ok(Self { sigma, delta, zeta1, zeta2, tau: tau_of_j(p.j), j: p.j })
    }

    /// `τ₁(s)` for this bath.
    pub fn tau1_of(&self, s: f64) -> Result<f64> {
        tau1(s, self.j)
    }
}

/// How `e^{±σD_ph}` is realized inside `V(σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DphRoute {
    /// Dense exponential of the truncated generator; `V⁻¹V = 1` in truncation.
    Dense,
    /// Kraus-type series; not an exact inverse pair once population reaches
    /// the cutoff.
    Factorized,
}

/// Output of `V(σ)⁻¹` with its amplification diagnostic.
#[derive(Debug, Clone)]
pub struct Inverted {
    pub rho: Mat,
    /// `‖V⁻¹ρ‖₁ / ‖ρ‖₁`.
    pub amplification: f64,
}

/// `V = W(ζ₁) ∘ e^{σD_ph} ∘ W(ζ₂)` with its inverse
/// `W(−ζ₂) ∘ e^{−σD_ph} ∘ W(−ζ₁)`.
#[derive(Debug, Clone)]
pub struct VTransform {
    pub sigma: f64,
    pub zeta1: C64,
    pub zeta2: C64,
    geometry: TensorGeometry,
    w1: WMap,
    w2: WMap,
    forward: FockMap,
    backward: FockMap,
}

impl VTransform {
    pub fn new(tp: &TransformParams, space: &TensorSpace) -> Result<Self> {
        Self::with_route(tp, space, DphRoute::Dense)
    }

    pub fn with_route(tp: &TransformParams, space: &TensorSpace, route: DphRoute) -> Result<Self> {
        Self::from_parts(tp.sigma, tp.zeta1, tp.zeta2, tp.j, space, route)
    }

    /// `V = W(λ/(μ−ω)) ∘ e^{σD_ph}` for the undamped oscillator.
    pub fn gamma_zero(sigma: f64, p: &ModelParams, space: &TensorSpace) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid("sigma", "must be positive and finite"));
        }
        p.validate()?;
        if p.omega == p.mu {
            return Err(invalid("omega", "the γ = 0 decoupling requires ω ≠ μ"));
        }
        Self::from_parts(
            sigma,
            C64::new(p.lambda / (p.mu - p.omega), 0.0),
            C64::new(0.0, 0.0),
            p.j,
            space,
            DphRoute::Dense,
        )
    }

    fn from_parts(sigma: f64, zeta1: C64, zeta2: C64, j: f64, space: &TensorSpace, route: DphRoute) -> Result<Self> {
        let c = space.geometry.fock().cutoff();
        let (forward, backward) = match route {
            DphRoute::Dense => (FockMap::exp_dph_dense(sigma, j, c)?, FockMap::exp_dph_dense(-sigma, j, c)?),
            DphRoute::Factorized => (FockMap::exp_dph(sigma, j, c)?, FockMap::exp_dph(-sigma, j, c)?),
        };
        Ok(Self {
            sigma,
            zeta1,
            zeta2,
            geometry: space.geometry,
            w1: WMap::new(zeta1, space)?,
            w2: WMap::new(zeta2, space)?,
            forward,
            backward,
        })
    }

    pub fn apply(&self, x: &Mat) -> Result<Mat> {
        let y = self.w2.apply(x);
        let y = self.forward.apply_tensor(&self.geometry, &y)?;
        Ok(self.w1.apply(&y))
    }

    /// `V⁻¹ρ` with the measured amplification; the output need not be positive.
    pub fn inverse(&self, x: &Mat) -> Result<Inverted> {
        let y = self.w1.apply_inverse(x);
        let y = self.backward.apply_tensor(&self.geometry, &y)?;
        let rho = self.w2.apply_inverse(&y);
        let amplification = trace_norm(&rho) / trace_norm(x).max(f64::MIN_POSITIVE);
        Ok(Inverted { rho, amplification })
    }

    /// As [`Self::inverse`], failing when the amplification exceeds `threshold`.
    pub fn inverse_checked(&self, x: &Mat, threshold: f64) -> Result<Inverted> {
        let inv = self.inverse(x)?;
        if inv.amplification.is_nan() || inv.amplification > threshold {
            return Err(Error::IllConditioned {
                what: "inverse decoupling transformation".into(),
                measured: inv.amplification,
                threshold,
            });
        }
        Ok(inv)
    }

    /// A priori growth scale `e^{2σ·cutoff}` of `e^{−σD_ph}`.
    pub fn condition_scale(&self) -> f64 {
        (2.0 * self.sigma * self.geometry.fock().cutoff() as f64).exp()
    }
}

/// `η₁(t)`, `η₂(t)`, `τ₂(t)` of the product formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductSchedule {
    pub t: f64,
    pub eta1: C64,
    pub eta2: C64,
    pub tau2: f64,
    /// Quadrature error estimates for `η₂` and `τ₂`.
    pub quad_error: f64,
}

const TAYLOR_SWITCH: f64 = 1e-3;

/// Closed-form `η₁(t)` (Taylor series near `t = 0`).
pub fn eta1(t: f64, p: &ModelParams) -> C64 {
    let (lam, g, dd) = (p.lambda, p.gamma, p.detuning());
    if t == 0.0 {
        return C64::new(0.0, 0.0);
    }
    if t * (g + dd.abs()) < TAYLOR_SWITCH {
        let a1 = C64::new(0.0, -lam / 2.0);
        let a2 = C64::new(lam * dd / 3.0, 0.0);
        let a3 = C64::new(0.0, lam * (3.0 * dd * dd + g * g) / 24.0);
        return ((a3 * t + a2) * t + a1) * t;
    }
    let pref = C64::new(0.0, lam / (dd * dd + g * g));
    let e = C64::from_polar(1.0, dd * t);
    let gt = g * t;
    let body = C64::new(0.0, dd) * e + g / gt.sinh() - e * (g / gt.tanh());
    pref * body
}

/// Integrand of `η₂`: `γη₁(s)/sinh(γs)`.
fn eta2_integrand(s: f64, p: &ModelParams) -> C64 {
    let gs = p.gamma * s;
    let ratio = if gs < 1e-8 { 1.0 / s } else { p.gamma / gs.sinh() };
    eta1(s, p) * ratio
}

const QUAD_ABS: f64 = 1e-13;
const QUAD_REL: f64 = 1e-12;

/// `η₁`, and `η₂, τ₂` by adaptive quadrature of their defining equations.
pub fn product_schedule(t: f64, p: &ModelParams) -> Result<ProductSchedule> {
    p.validate_core()?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", "must be finite and non-negative"));
    }
    if t == 0.0 {
        let z = C64::new(0.0, 0.0);
        return Ok(ProductSchedule { t, eta1: z, eta2: z, tau2: 0.0, quad_error: 0.0 });
    }
    let to_limit = |e: Error| match e {
        Error::IllConditioned { measured, .. } => {
            Error::ResourceLimit(format!("schedule quadrature did not converge (error estimate {measured:.3e})"))
        }
        other => other,
    };
    let e2 = quad::integrate(|s| eta2_integrand(s, p), 0.0, t, QUAD_ABS, QUAD_REL).map_err(to_limit)?;
    let t2 = quad::integrate(|s| C64::new(p.gamma * eta1(s, p).norm_sqr(), 0.0), 0.0, t, QUAD_ABS, QUAD_REL)
        .map_err(to_limit)?;
    Ok(ProductSchedule { t, eta1: eta1(t, p), eta2: e2.value, tau2: t2.value.re, quad_error: e2.error + t2.error })
}

/// Residuals of the three defining equations at `t`, with derivatives from
/// central differences of step `h`.
pub fn schedule_residuals(t: f64, h: f64, p: &ModelParams) -> Result<[f64; 3]> {
    if !(t > h && h > 0.0) {
        return Err(invalid("t", "need t > h > 0 for central differences"));
    }
    let (a, b) = (product_schedule(t - h, p)?, product_schedule(t + h, p)?);
    let mid = product_schedule(t, p)?;
    let d1 = (b.eta1 - a.eta1) / (2.0 * h);
    let d2 = (b.eta2 - a.eta2) / (2.0 * h);
    let dt = (b.tau2 - a.tau2) / (2.0 * h);
    let g = p.gamma;
    let r_eta2 = (d2 * (t * g).sinh() - mid.eta1 * g).norm();
    let r_eta1 = ((d1 + mid.eta1 * (g / (t * g).tanh())) * C64::from_polar(1.0, -t * p.detuning())
        + C64::new(0.0, p.lambda))
    .norm();
    let r_tau2 = (dt - g * mid.eta1.norm_sqr()).abs();
    Ok([r_eta1, r_eta2, r_tau2])
}

/// Closed-form `e^{tL_OISD}` through the product formula.
#[derive(Debug, Clone)]
pub struct OisdPropagator {
    space: TensorSpace,
    params: ModelParams,
}

impl OisdPropagator {
    pub fn new(space: &TensorSpace, params: &ModelParams) -> Result<Self> {
        params.validate_core()?;
        Ok(Self { space: space.clone(), params: *params })
    }

    pub fn apply(&self, t: f64, x: &Mat) -> Result<Mat> {
        let geo = self.space.geometry;
        if x.nrows() != geo.dim() || x.ncols() != geo.dim() {
            return Err(invalid("rho", "matrix does not live on the tensor geometry"));
        }
        let p = &self.params;
        let sch = product_schedule(t, p)?;
        let y = WMap::new(sch.eta2, &self.space)?.apply(x);
        let y = FockMap::exp_dph(t * p.gamma, p.j, geo.fock().cutoff())?.apply_tensor(&geo, &y)?;
        let y = SpinMap::new(sch.tau2, 0.0, p.j + 1.0, p.j, geo.spin())?.apply_tensor(&geo, &y)?;
        let y = WMap::new(sch.eta1, &self.space)?.apply(&y);
        Ok(rotate(&geo, &y, p.mu * t, p.omega * t))
    }
}

/// `e^{tL_OISD}(ρ)` via the product formula.
pub fn exp_loisd_closed(t: f64, rho: &Mat, space: &TensorSpace, params: &ModelParams) -> Result<Mat> {
    OisdPropagator::new(space, params)?.apply(t, rho)
}

/// `e^{tL_decoupled}` with spin dissipation `λγδ + γ̄`.
pub fn exp_ldecoupled(t: f64, rho: &Mat, geo: &TensorGeometry, p: &ModelParams) -> Result<Mat> {
    p.validate_core()?;
    let c = p.induced_spin_rate()? + p.gamma_bar;
    let y = SpinMap::new(t, p.mu, c * (p.j + 1.0), c * p.j, geo.spin())?.apply_tensor(geo, rho)?;
    FockMap::exp_lph(t, p.omega, p.gamma, p.j, geo.fock().cutoff())?.apply_tensor(geo, &y)
}

/// `e^{tL_syn.dec}` with `L_syn.dec = −iμ(K_sp + K_ph) + λγδ D_sp`.
pub fn exp_lsyn(t: f64, rho: &Mat, geo: &TensorGeometry, p: &ModelParams) -> Result<Mat> {
    p.validate_core()?;
    if t < 0.0 {
        return Err(invalid("t", "must be non-negative"));
    }
    let c = p.induced_spin_rate()?;
    let y = SpinMap::new(t, 0.0, c * (p.j + 1.0), c * p.j, geo.spin())?.apply_tensor(geo, rho)?;
    Ok(rotate(geo, &y, p.mu * t, p.mu * t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{interior_mask, project, SpinScheme};
    use crate::numerics::frobenius;
    use crate::numerics::sampling::{random_density, rng};

    fn params() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn eta1_limits_and_resonance() {
        let p = params();
        assert_eq!(eta1(0.0, &p), C64::new(0.0, 0.0));
        // Taylor branch and closed form agree across the switch
        let t = TAYLOR_SWITCH / (p.gamma + p.detuning().abs());
        let a = eta1(t * 0.999, &p);
        let b = eta1(t * 1.001, &p);
        let slope = C64::new(2.0 * p.lambda * p.detuning() / 3.0 * t, -p.lambda / 2.0);
        assert!((b - a - slope * (0.002 * t)).norm() < 1e-9 * t);
        let r = ModelParams { mu: 1.0, ..p };
        for t in [0.3, 2.0, 9.0] {
            let want = C64::new(0.0, -r.lambda / r.gamma * (r.gamma * t / 2.0).tanh());
            assert!((eta1(t, &r) - want).norm() < 1e-13);
        }
        assert!(eta1(5000.0, &p).is_finite());
    }

    #[test]
    fn schedule_satisfies_its_equations() {
        let p = params();
        for t in [0.1, 1.0, 3.0] {
            let r = schedule_residuals(t, 1e-4, &p).unwrap();
            assert!(r.iter().all(|v| *v < 1e-8), "t={t}: {r:?}");
        }
        let s0 = product_schedule(0.0, &p).unwrap();
        assert_eq!(s0.tau2, 0.0);
        let s = product_schedule(1e-6, &p).unwrap();
        assert!(s.eta1.norm() < 1e-6 && s.eta2.norm() < 1e-6 && s.tau2 < 1e-12);
        let mut last = 0.0;
        for t in [0.5, 1.0, 2.0, 4.0] {
            let s = product_schedule(t, &p).unwrap();
            assert!(s.tau2 >= last);
            last = s.tau2;
        }
    }

    #[test]
    fn transform_constants() {
        let p = ModelParams { omega: 2.0, mu: 1.0, gamma: 1.0, lambda: 1.0, ..params() };
        let tp = TransformParams::new(0.5, &p).unwrap();
        assert!((tp.delta - 0.5).abs() < 1e-15);
        assert!((tp.zeta2 - C64::new(0.0, 0.5 / 0.5f64.sinh())).norm() < 1e-15);
        let z = ModelParams { lambda: 0.0, ..p };
        let tz = TransformParams::new(0.5, &z).unwrap();
        assert_eq!(tz.zeta1.norm() + tz.zeta2.norm(), 0.0);
    }

    #[test]
    fn w_round_trip_and_unitarity() {
        let space = TensorSpace::new(4, SpinScheme::Hard, 5).unwrap();
        let w = WMap::new(C64::new(0.3, -0.4), &space).unwrap();
        let x = random_density(&mut rng(1), &vec![true; space.dim()]);
        assert!(trace_norm(&(w.apply_inverse(&w.apply(&x)) - &x)) < 1e-12);
        let u = w.unitary();
        let id = u.t().mapv(|z| z.conj()).dot(u);
        assert!(frobenius(&(id - Mat::eye(space.dim()))) < 1e-12);
        let z = WMap::new(C64::new(0.0, 0.0), &space).unwrap();
        assert!(trace_norm(&(z.apply(&x) - &x)) < 1e-15);
    }

    #[test]
    fn v_round_trip() {
        let space = TensorSpace::new(4, SpinScheme::Hard, 8).unwrap();
        let tp = TransformParams::new(0.5, &params()).unwrap();
        let v = VTransform::new(&tp, &space).unwrap();
        let mask = interior_mask(space.geometry.into(), 2, 5).unwrap();
        let x = random_density(&mut rng(2), &mask);
        let back = v.inverse(&v.apply(&x).unwrap()).unwrap();
        assert!(trace_norm(&(back.rho - &x)) < 1e-7);
        assert!(v.inverse_checked(&x, 1e-3).is_err());
    }

    #[test]
    fn closed_form_identity_at_zero_and_decoupled_limit() {
        let space = TensorSpace::new(3, SpinScheme::Hard, 6).unwrap();
        let x = random_density(&mut rng(3), &vec![true; space.dim()]);
        let p = params();
        let y = exp_loisd_closed(0.0, &x, &space, &p).unwrap();
        assert!(trace_norm(&(y - &x)) < 1e-13);
        let q = ModelParams { lambda: 0.0, ..p };
        let a = exp_loisd_closed(0.8, &x, &space, &q).unwrap();
        let b = exp_ldecoupled(0.8, &x, &space.geometry, &q).unwrap();
        let inner = interior_mask(space.geometry.into(), 0, 0).unwrap();
        assert!(trace_norm(&project(&inner, &(a - b))) < 1e-12);
    }
}
