// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! The limiting spin state `ρ★` and the comparison of the OISD evolution with
//! its synchronized decoupled surrogate.

use ndarray::linalg::kron;
use serde::Serialize;

use super::ModelParams;
use crate::error::{invalid, Result};
use crate::hilbert::{partial_trace_fock, TensorSpace};
use crate::numerics::{hermitian_part, min_eigenvalue, trace, trace_norm};
use crate::propagators::{exp_lsp, exp_lsyn, gibbs_state, FockMap, OisdPropagator, TransformParams, VTransform};
use crate::Mat;

/// Default bound on the amplification of `V(σ)⁻¹`.
pub const INVERSE_THRESHOLD: f64 = 1e6;

#[derive(Debug, Clone)]
pub struct RhoStar {
    /// Spin density matrix.
    pub rho: Mat,
    /// `V(σ)⁻¹ρ₀`, kept for the bound of the comparison experiment.
    pub preimage: Mat,
    pub min_eigenvalue: f64,
    pub amplification: f64,
    /// `|Tr V⁻¹ρ₀ − 1|` before renormalization.
    pub trace_defect: f64,
}

/// `ρ★ = Tr_F V(σ)⁻¹ρ₀`, Hermitized and normalized; positivity is reported.
pub fn rho_star(rho0: &Mat, v: &VTransform, space: &TensorSpace, threshold: f64) -> Result<RhoStar> {
    let inv = v.inverse_checked(rho0, threshold)?;
    let marginal = hermitian_part(&partial_trace_fock(&space.geometry, &inv.rho)?);
    let tr = trace(&marginal).re;
    let rho = marginal.mapv(|z| z / tr);
    Ok(RhoStar {
        min_eigenvalue: min_eigenvalue(&rho),
        rho,
        preimage: inv.rho,
        amplification: inv.amplification,
        trace_defect: (tr - 1.0).abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop2Config {
    pub sigma: f64,
    pub grid: Vec<f64>,
    /// Times at which the synchronized generator is compared with `L_OISD`.
    pub sync_times: Vec<f64>,
    /// Half-width `K` of the spin window `|m| ≤ K`.
    pub window: usize,
    pub inverse_threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prop2Row {
    pub t: f64,
    /// `‖ρ(t) − ρ̌(t)‖₁`.
    pub distance: f64,
    /// `‖(1 ⊗ e^{tL̃_ph})V⁻¹ρ₀ − ρ★ ⊗ ρ_G‖₁`.
    pub bound: f64,
    /// `Tr[(P_K ⊗ 1) ρ(t)]`.
    pub window_population: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop2Report {
    pub rows: Vec<Prop2Row>,
    /// `(t, ‖e^{tL_syn}ρ̌(0) − e^{tL_OISD}ρ̌(0)‖₁)`.
    pub sync_rows: Vec<(f64, f64)>,
    pub rho_star_min_eigenvalue: f64,
    pub inverse_amplification: f64,
    /// Least-squares rate of `log distance` over the grid, when defined.
    pub fitted_rate: Option<f64>,
    pub induced_spin_rate: f64,
}

fn window_population(space: &TensorSpace, rho: &Mat, k: usize) -> f64 {
    (0..space.dim()).filter(|&i| space.labels(i).0.unsigned_abs() as usize <= k).map(|i| rho[[i, i]].re).sum()
}

fn fit_rate(rows: &[Prop2Row]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.t > 0.0 && r.distance > 1e-13).map(|r| (r.t, r.distance.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}

fn check_grid(p: &ModelParams, cfg: &Prop2Config) -> Result<()> {
    p.validate_core()?;
    if cfg.grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(invalid("grid", "times must be finite and non-negative"));
    }
    Ok(())
}

/// Runs the comparison of `e^{tL_OISD}ρ₀` with
/// `ρ̌(t) = V(e^{tL̃_sp}ρ★ ⊗ ρ_G)`, where `ρ★` is obtained through `V(σ)⁻¹`.
pub fn prop2_experiment(rho0: &Mat, p: &ModelParams, space: &TensorSpace, cfg: &Prop2Config) -> Result<Prop2Report> {
    check_grid(p, cfg)?;
    let v = VTransform::new(&TransformParams::new(cfg.sigma, p)?, space)?;
    let star = rho_star(rho0, &v, space, cfg.inverse_threshold)?;
    compare(rho0, &star, &v, p, space, cfg)
}

/// [`prop2_experiment`] for `ρ₀ = V(σ)X` with the preimage `X` given, so that
/// `V(σ)⁻¹` is never formed. The reported amplification is 1.
pub fn prop2_from_preimage(
    preimage: &Mat,
    p: &ModelParams,
    space: &TensorSpace,
    cfg: &Prop2Config,
) -> Result<Prop2Report> {
    check_grid(p, cfg)?;
    let v = VTransform::new(&TransformParams::new(cfg.sigma, p)?, space)?;
    let rho0 = v.apply(preimage)?;
    let marginal = hermitian_part(&partial_trace_fock(&space.geometry, preimage)?);
    let tr = trace(&marginal).re;
    let rho = marginal.mapv(|z| z / tr);
    let star = RhoStar {
        min_eigenvalue: min_eigenvalue(&rho),
        rho,
        preimage: preimage.clone(),
        amplification: 1.0,
        trace_defect: (tr - 1.0).abs(),
    };
    compare(&rho0, &star, &v, p, space, cfg)
}

fn compare(
    rho0: &Mat,
    star: &RhoStar,
    v: &VTransform,
    p: &ModelParams,
    space: &TensorSpace,
    cfg: &Prop2Config,
) -> Result<Prop2Report> {
    let geo = space.geometry;
    let c = geo.fock().cutoff();
    let gibbs = gibbs_state(p.omega, p.j, geo.fock())?.rho;
    let target = kron(&star.rho, &gibbs);
    let rate = p.induced_spin_rate()?;
    let (am, ap) = (rate * (p.j + 1.0), rate * p.j);
    let z = OisdPropagator::new(space, p)?;

    let mut rows = Vec::with_capacity(cfg.grid.len());
    for &t in &cfg.grid {
        let rho_t = z.apply(t, rho0)?;
        let spin_t = exp_lsp(t, &star.rho, geo.spin(), p.mu, am, ap)?.rho;
        let check = v.apply(&kron(&spin_t, &gibbs))?;
        let relaxed = FockMap::exp_lph(t, p.omega, p.gamma, p.j, c)?.apply_tensor(&geo, &star.preimage)?;
        rows.push(Prop2Row {
            t,
            distance: trace_norm(&(&rho_t - &check)),
            bound: trace_norm(&(relaxed - &target)),
            window_population: window_population(space, &rho_t, cfg.window),
        });
    }

    let sync_rows = sync_residuals(&v.apply(&target)?, p, space, &cfg.sync_times)?;

    Ok(Prop2Report {
        fitted_rate: fit_rate(&rows),
        rows,
        sync_rows,
        rho_star_min_eigenvalue: star.min_eigenvalue,
        inverse_amplification: star.amplification,
        induced_spin_rate: rate,
    })
}

/// `(t, ‖e^{tL_syn}ρ − e^{tL_OISD}ρ‖₁)` for each `t`.
pub fn sync_residuals(rho: &Mat, p: &ModelParams, space: &TensorSpace, times: &[f64]) -> Result<Vec<(f64, f64)>> {
    let z = OisdPropagator::new(space, p)?;
    times
        .iter()
        .map(|&t| {
            let a = exp_lsyn(t, rho, &space.geometry, p)?;
            let b = z.apply(t, rho)?;
            Ok((t, trace_norm(&(a - b))))
        })
        .collect()
}

/// `χ ⊗ ξ` lifted through `V(σ)`: a state whose `ρ★` is `χ` by construction.
pub fn dressed_product(chi: &Mat, xi: &Mat, v: &VTransform) -> Result<Mat> {
    let prod = kron(chi, xi);
    let out = v.apply(&prod)?;
    let tr = trace(&out).re;
    Ok(hermitian_part(&out).mapv(|z| z / tr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::SpinScheme;
    use crate::numerics::sampling::{random_density, rng};

    fn spin_state(space: &TensorSpace, seed: u64, radius: i64) -> Mat {
        let mask: Vec<bool> =
            (0..space.geometry.spin().dim()).map(|s| space.geometry.spin().value(s).abs() <= radius).collect();
        random_density(&mut rng(seed), &mask)
    }

    fn fock_state(space: &TensorSpace, seed: u64, top: usize) -> Mat {
        let mask: Vec<bool> = (0..=space.geometry.fock().cutoff()).map(|n| n <= top).collect();
        random_density(&mut rng(seed), &mask)
    }

    #[test]
    fn rho_star_recovers_the_spin_factor() {
        // e^{−σD_ph} amplifies rounding by about e^{2σ(2J+1)·cutoff}
        let space = TensorSpace::new(6, SpinScheme::Hard, 10).unwrap();
        let p = ModelParams::default();
        let v = VTransform::new(&TransformParams::new(0.3, &p).unwrap(), &space).unwrap();
        let chi = spin_state(&space, 3, 1);
        let xi = fock_state(&space, 4, 2);
        let rho0 = dressed_product(&chi, &xi, &v).unwrap();
        let star = rho_star(&rho0, &v, &space, INVERSE_THRESHOLD).unwrap();
        assert!(trace_norm(&(star.rho - chi)) < 1e-8);
    }

    #[test]
    fn lambda_zero_gibbs_start_coincides() {
        let space = TensorSpace::new(5, SpinScheme::Hard, 20).unwrap();
        let p = ModelParams { lambda: 0.0, ..Default::default() };
        let chi = spin_state(&space, 5, 1);
        let gibbs = gibbs_state(p.omega, p.j, space.geometry.fock()).unwrap().rho;
        let rho0 = kron(&chi, &gibbs);
        let cfg = Prop2Config {
            sigma: 0.15,
            grid: vec![0.0, 1.0, 4.0],
            sync_times: vec![1.0],
            window: 1,
            inverse_threshold: INVERSE_THRESHOLD,
        };
        let r = prop2_experiment(&rho0, &p, &space, &cfg).unwrap();
        assert!(r.rows.iter().all(|row| row.distance < 1e-9), "{r:?}");
    }

    #[test]
    fn preimage_route_agrees_with_the_inverse_route() {
        let space = TensorSpace::new(8, SpinScheme::Hard, 10).unwrap();
        let p = ModelParams::default();
        let chi = spin_state(&space, 6, 1);
        let xi = fock_state(&space, 7, 2);
        let cfg = Prop2Config {
            sigma: 0.3,
            grid: vec![0.0, 0.5, 2.0],
            sync_times: Vec::new(),
            window: 1,
            inverse_threshold: INVERSE_THRESHOLD,
        };
        let v = VTransform::new(&TransformParams::new(cfg.sigma, &p).unwrap(), &space).unwrap();
        let a = prop2_from_preimage(&kron(&chi, &xi), &p, &space, &cfg).unwrap();
        let b = prop2_experiment(&dressed_product(&chi, &xi, &v).unwrap(), &p, &space, &cfg).unwrap();
        assert_eq!(a.inverse_amplification, 1.0);
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert!((x.distance - y.distance).abs() < 1e-7, "{x:?} {y:?}");
            assert!((x.bound - y.bound).abs() < 1e-7, "{x:?} {y:?}");
            assert!(x.distance <= x.bound);
        }
    }
}
