// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! The verification suite and the experiment commands.

use ndarray::linalg::kron;

use super::config::RunConfig;
use super::report::{CheckRecord, RunReport, Series};
use crate::error::Result;
use crate::hilbert::{interior_mask, project, TensorGeometry};
use crate::models::{
    build_l_decoupled_with_rate, build_l_oisd, build_l_oisd_general, build_l_ph, dressed_product, finite_ell_demo,
    intertwining_residual, ph_spectrum, prop2_experiment, ModelParams, ProbeConfig, Prop2Config, SparseState,
};
use crate::numerics::sampling::{random_density, rng, Rng};
use crate::numerics::{generator_fd_check, integrate_master, min_eigenvalue, trace, trace_norm};
use crate::propagators::{
    exp_lsp, gibbs_state, kraus_family, schedule_residuals, skellam_mean, skellam_variance, spin_coeffs, Direction,
    FockMap, OisdPropagator, TransformParams, VTransform, SERIES_EPS,
};
use crate::superop::{verify_identity_suite, IdentitySuiteConfig, IDENTITY_TAGS};
use crate::{re, Mat, C64};

/// Bound on the finite-difference generator residuals.
pub const FD_TOL: f64 = 1e-5;
/// Bound on the Gibbs fixed-point residual.
pub const GIBBS_FIXED_TOL: f64 = 1e-8;
/// Bound on the distance to the Gibbs state at `t = 20/γ`.
pub const GIBBS_CONVERGENCE_TOL: f64 = 1e-6;
/// Bound on the composition residual of the closed-form semigroups.
pub const SEMIGROUP_TOL: f64 = 1e-9;
/// Bound on the spin mean and variance discrepancies, before the series tail.
pub const SPIN_MOMENT_TOL: f64 = 1e-10;
/// Bound on the synchronized-comparison identity.
pub const SYNC_TOL: f64 = 1e-6;
/// Bound on the final distance and the window population of the comparison.
pub const ASYMPTOTIC_TOL: f64 = 1e-3;
/// Bound on the spectral deviations.
pub const SPECTRUM_TOL: f64 = 1e-7;
/// Spin dissipation added for the general-model decoupling check when the
/// configuration has none.
pub const GENERAL_GAMMA_BAR: f64 = 0.05;
/// Times of the spin-statistics checks.
pub const SPIN_TIMES: [f64; 3] = [0.2, 0.8, 2.0];
/// Time of the short-time Kraus normalization check.
pub const KRAUS_SHORT_TIME: f64 = 0.1;
/// Time of the trace and positivity checks; long enough to mix, short enough
/// that no mass reaches the truncation boundary at desk geometries.
pub const PROPAGATOR_TIME: f64 = 1.0;
/// Multiplets of the finite-ℓ comparison.
pub const ELLS: [usize; 3] = [10, 20, 40];

/// Deliberate corruptions used to exercise the failure path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// The decoupled generator receives the negated spin dissipation rate.
    NegatedSpinRate,
}

fn fmt_t(t: f64) -> String {
    format!("{t}")
}

fn general_params(p: &ModelParams) -> ModelParams {
    ModelParams { gamma_bar: if p.gamma_bar > 0.0 { p.gamma_bar } else { GENERAL_GAMMA_BAR }, ..*p }
}

fn gamma_zero_params(p: &ModelParams) -> ModelParams {
    ModelParams { gamma: 0.0, ..general_params(p) }
}

/// Name and relation of every check `verify` performs, in report order.
pub fn verify_plan(cfg: &RunConfig) -> Vec<(String, String)> {
    let mut plan: Vec<(String, String)> = Vec::new();
    let mut add = |name: String, tag: &str| plan.push((name, tag.to_string()));
    for tag in IDENTITY_TAGS {
        add(format!("identity/{tag}"), tag);
    }
    add("schedule/eta1".into(), "dη₁/dt matches its defining equation");
    add("schedule/eta2".into(), "dη₂/dt matches its defining equation");
    add("schedule/tau2".into(), "dτ₂/dt matches its defining equation");
    for t in [KRAUS_SHORT_TIME, cfg.t_end] {
        add(format!("kraus/raising t={}", fmt_t(t)), "Σ E†E = 1, e^{tD(a,a†)}");
    }
    for prop in ["exp_lph", "exp_lsp", "oisd"] {
        add(format!("trace/{prop} t={}", fmt_t(PROPAGATOR_TIME)), "Tr P_t(ρ) = Tr ρ");
        add(format!("psd/{prop} t={}", fmt_t(PROPAGATOR_TIME)), "P_t(ρ) ≥ 0");
    }
    add("semigroup/exp_lph".into(), "P_s P_t = P_{s+t}");
    add("semigroup/oisd".into(), "P_s P_t = P_{s+t}");
    add("generator/exp_lph".into(), "d/dt e^{tL_ph} = L_ph at t = 0");
    add("generator/oisd".into(), "d/dt Z(t) = L_OISD at t = 0");
    for s in &cfg.sigma_sweep {
        add(format!("decoupling/sigma={}", fmt_t(*s)), "L_OISD V(σ) = V(σ) L_decoupled");
    }
    add(format!("decoupling/general sigma={}", fmt_t(cfg.sigma)), "L_OISD,γ̄ V(σ) = V(σ) L_decoupled,γ̄");
    add(format!("decoupling/gamma-zero sigma={}", fmt_t(cfg.sigma)), "L_OISD,γ=0 V = V L_decoupled,γ=0");
    add("gibbs/fixed-point".into(), "L_ph ρ_G = 0");
    add("gibbs/convergence".into(), "e^{tL_ph}ρ → ρ_G at t = 20/γ");
    for t in SPIN_TIMES {
        add(format!("spin/mean t={}", fmt_t(t)), "mean of c_k(t) equals the Skellam mean");
        add(format!("spin/variance t={}", fmt_t(t)), "variance of c_k(t) equals the Skellam variance");
    }
    add("dicke/finite-ell".into(), "‖(e^{−itH_ℓ} − e^{−itH})ψ‖ decreasing in ℓ");
    plan
}

/// Random density on the tensor space, supported on `|m − m₀| ≤ 1` and `n ≤ 2`.
fn product_state(geo: &TensorGeometry, m0: i64, r: &mut Rng) -> Mat {
    let smask: Vec<bool> = (0..geo.spin().dim()).map(|s| (geo.spin().value(s) - m0).abs() <= 1).collect();
    let fmask: Vec<bool> = (0..geo.fock().dim()).map(|n| n <= 2).collect();
    let chi = random_density(r, &smask);
    let xi = random_density(r, &fmask);
    kron(&chi, &xi)
}

fn trace_defect(x: &Mat) -> f64 {
    (trace(x) - re(1.0)).norm()
}

struct Suite<'a> {
    report: &'a mut RunReport,
    plan: std::vec::IntoIter<(String, String)>,
}

impl Suite<'_> {
    fn at_most(&mut self, residual: f64, tol: f64) {
        let (name, tag) = self.plan.next().expect("verify plan is shorter than the suite");
        self.report.check(CheckRecord::at_most(name, tag, residual, tol));
    }

    fn below(&mut self, residual: f64, tol: f64) {
        let (name, tag) = self.plan.next().expect("verify plan is shorter than the suite");
        self.report.check(CheckRecord::below(name, tag, residual, tol));
    }
}

/// Runs every verification check. `fault` corrupts one ingredient on purpose.
pub fn cmd_verify(cfg: &RunConfig, fault: Option<Fault>) -> Result<RunReport> {
    let mut report = RunReport::new("verify", cfg);
    let mut s = Suite { report: &mut report, plan: verify_plan(cfg).into_iter() };
    let p = cfg.params;
    let tol = cfg.tolerances;
    let space = cfg.space()?;
    let geo = space.geometry;
    let fock_geo = geo.fock();
    let spin_geo = geo.spin();
    let c = fock_geo.cutoff();
    let mut r = rng(cfg.seed);

    let ids = verify_identity_suite(&IdentitySuiteConfig {
        halfwidth: cfg.identity_halfwidth,
        cutoff: cfg.identity_cutoff,
        margin_spin: cfg.identity_margin,
        margin_fock: cfg.identity_margin,
        j: p.j,
        instances: cfg.instances,
        seed: cfg.seed,
    })?;
    for row in &ids.rows {
        s.at_most(row.interior_residual, tol.identity_tol);
    }

    let res = schedule_residuals(cfg.t_end, tol.fd_step, &p)?;
    for v in res {
        s.at_most(v, FD_TOL);
    }

    let fmask = interior_mask(fock_geo.into(), 0, cfg.margin_fock)?;
    let eye = Mat::eye(fock_geo.dim());
    for t in [KRAUS_SHORT_TIME, cfg.t_end] {
        let norm = kraus_family(Direction::RaisingDress, t, fock_geo)?.normalization();
        let dev = project(&fmask, &(norm - &eye));
        s.at_most(dev.iter().map(|z| z.norm()).fold(0.0, f64::max), tol.trace_tol);
    }

    let smask = interior_mask(spin_geo.into(), cfg.margin_spin, 0)?;
    let tmask = interior_mask(geo.into(), cfg.margin_spin, cfg.margin_fock)?;
    let t = PROPAGATOR_TIME;
    let rho_f = random_density(&mut r, &fmask);
    let out = FockMap::exp_lph(t, p.omega, p.gamma, p.j, c)?.apply(&rho_f)?;
    s.at_most(trace_defect(&out), tol.trace_tol);
    s.at_most(-min_eigenvalue(&out), tol.psd_tol);
    let rho_s = random_density(&mut r, &smask);
    let out = exp_lsp(t, &rho_s, spin_geo, p.mu, p.alpha_minus, p.alpha_plus)?.rho;
    s.at_most(trace_defect(&out), tol.trace_tol);
    s.at_most(-min_eigenvalue(&out), tol.psd_tol);
    let z = OisdPropagator::new(&space, &p)?;
    let rho_t = product_state(&geo, cfg.spin_offset, &mut r);
    let out = z.apply(t, &rho_t)?;
    s.at_most(trace_defect(&out), tol.trace_tol);
    s.at_most(-min_eigenvalue(&out), tol.psd_tol);

    let t = cfg.t_end;
    let (t1, t2) = (0.4 * t, 0.6 * t);
    let lph = |t: f64| FockMap::exp_lph(t, p.omega, p.gamma, p.j, c);
    let two = lph(t2)?.apply(&lph(t1)?.apply(&rho_f)?)?;
    let one = lph(t)?.apply(&rho_f)?;
    s.at_most(trace_norm(&project(&fmask, &(two - one))), SEMIGROUP_TOL);
    let two = z.apply(t2, &z.apply(t1, &rho_t)?)?;
    let one = z.apply(t, &rho_t)?;
    s.at_most(trace_norm(&project(&tmask, &(two - one))), SEMIGROUP_TOL);

    let l_ph = build_l_ph(&p, &space.fock)?;
    let fd = generator_fd_check(|t, x| lph(t)?.apply(x), |x| l_ph.superop.apply_unchecked(x), &rho_f, tol.fd_step)?;
    s.at_most(fd, FD_TOL);
    let l_oisd = build_l_oisd(&p, &space)?;
    let fd = generator_fd_check(|t, x| z.apply(t, x), |x| l_oisd.superop.apply_unchecked(x), &rho_t, tol.fd_step)?;
    s.at_most(fd, FD_TOL);

    let probes =
        ProbeConfig { margin_spin: cfg.margin_spin, margin_fock: cfg.margin_fock, probes: cfg.probes, seed: cfg.seed };
    let sign = if fault == Some(Fault::NegatedSpinRate) { -1.0 } else { 1.0 };
    let decoupled = |q: &ModelParams| -> Result<_> {
        let rate = if q.gamma > 0.0 { q.induced_spin_rate()? } else { 0.0 } + q.gamma_bar;
        build_l_decoupled_with_rate(q, &space, sign * rate)
    };
    let l = build_l_oisd_general(&p, &space)?;
    let l_dec = decoupled(&p)?;
    for &sigma in &cfg.sigma_sweep {
        let v = VTransform::new(&TransformParams::new(sigma, &p)?, &space)?;
        s.at_most(intertwining_residual(&l, &l_dec, &v, &space, &probes)?, cfg.decoupling_tol);
    }
    let pg = general_params(&p);
    let v = VTransform::new(&TransformParams::new(cfg.sigma, &pg)?, &space)?;
    let res = intertwining_residual(&build_l_oisd_general(&pg, &space)?, &decoupled(&pg)?, &v, &space, &probes)?;
    s.at_most(res, cfg.decoupling_tol);
    let p0 = gamma_zero_params(&p);
    let v = VTransform::gamma_zero(cfg.sigma, &p0, &space)?;
    let res = intertwining_residual(&build_l_oisd_general(&p0, &space)?, &decoupled(&p0)?, &v, &space, &probes)?;
    s.at_most(res, cfg.decoupling_tol);

    let gibbs = gibbs_state(p.omega, p.j, fock_geo)?.rho;
    s.at_most(trace_norm(&l_ph.superop.apply(&gibbs)?), GIBBS_FIXED_TOL);
    let t_relax = 20.0 / p.gamma;
    let relax = lph(t_relax)?;
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let rho0 = random_density(&mut r, &fmask);
        worst = worst.max(trace_norm(&(relax.apply(&rho0)? - &gibbs)));
    }
    s.at_most(worst, GIBBS_CONVERGENCE_TOL);

    for t in SPIN_TIMES {
        let cs = spin_coeffs(t, p.alpha_minus, p.alpha_plus, None, SERIES_EPS)?;
        let mean = (cs.mean() - skellam_mean(t, p.alpha_minus, p.alpha_plus)).abs();
        let var = (cs.variance() - skellam_variance(t, p.alpha_minus, p.alpha_plus)).abs();
        s.at_most(mean, SPIN_MOMENT_TOL + cs.tail.abs());
        s.at_most(var, SPIN_MOMENT_TOL + cs.tail.abs());
    }

    let psi = SparseState { amplitudes: vec![(0, 1, re(1.0)), (1, 0, C64::new(0.0, 1.0)), (-2, 2, re(0.5))] };
    let reference = *ELLS.last().unwrap_or(&40);
    let devs: Vec<f64> = ELLS
        .iter()
        .map(|&ell| Ok(finite_ell_demo(ell, &p, 1.0, &psi, 6, reference)?.deviation))
        .collect::<Result<_>>()?;
    let ratio = devs.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    s.below(ratio, 1.0);

    debug_assert!(s.plan.next().is_none(), "verify plan is longer than the suite");
    let mut ells = Series::new("verify-finite-ell", &["ell", "deviation"]);
    for (ell, d) in ELLS.iter().zip(&devs) {
        ells.push(vec![*ell as f64, *d]);
    }
    report.series.push(ells);
    Ok(report)
}

/// Evolves a seeded product state with the closed form and the integrator.
pub fn cmd_evolve(cfg: &RunConfig) -> Result<RunReport> {
    let mut report = RunReport::new("evolve", cfg);
    let p = cfg.params;
    let space = cfg.space()?;
    let geo = space.geometry;
    let grid = cfg.grid();
    let rho0 = product_state(&geo, cfg.spin_offset, &mut rng(cfg.seed));
    let z = OisdPropagator::new(&space, &p)?;
    let l = build_l_oisd(&p, &space)?;
    let traj = integrate_master(&l.superop, &rho0, &grid, &cfg.tolerances)?;
    let mask = interior_mask(geo.into(), cfg.margin_spin, cfg.margin_fock)?;
    let mut series = Series::new(
        "evolve",
        &[
            "t",
            "trace",
            "min_eigenvalue",
            "mean_n",
            "mean_m",
            "window_population",
            "closed_vs_ode",
            "closed_vs_ode_interior",
        ],
    );
    let mut worst: f64 = 0.0;
    for (k, &t) in grid.iter().enumerate() {
        let rho = if t == 0.0 { rho0.clone() } else { z.apply(t, &rho0)? };
        let (mut n_mean, mut m_mean, mut window) = (0.0, 0.0, 0.0);
        for i in 0..space.dim() {
            let (m, n) = space.labels(i);
            let w = rho[[i, i]].re;
            n_mean += n as f64 * w;
            m_mean += m as f64 * w;
            if m.unsigned_abs() as usize <= cfg.window {
                window += w;
            }
        }
        let diff = &rho - &traj.states[k];
        let interior = trace_norm(&project(&mask, &diff));
        worst = worst.max(interior);
        series.push(vec![t, trace(&rho).re, min_eigenvalue(&rho), n_mean, m_mean, window, trace_norm(&diff), interior]);
    }
    report.check(CheckRecord::at_most("evolve/closed-vs-ode", "‖P(Z(t)ρ − ODE(t)ρ)P‖₁ over the grid", worst, SYNC_TOL));
    report.metric("ode_accepted_steps", traj.stats.accepted as f64);
    report.metric("ode_rejected_steps", traj.stats.rejected as f64);
    report.metric("ode_max_trace_drift", traj.trace_drift.iter().copied().fold(0.0, f64::max));
    report.series.push(series);
    Ok(report)
}

/// Compares the OISD evolution with its synchronized decoupled surrogate.
pub fn cmd_sync_compare(cfg: &RunConfig) -> Result<RunReport> {
    let mut report = RunReport::new("sync-compare", cfg);
    let p = cfg.params;
    let space = cfg.space()?;
    let geo = space.geometry;
    let v = VTransform::new(&TransformParams::new(cfg.sigma, &p)?, &space)?;
    let mut r = rng(cfg.seed);
    let smask: Vec<bool> = (0..geo.spin().dim()).map(|s| (geo.spin().value(s) - cfg.spin_offset).abs() <= 1).collect();
    let fmask: Vec<bool> = (0..geo.fock().dim()).map(|n| n <= 2).collect();
    let chi = random_density(&mut r, &smask);
    let xi = random_density(&mut r, &fmask);
    let rho0 = dressed_product(&chi, &xi, &v)?;
    let pc = Prop2Config {
        sigma: cfg.sigma,
        grid: cfg.grid(),
        sync_times: cfg.sync_times.clone(),
        window: cfg.window,
        inverse_threshold: cfg.inverse_threshold,
    };
    let out = prop2_experiment(&rho0, &p, &space, &pc)?;

    let mut series = Series::new("sync-compare", &["t", "distance", "bound", "window_population"]);
    for row in &out.rows {
        series.push(vec![row.t, row.distance, row.bound, row.window_population]);
        report.check(CheckRecord::at_most(
            format!("sync/bound t={}", fmt_t(row.t)),
            "‖ρ(t) − ρ̌(t)‖₁ ≤ ‖(1 ⊗ e^{tL_ph})V⁻¹ρ₀ − ρ★ ⊗ ρ_G‖₁",
            row.distance,
            row.bound,
        ));
    }
    if let Some(last) = out.rows.last() {
        report.check(CheckRecord::below(
            "sync/final-distance",
            "‖ρ(t_end) − ρ̌(t_end)‖₁",
            last.distance,
            ASYMPTOTIC_TOL,
        ));
        if out.induced_spin_rate != 0.0 {
            report.check(CheckRecord::below(
                "sync/window",
                "Tr[(P_K ⊗ 1)ρ(t_end)]",
                last.window_population,
                ASYMPTOTIC_TOL,
            ));
        }
    }
    let mut ident = Series::new("sync-identity", &["t", "residual"]);
    for &(t, res) in &out.sync_rows {
        ident.push(vec![t, res]);
        report.check(CheckRecord::at_most(
            format!("sync/identity t={}", fmt_t(t)),
            "e^{tL_syn}ρ̌₀ = e^{tL_OISD}ρ̌₀",
            res,
            SYNC_TOL,
        ));
    }
    report.series.push(series);
    if !ident.rows.is_empty() {
        report.series.push(ident);
    }
    report.metric("fitted_rate", out.fitted_rate.unwrap_or(f64::NAN));
    report.metric("induced_spin_rate", out.induced_spin_rate);
    report.metric("rho_star_min_eigenvalue", out.rho_star_min_eigenvalue);
    report.metric("inverse_amplification", out.inverse_amplification);
    Ok(report)
}

/// Eigenvalues of `L_ph` paired with their analytic labels.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<RunReport> {
    let mut report = RunReport::new("spectrum", cfg);
    let sp = ph_spectrum(&cfg.params, cfg.fock_cutoff, cfg.fock_cutoff / 2)?;
    let mut rows =
        Series::new("spectrum", &["n", "m", "analytic_re", "analytic_im", "computed_re", "computed_im", "deviation"]);
    for row in &sp.rows {
        rows.push(vec![
            row.n as f64,
            row.m as f64,
            row.analytic.re,
            row.analytic.im,
            row.computed.re,
            row.computed.im,
            row.deviation,
        ]);
    }
    let mut all = Series::new("spectrum-eigenvalues", &["index", "re", "im"]);
    let mut vals = sp.eigenvalues.clone();
    vals.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    for (i, e) in vals.iter().enumerate() {
        all.push(vec![i as f64, e.re, e.im]);
    }
    report.check(CheckRecord::at_most(
        "spectrum/max-deviation",
        "spec L_ph ∋ −iω(n−m) − γ(n+m), n, m ≤ cutoff/2",
        sp.max_deviation(),
        SPECTRUM_TOL,
    ));
    report.series.push(rows);
    report.series.push(all);
    Ok(report)
}
