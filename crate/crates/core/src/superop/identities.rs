// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Numerical verification of the superoperator commutator tables.
//!
//! Each identity `LHS = RHS` is probed with seeded random matrices supported
//! on the interior subspace. The reported residual is
//! `‖P(LHS − RHS)(ρ)P‖_F / Σ_terms ‖P term(ρ) P‖_F`, maximized over instances.
//! Raw residuals use unrestricted probes and no output projection.

use serde::Serialize;

use super::{combine, commutator, d, k, zero, Kind, OisdBlocks, SuperOperator};
use crate::error::Result;
use crate::hilbert::{build_fock, build_spin, interior_mask, project, Geometry, Operator, SpinScheme, TensorSpace};
use crate::numerics::frobenius;
use crate::numerics::sampling::{random_matrix, random_supported, rng, Rng};
use crate::{re, Mat, C64};

/// Every tag emitted by [`verify_identity_suite`], in report order.
pub const IDENTITY_TAGS: &[&str] = &[
    "KK:[KA,KB]=K[A,B]",
    "KK:[KA,DBC]=D[A,B]C+DB[A,C]",
    "DD:seven-term",
    "DK:DA1=KA",
    "DK:D1B=-KB",
    "osc:[Ka,Kad]=0",
    "osc:[Ka,KN]=Ka",
    "osc:[Kad,KN]=-Kad",
    "osc:[Ka,Daad]=Ka",
    "osc:[Kad,Daad]=Kad",
    "osc:[Ka,Dada]=-Ka",
    "osc:[Kad,Dada]=-Kad",
    "osc:[KN,Daad]=0",
    "osc:[KN,Dada]=0",
    "osc:[Daad,Dada]=-2(Daad+Dada)",
    "spin:[KM,Dmp]=0",
    "spin:[KM,Dpm]=0",
    "spin:[Dmp,Dpm]=0",
    "oisd:[Kph,Kmp]=+Kmp",
    "oisd:[Ksp,Kmp]=-Kmp",
    "oisd:[Dph,Dmp]=+Kmp",
    "oisd:[Kph,Kpm]=-Kpm",
    "oisd:[Ksp,Kpm]=+Kpm",
    "oisd:[Dph,Dpm]=-Kpm",
    "oisd:[Dph,Kmp]=+Dmp",
    "oisd:[Dph,Kpm]=-Dpm",
    "oisd:[Kmp,Dpm]=-Dsp",
    "oisd:[Kpm,Dmp]=+Dsp",
    "oisd:[Kph,Dph]=0",
    "oisd:[Ksp,Dph]=0",
    "oisd:[Kmp,Kpm]=0",
    "oisd:[Kmp,Dmp]=0",
    "oisd:[Kpm,Dpm]=0",
    "oisd:[Dsp,Kmp]=0",
    "oisd:[Dsp,Kpm]=0",
    "oisd:[Dsp,Dph]=0",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentitySuiteConfig {
    pub halfwidth: usize,
    pub cutoff: usize,
    pub margin_spin: usize,
    pub margin_fock: usize,
    /// Bath parameter used in the OISD blocks.
    pub j: f64,
    pub instances: usize,
    pub seed: u64,
}

impl Default for IdentitySuiteConfig {
    fn default() -> Self {
        Self { halfwidth: 8, cutoff: 8, margin_spin: 2, margin_fock: 2, j: 0.5, instances: 20, seed: 20260101 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRow {
    pub tag: &'static str,
    pub family: &'static str,
    pub interior_residual: f64,
    pub raw_residual: f64,
    pub instances: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub config: IdentitySuiteConfig,
    pub rows: Vec<IdentityRow>,
}

impl IdentityReport {
    pub fn max_interior(&self) -> f64 {
        self.rows.iter().map(|r| r.interior_residual).fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.rows.iter().all(|r| r.interior_residual <= tol)
    }
}

struct Check {
    tag: &'static str,
    lhs: SuperOperator,
    rhs: SuperOperator,
}

fn term_scale(s: &SuperOperator, x: &Mat, mask: Option<&[bool]>) -> f64 {
    match s.kind() {
        Kind::Sum(terms) => terms.iter().map(|(c, t)| c.norm() * term_scale(t, x, mask)).sum(),
        _ => {
            let y = s.apply_unchecked(x);
            frobenius(&mask.map_or(y.clone(), |m| project(m, &y)))
        }
    }
}

fn residual(check: &Check, x: &Mat, mask: Option<&[bool]>) -> f64 {
    let diff = check.lhs.apply_unchecked(x) - check.rhs.apply_unchecked(x);
    let num = frobenius(&mask.map_or(diff.clone(), |m| project(m, &diff)));
    let scale = term_scale(&check.lhs, x, mask) + term_scale(&check.rhs, x, mask);
    if scale > 0.0 {
        num / scale
    } else {
        num
    }
}

fn sum(terms: &[(f64, &SuperOperator)]) -> Result<SuperOperator> {
    let t: Vec<(C64, &SuperOperator)> = terms.iter().map(|(c, s)| (re(*c), *s)).collect();
    combine(&t)
}

fn check(tag: &'static str, lhs: SuperOperator, rhs: SuperOperator) -> Check {
    Check { tag, lhs, rhs }
}

fn com(x: &SuperOperator, y: &SuperOperator) -> Result<SuperOperator> {
    commutator(x, y)
}

fn random_op(r: &mut Rng, geo: Geometry) -> Result<Operator> {
    let d = geo.dim();
    Operator::new(geo, random_matrix(r, d).mapv(|z| z / (d as f64).sqrt()))
}

/// Checks built from freshly drawn random operators `A, B, C, D`.
fn generic_checks(r: &mut Rng, geo: Geometry) -> Result<Vec<Check>> {
    let a = random_op(r, geo)?;
    let b = random_op(r, geo)?;
    let c = random_op(r, geo)?;
    let dd = random_op(r, geo)?;
    let one = Operator::identity(geo);
    let ba = b.mul(&a)?;
    let dc = dd.mul(&c)?;

    let kk = check("KK:[KA,KB]=K[A,B]", com(&k(&a), &k(&b))?, k(&a.commutator(&b)?));
    let kd_rhs = d(&a.commutator(&b)?, &c)?.add(&d(&b, &a.commutator(&c)?)?)?;
    let kd = check("KK:[KA,DBC]=D[A,B]C+DB[A,C]", com(&k(&a), &d(&b, &c)?)?, kd_rhs);

    let t1 = d(&a.commutator(&c)?, &b.anticommutator(&dd)?)?;
    let t2 = d(&a.anticommutator(&c)?, &b.commutator(&dd)?)?;
    let t3 = d(&dc.commutator(&a)?, &b)?;
    let t4 = d(&a, &b.commutator(&dc)?)?;
    let t5 = d(&ba.commutator(&c)?, &dd)?;
    let t6 = d(&c, &dd.commutator(&ba)?)?;
    let t7 = k(&ba.commutator(&dc)?);
    let dd_rhs = sum(&[(1.0, &t1), (-1.0, &t2), (1.0, &t3), (1.0, &t4), (-1.0, &t5), (-1.0, &t6), (1.0, &t7)])?;
    let ddc = check("DD:seven-term", com(&d(&a, &b)?, &d(&c, &dd)?)?, dd_rhs);

    let dk1 = check("DK:DA1=KA", d(&a, &one)?, k(&a));
    let dk2 = check("DK:D1B=-KB", d(&one, &b)?, k(&b).scaled(re(-1.0)));
    Ok(vec![kk, kd, ddc, dk1, dk2])
}

fn oscillator_checks(cutoff: usize) -> Result<Vec<Check>> {
    let f = build_fock(cutoff)?;
    let ka = k(&f.a);
    let kad = k(&f.adag);
    let kn = k(&f.n);
    let daad = d(&f.a, &f.adag)?;
    let dada = d(&f.adag, &f.a)?;
    let z = zero(f.geometry);
    Ok(vec![
        check("osc:[Ka,Kad]=0", com(&ka, &kad)?, z.clone()),
        check("osc:[Ka,KN]=Ka", com(&ka, &kn)?, ka.clone()),
        check("osc:[Kad,KN]=-Kad", com(&kad, &kn)?, kad.scaled(re(-1.0))),
        check("osc:[Ka,Daad]=Ka", com(&ka, &daad)?, ka.clone()),
        check("osc:[Kad,Daad]=Kad", com(&kad, &daad)?, kad.clone()),
        check("osc:[Ka,Dada]=-Ka", com(&ka, &dada)?, ka.scaled(re(-1.0))),
        check("osc:[Kad,Dada]=-Kad", com(&kad, &dada)?, kad.scaled(re(-1.0))),
        check("osc:[KN,Daad]=0", com(&kn, &daad)?, z.clone()),
        check("osc:[KN,Dada]=0", com(&kn, &dada)?, z),
        check("osc:[Daad,Dada]=-2(Daad+Dada)", com(&daad, &dada)?, sum(&[(-2.0, &daad), (-2.0, &dada)])?),
    ])
}

fn spin_checks(halfwidth: usize) -> Result<Vec<Check>> {
    let s = build_spin(halfwidth, SpinScheme::Hard)?;
    let km = k(&s.m);
    let dmp = d(&s.l_minus, &s.l_plus)?;
    let dpm = d(&s.l_plus, &s.l_minus)?;
    let z = zero(s.geometry);
    Ok(vec![
        check("spin:[KM,Dmp]=0", com(&km, &dmp)?, z.clone()),
        check("spin:[KM,Dpm]=0", com(&km, &dpm)?, z.clone()),
        check("spin:[Dmp,Dpm]=0", com(&dmp, &dpm)?, z),
    ])
}

fn oisd_checks(space: &TensorSpace, j: f64) -> Result<Vec<Check>> {
    let b = OisdBlocks::new(space, j)?;
    let z = zero(space.geometry);
    let neg = |s: &SuperOperator| s.scaled(re(-1.0));
    Ok(vec![
        check("oisd:[Kph,Kmp]=+Kmp", com(&b.k_ph, &b.k_mp)?, b.k_mp.clone()),
        check("oisd:[Ksp,Kmp]=-Kmp", com(&b.k_sp, &b.k_mp)?, neg(&b.k_mp)),
        check("oisd:[Dph,Dmp]=+Kmp", com(&b.d_ph, &b.d_mp)?, b.k_mp.clone()),
        check("oisd:[Kph,Kpm]=-Kpm", com(&b.k_ph, &b.k_pm)?, neg(&b.k_pm)),
        check("oisd:[Ksp,Kpm]=+Kpm", com(&b.k_sp, &b.k_pm)?, b.k_pm.clone()),
        check("oisd:[Dph,Dpm]=-Kpm", com(&b.d_ph, &b.d_pm)?, neg(&b.k_pm)),
        check("oisd:[Dph,Kmp]=+Dmp", com(&b.d_ph, &b.k_mp)?, b.d_mp.clone()),
        check("oisd:[Dph,Kpm]=-Dpm", com(&b.d_ph, &b.k_pm)?, neg(&b.d_pm)),
        check("oisd:[Kmp,Dpm]=-Dsp", com(&b.k_mp, &b.d_pm)?, neg(&b.d_sp)),
        check("oisd:[Kpm,Dmp]=+Dsp", com(&b.k_pm, &b.d_mp)?, b.d_sp.clone()),
        check("oisd:[Kph,Dph]=0", com(&b.k_ph, &b.d_ph)?, z.clone()),
        check("oisd:[Ksp,Dph]=0", com(&b.k_sp, &b.d_ph)?, z.clone()),
        check("oisd:[Kmp,Kpm]=0", com(&b.k_mp, &b.k_pm)?, z.clone()),
        check("oisd:[Kmp,Dmp]=0", com(&b.k_mp, &b.d_mp)?, z.clone()),
        check("oisd:[Kpm,Dpm]=0", com(&b.k_pm, &b.d_pm)?, z.clone()),
        check("oisd:[Dsp,Kmp]=0", com(&b.d_sp, &b.k_mp)?, z.clone()),
        check("oisd:[Dsp,Kpm]=0", com(&b.d_sp, &b.k_pm)?, z.clone()),
        check("oisd:[Dsp,Dph]=0", com(&b.d_sp, &b.d_ph)?, z),
    ])
}

fn run_fixed(
    family: &'static str,
    checks: Vec<Check>,
    mask: &[bool],
    r: &mut Rng,
    instances: usize,
) -> Vec<IdentityRow> {
    let dim = mask.len();
    let probes: Vec<(Mat, Mat)> = (0..instances).map(|_| (random_supported(r, mask), random_matrix(r, dim))).collect();
    checks
        .into_iter()
        .map(|c| {
            let (mut interior, mut raw) = (0.0f64, 0.0f64);
            for (p, q) in &probes {
                interior = interior.max(residual(&c, p, Some(mask)));
                raw = raw.max(residual(&c, q, None));
            }
            IdentityRow { tag: c.tag, family, interior_residual: interior, raw_residual: raw, instances }
        })
        .collect()
}

/// Evaluates every identity of [`IDENTITY_TAGS`]; no residual is suppressed.
pub fn verify_identity_suite(cfg: &IdentitySuiteConfig) -> Result<IdentityReport> {
    let mut r = rng(cfg.seed);
    let fock = build_fock(cfg.cutoff)?;
    let fock_geo: Geometry = fock.geometry.into();
    let fock_mask = interior_mask(fock_geo, 0, cfg.margin_fock)?;

    let mut rows: Vec<IdentityRow> = Vec::new();
    for i in 0..cfg.instances {
        let checks = generic_checks(&mut r, fock_geo)?;
        let p = random_supported(&mut r, &fock_mask);
        let q = random_matrix(&mut r, fock_geo.dim());
        for (idx, c) in checks.iter().enumerate() {
            let interior = residual(c, &p, Some(&fock_mask));
            let raw = residual(c, &q, None);
            if i == 0 {
                rows.push(IdentityRow {
                    tag: c.tag,
                    family: "generic",
                    interior_residual: interior,
                    raw_residual: raw,
                    instances: cfg.instances,
                });
            } else {
                let row = &mut rows[idx];
                row.interior_residual = row.interior_residual.max(interior);
                row.raw_residual = row.raw_residual.max(raw);
            }
        }
    }

    rows.extend(run_fixed("oscillator", oscillator_checks(cfg.cutoff)?, &fock_mask, &mut r, cfg.instances));

    let spin = build_spin(cfg.halfwidth, SpinScheme::Hard)?;
    let spin_mask = interior_mask(spin.geometry.into(), cfg.margin_spin, 0)?;
    rows.extend(run_fixed("spin", spin_checks(cfg.halfwidth)?, &spin_mask, &mut r, cfg.instances));

    let space = TensorSpace::new(cfg.halfwidth, SpinScheme::Hard, cfg.cutoff)?;
    let mask = interior_mask(space.geometry.into(), cfg.margin_spin, cfg.margin_fock)?;
    rows.extend(run_fixed("oisd", oisd_checks(&space, cfg.j)?, &mask, &mut r, cfg.instances));

    Ok(IdentityReport { config: *cfg, rows })
}
