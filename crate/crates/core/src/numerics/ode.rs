// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Adaptive Dormand–Prince 8(5,3) integration of `dX/dt = f(X)` on matrices.

use serde::Serialize;

use super::norms::{hermitian_part, min_eigenvalue, trace};
use super::ToleranceConfig;
use crate::error::{invalid, Error, Result};
use crate::superop::SuperOperator;
use crate::{Mat, C64};

const STAGES: usize = 12;

// Nodes. The right-hand side is autonomous, so they only enter the tableau check.
#[cfg(test)]
const C: [f64; STAGES] = [
    0.0,
    0.05260015195876773,
    0.0789002279381516,
    0.1183503419072274,
    0.2816496580927726,
    0.3333333333333333,
    0.25,
    0.3076923076923077,
    0.6512820512820513,
    0.6,
    0.8571428571428571,
    1.0,
];

const A: [[f64; STAGES]; STAGES] = [
    [0.0; STAGES],
    [0.05260015195876773, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0197250569845379, 0.0591751709536137, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.02958758547680685, 0.0, 0.08876275643042054, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2413651341592667, 0.0, -0.8845494793282861, 0.924834003261792, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.037037037037037035, 0.0, 0.0, 0.17082860872947386, 0.12546768756682242, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.037109375, 0.0, 0.0, 0.17025221101954405, 0.06021653898045596, -0.017578125, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [
        0.03709200011850479,
        0.0,
        0.0,
        0.17038392571223998,
        0.10726203044637328,
        -0.015319437748624402,
        0.008273789163814023,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.6241109587160757,
        0.0,
        0.0,
        -3.3608926294469414,
        -0.868219346841726,
        27.59209969944671,
        20.154067550477894,
        -43.48988418106996,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        0.47766253643826434,
        0.0,
        0.0,
        -2.4881146199716677,
        -0.590290826836843,
        21.230051448181193,
        15.279233632882423,
        -33.28821096898486,
        -0.020331201708508627,
        0.0,
        0.0,
        0.0,
    ],
    [
        -0.9371424300859873,
        0.0,
        0.0,
        5.186372428844064,
        1.0914373489967295,
        -8.149787010746927,
        -18.52006565999696,
        22.739487099350505,
        2.4936055526796523,
        -3.0467644718982196,
        0.0,
        0.0,
    ],
    [
        2.273310147516538,
        0.0,
        0.0,
        -10.53449546673725,
        -2.0008720582248625,
        -17.9589318631188,
        27.94888452941996,
        -2.8589982771350235,
        -8.87285693353063,
        12.360567175794303,
        0.6433927460157636,
        0.0,
    ],
];

const B: [f64; STAGES] = [
    0.054293734116568765,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    0.3111643669578199,
    -0.1521609496625161,
    0.20136540080403034,
    0.04471061572777259,
];

const E3: [f64; STAGES + 1] = [
    -0.18980075407240762,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450312892752409,
    1.8915178993145003,
    -5.801203960010585,
    -0.4226823213237919,
    -0.1521609496625161,
    0.20136540080403034,
    0.02265179219836082,
    0.0,
];

const E5: [f64; STAGES + 1] = [
    0.01312004499419488,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.2251564463762044,
    -0.4957589496572502,
    1.6643771824549864,
    -0.35032884874997366,
    0.3341791187130175,
    0.08192320648511571,
    -0.022355307863886294,
    0.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const MAX_STEPS: usize = 5_000_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Solution of the master equation sampled on a time grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: Vec<f64>,
    pub states: Vec<Mat>,
    /// `|Tr ρ(t) − Tr ρ(0)|` per grid point.
    pub trace_drift: Vec<f64>,
    /// Minimum eigenvalue of the Hermitian part per grid point.
    pub min_eigenvalues: Vec<f64>,
    pub stats: OdeStats,
}

fn lin_comb(y: &Mat, h: f64, coeffs: &[f64], ks: &[Mat]) -> Mat {
    let mut out = y.clone();
    for (c, k) in coeffs.iter().zip(ks) {
        if *c != 0.0 {
            out.scaled_add(C64::new(h * c, 0.0), k);
        }
    }
    out
}

fn scaled_rms(x: &Mat, scale: &Mat) -> f64 {
    let n = x.len() as f64;
    (x.iter().zip(scale.iter()).map(|(a, s)| a.norm_sqr() / (s.re * s.re)).sum::<f64>() / n).sqrt()
}

/// Integrates `dX/dt = f(X)` from `grid[0]` through every grid point.
///
/// With `hermitian = true` every accepted state is replaced by its Hermitian
/// part; no other projection (in particular no trace renormalization) is done.
pub fn integrate(
    mut f: impl FnMut(&Mat) -> Mat,
    y0: &Mat,
    grid: &[f64],
    rtol: f64,
    atol: f64,
    hermitian: bool,
) -> Result<(Vec<Mat>, OdeStats)> {
    if grid.is_empty() {
        return Err(invalid("grid", "time grid is empty"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("grid", "time grid must be strictly increasing"));
    }
    if !(rtol > 0.0 && atol > 0.0) {
        return Err(invalid("tolerance", "rtol and atol must be positive"));
    }
    let mut stats = OdeStats::default();
    let mut y = y0.clone();
    let mut fy = f(&y);
    stats.evaluations += 1;
    let mut t = grid[0];
    let mut out = vec![y.clone()];

    let scale_of = |a: &Mat, b: &Mat| -> Mat {
        ndarray::Zip::from(a).and(b).map_collect(|x, z| C64::new(atol + rtol * x.norm().max(z.norm()), 0.0))
    };

    // Initial step (Hairer, Nørsett & Wanner II.4).
    let mut h = {
        let sc = scale_of(&y, &y);
        let d0 = scaled_rms(&y, &sc);
        let d1 = scaled_rms(&fy, &sc);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1 = lin_comb(&y, h0, &[1.0], std::slice::from_ref(&fy));
        let f1 = f(&y1);
        stats.evaluations += 1;
        let d2 = scaled_rms(&(&f1 - &fy), &sc) / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(1.0 / 8.0) };
        (100.0 * h0).min(h1)
    };

    let mut ks: Vec<Mat> = Vec::with_capacity(STAGES + 1);
    for &target in &grid[1..] {
        while t < target {
            if stats.accepted + stats.rejected > MAX_STEPS {
                return Err(Error::Stiffness { t, h });
            }
            let hmin = 1e-14 * t.abs().max(1.0);
            if h < hmin {
                return Err(Error::Stiffness { t, h });
            }
            let last = t + h >= target;
            let step = if last { target - t } else { h };

            ks.clear();
            ks.push(fy.clone());
            for s in 1..STAGES {
                let ys = lin_comb(&y, step, &A[s][..s], &ks[..s]);
                ks.push(f(&ys));
            }
            let y_new = lin_comb(&y, step, &B, &ks);
            let f_new = f(&y_new);
            stats.evaluations += STAGES;
            ks.push(f_new);

            let sc = scale_of(&y, &y_new);
            let mut err5 = Mat::zeros(y.raw_dim());
            let mut err3 = Mat::zeros(y.raw_dim());
            for (i, k) in ks.iter().enumerate() {
                if E5[i] != 0.0 {
                    err5.scaled_add(C64::new(E5[i], 0.0), k);
                }
                if E3[i] != 0.0 {
                    err3.scaled_add(C64::new(E3[i], 0.0), k);
                }
            }
            let n = y.len() as f64;
            let e5 = scaled_rms(&err5, &sc).powi(2) * n;
            let e3 = scaled_rms(&err3, &sc).powi(2) * n;
            let err = if e5 == 0.0 && e3 == 0.0 { 0.0 } else { step * e5 / ((e5 + 0.01 * e3) * n).sqrt() };

            if err <= 1.0 {
                stats.accepted += 1;
                t = if last { target } else { t + step };
                y = if hermitian { hermitian_part(&y_new) } else { y_new };
                fy = ks.pop().expect("FSAL stage");
                let factor =
                    if err == 0.0 { MAX_FACTOR } else { (SAFETY * err.powf(-1.0 / 8.0)).clamp(MIN_FACTOR, MAX_FACTOR) };
                if !last || factor < 1.0 {
                    h = step * factor;
                }
            } else {
                stats.rejected += 1;
                h = step * (SAFETY * err.powf(-1.0 / 8.0)).max(MIN_FACTOR);
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}

/// Integrates `dρ/dt = L(ρ)` with Hermitian re-symmetrization and records
/// trace drift and minimum eigenvalue at every grid point.
pub fn integrate_master(l: &SuperOperator, rho0: &Mat, grid: &[f64], tol: &ToleranceConfig) -> Result<Trajectory> {
    l.check_state(rho0)?;
    let (states, stats) = integrate(|x| l.apply_unchecked(x), rho0, grid, tol.ode_rel, tol.ode_abs, true)?;
    let tr0 = trace(rho0);
    let trace_drift = states.iter().map(|s| (trace(s) - tr0).norm()).collect();
    let min_eigenvalues = states.iter().map(min_eigenvalue).collect();
    Ok(Trajectory { grid: grid.to_vec(), states, trace_drift, min_eigenvalues, stats })
}
