// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Evolution of the dissipative infinite-component spin.
//!
//! `e^{tL_sp}(ρ) = Σ_k c_k(t) l₋ᵏ e^{−iμtM} ρ e^{iμtM} l₊ᵏ`, where `c_k` is
//! the distribution of the difference of two Poisson variables with means
//! `2α₋t` and `2α₊t`, and `l₋ᵏ` means `l₊^{|k|}` for `k < 0`.

use ndarray::{s, Array2};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::hilbert::{SpinGeometry, SpinScheme, TensorGeometry};
use crate::{Mat, C64};

/// Default magnitude below which Poisson terms are dropped.
pub const SERIES_EPS: f64 = 1e-14;

/// Coefficients `c_k(t)` for `k = kmin, kmin+1, …`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpinCoeffs {
    pub kmin: i64,
    pub values: Vec<f64>,
    /// Bound on the mass outside the returned window.
    pub tail: f64,
}

impl SpinCoeffs {
    pub fn get(&self, k: i64) -> f64 {
        let idx = k - self.kmin;
        if idx < 0 {
            return 0.0;
        }
        self.values.get(idx as usize).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, v)| (self.kmin + i as i64, *v))
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(k, c)| k as f64 * c).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.iter().map(|(k, c)| (k as f64 - m).powi(2) * c).sum()
    }
}

/// Poisson probabilities until the remaining mass is below `eps`, with a
/// bound on that mass. Past `n + 1 > 2·mean` the tail after term `n` is
/// bounded by `2·p_n`.
fn poisson(mean: f64, eps: f64) -> (Vec<f64>, f64) {
    if mean == 0.0 {
        return (vec![1.0], 0.0);
    }
    let mut out = Vec::new();
    let mut ln_fact = 0.0;
    let ln_mean = mean.ln();
    for n in 0.. {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        let p = (n as f64 * ln_mean - mean - ln_fact).exp();
        out.push(p);
        if (n + 1) as f64 > 2.0 * mean && 2.0 * p < eps {
            return (out, 2.0 * p);
        }
    }
    unreachable!()
}

/// `c_k(t)` restricted to `|k| ≤ kmax` (automatic window when `kmax` is `None`).
///
/// Fails with a widen-kmax error when more than `eps` of mass lies outside the
/// requested window.
pub fn spin_coeffs(t: f64, alpha_minus: f64, alpha_plus: f64, kmax: Option<usize>, eps: f64) -> Result<SpinCoeffs> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", "must be finite and non-negative"));
    }
    if !(alpha_minus >= 0.0 && alpha_plus >= 0.0) {
        return Err(invalid("alpha", "rates must be non-negative"));
    }
    if kmax == Some(0) {
        return Err(invalid("kmax", "must be at least 1"));
    }
    let (pm, rem_m) = poisson(2.0 * alpha_minus * t, eps * 1e-2);
    let (pp, rem_p) = poisson(2.0 * alpha_plus * t, eps * 1e-2);
    let kmin_full = -(pp.len() as i64 - 1);
    let mut full = vec![0.0; pm.len() + pp.len() - 1];
    for (n, a) in pm.iter().enumerate() {
        for (m, b) in pp.iter().enumerate() {
            full[(n as i64 - m as i64 - kmin_full) as usize] += a * b;
        }
    }
    let (lo, hi) = match kmax {
        Some(k) => (-(k as i64), k as i64),
        None => (kmin_full, kmin_full + full.len() as i64 - 1),
    };
    let lo = lo.max(kmin_full);
    let hi = hi.min(kmin_full + full.len() as i64 - 1);
    let values: Vec<f64> = (lo..=hi).map(|k| full[(k - kmin_full) as usize]).collect();
    let outside: f64 = full
        .iter()
        .enumerate()
        .filter(|&(i, _)| {
            let k = kmin_full + i as i64;
            k < lo || k > hi
        })
        .map(|(_, v)| v)
        .sum();
    let tail = outside + rem_m + rem_p;
    if tail > eps {
        return Err(Error::WidenKmax { deficit: tail, suggested: pm.len().max(pp.len()) });
    }
    Ok(SpinCoeffs { kmin: lo, values, tail })
}

/// Skellam mean `2(α₋ − α₊)t`.
pub fn skellam_mean(t: f64, alpha_minus: f64, alpha_plus: f64) -> f64 {
    2.0 * (alpha_minus - alpha_plus) * t
}

/// Skellam variance `2(α₋ + α₊)t`.
pub fn skellam_variance(t: f64, alpha_minus: f64, alpha_plus: f64) -> f64 {
    2.0 * (alpha_minus + alpha_plus) * t
}

/// `X ↦ Σ_k c_k e^{−iθ(m−m')} X[m+k, m'+k]` acting on the spin index, where
/// the spin index is blocked with `stride` inner entries (1 for a pure spin
/// space, `dim F` on `G ⊗ F`).
fn shift_sum(x: &Mat, coeffs: &SpinCoeffs, spin: SpinGeometry, stride: usize, theta: f64) -> Mat {
    let ds = spin.dim() as i64;
    let st = stride;
    let mut out = Array2::zeros(x.raw_dim());
    for (k, c) in coeffs.iter() {
        if c == 0.0 {
            continue;
        }
        match spin.scheme() {
            SpinScheme::Hard => {
                let lo = 0.max(-k);
                let hi = ds.min(ds - k);
                if lo >= hi {
                    continue;
                }
                let (a, b) = ((lo * st as i64) as usize, (hi * st as i64) as usize);
                let (sa, sb) = (((lo + k) * st as i64) as usize, ((hi + k) * st as i64) as usize);
                let src = x.slice(s![sa..sb, sa..sb]);
                out.slice_mut(s![a..b, a..b]).scaled_add(C64::new(c, 0.0), &src);
            }
            SpinScheme::Cyclic => {
                for i in 0..ds {
                    let si = (i + k).rem_euclid(ds);
                    for j in 0..ds {
                        let sj = (j + k).rem_euclid(ds);
                        let (i0, j0) = ((i as usize) * st, (j as usize) * st);
                        let (si0, sj0) = ((si as usize) * st, (sj as usize) * st);
                        let src = x.slice(s![si0..si0 + st, sj0..sj0 + st]);
                        out.slice_mut(s![i0..i0 + st, j0..j0 + st]).scaled_add(C64::new(c, 0.0), &src);
                    }
                }
            }
        }
    }
    if theta != 0.0 {
        let h = spin.halfwidth() as i64;
        for ((i, j), z) in out.indexed_iter_mut() {
            let m = (i / st) as i64 - h;
            let mp = (j / st) as i64 - h;
            *z *= C64::from_polar(1.0, -theta * (m - mp) as f64);
        }
    }
    out
}

/// `e^{t(−iμK_M + α₋D_{l₋∘l₊} + α₊D_{l₊∘l₋})}` on the spin factor.
#[derive(Debug, Clone)]
pub struct SpinMap {
    pub coeffs: SpinCoeffs,
    theta: f64,
    geometry: SpinGeometry,
    /// `t · 2(α₊ + α₋) / h`; the closed form is reliable only well below 1.
    pub validity_ratio: f64,
}

impl SpinMap {
    pub fn new(t: f64, mu: f64, alpha_minus: f64, alpha_plus: f64, geometry: SpinGeometry) -> Result<Self> {
        let coeffs = spin_coeffs(t, alpha_minus, alpha_plus, None, SERIES_EPS)?;
        Ok(Self {
            coeffs,
            theta: mu * t,
            geometry,
            validity_ratio: t * 2.0 * (alpha_minus + alpha_plus) / geometry.halfwidth().max(1) as f64,
        })
    }

    pub fn apply(&self, x: &Mat) -> Result<Mat> {
        let d = self.geometry.dim();
        if x.nrows() != d || x.ncols() != d {
            return Err(invalid("rho", "matrix does not match the spin geometry"));
        }
        Ok(shift_sum(x, &self.coeffs, self.geometry, 1, self.theta))
    }

    /// Applies `map ⊗ 1` on `G ⊗ F`.
    pub fn apply_tensor(&self, geo: &TensorGeometry, x: &Mat) -> Result<Mat> {
        if geo.spin() != self.geometry {
            return Err(invalid("geometry", "spin geometry of the map and the state differ"));
        }
        if x.nrows() != geo.dim() || x.ncols() != geo.dim() {
            return Err(invalid("rho", "matrix does not live on the tensor geometry"));
        }
        Ok(shift_sum(x, &self.coeffs, self.geometry, geo.fock().dim(), self.theta))
    }
}

/// Result of [`exp_lsp`] with its diagnostics.
#[derive(Debug, Clone)]
pub struct SpinEvolution {
    pub rho: Mat,
    /// Series mass dropped by the coefficient window.
    pub tail: f64,
    /// Trace lost through the truncation boundary.
    pub leakage: f64,
    /// Set when `t` exceeds `h / 2(α₊ + α₋)`.
    pub beyond_validity: bool,
}

/// `e^{tL_sp}(ρ)` for `L_sp = −iμK_M + α₋D_{l₋∘l₊} + α₊D_{l₊∘l₋}`.
pub fn exp_lsp(
    t: f64,
    rho: &Mat,
    geo: SpinGeometry,
    mu: f64,
    alpha_minus: f64,
    alpha_plus: f64,
) -> Result<SpinEvolution> {
    let map = SpinMap::new(t, mu, alpha_minus, alpha_plus, geo)?;
    let out = map.apply(rho)?;
    let tr_in: C64 = rho.diag().sum();
    let tr_out: C64 = out.diag().sum();
    Ok(SpinEvolution {
        leakage: (tr_in - tr_out).norm(),
        tail: map.coeffs.tail,
        beyond_validity: map.validity_ratio >= 1.0,
        rho: out,
    })
}
