// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense exponentials restricted to invariant sectors. When a superoperator
//! preserves `q(i) − q(j)` for an integer label `q`, each set of matrix units
//! `|i⟩⟨j|` with fixed difference spans an invariant subspace, and `e^{tL}`
//! can be formed densely one sector at a time.

use std::collections::BTreeSet;

use ndarray::{Array1, Array2};

use super::SuperOperator;
use crate::error::{invalid, Result};
use crate::numerics::{expm_capped, DENSE_EXPM_CAP};
use crate::{Mat, C64};

/// The generator on one label-difference sector.
#[derive(Debug, Clone)]
pub struct Sector {
    pub k: i64,
    pub pairs: Vec<(usize, usize)>,
    pub matrix: Mat,
}

impl SuperOperator {
    /// Dense restriction to `{|i⟩⟨j| : labels[i] − labels[j] = k}`. Fails if
    /// the superoperator is not in flat form or leaks out of the sector.
    pub fn sector(&self, labels: &[i64], k: i64) -> Result<Sector> {
        let d = self.dim();
        if labels.len() != d {
            return Err(invalid("labels", "one label per basis state is required"));
        }
        let flat =
            self.flat().ok_or_else(|| invalid("superoperator", "sector restriction needs a composition-free tree"))?;
        let pairs: Vec<(usize, usize)> =
            (0..d).flat_map(|j| (0..d).map(move |i| (i, j))).filter(|&(i, j)| labels[i] - labels[j] == k).collect();
        let n = pairs.len();
        if n > DENSE_EXPM_CAP {
            return Err(crate::Error::ResourceLimit(format!(
                "sector {k} has dimension {n}, above the dense cap {DENSE_EXPM_CAP}"
            )));
        }
        let mut slot = vec![usize::MAX; d * d];
        for (p, &(i, j)) in pairs.iter().enumerate() {
            slot[i + j * d] = p;
        }
        let mut m = Array2::<C64>::zeros((n, n));
        let mut leak = false;
        let mut put = |m: &mut Mat, row: usize, col: usize, z: C64| {
            if z == C64::default() {
                return;
            }
            match slot[row] {
                usize::MAX => leak = true,
                r => m[[r, col]] += z,
            }
        };
        for (col, &(i, j)) in pairs.iter().enumerate() {
            if let Some(l) = &flat.left {
                let lm = l.matrix();
                for a in 0..d {
                    put(&mut m, a + j * d, col, lm[[a, i]]);
                }
            }
            if let Some(r) = &flat.right {
                let rm = r.matrix();
                for b in 0..d {
                    put(&mut m, i + b * d, col, rm[[j, b]]);
                }
            }
            put(&mut m, i + j * d, col, flat.scalar);
            for (c, b, cc) in &flat.sandwiches {
                let (bm, cm) = (b.matrix(), cc.matrix());
                for a in 0..d {
                    let x = bm[[a, i]];
                    if x == C64::default() {
                        continue;
                    }
                    for bb in 0..d {
                        put(&mut m, a + bb * d, col, *c * x * cm[[j, bb]]);
                    }
                }
            }
        }
        if leak {
            return Err(invalid("labels", "the superoperator does not preserve label differences"));
        }
        Ok(Sector { k, pairs, matrix: m })
    }
}

/// Largest step `h` such that every time is a multiple `n·h` with `n ≤ 1000`.
fn common_step(times: &[f64]) -> Option<(f64, Vec<usize>)> {
    let h = times.iter().copied().filter(|t| *t > 0.0).fold(f64::INFINITY, f64::min);
    if !h.is_finite() {
        return None;
    }
    let counts: Option<Vec<usize>> = times
        .iter()
        .map(|t| {
            let n = (t / h).round();
            ((t / h - n).abs() < 1e-9 && n <= 1000.0).then_some(n as usize)
        })
        .collect();
    counts.map(|c| (h, c))
}

/// `e^{tL}ρ₀` for each `t ≥ 0`, by dense exponentials of the sectors that
/// `ρ₀` occupies. When all times are multiples of the smallest one, a single
/// exponential is formed per sector and powers of it are applied to `ρ₀`.
pub fn sector_evolve(l: &SuperOperator, labels: &[i64], rho0: &Mat, times: &[f64]) -> Result<Vec<Mat>> {
    l.check_state(rho0)?;
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(invalid("times", "must be finite and non-negative"));
    }
    let d = rho0.nrows();
    let ks: BTreeSet<i64> =
        rho0.indexed_iter().filter(|(_, z)| **z != C64::default()).map(|((i, j), _)| labels[i] - labels[j]).collect();
    let step = common_step(times);
    let mut out = vec![Array2::<C64>::zeros((d, d)); times.len()];
    for k in ks {
        let s = l.sector(labels, k)?;
        let v0 = Array1::from_iter(s.pairs.iter().map(|&(i, j)| rho0[[i, j]]));
        let vs: Vec<Array1<C64>> = match &step {
            Some((h, counts)) => {
                let e = expm_capped(&s.matrix.mapv(|z| z * *h), DENSE_EXPM_CAP)?;
                let mut order: Vec<usize> = (0..times.len()).collect();
                order.sort_by_key(|&i| counts[i]);
                let mut res = vec![Array1::zeros(0); times.len()];
                let (mut v, mut at) = (v0.clone(), 0);
                for i in order {
                    while at < counts[i] {
                        v = e.dot(&v);
                        at += 1;
                    }
                    res[i] = v.clone();
                }
                res
            }
            None => times
                .iter()
                .map(|t| Ok(expm_capped(&s.matrix.mapv(|z| z * *t), DENSE_EXPM_CAP)?.dot(&v0)))
                .collect::<Result<_>>()?,
        };
        for (v, dst) in vs.iter().zip(out.iter_mut()) {
            for (&(i, j), z) in s.pairs.iter().zip(v.iter()) {
                dst[[i, j]] = *z;
            }
        }
    }
    Ok(out)
}
