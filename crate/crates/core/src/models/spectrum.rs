// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Eigenvalues of the truncated open-oscillator generator paired with the
//! labels `λ_{n,m} = −iω(n−m) − γ(n+m)`.

use ndarray_linalg::Eig;
use serde::Serialize;

use super::{build_l_ph, ModelParams};
use crate::error::{invalid, Error, Result};
use crate::hilbert::build_fock;
use crate::superop::DENSE_DIM_CAP;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub n: usize,
    pub m: usize,
    pub analytic: C64,
    pub computed: C64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub cutoff: usize,
    /// Labels with `n, m ≤ max_label`, each matched to a distinct eigenvalue.
    pub rows: Vec<SpectrumRow>,
    /// Every eigenvalue of the truncated generator.
    pub eigenvalues: Vec<C64>,
}

impl SpectrumReport {
    pub fn max_deviation(&self) -> f64 {
        self.rows.iter().map(|r| r.deviation).fold(0.0, f64::max)
    }
}

/// `−iω(n−m) − γ(n+m)`.
pub fn ph_eigenvalue(n: usize, m: usize, p: &ModelParams) -> C64 {
    C64::new(-p.gamma * (n + m) as f64, -p.omega * (n as f64 - m as f64))
}

/// Diagonalizes `L_ph` on the Fock space of the given cutoff and matches each
/// label `(n, m)` with `n, m ≤ max_label` to a distinct eigenvalue, greedily by
/// increasing distance.
pub fn ph_spectrum(p: &ModelParams, cutoff: usize, max_label: usize) -> Result<SpectrumReport> {
    if max_label > cutoff {
        return Err(invalid("max_label", "labels must not exceed the cutoff"));
    }
    let fock = build_fock(cutoff)?;
    let l = build_l_ph(p, &fock)?;
    let mat = l.superop.to_matrix_capped(DENSE_DIM_CAP)?;
    let (vals, _) = mat.eig().map_err(|e| Error::Linalg(e.to_string()))?;
    let eigenvalues: Vec<C64> = vals.to_vec();

    let labels: Vec<(usize, usize)> = (0..=max_label).flat_map(|n| (0..=max_label).map(move |m| (n, m))).collect();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(labels.len() * eigenvalues.len());
    for (li, &(n, m)) in labels.iter().enumerate() {
        let a = ph_eigenvalue(n, m, p);
        for (ei, e) in eigenvalues.iter().enumerate() {
            pairs.push(((a - e).norm(), li, ei));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut label_used = vec![false; labels.len()];
    let mut eig_used = vec![false; eigenvalues.len()];
    let mut rows = Vec::with_capacity(labels.len());
    for (dist, li, ei) in pairs {
        if label_used[li] || eig_used[ei] {
            continue;
        }
        label_used[li] = true;
        eig_used[ei] = true;
        let (n, m) = labels[li];
        rows.push(SpectrumRow { n, m, analytic: ph_eigenvalue(n, m, p), computed: eigenvalues[ei], deviation: dist });
    }
    rows.sort_by_key(|r| (r.n, r.m));
    Ok(SpectrumReport { cutoff, rows, eigenvalues })
}
