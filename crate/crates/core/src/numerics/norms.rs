// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

use ndarray_linalg::{EigValsh, SVD, UPLO};
use serde::Serialize;

use super::ToleranceConfig;
use crate::{Mat, C64};

/// Sum of singular values, from a full SVD.
pub fn trace_norm(x: &Mat) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let (_, s, _) = x.svd(false, false).expect("SVD did not converge");
    s.sum()
}

pub fn frobenius(x: &Mat) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(x: &Mat) -> C64 {
    x.diag().sum()
}

/// `(X + X†)/2`.
pub fn hermitian_part(x: &Mat) -> Mat {
    let xt = x.t().mapv(|z| z.conj());
    (x + &xt).mapv(|z| z * 0.5)
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(x: &Mat) -> f64 {
    let h = hermitian_part(x);
    let ev = h.eigvalsh(UPLO::Lower).expect("Hermitian eigensolver failed");
    ev.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Structured result of a density-matrix membership check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
    pub passed: bool,
}

/// Reports Hermiticity defect, trace defect and minimum eigenvalue; never clamps.
pub fn check_density(rho: &Mat, tol: &ToleranceConfig) -> DensityReport {
    let herm = rho.indexed_iter().map(|((i, j), z)| (z - rho[[j, i]].conj()).norm()).fold(0.0, f64::max);
    let tr = (trace(rho) - C64::new(1.0, 0.0)).norm();
    let me = min_eigenvalue(rho);
    DensityReport {
        hermiticity_defect: herm,
        trace_defect: tr,
        min_eigenvalue: me,
        passed: herm <= tol.herm_tol() && tr <= tol.trace_tol && me >= -tol.psd_tol,
    }
}
