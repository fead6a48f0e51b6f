// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13 (Higham 2005).

#![allow(clippy::excessive_precision)]

use ndarray::Array2;
use ndarray_linalg::Inverse;

use crate::error::{Error, Result};
use crate::{Mat, C64};

/// Largest matrix dimension accepted by [`expm`] (operator dimension 100
/// on the vectorized space).
pub const DENSE_EXPM_CAP: usize = 10_000;

const THETA: [(usize, f64); 4] =
    [(3, 1.495585217958292e-2), (5, 2.539398330063230e-1), (7, 9.504178996162932e-1), (9, 2.097847961257068e0)];
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] =
    [17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn norm1(a: &Mat) -> f64 {
    a.columns().into_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn axpy(acc: &mut Mat, c: f64, x: &Mat) {
    acc.scaled_add(C64::new(c, 0.0), x);
}

fn pade_low(a: &Mat, b: &[f64]) -> (Mat, Mat) {
    let n = a.nrows();
    let id = Array2::<C64>::eye(n);
    let a2 = a.dot(a);
    let mut pows = vec![id.clone(), a2.clone()];
    while pows.len() * 2 < b.len() {
        let next = pows.last().unwrap().dot(&a2);
        pows.push(next);
    }
    let mut u = Array2::zeros((n, n));
    let mut v = Array2::zeros((n, n));
    for (k, p) in pows.iter().enumerate() {
        axpy(&mut v, b[2 * k], p);
        if 2 * k + 1 < b.len() {
            axpy(&mut u, b[2 * k + 1], p);
        }
    }
    (a.dot(&u), v)
}

fn pade13(a: &Mat) -> (Mat, Mat) {
    let b = &B13;
    let n = a.nrows();
    let id = Array2::<C64>::eye(n);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let mut inner = Array2::zeros((n, n));
    axpy(&mut inner, b[13], &a6);
    axpy(&mut inner, b[11], &a4);
    axpy(&mut inner, b[9], &a2);
    let mut u = a6.dot(&inner);
    axpy(&mut u, b[7], &a6);
    axpy(&mut u, b[5], &a4);
    axpy(&mut u, b[3], &a2);
    axpy(&mut u, b[1], &id);
    let u = a.dot(&u);
    let mut inner = Array2::zeros((n, n));
    axpy(&mut inner, b[12], &a6);
    axpy(&mut inner, b[10], &a4);
    axpy(&mut inner, b[8], &a2);
    let mut v = a6.dot(&inner);
    axpy(&mut v, b[6], &a6);
    axpy(&mut v, b[4], &a4);
    axpy(&mut v, b[2], &a2);
    axpy(&mut v, b[0], &id);
    (u, v)
}

fn solve_pade(u: &Mat, v: &Mat) -> Result<Mat> {
    let p = v + u;
    let q = v - u;
    let qi = q.inv().map_err(|e| Error::Linalg(format!("Padé denominator: {e}")))?;
    Ok(qi.dot(&p))
}

/// `e^M` with the default size cap.
pub fn expm(m: &Mat) -> Result<Mat> {
    expm_capped(m, DENSE_EXPM_CAP)
}

/// `e^M`, rejecting matrices larger than `cap`.
pub fn expm_capped(m: &Mat, cap: usize) -> Result<Mat> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(crate::error::invalid("matrix", "expm needs a square matrix"));
    }
    if n > cap {
        return Err(Error::ResourceLimit(format!("expm of dimension {n} exceeds the dense cap {cap}")));
    }
    if n == 0 {
        return Ok(m.clone());
    }
    let nrm = norm1(m);
    if !nrm.is_finite() {
        return Err(crate::error::invalid("matrix", "expm input has non-finite entries"));
    }
    if m.indexed_iter().all(|((i, j), z)| i == j || *z == C64::new(0.0, 0.0)) {
        return Ok(Array2::from_diag(&m.diag().mapv(|z| z.exp())));
    }
    for (deg, theta) in THETA {
        if nrm <= theta {
            let b: &[f64] = match deg {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let (u, v) = pade_low(m, b);
            return solve_pade(&u, &v);
        }
    }
    let s = if nrm > THETA_13 { (nrm / THETA_13).log2().ceil() as i32 } else { 0 };
    let scaled = m.mapv(|z| z / 2f64.powi(s));
    let (u, v) = pade13(&scaled);
    let mut r = solve_pade(&u, &v)?;
    for _ in 0..s {
        r = r.dot(&r);
    }
    Ok(r)
}

/// `e^M` computed block by block over the connected components of the
/// sparsity graph of `M` (a permutation to block-diagonal form).
pub fn expm_blockwise(m: &Mat) -> Result<Mat> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for ((i, j), z) in m.indexed_iter() {
        if i != j && *z != C64::default() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a] = b;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut out = Array2::zeros((n, n));
    for idx in groups.values() {
        let k = idx.len();
        let sub = Array2::from_shape_fn((k, k), |(a, b)| m[[idx[a], idx[b]]]);
        let e = expm(&sub)?;
        for a in 0..k {
            for b in 0..k {
                out[[idx[a], idx[b]]] = e[[a, b]];
            }
        }
    }
    Ok(out)
}
