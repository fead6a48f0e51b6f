// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Seeded random operators and states.

use ndarray::{Array1, Array2};
use ndarray_linalg::QR;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Mat, C64};

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss(r: &mut Rng) -> C64 {
    let re: f64 = StandardNormal.sample(r);
    let im: f64 = StandardNormal.sample(r);
    C64::new(re, im)
}

/// Ginibre matrix with standard complex normal entries.
pub fn random_matrix(r: &mut Rng, d: usize) -> Mat {
    Array2::from_shape_simple_fn((d, d), || gauss(r))
}

/// Ginibre matrix supported on the rows and columns selected by `mask`.
pub fn random_supported(r: &mut Rng, mask: &[bool]) -> Mat {
    let d = mask.len();
    let mut x = random_matrix(r, d);
    for ((i, j), z) in x.indexed_iter_mut() {
        if !(mask[i] && mask[j]) {
            *z = C64::default();
        }
    }
    x
}

/// Full-rank density matrix on the masked subspace (`G G† / Tr`).
pub fn random_density(r: &mut Rng, mask: &[bool]) -> Mat {
    let g = random_supported(r, mask);
    let rho = g.dot(&g.t().mapv(|z| z.conj()));
    let tr = rho.diag().sum();
    rho.mapv(|z| z / tr)
}

/// Normalized state vector supported on the masked subspace.
pub fn random_vector(r: &mut Rng, mask: &[bool]) -> Array1<C64> {
    let v: Array1<C64> = mask.iter().map(|&b| if b { gauss(r) } else { C64::default() }).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv(|z| z / n)
}

/// Haar-distributed unitary from the QR factorization of a Ginibre matrix.
pub fn random_unitary(r: &mut Rng, d: usize) -> Mat {
    let g = random_matrix(r, d);
    let (q, rr) = g.qr().expect("QR failed");
    let mut q = q;
    for j in 0..d {
        let p = rr[[j, j]] / rr[[j, j]].norm();
        q.column_mut(j).mapv_inplace(|z| z * p);
    }
    q
}
