// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Adaptive Gauss–Kronrod (7, 15) quadrature for complex-valued integrands.

#![allow(clippy::excessive_precision)]

use crate::error::{invalid, Error, Result};
use crate::C64;

const XGK: [f64; 8] = [
    0.991455371120812639,
    0.949107912342758525,
    0.864864423359769073,
    0.741531185599394440,
    0.586087235467691130,
    0.405845151377397167,
    0.207784955007898468,
    0.0,
];

const WGK: [f64; 8] = [
    0.022935322010529225,
    0.063092092629978553,
    0.104790010322250184,
    0.140653259715525919,
    0.169004726639267903,
    0.190350578064785410,
    0.204432940075298892,
    0.209482141084727828,
];

/// Gauss weights at `XGK[1]`, `XGK[3]`, `XGK[5]` and the centre.
const WG: [f64; 4] = [0.129484966168869693, 0.279705391489276668, 0.381830050505118945, 0.417959183673469388];

const MAX_INTERVALS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: C64,
    pub error: f64,
    pub intervals: usize,
}

fn gk15(f: &impl Fn(f64) -> C64, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let s = f(c - r * x) + f(c + r * x);
        kron += s * w;
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * r, ((kron - gauss) * r).norm())
}

/// Integrates `f` over `[a, b]` until the error estimate is below
/// `max(abs_tol, rel_tol·|I|)`.
pub fn integrate(f: impl Fn(f64) -> C64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(invalid("interval", "bounds must be finite"));
    }
    if !(abs_tol > 0.0 || rel_tol > 0.0) {
        return Err(invalid("tolerance", "at least one tolerance must be positive"));
    }
    if a == b {
        return Ok(Quadrature { value: C64::new(0.0, 0.0), error: 0.0, intervals: 0 });
    }
    let mut parts = vec![{
        let (v, e) = gk15(&f, a, b);
        (a, b, v, e)
    }];
    loop {
        let value: C64 = parts.iter().map(|p| p.2).sum();
        let error: f64 = parts.iter().map(|p| p.3).sum();
        if error <= abs_tol.max(rel_tol * value.norm()) {
            return Ok(Quadrature { value, error, intervals: parts.len() });
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::IllConditioned {
                what: "quadrature error estimate".into(),
                measured: error,
                threshold: abs_tol.max(rel_tol * value.norm()),
            });
        }
        let (i, _) = parts.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).expect("non-empty");
        let (lo, hi, _, _) = parts.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_polynomials() {
        // Kronrod rule is exact to degree 22
        for deg in 0..=22 {
            let q = gk15(&|x: f64| C64::new(x.powi(deg), 0.0), 0.0, 1.0);
            let want = 1.0 / (deg as f64 + 1.0);
            assert!((q.0.re - want).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn gauss_part_exact_to_degree_13() {
        for deg in 0..=13 {
            let q = gk15(&|x: f64| C64::new(x.powi(deg), 0.0), -1.0, 1.0);
            assert!(q.1 < 1e-13, "degree {deg}: {}", q.1);
        }
    }

    #[test]
    fn oscillatory_complex() {
        let q = integrate(|x| C64::new(0.0, 7.0 * x).exp(), 0.0, 10.0, 1e-13, 1e-13).unwrap();
        let want = (C64::new(0.0, 70.0).exp() - 1.0) / C64::new(0.0, 7.0);
        assert!((q.value - want).norm() < 1e-12);
    }

    #[test]
    fn reversed_and_empty() {
        let fwd = integrate(|x| C64::new(x.exp(), 0.0), 0.0, 2.0, 1e-14, 0.0).unwrap();
        let rev = integrate(|x| C64::new(x.exp(), 0.0), 2.0, 0.0, 1e-14, 0.0).unwrap();
        assert!((fwd.value + rev.value).norm() < 1e-13);
        assert_eq!(integrate(|_| C64::new(1.0, 0.0), 1.0, 1.0, 1e-10, 0.0).unwrap().value, C64::new(0.0, 0.0));
    }
}
