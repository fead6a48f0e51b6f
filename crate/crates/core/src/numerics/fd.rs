// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! One-sided finite-difference check of a propagator against its generator.

use super::norms::frobenius;
use crate::error::{invalid, Result};
use crate::Mat;

/// Relative residual `‖D_h − L(ρ)‖_F / max(‖L(ρ)‖_F, 1e-300)` where
/// `D_h = (−3ρ + 4P_h(ρ) − P_{2h}(ρ)) / (2h)` is the second-order forward
/// difference of `t ↦ P_t(ρ)` at `t = 0`.
pub fn generator_fd_check(
    propagator: impl Fn(f64, &Mat) -> Result<Mat>,
    generator: impl Fn(&Mat) -> Mat,
    rho: &Mat,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid("fd_step", "step must be positive and finite"));
    }
    let p1 = propagator(h, rho)?;
    let p2 = propagator(2.0 * h, rho)?;
    let fd = (p1 * 4.0 - p2 - rho * 3.0).mapv(|z| z / (2.0 * h));
    let exact = generator(rho);
    Ok(frobenius(&(&fd - &exact)) / frobenius(&exact).max(1e-300))
}
