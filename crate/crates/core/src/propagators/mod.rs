// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form propagators: the oscillator dressing semigroups and their Kraus
//! families, the dissipative spin evolution, `W(η)`, `V(σ)` and the product
//! formula for the OISD semigroup.

pub mod coupling;
pub mod oscillator;
pub mod spin;

pub use coupling::{
    eta1, exp_ldecoupled, exp_loisd_closed, exp_lsyn, product_schedule, rotate, schedule_residuals, DphRoute, Inverted,
    OisdPropagator, ProductSchedule, TransformParams, VTransform, WMap,
};
pub use oscillator::{
    d_aad_semigroup, exp_lph, gibbs_state, kraus_family, phi_basis, s_semigroup, s_semigroup_inverse, tau1, tau_of_j,
    Direction, FockMap, GibbsState, KrausFamily,
};
pub use spin::{exp_lsp, skellam_mean, skellam_variance, spin_coeffs, SpinCoeffs, SpinEvolution, SpinMap, SERIES_EPS};
