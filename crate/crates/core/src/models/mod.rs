// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Model generators and the experiments built on them.

mod decoupling;
mod dicke;
mod liouvillians;
mod params;
mod spectrum;
mod synchronization;

pub use decoupling::{
    gamma_zero_transform, intertwining_residual, verify_decoupling, DecouplingReport, DecouplingRow, GammaZeroReport,
    ProbeConfig,
};
pub use dicke::{
    finite_ell_demo, finite_spin_hamiltonian, infinite_spin_hamiltonian, ladder_ratio, EllDeviation, SparseState,
};
pub use liouvillians::{
    build_l_decoupled, build_l_decoupled_general, build_l_decoupled_with_rate, build_l_oisd, build_l_oisd_general,
    build_l_ph, build_l_sp, build_l_syn_dec, hamiltonian_generator, LiouvillianHandle, LiouvillianLabel,
};
pub use params::ModelParams;
pub use spectrum::{ph_eigenvalue, ph_spectrum, SpectrumReport, SpectrumRow};
pub use synchronization::{
    dressed_product, prop2_experiment, prop2_from_preimage, rho_star, sync_residuals, Prop2Config, Prop2Report,
    Prop2Row, RhoStar, INVERSE_THRESHOLD,
};
