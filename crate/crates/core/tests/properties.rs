// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

use ndarray::Array2;
use proptest::prelude::*;

use oisd_lab::cli::RunConfig;
use oisd_lab::hilbert::{FockGeometry, Operator, SpinScheme, TensorSpace};
use oisd_lab::models::{build_l_oisd, build_l_ph, ModelParams};
use oisd_lab::numerics::sampling::{random_density, random_matrix, random_unitary, rng};
use oisd_lab::numerics::{min_eigenvalue, trace, trace_norm};
use oisd_lab::propagators::{exp_lph, gibbs_state, skellam_mean, skellam_variance, spin_coeffs, WMap, SERIES_EPS};
use oisd_lab::superop::k;
use oisd_lab::{Mat, C64};

fn params() -> impl Strategy<Value = ModelParams> {
    (0.2..2.0f64, 0.1..2.0f64, 0.05..1.0f64, 0.0..0.5f64, 0.0..1.0f64, 0.0..0.5f64, 0.0..0.5f64).prop_map(
        |(omega, mu, gamma, lambda, j, alpha_minus, alpha_plus)| ModelParams {
            omega,
            mu,
            gamma,
            gamma_bar: 0.0,
            lambda,
            j,
            alpha_minus,
            alpha_plus,
        },
    )
}

fn small_space() -> TensorSpace {
    TensorSpace::new(3, SpinScheme::Hard, 4).unwrap()
}

fn dagger(x: &Mat) -> Mat {
    x.t().mapv(|z| z.conj())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trace_norm_is_unitarily_invariant(seed in any::<u64>(), d in 2usize..7) {
        let mut r = rng(seed);
        let x = random_matrix(&mut r, d);
        let u = random_unitary(&mut r, d);
        let v = random_unitary(&mut r, d);
        let n = trace_norm(&x);
        prop_assert!((trace_norm(&u.dot(&x).dot(&v)) - n).abs() <= 1e-12 * n);
        let y = random_matrix(&mut r, d);
        prop_assert!(trace_norm(&(&x + &y)) <= n + trace_norm(&y) + 1e-12);
    }

    #[test]
    fn commutator_map_matches_the_matrix_commutator(seed in any::<u64>()) {
        let space = small_space();
        let d = space.dim();
        let mut r = rng(seed);
        let a = random_matrix(&mut r, d);
        let x = random_matrix(&mut r, d);
        let op = Operator::new(space.geometry, a.clone()).unwrap();
        let got = k(&op).apply(&x).unwrap();
        let want = a.dot(&x) - x.dot(&a);
        prop_assert!(trace_norm(&(&got - &want)) <= 1e-12 * trace_norm(&want));
    }

    #[test]
    fn oisd_generator_annihilates_the_trace(p in params(), seed in any::<u64>()) {
        let space = small_space();
        let l = build_l_oisd(&p, &space).unwrap();
        let x = random_matrix(&mut rng(seed), space.dim());
        let lx = l.superop.apply(&x).unwrap();
        prop_assert!(trace(&lx).norm() <= 1e-11 * trace_norm(&x));
        let h = lx.clone() - dagger(&l.superop.apply(&dagger(&x)).unwrap());
        prop_assert!(trace_norm(&h) <= 1e-11 * trace_norm(&x));
    }

    #[test]
    fn gibbs_state_is_stationary(p in params(), t in 0.0..10.0f64) {
        let geo = FockGeometry::new(40).unwrap();
        let g = gibbs_state(p.omega, p.j, geo).unwrap();
        let l = build_l_ph(&p, &oisd_lab::hilbert::build_fock(40).unwrap()).unwrap();
        prop_assert!(trace_norm(&l.superop.apply(&g.rho).unwrap()) <= 1e-9);
        let evolved = exp_lph(t, &g.rho, geo, p.omega, p.gamma, p.j).unwrap();
        prop_assert!(trace_norm(&(&evolved - &g.rho)) <= 1e-9);
    }

    #[test]
    fn oscillator_semigroup_keeps_low_states_physical(p in params(), t in 0.0..3.0f64, seed in any::<u64>()) {
        let geo = FockGeometry::new(48).unwrap();
        let mask: Vec<bool> = (0..geo.dim()).map(|n| n <= 3).collect();
        let rho = random_density(&mut rng(seed), &mask);
        let p = ModelParams { j: p.j.min(0.3), ..p };
        let out = exp_lph(t, &rho, geo, p.omega, p.gamma, p.j).unwrap();
        prop_assert!((trace(&out).re - 1.0).abs() <= 1e-10);
        prop_assert!(min_eigenvalue(&out) >= -1e-10);
        prop_assert!(trace_norm(&(&out - &dagger(&out))) <= 1e-12);
    }

    #[test]
    fn spin_coefficients_form_a_distribution(t in 0.0..5.0f64, am in 0.0..1.0f64, ap in 0.0..1.0f64) {
        let c = spin_coeffs(t, am, ap, None, SERIES_EPS).unwrap();
        prop_assert!(c.iter().all(|(_, v)| v >= 0.0));
        let total: f64 = c.iter().map(|(_, v)| v).sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
        prop_assert!((c.mean() - skellam_mean(t, am, ap)).abs() <= 1e-10);
        prop_assert!((c.variance() - skellam_variance(t, am, ap)).abs() <= 1e-9 * (1.0 + t));
    }

    #[test]
    fn displacement_conjugation_round_trips(re in -0.5..0.5f64, im in -0.5..0.5f64, seed in any::<u64>()) {
        let space = small_space();
        let w = WMap::new(C64::new(re, im), &space).unwrap();
        let x = random_matrix(&mut rng(seed), space.dim());
        let back = w.apply_inverse(&w.apply(&x));
        prop_assert!(trace_norm(&(&back - &x)) <= 1e-11 * trace_norm(&x));
        let zero = w.apply(&Array2::zeros((space.dim(), space.dim())));
        prop_assert!(trace_norm(&zero) == 0.0);
    }

    #[test]
    fn config_render_round_trips(
        sigma in 0.01..5.0f64,
        seed in any::<u64>(),
        cutoff in 9usize..40,
        lambda in 0.0..1.0f64,
        t_end in 0.1..100.0f64,
    ) {
        let mut cfg = RunConfig::default();
        cfg.set("sigma", &sigma.to_string()).unwrap();
        cfg.set("seed", &seed.to_string()).unwrap();
        cfg.set("fock-cutoff", &cutoff.to_string()).unwrap();
        cfg.set("margin-fock", "4").unwrap();
        cfg.set("lambda", &lambda.to_string()).unwrap();
        cfg.set("t_end", &t_end.to_string()).unwrap();
        let text = cfg.render();
        let back = RunConfig::from_text(&text).unwrap();
        prop_assert_eq!(back.render(), text);
        prop_assert_eq!(back.hash(), cfg.hash());
        prop_assert_eq!(back.sigma, sigma);
        prop_assert_eq!(back.seed, seed);
    }
}
