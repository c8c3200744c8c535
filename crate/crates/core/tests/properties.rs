use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

use walk_core::bessel::bessel_amplitude;
use walk_core::converge::{ks_distance_to_cdf, phi_empirical, phi_limit};
use walk_core::evolve::{
    choose_grid_size, dense_oracle_evolve, evolve, evolve_auto, DEFAULT_GUARD,
};
use walk_core::limit::{arcsine_cdf, limit_measure, rescaled_measure};
use walk_core::state::{from_torus, to_torus};
use walk_core::{position_distribution, LatticeState, PointMeasure, TrigSymbol};

fn config() -> Config {
    Config {
        cases: 200,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn symbol(max_band: u32) -> impl Strategy<Value = TrigSymbol> {
    let coeff = (0.0..=1.0f64, 0.0..TAU).prop_map(|(r, p)| Complex64::from_polar(r, p));
    (
        -1.0..1.0f64,
        prop::collection::vec(coeff, 1..=max_band as usize),
    )
        .prop_map(|(a0, cs)| {
            TrigSymbol::new(
                a0,
                cs.into_iter().enumerate().map(|(i, c)| (i as u32 + 1, c)),
            )
            .unwrap()
        })
}

fn state(spread: i64) -> impl Strategy<Value = LatticeState> {
    let amp = (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im));
    prop::collection::btree_map(-spread..=spread, amp, 1..=6)
        .prop_filter("nonzero", |m| m.values().any(|a| a.norm() > 1e-3))
        .prop_map(|m| LatticeState::from_entries(m).unwrap().normalized().unwrap())
}

fn konno_p(t: f64) -> PointMeasure {
    let psi = evolve_auto(
        &TrigSymbol::konno(),
        &LatticeState::basis(0),
        t,
        DEFAULT_GUARD,
    )
    .unwrap();
    position_distribution(&psi)
}

// Smallest grid from the heuristic upward on which `ψ` evolves without aliasing.
fn clean_grid(s: &TrigSymbol, psi: &LatticeState, t: f64) -> usize {
    let mut m = choose_grid_size(s, psi, t.abs(), DEFAULT_GUARD).unwrap();
    while evolve(s, psi, t, m).is_err() {
        m *= 2;
    }
    m
}

// ⟨ψ, Bψ⟩ with B the Toeplitz matrix of the velocity symbol.
fn velocity_expectation(s: &TrigSymbol, psi: &LatticeState) -> f64 {
    let v = s.velocity_symbol();
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, a) in psi.iter() {
        for (m, b) in psi.iter() {
            acc += a.conj() * v.coeff(n - m) * b;
        }
    }
    acc.re
}

#[test]
fn symbol_realness_on_many_symbols() {
    let mut runner = proptest::test_runner::TestRunner::new(Config {
        cases: 10_000,
        ..config()
    });
    runner
        .run(&(symbol(8), 0.0..TAU), |(s, theta)| {
            let z = s.eval_raw(theta);
            prop_assert!(z.im.abs() <= 1e-14 * s.norm_bound().max(1.0));
            Ok(())
        })
        .unwrap();
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn velocity_matches_finite_difference(s in symbol(8), theta in 0.0..TAU) {
        let h = 1e-5;
        let fd = -(s.eval(theta + h) - s.eval(theta - h)) / (2.0 * h);
        let err = (s.velocity_symbol().eval(theta) - fd).abs();
        // Centered differences are off by at most h²/6 · sup|â‴| ≤ h²/3 · Σ n³|a_n|.
        let third: f64 = s.coeffs().iter().map(|(n, c)| 2.0 * (*n as f64).powi(3) * c.norm()).sum();
        let truncation = h * h / 6.0 * third;
        if truncation <= 5e-9 {
            prop_assert!(err <= 1e-8, "err={err:e}");
        }
        prop_assert!(err <= 1e-8 + truncation, "err={err:e} truncation={truncation:e}");
    }

    #[test]
    fn group_speed_bounds(s in symbol(6), thetas in prop::collection::vec(0.0..TAU, 1000)) {
        let v = s.max_group_speed();
        prop_assert!(v <= s.speed_bound());
        for th in thetas {
            prop_assert!(s.eval_derivative(th, 1).abs() <= v);
        }
    }

    #[test]
    fn round_trip_and_parseval(psi in state(20), logm in 6u32..10) {
        let f = to_torus(&psi, 1 << logm).unwrap();
        prop_assert!(from_torus(&f).distance(&psi) <= 1e-13);
        prop_assert!((f.mean_sqr() - psi.norm_sqr()).abs() <= 1e-12);
    }

    #[test]
    fn shift_is_a_phase(psi in state(10), k in -50i64..50) {
        let m = 128;
        let f = to_torus(&psi, m).unwrap();
        let g = to_torus(&psi.shift(k), m).unwrap();
        for (j, (a, b)) in f.values.iter().zip(&g.values).enumerate() {
            let theta = TAU * j as f64 / m as f64;
            prop_assert!((a * Complex64::cis(k as f64 * theta) - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn unitarity(s in symbol(4), psi in state(6), t in -20.0..20.0f64) {
        let out = evolve_auto(&s, &psi, t, DEFAULT_GUARD).unwrap();
        prop_assert!((out.norm() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn group_law(s in symbol(4), psi in state(6), t1 in 0.0..12.0f64, t2 in 0.0..12.0f64) {
        let m = clean_grid(&s, &psi, t1 + t2);
        let step = evolve(&s, &psi, t1, m).unwrap();
        let two = evolve(&s, &step, t2, 2 * m).unwrap();
        let one = evolve(&s, &psi, t1 + t2, 2 * m).unwrap();
        prop_assert!(two.distance(&one) <= 1e-9);
    }

    #[test]
    fn translation_covariance(s in symbol(4), psi in state(6), t in 0.0..20.0f64, k in -100i64..100) {
        let m = clean_grid(&s, &psi, t);
        let a = evolve(&s, &psi.shift(k), t, m).unwrap();
        let b = evolve(&s, &psi, t, m).unwrap().shift(k);
        prop_assert!(a.distance(&b) <= 1e-10);
    }

    #[test]
    fn constant_symbol_is_a_global_phase(a0 in -5.0..5.0f64, psi in state(6), t in -50.0..50.0f64) {
        let s = TrigSymbol::new(a0, []).unwrap();
        let out = evolve(&s, &psi, t, 64).unwrap();
        prop_assert_eq!(out.distance(&psi.scale(Complex64::cis(-t * a0))), 0.0);
        let (p, q) = (position_distribution(&out), position_distribution(&psi));
        prop_assert_eq!(p.support(), q.support());
        for (a, b) in p.weights().iter().zip(q.weights()) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn oracle_triangle(t in 0.0..=20.0f64) {
        let e0 = LatticeState::basis(0);
        let s = TrigSymbol::konno();
        let spectral = evolve_auto(&s, &e0, t, DEFAULT_GUARD).unwrap();
        let dense = dense_oracle_evolve(&s, &e0, t, 128).unwrap();
        prop_assert!(dense.truncation_warning.is_none());
        let cone = t.ceil() as i64 + 2;
        for n in -cone..=cone {
            let b = bessel_amplitude(n, t);
            let (x, y) = (spectral.amplitude(n), dense.state.amplitude(n));
            prop_assert!((x - y).norm() <= 1e-8 && (x - b).norm() <= 1e-8 && (y - b).norm() <= 1e-8);
        }
    }

    #[test]
    fn spectral_matches_dense_for_random_symbols(s in symbol(3), psi in state(4), t in 0.0..=10.0f64) {
        let spectral = evolve_auto(&s, &psi, t, DEFAULT_GUARD).unwrap();
        let dense = dense_oracle_evolve(&s, &psi, t, 200).unwrap();
        prop_assert!(spectral.distance(&dense.state) <= 1e-8);
    }

    #[test]
    fn second_moment_grows_quadratically(t in 0.01..=200.0f64) {
        let p = konno_p(t);
        let m2: f64 = p.support().iter().zip(p.weights()).map(|(n, w)| n * n * w).sum();
        prop_assert!((m2 - t * t / 2.0).abs() <= 1e-8 * t * t / 2.0);
    }

    #[test]
    fn limit_mass_and_support(s in symbol(5), psi in state(8)) {
        let mu = limit_measure(&s, &psi, 1 << 12).unwrap();
        prop_assert!((mu.total_mass() - 1.0).abs() <= 1e-9);
        let v = s.max_group_speed();
        let lo = mu.support()[0];
        let hi = *mu.support().last().unwrap();
        prop_assert!(lo >= -v && hi <= v, "atoms [{lo}, {hi}] outside ±{v}");
    }

    #[test]
    fn limit_mean_is_velocity_expectation(s in symbol(5), psi in state(8)) {
        let mu = limit_measure(&s, &psi, 1 << 12).unwrap();
        prop_assert!((mu.mean() - velocity_expectation(&s, &psi)).abs() <= 1e-8);
    }

    #[test]
    fn limit_refinement_is_stable(logm in 10u32..=16, probes in prop::collection::vec(-0.99..0.99f64, 100)) {
        let e0 = LatticeState::basis(0);
        let coarse = limit_measure(&TrigSymbol::konno(), &e0, 1 << logm).unwrap();
        let fine = limit_measure(&TrigSymbol::konno(), &e0, 1 << (logm + 1)).unwrap();
        for x in probes {
            prop_assert!((coarse.cdf(x) - fine.cdf(x)).abs() < 1e-3);
        }
    }

    #[test]
    fn characteristic_functions_are_hermitian_and_bounded(
        s in symbol(3), psi in state(4), t in 1.0..30.0f64, omega in -8.0..8.0f64
    ) {
        let p = position_distribution(&evolve_auto(&s, &psi, t, DEFAULT_GUARD).unwrap());
        let (a, b) = (phi_empirical(&p, t, omega).unwrap(), phi_empirical(&p, t, -omega).unwrap());
        prop_assert!((a - b.conj()).norm() <= 1e-12);
        prop_assert!(a.norm() <= 1.0 + 1e-12);
        let (c, d) = (phi_limit(&s, &psi, omega, 1 << 12).unwrap(), phi_limit(&s, &psi, -omega, 1 << 12).unwrap());
        prop_assert!((c - d.conj()).norm() <= 1e-12);
        prop_assert!(c.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn limit_characteristic_slope_is_the_mean(s in symbol(4), psi in state(6)) {
        let h = 1e-5;
        let quad = 1 << 12;
        let d = (phi_limit(&s, &psi, h, quad).unwrap() - phi_limit(&s, &psi, -h, quad).unwrap()) / (2.0 * h);
        let mean = limit_measure(&s, &psi, quad).unwrap().mean();
        prop_assert!((d - Complex64::new(0.0, mean)).norm() <= 1e-6);
    }
}

#[test]
fn diagnostics_shrink_together() {
    let omegas: Vec<f64> = (-20..=20).map(|k| k as f64 * 0.25).collect();
    let limit = limit_measure(&TrigSymbol::konno(), &LatticeState::basis(0), 1 << 16).unwrap();
    let mut prev = (f64::INFINITY, f64::INFINITY);
    for t in [25.0, 50.0, 100.0, 200.0, 400.0] {
        let p = konno_p(t);
        let ks = ks_distance_to_cdf(&rescaled_measure(&p, t).unwrap(), arcsine_cdf);
        let phi = omegas
            .iter()
            .map(|&w| (phi_empirical(&p, t, w).unwrap() - limit.characteristic(w)).norm())
            .fold(0.0, f64::max);
        assert!(ks < prev.0 && phi < prev.1, "t={t} ks={ks} phi={phi}");
        prev = (ks, phi);
    }
}

#[test]
fn arcsine_density_integrates_to_cdf() {
    // Midpoint rule on the substitution x = sin u, where the density becomes 1/π.
    let k = 4000;
    for &x in &[-0.9, -0.5, 0.0, 0.3, 0.75] {
        let top = f64::asin(x);
        let du = (top + PI / 2.0) / k as f64;
        let integral: f64 = (0..k).map(|_| du / PI).sum();
        assert!((integral - arcsine_cdf(x)).abs() < 1e-12);
    }
}
