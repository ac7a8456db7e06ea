mod common;

use std::f64::consts::{PI, SQRT_2};

use tripod_core::dk::{
    adiabatic_constants, adiabatic_constants_with_tol, analytic_dark_observables,
    analytic_fidelity, dk_amplitudes, dk_params, f1, g_minus, g_plus, g_s, su_two_level,
    weak_dephasing_fidelity, xi_angle,
};
use tripod_core::effective::effective_rates;
use tripod_core::liouville::{integrate, Basis};
use tripod_core::numerics::gamma::gamma;
use tripod_core::pulses::{mixing_angles, Ordering};

use common::{central_diff, config, dk_oracle, linspace, simpson};

#[test]
fn eigenvalue_identities() {
    let cfg = config(Ordering::Overlap, 50.0, 1.5, 0.7);
    for t in linspace(-4.0, 4.0, 161) {
        let su = su_two_level(t, &cfg).unwrap();
        let (ep, em) = su.eigenvalues();
        assert!((ep + em - su.delta_su).abs() < 1e-12);
        assert!((ep * em + 2.0 * su.omega_su * su.omega_su).abs() < 1e-12);
        let x = 4.0 * t * cfg.tau;
        assert!((ep - em - 0.7 * f1(x)).abs() < 1e-12, "{t}");
        assert!((ep - 0.7 * g_plus(x)).abs() < 1e-12);
        assert!((em - 0.7 * g_minus(x)).abs() < 1e-12);
        // g_s is Gamma_s along the overlap path
        let gs = effective_rates(&mixing_angles(t, &cfg), &cfg.gamma).gamma_s;
        assert!((gs - 0.7 * g_s(x)).abs() < 1e-12);
    }
}

#[test]
fn su_values_at_endpoints() {
    let cfg = config(Ordering::Overlap, 50.0, 1.0, 2.0);
    let early = su_two_level(-30.0, &cfg).unwrap();
    assert!((early.delta_su - 0.5).abs() < 1e-12);
    assert!(su_two_level(30.0, &cfg).unwrap().gamma_v.abs() < 1e-12);
}

#[test]
fn xi_rate_by_finite_difference() {
    let cfg = config(Ordering::Overlap, 50.0, 1.5, 1.0);
    for t in linspace(-3.0, 3.0, 61) {
        let num = central_diff(|s| xi_angle(s, &cfg).unwrap().0, t, 1e-5);
        let (_, xi_dot) = xi_angle(t, &cfg).unwrap();
        assert!((num - xi_dot).abs() < 1e-6, "{t}: {num} vs {xi_dot}");
        assert!(xi_dot > 0.0);
    }
    let area = simpson(|t| xi_angle(t, &cfg).unwrap().1, cfg.t_start, cfg.t_end, 20_000);
    let alpha = dk_params(&cfg).unwrap().alpha;
    assert!((area - 0.5 * (2.0 * SQRT_2).atan()).abs() < 1e-8);
    assert!((area - PI * alpha).abs() < 1e-8);
}

#[test]
fn parameter_closed_forms() {
    let p = dk_params(&config(Ordering::Overlap, 50.0, 1.0, 0.0)).unwrap();
    assert!((p.t_max - 0.25 * 0.8f64.atanh()).abs() < 1e-15);
    assert!((p.a - 0.70710678).abs() < 1e-8);
    assert!((p.alpha - 0.19592).abs() < 1e-5);
    let p1 = dk_params(&config(Ordering::Overlap, 50.0, 1.0, 1.0)).unwrap();
    let p2 = dk_params(&config(Ordering::Overlap, 50.0, 0.5, 1.0)).unwrap();
    assert!(p1.beta < 0.0 && p1.delta < 0.0);
    // linear in gamma T^2 / tau
    assert!((p2.beta - 2.0 * p1.beta).abs() < 1e-14);
    assert!((p2.delta - 2.0 * p1.delta).abs() < 1e-14);
}

#[test]
fn gamma_function_matches_libm() {
    for k in 0..400 {
        let x = -7.95 + 0.04 * k as f64;
        if (x - x.round()).abs() < 1e-9 && x <= 0.0 {
            continue;
        }
        let a = gamma(x);
        let b = libm::tgamma(x);
        assert!((a - b).abs() <= 1e-10 * b.abs(), "{x}: {a} vs {b}");
    }
    assert!(gamma(0.0).is_infinite() && gamma(-3.0).is_infinite());
}

#[test]
fn zero_dephasing_reduction() {
    let p = dk_params(&config(Ordering::Overlap, 50.0, 1.5, 0.0)).unwrap();
    let a = dk_amplitudes(&p).unwrap();
    assert!((a.u_pp - (PI * p.alpha).cos()).abs() < 1e-10);
    assert!((a.u_mp - (PI * p.alpha).sin()).abs() < 1e-10);
    assert!((a.u_pp - 0.81650).abs() < 1e-5 && (a.u_mp - 0.57735).abs() < 1e-5);
    assert!((a.u_pp.powi(2) + a.u_mp.powi(2) - 1.0).abs() < 1e-10);
}

#[test]
fn amplitudes_match_brute_force_two_level_model() {
    for tau in [1.0, 1.5] {
        for x in linspace(0.0, 2.0, 11) {
            let cfg = config(Ordering::Overlap, 50.0, tau, x * tau);
            let a = dk_amplitudes(&dk_params(&cfg).unwrap()).unwrap();
            let (u_pp, u_mp) = dk_oracle(x, tau);
            assert!((a.u_pp - u_pp).abs() < 1e-3, "x={x}: {} vs {u_pp}", a.u_pp);
            assert!((a.u_mp - u_mp).abs() < 1e-3, "x={x}: {} vs {u_mp}", a.u_mp);
        }
    }
}

#[test]
fn constants_by_quadrature() {
    let (c_s, c_u) = adiabatic_constants();
    assert!((c_s - 2.42).abs() < 0.01, "{c_s}");
    assert!((c_u - 0.68).abs() < 0.01, "{c_u}");
    let (s2, u2) = adiabatic_constants_with_tol(1e-13);
    assert!((s2 - c_s).abs() < 1e-3 && (u2 - c_u).abs() < 1e-3);
    // Simpson on a truncated range as an independent check
    let left = simpson(|x| g_plus(x) - g_s(x), -60.0, 0.0, 60_000);
    let right_s = simpson(|x| g_minus(x) - g_s(x), 0.0, 60.0, 60_000);
    let right_u = simpson(|x| g_plus(x) - g_s(x) + 1.0, 0.0, 60.0, 60_000);
    assert!((c_s + left + right_s).abs() < 1e-8);
    assert!((c_u + left + right_u).abs() < 1e-8);
}

#[test]
fn integrand_limit() {
    assert!((g_plus(50.0) - g_s(50.0) + 1.0).abs() < 1e-12);
    assert!((g_plus(-50.0) - g_s(-50.0)).abs() < 1e-12);
}

#[test]
fn population_monotone_in_gamma_and_tau() {
    let rho = |tau: f64, g: f64| {
        analytic_dark_observables(&config(Ordering::Overlap, 50.0, tau, g), f64::INFINITY)
            .unwrap()
            .0
    };
    let gammas = linspace(0.0, 4.0, 21);
    for w in gammas.windows(2) {
        assert!(rho(1.5, w[1]) < rho(1.5, w[0]));
    }
    let taus = linspace(0.3, 3.0, 28);
    for w in taus.windows(2) {
        assert!(rho(w[1], 1.0) > rho(w[0], 1.0));
    }
    assert!((rho(1.5, 0.0) - 0.5).abs() < 1e-12);
    assert!((rho(1.5, 500.0) - 0.25).abs() < 1e-6);
}

#[test]
fn weak_dephasing_expansion_close() {
    let cfg = config(Ordering::Overlap, 50.0, 1.5, 1.0);
    let full = analytic_fidelity(&cfg, 5.0).unwrap();
    let weak = weak_dephasing_fidelity(&cfg, 5.0).unwrap();
    assert!((full - weak).abs() < 0.02, "{full} vs {weak}");
    let zero = config(Ordering::Overlap, 50.0, 1.5, 0.0);
    assert!((analytic_fidelity(&zero, 5.0).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn closed_forms_match_master_equation() {
    for g in [0.0, 0.25, 0.5, 1.0, 2.0] {
        let cfg = config(Ordering::Overlap, 50.0, 1.5, g);
        let tr = integrate(&cfg, Basis::Bare, 200).unwrap();
        let last = tr.rho_a.last().unwrap();
        let (p, c) = analytic_dark_observables(&cfg, cfg.t_end).unwrap();
        assert!((last[(0, 0)].re - p).abs() < 0.02, "gamma={g}: {} vs {p}", last[(0, 0)].re);
        assert!((last[(0, 1)].re - c).abs() < 0.02, "gamma={g}: {} vs {c}", last[(0, 1)].re);
    }
}
