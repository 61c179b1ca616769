//! Values frozen from independent computations (arbitrary-precision
//! arithmetic, series expansions, exhaustive counts).

use std::f64::consts::PI;

use wealthstat::bitcoin::{self, HARD_CAP_SATOSHI};
use wealthstat::dist::{AtomicKind, Cutoff};
use wealthstat::inequality as ineq;
use wealthstat::solver;
use wealthstat::WealthSystem;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Modified Bessel function I_ν(x) by its power series.
fn bessel_i(nu: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = (1..=nu).fold(1.0, |t, i| t * half / i as f64);
    let mut sum = term;
    for k in 1..400 {
        term *= half * half / (k as f64 * (k + nu) as f64);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

#[test]
fn poisson_gini_matches_bessel_form() {
    for m in [0.05f64, 0.1, 0.35, 1.0, 2.5, 10.0, 40.0] {
        let want = (-2.0 * m).exp() * (bessel_i(0, 2.0 * m) + bessel_i(1, 2.0 * m));
        let got = ineq::gini_poisson(m).unwrap();
        assert!((got - want).abs() < 1e-9, "m={m}: {got} vs {want}");
    }
}

#[test]
fn distinguishable_root_with_cutoff_two() {
    // (e^{-β} + e^{-2β}) / (1 + e^{-β} + e^{-2β}/2) = 1.2 at e^{-β} = 2
    let b = solver::solve_beta_distinguishable(1.2, Cutoff::Finite(2)).unwrap().beta;
    assert!((b + 2f64.ln()).abs() < 1e-14);
}

#[test]
fn two_species_betabar() {
    let b = solver::solve_betabar(&[(1, Cutoff::Infinite), (2, Cutoff::Infinite)], 2.0).unwrap().beta;
    assert!(rel(b, 0.6156077442390015) < 1e-13, "{b}");
}

#[test]
fn ladder_betabar_at_one_million() {
    let b = bitcoin::solve_betabar_bitcoin(1e6, HARD_CAP_SATOSHI).unwrap();
    assert!(rel(b, 1.282299881237e-3) < 1e-11, "{b}");
    let sys = WealthSystem::utxo_ladder(HARD_CAP_SATOSHI, 1e6).unwrap().solve().unwrap();
    assert!(rel(sys.betabar().unwrap(), b) < 1e-13);
    assert!(rel(bitcoin::betabar_approx(1e6), 1.282549830162e-3) < 1e-11);
    assert!((bitcoin::betabar_approx(1e6) - PI / 6e6f64.sqrt()).abs() < 1e-18);
}

#[test]
fn integral_approximation_error_at_one_thousandth() {
    let e = bitcoin::integral_approximation_error(1e-3, HARD_CAP_SATOSHI);
    assert!((e - 3.04e-4).abs() < 5e-7, "{e}");
    let sum = bitcoin::ladder_value_sum(1e-3, HARD_CAP_SATOSHI);
    assert!(sum < PI * PI / 6e-6);
}

#[test]
fn condensation_ratios() {
    for (beta, want) in [(3.0, 0.90710), (10.0, 0.99991), (0.01, 0.00607)] {
        let c = bitcoin::condensation_ratio(beta, HARD_CAP_SATOSHI).unwrap();
        assert!((c - want).abs() < 5e-6, "beta={beta}: {c}");
    }
}

#[test]
fn partition_counts() {
    let t = bitcoin::partition_numbers(1000);
    assert_eq!(t.get(100).unwrap().to_string(), "190569292");
    assert_eq!(t.get(1000).unwrap().to_string(), "24061467864032622473692149727991");
}

#[test]
fn footnote_gini_values() {
    assert!((ineq::gini_bosonic_lorenz(1.0).unwrap() - 0.68034).abs() < 5e-6);
    assert!((ineq::gini_bosonic_lorenz(0.1).unwrap() - 0.92632).abs() < 5e-6);
}

#[test]
fn pareto_points() {
    let p = ineq::pareto_8020_mean(AtomicKind::Poisson).unwrap();
    let b = ineq::pareto_8020_mean(AtomicKind::Bosonic).unwrap();
    assert!((p - 0.3529).abs() < 1e-4, "{p}");
    assert!((b - 0.4712).abs() < 1e-4, "{b}");
}
