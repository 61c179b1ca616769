//! Property tests over randomized parameters.

use proptest::prelude::*;
use wealthstat::bitcoin::{self, HARD_CAP_SATOSHI};
use wealthstat::convolve::{self, weighted_convolve};
use wealthstat::dist::{self, AtomicKind, Cutoff, Pmf, SpeciesSpec};
use wealthstat::inequality as ineq;
use wealthstat::roots::{self, Domain};
use wealthstat::solver::{self, identical_value_constraint, identical_value_constraint_derivative};
use wealthstat::WealthSystem;

fn cutoff() -> impl Strategy<Value = Cutoff> {
    prop_oneof![Just(Cutoff::Infinite), (1u64..=8).prop_map(Cutoff::Finite)]
}

fn finite_cutoff() -> impl Strategy<Value = Cutoff> {
    (1u64..=50).prop_map(Cutoff::Finite)
}

/// Distinguishable species as (weight, cutoff, mean as a fraction of the cap).
fn dist_species() -> impl Strategy<Value = SpeciesSpec> {
    (1u64..=4, cutoff(), 0.05f64..0.9).prop_map(|(w, c, frac)| {
        let m = c.finite().map_or(3.0 * frac, |l| frac * l as f64);
        SpeciesSpec::distinguishable(w, c, m).unwrap()
    })
}

fn ident_species() -> impl Strategy<Value = SpeciesSpec> {
    (1u64..=4, cutoff()).prop_map(|(w, c)| SpeciesSpec::identical(w, c).unwrap())
}

/// A solvable mixed system with a non-empty identical sector.
fn mixed_system() -> impl Strategy<Value = WealthSystem> {
    (
        prop::collection::vec(dist_species(), 0..=3),
        prop::collection::vec(ident_species(), 1..=3),
        0.05f64..0.9,
    )
        .prop_map(|(mut d, i, frac)| {
            let sup: f64 = i
                .iter()
                .map(|s| s.cutoff.finite().map_or(f64::INFINITY, |l| (l * s.weight) as f64))
                .sum();
            let value_mean = if sup.is_finite() { frac * sup } else { 5.0 * frac };
            d.extend(i);
            WealthSystem::new(d, value_mean).unwrap().solve().unwrap()
        })
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn pmfs_are_normalized(beta in -3.0f64..5.0, c in prop_oneof![finite_cutoff(), Just(Cutoff::Infinite)]) {
        let p = dist::truncated_poisson(beta, c, 1e-12).unwrap();
        prop_assert!((p.total_mass() + p.truncation_mass() - 1.0).abs() <= 1e-10);
        prop_assert!(p.truncation_mass() <= 1e-12);
        if beta > 0.0 || !c.is_infinite() {
            let g = dist::truncated_geometric(beta, c, 1e-12).unwrap();
            prop_assert!((g.total_mass() + g.truncation_mass() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn closed_form_means_match_pmfs(beta in -3.0f64..5.0, c in finite_cutoff()) {
        let p = dist::truncated_poisson(beta, c, 0.0).unwrap();
        prop_assert!((dist::truncated_poisson_mean(beta, c).unwrap() - p.mean()).abs() <= 1e-10);
        let g = dist::truncated_geometric(beta, c, 0.0).unwrap();
        prop_assert!((dist::truncated_geometric_mean(beta, c).unwrap() - g.mean()).abs() <= 1e-10);
    }

    #[test]
    fn geometric_limits_recover_atomic_laws(m in 0.01f64..0.99) {
        let beta_inf = dist::atomic_beta(AtomicKind::Bosonic, m).unwrap();
        let g = dist::truncated_geometric(beta_inf, Cutoff::Infinite, 1e-15).unwrap();
        let b = dist::bosonic(m, 1e-15).unwrap();
        for k in 0..g.len().max(b.len()) {
            prop_assert!((g.get(k) - b.get(k)).abs() <= 1e-12);
        }
        let beta_one = dist::atomic_beta(AtomicKind::Fermionic, m).unwrap();
        let g1 = dist::truncated_geometric(beta_one, Cutoff::Finite(1), 0.0).unwrap();
        let f = dist::atomic_pmf(AtomicKind::Fermionic, m, 0.0).unwrap();
        prop_assert!((g1.get(0) - f.get(0)).abs() <= 1e-12);
        prop_assert!((g1.get(1) - f.get(1)).abs() <= 1e-12);
    }

    #[test]
    fn atomic_variances(m in 0.01f64..20.0, mf in 0.0f64..=1.0) {
        let p = dist::poisson(m, 1e-16).unwrap();
        prop_assert!((p.variance() - m).abs() <= 1e-8 * m.max(1.0));
        let b = dist::bosonic(m, 1e-16).unwrap();
        prop_assert!((b.variance() - m * (1.0 + m)).abs() <= 1e-8 * (m * (1.0 + m)).max(1.0));
        let f = dist::atomic_pmf(AtomicKind::Fermionic, mf, 0.0).unwrap();
        prop_assert!((f.variance() - mf * (1.0 - mf)).abs() <= 1e-12);
    }

    #[test]
    fn means_decrease_in_beta(beta in -3.0f64..5.0, step in 1e-3f64..1.0, c in finite_cutoff()) {
        let b2 = beta + step;
        prop_assert!(dist::truncated_poisson_mean(b2, c).unwrap() < dist::truncated_poisson_mean(beta, c).unwrap());
        prop_assert!(dist::truncated_geometric_mean(b2, c).unwrap() < dist::truncated_geometric_mean(beta, c).unwrap());
    }

    #[test]
    fn solved_multipliers_have_small_residuals(sys in mixed_system()) {
        for (i, s) in sys.species().iter().enumerate() {
            if let Some(m) = s.target_mean {
                let got = sys.species_mean(i).unwrap();
                prop_assert!(((got - m) / m).abs() <= 1e-10, "species {i}: {got} vs {m}");
            }
        }
        let parts: Vec<(u64, Cutoff)> = sys
            .species()
            .iter()
            .filter(|s| s.target_mean.is_none())
            .map(|s| (s.weight, s.cutoff))
            .collect();
        let v = identical_value_constraint(&parts, None, sys.betabar().unwrap());
        prop_assert!(((v - sys.value_mean()) / sys.value_mean()).abs() <= 1e-10);
    }

    #[test]
    fn bisection_and_newton_agree(sys in mixed_system()) {
        let parts: Vec<(u64, Cutoff)> = sys
            .species()
            .iter()
            .filter(|s| s.target_mean.is_none())
            .map(|s| (s.weight, s.cutoff))
            .collect();
        let domain = if parts.iter().all(|p| !p.1.is_infinite()) { Domain::Real } else { Domain::Positive };
        let g = |b: f64| identical_value_constraint(&parts, None, b);
        let dg = |b: f64| identical_value_constraint_derivative(&parts, None, b);
        let target = sys.value_mean();
        let bracket = roots::bracket_decreasing(g, target, domain).unwrap();
        let bis = roots::bisect_decreasing(g, target, bracket).unwrap();
        let newt = roots::newton(g, dg, target, bracket.midpoint(), Some(bracket), 1e-15, 500).unwrap();
        prop_assert!((bis - newt).abs() <= 1e-9 * bis.abs().max(1.0), "{bis} vs {newt}");
    }

    #[test]
    fn closed_form_shortcuts(m in 0.01f64..100.0) {
        let d = solver::solve_beta_distinguishable(m, Cutoff::Infinite).unwrap().beta;
        prop_assert!((d + m.ln()).abs() <= 1e-12);
        let b = solver::solve_betabar(&[(1, Cutoff::Infinite)], m).unwrap().beta;
        let want = (1.0 / m).ln_1p();
        prop_assert!((b - want).abs() <= 1e-12 * want.max(1.0));
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn generating_function_duality(sys in mixed_system()) {
        let law = convolve::system_value_distribution(&sys, 1e-14, None).unwrap();
        for q in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let closed = convolve::generating_function(&sys, q).unwrap();
            prop_assert!((law.generating_function(q) - closed).abs() <= 1e-9, "q={q}");
        }
    }

    #[test]
    fn convolution_means_add(sys in mixed_system()) {
        let law = convolve::system_value_distribution(&sys, 1e-14, None).unwrap();
        let want = sys.total_value_mean().unwrap();
        prop_assert!((law.mean() - want).abs() <= 1e-9 * want.max(1.0));
    }

    #[test]
    fn small_convolutions_match_enumeration(
        parts in prop::collection::vec((1u64..=4, 0.05f64..2.0, any::<bool>()), 1..=3)
    ) {
        let pmfs: Vec<(Pmf, u64)> = parts
            .iter()
            .map(|&(w, m, boson)| {
                let kind = if boson { AtomicKind::Bosonic } else { AtomicKind::Poisson };
                (dist::atomic_pmf(kind, m, 1e-16).unwrap(), w)
            })
            .collect();
        let law = weighted_convolve(&pmfs, 12).unwrap();
        let mut brute = [0.0f64; 13];
        fn walk(i: usize, v: u64, p: f64, parts: &[(Pmf, u64)], out: &mut [f64; 13]) {
            if i == parts.len() {
                out[v as usize] += p;
                return;
            }
            let (pmf, w) = &parts[i];
            let mut k = 0u64;
            while v + k * w <= 12 {
                walk(i + 1, v + k * w, p * pmf.get(k as usize), parts, out);
                k += 1;
            }
        }
        walk(0, 0, 1.0, &pmfs, &mut brute);
        for (v, want) in brute.iter().enumerate() {
            prop_assert!((law.get(v) - want).abs() <= 1e-12, "v={v}");
        }
    }

    #[test]
    fn bank_mode_law(m in 50.0f64..500.0, banks in 2u64..=64) {
        let b = convolve::bank_convolution(m, banks, 1e-14).unwrap();
        let want = (1.0 - 1.0 / banks as f64) * m;
        prop_assert!((b.mode() as f64 - want).abs() <= 1.0, "mode {} vs {want}", b.mode());
    }

    #[test]
    fn bank_gini_non_increasing(m in 0.1f64..20.0) {
        let mut prev = f64::INFINITY;
        for e in 0..=10 {
            let g = ineq::gini_from_pmf(&convolve::bank_convolution(m, 1 << e, 1e-14).unwrap()).unwrap();
            prop_assert!(g <= prev + 1e-12);
            prev = g;
        }
    }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn gini_ordering(m in 0.01f64..50.0) {
        let gp = ineq::gini_poisson(m).unwrap();
        let gb = ineq::gini_bosonic(m).unwrap();
        prop_assert!(gp < gb);
        if m < 1.0 {
            prop_assert!(ineq::gini_fermionic(m).unwrap() < gp);
        }
    }

    #[test]
    fn lorenz_area_matches_gini(m in 0.05f64..30.0, boson in any::<bool>()) {
        let p = if boson { dist::bosonic(m, 1e-13).unwrap() } else { dist::poisson(m, 1e-13).unwrap() };
        let curve = ineq::lorenz_from_pmf(&p).unwrap();
        let g = ineq::gini_from_pmf(&p).unwrap();
        prop_assert!((curve.gini() - g).abs() <= 0.025 * g);
        prop_assert!((curve.gini() - g).abs() <= 1e-9);
        // exact flat first segment [0, P(0)]
        prop_assert_eq!(curve.points()[1].1, 0.0);
        prop_assert!((curve.points()[1].0 - p.get(0) / p.total_mass()).abs() <= 1e-15);
    }

    #[test]
    fn analytic_curves_start_flat(m in 0.05f64..30.0, t in 0.0f64..1.0) {
        let x0 = 1.0 / (m + 1.0);
        prop_assert_eq!(ineq::lorenz_geometric_analytic(m, t * x0).unwrap(), 0.0);
        prop_assert_eq!(ineq::lorenz_poisson_continuous(m, t * (-m).exp()).unwrap(), 0.0);
    }

    #[test]
    fn bosonic_entropy_is_maximal(m in 0.01f64..50.0) {
        let hb = ineq::entropy_bosonic(m);
        prop_assert!(hb >= ineq::shannon_entropy(&dist::poisson(m, 1e-16).unwrap()));
        if m <= 1.0 {
            let f = dist::atomic_pmf(AtomicKind::Fermionic, m, 0.0).unwrap();
            prop_assert!(hb >= ineq::shannon_entropy(&f));
        }
    }

    #[test]
    fn tail_masses_order(m in 0.01f64..1e3) {
        let p = ineq::tail_mass_above_mean(AtomicKind::Poisson, m).unwrap();
        let b = ineq::tail_mass_above_mean(AtomicKind::Bosonic, m).unwrap();
        prop_assert!(p > b, "{p} <= {b}");
    }
}

#[test]
fn poisson_gini_quadrature_matches_pmf() {
    for m in [0.1, 0.35, 1.0, 10.0, 100.0] {
        let q = ineq::gini_poisson(m).unwrap();
        let d = ineq::gini_from_pmf(&dist::poisson(m, 1e-15).unwrap()).unwrap();
        assert!((q - d).abs() <= 1e-6, "m={m}: {q} vs {d}");
    }
}

#[test]
fn value_law_is_normalized_at_moderate_betabar() {
    for beta in [0.2, 0.3, 0.5, 1.0, 2.0] {
        let model = bitcoin::BitcoinModel::from_betabar(beta, HARD_CAP_SATOSHI).unwrap();
        let law = bitcoin::value_distribution(&model, 5000).unwrap();
        let s = law.total_mass();
        assert!((1.0 - 1e-6..=1.0 + 1e-12).contains(&s), "beta={beta}: {s}");
    }
}

#[test]
fn integral_approximation_error_grows_with_betabar() {
    let grid = [1e-4, 1e-3, 1e-2, 0.1];
    let errs: Vec<f64> = grid
        .iter()
        .map(|&b| bitcoin::integral_approximation_error(b, HARD_CAP_SATOSHI).abs())
        .collect();
    assert!(errs[1] < 1e-3);
    assert!(errs.windows(2).all(|w| w[0] < w[1]), "{errs:?}");
}

#[test]
fn value_law_mean_matches_ladder_sum() {
    for beta in [0.3, 0.5, 1.0, 2.0] {
        let model = bitcoin::BitcoinModel::from_betabar(beta, HARD_CAP_SATOSHI).unwrap();
        let law = bitcoin::value_distribution(&model, 4000).unwrap();
        let want = bitcoin::ladder_value_sum(beta, HARD_CAP_SATOSHI);
        assert!((law.mean() - want).abs() <= 1e-6, "beta={beta}");
    }
}
