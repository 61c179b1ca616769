//! The UTXO ladder model.
//!
//! Every UTXO value `ī` satoshi (`ī = 1..d̄`) is one bosonic species of
//! weight `ī`. Its expected count per address is `1/(e^{īβ̄} - 1)` and the
//! total value `v` held by one address follows
//! `𝒫(v) = 𝒫(0) 𝔓(v) e^{-vβ̄}` for `v <= d̄`, with 𝔓 the integer partition
//! function and `𝒫(0) = Π_ī (1 - e^{-īβ̄})`.
//!
//! Ladder sums are never iterated up to d̄. They stop once a term falls below
//! [`LADDER_REL_TOL`] of the running sum. For very small β̄ the infinite-ladder
//! sums switch to their modular transformation, which is exact up to terms of
//! order `e^{-4π²/β̄}`.

use std::f64::consts::{LN_2, PI};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::convolve::ValuePmf;
use crate::dist::Pmf;
use crate::error::{Error, Result};
use crate::roots::{self, Domain};

/// Bitcoin's hard cap in satoshi, used as the default ladder length d̄.
pub const HARD_CAP_SATOSHI: u64 = 2_100_000_000_000_000;

/// Ladder sums stop at the first term below this fraction of the running sum.
pub const LADDER_REL_TOL: f64 = 1e-18;

/// Largest total value any distribution here will tabulate.
pub const MAX_VALUE: u64 = 10_000_000;

/// Direct summation is used while the ladder needs at most this many terms.
const DIRECT_TERMS_LIMIT: f64 = 5e7;

/// Modular-form regime: β̄ below this and a ladder longer than `80/β̄`.
fn use_modular(betabar: f64, count: u64) -> bool {
    let needed = 60.0 / betabar;
    needed > DIRECT_TERMS_LIMIT && (count as f64) * betabar >= 80.0
}

/// Exact partition numbers 𝔓(0..=V).
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionTable {
    values: Vec<BigUint>,
}

impl PartitionTable {
    pub fn get(&self, v: usize) -> Option<&BigUint> {
        self.values.get(v)
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    /// Largest tabulated argument V.
    pub fn max_value(&self) -> usize {
        self.values.len() - 1
    }

    /// ln 𝔓(v), accurate to double precision for any size.
    pub fn ln(&self, v: usize) -> Option<f64> {
        self.values.get(v).map(ln_biguint)
    }
}

pub(crate) fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map_or(f64::NEG_INFINITY, f64::ln);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64 leading bits fit");
    (top as f64).ln() + shift as f64 * LN_2
}

/// 𝔓(0..=V) by Euler's pentagonal-number recurrence
/// `𝔓(n) = Σ_{k≥1} (-1)^{k+1} [𝔓(n - k(3k-1)/2) + 𝔓(n - k(3k+1)/2)]`.
pub fn partition_numbers(max_value: usize) -> PartitionTable {
    let mut values: Vec<BigUint> = Vec::with_capacity(max_value + 1);
    values.push(BigUint::one());
    for n in 1..=max_value {
        let mut plus = BigUint::zero();
        let mut minus = BigUint::zero();
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > n {
                break;
            }
            let acc = if k % 2 == 1 { &mut plus } else { &mut minus };
            *acc += &values[n - g1];
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= n {
                *acc += &values[n - g2];
            }
        }
        values.push(plus - minus);
    }
    PartitionTable { values }
}

/// Expected number of `ī`-satoshi UTXOs per address, `1/(e^{īβ̄} - 1)`.
pub fn utxo_popularity(denomination: u64, betabar: f64) -> f64 {
    1.0 / (denomination as f64 * betabar).exp_m1()
}

/// `Σ_{ī=1}^{count} ī/(e^{īβ̄} - 1)`: the mean total value per address.
pub fn ladder_value_sum(betabar: f64, count: u64) -> f64 {
    if use_modular(betabar, count) {
        // Σ σ(n) e^{-nβ} = π²/(6β²) - 1/(2β) + 1/24 - (4π²/β²) Σ σ(n) e^{-4π²n/β}
        return PI * PI / (6.0 * betabar * betabar) - 0.5 / betabar + 1.0 / 24.0;
    }
    ladder_direct(count, |i| i / (i * betabar).exp_m1())
}

/// Sums `term(ī)` for ī = 1..=count (terms must decrease in magnitude), stopping
/// at the first term below [`LADDER_REL_TOL`] of the running sum.
fn ladder_direct(count: u64, term: impl Fn(f64) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut i = 1u64;
    while i <= count {
        let t = term(i as f64);
        sum += t;
        if t.abs() < LADDER_REL_TOL * sum.abs() || t == 0.0 {
            return sum;
        }
        i += 1;
    }
    sum
}

/// Number of ladder terms [`ladder_value_sum`] adds before stopping
/// (`None` in the modular regime).
pub fn ladder_terms(betabar: f64, count: u64) -> Option<u64> {
    if use_modular(betabar, count) {
        return None;
    }
    let mut sum = 0.0;
    for i in 1..=count {
        let t = i as f64 / (i as f64 * betabar).exp_m1();
        sum += t;
        if t < LADDER_REL_TOL * sum || t == 0.0 {
            return Some(i);
        }
    }
    Some(count)
}

/// `d/dβ̄` of [`ladder_value_sum`].
pub fn ladder_value_sum_derivative(betabar: f64, count: u64) -> f64 {
    if use_modular(betabar, count) {
        return -PI * PI / (3.0 * betabar.powi(3)) + 0.5 / (betabar * betabar);
    }
    ladder_direct(count, |i| {
        let x = i * betabar;
        let s = (x / 2.0).sinh();
        -i * i / (4.0 * s * s)
    })
}

/// `ln 𝒫(0) = Σ_{ī=1}^{count} ln(1 - e^{-īβ̄})`.
pub fn ln_zero_value_probability(betabar: f64, count: u64) -> f64 {
    if use_modular(betabar, count) {
        // Dedekind η transformation
        return -PI * PI / (6.0 * betabar) + 0.5 * (2.0 * PI / betabar).ln() + betabar / 24.0;
    }
    ladder_direct(count, |i| (-(-i * betabar).exp_m1()).ln())
}

fn check_betabar(betabar: f64) -> Result<()> {
    if !(betabar.is_finite() && betabar > 0.0) {
        return Err(Error::invalid("betabar", format!("must be finite and > 0, got {betabar}")));
    }
    Ok(())
}

/// Exact β̄ solving `Σ_{ī≤d̄} ī/(e^{īβ̄} - 1) = m̄_w`.
pub fn solve_betabar_bitcoin(value_mean: f64, count: u64) -> Result<f64> {
    if count == 0 {
        return Err(Error::invalid("dbar", "the ladder needs at least one rung"));
    }
    if !(value_mean.is_finite() && value_mean > 0.0) {
        return Err(Error::invalid("value_mean", format!("must be finite and > 0, got {value_mean}")));
    }
    roots::solve_decreasing(
        |b| ladder_value_sum(b, count),
        |b| ladder_value_sum_derivative(b, count),
        value_mean,
        Domain::Positive,
    )
}

/// The integral approximation `β̄ ≈ π/√(6 m̄_w)`.
pub fn betabar_approx(value_mean: f64) -> f64 {
    PI / (6.0 * value_mean).sqrt()
}

/// `|Σ_{ī≤d̄} ī/(e^{īβ̄}-1) - π²/(6β̄²)| / (π²/(6β̄²))`.
pub fn integral_approximation_error(betabar: f64, count: u64) -> f64 {
    let integral = PI * PI / (6.0 * betabar * betabar);
    (ladder_value_sum(betabar, count) - integral).abs() / integral
}

/// β̄, d̄ and m̄_w of one ladder, kept mutually consistent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitcoinModel {
    pub betabar: f64,
    pub dbar: u64,
    pub value_mean: f64,
}

impl BitcoinModel {
    pub fn from_betabar(betabar: f64, dbar: u64) -> Result<Self> {
        check_betabar(betabar)?;
        if dbar == 0 {
            return Err(Error::invalid("dbar", "the ladder needs at least one rung"));
        }
        Ok(BitcoinModel {
            betabar,
            dbar,
            value_mean: ladder_value_sum(betabar, dbar),
        })
    }

    pub fn from_value_mean(value_mean: f64, dbar: u64) -> Result<Self> {
        let betabar = solve_betabar_bitcoin(value_mean, dbar)?;
        Ok(BitcoinModel {
            betabar,
            dbar,
            value_mean,
        })
    }

    pub fn ln_zero_value_probability(&self) -> f64 {
        ln_zero_value_probability(self.betabar, self.dbar)
    }
}

fn check_value_range(model: &BitcoinModel, max_value: u64) -> Result<()> {
    if max_value > model.dbar {
        return Err(Error::invalid(
            "max_value",
            format!("V = {max_value} exceeds d̄ = {}; the partition form needs v <= d̄", model.dbar),
        ));
    }
    if max_value > MAX_VALUE {
        return Err(Error::TooLarge(format!("V = {max_value} exceeds {MAX_VALUE}")));
    }
    Ok(())
}

/// `𝒫(v) = 𝒫(0) 𝔓(v) e^{-vβ̄}` for `v = 0..=V`.
///
/// `truncation_mass` is the mass not represented, `1 - Σ 𝒫(v)` (clamped at 0).
pub fn value_distribution(model: &BitcoinModel, max_value: u64) -> Result<ValuePmf> {
    check_value_range(model, max_value)?;
    let table = partition_numbers(max_value as usize);
    value_distribution_from_table(model, &table)
}

/// As [`value_distribution`], reusing a prebuilt partition table.
pub fn value_distribution_from_table(model: &BitcoinModel, table: &PartitionTable) -> Result<ValuePmf> {
    check_betabar(model.betabar)?;
    check_value_range(model, table.max_value() as u64)?;
    let ln_p0 = model.ln_zero_value_probability();
    let probs: Vec<f64> = table
        .values()
        .iter()
        .enumerate()
        .map(|(v, p)| (ln_p0 + ln_biguint(p) - v as f64 * model.betabar).exp())
        .collect();
    let rest = (1.0 - probs.iter().sum::<f64>()).max(0.0);
    Pmf::new(probs, rest)
}

/// Hardy–Ramanujan estimate `e^{π√(2v/3)} / (4v√3)` of 𝔓(v).
pub fn hardy_ramanujan_partition(v: f64) -> f64 {
    (PI * (2.0 * v / 3.0).sqrt()).exp() / (4.0 * v * 3f64.sqrt())
}

/// `𝒫(v)/𝒫(0) ≈ e^{π√(2v/3) - vβ̄} / (4v√3)`, meaningful for v ≳ 100.
pub fn hardy_ramanujan_ratio(v: f64, betabar: f64) -> f64 {
    (PI * (2.0 * v / 3.0).sqrt() - v * betabar).exp() / (4.0 * v * 3f64.sqrt())
}

/// Peak position `v* = (π²/(6β̄²)) ((1 + √(1 - 24β̄/π²))/2)²` of 𝒫(v).
/// Always below the integral-approximation mean `π²/(6β̄²)`.
pub fn value_mode(betabar: f64) -> Result<f64> {
    check_betabar(betabar)?;
    let disc = 1.0 - 24.0 * betabar / (PI * PI);
    if disc < 0.0 {
        return Err(Error::invalid(
            "betabar",
            format!("the mode formula needs β̄ < π²/24 ≈ 0.411, got {betabar}"),
        ));
    }
    let half = 0.5 * (1.0 + disc.sqrt());
    Ok(PI * PI / (6.0 * betabar * betabar) * half * half)
}

/// Peak height `√3 β̄²/(2π²) e^{π²/(6β̄)}` of 𝒫(v)/𝒫(0) in the small-β̄ limit.
/// Overflows for β̄ below about 5e-3; see [`ln_value_mode_peak_ratio`].
pub fn value_mode_peak_ratio(betabar: f64) -> f64 {
    ln_value_mode_peak_ratio(betabar).exp()
}

/// Natural log of [`value_mode_peak_ratio`].
pub fn ln_value_mode_peak_ratio(betabar: f64) -> f64 {
    (3f64.sqrt() * betabar * betabar / (2.0 * PI * PI)).ln() + PI * PI / (6.0 * betabar)
}

/// Share of the mean total value carried by 1-satoshi UTXOs:
/// `[1/(e^{β̄}-1)] / Σ_{ī≤d̄} ī/(e^{īβ̄}-1)`.
pub fn condensation_ratio(betabar: f64, count: u64) -> Result<f64> {
    check_betabar(betabar)?;
    Ok(utxo_popularity(1, betabar) / ladder_value_sum(betabar, count))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Partitions of n into parts of size at most `max_part`, by exhaustion.
    fn count_partitions(n: usize, max_part: usize) -> u64 {
        if n == 0 {
            return 1;
        }
        (1..=max_part.min(n)).map(|p| count_partitions(n - p, p)).sum()
    }

    #[test]
    fn partition_numbers_match_enumeration() {
        let table = partition_numbers(30);
        for v in 0..=30 {
            assert_eq!(table.get(v).unwrap().to_u64().unwrap(), count_partitions(v, v), "v={v}");
        }
        let first: Vec<u64> = (0..=5).map(|v| table.get(v).unwrap().to_u64().unwrap()).collect();
        assert_eq!(first, vec![1, 1, 2, 3, 5, 7]);
        assert_eq!(table.get(10).unwrap().to_u64().unwrap(), 42);
    }

    #[test]
    fn large_partition_numbers() {
        let table = partition_numbers(1000);
        // 𝔓(100) = 190569292, 𝔓(1000) ≈ 2.4061e31
        assert_eq!(table.get(100).unwrap().to_u64().unwrap(), 190_569_292);
        assert_eq!(
            table.get(1000).unwrap().to_string(),
            "24061467864032622473692149727991"
        );
        let ln = table.ln(1000).unwrap();
        assert!((ln - 24061467864032622473692149727991f64.ln()).abs() < 1e-12);
        for v in 2..=1000 {
            assert!(table.get(v).unwrap() >= table.get(v - 1).unwrap());
        }
    }

    #[test]
    fn ln_biguint_beyond_f64_range() {
        let x = BigUint::one() << 5000u32;
        assert!((ln_biguint(&x) - 5000.0 * LN_2).abs() < 1e-9);
    }

    #[test]
    fn popularity() {
        assert!((utxo_popularity(1, LN_2) - 1.0).abs() < 1e-15);
        assert!((utxo_popularity(2, LN_2) - 1.0 / 3.0).abs() < 1e-15);
        for i in 1..100 {
            assert!(utxo_popularity(i + 1, 0.01) < utxo_popularity(i, 0.01));
        }
    }

    #[test]
    fn modular_regime_matches_direct_sum_at_the_seam() {
        // Evaluate the same β̄ both ways: direct (short ladder) and modular.
        let b = 1e-6;
        let direct = ladder_direct(u64::MAX, |i| i / (i * b).exp_m1());
        let modular = ladder_value_sum(b, HARD_CAP_SATOSHI);
        assert!(use_modular(b, HARD_CAP_SATOSHI));
        assert!((direct - modular).abs() / modular < 1e-9);
        let ln_direct = ladder_direct(u64::MAX, |i| (-(-i * b).exp_m1()).ln());
        let ln_mod = ln_zero_value_probability(b, HARD_CAP_SATOSHI);
        assert!((ln_direct - ln_mod).abs() / ln_mod.abs() < 1e-9);
    }

    #[test]
    fn betabar_from_value_mean() {
        let b = solve_betabar_bitcoin(1e6, HARD_CAP_SATOSHI).unwrap();
        assert!((b - 1.282_299_881_237e-3).abs() < 1e-13);
        assert!((betabar_approx(1e6) - 1.2825e-3).abs() < 1e-7);
        assert!((betabar_approx(PI * PI / 6.0) - 1.0).abs() < 1e-15);
        // 2022 scales: M̄_w ~ 1e15 satoshi over N ~ 1e9 addresses
        let m = 1e15 / 1e9;
        assert_eq!(m, 1e6);
    }

    #[test]
    fn very_small_betabar_is_reachable() {
        let b = solve_betabar_bitcoin(1e14, HARD_CAP_SATOSHI).unwrap();
        assert!((b - betabar_approx(1e14)).abs() / b < 1e-6);
        let m = BitcoinModel::from_betabar(b, HARD_CAP_SATOSHI).unwrap();
        assert!((m.value_mean - 1e14).abs() / 1e14 < 1e-10);
    }

    #[test]
    fn value_distribution_ratios() {
        let model = BitcoinModel::from_betabar(0.5, HARD_CAP_SATOSHI).unwrap();
        let pmf = value_distribution(&model, 40).unwrap();
        assert!((pmf.get(1) / pmf.get(0) - (-0.5f64).exp()).abs() < 1e-14);
        assert!((pmf.get(4) / pmf.get(0) - 5.0 * (-2.0f64).exp()).abs() < 1e-13);
        // generating function against the direct product
        let q = 0.5;
        let product: f64 = (1..2000)
            .map(|i| {
                let x = (-0.5 * i as f64).exp();
                (1.0 - x) / (1.0 - ((-0.5f64).exp() * q).powi(i))
            })
            .product();
        assert!((pmf.generating_function(q) - product).abs() < 1e-8);
    }

    #[test]
    fn value_range_guards() {
        let short = BitcoinModel::from_betabar(0.5, 10).unwrap();
        assert!(value_distribution(&short, 11).is_err());
        let long = BitcoinModel::from_betabar(0.5, HARD_CAP_SATOSHI).unwrap();
        assert!(matches!(value_distribution(&long, MAX_VALUE + 1), Err(Error::TooLarge(_))));
    }

    #[test]
    fn hardy_ramanujan_accuracy() {
        let table = partition_numbers(200);
        let exact = (table.ln(200).unwrap() - 200.0 * 0.2).exp();
        let approx = hardy_ramanujan_ratio(200.0, 0.2);
        assert!((approx - exact).abs() / exact < 0.05);
    }

    #[test]
    fn mode_below_mean() {
        for i in 1..400 {
            let b = i as f64 * 1e-3;
            let v = value_mode(b).unwrap();
            assert!(v < PI * PI / (6.0 * b * b));
        }
        let b = 1e-4;
        assert!((value_mode(b).unwrap() / (PI * PI / (6.0 * b * b)) - 1.0).abs() < 1e-3);
        assert!(value_mode(0.42).is_err());
    }

    #[test]
    fn condensation() {
        assert!(condensation_ratio(3.0, HARD_CAP_SATOSHI).unwrap() > 0.9);
        assert!(condensation_ratio(10.0, HARD_CAP_SATOSHI).unwrap() > 0.999);
        assert!(condensation_ratio(1e-4, HARD_CAP_SATOSHI).unwrap() < 1e-3);
        let mut prev = 0.0;
        for i in 1..200 {
            let r = condensation_ratio(i as f64 * 0.05, HARD_CAP_SATOSHI).unwrap();
            assert!(r > prev);
            prev = r;
        }
    }
}
