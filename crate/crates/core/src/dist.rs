//! Λ-truncated Poisson and geometric laws, and the atomic distributions
//! they reduce to.
//!
//! A distinguishable species with multiplier β follows
//! `p_k ∝ e^{-βk} / k!` on `0..=Λ`; an identical species with weight `w`
//! follows `p_k ∝ e^{-β̄ w k}` on `0..=Λ`. With `Λ = ∞` these are the Poisson
//! and Bose–Einstein (geometric) laws; the geometric law at `Λ = 1` is the
//! Fermi–Dirac two-point law.

use std::fmt;

use crate::error::{Error, Result};
use crate::special::{gamma_ur, ln_factorial, ln_geometric_sum, log_sum_exp};
use crate::special::{truncated_geometric_mean_raw, truncated_geometric_variance_raw};

/// Largest support (number of cells) any constructor will materialize.
pub const MAX_SUPPORT: u64 = 50_000_000;

/// Above this cutoff the truncated Poisson normalization goes through the
/// regularized incomplete gamma function instead of a direct sum.
const DIRECT_SUM_LIMIT: u64 = 100_000;

/// Gentile cutoff Λ: the maximal number of units one owner may hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cutoff {
    Finite(u64),
    Infinite,
}

impl Cutoff {
    pub fn finite(self) -> Option<u64> {
        match self {
            Cutoff::Finite(l) => Some(l),
            Cutoff::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Cutoff::Infinite)
    }

    pub(crate) fn check(self) -> Result<Option<u64>> {
        match self {
            Cutoff::Finite(0) => Err(Error::invalid("cutoff", "Λ must be at least 1")),
            c => Ok(c.finite()),
        }
    }
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cutoff::Finite(l) => write!(f, "{l}"),
            Cutoff::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Cutoff {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" {
            return Ok(Cutoff::Infinite);
        }
        let l: u64 = t
            .parse()
            .map_err(|_| Error::invalid("cutoff", format!("`{s}` is neither an integer nor `inf`")))?;
        Cutoff::Finite(l).check()?;
        Ok(Cutoff::Finite(l))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpeciesClass {
    Distinguishable,
    Identical,
}

/// One kind of wealth object.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesSpec {
    pub class: SpeciesClass,
    /// Value of one unit, in the smallest currency unit.
    pub weight: u64,
    pub cutoff: Cutoff,
    /// Mean possession count. Required for distinguishable species; identical
    /// species get their mean from the shared β̄ and leave this empty.
    pub target_mean: Option<f64>,
}

impl SpeciesSpec {
    pub fn distinguishable(weight: u64, cutoff: Cutoff, mean: f64) -> Result<Self> {
        let s = SpeciesSpec {
            class: SpeciesClass::Distinguishable,
            weight,
            cutoff,
            target_mean: Some(mean),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn identical(weight: u64, cutoff: Cutoff) -> Result<Self> {
        let s = SpeciesSpec {
            class: SpeciesClass::Identical,
            weight,
            cutoff,
            target_mean: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.weight == 0 {
            return Err(Error::invalid("weight", "w must be at least 1"));
        }
        let cutoff = self.cutoff.check()?;
        match (self.class, self.target_mean) {
            (SpeciesClass::Distinguishable, None) => {
                Err(Error::invalid("mean", "distinguishable species need a target mean"))
            }
            (_, Some(m)) if !(m.is_finite() && m >= 0.0) => {
                Err(Error::invalid("mean", format!("mean must be finite and >= 0, got {m}")))
            }
            (_, Some(m)) if cutoff == Some(1) && m >= 1.0 => Err(Error::invalid(
                "mean",
                format!("a species with Λ = 1 needs mean < 1, got {m}"),
            )),
            _ => Ok(()),
        }
    }
}

/// Finite probability mass function over `k = 0..len`.
///
/// `truncation_mass` bounds the probability of the unrepresented tail
/// `k >= len`; it is zero when the support is complete.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
    truncation_mass: f64,
}

impl Pmf {
    pub fn new(probs: Vec<f64>, truncation_mass: f64) -> Result<Self> {
        if let Some((k, p)) = probs.iter().enumerate().find(|(_, p)| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::invalid("probs", format!("p[{k}] = {p} is not a probability")));
        }
        if !(truncation_mass.is_finite() && truncation_mass >= 0.0) {
            return Err(Error::invalid("truncation_mass", format!("{truncation_mass}")));
        }
        Ok(Pmf {
            probs,
            truncation_mass,
        })
    }

    pub(crate) fn from_parts(probs: Vec<f64>, truncation_mass: f64) -> Self {
        debug_assert!(probs.iter().all(|p| *p >= 0.0));
        Pmf {
            probs,
            truncation_mass,
        }
    }

    /// Kronecker delta at `k`.
    pub fn delta(k: usize) -> Self {
        let mut probs = vec![0.0; k + 1];
        probs[k] = 1.0;
        Pmf::from_parts(probs, 0.0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `p_k`, zero outside the represented support.
    pub fn get(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.probs
            .iter()
            .enumerate()
            .map(|(k, p)| (k as f64 - mu).powi(2) * p)
            .sum()
    }

    /// Index of the largest cell (first one on ties).
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (k, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = k;
            }
        }
        best
    }

    /// Half the L1 distance over the union of the represented supports.
    pub fn tv_distance(&self, other: &Pmf) -> f64 {
        let n = self.len().max(other.len());
        0.5 * (0..n).map(|k| (self.get(k) - other.get(k)).abs()).sum::<f64>()
    }

    /// Σ p_k q^k over the represented support.
    pub fn generating_function(&self, q: f64) -> f64 {
        self.probs.iter().rev().fold(0.0, |acc, p| acc * q + p)
    }

    /// Whether Σ p_k lies within `eps` of one once the truncated tail is allowed for.
    pub fn is_normalized(&self, eps: f64) -> bool {
        let s = self.total_mass();
        s <= 1.0 + eps && s + self.truncation_mass >= 1.0 - eps
    }
}

/// Multiplier and normalization constant 𝒩 of one truncated law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GentileParams {
    pub beta: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomicKind {
    Poisson,
    Bosonic,
    Fermionic,
}

impl std::str::FromStr for AtomicKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "poisson" | "p" => Ok(AtomicKind::Poisson),
            "bosonic" | "b" | "geometric" | "boson" => Ok(AtomicKind::Bosonic),
            "fermionic" | "f" | "fermion" => Ok(AtomicKind::Fermionic),
            _ => Err(Error::invalid(
                "kind",
                format!("`{s}` is not one of poisson, bosonic, fermionic"),
            )),
        }
    }
}

/// Tabulates a log-concave law given its exact log-probabilities and the
/// log-ratio `ln p(k+1) - ln p(k)` (assumed non-increasing in k).
///
/// Stops at `last` or once the geometric tail bound `p_k / (e^{-r_k} - 1)`
/// drops below `tail_tol`.
pub(crate) fn tabulate_log_concave(
    log_p: impl Fn(u64) -> f64,
    log_ratio: impl Fn(u64) -> f64,
    last: Option<u64>,
    tail_tol: f64,
) -> Result<Pmf> {
    let mut probs = Vec::new();
    let mut k = 0u64;
    loop {
        let p = log_p(k).exp();
        probs.push(p);
        if Some(k) == last {
            return Ok(Pmf::from_parts(probs, 0.0));
        }
        let r = log_ratio(k);
        if r < 0.0 {
            let bound = p / (-r).exp_m1();
            if bound < tail_tol {
                return Ok(Pmf::from_parts(probs, bound));
            }
        }
        k += 1;
        if k >= MAX_SUPPORT {
            return Err(Error::TooLarge(format!(
                "support exceeds {MAX_SUPPORT} cells before the tail drops below {tail_tol}"
            )));
        }
    }
}

fn check_tail_tol(cutoff: Option<u64>, tail_tol: f64) -> Result<()> {
    if cutoff.is_none() && !(tail_tol > 0.0 && tail_tol.is_finite()) {
        return Err(Error::invalid("tail_tol", "an infinite support needs tail_tol > 0"));
    }
    Ok(())
}

fn check_beta(name: &'static str, beta: f64) -> Result<()> {
    if !beta.is_finite() {
        return Err(Error::invalid(name, format!("must be finite, got {beta}")));
    }
    Ok(())
}

/// ln Σ_{k=0}^{Λ} λ^k / k! with λ = e^{ln_lambda}.
pub(crate) fn ln_poisson_partition(ln_lambda: f64, cutoff: Option<u64>) -> f64 {
    let lambda = ln_lambda.exp();
    match cutoff {
        None => lambda,
        Some(l) if l <= DIRECT_SUM_LIMIT => {
            let terms: Vec<f64> = (0..=l)
                .map(|k| k as f64 * ln_lambda - ln_factorial(k))
                .collect();
            log_sum_exp(&terms)
        }
        // Σ_{k≤Λ} λ^k/k! = e^λ Q(Λ+1, λ)
        Some(l) => lambda + gamma_ur(l as f64 + 1.0, lambda).ln(),
    }
}

fn poisson_from_log_rate(ln_lambda: f64, cutoff: Option<u64>, tail_tol: f64) -> Result<Pmf> {
    let ln_z = ln_poisson_partition(ln_lambda, cutoff);
    if !ln_z.is_finite() {
        return Err(Error::invalid("beta", "e^{-β} overflows"));
    }
    tabulate_log_concave(
        |k| k as f64 * ln_lambda - ln_factorial(k) - ln_z,
        |k| ln_lambda - ((k + 1) as f64).ln(),
        cutoff,
        tail_tol,
    )
}

/// Λ-truncated Poisson law `p_k = 𝒩 e^{-βk} / k!`, `0 <= k <= Λ`.
pub fn truncated_poisson(beta: f64, cutoff: Cutoff, tail_tol: f64) -> Result<Pmf> {
    check_beta("beta", beta)?;
    let cutoff = cutoff.check()?;
    check_tail_tol(cutoff, tail_tol)?;
    poisson_from_log_rate(-beta, cutoff, tail_tol)
}

/// Normalization 𝒩 of the truncated Poisson law (`e^{-e^{-β}}` when Λ = ∞).
pub fn truncated_poisson_params(beta: f64, cutoff: Cutoff) -> Result<GentileParams> {
    check_beta("beta", beta)?;
    let cutoff = cutoff.check()?;
    Ok(GentileParams {
        beta,
        norm: (-ln_poisson_partition(-beta, cutoff)).exp(),
    })
}

/// `p_Λ` of the truncated Poisson law, and `p_{Λ-1}`.
fn poisson_top_cells(beta: f64, l: u64) -> (f64, f64) {
    let ln_z = ln_poisson_partition(-beta, Some(l));
    let at = |k: u64| (-beta * k as f64 - ln_factorial(k) - ln_z).exp();
    let below = if l >= 1 { at(l - 1) } else { 0.0 };
    (at(l), below)
}

/// Mean `(1 - 𝒩 e^{-βΛ}/Λ!) e^{-β}`; `e^{-β}` when Λ = ∞.
pub fn truncated_poisson_mean(beta: f64, cutoff: Cutoff) -> Result<f64> {
    check_beta("beta", beta)?;
    let lambda = (-beta).exp();
    Ok(match cutoff.check()? {
        None => lambda,
        Some(l) => {
            let (top, _) = poisson_top_cells(beta, l);
            // For λ ≫ Λ the mean saturates at Λ; clamp the rounding.
            (lambda * (1.0 - top)).min(l as f64)
        }
    })
}

/// Variance of the truncated Poisson law; equals `-d mean / dβ`.
pub fn truncated_poisson_variance(beta: f64, cutoff: Cutoff) -> Result<f64> {
    check_beta("beta", beta)?;
    let lambda = (-beta).exp();
    Ok(match cutoff.check()? {
        None => lambda,
        Some(l) => {
            let (top, below) = poisson_top_cells(beta, l);
            let mean = lambda * (1.0 - top);
            let falling2 = lambda * lambda * (1.0 - top - below);
            (falling2 + mean - mean * mean).max(0.0)
        }
    })
}

/// Λ-truncated geometric law `p_k = 𝒩 e^{-β_w k}` with
/// `𝒩 = (1 - e^{-β_w}) / (1 - e^{-(Λ+1)β_w})`.
///
/// `beta_w` is β̄ times the species weight. It may be zero or negative when Λ
/// is finite.
pub fn truncated_geometric(beta_w: f64, cutoff: Cutoff, tail_tol: f64) -> Result<Pmf> {
    check_beta("beta_w", beta_w)?;
    let cutoff = cutoff.check()?;
    check_geometric_domain(beta_w, cutoff)?;
    check_tail_tol(cutoff, tail_tol)?;
    if let Some(l) = cutoff {
        if beta_w <= 0.0 && l >= MAX_SUPPORT {
            return Err(Error::TooLarge(format!("Λ = {l} with β_w <= 0")));
        }
    }
    let ln_s = ln_geometric_sum(beta_w, cutoff);
    tabulate_log_concave(|k| -beta_w * k as f64 - ln_s, |_| -beta_w, cutoff, tail_tol)
}

fn check_geometric_domain(beta_w: f64, cutoff: Option<u64>) -> Result<()> {
    if cutoff.is_none() && beta_w <= 0.0 {
        return Err(Error::invalid(
            "beta_w",
            format!("an infinite cutoff needs β_w > 0, got {beta_w}"),
        ));
    }
    Ok(())
}

pub fn truncated_geometric_params(beta_w: f64, cutoff: Cutoff) -> Result<GentileParams> {
    check_beta("beta_w", beta_w)?;
    let cutoff = cutoff.check()?;
    check_geometric_domain(beta_w, cutoff)?;
    Ok(GentileParams {
        beta: beta_w,
        norm: (-ln_geometric_sum(beta_w, cutoff)).exp(),
    })
}

/// Mean of the truncated geometric law, evaluated as
/// `1/(e^{β_w}-1) - (Λ+1)/(e^{(Λ+1)β_w}-1)`, which equals
/// `[1-(Λ+1)e^{-Λβ_w}+Λe^{-(Λ+1)β_w}] / [(e^{β_w}-1)(1-e^{-(Λ+1)β_w})]`
/// but stays accurate as β_w → 0.
pub fn truncated_geometric_mean(beta_w: f64, cutoff: Cutoff) -> Result<f64> {
    check_beta("beta_w", beta_w)?;
    let cutoff = cutoff.check()?;
    check_geometric_domain(beta_w, cutoff)?;
    Ok(truncated_geometric_mean_raw(beta_w, cutoff))
}

/// Variance of the truncated geometric law; equals `-d mean / dβ_w`.
pub fn truncated_geometric_variance(beta_w: f64, cutoff: Cutoff) -> Result<f64> {
    check_beta("beta_w", beta_w)?;
    let cutoff = cutoff.check()?;
    check_geometric_domain(beta_w, cutoff)?;
    Ok(truncated_geometric_variance_raw(beta_w, cutoff))
}

fn check_mean(m: f64) -> Result<()> {
    if !(m.is_finite() && m >= 0.0) {
        return Err(Error::invalid("m", format!("mean must be finite and >= 0, got {m}")));
    }
    Ok(())
}

/// Poisson law with mean `m`: `e^{-m} m^k / k!`.
pub fn poisson(m: f64, tail_tol: f64) -> Result<Pmf> {
    atomic_pmf(AtomicKind::Poisson, m, tail_tol)
}

/// Bose–Einstein geometric law with mean `m`: `(1/(1+m)) (m/(1+m))^k`.
pub fn bosonic(m: f64, tail_tol: f64) -> Result<Pmf> {
    atomic_pmf(AtomicKind::Bosonic, m, tail_tol)
}

/// The three atomic laws P_p(m,·), P̄_b(m,·), P̄_f(m,·). All reduce to δ_k^0 at m = 0.
pub fn atomic_pmf(kind: AtomicKind, m: f64, tail_tol: f64) -> Result<Pmf> {
    check_mean(m)?;
    if m == 0.0 {
        return Ok(Pmf::delta(0));
    }
    match kind {
        AtomicKind::Poisson => {
            check_tail_tol(None, tail_tol)?;
            let ln_m = m.ln();
            tabulate_log_concave(
                |k| k as f64 * ln_m - m - ln_factorial(k),
                |k| ln_m - ((k + 1) as f64).ln(),
                None,
                tail_tol,
            )
        }
        AtomicKind::Bosonic => {
            check_tail_tol(None, tail_tol)?;
            // ln(m/(1+m)) = -ln(1 + 1/m)
            let ln_ratio = -(1.0 / m).ln_1p();
            let ln_p0 = -m.ln_1p();
            tabulate_log_concave(|k| ln_p0 + k as f64 * ln_ratio, |_| ln_ratio, None, tail_tol)
        }
        AtomicKind::Fermionic => {
            if m > 1.0 {
                return Err(Error::invalid(
                    "m",
                    format!("a fermionic mean cannot exceed 1, got {m}"),
                ));
            }
            Ok(Pmf::from_parts(vec![1.0 - m, m], 0.0))
        }
    }
}

/// The multiplier that reproduces an atomic law from the truncated family:
/// β = -ln m (Poisson), β_w = ln(1 + 1/m) (bosonic), β_w = ln((1-m)/m) (fermionic).
pub fn atomic_beta(kind: AtomicKind, m: f64) -> Result<f64> {
    check_mean(m)?;
    match kind {
        AtomicKind::Poisson => Ok(-m.ln()),
        AtomicKind::Bosonic => Ok((1.0 / m).ln_1p()),
        AtomicKind::Fermionic if m <= 1.0 => Ok(((1.0 - m) / m).ln()),
        AtomicKind::Fermionic => Err(Error::invalid("m", "fermionic mean above 1")),
    }
}
