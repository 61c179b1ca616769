//! Aggregating wealth across species.
//!
//! The total value `v = Σ_I w_I k_I` of one owner is a weighted convolution
//! of the per-species marginals. Special cases with closed forms live here
//! too: many banks (negative binomial), fermionic holdings (binomial),
//! cash plus deposits (Poisson ⊗ geometric), and deposit minus debt.

use rayon::prelude::*;

use crate::bitcoin;
use crate::dist::{self, tabulate_log_concave, Pmf, SpeciesClass};
use crate::error::{Error, Result};
use crate::solver::WealthSystem;
use crate::dist::ln_poisson_partition;
use crate::special::{ln_factorial, ln_gamma, ln_geometric_sum, log_add_exp};

/// Distribution of the total value `v = 0..len` (value units).
pub type ValuePmf = Pmf;

/// Output cells above this count are computed in parallel.
const PAR_THRESHOLD: usize = 4096;

/// Law of a signed integer (net balance), support `min..min + len`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedPmf {
    min: i64,
    probs: Vec<f64>,
    truncation_mass: f64,
}

impl SignedPmf {
    pub fn min(&self) -> i64 {
        self.min
    }

    pub fn max(&self) -> i64 {
        self.min + self.probs.len() as i64 - 1
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }

    pub fn get(&self, a: i64) -> f64 {
        if a < self.min {
            return 0.0;
        }
        self.probs.get((a - self.min) as usize).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(a, p)| a as f64 * p).sum()
    }

    /// `(a, p(a))` pairs in increasing `a`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(i, &p)| (self.min + i as i64, p))
    }
}

fn cells<F>(len: usize, cell: F) -> Vec<f64>
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    if len >= PAR_THRESHOLD {
        (0..len).into_par_iter().map(cell).collect()
    } else {
        (0..len).map(cell).collect()
    }
}

/// Plain convolution of two laws on the non-negative integers.
pub fn convolve(a: &Pmf, b: &Pmf) -> Pmf {
    if a.is_empty() || b.is_empty() {
        return Pmf::from_parts(Vec::new(), a.truncation_mass() + b.truncation_mass());
    }
    let (pa, pb) = (a.probs(), b.probs());
    let len = pa.len() + pb.len() - 1;
    let probs = cells(len, |v| {
        let lo = v.saturating_sub(pb.len() - 1);
        let hi = v.min(pa.len() - 1);
        (lo..=hi).map(|i| pa[i] * pb[v - i]).sum()
    });
    Pmf::from_parts(probs, a.truncation_mass() + b.truncation_mass())
}

/// `𝒫(v) = Σ_k⃗ δ(w⃗·k⃗ = v) Π_I P_I(k_I)` for `v <= v_max`, by iterated
/// single-species convolution.
///
/// Mass landing above `v_max` is added to `truncation_mass`, as are the parts'
/// own truncation masses.
pub fn weighted_convolve(parts: &[(Pmf, u64)], v_max: usize) -> Result<ValuePmf> {
    let mut acc = vec![1.0];
    let mut truncation = 0.0;
    for (i, (pmf, w)) in parts.iter().enumerate() {
        if *w == 0 {
            return Err(Error::invalid("weight", "w must be at least 1").at_species(i));
        }
        let w = *w as usize;
        let p = pmf.probs();
        let full_len = (acc.len() - 1) + w * p.len().saturating_sub(1) + 1;
        let len = full_len.min(v_max + 1);
        let prev = &acc;
        let next = cells(len, |v| {
            let kmax = (v / w).min(p.len().saturating_sub(1));
            (0..=kmax)
                .filter(|k| v - w * k < prev.len())
                .map(|k| p[k] * prev[v - w * k])
                .sum()
        });
        let dropped = prev.iter().sum::<f64>() * pmf.total_mass() - next.iter().sum::<f64>();
        truncation += pmf.truncation_mass() + dropped.max(0.0);
        acc = next;
    }
    Ok(Pmf::from_parts(acc, truncation))
}

/// Reachable values below which the full support is always kept.
pub const FULL_REACH_LIMIT: usize = 1 << 16;

/// The largest reachable value when it is at most [`FULL_REACH_LIMIT`] or
/// within `mean + 20 sd`; otherwise `mean + 20 sd` (at least the limit).
pub fn default_value_cap(parts: &[(Pmf, u64)]) -> usize {
    let mean: f64 = parts.iter().map(|(p, w)| *w as f64 * p.mean()).sum();
    let var: f64 = parts.iter().map(|(p, w)| (*w as f64).powi(2) * p.variance()).sum();
    let reach: usize = parts.iter().map(|(p, w)| *w as usize * p.len().saturating_sub(1)).sum();
    let spread = (mean + 20.0 * var.sqrt()).ceil() as usize;
    reach.min(spread.max(FULL_REACH_LIMIT))
}

/// Total-value law of a solved system; `v_max` defaults to [`default_value_cap`].
pub fn system_value_distribution(sys: &WealthSystem, tail_tol: f64, v_max: Option<usize>) -> Result<ValuePmf> {
    if sys.ladder().is_some() {
        return Err(Error::invalid(
            "system",
            "UTXO ladders use bitcoin::value_distribution instead of explicit convolution",
        ));
    }
    let parts = (0..sys.species().len())
        .map(|i| Ok((sys.species_pmf(i, tail_tol)?, sys.species()[i].weight)))
        .collect::<Result<Vec<_>>>()?;
    let cap = v_max.unwrap_or_else(|| default_value_cap(&parts));
    weighted_convolve(&parts, cap)
}

/// `Z(q) = Σ_v 𝒫(v) q^v` of a solved system, in closed form per species.
pub fn generating_function(sys: &WealthSystem, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid("q", format!("must lie in [0, 1], got {q}")));
    }
    let solved = sys
        .solved()
        .ok_or_else(|| Error::Inconsistent("the system has not been solved".into()))?;
    let ln_q = q.ln();
    let mut ln_z = 0.0;
    for (i, s) in sys.species().iter().enumerate() {
        let w = s.weight as f64;
        let cutoff = s.cutoff.finite();
        ln_z += match s.class {
            SpeciesClass::Distinguishable => {
                let beta = solved.betas[i].expect("solved").beta;
                match cutoff {
                    None if q == 0.0 => -(-beta).exp(),
                    None => (-beta).exp() * (q.powf(w) - 1.0),
                    Some(_) if q == 0.0 => -ln_poisson_partition(-beta, cutoff),
                    Some(_) => ln_poisson_partition(-beta + w * ln_q, cutoff) - ln_poisson_partition(-beta, cutoff),
                }
            }
            SpeciesClass::Identical => {
                let c = solved.betabar.expect("solved") * w;
                let shifted = if q == 0.0 { f64::INFINITY } else { c - w * ln_q };
                let ln_shifted = if shifted.is_infinite() { 0.0 } else { ln_geometric_sum(shifted, cutoff) };
                ln_shifted - ln_geometric_sum(c, cutoff)
            }
        };
    }
    if let (Some(count), Some(b)) = (sys.ladder(), solved.betabar) {
        ln_z += ladder_ln_generating_function(b, count, q);
    }
    Ok(ln_z.exp())
}

/// `ln Π_ī (1 - e^{-īβ̄}) / (1 - (e^{-β̄} q)^ī)`.
fn ladder_ln_generating_function(betabar: f64, count: u64, q: f64) -> f64 {
    if q == 1.0 {
        return 0.0;
    }
    let ln_p0 = bitcoin::ln_zero_value_probability(betabar, count);
    let x = (-betabar).exp() * q;
    let mut sum = 0.0;
    for i in 1..=count {
        let t = (x.powi(i.min(i32::MAX as u64) as i32)).ln_1p_neg();
        sum += t;
        if t.abs() < bitcoin::LADDER_REL_TOL * sum.abs().max(f64::MIN_POSITIVE) || t == 0.0 {
            break;
        }
    }
    ln_p0 - sum
}

trait LnOneMinus {
    fn ln_1p_neg(self) -> f64;
}

impl LnOneMinus for f64 {
    /// ln(1 - x)
    fn ln_1p_neg(self) -> f64 {
        (-self).ln_1p()
    }
}

fn check_nonneg(name: &'static str, m: f64) -> Result<()> {
    if !(m.is_finite() && m >= 0.0) {
        return Err(Error::invalid(name, format!("must be finite and >= 0, got {m}")));
    }
    Ok(())
}

/// Negative binomial law of deposits spread over `banks` equal banks:
/// `P̄_d̄(m,k) = C(d̄+k-1, k) (d̄/(m+d̄))^d̄ (m/(m+d̄))^k`.
pub fn bank_convolution(m: f64, banks: u64, tail_tol: f64) -> Result<Pmf> {
    check_nonneg("m", m)?;
    if banks == 0 {
        return Err(Error::invalid("banks", "need at least one bank"));
    }
    if m == 0.0 {
        return Ok(Pmf::delta(0));
    }
    let d = banks as f64;
    let ln_keep = -(m / d).ln_1p();
    let ln_ratio = -(d / m).ln_1p();
    let ln_gamma_d = ln_gamma(d);
    tabulate_log_concave(
        |k| {
            let kf = k as f64;
            ln_gamma(d + kf) - ln_gamma_d - ln_factorial(k) + d * ln_keep + kf * ln_ratio
        },
        |k| {
            let kf = k as f64;
            ((d + kf) / (kf + 1.0)).ln() + ln_ratio
        },
        None,
        tail_tol,
    )
}

/// `[d̄ / (d̄ - m(q-1))]^d̄`.
pub fn bank_generating_function(m: f64, banks: u64, q: f64) -> f64 {
    let d = banks as f64;
    (-d * (-m * (q - 1.0) / d).ln_1p()).exp()
}

/// Large-m mode `(1 - 1/d̄) m`.
pub fn bank_mode_approx(m: f64, banks: u64) -> f64 {
    (1.0 - 1.0 / banks as f64) * m
}

/// Large-m peak height `1/√(2π m (1 - 1/d̄)(1 + m/d̄))`.
pub fn bank_peak_approx(m: f64, banks: u64) -> f64 {
    let d = banks as f64;
    1.0 / (2.0 * std::f64::consts::PI * m * (1.0 - 1.0 / d) * (1.0 + m / d)).sqrt()
}

/// Binomial(M̄, 1/N): the convolution of M̄ fermionic one-unit laws spread over N owners.
pub fn fermionic_binomial(total: u64, owners: u64, tail_tol: f64) -> Result<Pmf> {
    if owners == 0 {
        return Err(Error::invalid("owners", "need at least one owner"));
    }
    if total == 0 {
        return Ok(Pmf::delta(0));
    }
    if owners == 1 {
        return Ok(Pmf::delta(total as usize));
    }
    let p = 1.0 / owners as f64;
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let n = total as f64;
    let ln_n_fact = ln_factorial(total);
    tabulate_log_concave(
        |k| ln_n_fact - ln_factorial(k) - ln_factorial(total - k) + k as f64 * ln_p + (n - k as f64) * ln_q,
        |k| ((n - k as f64) / (k as f64 + 1.0)).ln() + ln_p - ln_q,
        Some(total),
        tail_tol,
    )
}

/// Cash (Poisson, mean `m`) plus deposits (geometric, mean `m̄`):
/// `P̂(k) = e^{-m}/(m̄+1) (m̄/(m̄+1))^k Σ_{j≤k} (m + m/m̄)^j / j!`.
///
/// `m̄ = 0` degenerates to the pure Poisson law.
pub fn poisson_geometric_convolve(m: f64, mbar: f64, tail_tol: f64) -> Result<Pmf> {
    check_nonneg("m", m)?;
    check_nonneg("mbar", mbar)?;
    if mbar == 0.0 {
        return dist::poisson(m, tail_tol);
    }
    if m == 0.0 {
        return dist::bosonic(mbar, tail_tol);
    }
    if !(tail_tol > 0.0) {
        return Err(Error::invalid("tail_tol", "an infinite support needs tail_tol > 0"));
    }
    let ln_rho = -(1.0 / mbar).ln_1p();
    // c = m + m/m̄
    let ln_c = m.ln() + (1.0 / mbar).ln_1p();
    let ln_front = -m - mbar.ln_1p();
    let mut ln_partial = 0.0; // ln Σ_{j≤k} c^j/j!
    let mut lp = ln_front;
    let mut probs = Vec::new();
    let mut k = 0u64;
    loop {
        probs.push(lp.exp());
        let next_partial = log_add_exp(ln_partial, (k + 1) as f64 * ln_c - ln_factorial(k + 1));
        let next = ln_front + (k + 1) as f64 * ln_rho + next_partial;
        let r = next - lp;
        if r < 0.0 {
            let bound = lp.exp() / (-r).exp_m1();
            if bound < tail_tol {
                return Ok(Pmf::from_parts(probs, bound));
            }
        }
        if k + 1 >= dist::MAX_SUPPORT {
            return Err(Error::TooLarge("Poisson ⊗ geometric support".into()));
        }
        ln_partial = next_partial;
        lp = next;
        k += 1;
    }
}

/// The geometric tail `e^{m/m̄}/(m̄+1) (m̄/(m̄+1))^k` that [`poisson_geometric_convolve`] approaches.
pub fn poisson_geometric_tail(m: f64, mbar: f64, k: u64) -> f64 {
    (m / mbar - mbar.ln_1p() - k as f64 * (1.0 / mbar).ln_1p()).exp()
}

/// Net balance `a = k_1 - k_2` of deposits (mean `m1`) and debt (mean `m2`),
/// each spread over `banks` banks.
pub fn net_balance(m1: f64, m2: f64, banks: u64, tail_tol: f64) -> Result<SignedPmf> {
    let deposits = bank_convolution(m1, banks, tail_tol)?;
    let debt = bank_convolution(m2, banks, tail_tol)?;
    let (p1, p2) = (deposits.probs(), debt.probs());
    let min = -(p2.len() as i64 - 1);
    let len = p1.len() + p2.len() - 1;
    let probs = cells(len, |i| {
        let a = min + i as i64;
        // Σ_{k2} P1(a + k2) P2(k2)
        let k2_lo = (-a).max(0) as usize;
        let k2_hi = (p2.len() - 1).min((p1.len() as i64 - 1 - a) as usize);
        (k2_lo..=k2_hi).map(|k2| p1[(a + k2 as i64) as usize] * p2[k2]).sum()
    });
    Ok(SignedPmf {
        min,
        probs,
        truncation_mass: deposits.truncation_mass() + debt.truncation_mass(),
    })
}

/// Single-bank closed form of [`net_balance`].
pub fn net_balance_single_bank(m1: f64, m2: f64, a: i64) -> f64 {
    let front = 1.0 / (m1 + m2 + 1.0);
    if a >= 0 {
        front * (m1 / (m1 + 1.0)).powi(a as i32)
    } else {
        front * (m2 / (m2 + 1.0)).powi((-a) as i32)
    }
}

/// Convolution of two Poisson laws; equals Poisson(m1 + m2).
pub fn poisson_additivity_check(m1: f64, m2: f64, tail_tol: f64) -> Result<Pmf> {
    Ok(convolve(&dist::poisson(m1, tail_tol)?, &dist::poisson(m2, tail_tol)?))
}
