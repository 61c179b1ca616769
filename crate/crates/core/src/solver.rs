//! Lagrange multipliers from the conservation constraints.
//!
//! Each distinguishable species has its own mean `m_i` and multiplier `β_i`.
//! All identical species share one multiplier `β̄` fixed by the mean total
//! value `m̄_w = Σ_ī w_ī · mean_ī(β̄ w_ī)`. The constraints decouple, so every
//! multiplier is the root of a strictly decreasing scalar function.

use crate::bitcoin;
use crate::dist::{self, Cutoff, GentileParams, Pmf, SpeciesClass, SpeciesSpec};
use crate::error::{Error, Result};
use crate::roots::{self, Domain};
use crate::special::{ln_geometric_sum, truncated_geometric_mean_raw, truncated_geometric_variance_raw};

/// Solved multipliers of a [`WealthSystem`].
#[derive(Debug, Clone, PartialEq)]
pub struct Multipliers {
    /// Indexed like the species list; `Some` exactly for distinguishable species.
    pub betas: Vec<Option<GentileParams>>,
    /// Shared β̄; absent when there is no identical species.
    pub betabar: Option<f64>,
}

/// A set of species plus the mean total value of the identical sector.
///
/// The identical sector may additionally contain a UTXO ladder: `count`
/// bosonic species with weights `1, 2, …, count`, summed analytically rather
/// than listed one by one.
#[derive(Debug, Clone, PartialEq)]
pub struct WealthSystem {
    species: Vec<SpeciesSpec>,
    value_mean: f64,
    ladder: Option<u64>,
    solved: Option<Multipliers>,
}

impl WealthSystem {
    pub fn new(species: Vec<SpeciesSpec>, value_mean: f64) -> Result<Self> {
        for (i, s) in species.iter().enumerate() {
            s.validate().map_err(|e| e.at_species(i))?;
        }
        if !(value_mean.is_finite() && value_mean >= 0.0) {
            return Err(Error::invalid("value_mean", format!("must be finite and >= 0, got {value_mean}")));
        }
        let sys = WealthSystem {
            species,
            value_mean,
            ladder: None,
            solved: None,
        };
        if sys.species.is_empty() {
            return Err(Error::invalid("species", "a system needs at least one species"));
        }
        Ok(sys)
    }

    /// A pure ladder system: bosonic species `w = 1..=count`, no others.
    pub fn utxo_ladder(count: u64, value_mean: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::invalid("count", "the ladder needs at least one rung"));
        }
        if !(value_mean.is_finite() && value_mean >= 0.0) {
            return Err(Error::invalid("value_mean", format!("must be finite and >= 0, got {value_mean}")));
        }
        Ok(WealthSystem {
            species: Vec::new(),
            value_mean,
            ladder: Some(count),
            solved: None,
        })
    }

    /// Adds a UTXO ladder to the identical sector.
    pub fn with_ladder(mut self, count: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::invalid("count", "the ladder needs at least one rung"));
        }
        self.ladder = Some(count);
        self.solved = None;
        Ok(self)
    }

    pub fn species(&self) -> &[SpeciesSpec] {
        &self.species
    }

    pub fn value_mean(&self) -> f64 {
        self.value_mean
    }

    pub fn ladder(&self) -> Option<u64> {
        self.ladder
    }

    pub fn solved(&self) -> Option<&Multipliers> {
        self.solved.as_ref()
    }

    pub fn has_identical_sector(&self) -> bool {
        self.ladder.is_some() || self.species.iter().any(|s| s.class == SpeciesClass::Identical)
    }

    fn identical_parts(&self) -> Vec<(u64, Cutoff)> {
        self.species
            .iter()
            .filter(|s| s.class == SpeciesClass::Identical)
            .map(|s| (s.weight, s.cutoff))
            .collect()
    }

    /// Solves every multiplier; see [`solve_system`].
    pub fn solve(self) -> Result<Self> {
        solve_system(self)
    }

    fn multipliers(&self) -> Result<&Multipliers> {
        self.solved
            .as_ref()
            .ok_or_else(|| Error::Inconsistent("the system has not been solved".into()))
    }

    pub fn betabar(&self) -> Option<f64> {
        self.solved.as_ref().and_then(|m| m.betabar)
    }

    /// Multiplier of species `index`: β_i for distinguishable, β̄ w for identical.
    pub fn species_beta(&self, index: usize) -> Result<f64> {
        let m = self.multipliers()?;
        let s = self.species.get(index).ok_or_else(|| Error::invalid("index", "no such species"))?;
        match s.class {
            SpeciesClass::Distinguishable => Ok(m.betas[index].expect("solved distinguishable").beta),
            SpeciesClass::Identical => Ok(m.betabar.expect("solved identical sector") * s.weight as f64),
        }
    }

    /// Mean possession count of species `index` under the solved multipliers.
    pub fn species_mean(&self, index: usize) -> Result<f64> {
        let beta = self.species_beta(index)?;
        let s = &self.species[index];
        match s.class {
            SpeciesClass::Distinguishable => dist::truncated_poisson_mean(beta, s.cutoff),
            SpeciesClass::Identical => dist::truncated_geometric_mean(beta, s.cutoff),
        }
    }

    /// Marginal law of species `index` under the solved multipliers.
    pub fn species_pmf(&self, index: usize, tail_tol: f64) -> Result<Pmf> {
        let beta = self.species_beta(index)?;
        let s = &self.species[index];
        match s.class {
            SpeciesClass::Distinguishable => dist::truncated_poisson(beta, s.cutoff, tail_tol),
            SpeciesClass::Identical => dist::truncated_geometric(beta, s.cutoff, tail_tol),
        }
    }

    /// Σ_I w_I · mean_I: the expected total value held by one owner.
    pub fn total_value_mean(&self) -> Result<f64> {
        let mut total = 0.0;
        for i in 0..self.species.len() {
            total += self.species[i].weight as f64 * self.species_mean(i)?;
        }
        if let (Some(count), Some(b)) = (self.ladder, self.betabar()) {
            total += bitcoin::ladder_value_sum(b, count);
        }
        Ok(total)
    }
}

/// β_i with `truncated_poisson_mean(β_i, Λ) = m`. For Λ = ∞ this is `-ln m`.
pub fn solve_beta_distinguishable(m: f64, cutoff: Cutoff) -> Result<GentileParams> {
    let lim = cutoff.check()?;
    let hi = lim.map_or(f64::INFINITY, |l| l as f64);
    if !(m.is_finite() && m > 0.0 && m < hi) {
        return Err(Error::Unattainable {
            name: "mean",
            target: m,
            lo: 0.0,
            hi,
        });
    }
    let beta = match lim {
        None => -m.ln(),
        Some(_) => roots::solve_decreasing(
            |b| dist::truncated_poisson_mean(b, cutoff).unwrap_or(f64::NAN),
            |b| -dist::truncated_poisson_variance(b, cutoff).unwrap_or(f64::NAN),
            m,
            Domain::Real,
        )?,
    };
    dist::truncated_poisson_params(beta, cutoff)
}

/// `Σ_ī w_ī · mean_ī(β̄ w_ī)` (+ the ladder sum when present).
pub fn identical_value_constraint(identical: &[(u64, Cutoff)], ladder: Option<u64>, betabar: f64) -> f64 {
    let explicit: f64 = identical
        .iter()
        .map(|&(w, c)| w as f64 * truncated_geometric_mean_raw(betabar * w as f64, c.finite()))
        .sum();
    explicit + ladder.map_or(0.0, |n| bitcoin::ladder_value_sum(betabar, n))
}

/// `d/dβ̄` of [`identical_value_constraint`].
pub fn identical_value_constraint_derivative(
    identical: &[(u64, Cutoff)],
    ladder: Option<u64>,
    betabar: f64,
) -> f64 {
    let explicit: f64 = identical
        .iter()
        .map(|&(w, c)| {
            let wf = w as f64;
            -wf * wf * truncated_geometric_variance_raw(betabar * wf, c.finite())
        })
        .sum();
    explicit + ladder.map_or(0.0, |n| bitcoin::ladder_value_sum_derivative(betabar, n))
}

/// The supremum of the identical-sector value (finite only if every cutoff is).
pub fn identical_value_supremum(identical: &[(u64, Cutoff)], ladder: Option<u64>) -> f64 {
    if ladder.is_some() {
        return f64::INFINITY;
    }
    identical
        .iter()
        .map(|&(w, c)| c.finite().map_or(f64::INFINITY, |l| w as f64 * l as f64))
        .sum()
}

/// β̄ with [`identical_value_constraint`] equal to `value_mean`.
///
/// The returned `norm` is the joint normalization Π_ī 𝒩_ī of the listed
/// species (the ladder is excluded; see [`bitcoin::ln_zero_value_probability`]).
pub fn solve_betabar(identical: &[(u64, Cutoff)], value_mean: f64) -> Result<GentileParams> {
    solve_betabar_with_ladder(identical, None, value_mean)
}

pub fn solve_betabar_with_ladder(
    identical: &[(u64, Cutoff)],
    ladder: Option<u64>,
    value_mean: f64,
) -> Result<GentileParams> {
    if identical.is_empty() && ladder.is_none() {
        return Err(Error::invalid("species", "the identical sector is empty"));
    }
    for (i, &(w, c)) in identical.iter().enumerate() {
        if w == 0 {
            return Err(Error::invalid("weight", "w must be at least 1").at_species(i));
        }
        c.check().map_err(|e| e.at_species(i))?;
    }
    let sup = identical_value_supremum(identical, ladder);
    if !(value_mean.is_finite() && value_mean > 0.0 && value_mean < sup) {
        return Err(Error::Unattainable {
            name: "value_mean",
            target: value_mean,
            lo: 0.0,
            hi: sup,
        });
    }
    let domain = if sup.is_infinite() { Domain::Positive } else { Domain::Real };
    let betabar = roots::solve_decreasing(
        |b| identical_value_constraint(identical, ladder, b),
        |b| identical_value_constraint_derivative(identical, ladder, b),
        value_mean,
        domain,
    )?;
    let ln_norm: f64 = identical
        .iter()
        .map(|&(w, c)| -ln_geometric_sum(betabar * w as f64, c.finite()))
        .sum();
    Ok(GentileParams {
        beta: betabar,
        norm: ln_norm.exp(),
    })
}

/// Solves every multiplier of `sys`. Errors are labeled with the species index.
pub fn solve_system(mut sys: WealthSystem) -> Result<WealthSystem> {
    let mut betas = Vec::with_capacity(sys.species.len());
    for (i, s) in sys.species.iter().enumerate() {
        betas.push(match s.class {
            SpeciesClass::Distinguishable => {
                let m = s.target_mean.expect("validated");
                Some(solve_beta_distinguishable(m, s.cutoff).map_err(|e| e.at_species(i))?)
            }
            SpeciesClass::Identical => None,
        });
    }
    let betabar = if sys.has_identical_sector() {
        Some(solve_betabar_with_ladder(&sys.identical_parts(), sys.ladder, sys.value_mean)?.beta)
    } else if sys.value_mean > 0.0 {
        return Err(Error::Unattainable {
            name: "value_mean",
            target: sys.value_mean,
            lo: 0.0,
            hi: 0.0,
        });
    } else {
        None
    };
    sys.solved = Some(Multipliers { betas, betabar });
    Ok(sys)
}
