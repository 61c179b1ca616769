//! Monte Carlo allocation samplers and exhaustive Ω maximization on small
//! instances, used as independent checks of the analytic laws.

pub use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dist::{AtomicKind, Cutoff, Pmf, SpeciesClass, SpeciesSpec};
use crate::error::{Error, Result};

/// Largest N and M accepted by [`enumerate_extremum`].
pub const MAX_ENUMERATION: u64 = 12;

/// Seed plus stream id of a ChaCha8 generator. Equal pairs give identical
/// sequences; distinct stream ids give independent sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// One allocation of M units among N owners.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationSample {
    ownership: Vec<u64>,
    occupancy: Vec<u64>,
}

impl AllocationSample {
    /// Builds the occupancy `n_k` from per-owner counts.
    pub fn from_ownership(ownership: Vec<u64>) -> Result<Self> {
        if ownership.is_empty() {
            return Err(Error::invalid("ownership", "at least one owner is required"));
        }
        let max = *ownership.iter().max().expect("non-empty") as usize;
        let mut occupancy = vec![0u64; max + 1];
        for &k in &ownership {
            occupancy[k as usize] += 1;
        }
        Ok(AllocationSample { ownership, occupancy })
    }

    pub fn ownership(&self) -> &[u64] {
        &self.ownership
    }

    /// `n_k`, indexed by k up to the largest holding.
    pub fn occupancy(&self) -> &[u64] {
        &self.occupancy
    }

    pub fn owners(&self) -> u64 {
        self.ownership.len() as u64
    }

    pub fn units(&self) -> u64 {
        self.ownership.iter().sum()
    }
}

fn check_owners(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("N", "at least one owner is required"));
    }
    Ok(())
}

/// Each of M labelled units goes to a uniformly random owner.
pub fn sample_distinguishable(m_total: u64, n: u64, rng: RngStream) -> Result<AllocationSample> {
    check_owners(n)?;
    let mut r = rng.rng();
    let mut own = vec![0u64; n as usize];
    for _ in 0..m_total {
        own[r.random_range(0..n) as usize] += 1;
    }
    AllocationSample::from_ownership(own)
}

/// Uniform weak composition of M into N parts: a uniform (N-1)-subset of
/// M+N-1 slots marks the bars, drawn by sequential selection sampling.
pub fn sample_identical_bosonic(m_total: u64, n: u64, rng: RngStream) -> Result<AllocationSample> {
    check_owners(n)?;
    let mut r = rng.rng();
    let mut own = vec![0u64; n as usize];
    let mut slots = m_total + n - 1;
    let mut bars = n - 1;
    let mut owner = 0usize;
    while slots > 0 {
        if bars > 0 && r.random_range(0..slots) < bars {
            bars -= 1;
            owner += 1;
        } else {
            own[owner] += 1;
        }
        slots -= 1;
    }
    AllocationSample::from_ownership(own)
}

/// A uniform M-subset of the owners holds one unit each.
pub fn sample_identical_fermionic(m_total: u64, n: u64, rng: RngStream) -> Result<AllocationSample> {
    check_owners(n)?;
    if m_total > n {
        return Err(Error::invalid("M", format!("M = {m_total} exceeds N = {n}")));
    }
    let mut r = rng.rng();
    let mut need = m_total;
    let own = (0..n)
        .map(|i| {
            let left = n - i;
            if need > 0 && r.random_range(0..left) < need {
                need -= 1;
                1
            } else {
                0
            }
        })
        .collect();
    AllocationSample::from_ownership(own)
}

/// Draws one sample; `Poisson` selects the distinguishable sampler.
pub fn sample(kind: AtomicKind, m_total: u64, n: u64, rng: RngStream) -> Result<AllocationSample> {
    match kind {
        AtomicKind::Poisson => sample_distinguishable(m_total, n, rng),
        AtomicKind::Bosonic => sample_identical_bosonic(m_total, n, rng),
        AtomicKind::Fermionic => sample_identical_fermionic(m_total, n, rng),
    }
}

/// Averaged `n_k / N` over the samples.
pub fn empirical_occupancy(samples: &[AllocationSample]) -> Result<Pmf> {
    let first = samples
        .first()
        .ok_or_else(|| Error::invalid("samples", "at least one sample is required"))?;
    let n = first.owners();
    let mut counts: Vec<u64> = Vec::new();
    for s in samples {
        if s.owners() != n {
            return Err(Error::Inconsistent(format!(
                "samples mix N = {n} and N = {}",
                s.owners()
            )));
        }
        add_counts(&mut counts, s.occupancy());
    }
    counts_to_pmf(&counts)
}

fn add_counts(acc: &mut Vec<u64>, occ: &[u64]) {
    if acc.len() < occ.len() {
        acc.resize(occ.len(), 0);
    }
    for (a, &c) in acc.iter_mut().zip(occ) {
        *a += c;
    }
}

fn counts_to_pmf(counts: &[u64]) -> Result<Pmf> {
    let total: u64 = counts.iter().sum();
    let probs = counts.iter().map(|&c| c as f64 / total as f64).collect();
    Pmf::new(probs, 0.0)
}

/// Empirical occupancy of `count` samples drawn in parallel. Sample i uses
/// stream `first_stream + i`, and integer occupancy counts are summed, so the
/// result does not depend on the thread count.
pub fn sample_occupancy(
    kind: AtomicKind,
    m_total: u64,
    n: u64,
    count: u64,
    seed: u64,
    first_stream: u64,
) -> Result<Pmf> {
    if count == 0 {
        return Err(Error::invalid("samples", "at least one sample is required"));
    }
    let counts = (0..count)
        .into_par_iter()
        .map(|i| sample(kind, m_total, n, RngStream::new(seed, first_stream + i)))
        .try_fold(Vec::new, |mut acc, s| {
            add_counts(&mut acc, s?.occupancy());
            Ok::<_, Error>(acc)
        })
        .try_reduce(Vec::new, |mut a, b| {
            add_counts(&mut a, &b);
            Ok(a)
        })?;
    counts_to_pmf(&counts)
}

/// Total amount fixed by the enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    /// Total number of units M.
    Count(u64),
    /// Total value V; with unit weight w this fixes M = V / w.
    Value(u64),
}

/// One occupancy `{n_k}` with its configuration count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occupancy {
    /// `n_k` for k = 0..=M.
    pub counts: Vec<u64>,
    pub omega: BigUint,
}

impl Occupancy {
    pub fn mode(&self) -> usize {
        let max = *self.counts.iter().max().expect("non-empty");
        self.counts.iter().position(|&c| c == max).expect("max exists")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extremum {
    /// Every admissible occupancy.
    pub occupancies: Vec<Occupancy>,
    /// Indices into `occupancies` attaining the maximum Ω; ties are all kept.
    pub maximizers: Vec<usize>,
    /// Σ Ω over all occupancies.
    pub total: BigUint,
}

impl Extremum {
    pub fn max_omega(&self) -> &BigUint {
        &self.occupancies[self.maximizers[0]].omega
    }

    pub fn maximizing(&self) -> impl Iterator<Item = &Occupancy> {
        self.maximizers.iter().map(|&i| &self.occupancies[i])
    }
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// Ω = Υ·Φ with `Υ = N! / Π n_k!` and, for distinguishable units,
/// `Φ = M! / Π (k!)^{n_k}` (Φ = 1 for identical units).
pub fn omega(counts: &[u64], class: SpeciesClass) -> BigUint {
    let n: u64 = counts.iter().sum();
    let mut upsilon = factorial(n);
    for &c in counts {
        upsilon /= factorial(c);
    }
    match class {
        SpeciesClass::Identical => upsilon,
        SpeciesClass::Distinguishable => {
            let m: u64 = counts.iter().enumerate().map(|(k, &c)| k as u64 * c).sum();
            let mut phi = factorial(m);
            for (k, &c) in counts.iter().enumerate() {
                phi /= factorial(k as u64).pow(c as u32);
            }
            upsilon * phi
        }
    }
}

/// Enumerates every occupancy with `Σ n_k = N`, `Σ k n_k = M` and `k <= Λ`,
/// computes Ω exactly, and returns the maximizers.
pub fn enumerate_extremum(n: u64, species: &SpeciesSpec, constraint: Constraint) -> Result<Extremum> {
    check_owners(n)?;
    let m_total = match constraint {
        Constraint::Count(m) => m,
        Constraint::Value(v) => {
            if species.weight == 0 || v % species.weight != 0 {
                return Err(Error::invalid(
                    "V",
                    format!("value {v} is not a multiple of the unit weight {}", species.weight),
                ));
            }
            v / species.weight
        }
    };
    if n > MAX_ENUMERATION || m_total > MAX_ENUMERATION {
        return Err(Error::TooLarge(format!(
            "exhaustive enumeration needs N, M <= {MAX_ENUMERATION}, got N = {n}, M = {m_total}"
        )));
    }
    let cap = match species.cutoff {
        Cutoff::Finite(l) => l.min(m_total),
        Cutoff::Infinite => m_total,
    };
    // partitions of M into at most N parts no larger than cap
    let mut parts_list = Vec::new();
    let mut current = Vec::new();
    partitions(m_total, cap, n, &mut current, &mut parts_list);
    if parts_list.is_empty() {
        return Err(Error::Inconsistent(format!(
            "no occupancy places M = {m_total} among N = {n} owners with cutoff {}",
            species.cutoff
        )));
    }
    let occupancies: Vec<Occupancy> = parts_list
        .into_iter()
        .map(|parts| {
            let mut counts = vec![0u64; m_total as usize + 1];
            counts[0] = n - parts.len() as u64;
            for p in parts {
                counts[p as usize] += 1;
            }
            let omega = omega(&counts, species.class);
            Occupancy { counts, omega }
        })
        .collect();
    let best = occupancies.iter().map(|o| &o.omega).max().expect("non-empty").clone();
    let maximizers = (0..occupancies.len()).filter(|&i| occupancies[i].omega == best).collect();
    let total = occupancies.iter().fold(BigUint::zero(), |acc, o| acc + &o.omega);
    Ok(Extremum {
        occupancies,
        maximizers,
        total,
    })
}

fn partitions(rest: u64, max_part: u64, slots: u64, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if rest == 0 {
        out.push(current.clone());
        return;
    }
    if slots == 0 {
        return;
    }
    for p in (1..=max_part.min(rest)).rev() {
        current.push(p);
        partitions(rest - p, p, slots - 1, current, out);
        current.pop();
    }
}
