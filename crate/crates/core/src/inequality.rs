//! Inequality measures: Lorenz curves, Gini coefficients, Shannon entropy
//! and the share of owners above the mean.

use std::f64::consts::PI;

use crate::dist::{self, AtomicKind, Pmf};
use crate::error::{Error, Result};
use crate::roots::{self, Bracket};
use crate::special::gamma_ur;

/// Largest truncated tail a pmf may carry before a Gini/Lorenz evaluation.
pub const MAX_TRUNCATION_FOR_GINI: f64 = 1e-9;

/// Lorenz curve as breakpoints `(x, y)`: `x` is the population share (poorest
/// first), `y` the share of wealth they hold.
#[derive(Debug, Clone, PartialEq)]
pub struct LorenzCurve {
    points: Vec<(f64, f64)>,
    gini: f64,
}

impl LorenzCurve {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// `1 - 2 ∫ y dx` with the trapezoid rule on the breakpoints.
    pub fn gini(&self) -> f64 {
        self.gini
    }

    /// Piecewise-linear interpolation between breakpoints.
    pub fn y_at(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let i = self.points.partition_point(|p| p.0 < x);
        if i == 0 {
            return self.points[0].1;
        }
        if i >= self.points.len() {
            return 1.0;
        }
        let (x0, y0) = self.points[i - 1];
        let (x1, y1) = self.points[i];
        if x1 == x0 {
            return y1;
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    fn from_points(points: Vec<(f64, f64)>) -> Self {
        let area: f64 = points
            .windows(2)
            .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
            .sum();
        LorenzCurve {
            points,
            gini: (1.0 - 2.0 * area).clamp(0.0, 1.0),
        }
    }
}

fn check_gini_input(pmf: &Pmf) -> Result<f64> {
    if pmf.truncation_mass() >= MAX_TRUNCATION_FOR_GINI {
        return Err(Error::invalid(
            "pmf",
            format!(
                "truncation mass {} is not below {MAX_TRUNCATION_FOR_GINI}",
                pmf.truncation_mass()
            ),
        ));
    }
    let mean = pmf.mean();
    if !(mean > 0.0) {
        return Err(Error::invalid("pmf", "the mean must be positive"));
    }
    Ok(mean)
}

/// Lorenz curve through `x_k = Σ_{j≤k} P(j)`, `y_k = Σ_{j≤k} j P(j) / m`,
/// starting at (0,0). The first segment `[0, P(0)]` is flat.
/// Zero-probability cells add no breakpoint.
pub fn lorenz_from_pmf(pmf: &Pmf) -> Result<LorenzCurve> {
    check_gini_input(pmf)?;
    let total = pmf.total_mass();
    let first_moment: f64 = pmf.mean();
    let mut points = vec![(0.0, 0.0)];
    let (mut cx, mut cy) = (0.0, 0.0);
    for (k, &p) in pmf.probs().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        cx += p;
        cy += k as f64 * p;
        let x = (cx / total).min(1.0);
        let y = (cy / first_moment).min(x);
        points.push((x, y));
    }
    *points.last_mut().expect("non-empty support") = (1.0, 1.0);
    Ok(LorenzCurve::from_points(points))
}

fn check_mean(m: f64) -> Result<()> {
    if !(m.is_finite() && m >= 0.0) {
        return Err(Error::invalid("m", format!("must be finite and >= 0, got {m}")));
    }
    Ok(())
}

/// Analytic Lorenz curve of the Bose–Einstein law:
/// `y = x + (1-x) ln(1-x) / (m ln(1+1/m))` for `x >= 1/(m+1)`, else 0.
///
/// At `x = 1` the logarithm is singular; the limit 1 is returned.
pub fn lorenz_geometric_analytic(m: f64, x: f64) -> Result<f64> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::invalid("m", format!("must be finite and > 0, got {m}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid("x", format!("must lie in [0, 1], got {x}")));
    }
    if x >= 1.0 {
        return Ok(1.0);
    }
    if x <= 1.0 / (m + 1.0) {
        return Ok(0.0);
    }
    let y = x + (1.0 - x) * (-x).ln_1p() / (m * (1.0 / m).ln_1p());
    Ok(y.clamp(0.0, x))
}

/// Continuous-k Lorenz curve of the Poisson law: `x(k) = Q(k+1, m)`,
/// `y(k) = Q(k, m)` with Q the regularized upper incomplete gamma function.
/// It passes through every breakpoint of [`lorenz_from_pmf`] and interpolates
/// between them the same way the analytic geometric curve does.
pub fn lorenz_poisson_continuous(m: f64, x: f64) -> Result<f64> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::invalid("m", format!("must be finite and > 0, got {m}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid("x", format!("must lie in [0, 1], got {x}")));
    }
    if x <= (-m).exp() {
        return Ok(0.0);
    }
    let k_hi = m + 40.0 * m.sqrt() + 40.0;
    let x_of = |k: f64| gamma_ur(k + 1.0, m);
    if x >= x_of(k_hi) {
        return Ok(1.0);
    }
    let k = roots::bisect_decreasing(|k| -x_of(k), -x, Bracket { lo: 0.0, hi: k_hi })?;
    if k < 1e-12 {
        return Ok(0.0);
    }
    Ok(gamma_ur(k, m).min(x))
}

/// Gini coefficient by the single-pass form
/// `1 + (1/m) Σ_k P(k) [k P(k) - 2 Σ_{k'≤k} k' P(k')]`
/// of the mean-difference double sum.
pub fn gini_from_pmf(pmf: &Pmf) -> Result<f64> {
    let mean = check_gini_input(pmf)?;
    let mut cumulative = 0.0;
    let mut acc = 0.0;
    for (k, &p) in pmf.probs().iter().enumerate() {
        let kp = k as f64 * p;
        cumulative += kp;
        acc += p * (kp - 2.0 * cumulative);
    }
    Ok((1.0 + acc / mean).clamp(0.0, 1.0))
}

/// Direct O(K²) mean-difference Gini, `Σ Σ |k - k'| P(k) P(k') / (2m)`.
pub fn gini_double_sum(pmf: &Pmf) -> Result<f64> {
    let mean = check_gini_input(pmf)?;
    let p = pmf.probs();
    let mut s = 0.0;
    for (i, pi) in p.iter().enumerate() {
        for (j, pj) in p.iter().enumerate() {
            s += (i as f64 - j as f64).abs() * pi * pj;
        }
    }
    Ok(s / (2.0 * mean))
}

/// Poisson Gini `(1/π) ∫_0^π e^{-2m(1-cos θ)} (1 + cos θ) dθ`, by composite
/// Simpson with Richardson extrapolation until successive estimates differ by
/// less than 1e-9.
pub fn gini_poisson(m: f64) -> Result<f64> {
    check_mean(m)?;
    // 1 - cos θ = 2 sin²(θ/2)
    let f = |t: f64| (-4.0 * m * (0.5 * t).sin().powi(2)).exp() * (1.0 + t.cos());
    let simpson = |n: usize| {
        let h = PI / n as f64;
        let mut s = f(0.0) + f(PI);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        s * h / 3.0
    };
    // resolve the peak of width ~1/√m at θ = 0 before trusting convergence
    let min_panels = (16.0 * (m.sqrt() + 1.0)).ceil() as usize;
    let mut n = 8;
    let mut coarse = simpson(n);
    let mut prev: Option<f64> = None;
    while n < (1 << 26) {
        n *= 2;
        let fine = simpson(n);
        let extrapolated = fine + (fine - coarse) / 15.0;
        if let Some(p) = prev {
            if n >= min_panels && (extrapolated - p).abs() < 1e-9 {
                return Ok((extrapolated / PI).clamp(0.0, 1.0));
            }
        }
        prev = Some(extrapolated);
        coarse = fine;
    }
    Err(Error::NonConvergence {
        lo: 0.0,
        hi: PI,
        iterations: n,
    })
}

/// `(1+m)/(1+2m)`.
pub fn gini_bosonic(m: f64) -> Result<f64> {
    check_mean(m)?;
    Ok((1.0 + m) / (1.0 + 2.0 * m))
}

/// `1 - m`, for `0 <= m <= 1`.
pub fn gini_fermionic(m: f64) -> Result<f64> {
    check_mean(m)?;
    if m > 1.0 {
        return Err(Error::invalid("m", format!("a fermionic mean cannot exceed 1, got {m}")));
    }
    Ok(1.0 - m)
}

/// Gini of the analytic geometric Lorenz curve,
/// `(m/(m+1))² (1/(2m ln(1+1/m)) + 1/m + 1/m²)`.
pub fn gini_bosonic_lorenz(m: f64) -> Result<f64> {
    check_mean(m)?;
    if m == 0.0 {
        return Ok(1.0);
    }
    let r = m / (m + 1.0);
    Ok(r * r * (1.0 / (2.0 * m * (1.0 / m).ln_1p()) + 1.0 / m + 1.0 / (m * m)))
}

/// `Σ -p ln p` over the represented cells.
pub fn shannon_entropy(pmf: &Pmf) -> f64 {
    pmf.probs().iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
}

/// Maximal entropy at mean m, attained by the geometric law:
/// `(m+1) ln(m+1) - m ln m`.
pub fn entropy_bosonic(m: f64) -> f64 {
    if m == 0.0 {
        return 0.0;
    }
    (m + 1.0) * m.ln_1p() - m * m.ln()
}

/// Two-term large-m expansion `½ ln(2πem) - 1/(12m)` of the Poisson entropy.
pub fn entropy_poisson_asymptotic(m: f64) -> f64 {
    0.5 * (2.0 * PI * std::f64::consts::E * m).ln() - 1.0 / (12.0 * m)
}

/// `Σ_{k>m} P(k)`: the share of owners holding more than the mean.
/// Summation starts at `floor(m) + 1`.
pub fn tail_mass_above_mean(kind: AtomicKind, m: f64) -> Result<f64> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::invalid("m", format!("must be finite and > 0, got {m}")));
    }
    let first = m.floor() as u64 + 1;
    match kind {
        AtomicKind::Poisson => {
            let pmf = dist::poisson(m, 1e-17)?;
            // small cells first
            Ok(pmf.probs().iter().skip(first as usize).rev().sum())
        }
        AtomicKind::Bosonic => Ok((-(first as f64) * (1.0 / m).ln_1p()).exp()),
        AtomicKind::Fermionic => match first {
            1 => Ok(m),
            _ if m <= 1.0 => Ok(0.0),
            _ => Err(Error::invalid("m", "a fermionic mean cannot exceed 1")),
        },
    }
}

/// The mean m at which the Lorenz curve passes through (0.8, 0.2).
pub fn pareto_8020_mean(kind: AtomicKind) -> Result<f64> {
    let y_at_80 = |m: f64| -> f64 {
        match kind {
            AtomicKind::Poisson => lorenz_poisson_continuous(m, 0.8).unwrap_or(f64::NAN),
            AtomicKind::Bosonic => lorenz_geometric_analytic(m, 0.8).unwrap_or(f64::NAN),
            AtomicKind::Fermionic => {
                if m <= 0.2 {
                    0.0
                } else {
                    (m - 0.2) / m
                }
            }
        }
    };
    let bracket = Bracket { lo: 1e-3, hi: 20.0 };
    let root = roots::bisect_decreasing(|m| -y_at_80(m), -0.2, bracket)?;
    if kind == AtomicKind::Fermionic && root > 1.0 {
        return Err(Error::Inconsistent("no fermionic 80/20 point".into()));
    }
    Ok(root)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_curve_is_the_diagonal() {
        let c = lorenz_from_pmf(&Pmf::delta(3)).unwrap();
        assert_eq!(c.points(), &[(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(c.gini(), 0.0);
        assert_eq!(gini_from_pmf(&Pmf::delta(3)).unwrap(), 0.0);
    }

    #[test]
    fn bosonic_breakpoint() {
        let c = lorenz_from_pmf(&dist::bosonic(1.0, 1e-15).unwrap()).unwrap();
        // (0,0), k=0 -> (1/2, 0), k=1 -> (3/4, 1/4)
        assert_eq!(c.points()[1].1, 0.0);
        assert!((c.points()[1].0 - 0.5).abs() < 1e-15);
        assert!((c.points()[2].0 - 0.75).abs() < 1e-15);
        assert!((c.points()[2].1 - 0.25).abs() < 1e-13);
    }

    #[test]
    fn poisson_curve_near_8020() {
        let c = lorenz_from_pmf(&dist::poisson(0.35, 1e-15).unwrap()).unwrap();
        let y = lorenz_poisson_continuous(0.35, 0.8).unwrap();
        assert!((y - 0.2).abs() < 0.02);
        // breakpoints lie on the continuous curve
        for &(x, yk) in &c.points()[1..c.points().len() - 1] {
            assert!((lorenz_poisson_continuous(0.35, x).unwrap() - yk).abs() < 1e-9);
        }
    }

    #[test]
    fn analytic_geometric_values() {
        assert_eq!(lorenz_geometric_analytic(1.0, 0.5).unwrap(), 0.0);
        assert!((lorenz_geometric_analytic(1.0, 0.75).unwrap() - 0.25).abs() < 1e-15);
        assert!((lorenz_geometric_analytic(0.47, 0.8).unwrap() - 0.2).abs() < 0.005);
        assert_eq!(lorenz_geometric_analytic(1.0, 1.0).unwrap(), 1.0);
        assert!(lorenz_geometric_analytic(0.0, 0.5).is_err());
    }

    #[test]
    fn closed_form_ginis() {
        let f = dist::atomic_pmf(AtomicKind::Fermionic, 0.3, 0.0).unwrap();
        assert!((gini_from_pmf(&f).unwrap() - 0.7).abs() < 1e-15);
        assert!((gini_fermionic(0.3).unwrap() - 0.7).abs() < 1e-15);
        let b = dist::bosonic(1.0, 1e-16).unwrap();
        assert!((gini_from_pmf(&b).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((gini_bosonic(1e9).unwrap() - 0.5).abs() < 1e-9);
        assert!((gini_bosonic_lorenz(1.0).unwrap() - 0.6803).abs() < 5e-5);
        assert!(gini_fermionic(1.5).is_err());
    }

    #[test]
    fn poisson_gini_quadrature() {
        assert!((gini_poisson(0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((gini_poisson(1.0).unwrap() - 0.52).abs() < 0.005);
        assert!((gini_poisson(100.0).unwrap() - 0.056).abs() < 0.001);
    }

    #[test]
    fn gini_rejects_truncated_or_zero_mean() {
        assert!(gini_from_pmf(&Pmf::delta(0)).is_err());
        let coarse = dist::poisson(1.0, 1e-6).unwrap();
        assert!(gini_from_pmf(&coarse).is_err());
        assert!(lorenz_from_pmf(&coarse).is_err());
    }

    #[test]
    fn entropies() {
        assert!((entropy_bosonic(1.0) - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!((entropy_bosonic(1.0) - 1.386294).abs() < 1e-6);
        assert_eq!(shannon_entropy(&Pmf::delta(0)), 0.0);
        let p = dist::poisson(100.0, 1e-16).unwrap();
        assert!((shannon_entropy(&p) - entropy_poisson_asymptotic(100.0)).abs() < 1e-4);
    }

    #[test]
    fn tails() {
        assert!((tail_mass_above_mean(AtomicKind::Bosonic, 1.0).unwrap() - 0.25).abs() < 1e-15);
        let want = 1.0 - 2.0 * (-1f64).exp();
        assert!((tail_mass_above_mean(AtomicKind::Poisson, 1.0).unwrap() - want).abs() < 1e-14);
        assert!((tail_mass_above_mean(AtomicKind::Fermionic, 0.3).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn pareto_roots() {
        let p = pareto_8020_mean(AtomicKind::Poisson).unwrap();
        let b = pareto_8020_mean(AtomicKind::Bosonic).unwrap();
        assert!((p - 0.35).abs() < 0.02, "{p}");
        assert!((b - 0.47).abs() < 0.02, "{b}");
        assert!((lorenz_geometric_analytic(b, 0.8).unwrap() - 0.2).abs() < 1e-6);
        assert!((pareto_8020_mean(AtomicKind::Fermionic).unwrap() - 0.25).abs() < 1e-12);
    }
}
