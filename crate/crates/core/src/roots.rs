//! Scalar root finding for the strictly decreasing constraint functions.
//!
//! Every constraint here has the form `g(x) = target` with `g` smooth and
//! strictly decreasing, so a sign change is guaranteed once the bracket is
//! wide enough. Bisection finds the root, Newton polishes the last digits.

use crate::error::{Error, Result};

const MAX_EXPANSIONS: usize = 400;
const MAX_BISECTIONS: usize = 400;
const EXPANSION_FACTOR: f64 = 8.0;

/// Where the unknown may live.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// x > 0 (e.g. β̄ with an infinite cutoff).
    Positive,
    /// Any real x.
    Real,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Expands `[1e-12, 1]` geometrically (×8) until `g(lo) >= target >= g(hi)`.
///
/// With [`Domain::Real`] the lower end jumps to -1 and then grows by ×8 in
/// magnitude.
pub fn bracket_decreasing<G>(g: G, target: f64, domain: Domain) -> Result<Bracket>
where
    G: Fn(f64) -> f64,
{
    let mut lo = 1e-12;
    let mut hi = 1.0;
    let mut steps = 0;
    while g(hi) > target {
        lo = hi;
        hi *= EXPANSION_FACTOR;
        steps += 1;
        if steps > MAX_EXPANSIONS || !hi.is_finite() {
            return Err(Error::NonConvergence { lo, hi, iterations: steps });
        }
    }
    while g(lo) < target {
        hi = lo;
        lo = match domain {
            Domain::Positive => lo / EXPANSION_FACTOR,
            Domain::Real if lo > 0.0 => -1.0,
            Domain::Real => lo * EXPANSION_FACTOR,
        };
        steps += 1;
        if steps > MAX_EXPANSIONS || lo == 0.0 || !lo.is_finite() {
            return Err(Error::NonConvergence { lo, hi, iterations: steps });
        }
    }
    Ok(Bracket { lo, hi })
}

/// Bisection down to adjacent floating-point values (or an exact hit).
pub fn bisect_decreasing<G>(g: G, target: f64, bracket: Bracket) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let Bracket { mut lo, mut hi } = bracket;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let v = g(mid);
        if v == target {
            return Ok(mid);
        }
        if v > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence {
        lo,
        hi,
        iterations: MAX_BISECTIONS,
    })
}

/// Plain Newton iteration on `g(x) - target` from `x0`.
///
/// Steps that leave `bracket` (when given) are replaced by a bisection of the
/// current bracket, so the iteration cannot escape a known sign change.
pub fn newton<G, D>(
    g: G,
    dg: D,
    target: f64,
    x0: f64,
    bracket: Option<Bracket>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<f64>
where
    G: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut x = x0;
    let mut br = bracket;
    for _ in 0..max_iter {
        let r = g(x) - target;
        if r == 0.0 {
            return Ok(x);
        }
        if let Some(b) = br.as_mut() {
            if r > 0.0 {
                b.lo = x;
            } else {
                b.hi = x;
            }
        }
        let d = dg(x);
        let mut next = x - r / d;
        if !next.is_finite() || d == 0.0 {
            match br {
                Some(b) => next = b.midpoint(),
                None => {
                    return Err(Error::NonConvergence {
                        lo: x,
                        hi: x,
                        iterations: max_iter,
                    })
                }
            }
        }
        if let Some(b) = br {
            if next <= b.lo || next >= b.hi {
                next = b.midpoint();
            }
        }
        if (next - x).abs() <= rel_tol * x.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        x = next;
    }
    let (lo, hi) = br.map_or((x, x), |b| (b.lo, b.hi));
    Err(Error::NonConvergence {
        lo,
        hi,
        iterations: max_iter,
    })
}

/// Bracket, bisect, then polish with a few Newton steps. The polished value
/// is kept only when it does not increase the residual.
pub fn solve_decreasing<G, D>(g: G, dg: D, target: f64, domain: Domain) -> Result<f64>
where
    G: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let bracket = bracket_decreasing(&g, target, domain)?;
    let root = bisect_decreasing(&g, target, bracket)?;
    let polished = newton(&g, &dg, target, root, None, 1e-15, 4).unwrap_or(root);
    if polished.is_finite() && (g(polished) - target).abs() <= (g(root) - target).abs() {
        Ok(polished)
    } else {
        Ok(root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brackets_and_bisects_a_positive_root() {
        let g = |x: f64| 1.0 / x.exp_m1();
        let root = solve_decreasing(g, |x| -x.exp() / x.exp_m1().powi(2), 1.0, Domain::Positive)
            .unwrap();
        assert!((root - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn real_domain_reaches_negative_roots() {
        let g = |x: f64| -x;
        let b = bracket_decreasing(g, 100.0, Domain::Real).unwrap();
        assert!(b.lo <= -100.0 && b.hi >= -100.0);
        let r = bisect_decreasing(g, 100.0, b).unwrap();
        assert!((r + 100.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_positive_target_fails_with_bracket() {
        // g is bounded above by 1, so target 2 has no root.
        let g = |x: f64| (-x).exp();
        let err = bracket_decreasing(g, 2.0, Domain::Positive).unwrap_err();
        assert!(err.is_non_convergence());
    }

    #[test]
    fn newton_respects_bracket() {
        let g = |x: f64| -x.powi(3);
        let r = newton(
            g,
            |x| -3.0 * x * x,
            -8.0,
            0.1,
            Some(Bracket { lo: 0.0, hi: 10.0 }),
            1e-14,
            200,
        )
        .unwrap();
        assert!((r - 2.0).abs() < 1e-12);
    }
}
