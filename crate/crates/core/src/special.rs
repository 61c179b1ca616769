//! Small numeric helpers shared by the distribution modules.

pub(crate) use statrs::function::factorial::ln_factorial;
pub(crate) use statrs::function::gamma::{gamma_ur, ln_gamma};

/// ln Σ exp(x_i), stable for large magnitudes. Returns -inf for an empty input.
pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

/// ln(e^a + e^b).
pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// ln Σ_{k=0}^{cutoff} e^{-c k}, for any real `c` (c = +inf gives 0).
/// `cutoff = None` means an infinite sum and requires c > 0.
pub(crate) fn ln_geometric_sum(c: f64, cutoff: Option<u64>) -> f64 {
    match cutoff {
        None => -(-(-c).exp_m1()).ln(),
        Some(l) => {
            let terms = (l as f64) + 1.0;
            if c == 0.0 {
                terms.ln()
            } else if c > 0.0 {
                (-(-c * terms).exp_m1()).ln() - (-(-c).exp_m1()).ln()
            } else {
                // Reflect k -> L - k so the exponent stays non-positive.
                -c * (l as f64) + ln_geometric_sum(-c, cutoff)
            }
        }
    }
}

/// 1/(e^x - 1) - (L+1)/(e^{(L+1)x} - 1): the mean of a geometric law
/// e^{-xk} restricted to 0..=L. Uses a Bernoulli series when (L+1)|x| is small.
pub(crate) fn truncated_geometric_mean_raw(x: f64, cutoff: Option<u64>) -> f64 {
    match cutoff {
        None => 1.0 / x.exp_m1(),
        Some(l) => {
            let lf = l as f64;
            if x < 0.0 {
                return lf - truncated_geometric_mean_raw(-x, cutoff);
            }
            let a = lf + 1.0;
            if a * x < 1e-2 {
                let a2 = a * a;
                lf / 2.0 - x * (a2 - 1.0) / 12.0 + x.powi(3) * (a2 * a2 - 1.0) / 720.0
                    - x.powi(5) * (a2 * a2 * a2 - 1.0) / 30240.0
            } else {
                1.0 / x.exp_m1() - a / (a * x).exp_m1()
            }
        }
    }
}

/// Variance companion of [`truncated_geometric_mean_raw`].
pub(crate) fn truncated_geometric_variance_raw(x: f64, cutoff: Option<u64>) -> f64 {
    let inv_sinh2 = |y: f64| {
        let s = (y / 2.0).sinh();
        1.0 / (4.0 * s * s)
    };
    match cutoff {
        None => inv_sinh2(x),
        Some(l) => {
            let x = x.abs();
            let a = l as f64 + 1.0;
            if a * x < 1e-2 {
                let a2 = a * a;
                (a2 - 1.0) / 12.0 - x * x * (a2 * a2 - 1.0) / 240.0
                    + x.powi(4) * (a2 * a2 * a2 - 1.0) / 6048.0
            } else {
                inv_sinh2(x) - a * a * inv_sinh2(a * x)
            }
        }
    }
}
