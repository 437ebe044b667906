//! Chi-squared CDF through the regularized incomplete gamma function, and the
//! Kolmogorov-Smirnov distance.

const MAX_ITER: usize = 1000;
const FPMIN: f64 = 1.0e-300;

/// Regularized lower incomplete gamma `P(a, x)`, `a > 0`.
///
/// Series expansion for `x < a + 1`, Lentz continued fraction for the upper
/// tail otherwise.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x.is_nan() || a.is_nan() || a <= 0.0 {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    let log_prefix = -x + a * libm::log(x) - libm::lgamma(a);
    if x < a + 1.0 {
        let mut ap = a;
        let mut del = 1.0 / a;
        let mut sum = del;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * f64::EPSILON {
                break;
            }
        }
        (sum * libm::exp(log_prefix)).min(1.0)
    } else {
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / FPMIN;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < FPMIN {
                d = FPMIN;
            }
            c = b + an / c;
            if c.abs() < FPMIN {
                c = FPMIN;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < f64::EPSILON {
                break;
            }
        }
        (1.0 - libm::exp(log_prefix) * h).max(0.0)
    }
}

/// CDF of the chi-squared distribution with `df` degrees of freedom. `df = 0`
/// is the point mass at zero.
pub fn chi2_cdf(df: usize, x: f64) -> f64 {
    if df == 0 {
        return if x >= 0.0 { 1.0 } else { 0.0 };
    }
    gamma_p(df as f64 / 2.0, x / 2.0)
}

/// `sup |F_n - F|` for the empirical CDF of `samples`. Sorts in place.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}
