//! Exact Clopper-Pearson binomial confidence intervals via Beta quantiles.

use statrs::distribution::{Beta, ContinuousCDF};

/// Two-sided Clopper-Pearson interval for `successes` out of `trials` at the
/// given confidence level. The boundary cases pin the interval ends at 0/1.
pub fn clopper_pearson(successes: usize, trials: usize, confidence: f64) -> (f64, f64) {
    assert!(trials >= 1 && successes <= trials);
    assert!(confidence > 0.0 && confidence < 1.0);
    let alpha = 1.0 - confidence;
    let (k, n) = (successes as f64, trials as f64);
    let lower = if successes == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0).expect("valid Beta").inverse_cdf(alpha / 2.0)
    };
    let upper = if successes == trials {
        1.0
    } else {
        Beta::new(k + 1.0, n - k).expect("valid Beta").inverse_cdf(1.0 - alpha / 2.0)
    };
    (lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent quantile oracle: bisect the Beta CDF computed by adaptive
    /// Simpson quadrature of the density (no use of statrs' inversion).
    fn beta_quantile_oracle(a: f64, b: f64, p: f64) -> f64 {
        let ln_beta = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
        let pdf = |x: f64| {
            if x <= 0.0 || x >= 1.0 {
                0.0
            } else {
                ((a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln() - ln_beta).exp()
            }
        };
        let cdf = |x: f64| simpson(&pdf, 0.0, x, 20_000);
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = (lo + hi) / 2.0;
            if cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo + hi) / 2.0
    }

    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    fn ln_gamma(x: f64) -> f64 {
        // Lanczos approximation, g = 7
        const C: [f64; 9] = [
            0.99999999999980993,
            676.5203681218851,
            -1259.1392167224028,
            771.32342877765313,
            -176.61502916214059,
            12.507343278686905,
            -0.13857109526572012,
            9.9843695780195716e-6,
            1.5056327351493116e-7,
        ];
        if x < 0.5 {
            let pi = std::f64::consts::PI;
            return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
        }
        let x = x - 1.0;
        let mut acc = C[0];
        for (i, c) in C.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + 7.5;
        0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
    }

    #[test]
    fn zero_successes_has_lower_bound_zero() {
        let (lo, hi) = clopper_pearson(0, 50, 0.95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
        let (lo, hi) = clopper_pearson(50, 50, 0.95);
        assert_eq!(hi, 1.0);
        assert!(lo > 0.9);
    }

    #[test]
    fn interval_matches_direct_beta_inversion() {
        let (lo, hi) = clopper_pearson(50, 100, 0.95);
        let lo_oracle = beta_quantile_oracle(50.0, 51.0, 0.025);
        let hi_oracle = beta_quantile_oracle(51.0, 50.0, 0.975);
        assert!((lo - lo_oracle).abs() < 1e-6, "{lo} vs {lo_oracle}");
        assert!((hi - hi_oracle).abs() < 1e-6, "{hi} vs {hi_oracle}");
        // textbook sanity: interval brackets the point estimate
        assert!(lo < 0.5 && 0.5 < hi);
    }

    #[test]
    fn interval_matches_oracle_on_asymmetric_counts() {
        for &(k, n) in &[(3usize, 20usize), (17, 20), (1, 200)] {
            let (lo, hi) = clopper_pearson(k, n, 0.95);
            let lo_o = if k == 0 { 0.0 } else { beta_quantile_oracle(k as f64, (n - k + 1) as f64, 0.025) };
            let hi_o = if k == n { 1.0 } else { beta_quantile_oracle((k + 1) as f64, (n - k) as f64, 0.975) };
            assert!((lo - lo_o).abs() < 1e-6, "k={k} n={n}: {lo} vs {lo_o}");
            assert!((hi - hi_o).abs() < 1e-6, "k={k} n={n}: {hi} vs {hi_o}");
        }
    }
}
