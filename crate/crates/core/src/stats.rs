//! Interval estimates and Poisson comparisons.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials` at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials >= 1, "need at least one trial");
    assert!(successes <= trials, "more successes than trials");
    let m = trials as f64;
    let p = successes as f64 / m;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / m;
    let center = (p + z2 / (2.0 * m)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / m + z2 / (4.0 * m * m)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Binomial standard error of a proportion.
pub fn standard_error(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Poisson probabilities `P(X = 0..len)`.
pub fn poisson_pmf(lambda: f64, len: usize) -> Vec<f64> {
    assert!(lambda >= 0.0, "Poisson mean must be nonnegative");
    let mut out = Vec::with_capacity(len);
    let mut p = (-lambda).exp();
    for k in 0..len {
        out.push(p);
        p *= lambda / (k + 1) as f64;
    }
    out
}

/// Normalizes counts indexed by value into probabilities.
pub fn counts_to_pmf(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    assert!(total > 0, "empty histogram");
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// Total variation distance between `pmf` (supported on `0..pmf.len()`) and
/// Poisson(`lambda`). The Poisson mass beyond the support is one extra
/// bucket where `pmf` is zero.
pub fn tv_distance(pmf: &[f64], lambda: f64) -> f64 {
    let reference = poisson_pmf(lambda, pmf.len());
    let inside: f64 = pmf.iter().zip(&reference).map(|(a, b)| (a - b).abs()).sum();
    let tail = (1.0 - reference.iter().sum::<f64>()).max(0.0);
    0.5 * (inside + tail)
}

/// Exact `Binomial(trials, p)` probabilities on `0..=trials`.
pub fn binomial_pmf(trials: u64, p: f64) -> Vec<f64> {
    let mut out = vec![0.0; trials as usize + 1];
    let q = 1.0 - p;
    let mut ln_choose = 0.0f64;
    for k in 0..=trials {
        if k > 0 {
            ln_choose += ((trials - k + 1) as f64).ln() - (k as f64).ln();
        }
        out[k as usize] = (ln_choose + k as f64 * p.ln() + (trials - k) as f64 * q.ln()).exp();
    }
    out
}
