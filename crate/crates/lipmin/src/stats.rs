//! Kolmogorov–Smirnov tests and moment checks for the verification harness.

use crate::error::{Error, Result};

/// Survival function of the Kolmogorov distribution: P(K > lambda).
///
/// Uses the alternating series for large arguments and the theta-function
/// form for small ones (the alternating series converges too slowly there).
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 1e-8 {
        return 1.0;
    }
    if lambda < 1.18 {
        let f = std::f64::consts::PI * std::f64::consts::PI / (8.0 * lambda * lambda);
        let mut cdf = 0.0;
        for k in 0..10 {
            let odd = (2 * k + 1) as f64;
            cdf += (-odd * odd * f).exp();
        }
        cdf *= (2.0 * std::f64::consts::PI).sqrt() / lambda;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut p = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kk = (k * k) as f64;
        let term = (-2.0 * kk * lambda * lambda).exp();
        p += sign * term;
        sign = -sign;
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * p).clamp(0.0, 1.0)
}

/// One-sample KS test of `samples` against the cdf `F`.
/// Returns (statistic, asymptotic p-value).
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<(f64, f64)> {
    let n = samples.len();
    if n < 20 {
        return Err(Error::InvalidArgument(format!(
            "one-sample KS needs at least 20 samples, got {n}"
        )));
    }
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(|a, b| a.total_cmp(b));
    let nf = n as f64;
    let mut d: f64 = 0.0;
    let mut prev_f = -1e-12;
    for (i, &x) in xs.iter().enumerate() {
        let fx = cdf(x);
        if !(-1e-9..=1.0 + 1e-9).contains(&fx) {
            return Err(Error::InvalidArgument(format!(
                "cdf({x}) = {fx} outside [0,1]"
            )));
        }
        if fx < prev_f - 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "non-monotone cdf near x = {x}"
            )));
        }
        prev_f = fx;
        d = d.max(fx - i as f64 / nf).max((i + 1) as f64 / nf - fx);
    }
    Ok((d, kolmogorov_sf(nf.sqrt() * d)))
}

/// Two-sample KS test. Returns (statistic, asymptotic p-value).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("empty sample in two-sample KS".into()));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_unstable_by(|u, v| u.total_cmp(v));
    ys.sort_unstable_by(|u, v| u.total_cmp(v));
    let (n1, n2) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n1 - j as f64 / n2).abs());
    }
    let neff = (n1 * n2 / (n1 + n2)).sqrt();
    Ok((d, kolmogorov_sf(neff * d)))
}

/// Outcome of a mean-versus-target check at `k_sigma` standard errors.
#[derive(Debug, Clone)]
pub struct MomentCheck {
    pub mean: f64,
    pub se: f64,
    pub target: f64,
    pub k_sigma: f64,
    pub n: usize,
    pub pass: bool,
}

/// Passes iff |mean(samples) − target| ≤ k_sigma · SD/√n.
pub fn moment_check(samples: &[f64], target: f64, k_sigma: f64) -> MomentCheck {
    let n = samples.len();
    assert!(n >= 30, "moment_check needs at least 30 samples, got {n}");
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (nf - 1.0);
    let se = (var / nf).sqrt();
    // absolute slack keeps degenerate constant samples (se = 0) from failing
    // on the rounding of the mean
    let slack = 1e-12 * (1.0 + target.abs());
    MomentCheck {
        mean,
        se,
        target,
        k_sigma,
        n,
        pass: (mean - target).abs() <= k_sigma * se + slack,
    }
}

/// Pearson correlation of two equal-length samples.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        num += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    num / (va.sqrt() * vb.sqrt())
}

/// Gaussian kernel density estimate at `x` with bandwidth `h`.
pub fn kernel_density_h(samples: &[f64], x: f64, h: f64) -> f64 {
    let n = samples.len() as f64;
    let mut s = 0.0;
    for &v in samples {
        let z = (x - v) / h;
        s += (-0.5 * z * z).exp();
    }
    s / (n * h * (2.0 * std::f64::consts::PI).sqrt())
}

/// Gaussian kernel density estimate at `x` with Silverman's bandwidth.
pub fn kernel_density(samples: &[f64], x: f64) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let sd = (samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    kernel_density_h(samples, x, 1.06 * sd * n.powf(-0.2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn statistic_in_unit_interval_and_monotone_cdf_enforced() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64 / 100.0).collect();
        let (d, p) = ks_one_sample(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((0.0..=1.0).contains(&d));
        assert!(p > 0.5);
        assert!(ks_one_sample(&xs, |x| -x).is_err());
    }

    #[test]
    fn constant_samples_rejected_against_continuous_cdf() {
        let xs = vec![0.5; 1000];
        let (_, p) = ks_one_sample(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(p < 1e-10);
    }

    #[test]
    fn ks_null_calibration() {
        // Samples drawn from the hypothesized cdf: p > 0.001 in >= 99 of 100 reps.
        let mut ok = 0;
        for rep in 0..100 {
            let mut rng = RngStream::new(2024, rep).rng();
            let xs: Vec<f64> = (0..10_000).map(|_| rng.gen::<f64>()).collect();
            let (_, p) = ks_one_sample(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
            if p > 0.001 {
                ok += 1;
            }
        }
        assert!(ok >= 99, "null calibration: only {ok}/100 passed");
    }

    #[test]
    fn ks_two_sample_identical_and_power() {
        let xs: Vec<f64> = (0..500).map(|i| i as f64).collect();
        let (d, p) = ks_two_sample(&xs, &xs).unwrap();
        assert_eq!(d, 0.0);
        assert!((p - 1.0).abs() < 1e-12);

        let mut rng = RngStream::new(7, 0).rng();
        let a: Vec<f64> = (0..1000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..1000)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z + 3.0
            })
            .collect();
        let (_, p) = ks_two_sample(&a, &b).unwrap();
        assert!(p < 1e-6);
        assert!(ks_two_sample(&a, &[]).is_err());
    }

    #[test]
    fn ks_two_sample_null_calibration() {
        let mut ok = 0;
        for rep in 0..100 {
            let mut rng = RngStream::new(1234, rep).rng();
            let a: Vec<f64> = (0..2000).map(|_| rng.gen::<f64>()).collect();
            let b: Vec<f64> = (0..2000).map(|_| rng.gen::<f64>()).collect();
            let (_, p) = ks_two_sample(&a, &b).unwrap();
            if p > 0.001 {
                ok += 1;
            }
        }
        assert!(ok >= 99, "two-sample null calibration: {ok}/100");
    }

    #[test]
    fn moment_check_examples() {
        let xs = vec![0.7; 100];
        assert!(moment_check(&xs, 0.7, 3.0).pass);

        let mut rng = RngStream::new(5, 1).rng();
        let us: Vec<f64> = (0..10_000).map(|_| rng.gen::<f64>()).collect();
        assert!(moment_check(&us, 0.5, 3.0).pass);
        assert!(!moment_check(&us, 0.6, 3.0).pass);
    }

    #[test]
    fn kolmogorov_sf_endpoints() {
        assert_eq!(kolmogorov_sf(0.0), 1.0);
        assert!(kolmogorov_sf(0.5) > 0.95);
        assert!((kolmogorov_sf(1.3581015) - 0.05).abs() < 1e-4); // classical 5% point
        assert!(kolmogorov_sf(3.0) < 1e-7);
    }
}
