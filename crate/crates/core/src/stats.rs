//! Error analysis for correlated Monte Carlo series: binning, block
//! jackknife, integrated autocorrelation time, and least-squares fits with
//! an information criterion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fewest bins accepted at any binning level.
pub const MIN_BINS: usize = 32;

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Binning {
    pub mean: f64,
    /// Standard error at the most conservative admissible level.
    pub error: f64,
    /// Naive standard error, assuming independent samples.
    pub naive_error: f64,
    /// `τ_int = (error / naive_error)² / 2`.
    pub tau_int: f64,
    /// Standard error at each level; level `l` has bins of `2^l` samples.
    pub level_errors: Vec<f64>,
}

/// Pairwise binning analysis. Needs at least `2 * MIN_BINS` samples.
pub fn binning(xs: &[f64]) -> Result<Binning> {
    if xs.len() < 2 * MIN_BINS {
        return Err(Error::InsufficientData(format!(
            "binning needs at least {} samples, got {}",
            2 * MIN_BINS,
            xs.len()
        )));
    }
    let m = mean(xs);
    let mut level = xs.to_vec();
    let mut errors = Vec::new();
    while level.len() >= MIN_BINS {
        errors.push((variance(&level) / level.len() as f64).sqrt());
        level = level.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    }
    let naive = errors[0];
    let error = errors.iter().cloned().fold(0.0, f64::max);
    let tau_int = if naive > 0.0 {
        0.5 * (error / naive).powi(2)
    } else {
        0.5
    };
    Ok(Binning {
        mean: m,
        error,
        naive_error: naive,
        tau_int,
        level_errors: errors,
    })
}

/// Block jackknife of a derived statistic over `blocks` contiguous blocks.
/// Returns `(estimate on the full series, error)`.
pub fn jackknife<F: Fn(&[f64]) -> f64>(xs: &[f64], blocks: usize, f: F) -> Result<(f64, f64)> {
    if blocks < 2 || xs.len() < 2 * blocks {
        return Err(Error::InsufficientData(format!(
            "jackknife with {blocks} blocks needs at least {} samples, got {}",
            2 * blocks,
            xs.len()
        )));
    }
    let size = xs.len() / blocks;
    let used = &xs[..size * blocks];
    let full = f(used);
    let mut reduced = Vec::with_capacity(size * (blocks - 1));
    let leave_out: Vec<f64> = (0..blocks)
        .map(|b| {
            reduced.clear();
            reduced.extend_from_slice(&used[..b * size]);
            reduced.extend_from_slice(&used[(b + 1) * size..]);
            f(&reduced)
        })
        .collect();
    let lm = mean(&leave_out);
    let n = blocks as f64;
    let var = (n - 1.0) / n * leave_out.iter().map(|v| (v - lm).powi(2)).sum::<f64>();
    Ok((full, var.sqrt()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub rss: f64,
    pub n: usize,
}

impl LinearFit {
    /// Akaike information criterion for Gaussian residuals, two parameters.
    pub fn aic(&self) -> f64 {
        let n = self.n as f64;
        n * (self.rss.max(f64::MIN_POSITIVE) / n).ln() + 4.0
    }
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::InsufficientData(
            "a linear fit needs at least 3 matching points".into(),
        ));
    }
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("fit abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    Ok(LinearFit {
        slope,
        intercept,
        rss,
        n: x.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ar1(n: usize, phi: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = 0.0;
        (0..n)
            .map(|_| {
                let u: f64 = rng.random::<f64>() - 0.5;
                x = phi * x + u;
                x
            })
            .collect()
    }

    #[test]
    fn binning_recovers_ar1_autocorrelation() {
        // τ_int of AR(1) is (1+φ)/(2(1-φ)).
        let phi = 0.8;
        let xs = ar1(1 << 18, phi, 3);
        let b = binning(&xs).unwrap();
        let exact = (1.0 + phi) / (2.0 * (1.0 - phi));
        assert!((b.tau_int - exact).abs() / exact < 0.2, "{} vs {exact}", b.tau_int);
        assert!(b.error >= b.naive_error);
    }

    #[test]
    fn binning_independent_samples() {
        let xs = ar1(1 << 14, 0.0, 5);
        let b = binning(&xs).unwrap();
        assert!(b.tau_int < 1.0);
        assert!(binning(&xs[..10]).is_err());
    }

    #[test]
    fn jackknife_of_mean_matches_standard_error() {
        let xs = ar1(4096, 0.0, 9);
        let (est, err) = jackknife(&xs, 64, mean).unwrap();
        assert!((est - mean(&xs)).abs() < 1e-12);
        let se = (variance(&xs) / xs.len() as f64).sqrt();
        assert!((err / se - 1.0).abs() < 0.3);
    }

    #[test]
    fn linear_fit_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept + 1.0).abs() < 1e-12);
        assert!(f.rss < 1e-20);
    }
}
