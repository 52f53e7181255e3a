//! Estimators used by the experiment checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hill estimate of the tail index from the `k` largest positive samples:
/// `1 / mean_{i≤k} ln(x_(i) / x_(k+1))`, order statistics descending.
pub fn hill_estimator(samples: &[f64], k: usize) -> Result<f64> {
    let mut pos: Vec<f64> = samples.iter().copied().filter(|&x| x > 0.0 && x.is_finite()).collect();
    if k == 0 || k >= pos.len() {
        return Err(Error::Estimator(format!("need k < positive sample count, got k={k}, n+={}", pos.len())));
    }
    pos.sort_by(|a, b| b.total_cmp(a));
    let threshold = pos[k].ln();
    let mean_log = pos[..k].iter().map(|x| x.ln() - threshold).sum::<f64>() / k as f64;
    if mean_log <= 0.0 {
        return Err(Error::Estimator("zero log-spacings in the upper order statistics".into()));
    }
    Ok(1.0 / mean_log)
}

/// Default Hill fraction: k = n^0.6 of the positive samples.
pub fn hill_k(n: usize, exponent: f64) -> usize {
    ((n as f64).powf(exponent).round() as usize).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceEstimate {
    pub lambda: f64,
    pub mean: f64,
    pub stderr: f64,
}

/// Mean and standard error of e^{-λx} for each λ.
pub fn empirical_laplace(samples: &[f64], lambdas: &[f64]) -> Vec<LaplaceEstimate> {
    lambdas
        .iter()
        .map(|&lambda| {
            if lambda == 0.0 {
                return LaplaceEstimate {
                    lambda,
                    mean: 1.0,
                    stderr: 0.0,
                };
            }
            let ys: Vec<f64> = samples.iter().map(|x| (-lambda * x).exp()).collect();
            let (mean, stderr) = mean_stderr(&ys);
            LaplaceEstimate { lambda, mean, stderr }
        })
        .collect()
}

/// Sample mean and its standard error (0 for fewer than two samples).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Linear-interpolation quantile of already sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn quantiles(xs: &[f64], ps: &[f64]) -> Vec<f64> {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    ps.iter().map(|&p| quantile_sorted(&s, p)).collect()
}

pub fn iqr(xs: &[f64]) -> f64 {
    let q = quantiles(xs, &[0.25, 0.75]);
    q[1] - q[0]
}

/// Least-squares slope of y on x.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
