//! Reconstruction quality metrics.

use std::collections::HashSet;

use crate::error::{check_len, Error, Result};

/// `10 log10(var(x0) / MSE(x0, x))` in dB, with the population variance
/// (divide by the count). An exact reconstruction returns `+inf`.
pub fn snr(x0: &[f64], x: &[f64]) -> Result<f64> {
    check_len("estimate", x0.len(), x.len())?;
    if x0.is_empty() {
        return Err(Error::UndefinedMetric("SNR of an empty signal".into()));
    }
    let n = x0.len() as f64;
    let mean = x0.iter().sum::<f64>() / n;
    let var = x0.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if var <= 0.0 {
        return Err(Error::UndefinedMetric("ground truth has zero variance".into()));
    }
    let mse = x0.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / n;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (var / mse).log10())
}

/// Indices with `|theta_i| > fraction * max |theta|`.
pub fn estimated_support(theta: &[f64], fraction: f64) -> Vec<usize> {
    let peak = theta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Vec::new();
    }
    let cut = fraction * peak;
    theta
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > cut)
        .map(|(i, _)| i)
        .collect()
}

/// F1 score between a true support and the thresholded support of `theta`.
pub fn support_f1(truth: &[usize], theta: &[f64], fraction: f64) -> Result<f64> {
    if truth.is_empty() {
        return Err(Error::UndefinedMetric("empty true support".into()));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let est = estimated_support(theta, fraction);
    let truth: HashSet<usize> = truth.iter().copied().collect();
    let hits = est.iter().filter(|i| truth.contains(i)).count() as f64;
    if hits == 0.0 {
        return Ok(0.0);
    }
    let precision = hits / est.len() as f64;
    let recall = hits / truth.len() as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}
