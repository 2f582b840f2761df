//! Closed-form proximal maps and the per-channel wavelet transform helpers.

use crate::error::{check_len, Error, Result};
use crate::wavelet::WaveletBasis;

/// Elementwise soft threshold `sign(v) * max(|v| - tau, 0)`.
pub fn prox_l1(v: &[f64], tau: f64) -> Result<Vec<f64>> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter(format!("threshold must be >= 0, got {tau}")));
    }
    let mut out = v.to_vec();
    soft_threshold_in_place(&mut out, tau);
    Ok(out)
}

pub(crate) fn soft_threshold_in_place(v: &mut [f64], tau: f64) {
    for x in v {
        let a = x.abs() - tau;
        *x = if a > 0.0 { a.copysign(*x) } else { 0.0 };
    }
}

/// Cross-channel group soft threshold: for every position `i`, the vector
/// `(v[i], v[N + i], ..., v[(T-1)N + i])` is shrunk as one group.
pub fn prox_l21_joint(v: &[f64], tau: f64, channels: usize, n: usize) -> Result<Vec<f64>> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter(format!("threshold must be >= 0, got {tau}")));
    }
    check_len("stacked coefficients", channels * n, v.len())?;
    let mut out = v.to_vec();
    joint_shrink_in_place(&mut out, tau, channels, n);
    Ok(out)
}

pub(crate) fn joint_shrink_in_place(v: &mut [f64], tau: f64, channels: usize, n: usize) {
    for i in 0..n {
        let norm = (0..channels).map(|t| v[t * n + i].powi(2)).sum::<f64>().sqrt();
        let s = if norm <= tau { 0.0 } else { (norm - tau) / norm };
        for t in 0..channels {
            v[t * n + i] *= s;
        }
    }
}

pub(crate) fn joint_l21(v: &[f64], channels: usize, n: usize) -> f64 {
    (0..n)
        .map(|i| (0..channels).map(|t| v[t * n + i].powi(2)).sum::<f64>().sqrt())
        .sum()
}

/// Channel-wise analysis `Phi` over a stacked vector.
pub fn analysis(basis: &WaveletBasis, x: &[f64]) -> Vec<f64> {
    let mut out = x.to_vec();
    for chunk in out.chunks_exact_mut(basis.len()) {
        basis.dwt_in_place(chunk);
    }
    out
}

/// Channel-wise synthesis `Phi^T` over a stacked vector.
pub fn synthesis(basis: &WaveletBasis, theta: &[f64]) -> Vec<f64> {
    let mut out = theta.to_vec();
    for chunk in out.chunks_exact_mut(basis.len()) {
        basis.idwt_in_place(chunk);
    }
    out
}

/// Soft threshold applied in the wavelet domain: `Phi^T soft(Phi v, tau)`.
pub fn prox_l1_signal(basis: &WaveletBasis, v: &[f64], tau: f64) -> Result<Vec<f64>> {
    if v.len() % basis.len() != 0 {
        return Err(Error::DimensionMismatch {
            what: "stacked signal",
            expected: basis.len(),
            got: v.len(),
        });
    }
    let mut theta = analysis(basis, v);
    theta = prox_l1(&theta, tau)?;
    Ok(synthesis(basis, &theta))
}
