//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use forestcs::solvers::tv_norm;
use forestcs::Shape;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn randn(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.sample(rand_distr::StandardNormal)).collect()
}

/// Minimizer of `tau ||z|| + 0.5 ||z - v||^2` over R^2 by a grid search
/// refined around the incumbent until the spacing is 1e-6.
pub fn grid_group_prox(v: [f64; 2], tau: f64) -> [f64; 2] {
    let f = |z: [f64; 2]| {
        tau * (z[0] * z[0] + z[1] * z[1]).sqrt() + 0.5 * ((z[0] - v[0]).powi(2) + (z[1] - v[1]).powi(2))
    };
    let mut center = [0.0, 0.0];
    let mut half = v[0].abs().max(v[1].abs()) + 1.0;
    let steps = 40;
    while half > 1e-6 {
        let h = half / steps as f64;
        let mut best = (f(center), center);
        for i in -steps..=steps {
            for j in -steps..=steps {
                let z = [center[0] + i as f64 * h, center[1] + j as f64 * h];
                let val = f(z);
                if val < best.0 {
                    best = (val, z);
                }
            }
        }
        center = best.1;
        half = 2.0 * h;
    }
    center
}

/// Minimizer of `tau * TV(x) + 0.5 ||x - v||^2` on a grid by constant-step
/// subgradient descent, averaging the second half of the iterates.
pub fn tv_subgradient_oracle(v: &[f64], rows: usize, cols: usize, tau: f64, steps: usize) -> Vec<f64> {
    let n = rows * cols;
    let eta = 2e-4;
    let mut x = v.to_vec();
    let mut avg = vec![0.0; n];
    let mut count = 0.0;
    for k in 0..steps {
        let mut g: Vec<f64> = x.iter().zip(v).map(|(a, b)| a - b).collect();
        for r in 0..rows {
            for c in 0..cols {
                let i = r * cols + c;
                let dr = if r + 1 < rows { x[i + cols] - x[i] } else { 0.0 };
                let dc = if c + 1 < cols { x[i + 1] - x[i] } else { 0.0 };
                let m = (dr * dr + dc * dc).sqrt();
                if m > 0.0 {
                    let (ur, uc) = (tau * dr / m, tau * dc / m);
                    if r + 1 < rows {
                        g[i + cols] += ur;
                        g[i] -= ur;
                    }
                    if c + 1 < cols {
                        g[i + 1] += uc;
                        g[i] -= uc;
                    }
                }
            }
        }
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= eta * gi;
        }
        if k >= steps / 2 {
            for (a, xi) in avg.iter_mut().zip(&x) {
                *a += xi;
            }
            count += 1.0;
        }
    }
    avg.iter().map(|a| a / count).collect()
}

pub fn tv_objective(x: &[f64], v: &[f64], rows: usize, cols: usize, tau: f64) -> f64 {
    tau * tv_norm(x, Shape::Grid { rows, cols })
        + 0.5 * x.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
