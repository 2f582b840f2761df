//! Subtree counts, measurement bounds and empirical RIP concentration.
//!
//! All bounds follow the union-of-subspaces sufficient condition
//! `M >= 2 / (c1 delta) * (ln(2 L) + D ln(12 / delta) + t)` where `L` is the
//! number of admissible supports and `D` the subspace dimension. Absolute
//! constants are parameters (default 1), so bounds are only comparable under
//! identical constants.
//!
//! Support counts used for each model over `T` channels of length `N`:
//! - standard: `C(N,k)^T ~ (eN/k)^(Tk)`;
//! - joint: `C(N,k) ~ (eN/k)^k`;
//! - tree: `L_tree^T`, with `L_tree` the rooted-subtree count bound;
//! - forest: `L_tree`.
//!
//! The subspace dimension is `Tk` in every case.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{check_len, Error, Result};
use crate::model::SparsityModel;
use crate::operators::{make_dense_subgaussian, Distribution, MeasurementOperator};
use crate::rng::{derive_seed, rng_from};
use crate::signal::MultiChannelSignal;

/// Largest `k` for which [`catalan`] is computed exactly.
pub const CATALAN_MAX_K: u32 = 30;

/// `C_k = binom(2k, k) / (k + 1)` by exact integer recurrence.
pub fn catalan(k: u32) -> Result<u64> {
    if k > CATALAN_MAX_K {
        return Err(Error::TooLarge(format!("catalan({k}) exceeds the exact range (k <= {CATALAN_MAX_K})")));
    }
    // C_{n+1} = C_n * 2 (2n + 1) / (n + 2); the division is exact.
    let mut c: u128 = 1;
    for n in 0..k as u128 {
        c = c * 2 * (2 * n + 1) / (n + 2);
    }
    Ok(c as u64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub n: usize,
    pub k: usize,
    pub channels: usize,
    /// RIP constant in (0, 1).
    pub delta: f64,
    /// Failure exponent: success probability `1 - e^-t`.
    pub t: f64,
    /// Leading constant.
    pub c1: f64,
    /// Constant inside the block-diagonal energy term `W`.
    pub c2: f64,
    /// Constant in the large-`k` log term of the block-diagonal bound.
    pub c3: f64,
    /// Constant in the large-`k` log term of the subtree count.
    pub c4: f64,
}

impl BoundParams {
    pub fn new(n: usize, k: usize, channels: usize, delta: f64) -> Self {
        Self {
            n,
            k,
            channels,
            delta,
            t: 1.0,
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            c4: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n == 0 || self.k == 0 || self.channels == 0 {
            return bad("N, k and T must be >= 1".into());
        }
        if self.k > self.n {
            return bad(format!("k = {} exceeds N = {}", self.k, self.n));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !(self.t >= 0.0) {
            return bad(format!("t must be >= 0, got {}", self.t));
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0 && self.c3 > 0.0 && self.c4 > 0.0) {
            return bad("constants must be > 0".into());
        }
        Ok(())
    }

    fn small_k(&self) -> bool {
        self.k <= floor_log2(self.n)
    }
}

fn floor_log2(n: usize) -> usize {
    (usize::BITS - 1 - n.leading_zeros()) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountRegime {
    /// `k <= floor(log2 N)`: bound `e^k N / (k + 1)`.
    SmallK,
    /// `k > floor(log2 N)`: bound `4^k c4 N / k`.
    LargeK,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubtreeCountBound {
    pub bound: f64,
    pub regime: CountRegime,
    /// Exact Catalan number when `k` is in the exact range.
    pub catalan: Option<u64>,
}

/// Upper bound on the number of size-`k` rooted subtrees of an `N`-node
/// binary tree.
pub fn subtree_count_bound(n: usize, k: usize, c4: f64) -> Result<SubtreeCountBound> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter("N and k must be >= 1".into()));
    }
    let (kf, nf) = (k as f64, n as f64);
    let (bound, regime) = if k <= floor_log2(n) {
        (kf.exp() * nf / (kf + 1.0), CountRegime::SmallK)
    } else {
        (4f64.powf(kf) * c4 * nf / kf, CountRegime::LargeK)
    };
    let catalan = u32::try_from(k).ok().and_then(|k| catalan(k).ok());
    Ok(SubtreeCountBound {
        bound,
        regime,
        catalan,
    })
}

/// `ln L_tree` in closed form for the given log-term constant.
fn ln_subtree_count(p: &BoundParams, c: f64) -> f64 {
    let (kf, nf) = (p.k as f64, p.n as f64);
    if p.small_k() {
        kf + (nf / (kf + 1.0)).ln()
    } else {
        kf * 4f64.ln() + (c * nf / kf).ln()
    }
}

/// Natural log of the support count of `model` over `T` channels.
pub fn ln_support_count(model: SparsityModel, p: &BoundParams) -> f64 {
    let (kf, nf, tf) = (p.k as f64, p.n as f64, p.channels as f64);
    let ln_binom = kf * (1.0 + (nf / kf).ln());
    match model {
        SparsityModel::Standard => tf * ln_binom,
        SparsityModel::Joint => ln_binom,
        SparsityModel::Tree => tf * ln_subtree_count(p, p.c4),
        SparsityModel::Forest => ln_subtree_count(p, p.c4),
    }
}

/// The additive pieces of a measurement bound,
/// `bound = scale * (ln 2 + log_count + dimension + confidence)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTerms {
    pub scale: f64,
    pub log_count: f64,
    pub dimension: f64,
    pub confidence: f64,
}

impl BoundTerms {
    pub fn total(&self) -> f64 {
        self.scale * (2f64.ln() + self.log_count + self.dimension + self.confidence)
    }
}

pub fn measurement_bound_terms(model: SparsityModel, p: &BoundParams) -> Result<BoundTerms> {
    p.validate()?;
    Ok(BoundTerms {
        scale: 2.0 / (p.c1 * p.delta),
        log_count: ln_support_count(model, p),
        dimension: (p.channels * p.k) as f64 * (12.0 / p.delta).ln(),
        confidence: p.t,
    })
}

/// Sufficient total measurement count `T M` for a dense sub-Gaussian operator.
pub fn measurement_bound(model: SparsityModel, p: &BoundParams) -> Result<f64> {
    Ok(measurement_bound_terms(model, p)?.total())
}

/// Energy-spread factors of a multi-channel signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyFactors {
    pub gamma_2: f64,
    pub gamma_inf: f64,
}

/// `Gamma_2 = (sum ||x_t||^2)^2 / sum ||x_t||^4` and
/// `Gamma_inf = sum ||x_t||^2 / max ||x_t||^2`.
pub fn energy_factors(x: &MultiChannelSignal) -> Result<EnergyFactors> {
    energy_factors_from(&x.channel_energies())
}

/// Same as [`energy_factors`] from per-channel squared norms.
pub fn energy_factors_from(energies: &[f64]) -> Result<EnergyFactors> {
    let total: f64 = energies.iter().sum();
    let peak = energies.iter().fold(0.0f64, |m, &e| m.max(e));
    if !(total > 0.0) {
        return Err(Error::InvalidParameter("energy factors need a nonzero signal".into()));
    }
    let fourth: f64 = energies.iter().map(|e| e * e).sum();
    Ok(EnergyFactors {
        gamma_2: total * total / fourth,
        gamma_inf: total / peak,
    })
}

/// Sufficient `T M` for a block-diagonal operator of `T` sub-Gaussian blocks,
/// with `W = min(c2^2 delta^2 Gamma_2, c2 delta Gamma_inf)`.
pub fn blockdiag_bound(p: &BoundParams, f: &EnergyFactors) -> Result<f64> {
    p.validate()?;
    let tf = p.channels as f64;
    if !(f.gamma_2 >= 1.0 - 1e-12 && f.gamma_inf >= 1.0 - 1e-12) {
        return Err(Error::InvalidParameter("energy factors must be >= 1".into()));
    }
    let w = (p.c2 * p.c2 * p.delta * p.delta * f.gamma_2).min(p.c2 * p.delta * f.gamma_inf);
    let dim = (p.channels * p.k) as f64;
    let inner = 2f64.ln() + ln_subtree_count(p, p.c3) + dim * (12.0 / p.delta).ln() + p.t;
    Ok(2.0 * tf / (p.c1 * w) * inner)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcentrationOperator {
    /// One dense `TM x TN` Gaussian matrix.
    Dense,
    /// `T` independent `M x N` Gaussian blocks on the diagonal.
    BlockDiagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationSetup {
    pub channels: usize,
    pub n: usize,
    pub k: usize,
    /// Measurements per channel.
    pub m: usize,
    /// Per-channel energy weights (normalized to unit total norm).
    pub energy_profile: Vec<f64>,
    pub trials: usize,
    pub operator: ConcentrationOperator,
    /// Deviation threshold for the tail fraction.
    pub delta: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationStats {
    /// Mean of `||A x||^2 - 1`.
    pub mean: f64,
    /// Standard deviation of `||A x||^2` (sample, `n - 1`).
    pub std: f64,
    /// Fraction of trials with `| ||A x||^2 - 1 | > delta`.
    pub tail_fraction: f64,
    pub trials: usize,
}

/// Draws a fresh Gaussian operator and a unit-norm forest-sparse signal per
/// trial (shared random support of size `k` in every channel, channel norms
/// following the energy profile) and records `||A x||^2`.
pub fn rip_concentration_experiment(setup: &ConcentrationSetup) -> Result<ConcentrationStats> {
    let ConcentrationSetup {
        channels,
        n,
        k,
        m,
        trials,
        ..
    } = *setup;
    if channels == 0 || n == 0 || k == 0 || k > n || m == 0 || trials < 2 {
        return Err(Error::InvalidParameter(
            "concentration experiment needs T, N, M >= 1, 1 <= k <= N and >= 2 trials".into(),
        ));
    }
    if channels * n > 4096 {
        return Err(Error::TooLarge(format!("T N = {} exceeds 4096", channels * n)));
    }
    check_len("energy profile", channels, setup.energy_profile.len())?;
    let total: f64 = setup.energy_profile.iter().map(|w| w * w).sum();
    if !(total > 0.0) || setup.energy_profile.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::InvalidParameter("energy profile must be nonnegative and nonzero".into()));
    }
    let scale: Vec<f64> = setup.energy_profile.iter().map(|w| w / total.sqrt()).collect();

    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<f64> {
            let seed = derive_seed(setup.seed, &[trial as u64]);
            let mut rng = rng_from(seed);
            let support = rand::seq::index::sample(&mut rng, n, k).into_vec();
            let mut x = vec![0.0; channels * n];
            for (t, s) in scale.iter().enumerate() {
                let vals: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let norm = vals.iter().map(|v| v * v).sum::<f64>().sqrt();
                for (&i, v) in support.iter().zip(vals) {
                    x[t * n + i] = s * v / norm;
                }
            }
            let op_seed = derive_seed(seed, &[1]);
            let op = match setup.operator {
                ConcentrationOperator::Dense => {
                    make_dense_subgaussian(channels * m, channels * n, Distribution::Gaussian, op_seed)?
                }
                ConcentrationOperator::BlockDiagonal => MeasurementOperator::block_diagonal(
                    (0..channels)
                        .map(|t| {
                            make_dense_subgaussian(
                                m,
                                n,
                                Distribution::Gaussian,
                                derive_seed(op_seed, &[t as u64]),
                            )
                        })
                        .collect::<Result<_>>()?,
                )?,
            };
            let y = op.forward(&x)?;
            Ok(y.iter().map(|v| v * v).sum())
        })
        .collect::<Result<_>>()?;

    let nf = values.len() as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let tail = values.iter().filter(|v| (*v - 1.0).abs() > setup.delta).count() as f64 / nf;
    Ok(ConcentrationStats {
        mean: mean - 1.0,
        std: var.sqrt(),
        tail_fraction: tail,
        trials,
    })
}
