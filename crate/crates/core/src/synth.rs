//! Synthetic standard, joint, tree and forest-sparse multi-channel data.
//!
//! Connected supports are grown from one root chosen uniformly among the
//! roots whose subtree can hold `k` nodes, by repeatedly adding a frontier
//! child chosen uniformly at random. That law is not uniform over all
//! size-`k` subtrees; [`sample_uniform_subtree`] draws exactly uniformly from
//! the enumerated set when the tree is small enough.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_len, Error, Result};
use crate::model::SparsityModel;
use crate::operators::MeasurementOperator;
use crate::rng::{derive_seed, rng_from};
use crate::signal::MultiChannelSignal;
use crate::wavelet::{TreeLayout, WaveletBasis};

/// Enumeration guard: at most this many tree nodes.
pub const ENUMERATION_MAX_NODES: usize = 64;
/// Enumeration guard: at most this subtree size.
pub const ENUMERATION_MAX_K: usize = 8;
/// Default measurement noise standard deviation.
pub const DEFAULT_NOISE_SIGMA: f64 = 0.01;

/// Support `Omega` of one channel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseSupport {
    indices: Vec<usize>,
    connected: bool,
}

impl SparseSupport {
    pub fn new(mut indices: Vec<usize>, connected: bool) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self { indices, connected }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn k(&self) -> usize {
        self.indices.len()
    }

    pub fn connected(&self) -> bool {
        self.connected
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// True when every non-root member's parent is also a member and no
    /// member lies in the approximation band.
    pub fn is_rooted_subtree(&self, tree: &TreeLayout) -> bool {
        !self.indices.is_empty()
            && self.indices.iter().all(|&i| {
                !tree.is_approx(i)
                    && match tree.parent(i) {
                        Some(p) => self.contains(p),
                        None => true,
                    }
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmplitudeLaw {
    /// Standard normal values.
    Gaussian,
    /// Magnitude uniform in `[low, high]` with a random sign.
    UniformMagnitude { low: f64, high: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisSpec {
    pub channels: usize,
    pub k: usize,
    pub model: SparsityModel,
    pub amplitude: AmplitudeLaw,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthesisSpec {
    pub fn new(channels: usize, k: usize, model: SparsityModel, seed: u64) -> Self {
        Self {
            channels,
            k,
            model,
            amplitude: AmplitudeLaw::Gaussian,
            noise_sigma: DEFAULT_NOISE_SIGMA,
            seed,
        }
    }
}

/// A synthesized signal with its coefficients and per-channel supports.
#[derive(Debug, Clone)]
pub struct Instance {
    pub x: MultiChannelSignal,
    /// Stacked wavelet coefficients, `theta[t * N + i]`.
    pub theta: Vec<f64>,
    pub supports: Vec<SparseSupport>,
}

impl Instance {
    /// Support indices in the stacked coefficient vector.
    pub fn stacked_support(&self) -> Vec<usize> {
        let n = self.x.channel_len();
        self.supports
            .iter()
            .enumerate()
            .flat_map(|(t, s)| s.indices().iter().map(move |&i| t * n + i))
            .collect()
    }
}

/// Roots whose subtree holds at least `k` nodes.
fn feasible_roots(tree: &TreeLayout, k: usize) -> Vec<usize> {
    tree.roots()
        .iter()
        .copied()
        .filter(|&r| tree.subtree_size(r) >= k)
        .collect()
}

/// Grows a connected support of size `k` from a uniformly chosen root by
/// uniform frontier growth.
pub fn sample_rooted_subtree<R: Rng + ?Sized>(
    tree: &TreeLayout,
    k: usize,
    rng: &mut R,
) -> Result<SparseSupport> {
    if k == 0 {
        return Err(Error::Infeasible("subtree size must be >= 1".into()));
    }
    let roots = feasible_roots(tree, k);
    if roots.is_empty() {
        return Err(Error::Infeasible(format!(
            "no root carries a subtree of {k} nodes"
        )));
    }
    let root = roots[rng.random_range(0..roots.len())];
    let mut members = vec![root];
    let mut frontier: Vec<usize> = tree.children(root).to_vec();
    while members.len() < k {
        let pick = rng.random_range(0..frontier.len());
        let node = frontier.swap_remove(pick);
        members.push(node);
        frontier.extend_from_slice(tree.children(node));
    }
    Ok(SparseSupport::new(members, true))
}

/// Seeded convenience wrapper around [`sample_rooted_subtree`].
pub fn sample_rooted_subtree_seeded(tree: &TreeLayout, k: usize, seed: u64) -> Result<SparseSupport> {
    sample_rooted_subtree(tree, k, &mut rng_from(seed))
}

/// All connected size-`k` subtrees containing a root, without duplicates.
pub fn enumerate_rooted_subtrees(tree: &TreeLayout, k: usize) -> Result<Vec<SparseSupport>> {
    let nodes = tree.n_coeffs() - tree.approx().len();
    if nodes > ENUMERATION_MAX_NODES || k > ENUMERATION_MAX_K {
        return Err(Error::TooLarge(format!(
            "enumeration limited to {ENUMERATION_MAX_NODES} nodes and k <= {ENUMERATION_MAX_K} \
             (got {nodes} nodes, k = {k})"
        )));
    }
    let mut out = Vec::new();
    if k == 0 {
        return Ok(out);
    }
    for &root in tree.roots() {
        let mut members = vec![root];
        extend(tree, &mut members, tree.children(root).to_vec(), k, &mut out);
    }
    Ok(out)
}

// Include-or-exclude branching on the first frontier node; every connected
// set is produced exactly once.
fn extend(
    tree: &TreeLayout,
    members: &mut Vec<usize>,
    mut frontier: Vec<usize>,
    k: usize,
    out: &mut Vec<SparseSupport>,
) {
    if members.len() == k {
        out.push(SparseSupport::new(members.clone(), true));
        return;
    }
    let Some(v) = frontier.pop() else { return };
    // include v
    let mut with_v = frontier.clone();
    with_v.extend_from_slice(tree.children(v));
    members.push(v);
    extend(tree, members, with_v, k, out);
    members.pop();
    // exclude v for good
    extend(tree, members, frontier, k, out);
}

/// Uniform draw over all enumerated size-`k` rooted subtrees.
pub fn sample_uniform_subtree<R: Rng + ?Sized>(
    tree: &TreeLayout,
    k: usize,
    rng: &mut R,
) -> Result<SparseSupport> {
    let all = enumerate_rooted_subtrees(tree, k)?;
    if all.is_empty() {
        return Err(Error::Infeasible(format!("no rooted subtree of size {k}")));
    }
    Ok(all[rng.random_range(0..all.len())].clone())
}

fn arbitrary_support<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> SparseSupport {
    SparseSupport::new(sample(rng, n, k).into_vec(), false)
}

fn draw_amplitude<R: Rng + ?Sized>(law: AmplitudeLaw, rng: &mut R) -> f64 {
    match law {
        AmplitudeLaw::Gaussian => rng.sample(StandardNormal),
        AmplitudeLaw::UniformMagnitude { low, high } => {
            let m = if high > low { rng.random_range(low..=high) } else { low };
            if rng.random::<bool>() {
                m
            } else {
                -m
            }
        }
    }
}

/// Draws supports and coefficients for `spec.model` and synthesizes
/// `x_t = Phi^-1 theta_t` per channel.
pub fn generate_instance(spec: &SynthesisSpec, basis: &WaveletBasis) -> Result<Instance> {
    let n = basis.len();
    if spec.channels == 0 {
        return Err(Error::InvalidParameter("channel count must be >= 1".into()));
    }
    if spec.k == 0 || spec.k > n {
        return Err(Error::Infeasible(format!("k = {} must lie in [1, {n}]", spec.k)));
    }
    if !(spec.noise_sigma >= 0.0) {
        return Err(Error::InvalidParameter("noise sigma must be >= 0".into()));
    }
    if let AmplitudeLaw::UniformMagnitude { low, high } = spec.amplitude {
        if !(low >= 0.0 && high >= low) {
            return Err(Error::InvalidParameter(format!("bad magnitude range [{low}, {high}]")));
        }
    }
    let tree = basis.tree_layout();
    let mut rng = rng_from(derive_seed(spec.seed, &[0x5eed]));
    let supports: Vec<SparseSupport> = match spec.model {
        SparsityModel::Forest => {
            let s = sample_rooted_subtree(&tree, spec.k, &mut rng)?;
            vec![s; spec.channels]
        }
        SparsityModel::Joint => {
            let s = arbitrary_support(n, spec.k, &mut rng);
            vec![s; spec.channels]
        }
        SparsityModel::Tree => (0..spec.channels)
            .map(|_| sample_rooted_subtree(&tree, spec.k, &mut rng))
            .collect::<Result<_>>()?,
        SparsityModel::Standard => (0..spec.channels)
            .map(|_| arbitrary_support(n, spec.k, &mut rng))
            .collect(),
    };
    let mut theta = vec![0.0; spec.channels * n];
    let mut data = Vec::with_capacity(spec.channels * n);
    for (t, s) in supports.iter().enumerate() {
        let chan = &mut theta[t * n..(t + 1) * n];
        for &i in s.indices() {
            chan[i] = draw_amplitude(spec.amplitude, &mut rng);
        }
        data.extend(basis.idwt(chan)?);
    }
    let x = MultiChannelSignal::new(basis.shape(), spec.channels, data)?;
    Ok(Instance { x, theta, supports })
}

/// `b = A x + sigma * g` with standard normal `g`.
pub fn measure(x: &[f64], op: &MeasurementOperator, noise_sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if !(noise_sigma >= 0.0) {
        return Err(Error::InvalidParameter("noise sigma must be >= 0".into()));
    }
    let mut b = op.forward(x)?;
    if noise_sigma > 0.0 {
        let mut rng = rng_from(seed);
        for v in &mut b {
            *v += noise_sigma * rng.sample::<f64, _>(StandardNormal);
        }
    }
    Ok(b)
}

/// Rescales each channel so that `||x_t||_2 = profile[t]`.
pub fn shape_energy(x: &MultiChannelSignal, profile: &[f64]) -> Result<MultiChannelSignal> {
    check_len("energy profile", x.channels(), profile.len())?;
    let mut out = x.clone();
    for (t, &target) in profile.iter().enumerate() {
        if !(target >= 0.0) || !target.is_finite() {
            return Err(Error::InvalidParameter(format!("bad energy weight {target}")));
        }
        let chan = out.channel_mut(t);
        let norm = chan.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            if target > 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "channel {t} is zero and cannot carry energy"
                )));
            }
            continue;
        }
        let s = target / norm;
        chan.iter_mut().for_each(|v| *v *= s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Shape;
    use crate::wavelet::WaveletFamily;

    #[test]
    fn k_one_is_a_root() {
        let tree = TreeLayout::complete_binary(4).unwrap();
        for seed in 0..20 {
            let s = sample_rooted_subtree_seeded(&tree, 1, seed).unwrap();
            assert_eq!(s.indices(), &[0]);
        }
    }

    #[test]
    fn infeasible_k_reported() {
        let tree = TreeLayout::complete_binary(2).unwrap();
        assert!(matches!(
            sample_rooted_subtree_seeded(&tree, 4, 0),
            Err(Error::Infeasible(_))
        ));
        assert!(sample_rooted_subtree_seeded(&tree, 0, 0).is_err());
    }

    #[test]
    fn enumeration_guard() {
        let tree = TreeLayout::complete_binary(7).unwrap();
        assert!(matches!(enumerate_rooted_subtrees(&tree, 3), Err(Error::TooLarge(_))));
        let small = TreeLayout::complete_binary(4).unwrap();
        assert!(matches!(enumerate_rooted_subtrees(&small, 9), Err(Error::TooLarge(_))));
    }

    #[test]
    fn enumeration_is_duplicate_free_and_connected() {
        let tree = TreeLayout::complete_binary(4).unwrap();
        let all = enumerate_rooted_subtrees(&tree, 4).unwrap();
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), all.len());
        assert!(all.iter().all(|s| s.k() == 4 && s.is_rooted_subtree(&tree)));
    }

    #[test]
    fn every_model_has_k_nonzeros_per_channel() {
        let basis = WaveletBasis::new(WaveletFamily::Haar, 5, Shape::Line(64)).unwrap();
        for model in SparsityModel::ALL {
            let mut spec = SynthesisSpec::new(3, 6, model, 17);
            spec.amplitude = AmplitudeLaw::UniformMagnitude { low: 1.0, high: 2.0 };
            let inst = generate_instance(&spec, &basis).unwrap();
            for t in 0..3 {
                let nz = inst.theta[t * 64..(t + 1) * 64].iter().filter(|v| **v != 0.0).count();
                assert_eq!(nz, 6, "{model}");
            }
            let back = crate::solvers::analysis(&basis, inst.x.as_slice());
            for (a, b) in back.iter().zip(&inst.theta) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn measure_without_noise_is_exact() {
        let op = MeasurementOperator::dense(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(measure(&[1.0, 1.0], &op, 0.0, 5).unwrap(), vec![3.0, 7.0]);
        assert_eq!(
            measure(&[1.0, 1.0], &op, 0.1, 5).unwrap(),
            measure(&[1.0, 1.0], &op, 0.1, 5).unwrap()
        );
        assert!(measure(&[1.0], &op, 0.0, 5).is_err());
    }

    #[test]
    fn shape_energy_profiles() {
        let x = MultiChannelSignal::new(Shape::Line(2), 3, vec![1.0, 2.0, 0.5, 0.5, 3.0, 0.0]).unwrap();
        let eq = shape_energy(&x, &[1.0, 1.0, 1.0]).unwrap();
        for e in eq.channel_energies() {
            assert!((e - 1.0).abs() < 1e-10);
        }
        let one = shape_energy(&x, &[0.0, 2.0, 0.0]).unwrap();
        let e = one.channel_energies();
        assert_eq!(e[0], 0.0);
        assert_eq!(e[2], 0.0);
        assert!((e[1] - 4.0).abs() < 1e-12);
        let z = MultiChannelSignal::zeros(Shape::Line(2), 1);
        assert!(shape_energy(&z, &[1.0]).is_err());
        assert!(shape_energy(&x, &[1.0]).is_err());
    }
}
