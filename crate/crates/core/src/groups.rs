//! Group sets for the joint, tree and forest models, the duplication map `G`
//! that makes overlapping groups disjoint, and the group soft-threshold.
//!
//! Coefficients of a `T`-channel signal are indexed in the stacked vector as
//! `t * N + i`. Groups are emitted in ascending node order, channels
//! ascending within a node.
//!
//! Group construction per model:
//! - joint: one size-`T` group per coefficient position.
//! - tree: per channel, one `{node, parent}` pair per non-root tree node,
//!   plus singletons for roots and approximation coefficients.
//! - forest: per non-root tree node, one size-`2T` group holding the
//!   node/parent pair of every channel, plus size-`T` cross-channel groups
//!   for roots and approximation coefficients.

use crate::error::{check_len, Error, Result};
use crate::wavelet::TreeLayout;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupModel {
    Joint,
    Tree,
    Forest,
}

/// A list of index groups over the stacked `T * N` coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupLayout {
    model: GroupModel,
    channels: usize,
    n: usize,
    members: Vec<usize>,
    offsets: Vec<usize>,
}

impl GroupLayout {
    pub fn model(&self) -> GroupModel {
        self.model
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Coefficients per channel.
    pub fn channel_len(&self) -> usize {
        self.n
    }

    /// Length of the stacked coefficient vector.
    pub fn n_coeffs(&self) -> usize {
        self.channels * self.n
    }

    pub fn n_groups(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Group boundaries into the duplicated vector; `offsets[g]..offsets[g+1]`.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// All group members concatenated in group order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn group(&self, g: usize) -> &[usize] {
        &self.members[self.offsets[g]..self.offsets[g + 1]]
    }

    pub fn groups(&self) -> impl Iterator<Item = &[usize]> {
        self.offsets.windows(2).map(move |w| &self.members[w[0]..w[1]])
    }
}

#[derive(Default)]
struct Builder {
    members: Vec<usize>,
    offsets: Vec<usize>,
}

impl Builder {
    fn push(&mut self, group: impl IntoIterator<Item = usize>) {
        if self.offsets.is_empty() {
            self.offsets.push(0);
        }
        self.members.extend(group);
        self.offsets.push(self.members.len());
    }
}

/// Builds the group set of `model` over `channels` copies of `tree`.
pub fn build_group_layout(tree: &TreeLayout, channels: usize, model: GroupModel) -> Result<GroupLayout> {
    if channels == 0 {
        return Err(Error::InvalidParameter("channel count must be >= 1".into()));
    }
    let n = tree.n_coeffs();
    let mut b = Builder::default();
    for i in 0..n {
        match model {
            GroupModel::Joint => b.push((0..channels).map(|t| t * n + i)),
            GroupModel::Tree => {
                for t in 0..channels {
                    match tree.parent(i) {
                        Some(p) => b.push([t * n + i, t * n + p]),
                        None => b.push([t * n + i]),
                    }
                }
            }
            GroupModel::Forest => match tree.parent(i) {
                Some(p) => b.push((0..channels).flat_map(|t| [t * n + i, t * n + p])),
                None => b.push((0..channels).map(|t| t * n + i)),
            },
        }
    }
    Ok(GroupLayout {
        model,
        channels,
        n,
        members: b.members,
        offsets: b.offsets,
    })
}

/// The duplication matrix `G` (one 1 per row) stored as a row-to-coefficient map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicationMap {
    row_to_coeff: Vec<usize>,
    multiplicity: Vec<usize>,
}

impl DuplicationMap {
    /// Number of rows `D`.
    pub fn rows(&self) -> usize {
        self.row_to_coeff.len()
    }

    pub fn n_coeffs(&self) -> usize {
        self.multiplicity.len()
    }

    pub fn row_to_coeff(&self) -> &[usize] {
        &self.row_to_coeff
    }

    /// Number of groups containing each coefficient (the diagonal of `G^T G`).
    pub fn multiplicity(&self) -> &[usize] {
        &self.multiplicity
    }

    /// `||G||_2^2`, equal to the largest multiplicity.
    pub fn max_multiplicity(&self) -> usize {
        self.multiplicity.iter().copied().max().unwrap_or(0)
    }

    /// `G theta`.
    pub fn expand(&self, theta: &[f64]) -> Result<Vec<f64>> {
        check_len("coefficient vector", self.n_coeffs(), theta.len())?;
        Ok(self.row_to_coeff.iter().map(|&c| theta[c]).collect())
    }

    /// `G^T w`.
    pub fn collapse(&self, w: &[f64]) -> Result<Vec<f64>> {
        check_len("duplicated vector", self.rows(), w.len())?;
        let mut out = vec![0.0; self.n_coeffs()];
        for (&c, v) in self.row_to_coeff.iter().zip(w) {
            out[c] += v;
        }
        Ok(out)
    }
}

pub fn build_duplication_map(layout: &GroupLayout) -> DuplicationMap {
    let mut multiplicity = vec![0; layout.n_coeffs()];
    for &c in layout.members() {
        multiplicity[c] += 1;
    }
    DuplicationMap {
        row_to_coeff: layout.members().to_vec(),
        multiplicity,
    }
}

pub fn expand(map: &DuplicationMap, theta: &[f64]) -> Result<Vec<f64>> {
    map.expand(theta)
}

pub fn collapse(map: &DuplicationMap, w: &[f64]) -> Result<Vec<f64>> {
    map.collapse(w)
}

fn check_offsets(len: usize, offsets: &[usize]) -> Result<()> {
    let ok = offsets.first() == Some(&0)
        && offsets.last() == Some(&len)
        && offsets.windows(2).all(|w| w[0] <= w[1]);
    if !ok {
        return Err(Error::InvalidParameter(
            "group offsets must start at 0, end at the vector length and be non-decreasing".into(),
        ));
    }
    Ok(())
}

/// Group soft-threshold in place: each block `w_g` becomes
/// `max(||w_g|| - tau, 0) * w_g / ||w_g||`.
pub(crate) fn shrinkgroup_in_place(w: &mut [f64], offsets: &[usize], tau: f64) {
    for win in offsets.windows(2) {
        let g = &mut w[win[0]..win[1]];
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= tau {
            g.iter_mut().for_each(|v| *v = 0.0);
        } else {
            let s = (norm - tau) / norm;
            g.iter_mut().for_each(|v| *v *= s);
        }
    }
}

/// Proximal map of `tau * sum_g ||w_g||_2` over the disjoint blocks delimited
/// by `offsets`.
pub fn shrinkgroup(w: &[f64], offsets: &[usize], tau: f64) -> Result<Vec<f64>> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter(format!("threshold must be >= 0, got {tau}")));
    }
    check_offsets(w.len(), offsets)?;
    let mut out = w.to_vec();
    shrinkgroup_in_place(&mut out, offsets, tau);
    Ok(out)
}

/// `sum_g ||w_g||_2`.
pub fn group_l21_norm(w: &[f64], offsets: &[usize]) -> Result<f64> {
    check_offsets(w.len(), offsets)?;
    Ok(l21_unchecked(w, offsets))
}

pub(crate) fn l21_unchecked(w: &[f64], offsets: &[usize]) -> f64 {
    offsets
        .windows(2)
        .map(|win| w[win[0]..win[1]].iter().map(|v| v * v).sum::<f64>().sqrt())
        .sum()
}
