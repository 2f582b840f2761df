use crate::error::{Error, Result};
use crate::signal::Shape;

use super::WaveletBasis;

/// Parent/children index maps over a coefficient vector.
///
/// Approximation coefficients belong to no tree: they have no parent, no
/// children, and are listed separately in [`TreeLayout::approx`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeLayout {
    n_coeffs: usize,
    levels: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
    approx: Vec<usize>,
}

impl TreeLayout {
    pub(crate) fn for_basis(basis: &WaveletBasis) -> Self {
        let levels = basis.levels();
        match basis.shape() {
            Shape::Line(n) => {
                let na = n >> levels;
                let mut parent = vec![None; n];
                let mut children = vec![Vec::new(); n];
                for i in na..n {
                    if i >= 2 * na {
                        parent[i] = Some(i / 2);
                    }
                    if 2 * i < n {
                        children[i] = vec![2 * i, 2 * i + 1];
                    }
                }
                Self {
                    n_coeffs: n,
                    levels,
                    parent,
                    children,
                    roots: (na..2 * na).collect(),
                    approx: (0..na).collect(),
                }
            }
            Shape::Grid { rows, cols } => {
                let (ra, ca) = (rows >> levels, cols >> levels);
                let n = rows * cols;
                let mut parent = vec![None; n];
                let mut children = vec![Vec::new(); n];
                let mut roots = Vec::new();
                let mut approx = Vec::new();
                for r in 0..rows {
                    for c in 0..cols {
                        let idx = r * cols + c;
                        if r < ra && c < ca {
                            approx.push(idx);
                            continue;
                        }
                        if r < 2 * ra && c < 2 * ca {
                            roots.push(idx);
                        } else {
                            parent[idx] = Some((r / 2) * cols + c / 2);
                        }
                        if 2 * r < rows && 2 * c < cols {
                            children[idx] = vec![
                                2 * r * cols + 2 * c,
                                2 * r * cols + 2 * c + 1,
                                (2 * r + 1) * cols + 2 * c,
                                (2 * r + 1) * cols + 2 * c + 1,
                            ];
                        }
                    }
                }
                Self {
                    n_coeffs: n,
                    levels,
                    parent,
                    children,
                    roots,
                    approx,
                }
            }
        }
    }

    /// Builds a layout from an explicit parent map. Nodes without a parent
    /// are roots; `approx` lists indices excluded from every tree.
    pub fn from_parents(parent: Vec<Option<usize>>, mut approx: Vec<usize>) -> Result<Self> {
        let n = parent.len();
        approx.sort_unstable();
        approx.dedup();
        let mut is_approx = vec![false; n];
        for &a in &approx {
            if a >= n || parent[a].is_some() {
                return Err(Error::InvalidParameter(format!("bad approximation index {a}")));
            }
            is_approx[a] = true;
        }
        let mut children = vec![Vec::new(); n];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n || p == i || is_approx[p] {
                    return Err(Error::InvalidParameter(format!("bad parent {p} for node {i}")));
                }
                children[p].push(i);
            }
        }
        let roots: Vec<usize> = (0..n).filter(|&i| parent[i].is_none() && !is_approx[i]).collect();
        // depth of each node; also detects cycles
        let mut levels = 0;
        for i in 0..n {
            let mut depth = 1;
            let mut cur = i;
            while let Some(p) = parent[cur] {
                cur = p;
                depth += 1;
                if depth > n {
                    return Err(Error::InvalidParameter("parent map has a cycle".into()));
                }
            }
            if !is_approx[i] {
                levels = levels.max(depth);
            }
        }
        Ok(Self {
            n_coeffs: n,
            levels,
            parent,
            children,
            roots,
            approx,
        })
    }

    /// Complete binary tree with `depth` levels (node `i` has children
    /// `2i+1`, `2i+2`); a single root and no approximation band.
    pub fn complete_binary(depth: usize) -> Result<Self> {
        if depth == 0 || depth > 20 {
            return Err(Error::InvalidParameter(format!("unsupported depth {depth}")));
        }
        let n = (1usize << depth) - 1;
        let parent = (0..n).map(|i| if i == 0 { None } else { Some((i - 1) / 2) }).collect();
        Self::from_parents(parent, Vec::new())
    }

    pub fn n_coeffs(&self) -> usize {
        self.n_coeffs
    }

    /// Depth of the deepest tree (number of node generations).
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    /// Approximation-band indices (outside every tree).
    pub fn approx(&self) -> &[usize] {
        &self.approx
    }

    pub fn is_approx(&self, i: usize) -> bool {
        self.approx.binary_search(&i).is_ok()
    }

    /// Tree nodes (everything outside the approximation band), ascending.
    pub fn tree_nodes(&self) -> Vec<usize> {
        let mut approx = vec![false; self.n_coeffs];
        for &a in &self.approx {
            approx[a] = true;
        }
        (0..self.n_coeffs).filter(|&i| !approx[i]).collect()
    }

    /// Number of nodes in the subtree rooted at `i` (including `i`).
    pub fn subtree_size(&self, i: usize) -> usize {
        let mut stack = vec![i];
        let mut count = 0;
        while let Some(v) = stack.pop() {
            count += 1;
            stack.extend_from_slice(&self.children[v]);
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::super::{WaveletBasis, WaveletFamily};
    use super::*;

    fn check_duality(t: &TreeLayout) {
        for i in 0..t.n_coeffs() {
            for &c in t.children(i) {
                assert_eq!(t.parent(c), Some(i));
            }
            if let Some(p) = t.parent(i) {
                assert!(t.children(p).contains(&i));
            }
        }
        for &r in t.roots() {
            assert_eq!(t.parent(r), None);
        }
    }

    #[test]
    fn line_n8_levels2() {
        let b = WaveletBasis::new(WaveletFamily::Haar, 2, Shape::Line(8)).unwrap();
        let t = b.tree_layout();
        assert_eq!(t.approx(), &[0, 1]);
        assert_eq!(t.roots(), &[2, 3]);
        for &r in t.roots() {
            assert_eq!(t.children(r).len(), 2);
            for &c in t.children(r) {
                assert!(t.children(c).is_empty());
            }
        }
        assert_eq!(t.levels(), 2);
        check_duality(&t);
    }

    #[test]
    fn grid_8x8_levels2_quadtree() {
        let b = WaveletBasis::new(WaveletFamily::Haar, 2, Shape::Grid { rows: 8, cols: 8 }).unwrap();
        let t = b.tree_layout();
        assert_eq!(t.approx().len(), 4);
        assert_eq!(t.roots().len(), 12);
        for &r in t.roots() {
            assert_eq!(t.children(r).len(), 4);
        }
        assert_eq!(t.levels(), 2);
        check_duality(&t);
    }

    #[test]
    fn children_stay_in_subband() {
        let rows = 16;
        let b = WaveletBasis::new(WaveletFamily::Haar, 3, Shape::Grid { rows, cols: rows }).unwrap();
        let t = b.tree_layout();
        // (r, c) in top-right band at level 2: rows [0,4), cols [4,8)
        let idx = 1 * rows + 5;
        for &c in t.children(idx) {
            let (cr, cc) = (c / rows, c % rows);
            assert!(cr < 8 && (8..16).contains(&cc));
        }
        check_duality(&t);
    }

    #[test]
    fn complete_binary_tree_shape() {
        let t = TreeLayout::complete_binary(3).unwrap();
        assert_eq!(t.n_coeffs(), 7);
        assert_eq!(t.roots(), &[0]);
        assert_eq!(t.children(0), &[1, 2]);
        assert_eq!(t.levels(), 3);
        assert_eq!(t.subtree_size(0), 7);
        check_duality(&t);
    }

    #[test]
    fn cycle_rejected() {
        assert!(TreeLayout::from_parents(vec![Some(1), Some(0)], vec![]).is_err());
    }
}
