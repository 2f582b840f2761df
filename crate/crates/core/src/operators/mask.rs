//! Variable-density sampling masks over DCT frequency indices.
//!
//! The DC coefficient sits at index 0 (the corner of the DCT spectrum), so
//! "distance from the spectrum center" is the Euclidean norm of the
//! frequency index. Sampling weights follow a polynomial radial decay
//! `(1 + f / f_max)^(-decay)`; the DC index is always selected.

use rand::seq::index::sample_weighted;

use crate::error::{Error, Result};
use crate::rng::rng_from;
use crate::signal::Shape;

/// Default radial decay exponent.
pub const DEFAULT_DECAY: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingMask {
    shape: Shape,
    selected: Vec<usize>,
    ratio: f64,
}

impl SamplingMask {
    /// Mask built from an explicit index set (sorted and deduplicated).
    pub fn from_indices(shape: Shape, mut selected: Vec<usize>) -> Result<Self> {
        selected.sort_unstable();
        selected.dedup();
        if let Some(&last) = selected.last() {
            if last >= shape.len() {
                return Err(Error::InvalidParameter(format!(
                    "mask index {last} out of range for {} frequencies",
                    shape.len()
                )));
            }
        }
        if selected.is_empty() {
            return Err(Error::InvalidParameter("mask selects no frequency".into()));
        }
        let ratio = selected.len() as f64 / shape.len() as f64;
        Ok(Self {
            shape,
            selected,
            ratio,
        })
    }

    /// Every frequency selected.
    pub fn full(shape: Shape) -> Self {
        Self {
            shape,
            selected: (0..shape.len()).collect(),
            ratio: 1.0,
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// Selected frequency indices, ascending.
    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }
}

/// Normalized distance of each frequency index from DC, in `[0, 1]`.
pub fn normalized_frequency_radius(shape: Shape) -> Vec<f64> {
    match shape {
        Shape::Line(n) => {
            let fmax = (n.max(2) - 1) as f64;
            (0..n).map(|k| k as f64 / fmax).collect()
        }
        Shape::Grid { rows, cols } => {
            let fr = (rows.max(1) - 1) as f64;
            let fc = (cols.max(1) - 1) as f64;
            let fmax = (fr * fr + fc * fc).sqrt().max(1.0);
            let mut out = Vec::with_capacity(rows * cols);
            for r in 0..rows {
                for c in 0..cols {
                    out.push(((r * r + c * c) as f64).sqrt() / fmax);
                }
            }
            out
        }
    }
}

/// Draws `round(ratio * total)` frequency indices without replacement with
/// probability proportional to `(1 + f / f_max)^(-decay_exponent)`.
pub fn make_variable_density_mask(
    shape: Shape,
    ratio: f64,
    decay_exponent: f64,
    seed: u64,
) -> Result<SamplingMask> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "sampling ratio must lie in (0, 1], got {ratio}"
        )));
    }
    if !(decay_exponent >= 0.0) || !decay_exponent.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "decay exponent must be finite and >= 0, got {decay_exponent}"
        )));
    }
    let total = shape.len();
    if total == 0 {
        return Err(Error::InvalidParameter("empty sampling grid".into()));
    }
    let count = ((ratio * total as f64).round() as usize).clamp(1, total);
    if count == total {
        return Ok(SamplingMask::full(shape));
    }
    let radius = normalized_frequency_radius(shape);
    let mut rng = rng_from(seed);
    // DC is forced; the remaining budget is drawn from indices 1..total.
    let picked = sample_weighted(
        &mut rng,
        total - 1,
        |i| (1.0 + radius[i + 1]).powf(-decay_exponent),
        count - 1,
    )
    .map_err(|e| Error::InvalidParameter(format!("mask weights: {e}")))?;
    let mut selected: Vec<usize> = picked.into_iter().map(|i| i + 1).collect();
    selected.push(0);
    selected.sort_unstable();
    Ok(SamplingMask {
        shape,
        selected,
        ratio: count as f64 / total as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_ratio_selects_everything() {
        let m = make_variable_density_mask(Shape::Grid { rows: 8, cols: 8 }, 1.0, 3.0, 1).unwrap();
        assert_eq!(m.selected(), (0..64).collect::<Vec<_>>().as_slice());
    }

    #[test]
    fn cardinality_is_exact_and_dc_present() {
        let shape = Shape::Grid { rows: 16, cols: 16 };
        for seed in 0..10 {
            let m = make_variable_density_mask(shape, 0.3, 3.0, seed).unwrap();
            assert_eq!(m.len(), (0.3f64 * 256.0).round() as usize);
            assert_eq!(m.selected()[0], 0);
            assert!(m.selected().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn rejects_bad_ratio() {
        assert!(make_variable_density_mask(Shape::Line(8), 0.0, 1.0, 0).is_err());
        assert!(make_variable_density_mask(Shape::Line(8), 1.5, 1.0, 0).is_err());
        assert!(make_variable_density_mask(Shape::Line(8), 0.5, -1.0, 0).is_err());
    }

    #[test]
    fn deterministic_under_seed() {
        let a = make_variable_density_mask(Shape::Line(128), 0.25, 3.0, 9).unwrap();
        let b = make_variable_density_mask(Shape::Line(128), 0.25, 3.0, 9).unwrap();
        assert_eq!(a, b);
    }
}
