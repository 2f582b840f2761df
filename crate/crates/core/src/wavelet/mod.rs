//! Orthonormal multi-level discrete wavelet transforms and their coefficient
//! trees.
//!
//! Coefficients use the Mallat layout. In 1D a vector of length `N` after `L`
//! levels holds `[a_L | d_L | d_{L-1} | ... | d_1]` where block `d_l` spans
//! `[N/2^l, N/2^(l-1))`; detail index `i` has children `2i` and `2i+1`. In 2D
//! the approximation occupies the top-left `R/2^L x C/2^L` block and each level
//! contributes three subbands (top-right, bottom-left, bottom-right) of size
//! `R/2^l x C/2^l`; coefficient `(r, c)` has children `(2r + a, 2c + b)`.
//! Grids are flattened row-major.

mod tree;

pub use tree::TreeLayout;

use crate::error::{check_len, Error, Result};
use crate::signal::Shape;

/// Default number of decomposition levels.
pub const DEFAULT_LEVELS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaveletFamily {
    Haar,
    /// Daubechies with two vanishing moments (4 taps), periodized.
    Daubechies4,
}

impl WaveletFamily {
    fn lowpass(self) -> &'static [f64] {
        const HAAR: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];
        const D4: [f64; 4] = [
            0.482_962_913_144_534_1,
            0.836_516_303_737_807_9,
            0.224_143_868_042_013_4,
            -0.129_409_522_551_260_37,
        ];
        match self {
            WaveletFamily::Haar => &HAAR,
            WaveletFamily::Daubechies4 => &D4,
        }
    }
}

impl std::str::FromStr for WaveletFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "haar" => Ok(Self::Haar),
            "db2" | "d4" | "daubechies4" => Ok(Self::Daubechies4),
            other => Err(Error::InvalidParameter(format!("unknown wavelet family '{other}'"))),
        }
    }
}

/// A wavelet analysis/synthesis pair `Phi`, `Phi^-1 = Phi^T` for one channel shape.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletBasis {
    family: WaveletFamily,
    levels: usize,
    shape: Shape,
    low: Vec<f64>,
    high: Vec<f64>,
}

fn check_dyadic(len: usize, levels: usize) -> Result<()> {
    let block = 1usize
        .checked_shl(levels as u32)
        .ok_or(Error::NonDyadic { len, levels })?;
    if len == 0 || len % block != 0 {
        return Err(Error::NonDyadic { len, levels });
    }
    Ok(())
}

impl WaveletBasis {
    pub fn new(family: WaveletFamily, levels: usize, shape: Shape) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidParameter("wavelet levels must be >= 1".into()));
        }
        match shape {
            Shape::Line(n) => check_dyadic(n, levels)?,
            Shape::Grid { rows, cols } => {
                check_dyadic(rows, levels)?;
                check_dyadic(cols, levels)?;
            }
        }
        let low = family.lowpass().to_vec();
        let taps = low.len();
        // Quadrature mirror: g_k = (-1)^k h_{L-1-k}
        let high = (0..taps)
            .map(|k| if k % 2 == 0 { low[taps - 1 - k] } else { -low[taps - 1 - k] })
            .collect();
        Ok(Self {
            family,
            levels,
            shape,
            low,
            high,
        })
    }

    /// Haar basis with the default level count.
    pub fn haar(shape: Shape) -> Result<Self> {
        Self::new(WaveletFamily::Haar, DEFAULT_LEVELS, shape)
    }

    pub fn family(&self) -> WaveletFamily {
        self.family
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shape.is_empty()
    }

    /// Analysis `theta = Phi x`.
    pub fn dwt(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("wavelet input", self.len(), x.len())?;
        let mut buf = x.to_vec();
        self.dwt_in_place(&mut buf);
        Ok(buf)
    }

    /// Synthesis `x = Phi^-1 theta`.
    pub fn idwt(&self, theta: &[f64]) -> Result<Vec<f64>> {
        check_len("wavelet coefficients", self.len(), theta.len())?;
        let mut buf = theta.to_vec();
        self.idwt_in_place(&mut buf);
        Ok(buf)
    }

    pub(crate) fn dwt_in_place(&self, buf: &mut [f64]) {
        let mut scratch = vec![0.0; self.max_line()];
        let mut line = vec![0.0; self.max_line()];
        match self.shape {
            Shape::Line(n) => {
                for l in 0..self.levels {
                    let len = n >> l;
                    self.analyze(&mut buf[..len], &mut scratch[..len]);
                }
            }
            Shape::Grid { rows, cols } => {
                for l in 0..self.levels {
                    let (r, c) = (rows >> l, cols >> l);
                    for i in 0..r {
                        self.analyze(&mut buf[i * cols..i * cols + c], &mut scratch[..c]);
                    }
                    for j in 0..c {
                        for i in 0..r {
                            line[i] = buf[i * cols + j];
                        }
                        self.analyze(&mut line[..r], &mut scratch[..r]);
                        for i in 0..r {
                            buf[i * cols + j] = line[i];
                        }
                    }
                }
            }
        }
    }

    pub(crate) fn idwt_in_place(&self, buf: &mut [f64]) {
        let mut scratch = vec![0.0; self.max_line()];
        let mut line = vec![0.0; self.max_line()];
        match self.shape {
            Shape::Line(n) => {
                for l in (0..self.levels).rev() {
                    let len = n >> l;
                    self.synthesize(&mut buf[..len], &mut scratch[..len]);
                }
            }
            Shape::Grid { rows, cols } => {
                for l in (0..self.levels).rev() {
                    let (r, c) = (rows >> l, cols >> l);
                    for j in 0..c {
                        for i in 0..r {
                            line[i] = buf[i * cols + j];
                        }
                        self.synthesize(&mut line[..r], &mut scratch[..r]);
                        for i in 0..r {
                            buf[i * cols + j] = line[i];
                        }
                    }
                    for i in 0..r {
                        self.synthesize(&mut buf[i * cols..i * cols + c], &mut scratch[..c]);
                    }
                }
            }
        }
    }

    fn max_line(&self) -> usize {
        match self.shape {
            Shape::Line(n) => n,
            Shape::Grid { rows, cols } => rows.max(cols),
        }
    }

    /// One periodized analysis step: `x` -> `[approx | detail]`.
    fn analyze(&self, x: &mut [f64], scratch: &mut [f64]) {
        let n = x.len();
        let half = n / 2;
        for i in 0..half {
            let (mut a, mut d) = (0.0, 0.0);
            for (k, (h, g)) in self.low.iter().zip(&self.high).enumerate() {
                let v = x[(2 * i + k) % n];
                a += h * v;
                d += g * v;
            }
            scratch[i] = a;
            scratch[half + i] = d;
        }
        x.copy_from_slice(&scratch[..n]);
    }

    /// Inverse of [`Self::analyze`] (transpose of an orthogonal matrix).
    fn synthesize(&self, x: &mut [f64], scratch: &mut [f64]) {
        let n = x.len();
        let half = n / 2;
        scratch[..n].iter_mut().for_each(|v| *v = 0.0);
        for i in 0..half {
            let (a, d) = (x[i], x[half + i]);
            for (k, (h, g)) in self.low.iter().zip(&self.high).enumerate() {
                scratch[(2 * i + k) % n] += h * a + g * d;
            }
        }
        x.copy_from_slice(&scratch[..n]);
    }

    /// Parent/children maps over this basis' coefficient layout.
    pub fn tree_layout(&self) -> TreeLayout {
        TreeLayout::for_basis(self)
    }
}

/// Analysis of a single channel.
pub fn dwt(basis: &WaveletBasis, x: &[f64]) -> Result<Vec<f64>> {
    basis.dwt(x)
}

/// Synthesis of a single channel.
pub fn idwt(basis: &WaveletBasis, theta: &[f64]) -> Result<Vec<f64>> {
    basis.idwt(theta)
}

pub fn build_tree_layout(basis: &WaveletBasis) -> TreeLayout {
    basis.tree_layout()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_constant_vector() {
        let b = WaveletBasis::new(WaveletFamily::Haar, 2, Shape::Line(4)).unwrap();
        let theta = b.dwt(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        for (a, e) in theta.iter().zip([2.0, 0.0, 0.0, 0.0]) {
            assert!((a - e).abs() < 1e-12);
        }
        let x = b.idwt(&[2.0, 0.0, 0.0, 0.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_image_has_no_details() {
        for family in [WaveletFamily::Haar, WaveletFamily::Daubechies4] {
            let shape = Shape::Grid { rows: 16, cols: 8 };
            let b = WaveletBasis::new(family, 3, shape).unwrap();
            let theta = b.dwt(&vec![0.7; 128]).unwrap();
            // approximation block is 2x1 at the top-left
            for r in 0..16 {
                for c in 0..8 {
                    if !(r < 2 && c < 1) {
                        assert!(theta[r * 8 + c].abs() < 1e-12, "({r},{c})");
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_non_dyadic() {
        assert!(matches!(
            WaveletBasis::new(WaveletFamily::Haar, 3, Shape::Line(12)),
            Err(Error::NonDyadic { len: 12, levels: 3 })
        ));
        assert!(WaveletBasis::new(WaveletFamily::Haar, 1, Shape::Grid { rows: 4, cols: 5 }).is_err());
        assert!(WaveletBasis::new(WaveletFamily::Haar, 0, Shape::Line(8)).is_err());
    }

    #[test]
    fn shape_mismatch_rejected() {
        let b = WaveletBasis::haar(Shape::Line(16)).unwrap();
        assert!(b.dwt(&[0.0; 8]).is_err());
        assert!(b.idwt(&[0.0; 32]).is_err());
    }

    #[test]
    fn unit_coefficient_synthesizes_unit_norm_atom() {
        for family in [WaveletFamily::Haar, WaveletFamily::Daubechies4] {
            let b = WaveletBasis::new(family, 3, Shape::Line(32)).unwrap();
            for i in 0..32 {
                let mut e = vec![0.0; 32];
                e[i] = 1.0;
                let atom = b.idwt(&e).unwrap();
                let n: f64 = atom.iter().map(|v| v * v).sum();
                assert!((n - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn family_parses() {
        assert_eq!("Haar".parse::<WaveletFamily>().unwrap(), WaveletFamily::Haar);
        assert_eq!("db2".parse::<WaveletFamily>().unwrap(), WaveletFamily::Daubechies4);
        assert!("sym8".parse::<WaveletFamily>().is_err());
    }
}
