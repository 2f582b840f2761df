//! Linear measurement operators `A` with forward and adjoint application.
//!
//! Three kinds are provided: dense sub-Gaussian matrices, row selections of
//! an orthonormal DCT (partial-frequency sampling), and block-diagonal
//! composites that apply one sub-operator per channel. All operators are
//! immutable after construction and safe to share between threads.

mod dct;
mod mask;

pub use mask::{
    make_variable_density_mask, normalized_frequency_radius, SamplingMask, DEFAULT_DECAY,
};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_len, Error, Result};
use crate::rng::rng_from;
use crate::signal::{dot, norm2, MultiChannelSignal, Shape};
use dct::OrthoDct;

/// Dense operators above this many entries are rejected.
pub const MAX_DENSE_ENTRIES: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    DenseSubgaussian,
    PartialFrequency,
    BlockDiagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    Gaussian,
    Bernoulli,
}

#[derive(Debug, Clone)]
enum Repr {
    Dense {
        rows: usize,
        cols: usize,
        // row-major
        data: Vec<f64>,
    },
    PartialFrequency {
        mask: SamplingMask,
        dct: OrthoDct,
    },
    BlockDiagonal {
        blocks: Vec<MeasurementOperator>,
        in_offsets: Vec<usize>,
        out_offsets: Vec<usize>,
    },
}

#[derive(Debug, Clone)]
pub struct MeasurementOperator {
    repr: Repr,
    seed: Option<u64>,
}

impl MeasurementOperator {
    /// Dense operator from a row-major matrix.
    pub fn dense(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter("dense operator needs rows, cols >= 1".into()));
        }
        check_dense_size(rows, cols)?;
        check_len("dense matrix entries", rows * cols, data.len())?;
        Ok(Self {
            repr: Repr::Dense { rows, cols, data },
            seed: None,
        })
    }

    /// Row selection of the orthonormal DCT on `mask.shape()`.
    pub fn partial_frequency(mask: SamplingMask) -> Self {
        let dct = OrthoDct::new(mask.shape());
        Self {
            repr: Repr::PartialFrequency { mask, dct },
            seed: None,
        }
    }

    /// Block-diagonal composite; block `t` acts on channel `t` only.
    pub fn block_diagonal(blocks: Vec<MeasurementOperator>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidParameter("block-diagonal operator needs >= 1 block".into()));
        }
        let mut in_offsets = vec![0];
        let mut out_offsets = vec![0];
        for b in &blocks {
            in_offsets.push(in_offsets.last().unwrap() + b.input_dim());
            out_offsets.push(out_offsets.last().unwrap() + b.output_dim());
        }
        Ok(Self {
            repr: Repr::BlockDiagonal {
                blocks,
                in_offsets,
                out_offsets,
            },
            seed: None,
        })
    }

    pub fn kind(&self) -> OperatorKind {
        match self.repr {
            Repr::Dense { .. } => OperatorKind::DenseSubgaussian,
            Repr::PartialFrequency { .. } => OperatorKind::PartialFrequency,
            Repr::BlockDiagonal { .. } => OperatorKind::BlockDiagonal,
        }
    }

    /// Seed used to realize a random operator, if any.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn input_dim(&self) -> usize {
        match &self.repr {
            Repr::Dense { cols, .. } => *cols,
            Repr::PartialFrequency { mask, .. } => mask.shape().len(),
            Repr::BlockDiagonal { in_offsets, .. } => *in_offsets.last().unwrap(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match &self.repr {
            Repr::Dense { rows, .. } => *rows,
            Repr::PartialFrequency { mask, .. } => mask.len(),
            Repr::BlockDiagonal { out_offsets, .. } => *out_offsets.last().unwrap(),
        }
    }

    pub fn blocks(&self) -> Option<&[MeasurementOperator]> {
        match &self.repr {
            Repr::BlockDiagonal { blocks, .. } => Some(blocks),
            _ => None,
        }
    }

    pub fn mask(&self) -> Option<&SamplingMask> {
        match &self.repr {
            Repr::PartialFrequency { mask, .. } => Some(mask),
            _ => None,
        }
    }

    /// Dense matrix entries (row-major), for the dense kind.
    pub fn matrix(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Dense { data, .. } => Some(data),
            _ => None,
        }
    }

    /// `A x`.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("operator input", self.input_dim(), x.len())?;
        let mut out = vec![0.0; self.output_dim()];
        self.forward_into(x, &mut out);
        Ok(out)
    }

    /// `A^T y`.
    pub fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len("operator output", self.output_dim(), y.len())?;
        let mut out = vec![0.0; self.input_dim()];
        self.adjoint_into(y, &mut out);
        Ok(out)
    }

    fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        match &self.repr {
            Repr::Dense { cols, data, .. } => {
                for (o, row) in out.iter_mut().zip(data.chunks_exact(*cols)) {
                    *o = dot(row, x);
                }
            }
            Repr::PartialFrequency { mask, dct } => {
                let mut buf = x.to_vec();
                dct.forward(&mut buf);
                for (o, &k) in out.iter_mut().zip(mask.selected()) {
                    *o = buf[k];
                }
            }
            Repr::BlockDiagonal {
                blocks,
                in_offsets,
                out_offsets,
            } => {
                for (t, b) in blocks.iter().enumerate() {
                    b.forward_into(
                        &x[in_offsets[t]..in_offsets[t + 1]],
                        &mut out[out_offsets[t]..out_offsets[t + 1]],
                    );
                }
            }
        }
    }

    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        match &self.repr {
            Repr::Dense { cols, data, .. } => {
                out.iter_mut().for_each(|v| *v = 0.0);
                for (yi, row) in y.iter().zip(data.chunks_exact(*cols)) {
                    if *yi != 0.0 {
                        for (o, a) in out.iter_mut().zip(row) {
                            *o += yi * a;
                        }
                    }
                }
            }
            Repr::PartialFrequency { mask, dct } => {
                out.iter_mut().for_each(|v| *v = 0.0);
                for (yi, &k) in y.iter().zip(mask.selected()) {
                    out[k] = *yi;
                }
                dct.inverse(out);
            }
            Repr::BlockDiagonal {
                blocks,
                in_offsets,
                out_offsets,
            } => {
                for (t, b) in blocks.iter().enumerate() {
                    b.adjoint_into(
                        &y[out_offsets[t]..out_offsets[t + 1]],
                        &mut out[in_offsets[t]..in_offsets[t + 1]],
                    );
                }
            }
        }
    }
}

fn check_dense_size(rows: usize, cols: usize) -> Result<()> {
    match rows.checked_mul(cols) {
        Some(n) if n <= MAX_DENSE_ENTRIES => Ok(()),
        _ => Err(Error::TooLarge(format!(
            "dense operator {rows}x{cols} exceeds {MAX_DENSE_ENTRIES} entries"
        ))),
    }
}

/// i.i.d. sub-Gaussian matrix with entry variance `1/rows`, so that
/// `E ||A x||^2 = ||x||^2`.
pub fn make_dense_subgaussian(
    rows: usize,
    cols: usize,
    distribution: Distribution,
    seed: u64,
) -> Result<MeasurementOperator> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidParameter("dense operator needs rows, cols >= 1".into()));
    }
    check_dense_size(rows, cols)?;
    let scale = 1.0 / (rows as f64).sqrt();
    let mut rng = rng_from(seed);
    let data: Vec<f64> = match distribution {
        Distribution::Gaussian => (0..rows * cols)
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect(),
        Distribution::Bernoulli => (0..rows * cols)
            .map(|_| if rng.random::<bool>() { scale } else { -scale })
            .collect(),
    };
    let mut op = MeasurementOperator::dense(rows, cols, data)?;
    op.seed = Some(seed);
    Ok(op)
}

/// `A x` for a multi-channel signal.
pub fn apply_forward(op: &MeasurementOperator, x: &MultiChannelSignal) -> Result<Vec<f64>> {
    op.forward(x.as_slice())
}

/// `A^T y`, reshaped as a signal with the given channel shape.
pub fn apply_adjoint(
    op: &MeasurementOperator,
    y: &[f64],
    shape: Shape,
    channels: usize,
) -> Result<MultiChannelSignal> {
    let v = op.adjoint(y)?;
    MultiChannelSignal::new(shape, channels, v)
}

/// Power-iteration estimate of the spectral norm `||A||_2`.
pub fn estimate_spectral_norm(op: &MeasurementOperator, iters: usize, seed: u64) -> Result<f64> {
    if iters == 0 {
        return Err(Error::InvalidParameter("power iteration needs iters >= 1".into()));
    }
    let mut rng = rng_from(seed);
    let mut v: Vec<f64> = (0..op.input_dim())
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut sigma = 0.0;
    for _ in 0..iters {
        let av = op.forward(&v)?;
        let w = op.adjoint(&av)?;
        let nw = norm2(&w);
        if nw == 0.0 {
            return Ok(0.0);
        }
        sigma = nw.sqrt();
        v = w.into_iter().map(|x| x / nw).collect();
    }
    Ok(sigma)
}
