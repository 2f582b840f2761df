//! Multi-channel signals stored as one stacked vector `[x_1; x_2; ...; x_T]`.

use crate::error::{check_len, Error, Result};

/// Shape of a single channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    /// 1D signal of the given length.
    Line(usize),
    /// 2D image, row-major.
    Grid { rows: usize, cols: usize },
}

impl Shape {
    pub fn len(&self) -> usize {
        match *self {
            Shape::Line(n) => n,
            Shape::Grid { rows, cols } => rows * cols,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_grid(&self) -> bool {
        matches!(self, Shape::Grid { .. })
    }
}

/// `T` channels of `N` real values each.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiChannelSignal {
    shape: Shape,
    channels: usize,
    data: Vec<f64>,
}

impl MultiChannelSignal {
    pub fn new(shape: Shape, channels: usize, data: Vec<f64>) -> Result<Self> {
        if channels == 0 {
            return Err(Error::InvalidParameter("channel count must be >= 1".into()));
        }
        check_len("stacked signal", shape.len() * channels, data.len())?;
        Ok(Self {
            shape,
            channels,
            data,
        })
    }

    pub fn zeros(shape: Shape, channels: usize) -> Self {
        Self {
            shape,
            channels,
            data: vec![0.0; shape.len() * channels],
        }
    }

    /// Builds a signal from separate channel vectors of equal length.
    pub fn from_channels(shape: Shape, channels: &[Vec<f64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(shape.len() * channels.len());
        for c in channels {
            check_len("channel", shape.len(), c.len())?;
            data.extend_from_slice(c);
        }
        Self::new(shape, channels.len(), data)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Values per channel (`N`).
    pub fn channel_len(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn channel(&self, t: usize) -> &[f64] {
        let n = self.channel_len();
        &self.data[t * n..(t + 1) * n]
    }

    pub fn channel_mut(&mut self, t: usize) -> &mut [f64] {
        let n = self.channel_len();
        &mut self.data[t * n..(t + 1) * n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Squared l2 norm of each channel.
    pub fn channel_energies(&self) -> Vec<f64> {
        (0..self.channels)
            .map(|t| self.channel(t).iter().map(|v| v * v).sum())
            .collect()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
