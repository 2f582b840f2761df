//! Structured-sparsity compressive sensing for multi-channel data.
//!
//! Signals with `T` channels whose wavelet coefficients share one support
//! that is also a rooted subtree ("forest-sparse" data) can be recovered
//! from fewer measurements than models that exploit only the shared
//! support (joint), only the tree (per-channel tree), or neither (standard).
//!
//! The crate provides:
//! - [`operators`]: dense sub-Gaussian, partial-DCT and block-diagonal
//!   measurement operators plus variable-density sampling masks;
//! - [`wavelet`]: orthonormal multi-level wavelets and their coefficient trees;
//! - [`groups`]: joint/tree/forest group sets, the duplication map and the
//!   group soft-threshold;
//! - [`solvers`]: FISTA for the l1 and l2,1 models, the overlapping-group
//!   solver for tree and forest models, and TV-combined variants;
//! - [`synth`]: generators for standard, joint, tree and forest-sparse data;
//! - [`theory`]: subtree counts, measurement bounds and RIP concentration
//!   experiments;
//! - [`bench`]: metrics, experiment drivers, PGM/PPM I/O and CSV/SVG output.

pub mod bench;
pub mod error;
pub mod groups;
pub mod model;
pub mod operators;
pub mod rng;
pub mod signal;
pub mod solvers;
pub mod synth;
pub mod theory;
pub mod wavelet;

pub use error::{Error, Result};
pub use model::SparsityModel;
pub use signal::{MultiChannelSignal, Shape};
