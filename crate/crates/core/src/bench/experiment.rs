//! Monte-Carlo experiment drivers.
//!
//! Every trial owns its random streams, derived from the root seed and the
//! trial coordinates, so rows do not depend on scheduling or worker count.
//! Rows are ordered by ratio (or measurement count), then model, then trial.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use crate::bench::io::read_image;
use crate::bench::metrics::{estimated_support, snr, support_f1};
use crate::error::{Error, Result};
use crate::model::SparsityModel;
use crate::operators::{
    make_dense_subgaussian, make_variable_density_mask, Distribution, MeasurementOperator,
    DEFAULT_DECAY,
};
use crate::rng::{derive_seed, stream};
use crate::signal::{MultiChannelSignal, Shape};
use crate::solvers::{solve, Problem, SolverConfig};
use crate::synth::{generate_instance, measure, AmplitudeLaw, SynthesisSpec};
use crate::theory::{measurement_bound, BoundParams};
use crate::wavelet::{WaveletBasis, WaveletFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Compare,
    Sweep,
    Phase,
    Image,
    Bounds,
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "compare" => Ok(Self::Compare),
            "sweep" => Ok(Self::Sweep),
            "phase" => Ok(Self::Phase),
            "image" => Ok(Self::Image),
            "bounds" => Ok(Self::Bounds),
            other => Err(Error::InvalidParameter(format!("unknown experiment '{other}'"))),
        }
    }
}

/// How each channel is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorFamily {
    /// Per-channel variable-density DCT masks (distinct mask per channel).
    VariableDensity { decay: f64 },
    /// Per-channel Gaussian blocks with `round(ratio * N)` rows.
    Gaussian,
}

/// Synthetic data description; the seed inside `synthesis` is ignored and
/// replaced per trial.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub shape: Shape,
    pub family: WaveletFamily,
    pub levels: usize,
    pub synthesis: SynthesisSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Synthetic(SyntheticData),
    Image {
        path: PathBuf,
        crop: bool,
        family: WaveletFamily,
        levels: usize,
        noise_sigma: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub experiment: ExperimentKind,
    pub data: DataSource,
    pub models: Vec<SparsityModel>,
    pub sampling_ratios: Vec<f64>,
    /// Per-channel measurement counts for phase grids.
    pub measurements: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub solver: SolverConfig,
    pub operator: OperatorFamily,
    /// Support threshold as a fraction of the largest coefficient.
    pub support_fraction: f64,
    /// Phase-transition success threshold on support F1.
    pub success_f1: f64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Record wall-clock times. Off by default so that CSV output is
    /// reproducible byte for byte.
    pub record_timing: bool,
    pub bounds: BoundsSpec,
}

/// Grid for the measurement-bound table.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsSpec {
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub channels: Vec<usize>,
    pub delta: f64,
    pub t: f64,
}

impl Default for BoundsSpec {
    fn default() -> Self {
        Self {
            n: vec![256, 1024, 4096],
            k: vec![4, 8, 16, 32],
            channels: vec![1, 2, 4],
            delta: 0.5,
            t: 1.0,
        }
    }
}

impl ExperimentSpec {
    /// Forest-sparse 1D data with per-channel variable-density sampling.
    pub fn synthetic(experiment: ExperimentKind, channels: usize, n: usize, k: usize, seed: u64) -> Self {
        let mut synthesis = SynthesisSpec::new(channels, k, SparsityModel::Forest, 0);
        synthesis.amplitude = DEFAULT_AMPLITUDE;
        Self {
            experiment,
            data: DataSource::Synthetic(SyntheticData {
                shape: Shape::Line(n),
                family: WaveletFamily::Haar,
                levels: full_depth(n),
                synthesis,
            }),
            models: SparsityModel::ALL.to_vec(),
            sampling_ratios: vec![0.3],
            measurements: Vec::new(),
            trials: 20,
            seed,
            solver: SolverConfig::default(),
            operator: OperatorFamily::VariableDensity {
                decay: DEFAULT_DECAY,
            },
            support_fraction: DEFAULT_SUPPORT_FRACTION,
            success_f1: 0.99,
            workers: None,
            record_timing: false,
            bounds: BoundsSpec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.trials == 0 {
            return bad("trials must be >= 1");
        }
        if self.models.is_empty() && self.experiment != ExperimentKind::Bounds {
            return bad("at least one model is required");
        }
        if self.sampling_ratios.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
            return bad("sampling ratios must lie in (0, 1]");
        }
        if !(self.support_fraction > 0.0 && self.support_fraction < 1.0) {
            return bad("support fraction must lie in (0, 1)");
        }
        if self.workers == Some(0) {
            return bad("workers must be >= 1");
        }
        match self.experiment {
            ExperimentKind::Sweep if self.sampling_ratios.len() < 2 => bad("a sweep needs >= 2 ratios"),
            ExperimentKind::Phase if self.measurements.is_empty() => bad("a phase grid needs measurement counts"),
            ExperimentKind::Compare | ExperimentKind::Image if self.sampling_ratios.is_empty() => {
                bad("at least one sampling ratio is required")
            }
            _ => Ok(()),
        }
    }
}

/// Magnitude law used by the synthetic experiments.
pub const DEFAULT_AMPLITUDE: AmplitudeLaw = AmplitudeLaw::UniformMagnitude { low: 1.0, high: 4.0 };

pub const DEFAULT_SUPPORT_FRACTION: f64 = 0.1;

/// Deepest dyadic decomposition of a length-`n` signal leaving a
/// length-2 approximation band.
pub fn full_depth(n: usize) -> usize {
    if n < 4 {
        return 1;
    }
    (usize::BITS - 1 - n.leading_zeros()) as usize - 1
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub model: SparsityModel,
    pub ratio: f64,
    pub trial: usize,
    /// `-inf` marks a failed solve.
    pub snr_db: f64,
    pub support_f1: f64,
    pub iters: usize,
    pub wall_time_s: f64,
}

/// Success probabilities over a grid of per-channel measurement counts.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub models: Vec<SparsityModel>,
    pub measurements: Vec<usize>,
    /// `raw[model][m]`: observed success fraction.
    pub raw: Vec<Vec<f64>>,
    /// Running maximum of `raw` along the measurement axis.
    pub monotone: Vec<Vec<f64>>,
    /// Smallest measurement count with monotone success >= 0.9.
    pub m90: Vec<Option<usize>>,
}

impl PhaseGrid {
    pub fn m90_of(&self, model: SparsityModel) -> Option<usize> {
        self.models
            .iter()
            .position(|&m| m == model)
            .and_then(|i| self.m90[i])
    }
}

/// One entry of the bound table.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub model: SparsityModel,
    pub n: usize,
    pub k: usize,
    pub channels: usize,
    pub bound: f64,
}

struct TrialData {
    basis: WaveletBasis,
    x: MultiChannelSignal,
    /// Stacked true support in coefficient space.
    support: Vec<usize>,
}

fn load_trial(spec: &ExperimentSpec, trial: usize, image: Option<&MultiChannelSignal>) -> Result<TrialData> {
    match &spec.data {
        DataSource::Synthetic(d) => {
            let basis = WaveletBasis::new(d.family, d.levels, d.shape)?;
            let mut s = d.synthesis.clone();
            s.seed = derive_seed(spec.seed, &[stream::DATA, trial as u64]);
            let inst = generate_instance(&s, &basis)?;
            let support = inst.stacked_support();
            Ok(TrialData {
                basis,
                x: inst.x,
                support,
            })
        }
        DataSource::Image { family, levels, .. } => {
            let x = image.expect("image loaded").clone();
            let basis = WaveletBasis::new(*family, *levels, x.shape())?;
            let mut theta = Vec::with_capacity(x.len());
            for t in 0..x.channels() {
                theta.extend(basis.dwt(x.channel(t))?);
            }
            let support = estimated_support(&theta, spec.support_fraction);
            Ok(TrialData { basis, x, support })
        }
    }
}

fn noise_sigma(spec: &ExperimentSpec) -> f64 {
    match &spec.data {
        DataSource::Synthetic(d) => d.synthesis.noise_sigma,
        DataSource::Image { noise_sigma, .. } => *noise_sigma,
    }
}

/// Block-diagonal operator over the channels, `m` rows per channel for
/// Gaussian blocks or `ratio` for masks.
fn build_operator(
    spec: &ExperimentSpec,
    shape: Shape,
    channels: usize,
    ratio: f64,
    m: usize,
    seed: u64,
) -> Result<(MeasurementOperator, Option<f64>)> {
    let mut blocks = Vec::with_capacity(channels);
    for t in 0..channels {
        let s = derive_seed(seed, &[t as u64]);
        blocks.push(match spec.operator {
            OperatorFamily::VariableDensity { decay } => {
                MeasurementOperator::partial_frequency(make_variable_density_mask(shape, ratio, decay, s)?)
            }
            OperatorFamily::Gaussian => make_dense_subgaussian(m, shape.len(), Distribution::Gaussian, s)?,
        });
    }
    // Row subsets of an orthonormal transform have unit norm.
    let norm = match spec.operator {
        OperatorFamily::VariableDensity { .. } => Some(1.0),
        OperatorFamily::Gaussian => None,
    };
    Ok((MeasurementOperator::block_diagonal(blocks)?, norm))
}

/// Solves one (ratio, trial) cell for every model.
fn run_cell(
    spec: &ExperimentSpec,
    ratio: f64,
    m: usize,
    trial: usize,
    image: Option<&MultiChannelSignal>,
) -> Result<Vec<ResultRow>> {
    let data = load_trial(spec, trial, image)?;
    let shape = data.x.shape();
    let channels = data.x.channels();
    let cell = [ratio.to_bits(), m as u64, trial as u64];
    let op_seed = derive_seed(spec.seed, &[&[stream::OPERATOR][..], &cell].concat());
    let (op, norm) = build_operator(spec, shape, channels, ratio, m, op_seed)?;
    let noise_seed = derive_seed(spec.seed, &[&[stream::NOISE][..], &cell].concat());
    let b = measure(data.x.as_slice(), &op, noise_sigma(spec), noise_seed)?;
    let problem = Problem::new(&op, &b, &data.basis, channels)?;
    let mut config = spec.solver.clone();
    config.seed = derive_seed(spec.seed, &[&[stream::SOLVER][..], &cell].concat());
    if config.op_norm.is_none() && config.rho.is_none() {
        config.op_norm = match norm {
            Some(v) => Some(v),
            None => Some(crate::operators::estimate_spectral_norm(&op, config.power_iters.max(1), config.seed)?),
        };
    }

    let mut rows = Vec::with_capacity(spec.models.len());
    for &model in &spec.models {
        let start = Instant::now();
        let row = match solve(&problem, &config, model) {
            Ok(res) => {
                let x_hat = res.x_hat.as_slice();
                let mut theta = Vec::with_capacity(x_hat.len());
                for chunk in x_hat.chunks_exact(shape.len()) {
                    theta.extend(data.basis.dwt(chunk)?);
                }
                let snr_db = snr(data.x.as_slice(), x_hat).unwrap_or(f64::NEG_INFINITY);
                let f1 = if data.support.is_empty() {
                    0.0
                } else {
                    support_f1(&data.support, &theta, spec.support_fraction)?
                };
                ResultRow {
                    model,
                    ratio,
                    trial,
                    snr_db: if snr_db.is_nan() { f64::NEG_INFINITY } else { snr_db },
                    support_f1: f1,
                    iters: res.iters_run,
                    wall_time_s: 0.0,
                }
            }
            Err(Error::Divergence { iter }) => ResultRow {
                model,
                ratio,
                trial,
                snr_db: f64::NEG_INFINITY,
                support_f1: 0.0,
                iters: iter,
                wall_time_s: 0.0,
            },
            Err(e) => return Err(e),
        };
        rows.push(ResultRow {
            wall_time_s: if spec.record_timing { start.elapsed().as_secs_f64() } else { 0.0 },
            ..row
        });
    }
    Ok(rows)
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs every (ratio or M, trial) cell and orders the rows.
fn run_grid(spec: &ExperimentSpec, cells: &[(f64, usize)]) -> Result<Vec<ResultRow>> {
    let image = match &spec.data {
        DataSource::Image { path, crop, .. } => Some(read_image(path, *crop)?),
        _ => None,
    };
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..spec.trials).map(move |t| (c, t)))
        .collect();
    let results: Vec<Result<Vec<ResultRow>>> = in_pool(spec.workers, || {
        jobs.par_iter()
            .map(|&(c, t)| run_cell(spec, cells[c].0, cells[c].1, t, image.as_ref()))
            .collect()
    })?;
    let mut per_cell: Vec<Vec<Vec<ResultRow>>> = vec![Vec::with_capacity(spec.trials); cells.len()];
    for (&(c, _), res) in jobs.iter().zip(results) {
        per_cell[c].push(res?);
    }
    let mut rows = Vec::with_capacity(jobs.len() * spec.models.len());
    for trials in per_cell {
        for mi in 0..spec.models.len() {
            rows.extend(trials.iter().map(|r| r[mi].clone()));
        }
    }
    Ok(rows)
}

fn ratio_cells(spec: &ExperimentSpec, n: usize) -> Vec<(f64, usize)> {
    spec.sampling_ratios
        .iter()
        .map(|&r| (r, ((r * n as f64).round() as usize).max(1)))
        .collect()
}

fn channel_len(spec: &ExperimentSpec) -> Result<usize> {
    match &spec.data {
        DataSource::Synthetic(d) => Ok(d.shape.len()),
        DataSource::Image { path, crop, .. } => Ok(read_image(path, *crop)?.channel_len()),
    }
}

/// Every model on every trial at each sampling ratio.
pub fn run_compare(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let n = channel_len(spec)?;
    run_grid(spec, &ratio_cells(spec, n))
}

/// [`run_compare`] over at least two ratios.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    if spec.sampling_ratios.len() < 2 {
        return Err(Error::InvalidParameter("a sweep needs >= 2 ratios".into()));
    }
    run_compare(spec)
}

/// Image reconstruction experiment; identical to [`run_compare`] with the
/// image as the ground truth of every trial.
pub fn run_image(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    if !matches!(spec.data, DataSource::Image { .. }) {
        return Err(Error::InvalidParameter("image experiment needs an image source".into()));
    }
    run_compare(spec)
}

/// Success-probability grid over per-channel measurement counts. The
/// `ratio` column of the returned rows holds `M / N`.
pub fn run_phase(spec: &ExperimentSpec) -> Result<(Vec<ResultRow>, PhaseGrid)> {
    spec.validate()?;
    let n = channel_len(spec)?;
    let cells: Vec<(f64, usize)> = spec
        .measurements
        .iter()
        .map(|&m| (m as f64 / n as f64, m))
        .collect();
    let rows = run_grid(spec, &cells)?;
    let grid = phase_grid(spec, &rows);
    Ok((rows, grid))
}

/// Aggregates phase rows into success probabilities.
pub fn phase_grid(spec: &ExperimentSpec, rows: &[ResultRow]) -> PhaseGrid {
    let nm = spec.measurements.len();
    let mut raw = vec![vec![0.0; nm]; spec.models.len()];
    for (mi, model) in spec.models.iter().enumerate() {
        for (ci, r) in raw[mi].iter_mut().enumerate() {
            let chunk = &rows[(ci * spec.models.len() + mi) * spec.trials..][..spec.trials];
            debug_assert!(chunk.iter().all(|row| row.model == *model));
            let wins = chunk.iter().filter(|row| row.support_f1 >= spec.success_f1).count();
            *r = wins as f64 / spec.trials as f64;
        }
    }
    let monotone: Vec<Vec<f64>> = raw
        .iter()
        .map(|p| {
            let mut best = 0.0f64;
            p.iter()
                .map(|&v| {
                    best = best.max(v);
                    best
                })
                .collect()
        })
        .collect();
    let m90 = monotone
        .iter()
        .map(|p| p.iter().position(|&v| v >= 0.9).map(|i| spec.measurements[i]))
        .collect();
    PhaseGrid {
        models: spec.models.clone(),
        measurements: spec.measurements.clone(),
        raw,
        monotone,
        m90,
    }
}

/// Measurement bounds with unit constants over the configured grid.
pub fn run_bounds(spec: &ExperimentSpec) -> Result<Vec<BoundRow>> {
    let b = &spec.bounds;
    let models = if spec.models.is_empty() { SparsityModel::ALL.to_vec() } else { spec.models.clone() };
    let mut rows = Vec::new();
    for &n in &b.n {
        for &k in &b.k {
            for &channels in &b.channels {
                let mut p = BoundParams::new(n, k, channels, b.delta);
                p.t = b.t;
                if p.validate().is_err() {
                    continue;
                }
                for &model in &models {
                    rows.push(BoundRow {
                        model,
                        n,
                        k,
                        channels,
                        bound: measurement_bound(model, &p)?,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Median SNR per (model, ratio), in model-major order of `spec.models`.
pub fn median_snr(rows: &[ResultRow], model: SparsityModel, ratio: f64) -> Option<f64> {
    let mut v: Vec<f64> = rows
        .iter()
        .filter(|r| r.model == model && r.ratio == ratio)
        .map(|r| r.snr_db)
        .collect();
    median(&mut v)
}

pub(crate) fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}
