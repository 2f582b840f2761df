//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Later assignments
//! win, so command-line overrides are applied with [`Config::set`] after
//! loading the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::bench::experiment::{
    full_depth, DataSource, ExperimentKind, ExperimentSpec, OperatorFamily, SyntheticData,
};
use crate::error::{Error, Result};
use crate::model::{parse_models, SparsityModel};
use crate::signal::Shape;
use crate::synth::AmplitudeLaw;
use crate::wavelet::WaveletFamily;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Config(format!("line {}: expected key=value", no + 1)));
            };
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", no + 1)));
            }
            cfg.set(k, v.trim());
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.values.insert(key.replace('-', "_"), value.to_string());
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("bad value '{v}' for '{key}'"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse()
                        .map_err(|_| Error::Config(format!("bad list item '{s}' for '{key}'")))
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }
}

/// Keys understood by [`spec_from_config`].
pub const KNOWN_KEYS: &[&str] = &[
    "models", "ratios", "measurements", "trials", "workers", "timing", "channels", "n", "rows",
    "cols", "k", "data_model", "amplitude", "amp_low", "amp_high", "noise_sigma", "wavelet",
    "levels", "lambda", "gamma", "mu", "iters", "tol", "tv_inner_iters", "operator", "decay",
    "support_fraction", "success_f1", "image", "crop", "bound_n", "bound_k", "bound_t", "delta",
    "t", "monotone",
];

/// Builds an experiment description from configuration keys, starting from
/// the synthetic forest defaults.
pub fn spec_from_config(kind: ExperimentKind, cfg: &Config, seed: u64) -> Result<ExperimentSpec> {
    if let Some(k) = cfg.keys().find(|k| !KNOWN_KEYS.contains(k)) {
        return Err(Error::Config(format!("unknown key '{k}'")));
    }
    let channels = cfg.get_or("channels", 3usize)?;
    let k = cfg.get_or("k", 50usize)?;
    let shape = match (cfg.get::<usize>("rows")?, cfg.get::<usize>("cols")?) {
        (Some(rows), Some(cols)) => Shape::Grid { rows, cols },
        (None, None) => Shape::Line(cfg.get_or("n", 1024usize)?),
        _ => return Err(Error::Config("rows and cols must be given together".into())),
    };
    let mut spec = ExperimentSpec::synthetic(kind, channels, shape.len(), k, seed);
    let family: WaveletFamily = cfg.get_or("wavelet", WaveletFamily::Haar)?;
    let default_levels = match shape {
        Shape::Line(n) => full_depth(n),
        Shape::Grid { rows, cols } => full_depth(rows.min(cols)),
    };
    let levels = cfg.get_or("levels", default_levels)?;

    if let Some(path) = cfg.get::<PathBuf>("image")? {
        spec.data = DataSource::Image {
            path,
            crop: cfg.get_or("crop", true)?,
            family,
            levels: cfg.get_or("levels", 3usize)?,
            noise_sigma: cfg.get_or("noise_sigma", 0.01)?,
        };
    } else if kind == ExperimentKind::Image {
        return Err(Error::Config("the image experiment needs 'image = PATH'".into()));
    } else if let DataSource::Synthetic(d) = &mut spec.data {
        *d = SyntheticData {
            shape,
            family,
            levels,
            synthesis: d.synthesis.clone(),
        };
        let s = &mut d.synthesis;
        s.model = cfg.get_or("data_model", SparsityModel::Forest)?;
        s.noise_sigma = cfg.get_or("noise_sigma", s.noise_sigma)?;
        match cfg.raw("amplitude") {
            None | Some("uniform") => {
                if let AmplitudeLaw::UniformMagnitude { low, high } = s.amplitude {
                    s.amplitude = AmplitudeLaw::UniformMagnitude {
                        low: cfg.get_or("amp_low", low)?,
                        high: cfg.get_or("amp_high", high)?,
                    };
                }
            }
            Some("gaussian") => s.amplitude = AmplitudeLaw::Gaussian,
            Some(other) => return Err(Error::Config(format!("unknown amplitude law '{other}'"))),
        }
    }

    if let Some(m) = cfg.raw("models") {
        spec.models = parse_models(m)?;
    }
    if let Some(r) = cfg.list("ratios")? {
        spec.sampling_ratios = r;
    } else if kind == ExperimentKind::Sweep {
        spec.sampling_ratios = vec![0.16, 0.18, 0.2, 0.22, 0.24, 0.26];
    }
    if let Some(m) = cfg.list("measurements")? {
        spec.measurements = m;
    }
    spec.trials = cfg.get_or("trials", spec.trials)?;
    spec.workers = cfg.get("workers")?;
    spec.record_timing = cfg.get_or("timing", false)?;
    spec.support_fraction = cfg.get_or("support_fraction", spec.support_fraction)?;
    spec.success_f1 = cfg.get_or("success_f1", spec.success_f1)?;

    let sv = &mut spec.solver;
    sv.lambda = cfg.get_or("lambda", sv.lambda)?;
    sv.gamma = cfg.get("gamma")?;
    sv.mu = cfg.get_or("mu", sv.mu)?;
    sv.max_iters = cfg.get_or("iters", sv.max_iters)?;
    sv.tol = cfg.get_or("tol", sv.tol)?;
    sv.tv_inner_iters = cfg.get_or("tv_inner_iters", sv.tv_inner_iters)?;
    sv.monotone = cfg.get_or("monotone", sv.monotone)?;

    spec.operator = match cfg.raw("operator") {
        None | Some("vd") | Some("variable_density") => OperatorFamily::VariableDensity {
            decay: cfg.get_or("decay", crate::operators::DEFAULT_DECAY)?,
        },
        Some("gaussian") => OperatorFamily::Gaussian,
        Some(other) => return Err(Error::Config(format!("unknown operator '{other}'"))),
    };
    if kind == ExperimentKind::Phase {
        if cfg.raw("operator").is_none() {
            spec.operator = OperatorFamily::Gaussian;
        }
        if spec.measurements.is_empty() {
            return Err(Error::Config("the phase experiment needs 'measurements = M1,M2,...'".into()));
        }
    }

    if let Some(v) = cfg.list("bound_n")? {
        spec.bounds.n = v;
    }
    if let Some(v) = cfg.list("bound_k")? {
        spec.bounds.k = v;
    }
    if let Some(v) = cfg.list("bound_t")? {
        spec.bounds.channels = v;
    }
    spec.bounds.delta = cfg.get_or("delta", spec.bounds.delta)?;
    spec.bounds.t = cfg.get_or("t", spec.bounds.t)?;
    if kind != ExperimentKind::Bounds {
        spec.validate()?;
    }
    Ok(spec)
}
