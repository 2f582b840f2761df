use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use forestcs::bench::experiment::{median_snr, DataSource};
use forestcs::bench::output::{bounds_csv, phase_grid_csv};
use forestcs::bench::{
    emit_outputs, read_image, run_bounds, run_compare, run_image, run_phase, run_sweep,
    spec_from_config, write_image, Config, ExperimentKind, ExperimentSpec,
};
use forestcs::synth::generate_instance;
use forestcs::wavelet::WaveletBasis;

#[derive(Parser)]
#[command(name = "forestcs", version, about = "Forest-sparse compressive sensing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// All models on one or more sampling ratios.
    Compare(Common),
    /// SNR against sampling ratio, with an SVG chart.
    Sweep(Common),
    /// Support-recovery success over a grid of measurement counts.
    Phase(Common),
    /// Table of theoretical measurement bounds.
    Bounds(Common),
    /// Reconstruction of a PGM/PPM image.
    Image(Common),
    /// Writes one synthetic instance.
    Synth(Common),
}

#[derive(Args)]
struct Common {
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Root seed for every random stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Configuration overrides as `--key value` pairs.
    #[arg(num_args = 0.., allow_hyphen_values = true, trailing_var_arg = true, value_name = "--KEY VALUE")]
    overrides: Vec<String>,
}

impl Common {
    fn config(&self) -> forestcs::Result<Config> {
        let mut cfg = match &self.config {
            Some(p) => Config::from_file(p)?,
            None => Config::default(),
        };
        let mut it = self.overrides.iter();
        while let Some(key) = it.next() {
            let Some(name) = key.strip_prefix("--") else {
                return Err(forestcs::Error::Config(format!("expected --key, got '{key}'")));
            };
            let Some(value) = it.next() else {
                return Err(forestcs::Error::Config(format!("missing value for --{name}")));
            };
            cfg.set(name, value);
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> forestcs::Result<()> {
    let (kind, common) = match command {
        Command::Compare(c) => (ExperimentKind::Compare, c),
        Command::Sweep(c) => (ExperimentKind::Sweep, c),
        Command::Phase(c) => (ExperimentKind::Phase, c),
        Command::Bounds(c) => (ExperimentKind::Bounds, c),
        Command::Image(c) => (ExperimentKind::Image, c),
        Command::Synth(c) => return synth(&c),
    };
    let mut cfg = common.config()?;
    let svg = cfg.get_or("svg", kind == ExperimentKind::Sweep)?;
    cfg = strip(cfg, "svg");
    let spec = spec_from_config(kind, &cfg, common.seed)?;
    fs::create_dir_all(&common.out)?;
    let out = &common.out;
    match kind {
        ExperimentKind::Bounds => {
            let rows = run_bounds(&spec)?;
            fs::write(out.join("bounds.csv"), bounds_csv(&rows)?)?;
            println!("wrote {} bounds", rows.len());
        }
        ExperimentKind::Phase => {
            let (rows, grid) = run_phase(&spec)?;
            emit_outputs(&rows, &out.join("results.csv"), None)?;
            fs::write(out.join("phase_grid.csv"), phase_grid_csv(&grid)?)?;
            for (m, m90) in grid.models.iter().zip(&grid.m90) {
                match m90 {
                    Some(v) => println!("{m:>8}: M90 = {v}"),
                    None => println!("{m:>8}: M90 = inf"),
                }
            }
        }
        _ => {
            let rows = match kind {
                ExperimentKind::Sweep => run_sweep(&spec)?,
                ExperimentKind::Image => {
                    if let DataSource::Image { path, crop, .. } = &spec.data {
                        let img = read_image(path, *crop)?;
                        let ext = if img.channels() == 1 { "pgm" } else { "ppm" };
                        write_image(&out.join(format!("truth.{ext}")), &img)?;
                    }
                    run_image(&spec)?
                }
                _ => run_compare(&spec)?,
            };
            let svg_path = out.join("chart.svg");
            emit_outputs(&rows, &out.join("results.csv"), svg.then_some(svg_path.as_path()))?;
            summarize(&spec, &rows);
        }
    }
    Ok(())
}

fn strip(cfg: Config, key: &str) -> Config {
    let mut out = Config::default();
    for k in cfg.keys().filter(|k| *k != key) {
        out.set(k, cfg.raw(k).unwrap_or_default());
    }
    out
}

fn summarize(spec: &ExperimentSpec, rows: &[forestcs::bench::ResultRow]) {
    for &r in &spec.sampling_ratios {
        let cells: Vec<String> = spec
            .models
            .iter()
            .map(|&m| format!("{m}={:.2}", median_snr(rows, m, r).unwrap_or(f64::NAN)))
            .collect();
        println!("ratio {r}: median SNR {}", cells.join(" "));
    }
}

fn synth(common: &Common) -> forestcs::Result<()> {
    let cfg = common.config()?;
    let spec = spec_from_config(ExperimentKind::Compare, &strip(cfg, "svg"), common.seed)?;
    let DataSource::Synthetic(data) = &spec.data else {
        return Err(forestcs::Error::Config("synth does not take an image".into()));
    };
    let basis = WaveletBasis::new(data.family, data.levels, data.shape)?;
    let mut s = data.synthesis.clone();
    s.seed = common.seed;
    let inst = generate_instance(&s, &basis)?;
    fs::create_dir_all(&common.out)?;
    write_instance(&common.out.join("signal.csv"), &inst)?;
    println!(
        "wrote {} channels x {} samples, {} nonzero coefficients",
        inst.x.channels(),
        inst.x.channel_len(),
        inst.stacked_support().len()
    );
    Ok(())
}

fn write_instance(path: &Path, inst: &forestcs::synth::Instance) -> forestcs::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["channel", "index", "x", "theta"])?;
    let n = inst.x.channel_len();
    for t in 0..inst.x.channels() {
        for i in 0..n {
            w.write_record([
                t.to_string(),
                i.to_string(),
                inst.x.channel(t)[i].to_string(),
                inst.theta[t * n + i].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
