//! Three-channel image reconstruction through the PPM pipeline, with and without TV.

use forestcs::bench::{run_image, write_image, DataSource, ExperimentKind, ExperimentSpec};
use forestcs::bench::experiment::median_snr;
use forestcs::wavelet::WaveletFamily;
use forestcs::{MultiChannelSignal, Shape, SparsityModel};

fn main() -> forestcs::Result<()> {
    let (rows, cols) = (64, 64);
    let mut channels = vec![vec![0.0; rows * cols]; 3];
    for r in 0..rows {
        for c in 0..cols {
            let disk = ((r as f64 - 30.0).powi(2) + (c as f64 - 36.0).powi(2)).sqrt() < 14.0;
            let bar = (44..54).contains(&r);
            for (t, ch) in channels.iter_mut().enumerate() {
                ch[r * cols + c] = 0.15 + if disk { 0.6 - 0.1 * t as f64 } else { 0.0 } + if bar { 0.2 } else { 0.0 };
            }
        }
    }
    let img = MultiChannelSignal::from_channels(Shape::Grid { rows, cols }, &channels)?;
    let dir = std::env::temp_dir().join("forestcs_image_example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("phantom.ppm");
    write_image(&path, &img)?;

    for mu in [0.0, 0.001] {
        let mut spec = ExperimentSpec::synthetic(ExperimentKind::Image, 3, rows * cols, 1, 5);
        spec.data = DataSource::Image { path: path.clone(), crop: true, family: WaveletFamily::Haar, levels: 3, noise_sigma: 0.01 };
        spec.sampling_ratios = vec![0.25];
        spec.trials = 1;
        spec.solver.mu = mu;
        spec.solver.max_iters = 150;
        let rows = run_image(&spec)?;
        let line: Vec<String> = SparsityModel::ALL
            .iter()
            .map(|&m| format!("{m} {:.2}", median_snr(&rows, m, 0.25).unwrap_or(f64::NAN)))
            .collect();
        println!("mu = {mu}: SNR dB {}", line.join(", "));
    }
    println!("input written to {}", path.display());
    Ok(())
}
