//! Reconstructs one forest-sparse instance with every model.

use forestcs::bench::{snr, support_f1};
use forestcs::operators::{make_variable_density_mask, MeasurementOperator};
use forestcs::solvers::{solve, Problem, SolverConfig};
use forestcs::synth::{generate_instance, measure, AmplitudeLaw, SynthesisSpec};
use forestcs::wavelet::{WaveletBasis, WaveletFamily};
use forestcs::{Shape, SparsityModel};

fn main() -> forestcs::Result<()> {
    let (t, n) = (3, 512);
    let shape = Shape::Line(n);
    let basis = WaveletBasis::new(WaveletFamily::Haar, 8, shape)?;
    let mut spec = SynthesisSpec::new(t, 25, SparsityModel::Forest, 1);
    spec.amplitude = AmplitudeLaw::UniformMagnitude { low: 1.0, high: 4.0 };
    let inst = generate_instance(&spec, &basis)?;
    let op = MeasurementOperator::block_diagonal(
        (0..t as u64)
            .map(|c| make_variable_density_mask(shape, 0.3, 3.0, 10 + c).map(MeasurementOperator::partial_frequency))
            .collect::<forestcs::Result<_>>()?,
    )?;
    let b = measure(inst.x.as_slice(), &op, 0.01, 2)?;
    let problem = Problem::new(&op, &b, &basis, t)?.with_truth(&inst.x);
    let config = SolverConfig { op_norm: Some(1.0), ..SolverConfig::default() };
    println!("zero-filled: {:.2} dB", snr(inst.x.as_slice(), &op.adjoint(&b)?)?);
    for model in SparsityModel::ALL {
        let r = solve(&problem, &config, model)?;
        let theta: Vec<f64> = r.x_hat.as_slice().chunks(n).flat_map(|c| basis.dwt(c).unwrap()).collect();
        println!(
            "{model:>8}: {:6.2} dB, support F1 {:.2}, {} iterations, final objective {:.4}",
            snr(inst.x.as_slice(), r.x_hat.as_slice())?,
            support_f1(&inst.stacked_support(), &theta, 0.1)?,
            r.iters_run,
            r.objective_trace.last().copied().unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
