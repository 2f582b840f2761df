//! Small support-recovery phase transition with Gaussian operators.

use forestcs::bench::{run_phase, DataSource, ExperimentKind, ExperimentSpec, OperatorFamily};

fn main() -> forestcs::Result<()> {
    let mut spec = ExperimentSpec::synthetic(ExperimentKind::Phase, 4, 128, 6, 9);
    spec.operator = OperatorFamily::Gaussian;
    spec.trials = 6;
    spec.measurements = vec![12, 24, 36, 48, 64];
    spec.solver.lambda = 0.01;
    spec.solver.gamma = Some(0.1);
    spec.solver.max_iters = 300;
    spec.support_fraction = 0.2;
    if let DataSource::Synthetic(d) = &mut spec.data {
        d.synthesis.noise_sigma = 0.0;
    }
    let (_, grid) = run_phase(&spec)?;
    println!("M: {:?}", grid.measurements);
    for (i, model) in grid.models.iter().enumerate() {
        let raw: Vec<String> = grid.raw[i].iter().map(|p| format!("{p:.2}")).collect();
        let m90 = grid.m90[i].map_or("inf".to_string(), |m| m.to_string());
        println!("{model:>8}: success [{}], M90 = {m90}", raw.join(" "));
    }
    Ok(())
}
