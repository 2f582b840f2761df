//! Measurement bounds per model and the block-diagonal concentration experiment.

use forestcs::theory::{
    blockdiag_bound, catalan, energy_factors_from, measurement_bound, rip_concentration_experiment, subtree_count_bound,
    BoundParams, ConcentrationOperator, ConcentrationSetup,
};
use forestcs::SparsityModel;

fn main() -> forestcs::Result<()> {
    println!("Catalan numbers: {:?}", (1..=8).map(catalan).collect::<forestcs::Result<Vec<_>>>()?);
    let c = subtree_count_bound(1024, 50, 1.0)?;
    println!("rooted subtrees of size 50 in 1024 nodes: ln bound {:.1} ({:?})", c.bound.ln(), c.regime);

    println!("{:>6} {:>4} {:>10} {:>10} {:>10} {:>10}", "N", "T", "standard", "joint", "tree", "forest");
    for (n, t) in [(256, 1), (1024, 3), (4096, 3), (4096, 8)] {
        let p = BoundParams::new(n, 16, t, 0.5);
        let b: Vec<f64> = SparsityModel::ALL.iter().map(|&m| measurement_bound(m, &p)).collect::<forestcs::Result<_>>()?;
        println!("{n:>6} {t:>4} {:>10.0} {:>10.0} {:>10.0} {:>10.0}", b[0], b[1], b[2], b[3]);
    }

    let p = BoundParams::new(1024, 16, 4, 0.5);
    for profile in [[1.0, 1.0, 1.0, 1.0], [1.0, 0.5, 0.25, 0.1], [1.0, 0.0, 0.0, 0.0]] {
        let f = energy_factors_from(&profile)?;
        let stats = rip_concentration_experiment(&ConcentrationSetup {
            channels: 4,
            n: 128,
            k: 8,
            m: 32,
            energy_profile: profile.to_vec(),
            trials: 500,
            operator: ConcentrationOperator::BlockDiagonal,
            delta: 0.5,
            seed: 3,
        })?;
        println!(
            "energy {profile:?}: Gamma_2 {:.2}, block-diagonal bound {:.0}, empirical std {:.3}, tail {:.3}",
            f.gamma_2,
            blockdiag_bound(&p, &f)?,
            stats.std,
            stats.tail_fraction
        );
    }
    Ok(())
}
