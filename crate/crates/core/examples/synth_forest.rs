//! Draws one instance per sparsity model and reports its support structure.

use forestcs::synth::{generate_instance, SynthesisSpec};
use forestcs::theory::energy_factors;
use forestcs::wavelet::{WaveletBasis, WaveletFamily};
use forestcs::{Shape, SparsityModel};

fn main() -> forestcs::Result<()> {
    let basis = WaveletBasis::new(WaveletFamily::Haar, 5, Shape::Line(256))?;
    let tree = basis.tree_layout();
    for model in SparsityModel::ALL {
        let inst = generate_instance(&SynthesisSpec::new(3, 10, model, 42), &basis)?;
        let shared = inst.supports.windows(2).all(|w| w[0].indices() == w[1].indices());
        let rooted = inst.supports.iter().all(|s| s.is_rooted_subtree(&tree));
        let f = energy_factors(&inst.x)?;
        println!(
            "{model}: shared support {shared}, rooted subtrees {rooted}, Gamma_2 {:.2}, Gamma_inf {:.2}",
            f.gamma_2, f.gamma_inf
        );
        println!("  channel 0 support {:?}", inst.supports[0].indices());
    }
    Ok(())
}
