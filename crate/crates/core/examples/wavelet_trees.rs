//! Wavelet coefficients of a piecewise-constant signal and the coefficient tree.

use forestcs::wavelet::{WaveletBasis, WaveletFamily};
use forestcs::Shape;

fn main() -> forestcs::Result<()> {
    let n = 32;
    let x: Vec<f64> = (0..n).map(|i| if (8..20).contains(&i) { 1.0 } else { 0.0 }).collect();
    for family in [WaveletFamily::Haar, WaveletFamily::Daubechies4] {
        let basis = WaveletBasis::new(family, 3, Shape::Line(n))?;
        let theta = basis.dwt(&x)?;
        let back = basis.idwt(&theta)?;
        let err = x.iter().zip(&back).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let big = theta.iter().filter(|v| v.abs() > 1e-10).count();
        println!("{family:?}: {big} nonzero coefficients of {n}, reconstruction error {err:.1e}");
    }
    let tree = WaveletBasis::new(WaveletFamily::Haar, 3, Shape::Line(n))?.tree_layout();
    println!("approximation band {:?}, roots {:?}", tree.approx(), tree.roots());
    for &r in tree.roots() {
        println!("root {r}: children {:?}, subtree of {} nodes", tree.children(r), tree.subtree_size(r));
    }
    Ok(())
}
