//! Variable-density masks and the partial-DCT operator built from them.

use forestcs::operators::{estimate_spectral_norm, make_variable_density_mask, MeasurementOperator};
use forestcs::Shape;

fn main() -> forestcs::Result<()> {
    let shape = Shape::Grid { rows: 16, cols: 16 };
    for decay in [0.0, 1.5, 3.0, 6.0] {
        let mask = make_variable_density_mask(shape, 0.25, decay, 7)?;
        println!("decay {decay}: {} of {} frequencies, density map:", mask.len(), shape.len());
        let mut grid = vec!['.'; shape.len()];
        for &i in mask.selected() {
            grid[i] = '#';
        }
        for row in grid.chunks(16) {
            println!("  {}", row.iter().collect::<String>());
        }
    }
    let op = MeasurementOperator::partial_frequency(make_variable_density_mask(shape, 0.25, 3.0, 7)?);
    println!("operator {} x {}, spectral norm {:.6}", op.output_dim(), op.input_dim(), estimate_spectral_norm(&op, 100, 1)?);
    Ok(())
}
