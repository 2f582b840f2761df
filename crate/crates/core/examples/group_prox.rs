//! Group layouts for the joint, tree and forest models and the group soft threshold.

use forestcs::groups::{build_duplication_map, build_group_layout, group_l21_norm, shrinkgroup, GroupModel};
use forestcs::wavelet::TreeLayout;

fn main() -> forestcs::Result<()> {
    let tree = TreeLayout::complete_binary(3)?;
    for model in [GroupModel::Joint, GroupModel::Tree, GroupModel::Forest] {
        let layout = build_group_layout(&tree, 2, model)?;
        let map = build_duplication_map(&layout);
        println!(
            "{model:?}: {} groups, {} duplicated entries, ||G||^2 = {}",
            layout.n_groups(),
            map.rows(),
            map.max_multiplicity()
        );
        for g in layout.groups().take(3) {
            println!("  group {g:?}");
        }
    }
    let w = [3.0, 4.0, 0.3, -0.4];
    let offsets = [0, 2, 4];
    let out = shrinkgroup(&w, &offsets, 2.5)?;
    println!("shrinkgroup({w:?}, 2.5) = {out:?}");
    println!("l2,1 norm before {:.2}, after {:.2}", group_l21_norm(&w, &offsets)?, group_l21_norm(&out, &offsets)?);
    Ok(())
}
