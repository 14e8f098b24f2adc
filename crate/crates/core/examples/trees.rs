//! Medians, betweenness, meets and generated subtrees on a small tree.
//!
//! ```text
//! cargo run --example trees
//! ```

use std::collections::BTreeSet;

use kaleido::gen::nonisomorphic_trees;
use kaleido::tree::{RootedTree, Tree};

fn main() -> kaleido::error::Result<()> {
    // a spider: center 1 with legs 0, 2 and 3-4
    let t = Tree::new(0..5, &[(0, 1), (1, 2), (1, 3), (3, 4)])?;
    println!("median(0, 2, 4) = {}", t.median(0, 2, 4)?);
    println!("B(0, 1, 4) = {}", t.between(0, 1, 4)?);
    println!("components around 1: {:?}", t.components(1)?);

    let gens = BTreeSet::from([0, 2, 4]);
    let g = t.generated_subtree(&gens)?;
    println!("subtree generated by {gens:?}: vertices {:?}, edges {:?}", g.vertices().collect::<Vec<_>>(), g.edges());

    let rt = RootedTree::new(t.clone(), 0)?;
    println!("rooted at 0: meet(2, 4) = {}, height(4) = {}", rt.meet(2, 4)?, rt.height(4)?);
    println!("ρ(4) = {:?}", rt.rho(4)?);

    let (t2, z) = t.insert_between(1, 3)?;
    println!("inserted {z} between 1 and 3; median(0, 2, 4) still {}", t2.median(0, 2, 4)?);

    for n in 1..=7 {
        println!("{n} vertices: {} trees up to isomorphism", nonisomorphic_trees(n).len());
    }
    Ok(())
}
