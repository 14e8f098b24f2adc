//! Component colorings: local actions, the cocycle identity, one-step
//! extensions and the derived root coloring.
//!
//! ```text
//! cargo run --example kaleidoscopic
//! ```

use kaleido::coloring::{
    all_total_colorings, check_cocycle_identity, derive_root_coloring, local_action, transposition_sigma, ColoredTree,
};
use kaleido::tree::Tree;

fn main() -> kaleido::error::Result<()> {
    let t = Tree::path(4);
    let kappa = all_total_colorings(&t, 3)[5].clone();
    let ct = ColoredTree::new(t.clone(), None, ColoredTree::numeric_palette(3), None, kappa)?;
    println!("κ = {:?}", ct.kappa());

    let auts = t.automorphisms();
    for g in &auts {
        println!("g = {g:?}: α(g, 1) = {:?}", local_action(g, 1, &ct)?);
    }
    let mut bad = 0;
    for g in &auts {
        for h in &auts {
            bad += check_cocycle_identity(g, h, &ct)?.is_some() as usize;
        }
    }
    println!("cocycle violations: {bad}");

    let (ext, z) = ct.kaleidoscopic_extend(1, 2, 2, 0)?;
    println!("extended by {z}: {} components colored", ext.kappa().len());

    let rooted = ColoredTree::new(t, Some(0), ColoredTree::numeric_palette(3), Some(0), ct.kappa().clone())?;
    let star = derive_root_coloring(&rooted, &transposition_sigma(3, 0))?;
    println!("derived root coloring: {:?}", star.kappa());
    Ok(())
}
