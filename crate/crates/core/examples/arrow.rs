//! Deciding partition arrows `C → (B)^k_A` and searching for witnesses.
//!
//! ```text
//! cargo run --release --example arrow
//! ```

use kaleido::decorated::build_ah;
use kaleido::ramsey::{decide_arrow, find_mono_copy, witness_search, AlphabetFamily, ArrowInstance, WitnessBounds};
use kaleido::relstruct::RelStructure;

fn main() -> kaleido::error::Result<()> {
    let a = RelStructure::pointed_linear_order(2);
    let (a0, a1) = (build_ah(&a, 0)?, build_ah(&a, 1)?);

    let inst = ArrowInstance { c: a1.clone(), b: a1.clone(), a: a0.clone(), k: 2, rooted: false };
    let v = decide_arrow(&inst, 1_000_000)?;
    println!("A[1] → (A[1])²_A[0]? {} (bad coloring {:?})", v.holds, v.bad_coloring.map(|c| c.colors));

    let w = witness_search(&a1, &a0, 2, false, &AlphabetFamily::PointedLinearOrder, &WitnessBounds::default())?;
    println!("witness: D[{}] with |D| = {}, {} vertices, {} nodes", w.m, w.alphabet.len(), w.tree.len(), w.nodes);

    let n = w.verdict.stats.a_copies;
    let gamma = kaleido::ramsey::ColoringAssignment::new(2, (0..n).map(|i| i % 2).collect())?;
    let copy = find_mono_copy(&w.tree, &a1, &a0, &gamma, false)?;
    println!("alternating coloring: monochromatic copy {:?}", copy.map);
    Ok(())
}
