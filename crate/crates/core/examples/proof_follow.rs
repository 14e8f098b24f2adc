//! Extracting a monochromatic copy by following the inductive construction
//! along a verified chain of rooted sub-arrows.
//!
//! ```text
//! cargo run --release --example proof_follow
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kaleido::decorated::build_ah;
use kaleido::ramsey::{
    find_mono_copy, is_monochromatic, proof_follow_mono, search_chain, verify_chain, AlphabetFamily, ColoringAssignment,
    CopyIndex, WitnessBounds,
};
use kaleido::relstruct::RelStructure;

fn main() -> kaleido::error::Result<()> {
    let a = RelStructure::pointed_linear_order(2);
    let u = build_ah(&a, 1)?;
    let ell = 1;
    let chain = search_chain(&u, &a, ell, &AlphabetFamily::PointedLinearOrder, &WitnessBounds::default())?;
    println!("chain: {:?}", chain.iter().map(|(c, n)| (c.len(), *n)).collect::<Vec<_>>());
    let verdicts = verify_chain(&chain, &u, &a, ell, 10_000_000)?;
    println!("sub-arrows hold: {:?}", verdicts.iter().map(|v| v.holds).collect::<Vec<_>>());

    let t = build_ah(&chain[0].0, chain[0].1)?;
    let al = build_ah(&a, ell)?;
    let index = CopyIndex::new(&al, &t, false)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for round in 0..3 {
        let gamma = ColoringAssignment::random(2, index.len(), &mut rng);
        let trace = proof_follow_mono(&chain, &gamma, &u, &a, ell, false)?;
        let ok = is_monochromatic(&trace.copy, &u, &al, &index, &gamma, false)?;
        let plain = find_mono_copy(&t, &u, &al, &gamma, false)?;
        println!("round {round}: proof copy {:?} verified {ok}; plain search {:?}", trace.copy.images(), plain.images());
    }
    Ok(())
}
