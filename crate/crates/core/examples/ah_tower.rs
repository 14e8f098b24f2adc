//! The regular towers `A[h]`: level census, automorphism counts and
//! embedding a decorated tree into a tower.
//!
//! ```text
//! cargo run --example ah_tower
//! ```

use std::collections::BTreeSet;

use kaleido::decorated::{build_ah, count_embeddings, dec_automorphisms, dec_generated, embed_into_ah};
use kaleido::relstruct::RelStructure;

fn main() -> kaleido::error::Result<()> {
    for a in [RelStructure::constant_only(3), RelStructure::pointed_linear_order(3)] {
        println!("alphabet {a}");
        for h in 0..=3 {
            let t = build_ah(&a, h)?;
            let levels: Vec<usize> = (1..=h + 1).map(|l| t.rooted_tree().level(l).len()).collect();
            println!("  A[{h}]: {} vertices, levels {levels:?}, |Aut| = {}", t.len(), dec_automorphisms(&t).len());
        }
    }

    let a = RelStructure::pointed_linear_order(3);
    let a2 = build_ah(&a, 2)?;
    let s = dec_generated(&a2, &BTreeSet::from([4, 6]))?;
    println!("generated by {{4, 6}}: {} vertices, {} copies in A[2]", s.len(), count_embeddings(&s, &a2, false)?);
    let te = embed_into_ah(&s, &a)?;
    println!("embeds into A'[{}] for A' = {} via {:?}", te.h, te.alphabet, te.embedding.map);
    Ok(())
}
