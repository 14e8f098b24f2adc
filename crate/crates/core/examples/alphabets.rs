//! Decoration alphabets: presets, embeddings, automorphisms and amalgamation.
//!
//! ```text
//! cargo run --example alphabets
//! ```

use kaleido::io::to_text;
use kaleido::relstruct::{AgeConstraint, RelStructure, ORDER_RELATION};

fn main() -> kaleido::error::Result<()> {
    let c3 = RelStructure::constant_only(3);
    let o3 = RelStructure::pointed_linear_order(3);
    println!("{c3}: {} automorphisms", c3.automorphisms().len());
    println!("{o3}: {} automorphisms", o3.automorphisms().len());

    let o2 = RelStructure::pointed_linear_order(2);
    println!("embeddings of {o2} into {o3}: {:?}", o2.embeddings(&o3)?);

    let check = AgeConstraint::PointedTotalOrder(ORDER_RELATION.into());
    println!("pointed total order? {:?}", check.check(&o3).is_ok());

    print!("{}", to_text(&o2));
    Ok(())
}
