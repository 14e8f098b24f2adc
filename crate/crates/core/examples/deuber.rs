//! The least `m` with `B[m] → (B[h])^k_{B[0]}`, compared against `2h - 1`.
//!
//! ```text
//! cargo run --release --example deuber
//! ```

use kaleido::ramsey::deuber_explore;
use kaleido::relstruct::RelStructure;

fn main() -> kaleido::error::Result<()> {
    for b in [RelStructure::constant_only(2), RelStructure::constant_only(3), RelStructure::pointed_linear_order(2)] {
        let r = deuber_explore(&b, 1, 2, 4, 10_000_000)?;
        println!(
            "|B| = {} ({}): tried {:?}, minimal m = {}, 2h-1 = {}, within: {}",
            r.alphabet_size,
            if b.relations().values().all(|t| t.is_empty()) { "constant only" } else { "pointed order" },
            r.tried,
            r.minimal_m,
            r.predicted,
            r.within_prediction
        );
    }
    Ok(())
}
