//! Convex converging orders: enumeration, the five-point lemmas, realizing
//! an order by a configuration and the collapse pair. Ends with a table
//! comparing the four-point convexity rule with the minimum-splitting reading.
//!
//! ```text
//! cargo run --example cclo
//! ```

use std::collections::BTreeSet;

use kaleido::cclo::{
    collapse_pair, enumerate_cclo, five_point_one_witness, five_point_two_witness, is_converging, is_convex,
    is_convex_duchesne, pi_order, realize_cclo, TreeLinearOrder,
};
use kaleido::gen::nonisomorphic_trees;
use kaleido::tree::{Tree, Vertex};

fn main() -> kaleido::error::Result<()> {
    println!("2-vertex tree: {} orders", enumerate_cclo(&Tree::path(2), 8)?.len());
    println!("3-path: {} orders", enumerate_cclo(&Tree::path(3), 8)?.len());

    let t = Tree::new(0..5, &[(0, 1), (1, 2), (1, 3), (3, 4)])?;
    let orders = enumerate_cclo(&t, 8)?;
    println!("spider: {} orders", orders.len());
    for o in &orders {
        let five = five_point_one_witness(o).is_some() || five_point_two_witness(o).is_some();
        let cfg = realize_cclo(&t, o)?;
        let back = pi_order(&cfg)?;
        let vs: BTreeSet<_> = t.vertices().collect();
        println!("  {:?}: five-point violation {five}, π round trip {}", o.sequence(), back.restricted_sequence(&vs) == o.sequence());
    }

    let (q1, q2) = collapse_pair(&t, 1, 3)?;
    let (p1, p2) = (pi_order(&q1)?, pi_order(&q2)?);
    println!("collapse at (1, 3): ρ(1) toward 3? {} vs {}", q1.rho_points_toward(1, 3)?, q2.rho_points_toward(1, 3)?);
    println!("  π orders {:?} and {:?}", p1.sequence(), p2.sequence());

    println!("n  trees  converging  four-point  min-split  disagree");
    for n in 2..=6 {
        let trees = nonisomorphic_trees(n);
        let (mut conv, mut four, mut split, mut differ) = (0, 0, 0, 0);
        for t in &trees {
            let vs: Vec<Vertex> = t.vertices().collect();
            for seq in permutations(&vs) {
                let o = TreeLinearOrder::from_sequence(t.clone(), &seq)?;
                if !is_converging(&o) {
                    continue;
                }
                let (a, b) = (is_convex(&o)?, is_convex_duchesne(&o)?);
                conv += 1;
                four += a as usize;
                split += b as usize;
                differ += (a != b) as usize;
            }
        }
        println!("{n}  {:5}  {conv:10}  {four:10}  {split:9}  {differ:8}", trees.len());
    }
    Ok(())
}

fn permutations(items: &[Vertex]) -> Vec<Vec<Vertex>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    (0..items.len())
        .flat_map(|i| {
            let mut rest = items.to_vec();
            let x = rest.remove(i);
            permutations(&rest).into_iter().map(move |mut p| {
                p.insert(0, x);
                p
            })
        })
        .collect()
}
