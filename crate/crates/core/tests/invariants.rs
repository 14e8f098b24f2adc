//! Randomised invariants over trees, orders and documents.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kaleido::cclo::{is_cclo, pi_order, realize_cclo, OrderedConfiguration, TreeLinearOrder};
use kaleido::decorated::{build_ah, dec_embeddings};
use kaleido::gen::random_tree;
use kaleido::io::{from_text, to_text};
use kaleido::relstruct::RelStructure;
use kaleido::tree::{RootedTree, Tree, Vertex};

fn tree(n: usize, seed: u64) -> Tree {
    random_tree(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// A leaf-rooted tree with an arbitrary order on each set of components.
fn configuration(n: usize, seed: u64, shuffle: &[usize]) -> OrderedConfiguration {
    let t = tree(n, seed);
    let root = t.vertices().find(|&v| t.degree(v).unwrap() <= 1).unwrap();
    let rt = RootedTree::new(t.clone(), root).unwrap();
    let orders = t
        .vertices()
        .filter(|&v| v != root)
        .map(|v| {
            let mut kids = rt.children(v).unwrap().to_vec();
            let k = kids.len().max(1);
            kids.rotate_left(shuffle[v as usize % shuffle.len()] % k);
            let mut seq = vec![rt.parent(v).unwrap()];
            seq.extend(kids);
            (v, seq)
        })
        .collect();
    OrderedConfiguration::new(rt, &orders).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn median_is_symmetric_and_between(n in 1usize..12, seed: u64, picks in prop::array::uniform3(0u32..12)) {
        let t = tree(n, seed);
        let [x, y, z] = picks.map(|p| p % n as Vertex);
        let m = t.median(x, y, z).unwrap();
        prop_assert_eq!(m, t.median(z, x, y).unwrap());
        prop_assert_eq!(m, t.median(y, x, z).unwrap());
        prop_assert!(t.between(x, m, y).unwrap() && t.between(y, m, z).unwrap() && t.between(x, m, z).unwrap());
    }

    #[test]
    fn median_closure_is_closed(n in 1usize..12, seed: u64, gens in prop::collection::btree_set(0u32..12, 1..5)) {
        let t = tree(n, seed);
        let gens: BTreeSet<Vertex> = gens.into_iter().map(|g| g % n as Vertex).collect();
        let c = t.median_closure(&gens).unwrap();
        prop_assert!(gens.is_subset(&c));
        for &a in &c {
            for &b in &c {
                for &d in &c {
                    prop_assert!(c.contains(&t.median(a, b, d).unwrap()));
                }
            }
        }
    }

    #[test]
    fn pi_of_any_configuration_is_a_cclo(n in 2usize..9, seed: u64, shuffle in prop::collection::vec(0usize..6, 1..9)) {
        let cfg = configuration(n, seed, &shuffle);
        let o = pi_order(&cfg).unwrap();
        prop_assert!(is_cclo(&o));
        let back = pi_order(&realize_cclo(o.tree(), &o).unwrap()).unwrap();
        let vs: BTreeSet<Vertex> = o.tree().vertices().collect();
        prop_assert_eq!(back.restricted_sequence(&vs), o.sequence());
    }

    #[test]
    fn tree_and_order_documents_round_trip(n in 1usize..10, seed: u64) {
        let t = tree(n, seed);
        prop_assert_eq!(from_text::<Tree>(&to_text(&t)).unwrap(), t.clone());
        let seq: Vec<Vertex> = t.vertices().collect();
        let o = TreeLinearOrder::from_sequence(t, &seq).unwrap();
        prop_assert_eq!(o.sequence(), seq);
    }

    #[test]
    fn tower_embeds_in_every_taller_tower(size in 2usize..4, order: bool, h in 0usize..2, extra in 0usize..2) {
        let a = if order { RelStructure::pointed_linear_order(size) } else { RelStructure::constant_only(size) };
        let low = build_ah(&a, h).unwrap();
        let high = build_ah(&a, h + extra).unwrap();
        prop_assert!(!dec_embeddings(&low, &high, false).unwrap().is_empty());
        prop_assert!(!dec_embeddings(&low, &high, true).unwrap().is_empty());
    }
}
