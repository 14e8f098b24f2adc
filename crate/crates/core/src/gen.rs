//! Generators for small trees.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::tree::{Tree, Vertex};

/// Canonical string of the tree rooted at `v` (AHU encoding).
fn ahu(t: &Tree, v: Vertex, parent: Option<Vertex>) -> String {
    let mut kids: Vec<String> = t
        .neighbors(v)
        .unwrap()
        .iter()
        .filter(|&&n| Some(n) != parent)
        .map(|&n| ahu(t, n, Some(v)))
        .collect();
    kids.sort();
    format!("({})", kids.concat())
}

/// Isomorphism-invariant code of an unrooted tree.
pub fn canonical_code(t: &Tree) -> String {
    t.vertices().map(|v| ahu(t, v, None)).min().unwrap_or_default()
}

/// One representative per isomorphism class of trees on `n` vertices,
/// with vertices `0..n`, sorted by canonical code.
pub fn nonisomorphic_trees(n: usize) -> Vec<Tree> {
    if n == 0 {
        return Vec::new();
    }
    let mut level: BTreeMap<String, Tree> = BTreeMap::from([(canonical_code(&Tree::singleton(0)), Tree::singleton(0))]);
    for _ in 1..n {
        let mut next = BTreeMap::new();
        for t in level.values() {
            for v in t.vertices() {
                let (grown, _) = t.attach_leaf(v).unwrap();
                next.entry(canonical_code(&grown)).or_insert(grown);
            }
        }
        level = next;
    }
    level.into_values().collect()
}

/// Every non-isomorphic tree with between 1 and `max` vertices.
pub fn trees_up_to(max: usize) -> Vec<Tree> {
    (1..=max).flat_map(nonisomorphic_trees).collect()
}

/// The tree with vertices `0..n` encoded by a Prüfer sequence of length
/// `n - 2`.
pub fn from_pruefer(seq: &[Vertex]) -> Tree {
    let n = seq.len() + 2;
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s as usize] += 1;
    }
    let mut leaves: BTreeSet<Vertex> = (0..n as Vertex).filter(|&v| degree[v as usize] == 1).collect();
    let mut edges = Vec::new();
    for &s in seq {
        let leaf = *leaves.iter().next().unwrap();
        leaves.remove(&leaf);
        edges.push((leaf, s));
        degree[s as usize] -= 1;
        if degree[s as usize] == 1 {
            leaves.insert(s);
        }
    }
    let rest: Vec<Vertex> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    Tree::new(0..n as Vertex, &edges).expect("Prüfer sequences encode trees")
}

/// Every labelled tree on `0..n` (`n^(n-2)` of them for `n ≥ 2`).
pub fn labeled_trees(n: usize) -> Vec<Tree> {
    match n {
        0 => Vec::new(),
        1 => vec![Tree::singleton(0)],
        2 => vec![Tree::path(2)],
        _ => {
            let mut out = Vec::new();
            let mut seq = vec![0 as Vertex; n - 2];
            loop {
                out.push(from_pruefer(&seq));
                let mut i = 0;
                loop {
                    if i == seq.len() {
                        return out;
                    }
                    seq[i] += 1;
                    if (seq[i] as usize) < n {
                        break;
                    }
                    seq[i] = 0;
                    i += 1;
                }
            }
        }
    }
}

/// A uniformly random labelled tree on `0..n`.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> Tree {
    if n <= 2 {
        return if n == 2 { Tree::path(2) } else { Tree::singleton(0) };
    }
    let seq: Vec<Vertex> = (0..n - 2).map(|_| rng.gen_range(0..n as Vertex)).collect();
    from_pruefer(&seq)
}
