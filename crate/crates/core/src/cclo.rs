//! Convex converging linear orders on finite trees, the π map from ordered
//! rooted configurations, and the constructions inverting it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::decorated::DecoratedTree;
use crate::error::{Error, Result};
use crate::relstruct::{AgeConstraint, RelStructure, Signature, ORDER_RELATION};
use crate::tree::{RootedTree, Tree, Vertex};

/// Default cap on the number of vertices for exhaustive enumeration.
pub const DEFAULT_VERTEX_BOUND: usize = 8;

/// A strict linear order on the vertices of a tree, stored as ranks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeLinearOrder {
    tree: Tree,
    ranks: BTreeMap<Vertex, usize>,
}

impl TreeLinearOrder {
    /// `seq` lists the vertices from least to greatest.
    pub fn from_sequence(tree: Tree, seq: &[Vertex]) -> Result<Self> {
        let ranks: BTreeMap<Vertex, usize> = seq.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        if ranks.len() != seq.len() || ranks.len() != tree.len() || seq.iter().any(|&v| !tree.contains(v)) {
            return Err(Error::InvalidOrder("sequence must list every vertex exactly once".into()));
        }
        Ok(TreeLinearOrder { tree, ranks })
    }

    pub fn from_ranks(tree: Tree, ranks: BTreeMap<Vertex, usize>) -> Result<Self> {
        let mut seq: Vec<(usize, Vertex)> = ranks.iter().map(|(&v, &r)| (r, v)).collect();
        seq.sort_unstable();
        if seq.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidOrder("ranks must be distinct".into()));
        }
        let seq: Vec<Vertex> = seq.into_iter().map(|(_, v)| v).collect();
        TreeLinearOrder::from_sequence(tree, &seq)
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn ranks(&self) -> &BTreeMap<Vertex, usize> {
        &self.ranks
    }

    pub fn rank(&self, v: Vertex) -> usize {
        self.ranks[&v]
    }

    pub fn lt(&self, x: Vertex, y: Vertex) -> bool {
        self.ranks[&x] < self.ranks[&y]
    }

    /// Vertices from least to greatest.
    pub fn sequence(&self) -> Vec<Vertex> {
        let mut seq: Vec<Vertex> = self.ranks.keys().copied().collect();
        seq.sort_by_key(|v| self.ranks[v]);
        seq
    }

    pub fn min(&self) -> Vertex {
        self.sequence()[0]
    }

    /// Sequence of the vertices of `subset`, least first.
    pub fn restricted_sequence(&self, subset: &BTreeSet<Vertex>) -> Vec<Vertex> {
        self.sequence().into_iter().filter(|v| subset.contains(v)).collect()
    }
}

/// All geodesics of a tree, keyed by endpoints.
struct Paths {
    paths: BTreeMap<(Vertex, Vertex), Vec<Vertex>>,
}

impl Paths {
    fn new(t: &Tree) -> Self {
        let vs: Vec<Vertex> = t.vertices().collect();
        let mut paths = BTreeMap::new();
        for &a in &vs {
            for &b in &vs {
                paths.insert((a, b), t.path_between(a, b).unwrap());
            }
        }
        Paths { paths }
    }

    fn get(&self, a: Vertex, b: Vertex) -> &[Vertex] {
        &self.paths[&(a, b)]
    }

    /// Whether `y` lies on `[x, z]` (endpoints allowed).
    fn on(&self, x: Vertex, y: Vertex, z: Vertex) -> bool {
        self.get(x, z).contains(&y)
    }

    /// Ordered collinear triples `(x1, x2, x3)` of distinct vertices.
    fn triples(&self) -> Vec<[Vertex; 3]> {
        let mut out = Vec::new();
        for (&(a, c), p) in &self.paths {
            for &b in p.iter().skip(1).take(p.len().saturating_sub(2)) {
                out.push([a, b, c]);
            }
        }
        out.sort_unstable();
        out
    }

    /// Ordered collinear quadruples of distinct vertices, in line order.
    fn quadruples(&self) -> Vec<[Vertex; 4]> {
        let mut out = Vec::new();
        for (&(a, d), p) in &self.paths {
            if p.len() < 4 {
                continue;
            }
            let inner = &p[1..p.len() - 1];
            for i in 0..inner.len() {
                for j in i + 1..inner.len() {
                    out.push([a, inner[i], inner[j], d]);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// First collinear triple `(x1, x2, x3)` with `x1 < x3 < x2`, if any.
pub fn converging_witness(o: &TreeLinearOrder) -> Option<[Vertex; 3]> {
    Paths::new(&o.tree)
        .triples()
        .into_iter()
        .find(|&[x1, x2, x3]| o.lt(x1, x3) && o.lt(x3, x2))
}

pub fn is_converging(o: &TreeLinearOrder) -> bool {
    converging_witness(o).is_none()
}

/// First collinear quadruple `(x1, x2, x3, x4)` with `x2 < x3 < x1 < x4`.
/// Errors on orders that are not converging.
pub fn convex_witness(o: &TreeLinearOrder) -> Result<Option<[Vertex; 4]>> {
    if let Some(w) = converging_witness(o) {
        return Err(Error::NotConverging(w.to_vec()));
    }
    Ok(Paths::new(&o.tree)
        .quadruples()
        .into_iter()
        .find(|&[x1, x2, x3, x4]| o.lt(x2, x3) && o.lt(x3, x1) && o.lt(x1, x4)))
}

pub fn is_convex(o: &TreeLinearOrder) -> Result<bool> {
    Ok(convex_witness(o)?.is_none())
}

pub fn is_cclo(o: &TreeLinearOrder) -> bool {
    is_converging(o) && matches!(is_convex(o), Ok(true))
}

/// Convexity read literally with `m(x, y)` the least vertex on `[x, y]`:
/// for `x < y`, every `x′ ∈ [x, m)` and `y′ ∈ (m, y]` satisfy `x′ ≤ y′`.
pub fn is_convex_duchesne(o: &TreeLinearOrder) -> Result<bool> {
    if let Some(w) = converging_witness(o) {
        return Err(Error::NotConverging(w.to_vec()));
    }
    let paths = Paths::new(&o.tree);
    for x in o.tree.vertices() {
        for y in o.tree.vertices().filter(|&y| o.lt(x, y)) {
            let p = paths.get(x, y);
            let mi = (0..p.len()).min_by_key(|&i| o.rank(p[i])).unwrap();
            for &xp in &p[..mi] {
                for &yp in &p[mi + 1..] {
                    if o.lt(yp, xp) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Every convex converging order on `t`, sorted by their sequences.
/// Orders are grown from the least vertex upward; a forbidden pattern is
/// rejected as soon as its greatest vertex is placed.
pub fn enumerate_cclo(t: &Tree, bound: usize) -> Result<Vec<TreeLinearOrder>> {
    if t.len() > bound {
        return Err(Error::BoundExceeded { size: t.len(), bound });
    }
    let paths = Paths::new(t);
    // Patterns indexed by the vertex that is greatest in them.
    let mut tri_by_middle: BTreeMap<Vertex, Vec<(Vertex, Vertex)>> = BTreeMap::new();
    for [a, b, c] in paths.triples() {
        tri_by_middle.entry(b).or_default().push((a, c));
    }
    let mut quad_by_last: BTreeMap<Vertex, Vec<[Vertex; 3]>> = BTreeMap::new();
    for [x1, x2, x3, x4] in paths.quadruples() {
        quad_by_last.entry(x4).or_default().push([x1, x2, x3]);
    }
    let vs: Vec<Vertex> = t.vertices().collect();
    let ctx = Enum { vs: &vs, tri_by_middle, quad_by_last };
    let seqs: Vec<Vec<Vec<Vertex>>> = vs
        .par_iter()
        .map(|&first| {
            let mut out = Vec::new();
            let mut rank = BTreeMap::from([(first, 0usize)]);
            let mut seq = vec![first];
            ctx.grow(&mut seq, &mut rank, &mut out);
            out
        })
        .collect();
    seqs.into_iter()
        .flatten()
        .map(|s| TreeLinearOrder::from_sequence(t.clone(), &s))
        .collect()
}

struct Enum<'a> {
    vs: &'a [Vertex],
    tri_by_middle: BTreeMap<Vertex, Vec<(Vertex, Vertex)>>,
    quad_by_last: BTreeMap<Vertex, Vec<[Vertex; 3]>>,
}

impl Enum<'_> {
    fn allowed(&self, v: Vertex, rank: &BTreeMap<Vertex, usize>) -> bool {
        let placed = |x: &Vertex| rank.contains_key(x);
        if let Some(ts) = self.tri_by_middle.get(&v) {
            if ts.iter().any(|(a, c)| placed(a) && placed(c)) {
                return false;
            }
        }
        if let Some(qs) = self.quad_by_last.get(&v) {
            let bad = qs.iter().any(|[x1, x2, x3]| match (rank.get(x1), rank.get(x2), rank.get(x3)) {
                (Some(r1), Some(r2), Some(r3)) => r2 < r3 && r3 < r1,
                _ => false,
            });
            if bad {
                return false;
            }
        }
        true
    }

    fn grow(&self, seq: &mut Vec<Vertex>, rank: &mut BTreeMap<Vertex, usize>, out: &mut Vec<Vec<Vertex>>) {
        if seq.len() == self.vs.len() {
            out.push(seq.clone());
            return;
        }
        for &v in self.vs {
            if rank.contains_key(&v) || !self.allowed(v, rank) {
                continue;
            }
            rank.insert(v, seq.len());
            seq.push(v);
            self.grow(seq, rank, out);
            seq.pop();
            rank.remove(&v);
        }
    }
}

/// Violation of the first five-point property: collinear
/// `(z1, y1, x, y2, z2)` with `x < y1 < y2` but not `z1 < z2`.
pub fn five_point_one_witness(o: &TreeLinearOrder) -> Option<[Vertex; 5]> {
    let paths = Paths::new(&o.tree);
    let vs: Vec<Vertex> = o.tree.vertices().collect();
    for &x in &vs {
        for &y1 in vs.iter().filter(|&&y| o.lt(x, y)) {
            for &y2 in vs.iter().filter(|&&y| o.lt(y1, y)) {
                // x strictly between y1 and y2
                if !paths.on(y1, x, y2) {
                    continue;
                }
                for &z1 in vs.iter().filter(|&&z| paths.on(x, y1, z)) {
                    for &z2 in vs.iter().filter(|&&z| paths.on(x, y2, z)) {
                        if !o.lt(z1, z2) {
                            return Some([z1, y1, x, y2, z2]);
                        }
                    }
                }
            }
        }
    }
    None
}

/// Violation of the second five-point property: `x < y`, distinct
/// components `a1, a2` around `y` avoiding `x`, `z1, z1′ ∈ a1`,
/// `z2, z2′ ∈ a2` with `z1 < z2` but `z2′ < z1′`. Reported as
/// `[x, y, z1, z2, z1′, z2′]`.
pub fn five_point_two_witness(o: &TreeLinearOrder) -> Option<[Vertex; 6]> {
    let t = &o.tree;
    for y in t.vertices() {
        let comps: Vec<BTreeSet<Vertex>> = t
            .components(y)
            .unwrap()
            .into_iter()
            .map(|c| t.component_vertices(c).unwrap())
            .collect();
        for x in t.vertices().filter(|&x| o.lt(x, y)) {
            let avoiding: Vec<&BTreeSet<Vertex>> = comps.iter().filter(|c| !c.contains(&x)).collect();
            for (i, a1) in avoiding.iter().enumerate() {
                for (j, a2) in avoiding.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    for &z1 in a1.iter() {
                        for &z2 in a2.iter().filter(|&&z2| o.lt(z1, z2)) {
                            for &z1p in a1.iter() {
                                for &z2p in a2.iter() {
                                    if !o.lt(z1p, z2p) {
                                        return Some([x, y, z1, z2, z1p, z2p]);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

/// A decorated tree over the pointed-linear-order signature in which every
/// decoration is a linear order with the parent component least.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedConfiguration {
    dt: DecoratedTree,
}

impl OrderedConfiguration {
    /// `orders[v]` lists the neighbors of `v` from least to greatest and must
    /// start with the parent. Leaves may be omitted.
    pub fn new(rt: RootedTree, orders: &BTreeMap<Vertex, Vec<Vertex>>) -> Result<Self> {
        let mut decorations = BTreeMap::new();
        for (&v, seq) in orders {
            let lt: BTreeSet<Vec<Vertex>> = seq
                .iter()
                .enumerate()
                .flat_map(|(i, &a)| seq[i + 1..].iter().map(move |&b| vec![a, b]))
                .collect();
            let parent = rt.parent(v).ok_or_else(|| Error::MalformedDecoration {
                vertex: v,
                reason: "the root carries no order".into(),
            })?;
            let dec = RelStructure::new(
                Signature::pointed_order(),
                seq.iter().copied(),
                BTreeMap::from([(ORDER_RELATION.to_string(), lt)]),
                Some(parent),
            )?;
            decorations.insert(v, dec);
        }
        OrderedConfiguration::from_decorated(DecoratedTree::new(rt, Signature::pointed_order(), decorations)?)
    }

    pub fn from_decorated(dt: DecoratedTree) -> Result<Self> {
        if dt.signature() != &Signature::pointed_order() {
            return Err(Error::SignatureMismatch);
        }
        dt.validate_age(&[AgeConstraint::PointedTotalOrder(ORDER_RELATION.into())])?;
        Ok(OrderedConfiguration { dt })
    }

    pub fn decorated(&self) -> &DecoratedTree {
        &self.dt
    }

    pub fn root(&self) -> Vertex {
        self.dt.root()
    }

    /// Neighbors of `v` ordered by its decoration, least first.
    pub fn order_at(&self, v: Vertex) -> Vec<Vertex> {
        let dec = self.dt.decoration(v).expect("non-root vertex");
        let mut out: Vec<Vertex> = dec.universe().iter().copied().collect();
        out.sort_by(|&a, &b| {
            if a == b {
                Ordering::Equal
            } else if dec.holds(ORDER_RELATION, &[a, b]) {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        });
        out
    }

    /// Whether `ρ(x)` is the component of `x` containing `y`.
    pub fn rho_points_toward(&self, x: Vertex, y: Vertex) -> Result<bool> {
        let rt = self.dt.rooted_tree();
        Ok(rt.rho(x)? == rt.component_of(x, y)?)
    }
}

/// The order `π(cfg)` on the vertices other than the root: `x < y` iff
/// `x ∧ y = x`, or `Φ(w, x) ≺ Φ(w, y)` at `w = x ∧ y`.
pub fn pi_order(cfg: &OrderedConfiguration) -> Result<TreeLinearOrder> {
    let rt = cfg.dt.rooted_tree();
    let root = cfg.root();
    let tree = if rt.len() > 1 { rt.tree().remove_leaf(root)? } else { return Err(Error::InvalidOrder("empty configuration".into())) };
    let less = |x: Vertex, y: Vertex| -> Result<bool> {
        let w = rt.meet(x, y)?;
        if w == x {
            return Ok(true);
        }
        if w == y {
            return Ok(false);
        }
        let (a, b) = (rt.component_of(w, x)?.direction, rt.component_of(w, y)?.direction);
        Ok(cfg.dt.decoration(w).expect("non-root").holds(ORDER_RELATION, &[a, b]))
    };
    let vs: Vec<Vertex> = tree.vertices().collect();
    let mut ranks = BTreeMap::new();
    for &x in &vs {
        let mut below = 0;
        for &y in vs.iter().filter(|&&y| y != x) {
            let (yx, xy) = (less(y, x)?, less(x, y)?);
            if yx == xy {
                return Err(Error::InvalidOrder(format!("{x} and {y} are not comparable exactly one way")));
            }
            below += yx as usize;
        }
        ranks.insert(x, below);
    }
    TreeLinearOrder::from_ranks(tree, ranks)
}

/// For a CCLO `o` on `t`, builds a configuration on `t` plus a fresh `w`
/// between the minimum `x0` and its greatest neighbor `x1`, with the root
/// attached to `w`, such that `π` restricted to `t` is `o`.
///
/// Around `w`: root side, then `x0`'s side, then `x1`'s side. Around any other
/// vertex: the root side first, then the components by their least vertex.
pub fn realize_cclo(t: &Tree, o: &TreeLinearOrder) -> Result<OrderedConfiguration> {
    if o.tree() != t {
        return Err(Error::InvalidOrder("order is on a different tree".into()));
    }
    if !is_cclo(o) {
        return Err(Error::NotCclo);
    }
    let x0 = o.min();
    let original: BTreeSet<Vertex> = t.vertices().collect();
    if t.len() == 1 {
        let (ext, xi) = t.attach_leaf(x0)?;
        let rt = RootedTree::new(ext, xi)?;
        return OrderedConfiguration::new(rt, &BTreeMap::from([(x0, vec![xi])]));
    }
    let x1 = *t.neighbors(x0)?.iter().max_by_key(|&&n| o.rank(n)).unwrap();
    let (with_w, w) = t.insert_between(x0, x1)?;
    let (ext, xi) = with_w.attach_leaf(w)?;
    let rt = RootedTree::new(ext, xi)?;
    let mut orders = BTreeMap::from([(w, vec![xi, x0, x1])]);
    for &x in &original {
        let parent = rt.parent(x).unwrap();
        let mut rest: Vec<(usize, Vertex)> = Vec::new();
        for &n in rt.children(x)? {
            let comp = rt.tree().component_vertices(rt.component_of(x, n)?)?;
            let rep = comp.iter().filter(|v| original.contains(v)).map(|&v| o.rank(v)).min().unwrap();
            rest.push((rep, n));
        }
        rest.sort_unstable();
        let mut seq = vec![parent];
        seq.extend(rest.into_iter().map(|(_, n)| n));
        orders.insert(x, seq);
    }
    OrderedConfiguration::new(rt, &orders)
}

/// Two configurations on `t` whose π-orders agree on `t` although `ρ(x0)`
/// points toward `x1` in the first and away from all of `t` in the second.
pub fn collapse_pair(t: &Tree, x0: Vertex, x1: Vertex) -> Result<(OrderedConfiguration, OrderedConfiguration)> {
    if !t.is_adjacent(x0, x1) {
        return Err(Error::NotAdjacent(x0, x1));
    }
    // shared order on the T-components of each vertex: by neighbor id
    let others = |x: Vertex, parent_side: Vertex| -> Vec<Vertex> {
        t.neighbors(x).unwrap().iter().copied().filter(|&n| n != parent_side).collect()
    };
    // q1: root above a fresh w between x0 and x1
    let (with_w, w) = t.insert_between(x0, x1)?;
    let (ext1, xi1) = with_w.attach_leaf(w)?;
    let rt1 = RootedTree::new(ext1, xi1)?;
    // q2: root on a fresh leaf of x0
    let (ext2, xi2) = t.attach_leaf(x0)?;
    let rt2 = RootedTree::new(ext2, xi2)?;

    let mut o1 = BTreeMap::from([(w, vec![xi1, x0, x1])]);
    let mut o2 = BTreeMap::new();
    for x in t.vertices() {
        if x == x0 {
            let mut s1 = vec![w];
            s1.extend(others(x0, x1));
            o1.insert(x0, s1);
            let mut s2 = vec![xi2];
            s2.extend(others(x0, x1));
            s2.push(x1);
            o2.insert(x0, s2);
            continue;
        }
        let p2 = rt2.parent(x).unwrap();
        let tail = others(x, p2);
        let p1 = rt1.parent(x).unwrap();
        let mut s1 = vec![p1];
        s1.extend(tail.iter().copied());
        o1.insert(x, s1);
        let mut s2 = vec![p2];
        s2.extend(tail);
        o2.insert(x, s2);
    }
    o1.retain(|v, s| s.len() > 1 || rt1.parent(*v).is_some());
    Ok((OrderedConfiguration::new(rt1, &o1)?, OrderedConfiguration::new(rt2, &o2)?))
}

/// Whether two orders agree on a common vertex set.
pub fn agree_on(a: &TreeLinearOrder, b: &TreeLinearOrder, vertices: &BTreeSet<Vertex>) -> bool {
    a.restricted_sequence(vertices) == b.restricted_sequence(vertices)
}
