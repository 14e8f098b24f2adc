//! Finite combinatorial trees, rooted trees, medians and components.
//!
//! A [`Tree`] is an element of the age of the branch-point structure: a finite
//! set of vertices closed under the median, with adjacency meaning "nothing in
//! between". A [`RootedTree`] adds a distinguished root `ξ` of degree one and
//! exposes the meet `x ∧ y = K(x, y, ξ)`, the induced partial order, heights,
//! and the parent component `ρ(v)`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};

/// Opaque vertex identifier.
pub type Vertex = u32;

/// A component around `anchor`: the class of `tree ∖ {anchor}` containing the
/// neighbor `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Component {
    pub anchor: Vertex,
    pub direction: Vertex,
}

impl Component {
    pub fn new(anchor: Vertex, direction: Vertex) -> Self {
        Component { anchor, direction }
    }
}

/// Finite unrooted combinatorial tree.
#[derive(Debug, Clone)]
pub struct Tree {
    adj: BTreeMap<Vertex, BTreeSet<Vertex>>,
    next_id: Vertex,
}

impl PartialEq for Tree {
    fn eq(&self, other: &Self) -> bool {
        self.adj == other.adj
    }
}

impl Eq for Tree {}

impl Tree {
    /// Builds a tree from a vertex list and an edge list, checking that the
    /// graph is connected and acyclic.
    pub fn new(vertices: impl IntoIterator<Item = Vertex>, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut adj: BTreeMap<Vertex, BTreeSet<Vertex>> = BTreeMap::new();
        for v in vertices {
            if adj.insert(v, BTreeSet::new()).is_some() {
                return Err(Error::MalformedTree(format!("duplicate vertex {v}")));
            }
        }
        if adj.is_empty() {
            return Err(Error::MalformedTree("no vertices".into()));
        }
        for &(a, b) in edges {
            if a == b {
                return Err(Error::MalformedTree(format!("self-loop at {a}")));
            }
            if !adj.contains_key(&a) {
                return Err(Error::UnknownVertex(a));
            }
            if !adj.contains_key(&b) {
                return Err(Error::UnknownVertex(b));
            }
            if !adj.get_mut(&a).unwrap().insert(b) {
                return Err(Error::MalformedTree(format!("duplicate edge {a}-{b}")));
            }
            adj.get_mut(&b).unwrap().insert(a);
        }
        if edges.len() + 1 != adj.len() {
            return Err(Error::MalformedTree(format!(
                "{} vertices need {} edges, got {}",
                adj.len(),
                adj.len() - 1,
                edges.len()
            )));
        }
        let next_id = adj.keys().next_back().map_or(0, |m| m + 1);
        let tree = Tree { adj, next_id };
        let start = *tree.adj.keys().next().unwrap();
        if tree.distances_from(start).len() != tree.len() {
            return Err(Error::MalformedTree("graph is not connected".into()));
        }
        Ok(tree)
    }

    /// Single-vertex tree.
    pub fn singleton(v: Vertex) -> Self {
        let mut adj = BTreeMap::new();
        adj.insert(v, BTreeSet::new());
        Tree { adj, next_id: v + 1 }
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        assert!(n >= 1);
        let edges: Vec<_> = (1..n as Vertex).map(|i| (i - 1, i)).collect();
        Tree::new(0..n as Vertex, &edges).expect("path is a tree")
    }

    /// Star with center `0` and leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves as Vertex).map(|i| (0, i)).collect();
        Tree::new(0..=leaves as Vertex, &edges).expect("star is a tree")
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    pub fn neighbors(&self, v: Vertex) -> Result<&BTreeSet<Vertex>> {
        self.adj.get(&v).ok_or(Error::UnknownVertex(v))
    }

    pub fn degree(&self, v: Vertex) -> Result<usize> {
        Ok(self.neighbors(v)?.len())
    }

    pub fn is_adjacent(&self, x: Vertex, y: Vertex) -> bool {
        self.adj.get(&x).is_some_and(|n| n.contains(&y))
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        self.adj
            .iter()
            .flat_map(|(&a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect()
    }

    /// Smallest id never used by this tree or any tree it was derived from.
    pub fn fresh_id(&self) -> Vertex {
        self.next_id
    }

    fn check(&self, v: Vertex) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    fn distances_from(&self, start: Vertex) -> BTreeMap<Vertex, (usize, Vertex)> {
        // vertex -> (distance, predecessor on the way back to start)
        let mut seen = BTreeMap::new();
        seen.insert(start, (0, start));
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let d = seen[&v].0;
            for &n in &self.adj[&v] {
                if !seen.contains_key(&n) {
                    seen.insert(n, (d + 1, v));
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    /// Vertices of the geodesic from `x` to `y`, endpoints included, in order.
    pub fn path_between(&self, x: Vertex, y: Vertex) -> Result<Vec<Vertex>> {
        self.check(x)?;
        self.check(y)?;
        let back = self.distances_from(y);
        let mut out = vec![x];
        let mut cur = x;
        while cur != y {
            cur = back[&cur].1;
            out.push(cur);
        }
        Ok(out)
    }

    /// The center `K(x, y, z)`: the unique vertex lying on all three geodesics.
    pub fn median(&self, x: Vertex, y: Vertex, z: Vertex) -> Result<Vertex> {
        let xy: BTreeSet<_> = self.path_between(x, y)?.into_iter().collect();
        let xz: BTreeSet<_> = self.path_between(x, z)?.into_iter().collect();
        let yz = self.path_between(y, z)?;
        let mut common = yz.into_iter().filter(|v| xy.contains(v) && xz.contains(v));
        let m = common.next().expect("trees have medians");
        debug_assert!(common.next().is_none());
        Ok(m)
    }

    /// Betweenness `B(x, y, z)`, i.e. `K(x, y, z) = y`.
    pub fn between(&self, x: Vertex, y: Vertex, z: Vertex) -> Result<bool> {
        Ok(self.median(x, y, z)? == y)
    }

    /// `Φ(v, y)`: the component around `v` containing `y`.
    pub fn component_of(&self, v: Vertex, y: Vertex) -> Result<Component> {
        if v == y {
            return Err(Error::SameVertex(v));
        }
        let path = self.path_between(v, y)?;
        Ok(Component::new(v, path[1]))
    }

    /// The components around `v`, one per neighbor.
    pub fn components(&self, v: Vertex) -> Result<Vec<Component>> {
        Ok(self.neighbors(v)?.iter().map(|&n| Component::new(v, n)).collect())
    }

    /// Vertices lying in the component `c` (excluding its anchor).
    pub fn component_vertices(&self, c: Component) -> Result<BTreeSet<Vertex>> {
        if !self.is_adjacent(c.anchor, c.direction) {
            return Err(Error::NotAdjacent(c.anchor, c.direction));
        }
        let mut out = BTreeSet::from([c.direction]);
        let mut stack = vec![c.direction];
        while let Some(v) = stack.pop() {
            for &n in &self.adj[&v] {
                if n != c.anchor && out.insert(n) {
                    stack.push(n);
                }
            }
        }
        Ok(out)
    }

    /// Closes `gens` under the median and returns the induced combinatorial
    /// tree, where two closure vertices are adjacent iff no closure vertex lies
    /// strictly between them.
    pub fn generated_subtree(&self, gens: &BTreeSet<Vertex>) -> Result<Tree> {
        if gens.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        for &g in gens {
            self.check(g)?;
        }
        let closure = self.median_closure(gens)?;
        let mut edges = Vec::new();
        let members: Vec<_> = closure.iter().copied().collect();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                let path = self.path_between(a, b)?;
                if path[1..path.len() - 1].iter().all(|v| !closure.contains(v)) {
                    edges.push((a, b));
                }
            }
        }
        let mut sub = Tree::new(members, &edges)?;
        sub.next_id = sub.next_id.max(self.next_id);
        Ok(sub)
    }

    /// Fixpoint of the median over all triples of the current set.
    pub fn median_closure(&self, gens: &BTreeSet<Vertex>) -> Result<BTreeSet<Vertex>> {
        let mut closure = gens.clone();
        loop {
            let members: Vec<_> = closure.iter().copied().collect();
            let mut added = BTreeSet::new();
            for (i, &a) in members.iter().enumerate() {
                for (j, &b) in members.iter().enumerate().skip(i + 1) {
                    for &c in &members[j + 1..] {
                        let m = self.median(a, b, c)?;
                        if !closure.contains(&m) {
                            added.insert(m);
                        }
                    }
                }
            }
            if added.is_empty() {
                return Ok(closure);
            }
            closure.extend(added);
        }
    }

    /// Replaces the edge `x - y` by `x - z - y` for a fresh vertex `z`.
    pub fn insert_between(&self, x: Vertex, y: Vertex) -> Result<(Tree, Vertex)> {
        self.check(x)?;
        self.check(y)?;
        if !self.is_adjacent(x, y) {
            return Err(Error::NotAdjacent(x, y));
        }
        let z = self.next_id;
        let mut adj = self.adj.clone();
        adj.get_mut(&x).unwrap().remove(&y);
        adj.get_mut(&y).unwrap().remove(&x);
        adj.get_mut(&x).unwrap().insert(z);
        adj.get_mut(&y).unwrap().insert(z);
        adj.insert(z, BTreeSet::from([x, y]));
        Ok((Tree { adj, next_id: z + 1 }, z))
    }

    /// Adds a fresh leaf hanging off `v`.
    pub fn attach_leaf(&self, v: Vertex) -> Result<(Tree, Vertex)> {
        self.check(v)?;
        let z = self.next_id;
        let mut adj = self.adj.clone();
        adj.get_mut(&v).unwrap().insert(z);
        adj.insert(z, BTreeSet::from([v]));
        Ok((Tree { adj, next_id: z + 1 }, z))
    }

    /// Removes a leaf (or the only vertex's sole neighbor relation).
    pub fn remove_leaf(&self, v: Vertex) -> Result<Tree> {
        if self.degree(v)? > 1 || self.len() == 1 {
            return Err(Error::MalformedTree(format!("{v} is not a removable leaf")));
        }
        let mut adj = self.adj.clone();
        let ns = adj.remove(&v).unwrap();
        for n in ns {
            adj.get_mut(&n).unwrap().remove(&v);
        }
        Ok(Tree { adj, next_id: self.next_id })
    }

    /// Every adjacency-preserving bijection, as maps in lexicographic order.
    pub fn automorphisms(&self) -> Vec<BTreeMap<Vertex, Vertex>> {
        let order: Vec<Vertex> = self.vertices().collect();
        let mut out = Vec::new();
        let mut map = BTreeMap::new();
        let mut used = BTreeSet::new();
        self.extend_automorphism(&order, 0, &mut map, &mut used, &mut out);
        out
    }

    fn extend_automorphism(
        &self,
        order: &[Vertex],
        i: usize,
        map: &mut BTreeMap<Vertex, Vertex>,
        used: &mut BTreeSet<Vertex>,
        out: &mut Vec<BTreeMap<Vertex, Vertex>>,
    ) {
        if i == order.len() {
            out.push(map.clone());
            return;
        }
        let v = order[i];
        for &t in order {
            if used.contains(&t) || self.adj[&v].len() != self.adj[&t].len() {
                continue;
            }
            let ok = order[..i]
                .iter()
                .all(|&u| self.is_adjacent(u, v) == self.is_adjacent(map[&u], t));
            if ok {
                map.insert(v, t);
                used.insert(t);
                self.extend_automorphism(order, i + 1, map, used, out);
                used.remove(&t);
                map.remove(&v);
            }
        }
    }

    /// Checks that `g` is a bijection of the vertex set preserving adjacency.
    pub fn is_automorphism(&self, g: &BTreeMap<Vertex, Vertex>) -> bool {
        if g.len() != self.len() || g.keys().any(|v| !self.contains(*v)) {
            return false;
        }
        let image: BTreeSet<_> = g.values().copied().collect();
        if image.len() != self.len() || image.iter().any(|v| !self.contains(*v)) {
            return false;
        }
        self.edges().iter().all(|&(a, b)| self.is_adjacent(g[&a], g[&b]))
    }

    /// Relabels every vertex through `f`, which must be injective.
    pub fn relabel(&self, f: impl Fn(Vertex) -> Vertex) -> Tree {
        let edges: Vec<_> = self.edges().into_iter().map(|(a, b)| (f(a), f(b))).collect();
        Tree::new(self.vertices().map(&f), &edges).expect("injective relabeling")
    }
}

/// Finite tree with a distinguished root `ξ` of degree at most one.
#[derive(Debug, Clone)]
pub struct RootedTree {
    tree: Tree,
    root: Vertex,
    parent: BTreeMap<Vertex, Vertex>,
    children: BTreeMap<Vertex, Vec<Vertex>>,
    depth: BTreeMap<Vertex, usize>,
}

impl PartialEq for RootedTree {
    fn eq(&self, other: &Self) -> bool {
        self.tree == other.tree && self.root == other.root
    }
}

impl Eq for RootedTree {}

impl RootedTree {
    pub fn new(tree: Tree, root: Vertex) -> Result<Self> {
        let deg = tree.degree(root)?;
        if tree.len() > 1 && deg != 1 {
            return Err(Error::MalformedTree(format!("root {root} has degree {deg}, expected 1")));
        }
        let mut parent = BTreeMap::new();
        let mut children: BTreeMap<Vertex, Vec<Vertex>> = tree.vertices().map(|v| (v, Vec::new())).collect();
        let mut depth = BTreeMap::from([(root, 0usize)]);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &n in tree.neighbors(v)? {
                if n != root && !parent.contains_key(&n) && parent.get(&v) != Some(&n) {
                    parent.insert(n, v);
                    depth.insert(n, depth[&v] + 1);
                    children.get_mut(&v).unwrap().push(n);
                    queue.push_back(n);
                }
            }
        }
        Ok(RootedTree { tree, root, parent, children, depth })
    }

    /// Builds a rooted tree from a parent map; ids not mentioned as children
    /// other than `root` are rejected.
    pub fn from_parents(root: Vertex, parents: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut vertices = vec![root];
        let mut edges = Vec::new();
        for &(child, p) in parents {
            vertices.push(child);
            edges.push((p, child));
        }
        RootedTree::new(Tree::new(vertices, &edges)?, root)
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.tree.contains(v)
    }

    /// `r_T`, the unique child of the root (absent for the one-vertex tree).
    pub fn r(&self) -> Option<Vertex> {
        self.children[&self.root].first().copied()
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        self.parent.get(&v).copied()
    }

    /// `Succ(v)`: the immediate successors of `v`, in increasing id order.
    pub fn children(&self, v: Vertex) -> Result<&[Vertex]> {
        self.children.get(&v).map(|c| c.as_slice()).ok_or(Error::UnknownVertex(v))
    }

    /// Number of strict predecessors of `v` (so `ξ` has height 0, `r` height 1).
    pub fn height(&self, v: Vertex) -> Result<usize> {
        self.depth.get(&v).copied().ok_or(Error::UnknownVertex(v))
    }

    /// Maximum height over all vertices.
    pub fn tree_height(&self) -> usize {
        self.depth.values().copied().max().unwrap_or(0)
    }

    pub fn is_leaf(&self, v: Vertex) -> bool {
        v != self.root && self.children.get(&v).is_some_and(|c| c.is_empty())
    }

    /// Vertices ordered by height, then by id. Parents precede children.
    pub fn vertices_by_level(&self) -> Vec<Vertex> {
        let mut vs: Vec<_> = self.tree.vertices().collect();
        vs.sort_by_key(|v| (self.depth[v], *v));
        vs
    }

    /// Vertices at exactly height `h`, increasing.
    pub fn level(&self, h: usize) -> Vec<Vertex> {
        self.tree.vertices().filter(|v| self.depth[v] == h).collect()
    }

    /// `x ∧ y = K(x, y, ξ)`, computed as the lowest common ancestor.
    pub fn meet(&self, x: Vertex, y: Vertex) -> Result<Vertex> {
        let (mut a, mut b) = (x, y);
        let (mut da, mut db) = (self.height(a)?, self.height(b)?);
        while da > db {
            a = self.parent[&a];
            da -= 1;
        }
        while db > da {
            b = self.parent[&b];
            db -= 1;
        }
        while a != b {
            a = self.parent[&a];
            b = self.parent[&b];
        }
        Ok(a)
    }

    /// `x ⪯ y` iff `x ∧ y = x`.
    pub fn precedes(&self, x: Vertex, y: Vertex) -> Result<bool> {
        Ok(self.meet(x, y)? == x)
    }

    /// `ρ(v)`: the component around `v` containing the root.
    pub fn rho(&self, v: Vertex) -> Result<Component> {
        self.check(v)?;
        match self.parent(v) {
            Some(p) => Ok(Component::new(v, p)),
            None => Err(Error::SameVertex(v)),
        }
    }

    fn check(&self, v: Vertex) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    /// `Φ(v, y)` for `v ≠ y`, using parent pointers.
    pub fn component_of(&self, v: Vertex, y: Vertex) -> Result<Component> {
        if v == y {
            return Err(Error::SameVertex(v));
        }
        let m = self.meet(v, y)?;
        if m != v {
            return Ok(Component::new(v, self.parent[&v]));
        }
        // v is a strict ancestor of y: climb from y to the child of v.
        let mut cur = y;
        while self.parent[&cur] != v {
            cur = self.parent[&cur];
        }
        Ok(Component::new(v, cur))
    }

    /// `T(t) = {s : t ⪯ s} ∪ {ξ}`.
    pub fn subtree_at(&self, t: Vertex) -> Result<BTreeSet<Vertex>> {
        self.check(t)?;
        let mut out = BTreeSet::from([self.root, t]);
        let mut stack = vec![t];
        while let Some(v) = stack.pop() {
            for &c in &self.children[&v] {
                out.insert(c);
                stack.push(c);
            }
        }
        Ok(out)
    }

    /// Closure of `gens ∪ {ξ}` under the meet, as a rooted tree on the same ids.
    pub fn generated(&self, gens: &BTreeSet<Vertex>) -> Result<RootedTree> {
        let closure = self.meet_closure(gens)?;
        self.induced(&closure)
    }

    /// Closure of `gens ∪ {ξ}` under the meet.
    pub fn meet_closure(&self, gens: &BTreeSet<Vertex>) -> Result<BTreeSet<Vertex>> {
        if gens.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        let mut closure = gens.clone();
        closure.insert(self.root);
        loop {
            let members: Vec<_> = closure.iter().copied().collect();
            let mut added = Vec::new();
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    let m = self.meet(a, b)?;
                    if !closure.contains(&m) {
                        added.push(m);
                    }
                }
            }
            if added.is_empty() {
                return Ok(closure);
            }
            closure.extend(added);
        }
    }

    /// The rooted tree induced on a meet-closed vertex set containing the root.
    /// The parent of each vertex is its greatest strict predecessor in the set.
    pub fn induced(&self, set: &BTreeSet<Vertex>) -> Result<RootedTree> {
        if !set.contains(&self.root) {
            return Err(Error::MalformedTree("induced set must contain the root".into()));
        }
        let mut parents = Vec::new();
        for &v in set {
            self.check(v)?;
            if v == self.root {
                continue;
            }
            let mut cur = self.parent[&v];
            while !set.contains(&cur) {
                cur = self.parent[&cur];
            }
            parents.push((v, cur));
        }
        let mut rt = RootedTree::from_parents(self.root, &parents)?;
        rt.tree.next_id = rt.tree.next_id.max(self.tree.next_id);
        if rt.tree.degree(self.root)? > 1 {
            return Err(Error::MalformedTree("induced set is not meet-closed".into()));
        }
        Ok(rt)
    }

    /// Inserts a fresh vertex on the edge `x - y`, keeping the root.
    pub fn insert_between(&self, x: Vertex, y: Vertex) -> Result<(RootedTree, Vertex)> {
        let (t, z) = self.tree.insert_between(x, y)?;
        Ok((RootedTree::new(t, self.root)?, z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_median(t: &Tree, x: Vertex, y: Vertex, z: Vertex) -> Vertex {
        let on = |a, b, v| t.path_between(a, b).unwrap().contains(&v);
        let cands: Vec<_> = t.vertices().filter(|&v| on(x, y, v) && on(x, z, v) && on(y, z, v)).collect();
        assert_eq!(cands.len(), 1);
        cands[0]
    }

    #[test]
    fn median_on_path_and_star() {
        let p = Tree::path(3);
        assert_eq!(p.median(0, 1, 2).unwrap(), 1);
        assert_eq!(p.median(0, 0, 2).unwrap(), 0);
        let s = Tree::star(3);
        assert_eq!(s.median(1, 2, 3).unwrap(), 0);
        assert_eq!(brute_median(&s, 1, 2, 3), 0);
    }

    #[test]
    fn median_rejects_unknown_vertex() {
        assert_eq!(Tree::path(2).median(0, 1, 9), Err(Error::UnknownVertex(9)));
    }

    #[test]
    fn betweenness_examples() {
        let p = Tree::path(3);
        assert!(p.between(0, 1, 2).unwrap());
        assert!(p.between(0, 0, 2).unwrap());
        let s = Tree::star(3);
        // u = 1, w = 3, m = 0
        assert!(!s.between(1, 3, 0).unwrap());
    }

    #[test]
    fn meet_examples() {
        // ξ=0 - r=1 - a=2 - b=3
        let rt = RootedTree::new(Tree::path(4), 0).unwrap();
        assert_eq!(rt.meet(2, 0).unwrap(), 0);
        assert_eq!(rt.meet(2, 3).unwrap(), 2);
        // ξ=0 - r=1, children 2, 3
        let rt = RootedTree::from_parents(0, &[(1, 0), (2, 1), (3, 1)]).unwrap();
        assert_eq!(rt.meet(2, 3).unwrap(), 1);
        assert_eq!(rt.r(), Some(1));
    }

    #[test]
    fn components() {
        let p = Tree::path(3);
        let ba = p.component_of(1, 0).unwrap();
        let bc = p.component_of(1, 2).unwrap();
        assert_ne!(ba, bc);
        assert_eq!(p.component_of(0, 1).unwrap(), p.component_of(0, 2).unwrap());
        assert_eq!(p.component_of(1, 1), Err(Error::SameVertex(1)));
        let rt = RootedTree::from_parents(0, &[(1, 0), (2, 1), (3, 1)]).unwrap();
        assert_eq!(rt.rho(2).unwrap(), rt.tree().component_of(2, 1).unwrap());
        assert_eq!(rt.rho(2).unwrap(), rt.tree().component_of(2, 0).unwrap());
        assert_eq!(rt.component_of(1, 3).unwrap(), Component::new(1, 3));
        assert_eq!(rt.component_of(2, 3).unwrap(), Component::new(2, 1));
    }

    #[test]
    fn generated_subtree_examples() {
        let p = Tree::path(3);
        let one = p.generated_subtree(&BTreeSet::from([0])).unwrap();
        assert_eq!(one.len(), 1);
        let ends = p.generated_subtree(&BTreeSet::from([0, 2])).unwrap();
        assert_eq!(ends.vertices().collect::<Vec<_>>(), vec![0, 2]);
        assert!(ends.is_adjacent(0, 2));
        let s = Tree::star(3);
        let g = s.generated_subtree(&BTreeSet::from([1, 2, 3])).unwrap();
        assert_eq!(g.vertices().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert_eq!(p.generated_subtree(&BTreeSet::new()), Err(Error::EmptyGenerators));
    }

    #[test]
    fn insert_between_keeps_old_medians() {
        let p = Tree::path(3);
        let (t, z) = p.insert_between(0, 1).unwrap();
        assert_eq!(t.path_between(0, 1).unwrap(), vec![0, z, 1]);
        assert_eq!(t.median(0, 1, 2).unwrap(), 1);
        let (t2, z2) = t.insert_between(0, z).unwrap();
        assert_ne!(z, z2);
        assert!(!p.contains(z2) && !t.contains(z2));
        assert_eq!(p.insert_between(0, 2), Err(Error::NotAdjacent(0, 2)));
        // ids dropped by a substructure are never handed out again
        let sub = t2.generated_subtree(&BTreeSet::from([0, 2])).unwrap();
        assert!(sub.fresh_id() > z2);
    }

    #[test]
    fn rejects_non_trees() {
        assert!(Tree::new([0, 1, 2], &[(0, 1), (1, 2), (2, 0)]).is_err());
        assert!(Tree::new([0, 1, 2, 3], &[(0, 1), (2, 3)]).is_err());
        assert!(Tree::new([0, 1], &[(0, 0)]).is_err());
        assert!(RootedTree::new(Tree::star(2), 0).is_err());
    }

    #[test]
    fn automorphisms_of_small_trees() {
        assert_eq!(Tree::path(3).automorphisms().len(), 2);
        assert_eq!(Tree::star(3).automorphisms().len(), 6);
        assert_eq!(Tree::path(1).automorphisms().len(), 1);
    }

    #[test]
    fn induced_subtree_and_heights() {
        let rt = RootedTree::from_parents(0, &[(1, 0), (2, 1), (3, 1), (4, 2), (5, 2)]).unwrap();
        assert_eq!(rt.height(4).unwrap(), 3);
        assert_eq!(rt.tree_height(), 3);
        let g = rt.generated(&BTreeSet::from([4, 3])).unwrap();
        assert_eq!(g.tree().vertices().collect::<Vec<_>>(), vec![0, 1, 3, 4]);
        assert_eq!(g.parent(4), Some(1));
        assert_eq!(rt.subtree_at(2).unwrap(), BTreeSet::from([0, 2, 4, 5]));
    }
}
