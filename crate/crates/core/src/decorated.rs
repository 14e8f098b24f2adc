//! Decorated rooted trees: rooted trees whose component sets carry relational
//! structures, with the regular towers `A[h]`, embeddings and automorphisms.
//!
//! A decoration at a vertex `v ≠ ξ` is a [`RelStructure`] whose universe is
//! the set of components around `v`. Components are labelled by the neighbor
//! of `v` they contain, and the constant is always the parent label, i.e. the
//! component `ρ(v)`. The root carries no decoration.
//!
//! Component maps induced by an embedding are never stored: for an embedding
//! `f` and a neighbor `n` of `s`, the component `Φ(s, n)` goes to
//! `Φ(f(s), f(n))`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::relstruct::{extension_consistent, AgeConstraint, Elem, ElemMap, RelStructure, Signature};
use crate::tree::{RootedTree, Tree, Vertex};

/// A finite object of the age of a rooted kaleidoscopic structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoratedTree {
    rt: RootedTree,
    signature: Signature,
    decorations: BTreeMap<Vertex, RelStructure>,
}

impl DecoratedTree {
    /// Validates and assembles a decorated tree. Leaves without an entry in
    /// `decorations` get the one-point decoration with no relations.
    pub fn new(rt: RootedTree, signature: Signature, mut decorations: BTreeMap<Vertex, RelStructure>) -> Result<Self> {
        if !signature.has_constant() {
            return Err(Error::MalformedStructure("decoration signature needs the constant".into()));
        }
        let root = rt.root();
        if decorations.contains_key(&root) {
            return Err(Error::MalformedDecoration { vertex: root, reason: "the root carries no decoration".into() });
        }
        for v in rt.tree().vertices().filter(|&v| v != root) {
            let parent = rt.parent(v).expect("non-root vertex has a parent");
            let neighbors = rt.tree().neighbors(v)?;
            let dec = match decorations.get(&v) {
                Some(d) => d,
                None if rt.is_leaf(v) => {
                    let d = RelStructure::new(signature.clone(), [parent], BTreeMap::new(), Some(parent))?;
                    decorations.insert(v, d);
                    &decorations[&v]
                }
                None => {
                    return Err(Error::MalformedDecoration { vertex: v, reason: "missing decoration".into() });
                }
            };
            if dec.signature() != &signature {
                return Err(Error::SignatureMismatch);
            }
            if dec.universe() != neighbors {
                return Err(Error::MalformedDecoration {
                    vertex: v,
                    reason: format!("universe {:?} differs from components {:?}", dec.universe(), neighbors),
                });
            }
            if dec.constant() != Some(parent) {
                return Err(Error::MalformedDecoration {
                    vertex: v,
                    reason: "constant must be the parent component".into(),
                });
            }
        }
        if let Some(&v) = decorations.keys().find(|v| !rt.contains(**v)) {
            return Err(Error::UnknownVertex(v));
        }
        Ok(DecoratedTree { rt, signature, decorations })
    }

    pub fn rooted_tree(&self) -> &RootedTree {
        &self.rt
    }

    pub fn tree(&self) -> &Tree {
        self.rt.tree()
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn root(&self) -> Vertex {
        self.rt.root()
    }

    pub fn r(&self) -> Option<Vertex> {
        self.rt.r()
    }

    pub fn len(&self) -> usize {
        self.rt.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rt.is_empty()
    }

    pub fn decoration(&self, v: Vertex) -> Option<&RelStructure> {
        self.decorations.get(&v)
    }

    pub fn decorations(&self) -> &BTreeMap<Vertex, RelStructure> {
        &self.decorations
    }

    /// Vertices other than the root, increasing.
    pub fn points(&self) -> Vec<Vertex> {
        self.tree().vertices().filter(|&v| v != self.root()).collect()
    }

    /// Checks every decoration against the supplied age constraints.
    pub fn validate_age(&self, constraints: &[AgeConstraint]) -> Result<()> {
        for (&v, d) in &self.decorations {
            for c in constraints {
                c.check(d).map_err(|e| Error::MalformedDecoration { vertex: v, reason: e.reason })?;
            }
        }
        Ok(())
    }

    /// The substructure induced on a meet-closed vertex set containing the
    /// root. Vertex ids are kept; decorations are restricted to the components
    /// that still contain a vertex of the set.
    pub fn induced(&self, set: &BTreeSet<Vertex>) -> Result<DecoratedTree> {
        let sub = self.rt.induced(set)?;
        let mut decorations = BTreeMap::new();
        for v in sub.tree().vertices().filter(|&v| v != sub.root()) {
            let mut to_sub = ElemMap::new();
            for &n in sub.tree().neighbors(v)? {
                to_sub.insert(self.rt.component_of(v, n)?.direction, n);
            }
            let dirs: BTreeSet<Elem> = to_sub.keys().copied().collect();
            let dec = self.decorations[&v].restrict(&dirs)?.relabel(&to_sub)?;
            decorations.insert(v, dec);
        }
        DecoratedTree::new(sub, self.signature.clone(), decorations)
    }
}

/// An embedding of decorated trees, stored as its vertex map.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecEmbedding {
    pub map: BTreeMap<Vertex, Vertex>,
    pub rooted: bool,
}

impl DecEmbedding {
    pub fn apply(&self, v: Vertex) -> Vertex {
        self.map[&v]
    }

    /// Images listed by increasing source vertex; the canonical sort key.
    pub fn images(&self) -> Vec<Vertex> {
        self.map.values().copied().collect()
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &DecEmbedding) -> DecEmbedding {
        DecEmbedding {
            map: self.map.iter().map(|(&k, v)| (k, then.map[v])).collect(),
            rooted: self.rooted && then.rooted,
        }
    }

    pub fn image(&self) -> BTreeSet<Vertex> {
        self.map.values().copied().collect()
    }
}

/// Checks that `map` is an embedding of `s` into `t` (rooted if asked): total,
/// injective, fixing the root, preserving meets, and inducing component maps
/// that are embeddings of every decoration.
pub fn is_dec_embedding(s: &DecoratedTree, t: &DecoratedTree, map: &BTreeMap<Vertex, Vertex>, rooted: bool) -> bool {
    if s.signature != t.signature || map.len() != s.len() {
        return false;
    }
    if s.tree().vertices().any(|v| !map.get(&v).is_some_and(|&x| t.rt.contains(x))) {
        return false;
    }
    if map.values().collect::<BTreeSet<_>>().len() != map.len() || map[&s.root()] != t.root() {
        return false;
    }
    if rooted && s.r().map(|r| map[&r]) != t.r() {
        return false;
    }
    let vs: Vec<_> = s.tree().vertices().collect();
    for (i, &a) in vs.iter().enumerate() {
        for &b in &vs[i + 1..] {
            let (Ok(m), Ok(fm)) = (s.rt.meet(a, b), t.rt.meet(map[&a], map[&b])) else {
                return false;
            };
            if map[&m] != fm {
                return false;
            }
        }
    }
    for (&v, dec) in &s.decorations {
        let fv = map[&v];
        let mut comp = ElemMap::new();
        for &n in s.tree().neighbors(v).expect("vertex exists") {
            match t.rt.component_of(fv, map[&n]) {
                Ok(c) => comp.insert(n, c.direction),
                Err(_) => return false,
            };
        }
        if !dec.is_embedding(&t.decorations[&fv], &comp) {
            return false;
        }
    }
    true
}

struct Search<'a> {
    s: &'a DecoratedTree,
    t: &'a DecoratedTree,
    rooted: bool,
    order: Vec<Vertex>,
    s_size: BTreeMap<Vertex, usize>,
    t_size: BTreeMap<Vertex, usize>,
    t_desc: BTreeMap<Vertex, Vec<Vertex>>,
}

#[derive(Clone, Default)]
struct State {
    map: BTreeMap<Vertex, Vertex>,
    used: BTreeSet<Vertex>,
    // per assigned source vertex: component map and its inverse
    comps: BTreeMap<Vertex, (ElemMap, ElemMap)>,
}

fn subtree_sizes(rt: &RootedTree) -> BTreeMap<Vertex, usize> {
    let mut sizes = BTreeMap::new();
    for v in rt.vertices_by_level().into_iter().rev() {
        let s = 1 + rt.children(v).unwrap().iter().map(|c| sizes[c]).sum::<usize>();
        sizes.insert(v, s);
    }
    sizes
}

fn strict_descendants(rt: &RootedTree) -> BTreeMap<Vertex, Vec<Vertex>> {
    rt.tree()
        .vertices()
        .map(|v| {
            let mut d: Vec<_> = rt.subtree_at(v).unwrap().into_iter().filter(|&x| x != v && x != rt.root()).collect();
            d.sort_unstable();
            (v, d)
        })
        .collect()
}

impl<'a> Search<'a> {
    fn new(s: &'a DecoratedTree, t: &'a DecoratedTree, rooted: bool) -> Self {
        let order = s.rt.vertices_by_level().into_iter().filter(|&v| v != s.root()).collect();
        Search {
            s,
            t,
            rooted,
            order,
            s_size: subtree_sizes(&s.rt),
            t_size: subtree_sizes(&t.rt),
            t_desc: strict_descendants(&t.rt),
        }
    }

    fn initial(&self) -> State {
        let mut st = State::default();
        st.map.insert(self.s.root(), self.t.root());
        st.used.insert(self.t.root());
        st
    }

    fn candidates(&self, st: &State, v: Vertex) -> Vec<Vertex> {
        let p = self.s.rt.parent(v).expect("non-root");
        if self.rooted && Some(v) == self.s.r() {
            return self.t.r().into_iter().collect();
        }
        let fp = st.map[&p];
        let need_children = self.s.rt.children(v).unwrap().len();
        self.t_desc[&fp]
            .iter()
            .copied()
            .filter(|t| !st.used.contains(t))
            .filter(|&t| self.t.rt.children(t).unwrap().len() >= need_children && self.t_size[&t] >= self.s_size[&v])
            .collect()
    }

    /// Direction at `anc` (a strict ancestor of `x`) toward `x`.
    fn child_toward(&self, anc: Vertex, x: Vertex) -> Vertex {
        let mut cur = x;
        loop {
            let p = self.t.rt.parent(cur).expect("anc is an ancestor");
            if p == anc {
                return cur;
            }
            cur = p;
        }
    }

    fn try_assign(&self, st: &mut State, v: Vertex, x: Vertex) -> bool {
        for (&u, &fu) in &st.map {
            if u == self.s.root() {
                continue;
            }
            let m = self.s.rt.meet(u, v).unwrap();
            if self.t.rt.meet(fu, x).unwrap() != st.map[&m] {
                return false;
            }
        }
        let p = self.s.rt.parent(v).unwrap();
        let tp = self.t.rt.parent(x).unwrap();
        let mut own = (ElemMap::new(), ElemMap::new());
        own.0.insert(p, tp);
        own.1.insert(tp, p);
        if !extension_consistent(&self.s.decorations[&v], &self.t.decorations[&x], &own.0, &own.1, p, tp) {
            return false;
        }
        if p != self.s.root() {
            let fp = st.map[&p];
            let dir = self.child_toward(fp, x);
            let (fwd, inv) = st.comps.get_mut(&p).unwrap();
            if inv.contains_key(&dir) {
                return false;
            }
            fwd.insert(v, dir);
            inv.insert(dir, v);
            let ok = extension_consistent(&self.s.decorations[&p], &self.t.decorations[&fp], fwd, inv, v, dir);
            if !ok {
                fwd.remove(&v);
                inv.remove(&dir);
                return false;
            }
        }
        st.map.insert(v, x);
        st.used.insert(x);
        st.comps.insert(v, own);
        true
    }

    fn unassign(&self, st: &mut State, v: Vertex) {
        let x = st.map.remove(&v).unwrap();
        st.used.remove(&x);
        st.comps.remove(&v);
        let p = self.s.rt.parent(v).unwrap();
        if let Some((fwd, inv)) = st.comps.get_mut(&p) {
            if let Some(dir) = fwd.remove(&v) {
                inv.remove(&dir);
            }
        }
    }

    fn run(&self, st: &mut State, depth: usize, out: &mut Vec<BTreeMap<Vertex, Vertex>>) {
        let Some(&v) = self.order.get(depth) else {
            out.push(st.map.clone());
            return;
        };
        for x in self.candidates(st, v) {
            if self.try_assign(st, v, x) {
                self.run(st, depth + 1, out);
                self.unassign(st, v);
            }
        }
    }
}

/// All embeddings `s → t` (rooted ones only, if asked), sorted by their image
/// vectors listed by increasing source vertex.
pub fn dec_embeddings(s: &DecoratedTree, t: &DecoratedTree, rooted: bool) -> Result<Vec<DecEmbedding>> {
    if s.signature != t.signature {
        return Err(Error::SignatureMismatch);
    }
    let search = Search::new(s, t, rooted);
    let mut maps = match search.order.first() {
        None => vec![search.initial().map],
        Some(&first) => {
            let st = search.initial();
            let firsts = search.candidates(&st, first);
            let chunks: Vec<Vec<BTreeMap<Vertex, Vertex>>> = firsts
                .par_iter()
                .map(|&x| {
                    let mut st = search.initial();
                    let mut out = Vec::new();
                    if search.try_assign(&mut st, first, x) {
                        search.run(&mut st, 1, &mut out);
                    }
                    out
                })
                .collect();
            chunks.into_iter().flatten().collect()
        }
    };
    maps.sort_by_cached_key(|m| m.values().copied().collect::<Vec<_>>());
    Ok(maps.into_iter().map(|map| DecEmbedding { map, rooted }).collect())
}

/// Number of embeddings `s → t`.
pub fn count_embeddings(s: &DecoratedTree, t: &DecoratedTree, rooted: bool) -> Result<usize> {
    Ok(dec_embeddings(s, t, rooted)?.len())
}

/// The automorphism group of `t`. Every automorphism fixes `ξ` and `r`.
pub fn dec_automorphisms(t: &DecoratedTree) -> Vec<DecEmbedding> {
    dec_embeddings(t, t, false)
        .expect("same signature")
        .into_iter()
        .filter(|e| e.image().len() == t.len())
        .collect()
}

/// Substructure generated by `gens` (closure of `gens ∪ {ξ}` under the meet).
pub fn dec_generated(t: &DecoratedTree, gens: &BTreeSet<Vertex>) -> Result<DecoratedTree> {
    if gens.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    if gens.contains(&t.root()) {
        return Err(Error::MalformedTree("generators must not contain the root".into()));
    }
    let closure = t.rt.meet_closure(gens)?;
    t.induced(&closure)
}

/// The regular tower `A[h]` together with the labelling `λ_s` of the
/// components of every internal vertex by elements of the alphabet.
#[derive(Debug, Clone)]
pub struct Tower {
    pub alphabet: RelStructure,
    pub h: usize,
    pub tree: DecoratedTree,
    /// For each internal vertex `s ≠ ξ`: alphabet element ↦ child vertex.
    pub child_by_label: BTreeMap<Vertex, BTreeMap<Elem, Vertex>>,
}

impl Tower {
    /// Builds `A[h]`: root `ξ = 0`, `r = 1`, every internal vertex has
    /// `|A| - 1` children labelled by the non-constant elements in increasing
    /// order, and all leaves sit at height `h + 1`. Ids are assigned level by
    /// level.
    pub fn build(alphabet: &RelStructure, h: usize) -> Result<Tower> {
        if alphabet.len() < 2 {
            return Err(Error::AlphabetTooSmall(alphabet.len()));
        }
        Tower::build_unchecked(alphabet, h)
    }

    fn build_unchecked(alphabet: &RelStructure, h: usize) -> Result<Tower> {
        let c = alphabet
            .constant()
            .ok_or_else(|| Error::MalformedStructure("alphabet needs a constant".into()))?;
        let labels: Vec<Elem> = alphabet.universe().iter().copied().filter(|&e| e != c).collect();
        if h > 0 && labels.is_empty() {
            return Err(Error::AlphabetTooSmall(alphabet.len()));
        }
        let (root, r) = (0, 1);
        let mut parents = vec![(r, root)];
        let mut child_by_label = BTreeMap::new();
        let mut frontier = vec![r];
        let mut next = 2;
        for _ in 0..h {
            let mut new_frontier = Vec::new();
            for &s in &frontier {
                let mut by_label = BTreeMap::new();
                for &a in &labels {
                    parents.push((next, s));
                    by_label.insert(a, next);
                    new_frontier.push(next);
                    next += 1;
                }
                child_by_label.insert(s, by_label);
            }
            frontier = new_frontier;
        }
        let rt = RootedTree::from_parents(root, &parents)?;
        let mut decorations = BTreeMap::new();
        let point = alphabet.restrict(&BTreeSet::from([c]))?;
        for v in rt.tree().vertices().filter(|&v| v != root) {
            let parent = rt.parent(v).unwrap();
            let dec = match child_by_label.get(&v) {
                Some(by_label) => {
                    let mut lambda_inv: ElemMap = by_label.clone();
                    lambda_inv.insert(c, parent);
                    alphabet.relabel(&lambda_inv)?
                }
                None => point.relabel(&ElemMap::from([(c, parent)]))?,
            };
            decorations.insert(v, dec);
        }
        let tree = DecoratedTree::new(rt, alphabet.signature().clone(), decorations)?;
        Ok(Tower { alphabet: alphabet.clone(), h, tree, child_by_label })
    }
}

/// `A[h]` for an alphabet with constant and at least two elements.
pub fn build_ah(alphabet: &RelStructure, h: usize) -> Result<DecoratedTree> {
    Ok(Tower::build(alphabet, h)?.tree)
}

/// Result of embedding a decorated tree into a regular tower.
#[derive(Debug, Clone)]
pub struct TowerEmbedding {
    /// Substructure of the ambient alphabet spanned by the component labels.
    pub alphabet: RelStructure,
    pub h: usize,
    pub target: DecoratedTree,
    pub embedding: DecEmbedding,
    /// Set when the input has at most two vertices, so the alphabet may be a
    /// single point and the tower is just `{ξ, r}`.
    pub degenerate: bool,
}

/// Embeds `s` into `A[h]` where `A` is the part of `ambient` spanned by the
/// labels of `s`'s components and `h = height(s) - 1`.
///
/// Each decoration is labelled by its first embedding into `ambient`; then
/// `f(ξ) = ξ`, `f(r_S) = r_{A[h]}`, and the children of an already mapped
/// vertex follow their labels. The result is rooted.
pub fn embed_into_ah(s: &DecoratedTree, ambient: &RelStructure) -> Result<TowerEmbedding> {
    if ambient.signature() != s.signature() {
        return Err(Error::SignatureMismatch);
    }
    let c = ambient
        .constant()
        .ok_or_else(|| Error::MalformedStructure("ambient alphabet needs a constant".into()))?;
    let Some(r_s) = s.r() else {
        let alphabet = ambient.restrict(&BTreeSet::from([c]))?;
        let rt = RootedTree::new(Tree::singleton(0), 0)?;
        let target = DecoratedTree::new(rt, s.signature().clone(), BTreeMap::new())?;
        let embedding = DecEmbedding { map: BTreeMap::from([(s.root(), 0)]), rooted: false };
        return Ok(TowerEmbedding { alphabet, h: 0, target, embedding, degenerate: true });
    };
    let mut labelling = BTreeMap::new();
    let mut used = BTreeSet::from([c]);
    for (&v, dec) in s.decorations() {
        let kappa = dec.embeddings(ambient)?.into_iter().next().ok_or_else(|| {
            Error::NotEmbedding(format!("decoration at {v} does not embed into the ambient alphabet"))
        })?;
        used.extend(kappa.values().copied());
        labelling.insert(v, kappa);
    }
    let alphabet = ambient.restrict(&used)?;
    let h = s.rt.tree_height() - 1;
    let tower = Tower::build_unchecked(&alphabet, h)?;
    let mut map = BTreeMap::from([(s.root(), tower.tree.root()), (r_s, tower.tree.r().unwrap())]);
    for v in s.rt.vertices_by_level() {
        if v == s.root() {
            continue;
        }
        for &w in s.rt.children(v)? {
            let label = labelling[&v][&w];
            let fw = tower.child_by_label[&map[&v]][&label];
            map.insert(w, fw);
        }
    }
    if !is_dec_embedding(s, &tower.tree, &map, true) {
        return Err(Error::NotEmbedding("level-recursive construction did not give an embedding".into()));
    }
    let degenerate = alphabet.len() < 2;
    Ok(TowerEmbedding {
        alphabet,
        h,
        target: tower.tree,
        embedding: DecEmbedding { map, rooted: true },
        degenerate,
    })
}
