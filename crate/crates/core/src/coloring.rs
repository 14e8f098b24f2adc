//! Colorings of components by a finite palette, the local-action cocycle and
//! one-step kaleidoscopic extensions.
//!
//! Colorings are partial: a component may be left uncolored, but the colors
//! around a single vertex are always pairwise distinct. Colors are palette
//! indices.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::tree::{Component, RootedTree, Tree, Vertex};

pub type Color = usize;

/// A tree, optionally rooted, with a coloring `κ` of (some of) its components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredTree {
    tree: Tree,
    root: Option<Vertex>,
    palette: Vec<String>,
    constant: Option<Color>,
    kappa: BTreeMap<Component, Color>,
}

impl ColoredTree {
    /// Checks that every component exists, every color is in the palette and
    /// colors are injective around each vertex.
    pub fn new(
        tree: Tree,
        root: Option<Vertex>,
        palette: Vec<String>,
        constant: Option<Color>,
        kappa: BTreeMap<Component, Color>,
    ) -> Result<Self> {
        let ct = ColoredTree::new_unchecked(tree, root, palette, constant, kappa)?;
        if let Some(v) = ct.injectivity_violation() {
            return Err(Error::InvalidColoring(format!("two components around {v} share a color")));
        }
        Ok(ct)
    }

    /// Like [`ColoredTree::new`] but allows colors to repeat around a vertex.
    /// Used to load and diagnose corrupted data.
    pub fn new_unchecked(
        tree: Tree,
        root: Option<Vertex>,
        palette: Vec<String>,
        constant: Option<Color>,
        kappa: BTreeMap<Component, Color>,
    ) -> Result<Self> {
        let distinct: BTreeSet<_> = palette.iter().collect();
        if distinct.len() != palette.len() || palette.is_empty() {
            return Err(Error::InvalidColoring("palette must be non-empty without repeats".into()));
        }
        if let Some(c) = constant {
            if c >= palette.len() {
                return Err(Error::InvalidColoring(format!("constant {c} outside palette")));
            }
        }
        if let Some(r) = root {
            RootedTree::new(tree.clone(), r)?;
        }
        for (comp, &m) in &kappa {
            if !tree.is_adjacent(comp.anchor, comp.direction) {
                return Err(Error::InvalidColoring(format!(
                    "component ({}, {}) does not exist",
                    comp.anchor, comp.direction
                )));
            }
            if m >= palette.len() {
                return Err(Error::InvalidColoring(format!("color {m} outside palette")));
            }
        }
        Ok(ColoredTree { tree, root, palette, constant, kappa })
    }

    /// Palette `{0, .., n-1}` named by decimal strings.
    pub fn numeric_palette(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn root(&self) -> Option<Vertex> {
        self.root
    }

    pub fn palette(&self) -> &[String] {
        &self.palette
    }

    pub fn constant(&self) -> Option<Color> {
        self.constant
    }

    pub fn kappa(&self) -> &BTreeMap<Component, Color> {
        &self.kappa
    }

    pub fn color(&self, c: Component) -> Option<Color> {
        self.kappa.get(&c).copied()
    }

    /// `κ(Φ(x, y))` for any `y ≠ x`.
    pub fn color_toward(&self, x: Vertex, y: Vertex) -> Result<Option<Color>> {
        Ok(self.color(self.tree.component_of(x, y)?))
    }

    /// First vertex around which two components share a color.
    pub fn injectivity_violation(&self) -> Option<Vertex> {
        let mut seen: BTreeMap<Vertex, BTreeSet<Color>> = BTreeMap::new();
        for (comp, &m) in &self.kappa {
            if !seen.entry(comp.anchor).or_default().insert(m) {
                return Some(comp.anchor);
            }
        }
        None
    }

    /// Whether every component is colored.
    pub fn is_total(&self) -> bool {
        self.tree.vertices().all(|v| self.tree.neighbors(v).unwrap().iter().all(|&n| self.kappa.contains_key(&Component::new(v, n))))
    }

    /// Whether `κ(ρ(v)) = c` for every `v ≠ ξ`.
    pub fn is_root_colored(&self) -> bool {
        let (Some(root), Some(c)) = (self.root, self.constant) else {
            return false;
        };
        let rt = RootedTree::new(self.tree.clone(), root).expect("validated on construction");
        self.tree
            .vertices()
            .filter(|&v| v != root)
            .all(|v| self.color(rt.rho(v).unwrap()) == Some(c))
    }

    /// `(κ, x)` restricted to the old vertices of `other`, i.e. whether every
    /// color of `self` on a vertex of `other` agrees with `other`.
    pub fn agrees_on(&self, other: &ColoredTree) -> bool {
        other.tree.vertices().all(|v| {
            other.tree.neighbors(v).unwrap().iter().all(|&n| {
                let theirs = other.color(Component::new(v, n));
                let Ok(mine) = self.tree.component_of(v, n) else {
                    return false;
                };
                theirs == self.color(mine)
            })
        })
    }

    /// Inserts a fresh `z` strictly between `x` and `y`, on the edge of the
    /// geodesic incident to `x`, and colors `Φ(z, x)` by `a` and `Φ(z, y)` by
    /// `b`. Components of the old vertices keep their colors.
    pub fn kaleidoscopic_extend(&self, x: Vertex, y: Vertex, a: Color, b: Color) -> Result<(ColoredTree, Vertex)> {
        if x == y {
            return Err(Error::SameVertex(x));
        }
        if a == b {
            return Err(Error::InvalidColoring("extension colors must differ".into()));
        }
        if a >= self.palette.len() || b >= self.palette.len() {
            return Err(Error::InvalidColoring("extension color outside palette".into()));
        }
        let p = self.tree.path_between(x, y)?[1];
        let (tree, z) = self.tree.insert_between(x, p)?;
        let mut kappa: BTreeMap<Component, Color> = self
            .kappa
            .iter()
            .map(|(&c, &m)| {
                let moved = match (c.anchor, c.direction) {
                    (u, w) if u == x && w == p => Component::new(x, z),
                    (u, w) if u == p && w == x => Component::new(p, z),
                    _ => c,
                };
                (moved, m)
            })
            .collect();
        kappa.insert(Component::new(z, x), a);
        kappa.insert(Component::new(z, p), b);
        let ct = ColoredTree { tree, root: self.root, palette: self.palette.clone(), constant: self.constant, kappa };
        Ok((ct, z))
    }

    /// Rooted one-step extension: for `y ≺ x` inserts `z ∈ (y, x)` with
    /// `κ(Φ(z, x)) = a` and `κ(ρ(z)) = c`.
    pub fn root_kaleidoscopic_extend(&self, x: Vertex, y: Vertex, a: Color) -> Result<(ColoredTree, Vertex)> {
        let (Some(root), Some(c)) = (self.root, self.constant) else {
            return Err(Error::InvalidColoring("rooted extension needs a root and a constant".into()));
        };
        let rt = RootedTree::new(self.tree.clone(), root)?;
        if x == y || !rt.precedes(y, x)? {
            return Err(Error::InvalidColoring(format!("{y} must be a strict predecessor of {x}")));
        }
        self.kaleidoscopic_extend(x, y, a, c)
    }
}

/// Derives the rooted coloring `κ*`: for `v ≠ ξ` and a component `a` around
/// `v`, `κ*(a) = σ(κ(ρ(v)))(κ(a))`. Components around `ξ` are dropped.
///
/// `sigma[m]` is a permutation of the palette; it must fix everything for
/// `m = c` and send `m` to `c` otherwise.
pub fn derive_root_coloring(ct: &ColoredTree, sigma: &[Vec<Color>]) -> Result<ColoredTree> {
    let root = ct.root.ok_or_else(|| Error::InvalidColoring("derivation needs a rooted tree".into()))?;
    let c = ct.constant.ok_or_else(|| Error::InvalidColoring("derivation needs a constant".into()))?;
    validate_sigma(sigma, ct.palette.len(), c)?;
    let rt = RootedTree::new(ct.tree.clone(), root)?;
    let mut kappa = BTreeMap::new();
    for v in ct.tree.vertices().filter(|&v| v != root) {
        let rho = rt.rho(v)?;
        let up = ct
            .color(rho)
            .ok_or_else(|| Error::InvalidColoring(format!("component toward the root at {v} is uncolored")))?;
        for &n in ct.tree.neighbors(v)? {
            let comp = Component::new(v, n);
            if let Some(m) = ct.color(comp) {
                kappa.insert(comp, sigma[up][m]);
            }
        }
    }
    ColoredTree::new(ct.tree.clone(), Some(root), ct.palette.clone(), Some(c), kappa)
}

fn validate_sigma(sigma: &[Vec<Color>], n: usize, c: Color) -> Result<()> {
    if sigma.len() != n {
        return Err(Error::InvalidSigma(format!("expected {n} permutations, got {}", sigma.len())));
    }
    for (m, perm) in sigma.iter().enumerate() {
        let image: BTreeSet<_> = perm.iter().copied().collect();
        if perm.len() != n || image.len() != n || image.iter().any(|&x| x >= n) {
            return Err(Error::InvalidSigma(format!("sigma({m}) is not a permutation")));
        }
        if m == c && perm.iter().enumerate().any(|(i, &x)| i != x) {
            return Err(Error::InvalidSigma("sigma(c) must be the identity".into()));
        }
        if perm[m] != c {
            return Err(Error::InvalidSigma(format!("sigma({m}) does not send {m} to c")));
        }
    }
    Ok(())
}

/// The transposition choice of `σ`: `σ(m) = (m c)`.
pub fn transposition_sigma(n: usize, c: Color) -> Vec<Vec<Color>> {
    (0..n)
        .map(|m| {
            (0..n)
                .map(|i| match i {
                    i if i == m => c,
                    i if i == c => m,
                    i => i,
                })
                .collect()
        })
        .collect()
}

/// Partial palette map realized by an automorphism at a vertex.
pub type LocalAction = BTreeMap<Color, Color>;

fn check_automorphism(ct: &ColoredTree, g: &BTreeMap<Vertex, Vertex>) -> Result<()> {
    if !ct.tree.is_automorphism(g) {
        return Err(Error::NotAutomorphism(format!("{g:?}")));
    }
    Ok(())
}

/// `α(g, x) = κ_{g·x} ∘ g ∘ κ_x⁻¹`, defined on the colors around `x` whose
/// image component is colored.
pub fn local_action(g: &BTreeMap<Vertex, Vertex>, x: Vertex, ct: &ColoredTree) -> Result<LocalAction> {
    check_automorphism(ct, g)?;
    raw_local_action(g, x, ct).map_err(|m| Error::InvalidColoring(format!("color {m} occurs twice around {x}")))
}

fn raw_local_action(g: &BTreeMap<Vertex, Vertex>, x: Vertex, ct: &ColoredTree) -> std::result::Result<LocalAction, Color> {
    let mut out = LocalAction::new();
    for &n in ct.tree.neighbors(x).expect("vertex of the tree") {
        let Some(m) = ct.color(Component::new(x, n)) else {
            continue;
        };
        let Some(image) = ct.color(Component::new(g[&x], g[&n])) else {
            continue;
        };
        if out.insert(m, image).is_some_and(|old| old != image) {
            return Err(m);
        }
    }
    Ok(out)
}

fn compose(outer: &LocalAction, inner: &LocalAction) -> LocalAction {
    inner.iter().filter_map(|(&k, v)| outer.get(v).map(|&w| (k, w))).collect()
}

/// Checks `α(g g′, x) = α(g, g′·x) α(g′, x)` at every vertex. Returns the first
/// violating vertex, if any. Colors repeated around a vertex make the local
/// action ill-defined there and count as a violation.
pub fn check_cocycle_identity(
    g: &BTreeMap<Vertex, Vertex>,
    g2: &BTreeMap<Vertex, Vertex>,
    ct: &ColoredTree,
) -> Result<Option<Vertex>> {
    check_automorphism(ct, g)?;
    check_automorphism(ct, g2)?;
    let gg: BTreeMap<_, _> = g2.iter().map(|(&v, w)| (v, g[w])).collect();
    for x in ct.tree.vertices() {
        let lhs = raw_local_action(&gg, x, ct);
        let a2 = raw_local_action(g2, x, ct);
        let a1 = raw_local_action(g, g2[&x], ct);
        match (lhs, a1, a2) {
            (Ok(lhs), Ok(a1), Ok(a2)) => {
                let rhs = compose(&a1, &a2);
                // both sides are partial; compare where both are defined
                let clash = lhs.iter().any(|(k, v)| rhs.get(k).is_some_and(|w| w != v));
                if clash {
                    return Ok(Some(x));
                }
            }
            _ => return Ok(Some(x)),
        }
    }
    Ok(None)
}

/// A color-preserving isomorphism between two colored trees, respecting the
/// roots when both are rooted. Returns the lexicographically least one.
pub fn colored_isomorphism(a: &ColoredTree, b: &ColoredTree) -> Option<BTreeMap<Vertex, Vertex>> {
    if a.tree.len() != b.tree.len() || a.kappa.len() != b.kappa.len() || a.root.is_some() != b.root.is_some() {
        return None;
    }
    let start = a.root.unwrap_or_else(|| a.tree.vertices().next().unwrap());
    let mut order = vec![start];
    let mut queue = VecDeque::from([start]);
    let mut seen = BTreeSet::from([start]);
    while let Some(v) = queue.pop_front() {
        for &n in a.tree.neighbors(v).unwrap() {
            if seen.insert(n) {
                order.push(n);
                queue.push_back(n);
            }
        }
    }
    let starts: Vec<Vertex> = match b.root {
        Some(r) => vec![r],
        None => b.tree.vertices().collect(),
    };
    let mut map = BTreeMap::new();
    let mut used = BTreeSet::new();
    for s in starts {
        map.insert(start, s);
        used.insert(s);
        if extend_iso(a, b, &order, 1, &mut map, &mut used) {
            return Some(map);
        }
        map.clear();
        used.clear();
    }
    None
}

fn extend_iso(
    a: &ColoredTree,
    b: &ColoredTree,
    order: &[Vertex],
    i: usize,
    map: &mut BTreeMap<Vertex, Vertex>,
    used: &mut BTreeSet<Vertex>,
) -> bool {
    let Some(&v) = order.get(i) else {
        return true;
    };
    // the BFS parent of v is already mapped
    let p = *a.tree.neighbors(v).unwrap().iter().find(|n| map.contains_key(n)).unwrap();
    let fp = map[&p];
    for &t in b.tree.neighbors(fp).unwrap() {
        if used.contains(&t) || a.tree.degree(v).unwrap() != b.tree.degree(t).unwrap() {
            continue;
        }
        if a.color(Component::new(p, v)) != b.color(Component::new(fp, t))
            || a.color(Component::new(v, p)) != b.color(Component::new(t, fp))
        {
            continue;
        }
        map.insert(v, t);
        used.insert(t);
        if extend_iso(a, b, order, i + 1, map, used) {
            return true;
        }
        map.remove(&v);
        used.remove(&t);
    }
    false
}

/// One step `(x, y, a, b)` of a kaleidoscopic extension sequence.
pub type ExtensionStep = (Vertex, Vertex, Color, Color);

/// Applies extension steps in order; later steps may use vertices created by
/// earlier ones, referenced by their ids.
pub fn extend_sequence(ct: &ColoredTree, steps: &[ExtensionStep]) -> Result<(ColoredTree, Vec<Vertex>)> {
    let mut cur = ct.clone();
    let mut created = Vec::new();
    for &(x, y, a, b) in steps {
        let (next, z) = cur.kaleidoscopic_extend(x, y, a, b)?;
        cur = next;
        created.push(z);
    }
    Ok((cur, created))
}

/// Bounded back-and-forth: runs the two extension sequences in lockstep for
/// up to `depth` steps and reports the first length after which the results
/// are color-isomorphic.
pub fn back_and_forth(
    a: &ColoredTree,
    b: &ColoredTree,
    steps_a: &[ExtensionStep],
    steps_b: &[ExtensionStep],
    depth: usize,
) -> Result<Option<usize>> {
    let (mut ca, mut cb) = (a.clone(), b.clone());
    for i in 0..=depth.min(steps_a.len()).min(steps_b.len()) {
        if colored_isomorphism(&ca, &cb).is_some() {
            return Ok(Some(i));
        }
        if i < steps_a.len() && i < steps_b.len() && i < depth {
            let (x, y, p, q) = steps_a[i];
            ca = ca.kaleidoscopic_extend(x, y, p, q)?.0;
            let (x, y, p, q) = steps_b[i];
            cb = cb.kaleidoscopic_extend(x, y, p, q)?.0;
        }
    }
    Ok(None)
}

/// Every total injective coloring of the components of `tree` by `m` colors,
/// in lexicographic order of the component list.
pub fn all_total_colorings(tree: &Tree, m: usize) -> Vec<BTreeMap<Component, Color>> {
    let comps: Vec<Component> = tree.vertices().flat_map(|v| tree.components(v).unwrap()).collect();
    let mut out = Vec::new();
    let mut cur = BTreeMap::new();
    fn go(
        comps: &[Component],
        i: usize,
        m: usize,
        cur: &mut BTreeMap<Component, Color>,
        out: &mut Vec<BTreeMap<Component, Color>>,
    ) {
        let Some(&c) = comps.get(i) else {
            out.push(cur.clone());
            return;
        };
        for color in 0..m {
            let clash = cur.iter().any(|(k, &v)| k.anchor == c.anchor && v == color);
            if !clash {
                cur.insert(c, color);
                go(comps, i + 1, m, cur, out);
                cur.remove(&c);
            }
        }
    }
    go(&comps, 0, m, &mut cur, &mut out);
    out
}
