//! Acceptance battery: one line per criterion, non-zero exit if any fails.
//!
//! Every check compares the library against an oracle written here from the
//! definitions (distances, brute-force maps, literal enumeration of colorings).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kaleido::cclo::{
    collapse_pair, enumerate_cclo, five_point_one_witness, five_point_two_witness, pi_order, realize_cclo,
    TreeLinearOrder,
};
use kaleido::coloring::{all_total_colorings, check_cocycle_identity, ColoredTree};
use kaleido::decorated::{build_ah, dec_automorphisms, dec_generated, DecEmbedding, DecoratedTree};
use kaleido::gen::{labeled_trees, nonisomorphic_trees, trees_up_to};
use kaleido::io::{read_doc, schema_of, ArrowCase, Document};
use kaleido::ramsey::{
    decide_arrow, deuber_explore, find_mono_copy, proof_follow_mono, search_chain, verify_chain, witness_search,
    AlphabetFamily, ArrowInstance, ColoringAssignment, WitnessBounds,
};
use kaleido::relstruct::RelStructure;
use kaleido::suite::corpus_files;
use kaleido::tree::{Component, RootedTree, Tree, Vertex};

type Map = BTreeMap<Vertex, Vertex>;
type Verdict = Result<String, String>;

fn corpus_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus"))
}

// ---------- oracles on plain trees ----------

fn distances(t: &Tree, from: Vertex) -> BTreeMap<Vertex, usize> {
    let mut d = BTreeMap::from([(from, 0)]);
    let mut q = VecDeque::from([from]);
    while let Some(v) = q.pop_front() {
        for &n in t.neighbors(v).unwrap() {
            if !d.contains_key(&n) {
                d.insert(n, d[&v] + 1);
                q.push_back(n);
            }
        }
    }
    d
}

struct Metric {
    d: BTreeMap<Vertex, BTreeMap<Vertex, usize>>,
}

impl Metric {
    fn new(t: &Tree) -> Self {
        Metric { d: t.vertices().map(|v| (v, distances(t, v))).collect() }
    }

    fn dist(&self, a: Vertex, b: Vertex) -> usize {
        self.d[&a][&b]
    }

    /// `y` on the geodesic `[x, z]`.
    fn on(&self, x: Vertex, y: Vertex, z: Vertex) -> bool {
        self.dist(x, y) + self.dist(y, z) == self.dist(x, z)
    }

    fn median(&self, x: Vertex, y: Vertex, z: Vertex) -> Vertex {
        *self.d.keys().min_by_key(|&&m| self.dist(x, m) + self.dist(y, m) + self.dist(z, m)).unwrap()
    }

    fn path(&self, x: Vertex, z: Vertex) -> Vec<Vertex> {
        let mut p: Vec<Vertex> = self.d.keys().copied().filter(|&y| self.on(x, y, z)).collect();
        p.sort_by_key(|&y| self.dist(x, y));
        p
    }

    /// The neighbor of `x` on the way to `y`.
    fn toward(&self, x: Vertex, y: Vertex) -> Vertex {
        self.path(x, y)[1]
    }
}

// ---------- oracles on decorated trees ----------

struct Shape<'a> {
    dt: &'a DecoratedTree,
    metric: Metric,
    root: Vertex,
}

impl<'a> Shape<'a> {
    fn new(dt: &'a DecoratedTree) -> Self {
        Shape { dt, metric: Metric::new(dt.tree()), root: dt.root() }
    }

    fn meet(&self, a: Vertex, b: Vertex) -> Vertex {
        self.metric.median(a, b, self.root)
    }

    fn below(&self, a: Vertex, b: Vertex) -> bool {
        self.metric.on(self.root, a, b)
    }

    /// Vertices ordered so that parents precede children.
    fn top_down(&self) -> Vec<Vertex> {
        let mut vs: Vec<Vertex> = self.dt.tree().vertices().collect();
        vs.sort_by_key(|&v| (self.metric.dist(self.root, v), v));
        vs
    }
}

/// Embedding check straight from the definition.
fn is_embedding_oracle(s: &Shape, t: &Shape, f: &Map, rooted: bool) -> bool {
    if f[&s.root] != t.root {
        return false;
    }
    if rooted && s.dt.r().map(|r| f[&r]) != t.dt.r() {
        return false;
    }
    let vs: Vec<Vertex> = f.keys().copied().collect();
    for &a in &vs {
        for &b in &vs {
            if f[&s.meet(a, b)] != t.meet(f[&a], f[&b]) {
                return false;
            }
        }
    }
    for &v in &vs {
        if v == s.root {
            continue;
        }
        let ds = s.dt.decoration(v).unwrap();
        let dt = t.dt.decoration(f[&v]).unwrap();
        let comp: Map = s.dt.tree().neighbors(v).unwrap().iter().map(|&n| (n, t.metric.toward(f[&v], f[&n]))).collect();
        if comp.values().collect::<BTreeSet<_>>().len() != comp.len() {
            return false;
        }
        if ds.constant().map(|c| comp[&c]) != dt.constant() {
            return false;
        }
        for (name, tuples) in ds.relations() {
            let arity = ds.signature().arity(name).unwrap();
            let elems: Vec<Vertex> = ds.universe().iter().copied().collect();
            for tuple in all_tuples(&elems, arity) {
                let image: Vec<Vertex> = tuple.iter().map(|e| comp[e]).collect();
                if tuples.contains(&tuple) != dt.holds(name, &image) {
                    return false;
                }
            }
        }
    }
    true
}

fn all_tuples(elems: &[Vertex], arity: usize) -> Vec<Vec<Vertex>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out.into_iter().flat_map(|t| elems.iter().map(move |&e| [t.clone(), vec![e]].concat())).collect();
    }
    out
}

/// Every embedding by brute force over injective maps, parents first and
/// each child sent strictly above the image of its parent.
fn embeddings_oracle(s: &DecoratedTree, t: &DecoratedTree, rooted: bool) -> Vec<Map> {
    let (ss, ts) = (Shape::new(s), Shape::new(t));
    let order = ss.top_down();
    let tv: Vec<Vertex> = t.tree().vertices().collect();
    let mut out = Vec::new();
    fn go(
        i: usize,
        order: &[Vertex],
        tv: &[Vertex],
        ss: &Shape,
        ts: &Shape,
        rooted: bool,
        f: &mut Map,
        out: &mut Vec<Map>,
    ) {
        let Some(&v) = order.get(i) else {
            if is_embedding_oracle(ss, ts, f, rooted) {
                out.push(f.clone());
            }
            return;
        };
        let parent = (v != ss.root).then(|| ss.dt.rooted_tree().parent(v).unwrap());
        for &x in tv {
            if f.values().any(|&y| y == x) {
                continue;
            }
            match parent {
                None if x != ts.root => continue,
                Some(p) if !(ts.below(f[&p], x) && f[&p] != x) => continue,
                _ => {}
            }
            f.insert(v, x);
            go(i + 1, order, tv, ss, ts, rooted, f, out);
            f.remove(&v);
        }
    }
    go(0, &order, &tv, &ss, &ts, rooted, &mut Map::new(), &mut out);
    out.sort_by_key(|m| m.values().copied().collect::<Vec<_>>());
    out
}

/// Hypergraph of an arrow instance from the oracle embeddings: one edge per
/// `B`-copy listing the positions of its `A`-subcopies.
fn edges_oracle(c: &DecoratedTree, b: &DecoratedTree, a: &DecoratedTree, rooted: bool) -> (Vec<Map>, Vec<Vec<usize>>) {
    let ac = embeddings_oracle(a, c, rooted);
    let bc = embeddings_oracle(b, c, rooted);
    let ab = embeddings_oracle(a, b, rooted);
    let index: BTreeMap<&Map, usize> = ac.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let edges = bc
        .iter()
        .map(|g| {
            let mut e: Vec<usize> = ab
                .iter()
                .map(|f| index[&f.iter().map(|(&k, v)| (k, g[v])).collect::<Map>()])
                .collect();
            e.sort_unstable();
            e.dedup();
            e
        })
        .collect();
    (ac, edges)
}

fn monochromatic(edge: &[usize], colors: &[usize]) -> bool {
    edge.iter().all(|&v| colors[v] == colors[edge[0]])
}

/// The lexicographically least coloring with no monochromatic edge.
fn least_bad_coloring(n: usize, k: usize, edges: &[Vec<usize>]) -> Option<Vec<usize>> {
    let total = k.checked_pow(n as u32).expect("small instance");
    (0..total)
        .map(|mut code| {
            let mut colors = vec![0; n];
            for slot in colors.iter_mut().rev() {
                *slot = code % k;
                code /= k;
            }
            colors
        })
        .find(|colors| edges.iter().all(|e| !monochromatic(e, colors)))
}

/// Whether the `B`-copy `g` is monochromatic, computed from oracle copies.
fn copy_is_mono(
    g: &DecEmbedding,
    b: &DecoratedTree,
    a: &DecoratedTree,
    a_copies: &[Map],
    colors: &[usize],
    rooted: bool,
) -> bool {
    let index: BTreeMap<&Map, usize> = a_copies.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let seen: BTreeSet<usize> = embeddings_oracle(a, b, rooted)
        .iter()
        .map(|f| colors[index[&f.iter().map(|(&k, v)| (k, g.map[v])).collect::<Map>()]])
        .collect();
    seen.len() == 1
}

// ---------- the criteria ----------

fn c01_tree_axioms() -> Verdict {
    let start = Instant::now();
    let mut triples = 0u64;
    for n in 1..=7 {
        for t in nonisomorphic_trees(n) {
            let m = Metric::new(&t);
            let vs: Vec<Vertex> = t.vertices().collect();
            for &x in &vs {
                for &y in &vs {
                    for &z in &vs {
                        triples += 1;
                        let k = t.median(x, y, z).unwrap();
                        if k != m.median(x, y, z) {
                            return Err(format!("median({x},{y},{z}) = {k} on {:?}", t.edges()));
                        }
                        for (a, b, c) in [(x, z, y), (y, x, z), (y, z, x), (z, x, y), (z, y, x)] {
                            if t.median(a, b, c).unwrap() != k {
                                return Err(format!("median not symmetric at ({x},{y},{z})"));
                            }
                        }
                        let bxyz = t.between(x, y, z).unwrap();
                        if bxyz != m.on(x, y, z) || bxyz != t.between(z, y, x).unwrap() {
                            return Err(format!("betweenness wrong at ({x},{y},{z})"));
                        }
                        if bxyz && t.between(x, z, y).unwrap() && y != z {
                            return Err(format!("B({x},{y},{z}) and B({x},{z},{y})"));
                        }
                    }
                }
            }
            for &root in vs.iter().filter(|&&v| t.degree(v).unwrap() <= 1) {
                let rt = RootedTree::new(t.clone(), root).unwrap();
                let le = |a: Vertex, b: Vertex| rt.meet(a, b).unwrap() == a;
                for &x in &vs {
                    if !le(x, x) || !le(root, x) {
                        return Err(format!("⪯ not reflexive or ξ not least at {x}"));
                    }
                    for &y in &vs {
                        let w = rt.meet(x, y).unwrap();
                        if w != m.median(x, y, root) || w != rt.meet(y, x).unwrap() || rt.meet(w, x).unwrap() != w {
                            return Err(format!("meet({x},{y}) wrong with root {root}"));
                        }
                        if le(x, y) && le(y, x) && x != y {
                            return Err(format!("⪯ not antisymmetric at {x},{y}"));
                        }
                        for &z in &vs {
                            if le(x, y) && le(y, z) && !le(x, z) {
                                return Err(format!("⪯ not transitive at {x},{y},{z}"));
                            }
                            let l = rt.meet(rt.meet(x, y).unwrap(), z).unwrap();
                            let r = rt.meet(x, rt.meet(y, z).unwrap()).unwrap();
                            if l != r {
                                return Err(format!("meet not associative at {x},{y},{z}"));
                            }
                            // greatest lower bound
                            if le(z, x) && le(z, y) && !le(z, w) {
                                return Err(format!("meet({x},{y}) not the greatest lower bound"));
                            }
                        }
                    }
                }
            }
        }
    }
    let el = start.elapsed();
    if el > Duration::from_secs(10) {
        return Err(format!("took {el:.2?}"));
    }
    Ok(format!("{triples} triples on all 47 trees up to 7 vertices, every leaf as root, {el:.2?}"))
}

fn alphabets(sizes: &[usize]) -> Vec<(String, RelStructure)> {
    sizes
        .iter()
        .flat_map(|&n| {
            [
                (format!("constant-only |A|={n}"), RelStructure::constant_only(n)),
                (format!("pointed order |A|={n}"), RelStructure::pointed_linear_order(n)),
            ]
        })
        .collect()
}

fn c02_census() -> Verdict {
    let mut checked = 0;
    for (name, a) in alphabets(&[2, 3]) {
        for h in 0..=3 {
            let t = build_ah(&a, h).unwrap();
            let d = distances(t.tree(), t.root());
            for level in 1..=h + 1 {
                let got = d.values().filter(|&&x| x == level).count();
                let want = (a.len() - 1).pow(level as u32 - 1);
                checked += 1;
                if got != want {
                    return Err(format!("{name}, h={h}: level {level} has {got}, expected {want}"));
                }
            }
            if d.values().any(|&x| x > h + 1) {
                return Err(format!("{name}, h={h}: vertex above height h+1"));
            }
        }
    }
    Ok(format!("{checked} levels over 4 alphabets, h ≤ 3"))
}

/// Automorphisms of a rooted tree by matching children recursively.
fn rooted_tree_auts(rt: &RootedTree) -> Vec<Map> {
    fn maps(rt: &RootedTree, v: Vertex, w: Vertex) -> Vec<Map> {
        let (cv, cw) = (rt.children(v).unwrap(), rt.children(w).unwrap());
        if cv.len() != cw.len() {
            return Vec::new();
        }
        let mut out = Vec::new();
        for perm in permutations(cw) {
            let mut partial = vec![Map::from([(v, w)])];
            for (&a, &b) in cv.iter().zip(&perm) {
                let sub = maps(rt, a, b);
                partial = partial
                    .iter()
                    .flat_map(|p| sub.iter().map(move |s| p.iter().chain(s).map(|(&x, &y)| (x, y)).collect::<Map>()))
                    .collect();
            }
            out.extend(partial);
        }
        out
    }
    maps(rt, rt.root(), rt.root())
}

fn permutations(items: &[Vertex]) -> Vec<Vec<Vertex>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn preserves_decorations(t: &DecoratedTree, g: &Map) -> bool {
    t.decorations().iter().all(|(v, d)| {
        let image = t.decoration(g[v]).unwrap();
        d.relations().iter().all(|(name, tuples)| {
            tuples.iter().all(|tp| image.holds(name, &tp.iter().map(|e| g[e]).collect::<Vec<_>>()))
        })
    })
}

fn aut_c(a: &RelStructure) -> usize {
    let elems: Vec<Vertex> = a.universe().iter().copied().collect();
    permutations(&elems)
        .into_iter()
        .filter(|p| {
            let g: Map = elems.iter().copied().zip(p.iter().copied()).collect();
            a.constant().map(|c| g[&c]) == a.constant()
                && a.relations().iter().all(|(name, ts)| {
                    ts.iter().all(|t| a.holds(name, &t.iter().map(|e| g[e]).collect::<Vec<_>>()))
                })
        })
        .count()
}

fn c03_wreath() -> Verdict {
    let start = Instant::now();
    let mut lines = Vec::new();
    for (name, a) in alphabets(&[2, 3]) {
        let mut counts = Vec::new();
        for h in 0..=3 {
            let t = build_ah(&a, h).unwrap();
            let brute = rooted_tree_auts(t.rooted_tree()).into_iter().filter(|g| preserves_decorations(&t, g)).count();
            let lib = dec_automorphisms(&t).len();
            if brute != lib {
                return Err(format!("{name}: A[{h}] brute force {brute}, library {lib}"));
            }
            counts.push(brute);
        }
        let ac = aut_c(&a);
        for h in 0..=2 {
            let want = ac * counts[h].pow(a.len() as u32 - 1);
            if counts[h + 1] != want {
                return Err(format!("{name}: |Aut(A[{}])| = {}, formula {want}", h + 1, counts[h + 1]));
            }
        }
        lines.push(format!("{name}: {counts:?}"));
    }
    let el = start.elapsed();
    if el > Duration::from_secs(60) {
        return Err(format!("took {el:.2?}"));
    }
    Ok(format!("{} ({el:.2?})", lines.join("; ")))
}

fn c04_generated_bound() -> Verdict {
    let mut sets = 0;
    let mut worst = 0.0f64;
    for (name, a) in alphabets(&[3]) {
        let t = build_ah(&a, 2).unwrap();
        let shape = Shape::new(&t);
        let pts = t.points();
        for k in 1..=3usize {
            for gens in subsets(&pts, k) {
                sets += 1;
                let g = dec_generated(&t, &gens).unwrap();
                let mut closure: BTreeSet<Vertex> = gens.clone();
                closure.insert(t.root());
                loop {
                    let add: BTreeSet<Vertex> =
                        closure.iter().flat_map(|&x| closure.iter().map(move |&y| (x, y))).map(|(x, y)| shape.meet(x, y)).collect();
                    if add.is_subset(&closure) {
                        break;
                    }
                    closure.extend(add);
                }
                let lib: BTreeSet<Vertex> = g.tree().vertices().collect();
                if lib != closure {
                    return Err(format!("{name}: closure of {gens:?} is {lib:?}, expected {closure:?}"));
                }
                let size = closure.len() - 1;
                if size > 2 * k {
                    return Err(format!("{name}: {gens:?} generates {size} > {}", 2 * k));
                }
                worst = worst.max(size as f64 / k as f64);
            }
        }
    }
    Ok(format!("{sets} generator sets, max |closure∖ξ|/k = {worst:.2}"))
}

fn subsets(items: &[Vertex], k: usize) -> Vec<BTreeSet<Vertex>> {
    if k == 0 {
        return vec![BTreeSet::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut s in subsets(&items[i + 1..], k - 1) {
            s.insert(x);
            out.push(s);
        }
    }
    out
}

fn c05_cocycle() -> Verdict {
    let mut pairs = 0u64;
    let mut colorings = 0u64;
    for t in trees_up_to(5) {
        let auts = t.automorphisms();
        for m in 1..=3 {
            for kappa in all_total_colorings(&t, m) {
                colorings += 1;
                let ct = ColoredTree::new(t.clone(), None, ColoredTree::numeric_palette(m), None, kappa.clone()).unwrap();
                let alpha = |g: &Map, x: Vertex| -> BTreeMap<usize, usize> {
                    t.neighbors(x)
                        .unwrap()
                        .iter()
                        .map(|&n| (kappa[&Component::new(x, n)], kappa[&Component::new(g[&x], g[&n])]))
                        .collect()
                };
                for g in &auts {
                    for h in &auts {
                        pairs += 1;
                        let gh: Map = h.iter().map(|(&v, w)| (v, g[w])).collect();
                        for x in t.vertices() {
                            let lhs = alpha(&gh, x);
                            let (a1, a2) = (alpha(g, h[&x]), alpha(h, x));
                            let rhs: BTreeMap<usize, usize> = a2.iter().map(|(&k, v)| (k, a1[v])).collect();
                            if lhs != rhs {
                                return Err(format!("oracle: identity fails at {x} for {kappa:?}"));
                            }
                        }
                        if let Some(x) = check_cocycle_identity(g, h, &ct).unwrap() {
                            return Err(format!("library reports a violation at {x} for {kappa:?}"));
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{colorings} colorings, {pairs} automorphism pairs"))
}

fn c06_arrow_vs_literal() -> Verdict {
    let mut checked = 0;
    let mut holds = 0;
    for path in corpus_files(corpus_dir()).map_err(|e| e.to_string())? {
        let text = std::fs::read_to_string(&path).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        if schema_of(&v) != Some(ArrowCase::SCHEMA) {
            continue;
        }
        let case = ArrowCase::from_value(v).map_err(|e| e.to_string())?;
        let i = &case.instance;
        let (a_copies, edges) = edges_oracle(&i.c, &i.b, &i.a, i.rooted);
        if a_copies.len() > 12 {
            continue;
        }
        let verdict = decide_arrow(i, 10_000_000).map_err(|e| format!("{}: {e}", path.display()))?;
        let literal = least_bad_coloring(a_copies.len(), i.k, &edges);
        let lib = verdict.bad_coloring.as_ref().map(|c| c.colors.clone());
        if verdict.holds != literal.is_none() || lib != literal {
            return Err(format!("{}: solver {lib:?}, literal {literal:?}", path.display()));
        }
        checked += 1;
        holds += verdict.holds as usize;
    }
    if checked == 0 {
        return Err("no arrow instances in the corpus".into());
    }
    Ok(format!("{checked} corpus instances ({holds} hold, {} fail), identical least bad colorings", checked - holds))
}

fn c07_a1_fails() -> Verdict {
    let mut lines = Vec::new();
    for (name, a) in alphabets(&[2]) {
        let (a0, a1) = (build_ah(&a, 0).unwrap(), build_ah(&a, 1).unwrap());
        let inst = ArrowInstance { c: a1.clone(), b: a1.clone(), a: a0.clone(), k: 2, rooted: false };
        let v = decide_arrow(&inst, 1_000_000).map_err(|e| e.to_string())?;
        let Some(bad) = v.bad_coloring.filter(|_| !v.holds) else {
            return Err(format!("{name}: arrow reported to hold"));
        };
        let (copies, edges) = edges_oracle(&a1, &a1, &a0, false);
        if bad.colors.len() != copies.len() || edges.iter().any(|e| monochromatic(e, &bad.colors)) {
            return Err(format!("{name}: coloring {:?} does not verify", bad.colors));
        }
        lines.push(format!("{name}: bad coloring {:?} on {} copies", bad.colors, copies.len()));
    }
    Ok(lines.join("; "))
}

fn c08_witness_and_mono() -> Verdict {
    let start = Instant::now();
    let a = RelStructure::pointed_linear_order(2);
    let (a0, a1) = (build_ah(&a, 0).unwrap(), build_ah(&a, 1).unwrap());
    let bounds = WitnessBounds { budget: 10_000_000, ..WitnessBounds::default() };
    let w = witness_search(&a1, &a0, 2, false, &AlphabetFamily::PointedLinearOrder, &bounds).map_err(|e| e.to_string())?;
    if w.nodes > 10_000_000 {
        return Err(format!("spent {} nodes", w.nodes));
    }
    let (copies, edges) = edges_oracle(&w.tree, &a1, &a0, false);
    if least_bad_coloring(copies.len(), 2, &edges).is_some() {
        return Err("witness does not satisfy the arrow".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for round in 0..100 {
        let gamma = ColoringAssignment::random(2, copies.len(), &mut rng);
        let copy = find_mono_copy(&w.tree, &a1, &a0, &gamma, false).map_err(|e| format!("round {round}: {e}"))?;
        if !copy_is_mono(&copy, &a1, &a0, &copies, &gamma.colors, false) {
            return Err(format!("round {round}: copy {:?} not monochromatic", copy.map));
        }
    }
    let el = start.elapsed();
    if el > Duration::from_secs(300) {
        return Err(format!("took {el:.2?}"));
    }
    Ok(format!("T = D[{}], |D| = {}, {} vertices, {} nodes; 100/100 colorings ({el:.2?})", w.m, w.alphabet.len(), w.tree.len(), w.nodes))
}

fn c09_proof_follow() -> Verdict {
    let mut instances = 0;
    let mut lines = Vec::new();
    let setups = [
        ("pointed order |A|=2, U=A[1]", RelStructure::pointed_linear_order(2), AlphabetFamily::PointedLinearOrder),
        ("constant-only |A|=2, U=A[1]", RelStructure::constant_only(2), AlphabetFamily::ConstantOnly),
    ];
    for (name, a, family) in setups {
        let ell = 1;
        let u = build_ah(&a, 1).unwrap();
        let chain = search_chain(&u, &a, ell, &family, &WitnessBounds::default()).map_err(|e| format!("{name}: {e}"))?;
        let verdicts = verify_chain(&chain, &u, &a, ell, 10_000_000).map_err(|e| format!("{name}: {e}"))?;
        if !verdicts.iter().all(|v| v.holds) {
            lines.push(format!("{name}: chain not machine-verified, skipped"));
            continue;
        }
        let t = build_ah(&chain[0].0, chain[0].1).unwrap();
        let al = build_ah(&a, ell).unwrap();
        let (copies, _) = edges_oracle(&t, &u, &al, false);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for round in 0..15 {
            let gamma = ColoringAssignment::random(2, copies.len(), &mut rng);
            let trace = proof_follow_mono(&chain, &gamma, &u, &a, ell, false).map_err(|e| format!("{name} round {round}: {e}"))?;
            if trace.used_fallback || !copy_is_mono(&trace.copy, &u, &al, &copies, &gamma.colors, false) {
                return Err(format!("{name} round {round}: copy {:?} does not re-verify", trace.copy.map));
            }
            let plain = find_mono_copy(&t, &u, &al, &gamma, false).map_err(|e| format!("{name} round {round}: {e}"))?;
            if !copy_is_mono(&plain, &u, &al, &copies, &gamma.colors, false) {
                return Err(format!("{name} round {round}: plain search copy not monochromatic"));
            }
            instances += 1;
        }
        let shape: Vec<(usize, usize)> = chain.iter().map(|(c, n)| (c.len(), *n)).collect();
        lines.push(format!("{name}: chain (|C|, n) = {shape:?}"));
    }
    if instances < 20 {
        return Err(format!("only {instances} cross-checked instances"));
    }
    Ok(format!("{instances} instances cross-checked; {}", lines.join("; ")))
}

fn c10_deuber() -> Verdict {
    let mut lines = Vec::new();
    for n in [2usize, 3] {
        let b = RelStructure::constant_only(n);
        let r = deuber_explore(&b, 1, 2, 4, 10_000_000).map_err(|e| e.to_string())?;
        let (b0, b1) = (build_ah(&b, 0).unwrap(), build_ah(&b, 1).unwrap());
        let (copies, edges) = edges_oracle(&build_ah(&b, r.minimal_m).unwrap(), &b1, &b0, false);
        if least_bad_coloring(copies.len(), 2, &edges).is_some() {
            return Err(format!("|B|={n}: B[{}] arrow does not re-verify", r.minimal_m));
        }
        if r.minimal_m > 1 {
            let (copies, edges) = edges_oracle(&build_ah(&b, r.minimal_m - 1).unwrap(), &b1, &b0, false);
            if least_bad_coloring(copies.len(), 2, &edges).is_none() {
                return Err(format!("|B|={n}: m = {} is not minimal", r.minimal_m));
            }
        }
        let relation = match r.minimal_m.cmp(&r.predicted) {
            std::cmp::Ordering::Less => "below",
            std::cmp::Ordering::Equal => "equal to",
            std::cmp::Ordering::Greater => "above",
        };
        lines.push(format!("|B|={n}: minimal m = {}, {relation} 2h-1 = {}", r.minimal_m, r.predicted));
    }
    Ok(lines.join("; "))
}

fn is_cclo_oracle(t: &Tree, seq: &[Vertex]) -> bool {
    let m = Metric::new(t);
    let rank: BTreeMap<Vertex, usize> = seq.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let vs: Vec<Vertex> = t.vertices().collect();
    for &x1 in &vs {
        for &x3 in &vs {
            let p = m.path(x1, x3);
            // converging: no middle vertex above both ends
            if p.len() > 2 && p[1..p.len() - 1].iter().any(|x2| rank[&x1] < rank[x2] && rank[&x3] < rank[x2]) {
                return false;
            }
            // convex: no x1, x2, x3, x4 along a line with x2 < x3 < x1 < x4
            for i in 1..p.len() {
                for j in i + 1..p.len().saturating_sub(1) {
                    let (a, b, c, d) = (p[0], p[i], p[j], *p.last().unwrap());
                    if rank[&b] < rank[&c] && rank[&c] < rank[&a] && rank[&a] < rank[&d] {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn c11_cclo_counts() -> Verdict {
    let p3 = enumerate_cclo(&Tree::path(3), 8).unwrap().len();
    let p2 = enumerate_cclo(&Tree::path(2), 8).unwrap().len();
    if (p3, p2) != (4, 2) {
        return Err(format!("3-path {p3}, 2-vertex tree {p2}"));
    }
    let mut trees = 0;
    for n in 1..=5 {
        for t in labeled_trees(n) {
            trees += 1;
            let vs: Vec<Vertex> = t.vertices().collect();
            let mut want: Vec<Vec<Vertex>> = permutations(&vs).into_iter().filter(|p| is_cclo_oracle(&t, p)).collect();
            want.sort();
            let got: Vec<Vec<Vertex>> = enumerate_cclo(&t, 8).unwrap().iter().map(TreeLinearOrder::sequence).collect();
            if got != want {
                return Err(format!("{:?}: {} enumerated, {} by filter", t.edges(), got.len(), want.len()));
            }
        }
    }
    Ok(format!("3-path 4, 2-vertex 2; {trees} labelled trees up to 5 vertices match the filter"))
}

fn c12_five_point() -> Verdict {
    let start = Instant::now();
    let mut orders = 0u64;
    for t in trees_up_to(6) {
        let m = Metric::new(&t);
        let vs: Vec<Vertex> = t.vertices().collect();
        let comps: BTreeMap<Vertex, Vec<BTreeSet<Vertex>>> = vs
            .iter()
            .map(|&y| {
                let cs = t.neighbors(y).unwrap().iter().map(|&n| vs.iter().copied().filter(|&z| z != y && m.on(y, n, z)).collect()).collect();
                (y, cs)
            })
            .collect();
        for o in enumerate_cclo(&t, 8).unwrap() {
            orders += 1;
            let lt = |a: Vertex, b: Vertex| o.rank(a) < o.rank(b);
            if five_point_one_witness(&o).is_some() || five_point_two_witness(&o).is_some() {
                return Err(format!("library reports a violation on {:?}", o.sequence()));
            }
            // (1): z1 - y1 - x - y2 - z2 along a line with x < y1 < y2 forces z1 < z2
            for &x in &vs {
                for &y1 in &vs {
                    for &y2 in &vs {
                        if !(lt(x, y1) && lt(y1, y2) && x != y1 && x != y2 && m.on(y1, x, y2)) {
                            continue;
                        }
                        for &z1 in vs.iter().filter(|&&z| m.on(x, y1, z)) {
                            for &z2 in vs.iter().filter(|&&z| m.on(x, y2, z)) {
                                if !lt(z1, z2) {
                                    return Err(format!("five-point (1) fails on {:?}", o.sequence()));
                                }
                            }
                        }
                    }
                }
            }
            // (2): comparisons between two components around y avoiding x < y agree
            for &y in &vs {
                for &x in vs.iter().filter(|&&x| lt(x, y)) {
                    let avoid: Vec<&BTreeSet<Vertex>> = comps[&y].iter().filter(|c| !c.contains(&x)).collect();
                    for a1 in &avoid {
                        for a2 in &avoid {
                            if a1 == a2 {
                                continue;
                            }
                            let some = a1.iter().any(|&p| a2.iter().any(|&q| lt(p, q)));
                            let all = a1.iter().all(|&p| a2.iter().all(|&q| lt(p, q)));
                            if some && !all {
                                return Err(format!("five-point (2) fails on {:?} at y = {y}", o.sequence()));
                            }
                        }
                    }
                }
            }
        }
    }
    let el = start.elapsed();
    if el > Duration::from_secs(120) {
        return Err(format!("took {el:.2?}"));
    }
    Ok(format!("{orders} CCLOs on the 14 trees up to 6 vertices, no violations ({el:.2?})"))
}

fn c13_pi_round_trip() -> Verdict {
    let mut n_orders = 0;
    for n in 1..=5 {
        for t in labeled_trees(n) {
            let vs: BTreeSet<Vertex> = t.vertices().collect();
            for o in enumerate_cclo(&t, 8).unwrap() {
                n_orders += 1;
                let cfg = realize_cclo(&t, &o).map_err(|e| e.to_string())?;
                let back = pi_order(&cfg).map_err(|e| e.to_string())?;
                if back.restricted_sequence(&vs) != o.sequence() {
                    return Err(format!("{:?}: {:?} came back as {:?}", t.edges(), o.sequence(), back.sequence()));
                }
                if !is_cclo_oracle(back.tree(), &back.sequence()) {
                    return Err(format!("π output on {:?} is not a CCLO", t.edges()));
                }
            }
        }
    }
    Ok(format!("{n_orders} CCLOs on all labelled trees up to 5 vertices"))
}

fn c14_collapse() -> Verdict {
    let mut pairs = 0;
    for n in 2..=5 {
        for t in labeled_trees(n) {
            let vs: BTreeSet<Vertex> = t.vertices().collect();
            for (x, y) in t.edges() {
                for (x0, x1) in [(x, y), (y, x)] {
                    pairs += 1;
                    let (q1, q2) = collapse_pair(&t, x0, x1).map_err(|e| e.to_string())?;
                    let (p1, p2) = (pi_order(&q1).unwrap(), pi_order(&q2).unwrap());
                    let toward = (q1.rho_points_toward(x0, x1).unwrap(), q2.rho_points_toward(x0, x1).unwrap());
                    if q1 == q2 || toward != (true, false) {
                        return Err(format!("({x0},{x1}) on {:?}: configurations not distinguished", t.edges()));
                    }
                    if p1.restricted_sequence(&vs) != p2.restricted_sequence(&vs) {
                        return Err(format!("({x0},{x1}) on {:?}: π orders differ", t.edges()));
                    }
                }
            }
        }
    }
    Ok(format!("{pairs} ordered adjacent pairs on all labelled trees up to 5 vertices"))
}

fn c15_suite_threads() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_kaleido");
    let corpus = corpus_dir().to_str().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "2", "8"] {
        let out = Command::new(bin)
            .args(["--threads", threads, "suite", "--corpus", corpus])
            .env_remove("KALEIDO_THREADS")
            .output()
            .map_err(|e| e.to_string())?;
        if out.status.code() != Some(0) {
            return Err(format!("{threads} threads: exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stdout)));
        }
        outputs.push(out.stdout);
    }
    if outputs.windows(2).any(|w| w[0] != w[1]) {
        return Err("reports differ between thread counts".into());
    }
    let report: kaleido::suite::RunReport = kaleido::io::from_text(std::str::from_utf8(&outputs[0]).unwrap()).unwrap();
    Ok(format!("{} checks, {} bytes, identical for 1, 2 and 8 threads", report.checks.len(), outputs[0].len()))
}

fn main() {
    // Keep `read_doc` exercised so a corpus path typo shows up as a failure.
    let _: Tree = read_doc(&corpus_dir().join("tree-path3.json")).expect("corpus present");
    let criteria: [(&str, fn() -> Verdict); 15] = [
        ("tree axioms", c01_tree_axioms),
        ("A[h] census", c02_census),
        ("wreath law", c03_wreath),
        ("generated-substructure bound", c04_generated_bound),
        ("cocycle identity", c05_cocycle),
        ("decide_arrow vs literal enumeration", c06_arrow_vs_literal),
        ("A[1] → (A[1])²_A[0] fails for |A| = 2", c07_a1_fails),
        ("witness search and monochromatic copies", c08_witness_and_mono),
        ("proof-following monochromatic copies", c09_proof_follow),
        ("Deuber exploration", c10_deuber),
        ("CCLO counts", c11_cclo_counts),
        ("five-point lemmas", c12_five_point),
        ("π round trip", c13_pi_round_trip),
        ("collapse pairs", c14_collapse),
        ("suite determinism across threads", c15_suite_threads),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let el = start.elapsed();
        match res {
            Ok(detail) => println!("criterion {:2} PASS {name}: {detail} [{el:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:2} FAIL {name}: {detail} [{el:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
