//! Partition arrows `C → (B)^k_A` between decorated trees: decision by
//! constraint search, monochromatic-copy extraction, witness search, and a
//! monochromatizer that follows the inductive construction level by level.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decorated::{build_ah, dec_embeddings, DecEmbedding, DecoratedTree};
use crate::error::{Error, Result};
use crate::relstruct::RelStructure;
use crate::tree::Vertex;

/// A coloring of the canonical list of `A`-copies in some structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringAssignment {
    pub k: usize,
    pub colors: Vec<usize>,
}

impl ColoringAssignment {
    pub fn new(k: usize, colors: Vec<usize>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidColoring("k must be positive".into()));
        }
        if let Some(&c) = colors.iter().find(|&&c| c >= k) {
            return Err(Error::InvalidColoring(format!("color {c} out of range for k = {k}")));
        }
        Ok(ColoringAssignment { k, colors })
    }

    pub fn constant(k: usize, n: usize) -> Self {
        ColoringAssignment { k, colors: vec![0; n] }
    }

    pub fn random(k: usize, n: usize, rng: &mut impl Rng) -> Self {
        ColoringAssignment { k, colors: (0..n).map(|_| rng.gen_range(0..k)).collect() }
    }

    pub fn domain_size(&self) -> usize {
        self.colors.len()
    }
}

/// `C → (B)^k_A`, for plain or rooted embeddings.
#[derive(Debug, Clone)]
pub struct ArrowInstance {
    pub c: DecoratedTree,
    pub b: DecoratedTree,
    pub a: DecoratedTree,
    pub k: usize,
    pub rooted: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowStats {
    pub a_copies: usize,
    pub b_copies: usize,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowVerdict {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bad_coloring: Option<ColoringAssignment>,
    pub stats: ArrowStats,
}

/// Canonical list of copies together with a lookup by image vector.
#[derive(Debug, Clone)]
pub struct CopyIndex {
    pub copies: Vec<DecEmbedding>,
    index: HashMap<Vec<Vertex>, usize>,
}

impl CopyIndex {
    pub fn new(a: &DecoratedTree, t: &DecoratedTree, rooted: bool) -> Result<Self> {
        let copies = dec_embeddings(a, t, rooted)?;
        let index = copies.iter().enumerate().map(|(i, e)| (e.images(), i)).collect();
        Ok(CopyIndex { copies, index })
    }

    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }

    pub fn position(&self, e: &DecEmbedding) -> Option<usize> {
        self.index.get(&e.images()).copied()
    }
}

/// The hypergraph of an arrow instance: one variable per `A`-copy in `C`, one
/// edge per `B`-copy listing the `A`-copies inside it.
#[derive(Debug, Clone)]
pub struct ArrowHypergraph {
    pub a_copies: CopyIndex,
    pub b_copies: Vec<DecEmbedding>,
    pub edges: Vec<Vec<usize>>,
}

impl ArrowHypergraph {
    pub fn new(inst: &ArrowInstance) -> Result<Self> {
        let a_copies = CopyIndex::new(&inst.a, &inst.c, inst.rooted)?;
        if a_copies.is_empty() {
            return Err(Error::EmptyArrow);
        }
        let b_copies = dec_embeddings(&inst.b, &inst.c, inst.rooted)?;
        let inner = dec_embeddings(&inst.a, &inst.b, inst.rooted)?;
        let edges = b_copies
            .iter()
            .map(|g| {
                let mut e: Vec<usize> = inner
                    .iter()
                    .map(|f| a_copies.position(&f.then(g)).expect("composite of embeddings is an embedding"))
                    .collect();
                e.sort_unstable();
                e.dedup();
                e
            })
            .collect();
        Ok(ArrowHypergraph { a_copies, b_copies, edges })
    }

    /// Index of the first edge that is monochromatic under `colors`.
    pub fn first_monochromatic(&self, colors: &[usize]) -> Option<usize> {
        self.edges.iter().position(|e| e.iter().all(|&v| colors[v] == colors[e[0]]))
    }
}

const SPLIT_DEPTH: usize = 4;

enum Solve {
    Found(Vec<usize>),
    Exhausted,
    OutOfBudget,
}

struct Solver<'a> {
    k: usize,
    edges: &'a [Vec<usize>],
    var_edges: Vec<Vec<usize>>,
    colors: Vec<Option<usize>>,
    forbidden: Vec<u64>,
    trail: Vec<(usize, u64)>,
    nodes: u64,
    budget: u64,
}

impl<'a> Solver<'a> {
    fn new(n: usize, k: usize, edges: &'a [Vec<usize>], budget: u64) -> Self {
        let mut var_edges = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            for &v in e {
                var_edges[v].push(i);
            }
        }
        Solver { k, edges, var_edges, colors: vec![None; n], forbidden: vec![0; n], trail: Vec::new(), nodes: 0, budget }
    }

    fn all_forbidden(&self, v: usize) -> bool {
        (0..self.k).all(|c| self.forbidden[v] >> c & 1 == 1)
    }

    /// Assigns and propagates; on conflict the caller must still undo to the
    /// returned trail mark.
    fn assign(&mut self, v: usize, c: usize) -> bool {
        self.colors[v] = Some(c);
        for idx in 0..self.var_edges[v].len() {
            let e = &self.edges[self.var_edges[v][idx]];
            let mut open = None;
            let mut open_count = 0;
            let mut same = true;
            let mut first = None;
            for &u in e {
                match self.colors[u] {
                    None => {
                        open = Some(u);
                        open_count += 1;
                    }
                    Some(x) => match first {
                        None => first = Some(x),
                        Some(f) if f != x => same = false,
                        _ => {}
                    },
                }
            }
            if !same {
                continue;
            }
            match (open_count, first) {
                (0, _) => return false,
                (1, Some(x)) => {
                    let u = open.unwrap();
                    if self.forbidden[u] >> x & 1 == 0 {
                        self.trail.push((u, self.forbidden[u]));
                        self.forbidden[u] |= 1 << x;
                        if self.all_forbidden(u) {
                            return false;
                        }
                    }
                }
                _ => {}
            }
        }
        true
    }

    fn undo(&mut self, v: usize, mark: usize) {
        self.colors[v] = None;
        while self.trail.len() > mark {
            let (u, old) = self.trail.pop().unwrap();
            self.forbidden[u] = old;
        }
    }

    fn max_used(&self, upto: usize) -> Option<usize> {
        self.colors[..upto].iter().filter_map(|c| *c).max()
    }

    fn dfs(&mut self, v: usize) -> Solve {
        if v == self.colors.len() {
            return Solve::Found(self.colors.iter().map(|c| c.unwrap()).collect());
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Solve::OutOfBudget;
        }
        let limit = self.max_used(v).map_or(1, |m| m + 2).min(self.k);
        for c in 0..limit {
            if self.forbidden[v] >> c & 1 == 1 {
                continue;
            }
            let mark = self.trail.len();
            if self.assign(v, c) {
                match self.dfs(v + 1) {
                    Solve::Exhausted => {}
                    other => return other,
                }
            }
            self.undo(v, mark);
        }
        Solve::Exhausted
    }
}

fn prefixes(n: usize, k: usize) -> Vec<Vec<usize>> {
    let depth = SPLIT_DEPTH.min(n);
    let mut out = vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for p in &out {
            let limit = p.iter().max().map_or(1, |m| m + 2).min(k);
            for c in 0..limit {
                let mut q: Vec<usize> = p.clone();
                q.push(c);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Searches for the lexicographically least `k`-coloring of `n` variables
/// leaving no edge monochromatic. Work is split over fixed prefixes that are
/// all solved, so the verdict and node count do not depend on scheduling.
fn find_bad_coloring(n: usize, k: usize, edges: &[Vec<usize>], budget: u64) -> (Option<Vec<usize>>, u64, bool) {
    if edges.iter().any(|e| e.len() == 1) {
        return (None, 0, false);
    }
    let runs: Vec<(Solve, u64)> = prefixes(n, k)
        .par_iter()
        .map(|p| {
            let mut s = Solver::new(n, k, edges, budget);
            for (v, &c) in p.iter().enumerate() {
                s.nodes += 1;
                if s.forbidden[v] >> c & 1 == 1 || !s.assign(v, c) {
                    return (Solve::Exhausted, s.nodes);
                }
            }
            let r = s.dfs(p.len());
            (r, s.nodes)
        })
        .collect();
    let total: u64 = runs.iter().map(|r| r.1).sum();
    for (r, _) in runs {
        match r {
            Solve::Found(c) => return (Some(c), total, total > budget),
            Solve::OutOfBudget => return (None, total, true),
            Solve::Exhausted => {}
        }
    }
    (None, total, total > budget)
}

/// Decides `C → (B)^k_A`. When the arrow fails the verdict carries the
/// lexicographically least bad coloring.
pub fn decide_arrow(inst: &ArrowInstance, budget: u64) -> Result<ArrowVerdict> {
    if inst.k == 0 {
        return Err(Error::InvalidColoring("k must be positive".into()));
    }
    if inst.k > 64 {
        return Err(Error::InvalidColoring("at most 64 colors are supported".into()));
    }
    let hg = ArrowHypergraph::new(inst)?;
    decide_on(&hg, inst.k, budget)
}

pub fn decide_on(hg: &ArrowHypergraph, k: usize, budget: u64) -> Result<ArrowVerdict> {
    let n = hg.a_copies.len();
    let (bad, nodes, out_of_budget) = find_bad_coloring(n, k, &hg.edges, budget);
    let stats = ArrowStats { a_copies: n, b_copies: hg.b_copies.len(), nodes };
    match bad {
        Some(colors) if !out_of_budget => Ok(ArrowVerdict { holds: false, bad_coloring: Some(ColoringAssignment { k, colors }), stats }),
        None if !out_of_budget => Ok(ArrowVerdict { holds: true, bad_coloring: None, stats }),
        _ => Err(Error::Inconclusive { budget }),
    }
}

/// The first `B`-copy in `t`, in canonical order, on which `γ` is constant.
pub fn find_mono_copy(
    t: &DecoratedTree,
    b: &DecoratedTree,
    a: &DecoratedTree,
    gamma: &ColoringAssignment,
    rooted: bool,
) -> Result<DecEmbedding> {
    let inst = ArrowInstance { c: t.clone(), b: b.clone(), a: a.clone(), k: gamma.k, rooted };
    let hg = ArrowHypergraph::new(&inst)?;
    mono_in(&hg, gamma)
}

fn mono_in(hg: &ArrowHypergraph, gamma: &ColoringAssignment) -> Result<DecEmbedding> {
    if gamma.domain_size() != hg.a_copies.len() {
        return Err(Error::InvalidColoring(format!(
            "coloring has {} entries, expected {}",
            gamma.domain_size(),
            hg.a_copies.len()
        )));
    }
    hg.first_monochromatic(&gamma.colors)
        .map(|i| hg.b_copies[i].clone())
        .ok_or(Error::SearchExhausted)
}

/// Whether every `A`-subcopy of the `B`-copy `g` in `t` has the same color.
pub fn is_monochromatic(
    g: &DecEmbedding,
    b: &DecoratedTree,
    a: &DecoratedTree,
    index: &CopyIndex,
    gamma: &ColoringAssignment,
    rooted: bool,
) -> Result<bool> {
    let colors: BTreeSet<usize> = dec_embeddings(a, b, rooted)?
        .iter()
        .map(|f| index.position(&f.then(g)).map(|i| gamma.colors[i]))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::NotEmbedding("subcopy outside the colored domain".into()))?;
    Ok(colors.len() <= 1)
}

/// Alphabets searched when looking for witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlphabetFamily {
    ConstantOnly,
    PointedLinearOrder,
    Fixed(RelStructure),
}

impl AlphabetFamily {
    /// The family member with `n` elements, if any.
    pub fn member(&self, n: usize) -> Option<RelStructure> {
        match self {
            AlphabetFamily::ConstantOnly => Some(RelStructure::constant_only(n)),
            AlphabetFamily::PointedLinearOrder => Some(RelStructure::pointed_linear_order(n)),
            AlphabetFamily::Fixed(a) => (a.len() == n).then(|| a.clone()),
        }
    }

    fn sizes(&self, min: usize, max: usize) -> Vec<usize> {
        match self {
            AlphabetFamily::Fixed(a) => vec![a.len()],
            _ => (min.max(2)..=max).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WitnessBounds {
    pub min_alphabet: usize,
    pub max_alphabet: usize,
    pub max_height: usize,
    pub max_vertices: usize,
    pub budget: u64,
}

impl Default for WitnessBounds {
    fn default() -> Self {
        WitnessBounds { min_alphabet: 2, max_alphabet: 3, max_height: 6, max_vertices: 64, budget: 10_000_000 }
    }
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub alphabet: RelStructure,
    pub m: usize,
    pub tree: DecoratedTree,
    pub verdict: ArrowVerdict,
    /// Candidates before the witness whose search ran out of budget.
    pub skipped: usize,
    pub nodes: u64,
}

/// Candidate towers `D[m]` ordered by vertex count, ties by smaller `|D|`.
pub fn witness_candidates(family: &AlphabetFamily, bounds: &WitnessBounds) -> Result<Vec<(RelStructure, usize, DecoratedTree)>> {
    let mut out = Vec::new();
    for n in family.sizes(bounds.min_alphabet, bounds.max_alphabet) {
        let Some(d) = family.member(n) else { continue };
        for m in 0..=bounds.max_height {
            let t = build_ah(&d, m)?;
            if t.len() > bounds.max_vertices {
                break;
            }
            out.push((d.clone(), m, t));
        }
    }
    out.sort_by_key(|(d, m, t)| (t.len(), d.len(), *m));
    Ok(out)
}

/// The first candidate `T = D[m]` with `T → (B)^k_A`.
pub fn witness_search(
    b: &DecoratedTree,
    a: &DecoratedTree,
    k: usize,
    rooted: bool,
    family: &AlphabetFamily,
    bounds: &WitnessBounds,
) -> Result<Witness> {
    let mut spent = 0u64;
    let mut skipped = 0;
    for (d, m, t) in witness_candidates(family, bounds)? {
        if t.signature() != b.signature() || dec_embeddings(b, &t, rooted)?.is_empty() {
            continue;
        }
        let remaining = bounds.budget.saturating_sub(spent);
        if remaining == 0 {
            break;
        }
        let inst = ArrowInstance { c: t.clone(), b: b.clone(), a: a.clone(), k, rooted };
        match decide_arrow(&inst, remaining) {
            Ok(v) => {
                spent += v.stats.nodes;
                if v.holds {
                    return Ok(Witness { alphabet: d, m, tree: t, verdict: v, skipped, nodes: spent });
                }
            }
            Err(Error::Inconclusive { .. }) => {
                spent = bounds.budget;
                skipped += 1;
            }
            Err(Error::EmptyArrow) => {}
            Err(e) => return Err(e),
        }
    }
    Err(Error::Inconclusive { budget: bounds.budget })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeuberReport {
    pub h: usize,
    pub k: usize,
    pub alphabet_size: usize,
    /// `(m, holds)` for every height tried.
    pub tried: Vec<(usize, bool)>,
    pub minimal_m: usize,
    pub predicted: usize,
    pub within_prediction: bool,
    pub verdict: ArrowVerdict,
}

/// The least `m ≤ max_m` with `B[m] → (B[h])^k_{B[0]}`, compared with `2h - 1`.
pub fn deuber_explore(b: &RelStructure, h: usize, k: usize, max_m: usize, budget: u64) -> Result<DeuberReport> {
    if h == 0 {
        return Err(Error::MalformedStructure("h must be at least 1".into()));
    }
    let bh = build_ah(b, h)?;
    let a0 = build_ah(b, 0)?;
    let mut tried = Vec::new();
    let mut spent = 0u64;
    for m in h..=max_m {
        let inst = ArrowInstance { c: build_ah(b, m)?, b: bh.clone(), a: a0.clone(), k, rooted: false };
        let v = decide_arrow(&inst, budget.saturating_sub(spent))?;
        spent += v.stats.nodes;
        tried.push((m, v.holds));
        if v.holds {
            let predicted = 2 * h - 1;
            return Ok(DeuberReport {
                h,
                k,
                alphabet_size: b.len(),
                tried,
                minimal_m: m,
                predicted,
                within_prediction: m <= predicted,
                verdict: v,
            });
        }
    }
    Err(Error::Inconclusive { budget })
}

/// One link `(C_i, n_i)` of a chain for the inductive construction.
pub type ChainLink = (RelStructure, usize);

/// Checks every sub-arrow of a chain: `C_i[n_i] →r (C_{i+1}[n_{i+1}+1])²_{A[ℓ]}`
/// for `i < h`, and `C_h[0] → (U)²_{A[0]}` at the bottom. Returns the
/// verdicts from the top level down.
pub fn verify_chain(
    chain: &[ChainLink],
    u: &DecoratedTree,
    a: &RelStructure,
    ell: usize,
    budget: u64,
) -> Result<Vec<ArrowVerdict>> {
    let al = build_ah(a, ell)?;
    let mut out = Vec::new();
    for (i, w) in chain.windows(2).enumerate() {
        let inst = ArrowInstance {
            c: build_ah(&w[0].0, w[0].1)?,
            b: build_ah(&w[1].0, w[1].1 + 1)?,
            a: al.clone(),
            k: 2,
            rooted: true,
        };
        let v = decide_arrow(&inst, budget).map_err(|e| Error::SubArrowFailed { level: i, reason: e.to_string() })?;
        out.push(v);
    }
    let (d, n) = chain.last().ok_or_else(|| Error::MalformedStructure("empty chain".into()))?;
    let h = chain.len() - 1;
    if *n != 0 {
        return Err(Error::MalformedStructure("the last link must have n = 0".into()));
    }
    let inst = ArrowInstance { c: build_ah(d, h)?, b: u.clone(), a: build_ah(d, 0)?, k: 2, rooted: false };
    out.push(decide_arrow(&inst, budget).map_err(|e| Error::SubArrowFailed { level: h, reason: e.to_string() })?);
    Ok(out)
}

/// Builds a chain bottom-up: first `D[h] → (U)²_{A[0]}` by witness search,
/// then for `i = h-1, .., 0` the smallest `C_i[n_i]` in the family with
/// `C_i ⊇ C_{i+1}` and the rooted sub-arrow.
pub fn search_chain(
    u: &DecoratedTree,
    a: &RelStructure,
    ell: usize,
    family: &AlphabetFamily,
    bounds: &WitnessBounds,
) -> Result<Vec<ChainLink>> {
    let a0 = build_ah(a, 0)?;
    let base = witness_search(u, &a0, 2, false, family, bounds)?;
    let h = base.m;
    let al = build_ah(a, ell)?;
    let mut chain: Vec<ChainLink> = vec![(base.alphabet.clone(), 0)];
    for _ in 0..h {
        let (below, n_below) = chain[0].clone();
        let target = build_ah(&below, n_below + 1)?;
        let mut found = None;
        let mut cands = Vec::new();
        for size in family.sizes(below.len(), bounds.max_alphabet.max(below.len())) {
            let Some(c) = family.member(size) else { continue };
            for n in n_below + 1..=n_below + 1 + bounds.max_height {
                let t = build_ah(&c, n)?;
                if t.len() > bounds.max_vertices {
                    break;
                }
                cands.push((t.len(), size, n, c.clone(), t));
            }
        }
        cands.sort_by_key(|x| (x.0, x.1, x.2));
        for (_, _, n, c, t) in cands {
            let inst = ArrowInstance { c: t, b: target.clone(), a: al.clone(), k: 2, rooted: true };
            match decide_arrow(&inst, bounds.budget) {
                Ok(v) if v.holds => {
                    found = Some((c, n));
                    break;
                }
                Ok(_) | Err(Error::EmptyArrow) => {}
                Err(e) => return Err(e),
            }
        }
        let link = found.ok_or(Error::Inconclusive { budget: bounds.budget })?;
        chain.insert(0, link);
    }
    Ok(chain)
}

/// Trace of a proof-following run.
#[derive(Debug, Clone)]
pub struct MonoTrace {
    pub copy: DecEmbedding,
    /// Vertices of the final `S`.
    pub s: BTreeSet<Vertex>,
    /// The induced point coloring on `S`.
    pub delta: BTreeMap<Vertex, usize>,
    pub used_fallback: bool,
}

/// Finds a `γ`-monochromatic copy of `u` in `T = C_0[n_0]` by the inductive
/// construction: shrink the subtree above each vertex of level `i` to a
/// monochromatic rooted copy of `C_{i+1}[n_{i+1}+1]`, read off the point
/// coloring `δ`, then find a `δ`-monochromatic copy of `u`.
///
/// Levels count from `r` (level 0). `γ` colors the canonical list of
/// embeddings `A[ℓ] → T`. With `fallback`, a failing sub-arrow hands over to
/// [`find_mono_copy`] instead of erroring.
pub fn proof_follow_mono(
    chain: &[ChainLink],
    gamma: &ColoringAssignment,
    u: &DecoratedTree,
    a: &RelStructure,
    ell: usize,
    fallback: bool,
) -> Result<MonoTrace> {
    if ell == 0 {
        return Err(Error::MalformedStructure("ℓ must be at least 1".into()));
    }
    let (c0, n0) = chain.first().ok_or_else(|| Error::MalformedStructure("empty chain".into()))?;
    let t = build_ah(c0, *n0)?;
    let al = build_ah(a, ell)?;
    let t_index = CopyIndex::new(&al, &t, false)?;
    if gamma.domain_size() != t_index.len() {
        return Err(Error::InvalidColoring(format!(
            "coloring has {} entries, expected {}",
            gamma.domain_size(),
            t_index.len()
        )));
    }
    match follow(chain, gamma, u, &t, &al, &t_index) {
        Ok(trace) => Ok(trace),
        Err(Error::SubArrowFailed { .. }) if fallback => {
            let inst = ArrowInstance { c: t.clone(), b: u.clone(), a: al.clone(), k: gamma.k, rooted: false };
            let hg = ArrowHypergraph::new(&inst)?;
            let copy = mono_in(&hg, gamma)?;
            Ok(MonoTrace { s: t.tree().vertices().collect(), copy, delta: BTreeMap::new(), used_fallback: true })
        }
        Err(e) => Err(e),
    }
}

fn follow(
    chain: &[ChainLink],
    gamma: &ColoringAssignment,
    u: &DecoratedTree,
    t: &DecoratedTree,
    al: &DecoratedTree,
    t_index: &CopyIndex,
) -> Result<MonoTrace> {
    let h = chain.len() - 1;
    let mut s_set: BTreeSet<Vertex> = t.tree().vertices().collect();
    for i in 0..h {
        let s_tree = t.induced(&s_set)?;
        let (c_next, n_next) = &chain[i + 1];
        let target = build_ah(c_next, n_next + 1)?;
        let fail = |reason: String| Error::SubArrowFailed { level: i, reason };
        // level i = height i + 1
        for s in s_tree.rooted_tree().level(i + 1) {
            let above = s_tree.rooted_tree().subtree_at(s)?;
            let sub = t.induced(&above)?;
            let inst = ArrowInstance { c: sub, b: target.clone(), a: al.clone(), k: gamma.k, rooted: true };
            let hg = match ArrowHypergraph::new(&inst) {
                Ok(hg) => hg,
                Err(Error::EmptyArrow) => return Err(fail(format!("no rooted copy of A[ℓ] above {s}"))),
                Err(e) => return Err(e),
            };
            let colors: Vec<usize> = hg.a_copies.copies.iter().map(|e| gamma.colors[t_index.position(e).unwrap()]).collect();
            let local = ColoringAssignment { k: gamma.k, colors };
            let copy = mono_in(&hg, &local).map_err(|e| fail(format!("above {s}: {e}")))?;
            for v in above.iter().filter(|&&v| v != t.root()) {
                s_set.remove(v);
            }
            s_set.extend(copy.image());
        }
    }
    let s_tree = t.induced(&s_set)?;
    let mut delta: BTreeMap<Vertex, usize> = BTreeMap::new();
    let r_a = al.r().expect("A[ℓ] has r");
    for e in dec_embeddings(al, &s_tree, false)? {
        let c = gamma.colors[t_index.position(&e).unwrap()];
        let p = e.apply(r_a);
        if delta.insert(p, c).is_some_and(|old| old != c) {
            return Err(Error::SubArrowFailed { level: h, reason: format!("copies rooted at {p} disagree") });
        }
    }
    let a0 = build_ah(&chain[h].0, 0)?;
    let inst = ArrowInstance { c: s_tree.clone(), b: u.clone(), a: a0.clone(), k: gamma.k, rooted: false };
    let hg = ArrowHypergraph::new(&inst)?;
    let r0 = a0.r().unwrap();
    let point_colors: Vec<usize> = hg.a_copies.copies.iter().map(|e| delta.get(&e.apply(r0)).copied().unwrap_or(0)).collect();
    let copy = mono_in(&hg, &ColoringAssignment { k: gamma.k, colors: point_colors })
        .map_err(|e| Error::SubArrowFailed { level: h, reason: e.to_string() })?;
    if !is_monochromatic(&copy, u, al, t_index, gamma, false)? {
        return Err(Error::SubArrowFailed { level: h, reason: "final copy is not monochromatic".into() });
    }
    Ok(MonoTrace { copy, s: s_set, delta, used_fallback: false })
}
