//! The invariant battery behind `kaleido suite`, plus checks of corpus files.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::cclo::{
    collapse_pair, enumerate_cclo, five_point_one_witness, five_point_two_witness, is_cclo, pi_order, realize_cclo,
    TreeLinearOrder,
};
use crate::coloring::{all_total_colorings, check_cocycle_identity, ColoredTree};
use crate::decorated::{build_ah, dec_automorphisms, DecoratedTree};
use crate::error::{Error, Result};
use crate::gen::trees_up_to;
use crate::io::{from_text, schema_of, to_text, ArrowCase, ChainFile, Document, RankFile};
use crate::ramsey::{decide_arrow, ArrowHypergraph, ColoringAssignment};
use crate::relstruct::RelStructure;
use crate::tree::{RootedTree, Tree, Vertex};

pub const REPORT_SCHEMA: &str = "kaleido/report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    /// Largest tree size for the exhaustive sweeps. Each check also has its
    /// own ceiling.
    pub max_size: usize,
    pub budget: u64,
    /// Record wall-clock time per check. Off by default since it makes
    /// reports differ between runs.
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { max_size: 6, budget: 10_000_000, timing: false }
    }
}

/// Result of one invariant over all the cases it covers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

impl CheckOutcome {
    fn from_cases(name: &str, cases: u64, counterexample: Option<String>) -> Self {
        CheckOutcome { name: name.into(), passed: counterexample.is_none(), cases, counterexample, millis: None }
    }

    fn error(name: &str, e: &Error) -> Self {
        CheckOutcome::from_cases(name, 0, Some(format!("error: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub command: Vec<String>,
    /// SHA-256 over the configuration and every corpus file (name and bytes).
    pub inputs_digest: String,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl Document for RunReport {
    const SCHEMA: &'static str = REPORT_SCHEMA;

    fn to_value(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        let obj = v.as_object_mut().expect("object");
        let mut out = serde_json::Map::new();
        out.insert("schema".into(), Value::String(REPORT_SCHEMA.into()));
        out.append(obj);
        Value::Object(out)
    }

    fn from_value(mut v: Value) -> Result<Self> {
        if schema_of(&v) != Some(REPORT_SCHEMA) {
            return Err(Error::Parse(format!("expected schema {REPORT_SCHEMA}")));
        }
        v.as_object_mut().expect("checked above").remove("schema");
        serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Corpus files (`*.json`, non-recursive) in name order.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut out = Vec::new();
    for entry in entries {
        let p = entry.map_err(|e| Error::Io(e.to_string()))?.path();
        if p.extension().is_some_and(|x| x == "json") {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

type Battery = fn(&SuiteConfig) -> CheckOutcome;

const BATTERY: &[(&str, Battery)] = &[
    ("median-axioms", |c| median_axioms(c.max_size.min(7))),
    ("tower-census", |_| tower_census(3)),
    ("wreath-law", |_| wreath_law(2)),
    ("document-round-trip", |_| document_round_trips()),
    ("cocycle-identity", |c| cocycle_identity(c.max_size.min(5), 3)),
    ("cclo-enumeration", |c| cclo_enumeration(c.max_size.min(5))),
    ("five-point-lemmas", |c| five_point_lemmas(c.max_size.min(6))),
    ("pi-round-trip", |c| pi_round_trip(c.max_size.min(5))),
    ("collapse-pairs", |c| collapse_pairs(c.max_size.min(5))),
];

/// Runs the built-in battery and every corpus file. The report depends only
/// on the inputs and `cfg`, never on scheduling.
pub fn run_suite(corpus: Option<&Path>, cfg: &SuiteConfig, command: &[String]) -> Result<RunReport> {
    let files = match corpus {
        Some(d) => corpus_files(d)?,
        None => Vec::new(),
    };
    let mut hasher = Sha256::new();
    hasher.update(format!("max_size={};budget={}\n", cfg.max_size, cfg.budget));
    let mut contents = Vec::new();
    for f in &files {
        let bytes = std::fs::read(f).map_err(|e| Error::Io(format!("{}: {e}", f.display())))?;
        let name = f.file_name().unwrap().to_string_lossy().into_owned();
        hasher.update(name.as_bytes());
        hasher.update([0]);
        hasher.update(&bytes);
        contents.push((name, bytes));
    }
    let digest = hex::encode(hasher.finalize());

    let timed = |name: &str, run: &dyn Fn() -> CheckOutcome| {
        let start = Instant::now();
        let mut out = run();
        out.name = name.to_string();
        if cfg.timing {
            out.millis = Some(start.elapsed().as_millis() as u64);
        }
        out
    };
    let mut checks: Vec<CheckOutcome> = BATTERY.par_iter().map(|(name, f)| timed(name, &|| f(cfg))).collect();
    let corpus_checks: Vec<CheckOutcome> = contents
        .par_iter()
        .map(|(name, bytes)| timed(&format!("corpus/{name}"), &|| check_corpus_file(bytes, cfg.budget)))
        .collect();
    checks.extend(corpus_checks);
    Ok(RunReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_vec(),
        inputs_digest: digest,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// Checks one corpus document, dispatching on its schema.
pub fn check_corpus_file(bytes: &[u8], budget: u64) -> CheckOutcome {
    let name = "corpus";
    let text = match std::str::from_utf8(bytes) {
        Ok(t) => t,
        Err(e) => return CheckOutcome::error(name, &Error::Parse(e.to_string())),
    };
    let v: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => return CheckOutcome::error(name, &Error::Parse(e.to_string())),
    };
    let res = match schema_of(&v) {
        Some(Tree::SCHEMA) => round_trip_text::<Tree>(text),
        Some(RelStructure::SCHEMA) => round_trip_text::<RelStructure>(text),
        Some(DecoratedTree::SCHEMA) => round_trip_text::<DecoratedTree>(text),
        Some(ColoringAssignment::SCHEMA) => round_trip_text::<ColoringAssignment>(text),
        Some(RankFile::SCHEMA) => round_trip_text::<RankFile>(text),
        Some(ChainFile::SCHEMA) => round_trip_text::<ChainFile>(text),
        Some(ColoredTree::SCHEMA) => from_text::<ColoredTree>(text).and_then(|ct| coloring_check(&ct)),
        Some(ArrowCase::SCHEMA) => from_text::<ArrowCase>(text).and_then(|c| arrow_check(&c, budget)),
        Some(other) => Err(Error::Parse(format!("unrecognized schema {other}"))),
        None => Err(Error::Parse("missing schema field".into())),
    };
    match res {
        Ok((cases, cx)) => CheckOutcome::from_cases(name, cases, cx),
        Err(e) => CheckOutcome::error(name, &e),
    }
}

type Tally = Result<(u64, Option<String>)>;

fn round_trip_text<D: Document>(text: &str) -> Tally {
    let d: D = from_text(text)?;
    let again: D = from_text(&to_text(&d))?;
    let same = to_text(&again) == to_text(&d);
    Ok((1, (!same).then(|| "document does not round-trip".to_string())))
}

/// Injectivity plus the cocycle identity for every pair of automorphisms
/// (root-fixing ones when the coloring is rooted).
fn coloring_check(ct: &ColoredTree) -> Tally {
    if let Some(v) = ct.injectivity_violation() {
        // still run the identity so the witness names an automorphism pair
        let auts = automorphisms_of(ct);
        for g in &auts {
            for h in &auts {
                if let Some(x) = check_cocycle_identity(g, h, ct)? {
                    return Ok((1, Some(format!("cocycle identity fails at vertex {x} for g={g:?}, h={h:?}"))));
                }
            }
        }
        return Ok((1, Some(format!("colors repeat around vertex {v}"))));
    }
    let auts = automorphisms_of(ct);
    let mut cases = 0;
    for g in &auts {
        for h in &auts {
            cases += 1;
            if let Some(x) = check_cocycle_identity(g, h, ct)? {
                return Ok((cases, Some(format!("cocycle identity fails at vertex {x} for g={g:?}, h={h:?}"))));
            }
        }
    }
    Ok((cases, None))
}

fn automorphisms_of(ct: &ColoredTree) -> Vec<BTreeMap<Vertex, Vertex>> {
    let mut auts = ct.tree().automorphisms();
    if let Some(r) = ct.root() {
        auts.retain(|g| g[&r] == r);
    }
    auts
}

/// Decides the arrow; a failing verdict must carry a coloring with no
/// monochromatic copy, and the verdict must match `expect` if given.
fn arrow_check(case: &ArrowCase, budget: u64) -> Tally {
    let v = decide_arrow(&case.instance, budget)?;
    if let Some(bad) = &v.bad_coloring {
        let hg = ArrowHypergraph::new(&case.instance)?;
        if let Some(i) = hg.first_monochromatic(&bad.colors) {
            return Ok((1, Some(format!("bad coloring has monochromatic copy {i}"))));
        }
    }
    if let Some(e) = case.expect {
        if e != v.holds {
            return Ok((1, Some(format!("expected holds={e}, got holds={}", v.holds))));
        }
    }
    Ok((1, None))
}

fn first_failure<T: Sync>(items: &[T], check: impl Fn(&T) -> Tally + Sync + Send) -> Tally {
    let results: Vec<(u64, Option<String>)> = items.par_iter().map(check).collect::<Result<_>>()?;
    let cases = results.iter().map(|r| r.0).sum();
    Ok((cases, results.into_iter().find_map(|r| r.1)))
}

fn finish(name: &str, t: Tally) -> CheckOutcome {
    match t {
        Ok((cases, cx)) => CheckOutcome::from_cases(name, cases, cx),
        Err(e) => CheckOutcome::error(name, &e),
    }
}

/// Median symmetry, betweenness laws, the meet order for every leaf as root,
/// component partitions and idempotence of generated subtrees.
pub fn median_axioms(max: usize) -> CheckOutcome {
    finish("median-axioms", first_failure(&trees_up_to(max), median_axioms_on))
}

fn median_axioms_on(t: &Tree) -> Tally {
    let vs: Vec<Vertex> = t.vertices().collect();
    let mut cases = 0;
    for &x in &vs {
        for &y in &vs {
            for &z in &vs {
                cases += 1;
                let m = t.median(x, y, z)?;
                let perms = [(x, z, y), (y, x, z), (y, z, x), (z, x, y), (z, y, x)];
                for (a, b, c) in perms {
                    if t.median(a, b, c)? != m {
                        return Ok((cases, Some(format!("median not symmetric at ({x},{y},{z})"))));
                    }
                }
                if t.between(x, y, z)? != t.between(z, y, x)? {
                    return Ok((cases, Some(format!("betweenness not symmetric at ({x},{y},{z})"))));
                }
                if t.between(x, y, z)? && t.between(x, z, y)? && y != z {
                    return Ok((cases, Some(format!("B({x},{y},{z}) and B({x},{z},{y}) with {y}≠{z}"))));
                }
            }
        }
        let classes: BTreeSet<_> =
            vs.iter().filter(|&&y| y != x).map(|&y| t.component_of(x, y)).collect::<Result<_>>()?;
        if classes.len() != t.degree(x)? {
            return Ok((cases, Some(format!("components around {x} do not match its degree"))));
        }
    }
    for &root in vs.iter().filter(|&&v| t.degree(v).is_ok_and(|d| d <= 1)) {
        let rt = RootedTree::new(t.clone(), root)?;
        let le = |a: Vertex, b: Vertex| -> Result<bool> { Ok(rt.meet(a, b)? == a) };
        for &x in &vs {
            if !le(x, x)? || !le(root, x)? {
                return Ok((cases, Some(format!("meet order fails reflexivity or minimality at {x} (root {root})"))));
            }
            for &y in &vs {
                cases += 1;
                if rt.meet(x, y)? != t.median(x, y, root)? || rt.meet(x, y)? != rt.meet(y, x)? {
                    return Ok((cases, Some(format!("meet({x},{y}) is not the median with root {root}"))));
                }
                if le(x, y)? && le(y, x)? && x != y {
                    return Ok((cases, Some(format!("meet order not antisymmetric at ({x},{y})"))));
                }
                for &z in &vs {
                    if le(x, y)? && le(y, z)? && !le(x, z)? {
                        return Ok((cases, Some(format!("meet order not transitive at ({x},{y},{z})"))));
                    }
                    if rt.meet(rt.meet(x, y)?, z)? != rt.meet(x, rt.meet(y, z)?)? {
                        return Ok((cases, Some(format!("meet not associative at ({x},{y},{z})"))));
                    }
                }
            }
        }
    }
    for &x in &vs {
        for &y in &vs {
            for &z in &vs {
                let gens = BTreeSet::from([x, y, z]);
                let once = t.generated_subtree(&gens)?;
                let twice = t.generated_subtree(&once.vertices().collect())?;
                if once != twice {
                    return Ok((cases, Some(format!("generated subtree of {gens:?} not idempotent"))));
                }
            }
        }
    }
    Ok((cases, None))
}

/// Level `ℓ ≥ 1` of `A[h]` has `(|A|-1)^(ℓ-1)` vertices (levels counted by
/// height, the root at 0).
pub fn tower_census(max_h: usize) -> CheckOutcome {
    let mut cases = 0;
    for n in [2usize, 3] {
        for alphabet in [RelStructure::constant_only(n), RelStructure::pointed_linear_order(n)] {
            for h in 0..=max_h {
                let t = match build_ah(&alphabet, h) {
                    Ok(t) => t,
                    Err(e) => return CheckOutcome::error("tower-census", &e),
                };
                let rt = t.rooted_tree();
                for level in 1..=h + 1 {
                    cases += 1;
                    let want = (n - 1).pow(level as u32 - 1);
                    let got = rt.level(level).len();
                    if got != want {
                        let cx = format!("|A|={n}, h={h}: level {level} has {got} vertices, expected {want}");
                        return CheckOutcome::from_cases("tower-census", cases, Some(cx));
                    }
                }
                if rt.tree_height() != h + 1 {
                    return CheckOutcome::from_cases(
                        "tower-census",
                        cases,
                        Some(format!("|A|={n}, h={h}: leaves not at height h+1")),
                    );
                }
            }
        }
    }
    CheckOutcome::from_cases("tower-census", cases, None)
}

/// `|Aut(A[h+1])| = |Aut_c(A)| · |Aut(A[h])|^(|A|-1)` by enumeration.
pub fn wreath_law(max_h: usize) -> CheckOutcome {
    let mut cases = 0;
    for n in [2usize, 3] {
        for alphabet in [RelStructure::constant_only(n), RelStructure::pointed_linear_order(n)] {
            let aut_c = alphabet.automorphisms().len();
            let mut counts = Vec::new();
            for h in 0..=max_h + 1 {
                match build_ah(&alphabet, h) {
                    Ok(t) => counts.push(dec_automorphisms(&t).len()),
                    Err(e) => return CheckOutcome::error("wreath-law", &e),
                }
            }
            for h in 0..=max_h {
                cases += 1;
                let want = aut_c * counts[h].pow(n as u32 - 1);
                if counts[h + 1] != want {
                    let cx = format!("{alphabet}: |Aut(A[{}])| = {}, expected {want}", h + 1, counts[h + 1]);
                    return CheckOutcome::from_cases("wreath-law", cases, Some(cx));
                }
            }
        }
    }
    CheckOutcome::from_cases("wreath-law", cases, None)
}

/// Every tower, coloring and order document survives a write/read cycle.
pub fn document_round_trips() -> CheckOutcome {
    let mut cases = 0;
    let mut texts = Vec::new();
    for n in [2usize, 3] {
        for alphabet in [RelStructure::constant_only(n), RelStructure::pointed_linear_order(n)] {
            texts.push(to_text(&alphabet));
            for h in 0..=2 {
                texts.push(to_text(&build_ah(&alphabet, h).expect("valid tower")));
            }
        }
    }
    for t in trees_up_to(4) {
        texts.push(to_text(&t));
        for kappa in all_total_colorings(&t, 3).into_iter().take(4) {
            let ct = ColoredTree::new(t.clone(), None, ColoredTree::numeric_palette(3), None, kappa).expect("injective");
            texts.push(to_text(&ct));
        }
    }
    for text in &texts {
        cases += 1;
        let v: Value = serde_json::from_str(text).expect("own output parses");
        let again = match schema_of(&v) {
            Some(RelStructure::SCHEMA) => from_text::<RelStructure>(text).map(|d| to_text(&d)),
            Some(DecoratedTree::SCHEMA) => from_text::<DecoratedTree>(text).map(|d| to_text(&d)),
            Some(Tree::SCHEMA) => from_text::<Tree>(text).map(|d| to_text(&d)),
            _ => from_text::<ColoredTree>(text).map(|d| to_text(&d)),
        };
        if again.as_deref() != Ok(text.as_str()) {
            return CheckOutcome::from_cases("document-round-trip", cases, Some(text.clone()));
        }
    }
    CheckOutcome::from_cases("document-round-trip", cases, None)
}

/// The cocycle identity for every pair of automorphisms of every totally
/// and injectively colored tree.
pub fn cocycle_identity(max: usize, max_colors: usize) -> CheckOutcome {
    let cases: Vec<(Tree, usize)> =
        trees_up_to(max).into_iter().flat_map(|t| (1..=max_colors).map(move |m| (t.clone(), m))).collect();
    let t = first_failure(&cases, |(t, m)| {
        let auts = t.automorphisms();
        let mut n = 0;
        for kappa in all_total_colorings(t, *m) {
            let ct = ColoredTree::new(t.clone(), None, ColoredTree::numeric_palette(*m), None, kappa)?;
            for g in &auts {
                for h in &auts {
                    n += 1;
                    if let Some(x) = check_cocycle_identity(g, h, &ct)? {
                        return Ok((n, Some(format!("{:?} at vertex {x}", ct.kappa()))));
                    }
                }
            }
        }
        Ok((n, None))
    });
    finish("cocycle-identity", t)
}

/// The incremental CCLO enumeration equals the filter over all permutations.
pub fn cclo_enumeration(max: usize) -> CheckOutcome {
    let t = first_failure(&trees_up_to(max), |t| {
        let fast: Vec<Vec<Vertex>> = enumerate_cclo(t, max)?.iter().map(TreeLinearOrder::sequence).collect();
        let mut slow = Vec::new();
        permutations(&t.vertices().collect::<Vec<_>>(), &mut |p| {
            let o = TreeLinearOrder::from_sequence(t.clone(), p).expect("permutation");
            if is_cclo(&o) {
                slow.push(p.to_vec());
            }
        });
        slow.sort();
        let cx = (fast != slow).then(|| format!("{:?}: {} enumerated, {} by filter", t.edges(), fast.len(), slow.len()));
        Ok((1, cx))
    });
    finish("cclo-enumeration", t)
}

fn permutations(items: &[Vertex], f: &mut impl FnMut(&[Vertex])) {
    fn go(cur: &mut Vec<Vertex>, rest: &mut Vec<Vertex>, f: &mut impl FnMut(&[Vertex])) {
        if rest.is_empty() {
            f(cur);
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            cur.push(v);
            go(cur, rest, f);
            cur.pop();
            rest.insert(i, v);
        }
    }
    go(&mut Vec::new(), &mut items.to_vec(), f);
}

/// Neither five-point pattern occurs in any CCLO.
pub fn five_point_lemmas(max: usize) -> CheckOutcome {
    let t = first_failure(&trees_up_to(max), |t| {
        let orders = enumerate_cclo(t, max)?;
        for o in &orders {
            if let Some(w) = five_point_one_witness(o) {
                return Ok((orders.len() as u64, Some(format!("first lemma fails on {:?} at {w:?}", o.sequence()))));
            }
            if let Some(w) = five_point_two_witness(o) {
                return Ok((orders.len() as u64, Some(format!("second lemma fails on {:?} at {w:?}", o.sequence()))));
            }
        }
        Ok((orders.len() as u64, None))
    });
    finish("five-point-lemmas", t)
}

/// `π(realize(o))` restricted to the tree gives back `o`.
pub fn pi_round_trip(max: usize) -> CheckOutcome {
    let t = first_failure(&trees_up_to(max), |t| {
        let orders = enumerate_cclo(t, max)?;
        let vs: BTreeSet<Vertex> = t.vertices().collect();
        for o in &orders {
            let back = pi_order(&realize_cclo(t, o)?)?;
            if back.restricted_sequence(&vs) != o.sequence() {
                return Ok((orders.len() as u64, Some(format!("{:?} came back as {:?}", o.sequence(), back.sequence()))));
            }
        }
        Ok((orders.len() as u64, None))
    });
    finish("pi-round-trip", t)
}

/// Both collapse configurations differ but their π-orders agree on the tree.
pub fn collapse_pairs(max: usize) -> CheckOutcome {
    let t = first_failure(&trees_up_to(max), |t| {
        let vs: BTreeSet<Vertex> = t.vertices().collect();
        let mut n = 0;
        for (x, y) in t.edges() {
            for (x0, x1) in [(x, y), (y, x)] {
                n += 1;
                let (q1, q2) = collapse_pair(t, x0, x1)?;
                let (p1, p2) = (pi_order(&q1)?, pi_order(&q2)?);
                if q1 == q2 || p1.restricted_sequence(&vs) != p2.restricted_sequence(&vs) {
                    return Ok((n, Some(format!("pair ({x0},{x1}) on {:?}", t.edges()))));
                }
            }
        }
        Ok((n, None))
    });
    finish("collapse-pairs", t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_battery_passes() {
        let cfg = SuiteConfig { max_size: 4, ..Default::default() };
        let r = run_suite(None, &cfg, &["suite".into()]).unwrap();
        assert!(r.passed, "{:#?}", r.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
        assert_eq!(r.checks.len(), BATTERY.len());
        let back: RunReport = from_text(&to_text(&r)).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn corrupted_coloring_is_caught() {
        let kappa = BTreeMap::from([
            (crate::tree::Component::new(0, 1), 0),
            (crate::tree::Component::new(1, 0), 0),
            (crate::tree::Component::new(1, 2), 0),
            (crate::tree::Component::new(2, 1), 1),
        ]);
        let ct = ColoredTree::new_unchecked(Tree::path(3), None, ColoredTree::numeric_palette(2), None, kappa).unwrap();
        let out = check_corpus_file(to_text(&ct).as_bytes(), 1000);
        assert!(!out.passed);
        assert!(out.counterexample.unwrap().contains("vertex 1"));
    }

    #[test]
    fn unknown_documents_fail() {
        assert!(!check_corpus_file(b"{\"schema\": \"nope\"}", 10).passed);
        assert!(!check_corpus_file(b"[1, 2", 10).passed);
    }
}
