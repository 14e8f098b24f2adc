//! The `kaleido` command line.
//!
//! Verdict-style commands exit with 0 when the property holds, 1 when it
//! fails and 2 on errors or inconclusive searches.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::cclo::{
    collapse_pair, convex_witness, converging_witness, enumerate_cclo, is_convex_duchesne, pi_order, realize_cclo,
    OrderedConfiguration, TreeLinearOrder, DEFAULT_VERTEX_BOUND,
};
use crate::decorated::{build_ah, dec_automorphisms, dec_embeddings, DecEmbedding, DecoratedTree};
use crate::error::{Error, Result};
use crate::io::{read_doc, to_text, ChainFile, Document, RankFile};
use crate::ramsey::{
    decide_arrow, deuber_explore, find_mono_copy, is_monochromatic, proof_follow_mono, witness_search,
    AlphabetFamily, ArrowInstance, ColoringAssignment, CopyIndex, WitnessBounds,
};
use crate::relstruct::RelStructure;
use crate::suite::{run_suite, SuiteConfig};
use crate::tree::Tree;

pub const DEFAULT_SEED: u64 = 0x6b61_6c65;
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Parser, Debug)]
#[command(name = "kaleido", version, about = "Decorated trees, partition arrows and convex converging orders")]
pub struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "KALEIDO_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Search-node budget for arrow decisions.
    #[arg(long, global = true, env = "KALEIDO_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Write the output document here instead of stdout.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the regular tower A[h].
    Gen {
        #[arg(long)]
        alphabet: PathBuf,
        #[arg(long)]
        height: usize,
    },
    /// Decide C → (B)^k_A.
    Arrow {
        #[arg(long)]
        c: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        rooted: bool,
    },
    /// Run the invariant battery and every corpus document.
    Suite {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        /// Add per-check wall-clock times (makes reports run-dependent).
        #[arg(long)]
        timing: bool,
    },
    /// Embeddings of S into T.
    Emb {
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        t: PathBuf,
        #[arg(long)]
        rooted: bool,
        /// List every embedding, not just the count.
        #[arg(long)]
        list: bool,
    },
    /// Automorphisms of a decorated tree.
    Aut {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        list: bool,
    },
    /// Search towers D[m] of a family for T → (B)^k_A.
    Witness {
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        rooted: bool,
        #[arg(long, value_enum, default_value_t = Family::Order)]
        family: Family,
        #[arg(long, default_value_t = 3)]
        max_alphabet: usize,
        #[arg(long, default_value_t = 64)]
        max_vertices: usize,
    },
    /// Find a monochromatic copy of B in T under a coloring of the A-copies.
    Mono(MonoArgs),
    /// Least m with B[m] → (B[h])^k_{B[0]}.
    Deuber {
        #[arg(long)]
        alphabet: PathBuf,
        #[arg(long, default_value_t = 1)]
        h: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        max_m: usize,
    },
    /// Every convex converging order on a tree.
    CcloEnum {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, default_value_t = DEFAULT_VERTEX_BOUND)]
        max_size: usize,
    },
    /// Check an order for convergence and convexity.
    CcloCheck {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        order: PathBuf,
    },
    /// The order π of an ordered configuration.
    Pi {
        #[arg(long)]
        config: PathBuf,
    },
    /// A configuration whose π restricts to the given order.
    Realize {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        order: PathBuf,
    },
    /// Two configurations with the same π-order on the tree.
    Collapse {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        x0: u32,
        #[arg(long)]
        x1: u32,
    },
}

#[derive(Args, Debug)]
pub struct MonoArgs {
    /// Target tree T (ignored with --follow-proof, where T = C_0[n_0]).
    #[arg(long)]
    t: Option<PathBuf>,
    #[arg(long)]
    b: PathBuf,
    /// Colored structure A (plain search).
    #[arg(long)]
    a: Option<PathBuf>,
    /// Coloring of the A-copies; random from --seed when absent.
    #[arg(long)]
    coloring: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long)]
    rooted: bool,
    /// Follow the inductive construction along a chain file.
    #[arg(long, requires_all = ["chain", "alphabet", "ell"])]
    follow_proof: bool,
    #[arg(long)]
    chain: Option<PathBuf>,
    /// Alphabet A of the colored A[ℓ] (with --follow-proof).
    #[arg(long)]
    alphabet: Option<PathBuf>,
    #[arg(long)]
    ell: Option<usize>,
    /// Fall back to plain search if a sub-arrow fails.
    #[arg(long)]
    fallback: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Constant,
    Order,
}

/// What a command produced: a document and an exit code.
struct Outcome {
    text: String,
    code: i32,
}

impl Outcome {
    fn doc<D: Document>(d: &D, code: i32) -> Self {
        Outcome { text: to_text(d), code }
    }

    fn value(v: Value, code: i32) -> Self {
        let mut text = serde_json::to_string_pretty(&v).expect("values serialize");
        text.push('\n');
        Outcome { text, code }
    }
}

/// Parses `args`, runs the command and returns the exit code. Output goes to
/// `stdout` (or `--out`), diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 2;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    };
    let result = pool.install(|| execute(&cli));
    match result {
        Ok(out) => {
            let written = match &cli.out {
                Some(p) => std::fs::write(p, &out.text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
                None => stdout.write_all(out.text.as_bytes()).map_err(|e| Error::Io(e.to_string())),
            };
            match written {
                Ok(()) => out.code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    2
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

fn embedding_json(e: &DecEmbedding) -> Value {
    json!(e.map.iter().map(|(k, v)| [*k, *v]).collect::<Vec<_>>())
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let budget = cli.budget;
    match &cli.command {
        Command::Gen { alphabet, height } => {
            let a: RelStructure = read_doc(alphabet)?;
            Ok(Outcome::doc(&build_ah(&a, *height)?, 0))
        }
        Command::Arrow { c, b, a, k, rooted } => {
            let inst = ArrowInstance { c: read_doc(c)?, b: read_doc(b)?, a: read_doc(a)?, k: *k, rooted: *rooted };
            let v = decide_arrow(&inst, budget)?;
            let code = if v.holds { 0 } else { 1 };
            Ok(Outcome::doc(&v, code))
        }
        Command::Suite { corpus, max_size, timing } => {
            let cfg = SuiteConfig { max_size: *max_size, budget, timing: *timing };
            // echo the effective settings only; thread count and output path
            // must not change the report
            let mut echo = vec!["suite".to_string()];
            if let Some(c) = corpus {
                echo.extend(["--corpus".into(), c.display().to_string()]);
            }
            echo.extend(["--max-size".into(), max_size.to_string(), "--budget".into(), budget.to_string()]);
            let report = run_suite(corpus.as_deref(), &cfg, &echo)?;
            let code = if report.passed { 0 } else { 1 };
            Ok(Outcome::doc(&report, code))
        }
        Command::Emb { s, t, rooted, list } => {
            let (s, t): (DecoratedTree, DecoratedTree) = (read_doc(s)?, read_doc(t)?);
            let embs = dec_embeddings(&s, &t, *rooted)?;
            let mut v = json!({"schema": "kaleido/embeddings/1", "rooted": rooted, "count": embs.len()});
            if *list {
                v["embeddings"] = embs.iter().map(embedding_json).collect();
            }
            Ok(Outcome::value(v, 0))
        }
        Command::Aut { tree, list } => {
            let t: DecoratedTree = read_doc(tree)?;
            let auts = dec_automorphisms(&t);
            let mut v = json!({"schema": "kaleido/automorphisms/1", "count": auts.len()});
            if *list {
                v["automorphisms"] = auts.iter().map(embedding_json).collect();
            }
            Ok(Outcome::value(v, 0))
        }
        Command::Witness { b, a, k, rooted, family, max_alphabet, max_vertices } => {
            let (b, a): (DecoratedTree, DecoratedTree) = (read_doc(b)?, read_doc(a)?);
            let family = match family {
                Family::Constant => AlphabetFamily::ConstantOnly,
                Family::Order => AlphabetFamily::PointedLinearOrder,
            };
            let bounds = WitnessBounds {
                max_alphabet: *max_alphabet,
                max_vertices: *max_vertices,
                budget,
                ..WitnessBounds::default()
            };
            let w = witness_search(&b, &a, *k, *rooted, &family, &bounds)?;
            let v = json!({
                "schema": "kaleido/witness/1",
                "alphabet": w.alphabet.to_value(),
                "m": w.m,
                "vertices": w.tree.len(),
                "skipped": w.skipped,
                "nodes": w.nodes,
                "verdict": w.verdict.to_value(),
                "tree": w.tree.to_value(),
            });
            Ok(Outcome::value(v, 0))
        }
        Command::Mono(m) => mono(m, cli.seed),
        Command::Deuber { alphabet, h, k, max_m } => {
            let b: RelStructure = read_doc(alphabet)?;
            let report = deuber_explore(&b, *h, *k, *max_m, budget)?;
            let mut v = serde_json::to_value(&report).expect("reports serialize");
            v["schema"] = json!("kaleido/deuber/1");
            v["relation"] = json!(match report.minimal_m.cmp(&report.predicted) {
                std::cmp::Ordering::Less => "below 2h-1",
                std::cmp::Ordering::Equal => "equals 2h-1",
                std::cmp::Ordering::Greater => "exceeds 2h-1",
            });
            Ok(Outcome::value(v, 0))
        }
        Command::CcloEnum { tree, max_size } => {
            let t: Tree = read_doc(tree)?;
            let orders = enumerate_cclo(&t, *max_size)?;
            let v = json!({
                "schema": "kaleido/orders/1",
                "count": orders.len(),
                "orders": orders.iter().map(|o| json!({"ranks": o.ranks()})).collect::<Vec<_>>(),
            });
            Ok(Outcome::value(v, 0))
        }
        Command::CcloCheck { tree, order } => {
            let o = read_order(tree, order)?;
            let converging = converging_witness(&o);
            let convex = convex_witness(&o)?;
            let ok = converging.is_none() && convex.is_none();
            let v = json!({
                "schema": "kaleido/cclo-check/1",
                "converging": converging.is_none(),
                "convex": convex.is_none(),
                "cclo": ok,
                "converging_witness": converging,
                "convex_witness": convex,
                "duchesne_convex": is_convex_duchesne(&o)?,
            });
            Ok(Outcome::value(v, if ok { 0 } else { 1 }))
        }
        Command::Pi { config } => {
            let cfg = OrderedConfiguration::from_decorated(read_doc(config)?)?;
            let o = pi_order(&cfg)?;
            Ok(Outcome::doc(&RankFile { ranks: o.ranks().clone() }, 0))
        }
        Command::Realize { tree, order } => {
            let o = read_order(tree, order)?;
            let cfg = realize_cclo(o.tree(), &o)?;
            Ok(Outcome::doc(cfg.decorated(), 0))
        }
        Command::Collapse { tree, x0, x1 } => {
            let t: Tree = read_doc(tree)?;
            let (q1, q2) = collapse_pair(&t, *x0, *x1)?;
            let (p1, p2) = (pi_order(&q1)?, pi_order(&q2)?);
            let vs = t.vertices().collect();
            let agree = p1.restricted_sequence(&vs) == p2.restricted_sequence(&vs);
            let v = json!({
                "schema": "kaleido/collapse/1",
                "orders_agree": agree,
                "rho_toward_x1": [q1.rho_points_toward(*x0, *x1)?, q2.rho_points_toward(*x0, *x1)?],
                "order": p1.restricted_sequence(&vs),
                "first": q1.decorated().to_value(),
                "second": q2.decorated().to_value(),
            });
            Ok(Outcome::value(v, if agree { 0 } else { 1 }))
        }
    }
}

fn read_order(tree: &Path, order: &Path) -> Result<TreeLinearOrder> {
    let t: Tree = read_doc(tree)?;
    let ranks: RankFile = read_doc(order)?;
    TreeLinearOrder::from_ranks(t, ranks.ranks)
}

fn load_coloring(path: Option<&Path>, k: usize, n: usize, seed: u64) -> Result<ColoringAssignment> {
    match path {
        Some(p) => read_doc(p),
        None => Ok(ColoringAssignment::random(k, n, &mut ChaCha8Rng::seed_from_u64(seed))),
    }
}

fn mono(m: &MonoArgs, seed: u64) -> Result<Outcome> {
    let b: DecoratedTree = read_doc(&m.b)?;
    if m.follow_proof {
        let chain: ChainFile = read_doc(m.chain.as_deref().expect("required by clap"))?;
        let alphabet: RelStructure = read_doc(m.alphabet.as_deref().expect("required by clap"))?;
        let ell = m.ell.expect("required by clap");
        let (c0, n0) = chain.links.first().ok_or_else(|| Error::MalformedStructure("empty chain".into()))?;
        let t = build_ah(c0, *n0)?;
        let al = build_ah(&alphabet, ell)?;
        let index = CopyIndex::new(&al, &t, false)?;
        let gamma = load_coloring(m.coloring.as_deref(), m.k, index.len(), seed)?;
        let trace = proof_follow_mono(&chain.links, &gamma, &b, &alphabet, ell, m.fallback)?;
        let verified = is_monochromatic(&trace.copy, &b, &al, &index, &gamma, false)?;
        let v = json!({
            "schema": "kaleido/mono/1",
            "copy": embedding_json(&trace.copy),
            "verified": verified,
            "used_fallback": trace.used_fallback,
            "s": trace.s,
            "delta": trace.delta,
        });
        return Ok(Outcome::value(v, if verified { 0 } else { 1 }));
    }
    let t: DecoratedTree = read_doc(m.t.as_deref().ok_or_else(|| Error::Parse("--t is required".into()))?)?;
    let a: DecoratedTree = read_doc(m.a.as_deref().ok_or_else(|| Error::Parse("--a is required".into()))?)?;
    let index = CopyIndex::new(&a, &t, m.rooted)?;
    let gamma = load_coloring(m.coloring.as_deref(), m.k, index.len(), seed)?;
    match find_mono_copy(&t, &b, &a, &gamma, m.rooted) {
        Ok(copy) => {
            let verified = is_monochromatic(&copy, &b, &a, &index, &gamma, m.rooted)?;
            let v = json!({"schema": "kaleido/mono/1", "copy": embedding_json(&copy), "verified": verified});
            Ok(Outcome::value(v, if verified { 0 } else { 1 }))
        }
        Err(Error::SearchExhausted) => {
            let v = json!({"schema": "kaleido/mono/1", "copy": null, "coloring": gamma.to_value()});
            Ok(Outcome::value(v, 1))
        }
        Err(e) => Err(e),
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
