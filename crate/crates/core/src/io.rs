//! Text documents for every artifact the command line reads or writes.
//!
//! Each document is a JSON object with a `"schema"` field naming its kind and
//! version, e.g. `"kaleido/tree/1"`. Parsing rejects a missing or different
//! schema tag.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::coloring::{Color, ColoredTree};
use crate::decorated::DecoratedTree;
use crate::error::{Error, Result};
use crate::ramsey::{ArrowInstance, ArrowVerdict, ChainLink, ColoringAssignment};
use crate::relstruct::{Elem, RelStructure, Signature};
use crate::tree::{Component, RootedTree, Tree, Vertex};

/// A value with a versioned text form.
pub trait Document: Sized {
    /// Schema tag written to and expected in the `"schema"` field.
    const SCHEMA: &'static str;

    fn to_value(&self) -> Value;
    fn from_value(v: Value) -> Result<Self>;
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_text<D: Document>(d: &D) -> String {
    let mut s = serde_json::to_string_pretty(&d.to_value()).expect("documents serialize");
    s.push('\n');
    s
}

pub fn from_text<D: Document>(text: &str) -> Result<D> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    D::from_value(v)
}

pub fn read_doc<D: Document>(path: &Path) -> Result<D> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    from_text(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn write_doc<D: Document>(path: &Path, d: &D) -> Result<()> {
    std::fs::write(path, to_text(d)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Reads the `"schema"` tag of an arbitrary document.
pub fn schema_of(v: &Value) -> Option<&str> {
    v.get("schema").and_then(Value::as_str)
}

fn tagged<T: Serialize>(schema: &str, body: &T) -> Value {
    let mut v = serde_json::to_value(body).expect("documents serialize");
    let obj = v.as_object_mut().expect("document bodies are objects");
    let mut out = serde_json::Map::new();
    out.insert("schema".into(), Value::String(schema.into()));
    out.append(obj);
    Value::Object(out)
}

fn untag<T: DeserializeOwned>(schema: &str, mut v: Value) -> Result<T> {
    let obj = v.as_object_mut().ok_or_else(|| Error::Parse("document must be an object".into()))?;
    match obj.remove("schema") {
        Some(Value::String(s)) if s == schema => {}
        Some(other) => return Err(Error::Parse(format!("expected schema {schema}, found {other}"))),
        None => return Err(Error::Parse(format!("missing schema field (expected {schema})"))),
    }
    serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Serialize, Deserialize)]
struct TreeDoc {
    vertices: Vec<Vertex>,
    edges: Vec<(Vertex, Vertex)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root: Option<Vertex>,
}

impl TreeDoc {
    fn of(t: &Tree, root: Option<Vertex>) -> Self {
        TreeDoc { vertices: t.vertices().collect(), edges: t.edges(), root }
    }

    fn tree(&self) -> Result<Tree> {
        Tree::new(self.vertices.iter().copied(), &self.edges)
    }
}

impl Document for Tree {
    const SCHEMA: &'static str = "kaleido/tree/1";

    fn to_value(&self) -> Value {
        tagged(Self::SCHEMA, &TreeDoc::of(self, None))
    }

    /// A `"root"` field, if present, is ignored.
    fn from_value(v: Value) -> Result<Self> {
        untag::<TreeDoc>(Self::SCHEMA, v)?.tree()
    }
}

impl Document for RootedTree {
    const SCHEMA: &'static str = Tree::SCHEMA;

    fn to_value(&self) -> Value {
        tagged(Self::SCHEMA, &TreeDoc::of(self.tree(), Some(self.root())))
    }

    fn from_value(v: Value) -> Result<Self> {
        let doc: TreeDoc = untag(Self::SCHEMA, v)?;
        let root = doc.root.ok_or_else(|| Error::Parse("rooted tree needs a root".into()))?;
        RootedTree::new(doc.tree()?, root)
    }
}

#[derive(Serialize, Deserialize)]
struct SignatureDoc {
    relations: Vec<(String, usize)>,
    constant: bool,
}

impl SignatureDoc {
    fn of(s: &Signature) -> Self {
        SignatureDoc { relations: s.relations().to_vec(), constant: s.has_constant() }
    }

    fn signature(&self) -> Result<Signature> {
        Signature::new(self.relations.clone(), self.constant)
    }
}

#[derive(Serialize, Deserialize)]
struct StructureDoc {
    signature: SignatureDoc,
    universe: Vec<Elem>,
    #[serde(default)]
    relations: BTreeMap<String, Vec<Vec<Elem>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constant: Option<Elem>,
}

impl StructureDoc {
    fn of(s: &RelStructure) -> Self {
        StructureDoc {
            signature: SignatureDoc::of(s.signature()),
            universe: s.universe().iter().copied().collect(),
            relations: s.relations().iter().map(|(k, ts)| (k.clone(), ts.iter().cloned().collect())).collect(),
            constant: s.constant(),
        }
    }

    fn structure(self) -> Result<RelStructure> {
        let relations = self.relations.into_iter().map(|(k, ts)| (k, ts.into_iter().collect())).collect();
        RelStructure::new(self.signature.signature()?, self.universe, relations, self.constant)
    }
}

impl Document for RelStructure {
    const SCHEMA: &'static str = "kaleido/structure/1";

    fn to_value(&self) -> Value {
        tagged(Self::SCHEMA, &StructureDoc::of(self))
    }

    fn from_value(v: Value) -> Result<Self> {
        untag::<StructureDoc>(Self::SCHEMA, v)?.structure()
    }
}

/// A component label inside a decoration: a neighbor id or the word `parent`.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(untagged)]
enum Label {
    Id(Vertex),
    Word(String),
}

impl Label {
    fn write(n: Vertex, parent: Vertex) -> Label {
        if n == parent {
            Label::Word("parent".into())
        } else {
            Label::Id(n)
        }
    }

    fn read(&self, parent: Vertex) -> Result<Vertex> {
        match self {
            Label::Id(n) => Ok(*n),
            Label::Word(w) if w == "parent" => Ok(parent),
            Label::Word(w) => Err(Error::Parse(format!("unknown component label {w:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct DecorationDoc {
    universe: Vec<Label>,
    #[serde(default)]
    relations: BTreeMap<String, Vec<Vec<Label>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constant: Option<Label>,
}

#[derive(Serialize, Deserialize)]
struct DecoratedDoc {
    vertices: Vec<Vertex>,
    edges: Vec<(Vertex, Vertex)>,
    root: Vertex,
    signature: SignatureDoc,
    #[serde(default)]
    decorations: BTreeMap<Vertex, DecorationDoc>,
}

impl Document for DecoratedTree {
    const SCHEMA: &'static str = "kaleido/decorated/1";

    /// Leaves whose decoration is the bare one-point structure are omitted.
    fn to_value(&self) -> Value {
        let rt = self.rooted_tree();
        let mut decorations = BTreeMap::new();
        for (&v, d) in self.decorations() {
            let parent = rt.parent(v).expect("decorated vertices have parents");
            let trivial = d.len() == 1 && d.relations().values().all(BTreeSet::is_empty);
            if rt.is_leaf(v) && trivial {
                continue;
            }
            let lab = |n: &Elem| Label::write(*n, parent);
            decorations.insert(
                v,
                DecorationDoc {
                    universe: d.universe().iter().map(lab).collect(),
                    relations: d
                        .relations()
                        .iter()
                        .map(|(k, ts)| (k.clone(), ts.iter().map(|t| t.iter().map(lab).collect()).collect()))
                        .collect(),
                    constant: d.constant().map(|c| lab(&c)),
                },
            );
        }
        let doc = DecoratedDoc {
            vertices: self.tree().vertices().collect(),
            edges: self.tree().edges(),
            root: self.root(),
            signature: SignatureDoc::of(self.signature()),
            decorations,
        };
        tagged(Self::SCHEMA, &doc)
    }

    /// A decoration without a `"constant"` gets the parent component.
    fn from_value(v: Value) -> Result<Self> {
        let doc: DecoratedDoc = untag(Self::SCHEMA, v)?;
        let rt = RootedTree::new(Tree::new(doc.vertices.iter().copied(), &doc.edges)?, doc.root)?;
        let signature = doc.signature.signature()?;
        let mut decorations = BTreeMap::new();
        for (v, d) in doc.decorations {
            let parent = rt.parent(v).ok_or_else(|| Error::MalformedDecoration {
                vertex: v,
                reason: "the root carries no decoration".into(),
            })?;
            let read = |ls: &[Label]| ls.iter().map(|l| l.read(parent)).collect::<Result<Vec<_>>>();
            let mut relations = BTreeMap::new();
            for (k, ts) in &d.relations {
                let tuples: BTreeSet<Vec<Elem>> = ts.iter().map(|t| read(t)).collect::<Result<_>>()?;
                relations.insert(k.clone(), tuples);
            }
            let constant = match &d.constant {
                Some(l) => l.read(parent)?,
                None => parent,
            };
            let dec = RelStructure::new(signature.clone(), read(&d.universe)?, relations, Some(constant))
                .map_err(|e| Error::MalformedDecoration { vertex: v, reason: e.to_string() })?;
            decorations.insert(v, dec);
        }
        DecoratedTree::new(rt, signature, decorations)
    }
}

#[derive(Serialize, Deserialize)]
struct ColoringDoc {
    vertices: Vec<Vertex>,
    edges: Vec<(Vertex, Vertex)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root: Option<Vertex>,
    palette: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constant: Option<String>,
    colors: Vec<(Vertex, Vertex, String)>,
}

impl Document for ColoredTree {
    const SCHEMA: &'static str = "kaleido/coloring/1";

    fn to_value(&self) -> Value {
        let pal = self.palette();
        let doc = ColoringDoc {
            vertices: self.tree().vertices().collect(),
            edges: self.tree().edges(),
            root: self.root(),
            palette: pal.to_vec(),
            constant: self.constant().map(|c| pal[c].clone()),
            colors: self.kappa().iter().map(|(c, &m)| (c.anchor, c.direction, pal[m].clone())).collect(),
        };
        tagged(Self::SCHEMA, &doc)
    }

    /// Injectivity is not enforced here so that corrupted data can be loaded
    /// and diagnosed; use [`ColoredTree::injectivity_violation`].
    fn from_value(v: Value) -> Result<Self> {
        let doc: ColoringDoc = untag(Self::SCHEMA, v)?;
        let tree = Tree::new(doc.vertices.iter().copied(), &doc.edges)?;
        let index: BTreeMap<&str, Color> = doc.palette.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let color = |s: &str| {
            index.get(s).copied().ok_or_else(|| Error::InvalidColoring(format!("symbol {s:?} not in palette")))
        };
        let constant = doc.constant.as_deref().map(color).transpose()?;
        let mut kappa = BTreeMap::new();
        for (x, n, s) in &doc.colors {
            if kappa.insert(Component::new(*x, *n), color(s)?).is_some() {
                return Err(Error::InvalidColoring(format!("component ({x}, {n}) colored twice")));
            }
        }
        ColoredTree::new_unchecked(tree, doc.root, doc.palette.clone(), constant, kappa)
    }
}

impl Document for ColoringAssignment {
    const SCHEMA: &'static str = "kaleido/assignment/1";

    fn to_value(&self) -> Value {
        tagged(Self::SCHEMA, self)
    }

    fn from_value(v: Value) -> Result<Self> {
        let raw: ColoringAssignment = untag(Self::SCHEMA, v)?;
        ColoringAssignment::new(raw.k, raw.colors)
    }
}

impl Document for ArrowVerdict {
    const SCHEMA: &'static str = "kaleido/verdict/1";

    fn to_value(&self) -> Value {
        tagged(Self::SCHEMA, self)
    }

    fn from_value(v: Value) -> Result<Self> {
        untag(Self::SCHEMA, v)
    }
}

/// Ranks of a linear order on tree vertices (0 is least).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankFile {
    pub ranks: BTreeMap<Vertex, usize>,
}

impl Document for RankFile {
    const SCHEMA: &'static str = "kaleido/order/1";

    fn to_value(&self) -> Value {
        tagged(Self::SCHEMA, self)
    }

    fn from_value(v: Value) -> Result<Self> {
        untag(Self::SCHEMA, v)
    }
}

/// A chain `(C_0, n_0), ..., (C_h, n_h)` of alphabets and heights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainFile {
    pub links: Vec<ChainLink>,
}

#[derive(Serialize, Deserialize)]
struct LinkDoc {
    alphabet: StructureDoc,
    height: usize,
}

#[derive(Serialize, Deserialize)]
struct ChainDoc {
    links: Vec<LinkDoc>,
}

impl Document for ChainFile {
    const SCHEMA: &'static str = "kaleido/chain/1";

    fn to_value(&self) -> Value {
        let links = self.links.iter().map(|(a, n)| LinkDoc { alphabet: StructureDoc::of(a), height: *n }).collect();
        tagged(Self::SCHEMA, &ChainDoc { links })
    }

    fn from_value(v: Value) -> Result<Self> {
        let doc: ChainDoc = untag(Self::SCHEMA, v)?;
        let links = doc
            .links
            .into_iter()
            .map(|l| Ok((l.alphabet.structure()?, l.height)))
            .collect::<Result<_>>()?;
        Ok(ChainFile { links })
    }
}

/// An arrow instance `C → (B)^k_A` with an optional expected verdict.
#[derive(Debug, Clone)]
pub struct ArrowCase {
    pub instance: ArrowInstance,
    pub expect: Option<bool>,
}

#[derive(Serialize, Deserialize)]
struct ArrowDoc {
    k: usize,
    rooted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expect: Option<bool>,
    c: Value,
    b: Value,
    a: Value,
}

impl Document for ArrowCase {
    const SCHEMA: &'static str = "kaleido/arrow/1";

    fn to_value(&self) -> Value {
        let i = &self.instance;
        let doc = ArrowDoc {
            k: i.k,
            rooted: i.rooted,
            expect: self.expect,
            c: i.c.to_value(),
            b: i.b.to_value(),
            a: i.a.to_value(),
        };
        tagged(Self::SCHEMA, &doc)
    }

    fn from_value(v: Value) -> Result<Self> {
        let doc: ArrowDoc = untag(Self::SCHEMA, v)?;
        let instance = ArrowInstance {
            c: DecoratedTree::from_value(doc.c)?,
            b: DecoratedTree::from_value(doc.b)?,
            a: DecoratedTree::from_value(doc.a)?,
            k: doc.k,
            rooted: doc.rooted,
        };
        Ok(ArrowCase { instance, expect: doc.expect })
    }
}
