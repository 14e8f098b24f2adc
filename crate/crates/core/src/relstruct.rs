//! Finite relational structures with an optional constant, used as decoration
//! alphabets for decorated trees.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Element identifier, local to one structure.
pub type Elem = u32;

/// An explicit element map between two structures.
pub type ElemMap = BTreeMap<Elem, Elem>;

/// Relation symbols with arities, plus whether the constant symbol `c` is present.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    relations: Vec<(String, usize)>,
    has_constant: bool,
}

impl Signature {
    pub fn new(relations: Vec<(String, usize)>, has_constant: bool) -> Result<Self> {
        let mut names = BTreeSet::new();
        for (name, arity) in &relations {
            if *arity == 0 {
                return Err(Error::MalformedStructure(format!("relation {name} has arity 0")));
            }
            if !names.insert(name.as_str()) {
                return Err(Error::MalformedStructure(format!("duplicate relation {name}")));
            }
        }
        Ok(Signature { relations, has_constant })
    }

    /// Signature with only the constant symbol.
    pub fn constant_only() -> Self {
        Signature { relations: Vec::new(), has_constant: true }
    }

    /// One binary relation `lt` plus the constant.
    pub fn pointed_order() -> Self {
        Signature { relations: vec![(ORDER_RELATION.to_string(), 2)], has_constant: true }
    }

    pub fn relations(&self) -> &[(String, usize)] {
        &self.relations
    }

    pub fn has_constant(&self) -> bool {
        self.has_constant
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.relations.iter().find(|(n, _)| n == name).map(|(_, a)| *a)
    }
}

/// Name of the order relation in the pointed linear order preset.
pub const ORDER_RELATION: &str = "lt";

/// A finite relational structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelStructure {
    signature: Signature,
    universe: BTreeSet<Elem>,
    relations: BTreeMap<String, BTreeSet<Vec<Elem>>>,
    constant: Option<Elem>,
}

impl RelStructure {
    pub fn new(
        signature: Signature,
        universe: impl IntoIterator<Item = Elem>,
        relations: BTreeMap<String, BTreeSet<Vec<Elem>>>,
        constant: Option<Elem>,
    ) -> Result<Self> {
        let universe: BTreeSet<Elem> = universe.into_iter().collect();
        for (name, tuples) in &relations {
            let arity = signature
                .arity(name)
                .ok_or_else(|| Error::MalformedStructure(format!("relation {name} not in signature")))?;
            for t in tuples {
                if t.len() != arity {
                    return Err(Error::MalformedStructure(format!(
                        "tuple {t:?} of {name} has length {}, arity is {arity}",
                        t.len()
                    )));
                }
                if let Some(e) = t.iter().find(|e| !universe.contains(e)) {
                    return Err(Error::MalformedStructure(format!("element {e} of {name} not in universe")));
                }
            }
        }
        match (signature.has_constant, constant) {
            (true, None) => return Err(Error::MalformedStructure("constant missing".into())),
            (false, Some(_)) => return Err(Error::MalformedStructure("signature has no constant".into())),
            (true, Some(c)) if !universe.contains(&c) => {
                return Err(Error::MalformedStructure(format!("constant {c} not in universe")))
            }
            _ => {}
        }
        let mut relations = relations;
        for (name, _) in &signature.relations {
            relations.entry(name.clone()).or_default();
        }
        Ok(RelStructure { signature, universe, relations, constant })
    }

    /// `{0, ..., n-1}` with no relations and constant `0`.
    pub fn constant_only(n: usize) -> Self {
        assert!(n >= 1);
        RelStructure::new(Signature::constant_only(), 0..n as Elem, BTreeMap::new(), Some(0))
            .expect("valid preset")
    }

    /// The linear order `0 < 1 < ... < n-1` with the least element as constant.
    pub fn pointed_linear_order(n: usize) -> Self {
        assert!(n >= 1);
        let n = n as Elem;
        let lt: BTreeSet<Vec<Elem>> = (0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])).collect();
        RelStructure::new(
            Signature::pointed_order(),
            0..n,
            BTreeMap::from([(ORDER_RELATION.to_string(), lt)]),
            Some(0),
        )
        .expect("valid preset")
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn universe(&self) -> &BTreeSet<Elem> {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn constant(&self) -> Option<Elem> {
        self.constant
    }

    pub fn relations(&self) -> &BTreeMap<String, BTreeSet<Vec<Elem>>> {
        &self.relations
    }

    pub fn tuples(&self, name: &str) -> impl Iterator<Item = &Vec<Elem>> {
        self.relations.get(name).into_iter().flatten()
    }

    pub fn holds(&self, name: &str, tuple: &[Elem]) -> bool {
        self.relations.get(name).is_some_and(|ts| ts.contains(tuple))
    }

    /// The induced substructure on `subset` (which must contain the constant).
    pub fn restrict(&self, subset: &BTreeSet<Elem>) -> Result<RelStructure> {
        let relations = self
            .relations
            .iter()
            .map(|(n, ts)| {
                let kept = ts.iter().filter(|t| t.iter().all(|e| subset.contains(e))).cloned().collect();
                (n.clone(), kept)
            })
            .collect();
        RelStructure::new(self.signature.clone(), subset.iter().copied(), relations, self.constant)
    }

    /// Transports the structure along an injective relabeling.
    pub fn relabel(&self, f: &ElemMap) -> Result<RelStructure> {
        let image = |e: &Elem| {
            f.get(e).copied().ok_or_else(|| Error::MalformedStructure(format!("relabeling misses {e}")))
        };
        let universe: BTreeSet<Elem> = self.universe.iter().map(image).collect::<Result<_>>()?;
        if universe.len() != self.universe.len() {
            return Err(Error::MalformedStructure("relabeling is not injective".into()));
        }
        let mut relations = BTreeMap::new();
        for (n, ts) in &self.relations {
            let mapped = ts
                .iter()
                .map(|t| t.iter().map(image).collect::<Result<Vec<_>>>())
                .collect::<Result<BTreeSet<_>>>()?;
            relations.insert(n.clone(), mapped);
        }
        let constant = self.constant.map(|c| image(&c)).transpose()?;
        RelStructure::new(self.signature.clone(), universe, relations, constant)
    }

    /// Checks whether `f` is an embedding of `self` into `other`: injective,
    /// total, constant-preserving and preserving every relation both ways.
    pub fn is_embedding(&self, other: &RelStructure, f: &ElemMap) -> bool {
        if self.signature != other.signature
            || f.len() != self.universe.len()
            || !self.universe.iter().all(|e| f.get(e).is_some_and(|t| other.universe.contains(t)))
        {
            return false;
        }
        let image: BTreeSet<_> = f.values().copied().collect();
        if image.len() != f.len() {
            return false;
        }
        if self.constant.map(|c| f[&c]) != other.constant {
            return false;
        }
        let inverse: ElemMap = f.iter().map(|(&a, &b)| (b, a)).collect();
        self.relations.iter().all(|(name, ts)| {
            ts.iter().all(|t| other.holds(name, &t.iter().map(|e| f[e]).collect::<Vec<_>>()))
                && other
                    .tuples(name)
                    .filter(|t| t.iter().all(|e| image.contains(e)))
                    .all(|t| self.holds(name, &t.iter().map(|e| inverse[e]).collect::<Vec<_>>()))
        })
    }

    /// All embeddings `self → other`, in lexicographic order of the images
    /// listed by increasing source element.
    pub fn embeddings(&self, other: &RelStructure) -> Result<Vec<ElemMap>> {
        if self.signature != other.signature {
            return Err(Error::SignatureMismatch);
        }
        let order: Vec<Elem> = self.universe.iter().copied().collect();
        let targets: Vec<Elem> = other.universe.iter().copied().collect();
        let mut out = Vec::new();
        let mut map = ElemMap::new();
        let mut inverse = ElemMap::new();
        self.extend_embedding(other, &order, &targets, &mut map, &mut inverse, &mut out);
        Ok(out)
    }

    fn extend_embedding(
        &self,
        other: &RelStructure,
        order: &[Elem],
        targets: &[Elem],
        map: &mut ElemMap,
        inverse: &mut ElemMap,
        out: &mut Vec<ElemMap>,
    ) {
        let Some(&e) = order.get(map.len()) else {
            out.push(map.clone());
            return;
        };
        for &t in targets {
            if inverse.contains_key(&t) {
                continue;
            }
            if (self.constant == Some(e)) != (other.constant == Some(t)) {
                continue;
            }
            map.insert(e, t);
            inverse.insert(t, e);
            if extension_consistent(self, other, map, inverse, e, t) {
                self.extend_embedding(other, order, targets, map, inverse, out);
            }
            map.remove(&e);
            inverse.remove(&t);
        }
    }

    /// The automorphism group, as a list of maps in lexicographic order.
    pub fn automorphisms(&self) -> Vec<ElemMap> {
        self.embeddings(self).expect("same signature")
    }

    /// Free amalgamation of `b1` and `b2` over `a` along `f1`, `f2`.
    ///
    /// The pushout identifies `f1(x)` with `f2(x)` and adds no tuples mixing the
    /// two new parts. When a constraint rejects the pushout the outcome carries
    /// the pushout together with the violation.
    pub fn amalgamate(
        a: &RelStructure,
        b1: &RelStructure,
        b2: &RelStructure,
        f1: &ElemMap,
        f2: &ElemMap,
        constraints: &[AgeConstraint],
    ) -> Result<AmalgamOutcome> {
        if !a.is_embedding(b1, f1) {
            return Err(Error::NotEmbedding("f1 is not an embedding a → b1".into()));
        }
        if !a.is_embedding(b2, f2) {
            return Err(Error::NotEmbedding("f2 is not an embedding a → b2".into()));
        }
        let g1: ElemMap = b1.universe.iter().map(|&e| (e, e)).collect();
        let mut next = b1.universe.iter().next_back().map_or(0, |m| m + 1);
        let back2: ElemMap = f2.iter().map(|(&x, &y)| (y, x)).collect();
        let mut g2 = ElemMap::new();
        for &e in &b2.universe {
            let image = match back2.get(&e) {
                Some(x) => f1[x],
                None => {
                    next += 1;
                    next - 1
                }
            };
            g2.insert(e, image);
        }
        let mut relations = b1.relations.clone();
        for (name, ts) in &b2.relations {
            let entry = relations.entry(name.clone()).or_default();
            for t in ts {
                entry.insert(t.iter().map(|x| g2[x]).collect());
            }
        }
        let universe = g1.values().chain(g2.values()).copied();
        let structure = RelStructure::new(b1.signature.clone(), universe, relations, b1.constant)?;
        let amalgam = Amalgam { structure, g1, g2 };
        for c in constraints {
            if let Err(violation) = c.check(&amalgam.structure) {
                return Ok(AmalgamOutcome::Failed { pushout: amalgam, violation });
            }
        }
        Ok(AmalgamOutcome::Amalgam(amalgam))
    }
}

/// Checks the tuples that mention the newly mapped pair `e ↦ t` against a
/// partial injective map and its inverse.
pub(crate) fn extension_consistent(
    a: &RelStructure,
    b: &RelStructure,
    map: &ElemMap,
    inverse: &ElemMap,
    e: Elem,
    t: Elem,
) -> bool {
    a.relations.iter().all(|(name, ts)| {
        let forward = ts
            .iter()
            .filter(|tup| tup.contains(&e) && tup.iter().all(|x| map.contains_key(x)))
            .all(|tup| b.holds(name, &tup.iter().map(|x| map[x]).collect::<Vec<_>>()));
        forward
            && b.tuples(name)
                .filter(|tup| tup.contains(&t) && tup.iter().all(|x| inverse.contains_key(x)))
                .all(|tup| a.holds(name, &tup.iter().map(|x| inverse[x]).collect::<Vec<_>>()))
    })
}

impl fmt::Display for RelStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.universe.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if Some(*e) == self.constant {
                write!(f, "c={e}")?;
            } else {
                write!(f, "{e}")?;
            }
        }
        write!(f, "}}")?;
        for (name, ts) in &self.relations {
            if !ts.is_empty() {
                write!(f, " {name}={ts:?}")?;
            }
        }
        Ok(())
    }
}

/// A free amalgam with its two embeddings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amalgam {
    pub structure: RelStructure,
    pub g1: ElemMap,
    pub g2: ElemMap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AmalgamOutcome {
    Amalgam(Amalgam),
    Failed { pushout: Amalgam, violation: AgeViolation },
}

/// A membership condition on the age an alphabet is drawn from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum AgeConstraint {
    /// The named binary relation is a strict total order.
    TotalOrder(String),
    /// The named binary relation is a strict total order with the constant least.
    PointedTotalOrder(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgeViolation {
    pub constraint: AgeConstraint,
    pub witness: Vec<Elem>,
    pub reason: String,
}

impl AgeConstraint {
    pub fn check(&self, s: &RelStructure) -> std::result::Result<(), AgeViolation> {
        let (name, pointed) = match self {
            AgeConstraint::TotalOrder(n) => (n, false),
            AgeConstraint::PointedTotalOrder(n) => (n, true),
        };
        let fail = |witness: Vec<Elem>, reason: String| {
            Err(AgeViolation { constraint: self.clone(), witness, reason })
        };
        let lt = |x: Elem, y: Elem| s.holds(name, &[x, y]);
        for &x in &s.universe {
            if lt(x, x) {
                return fail(vec![x], format!("{name}({x},{x}) is reflexive"));
            }
            for &y in s.universe.iter().filter(|&&y| y > x) {
                match (lt(x, y), lt(y, x)) {
                    (false, false) => return fail(vec![x, y], format!("missing comparison between {x} and {y}")),
                    (true, true) => return fail(vec![x, y], format!("{x} and {y} compared both ways")),
                    _ => {}
                }
            }
        }
        for &x in &s.universe {
            for &y in &s.universe {
                for &z in &s.universe {
                    if lt(x, y) && lt(y, z) && !lt(x, z) {
                        return fail(vec![x, y, z], format!("{name} not transitive on {x},{y},{z}"));
                    }
                }
            }
        }
        if pointed {
            if let Some(c) = s.constant {
                if let Some(&x) = s.universe.iter().find(|&&x| x != c && !lt(c, x)) {
                    return fail(vec![c, x], format!("constant {c} is not below {x}"));
                }
            }
        }
        Ok(())
    }
}
