//! The gluing index category GL(I) over a finite index set {0, .., n-1}.
//!
//! Objects are the classes [i], [i,j], [i,j,k] and there is at most one
//! morphism between two objects, so morphisms are plain endpoint pairs.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use thiserror::Error;

pub const DEFAULT_MAX_INDEX: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error("index set must be non-empty")]
    EmptyIndexSet,
    #[error("index set size {0} exceeds the bound {1}")]
    TooLarge(usize, usize),
    #[error("index {index} out of range for n = {n}")]
    OutOfRange { index: usize, n: usize },
    #[error("raw tuple must have 1 to 3 entries, got {0}")]
    BadArity(usize),
    #[error("no image supplied for generator {0}")]
    MissingGenerator(Generator),
}

/// Canonical representative of a class of I ∪ I² ∪ I³ under the collapsing relation.
///
/// `Triple(i, j, k)` always has `j < k`; the first slot is the distinguished index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GlueObject {
    Single(usize),
    Pair(usize, usize),
    Triple(usize, usize, usize),
}

impl GlueObject {
    pub fn pair(i: usize, j: usize) -> Self {
        if i == j {
            GlueObject::Single(i)
        } else {
            GlueObject::Pair(i, j)
        }
    }

    /// The class of (i, j, k), collapsing repeated indices.
    pub fn triple(i: usize, j: usize, k: usize) -> Self {
        let mut rest: Vec<usize> = [j, k].into_iter().filter(|&x| x != i).collect();
        rest.sort_unstable();
        rest.dedup();
        match rest.as_slice() {
            [] => GlueObject::Single(i),
            [a] => GlueObject::Pair(i, *a),
            [a, b] => GlueObject::Triple(i, *a, *b),
            _ => unreachable!(),
        }
    }

    pub fn first(&self) -> usize {
        match *self {
            GlueObject::Single(i) | GlueObject::Pair(i, _) | GlueObject::Triple(i, _, _) => i,
        }
    }

    /// Support as a bitmask over the index set.
    pub fn support(&self) -> u64 {
        match *self {
            GlueObject::Single(i) => 1 << i,
            GlueObject::Pair(i, j) => (1 << i) | (1 << j),
            GlueObject::Triple(i, j, k) => (1 << i) | (1 << j) | (1 << k),
        }
    }

    pub fn indices(&self) -> Vec<usize> {
        match *self {
            GlueObject::Single(i) => vec![i],
            GlueObject::Pair(i, j) => vec![i, j],
            GlueObject::Triple(i, j, k) => vec![i, j, k],
        }
    }
}

impl fmt::Display for GlueObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GlueObject::Single(i) => write!(f, "[{i}]"),
            GlueObject::Pair(i, j) => write!(f, "[{i},{j}]"),
            GlueObject::Triple(i, j, k) => write!(f, "[{i},{j},{k}]"),
        }
    }
}

pub fn canonicalize(raw: &[usize], n: usize) -> Result<GlueObject, IndexError> {
    if let Some(&index) = raw.iter().find(|&&x| x >= n) {
        return Err(IndexError::OutOfRange { index, n });
    }
    match *raw {
        [i] => Ok(GlueObject::Single(i)),
        [i, j] => Ok(GlueObject::pair(i, j)),
        [i, j, k] => Ok(GlueObject::triple(i, j, k)),
        _ => Err(IndexError::BadArity(raw.len())),
    }
}

/// Generating arrows of GL(I).
///
/// * `EtaPair { i, j }`: [i] → [i,j]
/// * `TauPair { i, j }`: [j,i] → [i,j]
/// * `EtaTriple { i, j, k, via }`: [i,via] → [i,j,k], `via` ∈ {j, k}, `j < k`
/// * `TauTriple { i, j, k }`: [j,i,k] → [i,j,k]
///
/// `EtaPair`/`TauPair` with `i == j` are the degenerate generators, whose
/// images must be identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    EtaPair { i: usize, j: usize },
    TauPair { i: usize, j: usize },
    EtaTriple { i: usize, j: usize, k: usize, via: usize },
    TauTriple { i: usize, j: usize, k: usize },
}

impl Generator {
    pub fn eta_triple(i: usize, j: usize, k: usize, via: usize) -> Self {
        let (j, k) = if j < k { (j, k) } else { (k, j) };
        Generator::EtaTriple { i, j, k, via }
    }

    pub fn dom(&self) -> GlueObject {
        match *self {
            Generator::EtaPair { i, .. } => GlueObject::Single(i),
            Generator::TauPair { i, j } => GlueObject::pair(j, i),
            Generator::EtaTriple { i, via, .. } => GlueObject::pair(i, via),
            Generator::TauTriple { i, j, k } => GlueObject::triple(j, i, k),
        }
    }

    pub fn cod(&self) -> GlueObject {
        match *self {
            Generator::EtaPair { i, j } | Generator::TauPair { i, j } => GlueObject::pair(i, j),
            Generator::EtaTriple { i, j, k, .. } | Generator::TauTriple { i, j, k } => {
                GlueObject::triple(i, j, k)
            }
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(*self, Generator::EtaPair { i, j } | Generator::TauPair { i, j } if i == j)
    }

    pub fn label(&self) -> String {
        match *self {
            Generator::EtaPair { i, j } => format!("η_{i}{j}"),
            Generator::TauPair { i, j } => format!("τ_{i}{j}"),
            Generator::EtaTriple { i, j, k, via } => format!("η^({via})_{i}{j}{k}"),
            Generator::TauTriple { i, j, k } => format!("τ^({k})_{i}{j}"),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {}", self.label(), self.dom(), self.cod())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GlueMorphism {
    pub dom: GlueObject,
    pub cod: GlueObject,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluingIndexCategory {
    n: usize,
    objects: Vec<GlueObject>,
    position: BTreeMap<GlueObject, usize>,
    reach: Vec<Vec<bool>>,
}

impl GluingIndexCategory {
    pub fn new(n: usize) -> Result<Self, IndexError> {
        Self::with_bound(n, DEFAULT_MAX_INDEX)
    }

    pub fn with_bound(n: usize, bound: usize) -> Result<Self, IndexError> {
        if n == 0 {
            return Err(IndexError::EmptyIndexSet);
        }
        if n > bound || n > 63 {
            return Err(IndexError::TooLarge(n, bound.min(63)));
        }
        let mut objects = Vec::new();
        for i in 0..n {
            objects.push(GlueObject::Single(i));
        }
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                objects.push(GlueObject::Pair(i, j));
            }
        }
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                for k in (j + 1..n).filter(|&k| k != i) {
                    objects.push(GlueObject::Triple(i, j, k));
                }
            }
        }
        let position: BTreeMap<_, _> = objects.iter().enumerate().map(|(p, &o)| (o, p)).collect();
        let mut cat = GluingIndexCategory { n, objects, position, reach: Vec::new() };
        cat.reach = cat.closure();
        Ok(cat)
    }

    // Reflexive-transitive closure of the generator graph.
    fn closure(&self) -> Vec<Vec<bool>> {
        let m = self.objects.len();
        let mut adj = vec![Vec::new(); m];
        for g in self.proper_generators() {
            adj[self.position[&g.dom()]].push(self.position[&g.cod()]);
        }
        let mut reach = vec![vec![false; m]; m];
        for s in 0..m {
            let mut queue = VecDeque::from([s]);
            reach[s][s] = true;
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if !reach[s][w] {
                        reach[s][w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        reach
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn objects(&self) -> &[GlueObject] {
        &self.objects
    }

    pub fn contains(&self, a: &GlueObject) -> bool {
        self.position.contains_key(a)
    }

    pub fn canonicalize(&self, raw: &[usize]) -> Result<GlueObject, IndexError> {
        canonicalize(raw, self.n)
    }

    /// Every generator including the degenerate `η_ii`, `τ_ii`.
    pub fn generators(&self) -> Vec<Generator> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                out.push(Generator::EtaPair { i, j });
                out.push(Generator::TauPair { i, j });
            }
        }
        for (i, j, k) in self.distinct_triples() {
            if j < k {
                out.push(Generator::EtaTriple { i, j, k, via: j });
                out.push(Generator::EtaTriple { i, j, k, via: k });
            }
            out.push(Generator::TauTriple { i, j, k });
        }
        out
    }

    pub fn proper_generators(&self) -> Vec<Generator> {
        self.generators().into_iter().filter(|g| !g.is_degenerate()).collect()
    }

    /// Ordered triples of pairwise distinct indices.
    pub fn distinct_triples(&self) -> impl Iterator<Item = (usize, usize, usize)> {
        let n = self.n;
        (0..n).flat_map(move |i| {
            (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k)))
        })
        .filter(|&(i, j, k)| i != j && j != k && i != k)
    }

    pub fn hom_exists(&self, a: &GlueObject, b: &GlueObject) -> bool {
        match (self.position.get(a), self.position.get(b)) {
            (Some(&p), Some(&q)) => self.reach[p][q],
            _ => false,
        }
    }

    pub fn morphisms(&self) -> impl Iterator<Item = GlueMorphism> + '_ {
        self.objects.iter().flat_map(move |&dom| {
            self.objects
                .iter()
                .filter(move |&&cod| self.hom_exists(&dom, &cod))
                .map(move |&cod| GlueMorphism { dom, cod })
        })
    }

    pub fn morphism_count(&self) -> usize {
        self.reach.iter().flatten().filter(|&&b| b).count()
    }

    pub fn compose(&self, after: GlueMorphism, before: GlueMorphism) -> Option<GlueMorphism> {
        (before.cod == after.dom).then_some(GlueMorphism { dom: before.dom, cod: after.cod })
    }

    /// A shortest chain of proper generators from `a` to `b`.
    pub fn path(&self, a: &GlueObject, b: &GlueObject) -> Option<Vec<Generator>> {
        if !self.hom_exists(a, b) {
            return None;
        }
        let gens = self.proper_generators();
        let mut prev: BTreeMap<GlueObject, Generator> = BTreeMap::new();
        let mut queue = VecDeque::from([*a]);
        while let Some(v) = queue.pop_front() {
            if v == *b {
                break;
            }
            for g in gens.iter().filter(|g| g.dom() == v) {
                let w = g.cod();
                if w != *a && !prev.contains_key(&w) {
                    prev.insert(w, *g);
                    queue.push_back(w);
                }
            }
        }
        let mut chain = Vec::new();
        let mut cur = *b;
        while cur != *a {
            let g = prev[&cur];
            chain.push(g);
            cur = g.dom();
        }
        chain.reverse();
        Some(chain)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph gl {\n");
        for o in &self.objects {
            out.push_str(&format!("  \"{o}\";\n"));
        }
        for g in self.proper_generators() {
            out.push_str(&format!("  \"{}\" -> \"{}\" [label=\"{}\"];\n", g.dom(), g.cod(), g.label()));
        }
        out.push_str("}\n");
        out
    }
}

/// A GL(I)-shaped diagram in some target category, given on generators.
pub trait GluingDiagram {
    type Arrow: Clone;

    fn index(&self) -> &GluingIndexCategory;
    fn generator_image(&self, g: &Generator) -> Option<Self::Arrow>;
    fn identity(&self, a: GlueObject) -> Self::Arrow;
    /// `after ∘ before` in the target category.
    fn compose(&self, after: &Self::Arrow, before: &Self::Arrow) -> Self::Arrow;
    fn same(&self, a: &Self::Arrow, b: &Self::Arrow) -> bool;
}

/// Image of the unique morphism `a → b`, composed along a generator path.
pub fn morphism_image<D: GluingDiagram>(d: &D, a: &GlueObject, b: &GlueObject) -> Option<D::Arrow> {
    let path = d.index().path(a, b)?;
    let mut acc = d.identity(*a);
    for g in path {
        acc = d.compose(&d.generator_image(&g)?, &acc);
    }
    Some(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationId {
    /// η_ii = τ_ii = id
    DegenerateIdentity,
    /// τ_ij ∘ τ_ji = id
    TauInverse,
    /// τ^(k)_ij ∘ τ^(i)_jk = τ^(j)_ik
    TripleCocycle,
    /// τ^(k)_ij ∘ τ^(k)_ji = id
    TripleInvolution,
    /// η^(j) ∘ η_ij = η^(k) ∘ η_ik
    EtaSquare,
    /// τ^(k)_ij ∘ η^(i) = η^(j) ∘ τ_ij
    EtaTau,
}

impl RelationId {
    pub fn code(&self) -> &'static str {
        match self {
            RelationId::DegenerateIdentity => "1a",
            RelationId::TauInverse => "1b",
            RelationId::TripleCocycle => "1c",
            RelationId::TripleInvolution => "1c'",
            RelationId::EtaSquare => "1d",
            RelationId::EtaTau => "1e",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RelationFailure {
    pub relation: RelationId,
    pub indices: Vec<usize>,
}

impl fmt::Display for RelationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "relation {} fails at {:?}", self.relation.code(), self.indices)
    }
}

/// Every failed relation instance; empty iff the generator images extend to a functor.
pub fn check_generator_relations<D: GluingDiagram>(d: &D) -> Result<Vec<RelationFailure>, IndexError> {
    let cat = d.index();
    let mut img = BTreeMap::new();
    for g in cat.generators() {
        let a = d.generator_image(&g).ok_or(IndexError::MissingGenerator(g))?;
        img.insert(g, a);
    }
    let mut fails = Vec::new();
    let mut record = |ok: bool, relation: RelationId, indices: Vec<usize>| {
        if !ok {
            fails.push(RelationFailure { relation, indices });
        }
    };
    let n = cat.n();
    for i in 0..n {
        let id = d.identity(GlueObject::Single(i));
        let ok = d.same(&img[&Generator::EtaPair { i, j: i }], &id)
            && d.same(&img[&Generator::TauPair { i, j: i }], &id);
        record(ok, RelationId::DegenerateIdentity, vec![i]);
    }
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let lhs = d.compose(&img[&Generator::TauPair { i, j }], &img[&Generator::TauPair { i: j, j: i }]);
            record(d.same(&lhs, &d.identity(GlueObject::Pair(i, j))), RelationId::TauInverse, vec![i, j]);
        }
    }
    for (i, j, k) in cat.distinct_triples() {
        let tau = |a: usize, b: usize, c: usize| &img[&Generator::TauTriple { i: a, j: b, k: c }];
        // [k,i,j] -> [j,k,i] -> [i,j,k]
        let lhs = d.compose(tau(i, j, k), tau(j, k, i));
        record(d.same(&lhs, tau(i, k, j)), RelationId::TripleCocycle, vec![i, j, k]);
        let inv = d.compose(tau(i, j, k), tau(j, i, k));
        record(
            d.same(&inv, &d.identity(GlueObject::triple(i, j, k))),
            RelationId::TripleInvolution,
            vec![i, j, k],
        );
        if j < k {
            let lhs = d.compose(&img[&Generator::eta_triple(i, j, k, j)], &img[&Generator::EtaPair { i, j }]);
            let rhs = d.compose(&img[&Generator::eta_triple(i, j, k, k)], &img[&Generator::EtaPair { i, j: k }]);
            record(d.same(&lhs, &rhs), RelationId::EtaSquare, vec![i, j, k]);
        }
        // both sides [j,i] -> [i,j,k]
        let lhs = d.compose(tau(i, j, k), &img[&Generator::eta_triple(j, i, k, i)]);
        let rhs = d.compose(&img[&Generator::eta_triple(i, j, k, j)], &img[&Generator::TauPair { i, j }]);
        record(d.same(&lhs, &rhs), RelationId::EtaTau, vec![i, j, k]);
    }
    Ok(fails)
}

/// The three cone characterizations; they must agree on a valid diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeCheck {
    pub full_diagram: bool,
    pub generating: bool,
    pub composite: bool,
}

impl ConeCheck {
    pub fn agree(&self) -> bool {
        self.full_diagram == self.generating && self.generating == self.composite
    }

    pub fn all(&self) -> bool {
        self.full_diagram && self.generating && self.composite
    }
}

/// Evaluate the three cone characterizations for legs `N → G_a` (arrows of the target category).
pub fn cone_characterizations<D: GluingDiagram>(
    d: &D,
    legs: &BTreeMap<GlueObject, D::Arrow>,
) -> Result<ConeCheck, IndexError> {
    let cat = d.index();
    let gen = |g: Generator| d.generator_image(&g).ok_or(IndexError::MissingGenerator(g));
    let leg = |a: GlueObject| &legs[&a];
    let commutes = |f: &D::Arrow, a: GlueObject, b: GlueObject| d.same(&d.compose(f, leg(a)), leg(b));

    for g in cat.generators() {
        gen(g)?;
    }
    let mut full = true;
    for m in cat.morphisms().filter(|m| m.dom != m.cod) {
        let f = morphism_image(d, &m.dom, &m.cod).expect("all generator images present");
        if !commutes(&f, m.dom, m.cod) {
            full = false;
            break;
        }
    }

    let n = cat.n();
    let mut generating = true;
    let mut composite = true;
    for i in 0..n {
        for j in 0..n {
            let tau = gen(Generator::TauPair { i, j })?;
            let eta = gen(Generator::EtaPair { i, j })?;
            let eta_back = gen(Generator::EtaPair { i: j, j: i })?;
            let pij = GlueObject::pair(i, j);
            let pji = GlueObject::pair(j, i);
            let eta_ok = commutes(&eta, GlueObject::Single(i), pij);
            generating &= commutes(&tau, pji, pij) && eta_ok;
            composite &= commutes(&d.compose(&tau, &eta_back), GlueObject::Single(j), pij) && eta_ok;
        }
    }
    for (i, j, k) in cat.distinct_triples().filter(|&(_, j, k)| j < k) {
        for via in [j, k] {
            let eta = gen(Generator::eta_triple(i, j, k, via))?;
            let ok = commutes(&eta, GlueObject::Pair(i, via), GlueObject::Triple(i, j, k));
            generating &= ok;
            composite &= ok;
        }
    }
    Ok(ConeCheck { full_diagram: full, generating, composite })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        assert_eq!(canonicalize(&[2, 2], 3).unwrap(), GlueObject::Single(2));
        assert_eq!(canonicalize(&[0, 0, 1], 3).unwrap(), GlueObject::Pair(0, 1));
        assert_eq!(canonicalize(&[0, 1, 0], 3).unwrap(), GlueObject::Pair(0, 1));
        assert_eq!(canonicalize(&[1, 1, 1], 3).unwrap(), GlueObject::Single(1));
        assert_eq!(canonicalize(&[0, 2, 1], 3).unwrap(), GlueObject::Triple(0, 1, 2));
        assert!(matches!(canonicalize(&[0, 3], 3), Err(IndexError::OutOfRange { .. })));
        assert!(matches!(canonicalize(&[], 3), Err(IndexError::BadArity(0))));
    }

    #[test]
    fn small_homs() {
        let c = GluingIndexCategory::new(3).unwrap();
        assert!(c.hom_exists(&GlueObject::Single(1), &GlueObject::Pair(1, 2)));
        assert!(!c.hom_exists(&GlueObject::Single(1), &GlueObject::Single(2)));
        assert!(c.hom_exists(&GlueObject::Pair(2, 1), &GlueObject::Pair(1, 2)));
        assert!(c.hom_exists(&GlueObject::Single(2), &GlueObject::Triple(0, 1, 2)));
    }

    #[test]
    fn bounds() {
        assert_eq!(GluingIndexCategory::new(0).unwrap_err(), IndexError::EmptyIndexSet);
        assert!(matches!(GluingIndexCategory::new(7), Err(IndexError::TooLarge(7, 6))));
        assert!(GluingIndexCategory::with_bound(7, 8).is_ok());
    }

    #[test]
    fn paths_follow_generators() {
        let c = GluingIndexCategory::new(3).unwrap();
        for m in c.morphisms() {
            let p = c.path(&m.dom, &m.cod).unwrap();
            let mut cur = m.dom;
            for g in &p {
                assert_eq!(g.dom(), cur);
                cur = g.cod();
            }
            assert_eq!(cur, m.cod);
        }
    }

    #[test]
    fn dot_has_every_node() {
        let c = GluingIndexCategory::new(2).unwrap();
        let dot = c.to_dot();
        for o in c.objects() {
            assert!(dot.contains(&format!("\"{o}\";")));
        }
    }
}
