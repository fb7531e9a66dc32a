//! Gluing of finite spaces: classical gluing data, GL(I)-shaped functors into
//! (o)Top^op, the standard glued space and its verification.
//!
//! Arrows of Top^op are stored as their Top-side maps, so the image of a
//! generator `a → b` is a continuous map `G_b → G_a`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::index::{
    check_generator_relations, cone_characterizations, ConeCheck, GlueObject, Generator, GluingDiagram,
    GluingIndexCategory, IndexError,
};
use crate::space::{coproduct, fiber_product, is_pullback_square, quotient_final, ContinuousMap, FinSpace, PointSet, Space, TopologyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopVariant {
    Top,
    #[serde(rename = "otop")]
    OTop,
}

impl fmt::Display for TopVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TopVariant::Top => "top",
            TopVariant::OTop => "otop",
        })
    }
}

/// A claimed property of a construction that failed when checked.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{claim}: {detail}")]
pub struct Falsification {
    pub claim: String,
    pub detail: String,
}

impl Falsification {
    pub fn new(claim: impl Into<String>, detail: impl Into<String>) -> Self {
        Falsification { claim: claim.into(), detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {}", self.condition, self.detail)
    }
}

fn list(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GlueError {
    #[error("invalid gluing data: {}", list(.0))]
    InvalidData(Vec<Violation>),
    #[error("invalid gluing functor: {}", list(.0))]
    InvalidFunctor(Vec<Violation>),
    #[error("leg or map for {0} has the wrong endpoints")]
    EndpointMismatch(GlueObject),
    #[error("not a cover: {0}")]
    NotACover(String),
    #[error("point {0} of the glued space is not in the image of any chart")]
    NotCovered(usize),
    #[error(transparent)]
    Falsified(#[from] Falsification),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Index(#[from] IndexError),
}

/// A chosen pullback `U_{i,{j,k}}` with its maps to `U_ij` and `U_ik` (`j < k`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleOverlap {
    pub space: Space,
    pub to_lower: ContinuousMap,
    pub to_upper: ContinuousMap,
}

/// Classical gluing data. Indexed `[i][j]`; the diagonal entries must be the chart
/// itself with identity maps. Triple keys are `(i, j, k)` with `j < k` for
/// overlaps and all distinct ordered triples for transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopGluingData {
    pub variant: TopVariant,
    pub charts: Vec<Space>,
    /// `υ_ij: U_ij → U_i`; its domain is `U_ij`.
    pub inclusions: Vec<Vec<ContinuousMap>>,
    /// `φ_ij: U_ij → U_ji`.
    pub transitions: Vec<Vec<ContinuousMap>>,
    pub triples: BTreeMap<(usize, usize, usize), TripleOverlap>,
    /// `φ^(k)_ij: U_{i,{j,k}} → U_{j,{i,k}}`.
    pub triple_transitions: BTreeMap<(usize, usize, usize), ContinuousMap>,
}

fn ordered(j: usize, k: usize) -> (usize, usize) {
    if j < k {
        (j, k)
    } else {
        (k, j)
    }
}

impl TopGluingData {
    pub fn n(&self) -> usize {
        self.charts.len()
    }

    pub fn overlap(&self, i: usize, j: usize) -> &Space {
        self.inclusions[i][j].dom()
    }

    pub fn triple(&self, i: usize, j: usize, k: usize) -> &TripleOverlap {
        let (lo, hi) = ordered(j, k);
        &self.triples[&(i, lo, hi)]
    }

    /// Map `U_{i,{j,k}} → U_{i,via}`.
    pub fn triple_projection(&self, i: usize, j: usize, k: usize, via: usize) -> &ContinuousMap {
        let (lo, _) = ordered(j, k);
        let t = self.triple(i, j, k);
        if via == lo {
            &t.to_lower
        } else {
            &t.to_upper
        }
    }

    /// Complete charts, overlaps and transitions with fiber-product triple overlaps
    /// and the triple transitions they force.
    pub fn with_fiber_triples(
        variant: TopVariant,
        charts: Vec<Space>,
        inclusions: Vec<Vec<ContinuousMap>>,
        transitions: Vec<Vec<ContinuousMap>>,
    ) -> Result<Self, GlueError> {
        let n = charts.len();
        let shape_ok = inclusions.len() == n
            && transitions.len() == n
            && inclusions.iter().chain(&transitions).all(|row| row.len() == n);
        if !shape_ok {
            return Err(GlueError::InvalidData(vec![Violation { condition: "shape", detail: format!("expected {n}x{n} overlap tables") }]));
        }
        let mut triples = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                for k in j + 1..n {
                    if i == j || i == k {
                        continue;
                    }
                    let (space, p1, p2) = fiber_product(&inclusions[i][j], &inclusions[i][k])?;
                    triples.insert((i, j, k), TripleOverlap { space, to_lower: p1, to_upper: p2 });
                }
            }
        }
        let mut data = TopGluingData { variant, charts, inclusions, transitions, triples, triple_transitions: BTreeMap::new() };
        let mut forced = BTreeMap::new();
        for (i, j, k) in distinct_triples(n) {
            let src = data.triple(i, j, k);
            let dst = data.triple(j, i, k);
            let to_ij = data.triple_projection(i, j, k, j);
            let phi = &data.transitions[i][j];
            let ups_ji = &data.inclusions[j][i];
            let ups_jk = &data.inclusions[j][k];
            let mut assign = Vec::with_capacity(src.space.points());
            for t in 0..src.space.points() {
                let a = phi.apply(to_ij.apply(t));
                let target = ups_ji.apply(a);
                let c = (0..ups_jk.dom().points()).find(|&c| ups_jk.apply(c) == target).ok_or_else(|| {
                    GlueError::InvalidData(vec![Violation {
                        condition: "c",
                        detail: format!("φ_{i}{j} does not carry U_{i}{j} ∩ U_{i}{k} into U_{j}{k}"),
                    }])
                })?;
                let (first, second) = if i < k { (a, c) } else { (c, a) };
                let image = (0..dst.space.points())
                    .find(|&p| dst.to_lower.apply(p) == first && dst.to_upper.apply(p) == second)
                    .expect("fiber product contains every compatible pair");
                assign.push(image);
            }
            forced.insert((i, j, k), ContinuousMap::new(src.space.clone(), dst.space.clone(), assign)?);
        }
        data.triple_transitions = forced;
        Ok(data)
    }

    /// Every violated condition of the definition, plus the extra checks.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n();
        if self.inclusions.len() != n || self.transitions.len() != n || self.inclusions.iter().chain(&self.transitions).any(|r| r.len() != n) {
            push(&mut out, "shape", format!("expected {n}x{n} overlap tables"));
            return out;
        }
        for i in 0..n {
            for j in 0..n {
                let ups = &self.inclusions[i][j];
                let phi = &self.transitions[i][j];
                if ups.cod() != &self.charts[i] {
                    push(&mut out, "shape", format!("υ_{i}{j} does not land in U_{i}"));
                    continue;
                }
                if phi.dom() != ups.dom() || phi.cod() != self.inclusions[j][i].dom() {
                    push(&mut out, "shape", format!("φ_{i}{j} is not a map U_{i}{j} → U_{j}{i}"));
                    continue;
                }
                if i == j {
                    if ups.dom() != &self.charts[i] || *ups != ContinuousMap::identity(self.charts[i].clone()) {
                        push(&mut out, "a", format!("U_{i}{i} is not U_{i}"));
                    }
                    if *phi != ContinuousMap::identity(ups.dom().clone()) {
                        push(&mut out, "b", format!("φ_{i}{i} is not the identity"));
                    }
                }
                for (name, f) in [("υ", ups), ("φ", phi)] {
                    if !f.is_continuous() {
                        push(&mut out, "continuity", format!("{name}_{i}{j} is not continuous"));
                    }
                    if self.variant == TopVariant::OTop && !f.is_open_map() {
                        push(&mut out, "openness", format!("{name}_{i}{j} is not open"));
                    }
                }
                if !ups.is_injective() {
                    push(&mut out, "injective", format!("υ_{i}{j} is not one-to-one"));
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let round = self.transitions[i][j].then(&self.transitions[j][i]).expect("typed");
                if round != ContinuousMap::identity(self.overlap(i, j).clone()) {
                    push(&mut out, "inverse", format!("φ_{j}{i} ∘ φ_{i}{j} is not the identity"));
                }
            }
        }
        for (i, j, k) in distinct_triples(n) {
            if j > k {
                continue;
            }
            let Some(t) = self.triples.get(&(i, j, k)) else {
                push(&mut out, "shape", format!("triple overlap U_{i}{j}{k} missing"));
                continue;
            };
            if t.to_lower.dom() != &t.space
                || t.to_upper.dom() != &t.space
                || t.to_lower.cod() != self.overlap(i, j)
                || t.to_upper.cod() != self.overlap(i, k)
            {
                push(&mut out, "shape", format!("projections of U_{i}{j}{k} have the wrong endpoints"));
                continue;
            }
            for f in [&t.to_lower, &t.to_upper] {
                if !f.is_continuous() || (self.variant == TopVariant::OTop && !f.is_open_map()) {
                    push(&mut out, "continuity", format!("a projection of U_{i}{j}{k} is not a morphism"));
                }
            }
            match is_pullback_square(&t.to_lower, &t.to_upper, &self.inclusions[i][j], &self.inclusions[i][k]) {
                Ok(true) => {}
                Ok(false) => push(&mut out, "pullback", format!("U_{i}{j}{k} is not a pullback")),
                Err(_) => push(&mut out, "pullback", format!("triple square for U_{i}{j}{k} does not commute")),
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (i, j, k) in distinct_triples(n) {
            let Some(phi) = self.triple_transitions.get(&(i, j, k)) else {
                push(&mut out, "shape", format!("φ^({k})_{i}{j} missing"));
                continue;
            };
            if phi.dom() != &self.triple(i, j, k).space || phi.cod() != &self.triple(j, i, k).space {
                push(&mut out, "shape", format!("φ^({k})_{i}{j} has the wrong endpoints"));
                continue;
            }
            if !phi.is_continuous() || (self.variant == TopVariant::OTop && !phi.is_open_map()) {
                push(&mut out, "continuity", format!("φ^({k})_{i}{j} is not a morphism"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (i, j, k) in distinct_triples(n) {
            let lhs = &self.triple_transitions[&(i, k, j)];
            let rhs = self.triple_transitions[&(i, j, k)].then(&self.triple_transitions[&(j, k, i)]).expect("typed");
            if *lhs != rhs {
                push(&mut out, "c", format!("cocycle fails at ({i},{j},{k})"));
            }
            let lhs = self.triple_transitions[&(i, j, k)].then(self.triple_projection(j, i, k, i)).expect("typed");
            let rhs = self.triple_projection(i, j, k, j).then(&self.transitions[i][j]).expect("typed");
            if lhs != rhs {
                push(&mut out, "d", format!("φ^({k})_{i}{j} is not compatible with φ_{i}{j}"));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), GlueError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(GlueError::InvalidData(v))
        }
    }
}

fn push(out: &mut Vec<Violation>, condition: &'static str, detail: String) {
    out.push(Violation { condition, detail });
}

fn distinct_triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n)
        .flat_map(move |i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
        .filter(|&(i, j, k)| i != j && j != k && i != k)
}

/// A functor GL(I) → (o)Top^op given by its object and generator images.
#[derive(Debug, Clone, PartialEq)]
pub struct TopGluingFunctor {
    pub variant: TopVariant,
    index: GluingIndexCategory,
    objects: BTreeMap<GlueObject, Space>,
    arrows: BTreeMap<Generator, ContinuousMap>,
}

impl TopGluingFunctor {
    pub fn from_parts(
        variant: TopVariant,
        n: usize,
        objects: BTreeMap<GlueObject, Space>,
        arrows: BTreeMap<Generator, ContinuousMap>,
    ) -> Result<Self, GlueError> {
        Ok(TopGluingFunctor { variant, index: GluingIndexCategory::new(n)?, objects, arrows })
    }

    pub fn n(&self) -> usize {
        self.index.n()
    }

    pub fn object(&self, a: &GlueObject) -> &Space {
        &self.objects[a]
    }

    pub fn objects(&self) -> &BTreeMap<GlueObject, Space> {
        &self.objects
    }

    pub fn arrow(&self, g: &Generator) -> &ContinuousMap {
        &self.arrows[g]
    }

    pub fn arrows(&self) -> &BTreeMap<Generator, ContinuousMap> {
        &self.arrows
    }

    /// `G(η_ij)^op = υ_ij: G_[i,j] → G_i`.
    pub fn inclusion(&self, i: usize, j: usize) -> &ContinuousMap {
        &self.arrows[&Generator::EtaPair { i, j }]
    }

    /// `G(τ_ij)^op = φ_ij: G_[i,j] → G_[j,i]`.
    pub fn transition(&self, i: usize, j: usize) -> &ContinuousMap {
        &self.arrows[&Generator::TauPair { i, j }]
    }

    /// `G_[i,j,k] → G_[i,via]`.
    pub fn triple_projection(&self, i: usize, j: usize, k: usize, via: usize) -> &ContinuousMap {
        &self.arrows[&Generator::eta_triple(i, j, k, via)]
    }

    /// Replace one generator image; used to build corrupted instances.
    pub fn with_arrow(&self, g: Generator, f: ContinuousMap) -> Self {
        let mut out = self.clone();
        out.arrows.insert(g, f);
        out
    }

    pub fn with_object(&self, a: GlueObject, s: Space) -> Self {
        let mut out = self.clone();
        out.objects.insert(a, s);
        out
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for a in self.index.objects() {
            if !self.objects.contains_key(a) {
                push(&mut out, "shape", format!("no image for {a}"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for g in self.index.generators() {
            match self.arrows.get(&g) {
                None => push(&mut out, "shape", format!("no image for {g}")),
                Some(f) => {
                    if f.dom() != &self.objects[&g.cod()] || f.cod() != &self.objects[&g.dom()] {
                        push(&mut out, "shape", format!("image of {g} has the wrong endpoints"));
                    } else {
                        if !f.is_continuous() {
                            push(&mut out, "continuity", format!("image of {} is not continuous", g.label()));
                        }
                        if self.variant == TopVariant::OTop && !f.is_open_map() {
                            push(&mut out, "openness", format!("image of {} is not open", g.label()));
                        }
                    }
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for i in 0..self.n() {
            for j in 0..self.n() {
                if !self.inclusion(i, j).is_injective() {
                    push(&mut out, "injective", format!("υ_{i}{j} is not one-to-one"));
                }
            }
        }
        match check_generator_relations(self) {
            Ok(fails) => {
                for f in fails {
                    push(&mut out, "relations", f.to_string());
                }
            }
            Err(e) => push(&mut out, "shape", e.to_string()),
        }
        for (i, j, k) in distinct_triples(self.n()).filter(|&(_, j, k)| j < k) {
            let sq = is_pullback_square(
                self.triple_projection(i, j, k, j),
                self.triple_projection(i, j, k, k),
                self.inclusion(i, j),
                self.inclusion(i, k),
            );
            match sq {
                Ok(true) => {}
                Ok(false) => push(&mut out, "pullback", format!("[{i},{j},{k}] is not sent to a pullback")),
                Err(_) => push(&mut out, "pullback", format!("square at [{i},{j},{k}] does not commute")),
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), GlueError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(GlueError::InvalidFunctor(v))
        }
    }
}

impl GluingDiagram for TopGluingFunctor {
    type Arrow = ContinuousMap;

    fn index(&self) -> &GluingIndexCategory {
        &self.index
    }

    fn generator_image(&self, g: &Generator) -> Option<ContinuousMap> {
        self.arrows.get(g).cloned()
    }

    fn identity(&self, a: GlueObject) -> ContinuousMap {
        ContinuousMap::identity(self.objects[&a].clone())
    }

    fn compose(&self, after: &ContinuousMap, before: &ContinuousMap) -> ContinuousMap {
        after.then(before).expect("composable images")
    }

    fn same(&self, a: &ContinuousMap, b: &ContinuousMap) -> bool {
        a == b
    }
}

pub fn functor_from_data(d: &TopGluingData) -> Result<TopGluingFunctor, GlueError> {
    d.validate()?;
    let n = d.n();
    let index = GluingIndexCategory::new(n)?;
    let mut objects = BTreeMap::new();
    for a in index.objects() {
        let space = match *a {
            GlueObject::Single(i) => d.charts[i].clone(),
            GlueObject::Pair(i, j) => d.overlap(i, j).clone(),
            GlueObject::Triple(i, j, k) => d.triple(i, j, k).space.clone(),
        };
        objects.insert(*a, space);
    }
    let mut arrows = BTreeMap::new();
    for g in index.generators() {
        let f = match g {
            Generator::EtaPair { i, j } => d.inclusions[i][j].clone(),
            Generator::TauPair { i, j } => d.transitions[i][j].clone(),
            Generator::EtaTriple { i, j, k, via } => d.triple_projection(i, j, k, via).clone(),
            Generator::TauTriple { i, j, k } => d.triple_transitions[&(i, j, k)].clone(),
        };
        arrows.insert(g, f);
    }
    Ok(TopGluingFunctor { variant: d.variant, index, objects, arrows })
}

pub fn data_from_functor(g: &TopGluingFunctor) -> Result<TopGluingData, GlueError> {
    g.validate()?;
    let n = g.n();
    let charts = (0..n).map(|i| g.objects[&GlueObject::Single(i)].clone()).collect();
    let inclusions = (0..n).map(|i| (0..n).map(|j| g.inclusion(i, j).clone()).collect()).collect();
    let transitions = (0..n).map(|i| (0..n).map(|j| g.transition(i, j).clone()).collect()).collect();
    let mut triples = BTreeMap::new();
    let mut triple_transitions = BTreeMap::new();
    for (i, j, k) in distinct_triples(n) {
        if j < k {
            triples.insert(
                (i, j, k),
                TripleOverlap {
                    space: g.objects[&GlueObject::Triple(i, j, k)].clone(),
                    to_lower: g.triple_projection(i, j, k, j).clone(),
                    to_upper: g.triple_projection(i, j, k, k).clone(),
                },
            );
        }
        triple_transitions.insert((i, j, k), g.arrows[&Generator::TauTriple { i, j, k }].clone());
    }
    Ok(TopGluingData { variant: g.variant, charts, inclusions, transitions, triples, triple_transitions })
}

/// Transport a functor along point permutations of every object: object `a`'s
/// point `x` becomes `perms[a][x]`.
pub fn relabel_functor(g: &TopGluingFunctor, perms: &BTreeMap<GlueObject, Vec<usize>>) -> TopGluingFunctor {
    let objects: BTreeMap<GlueObject, Space> =
        g.objects.iter().map(|(a, s)| (*a, std::sync::Arc::new(s.relabel(&perms[a])))).collect();
    let arrows = g
        .arrows
        .iter()
        .map(|(gen, f)| {
            let (src, dst) = (gen.cod(), gen.dom());
            let mut assign = vec![0; f.dom().points()];
            for x in 0..f.dom().points() {
                assign[perms[&src][x]] = perms[&dst][f.apply(x)];
            }
            let f2 = ContinuousMap::new(objects[&src].clone(), objects[&dst].clone(), assign).expect("same sizes");
            (*gen, f2)
        })
        .collect();
    TopGluingFunctor { variant: g.variant, index: g.index.clone(), objects, arrows }
}

/// The standard glued space `Q_G` together with its construction.
#[derive(Debug, Clone)]
pub struct GluedSpace {
    pub q: Space,
    pub coproduct: Space,
    pub injections: Vec<ContinuousMap>,
    pub projection: ContinuousMap,
    pub relation: Vec<(usize, usize)>,
    pub iota: BTreeMap<GlueObject, ContinuousMap>,
}

/// Build `Q_G = ⊔ G_i / R_G` with the final topology.
pub fn standard_representative(g: &TopGluingFunctor) -> Result<GluedSpace, GlueError> {
    g.validate()?;
    let n = g.n();
    let charts: Vec<Space> = (0..n).map(|i| g.objects[&GlueObject::Single(i)].clone()).collect();
    let (sum, injections) = coproduct(&charts)?;
    let mut relation = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let ups = g.inclusion(i, j);
            let across = g.transition(i, j).then(g.inclusion(j, i)).expect("typed");
            for u in 0..ups.dom().points() {
                relation.push((injections[i].apply(ups.apply(u)), injections[j].apply(across.apply(u))));
            }
        }
    }
    relation.sort_unstable();
    relation.dedup();
    check_equivalence(sum.points(), &relation)?;
    let (q, projection) = quotient_final(&sum, &relation)?;
    let charts_iota: Vec<ContinuousMap> =
        injections.iter().map(|e| e.then(&projection).expect("typed")).collect();
    for (i, f) in charts_iota.iter().enumerate() {
        let open_ok = g.variant == TopVariant::Top || f.is_open_map();
        if !(f.is_injective() && f.is_continuous() && open_ok) {
            return Err(Falsification::new(
                "chart maps into the glued space are embeddings",
                format!("ι_{i} fails (injective {}, continuous {}, open {})", f.is_injective(), f.is_continuous(), open_ok),
            )
            .into());
        }
    }
    let iota = legs_from_charts(g, &charts_iota)?;
    Ok(GluedSpace { q, coproduct: sum, injections, projection, relation, iota })
}

/// Extend chart maps `G_i → N` to legs on every object through the inclusions.
pub fn legs_from_charts(g: &TopGluingFunctor, charts: &[ContinuousMap]) -> Result<BTreeMap<GlueObject, ContinuousMap>, GlueError> {
    g.index
        .objects()
        .iter()
        .map(|a| {
            let leg = match *a {
                GlueObject::Single(i) => charts[i].clone(),
                GlueObject::Pair(i, j) => g.inclusion(i, j).then(&charts[i])?,
                GlueObject::Triple(i, j, k) => g.triple_projection(i, j, k, j).then(g.inclusion(i, j))?.then(&charts[i])?,
            };
            Ok((*a, leg))
        })
        .collect()
}

fn check_equivalence(points: usize, relation: &[(usize, usize)]) -> Result<(), Falsification> {
    let set: HashSet<(usize, usize)> = relation.iter().copied().collect();
    let claim = "the gluing relation is already an equivalence relation";
    if let Some(x) = (0..points).find(|&x| !set.contains(&(x, x))) {
        return Err(Falsification::new(claim, format!("not reflexive at {x}")));
    }
    if let Some(&(a, b)) = relation.iter().find(|&&(a, b)| !set.contains(&(b, a))) {
        return Err(Falsification::new(claim, format!("not symmetric at ({a},{b})")));
    }
    let mut succ: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(a, b) in relation {
        succ.entry(a).or_default().push(b);
    }
    for &(a, b) in relation {
        for &c in &succ[&b] {
            if !set.contains(&(a, c)) {
                return Err(Falsification::new(claim, format!("not transitive at ({a},{b},{c})")));
            }
        }
    }
    Ok(())
}

/// Legs `ψ_a: G_a → N`, read in Top.
#[derive(Debug, Clone)]
pub struct TopCone {
    pub apex: Space,
    pub legs: BTreeMap<GlueObject, ContinuousMap>,
}

impl TopCone {
    /// Legs `h ∘ ι_a` for a map `h: Q → N`.
    pub fn through(glued: &BTreeMap<GlueObject, ContinuousMap>, h: &ContinuousMap) -> Result<Self, GlueError> {
        let legs = glued
            .iter()
            .map(|(a, f)| Ok((*a, f.then(h)?)))
            .collect::<Result<_, TopologyError>>()?;
        Ok(TopCone { apex: h.cod().clone(), legs })
    }
}

fn check_legs(apex: &Space, legs: &BTreeMap<GlueObject, ContinuousMap>, g: &TopGluingFunctor) -> Result<(), GlueError> {
    for a in g.index.objects() {
        match legs.get(a) {
            Some(f) if f.dom() == &g.objects[a] && f.cod() == apex => {}
            _ => return Err(GlueError::EndpointMismatch(*a)),
        }
    }
    Ok(())
}

/// The three cone characterizations for a family of legs.
pub fn is_cone(cone: &TopCone, g: &TopGluingFunctor) -> Result<ConeCheck, GlueError> {
    check_legs(&cone.apex, &cone.legs, g)?;
    Ok(cone_characterizations(g, &cone.legs)?)
}

/// Per-condition outcome of checking a candidate glued space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GlueReport {
    pub variant: TopVariant,
    pub conditions: BTreeMap<String, bool>,
    pub verdict: bool,
}

/// Conditions (a)-(e) of the glued-space characterization plus the final-topology,
/// overlap-image and triple-image checks.
pub fn verify_glued(q: &Space, iota: &BTreeMap<GlueObject, ContinuousMap>, g: &TopGluingFunctor) -> GlueReport {
    let mut conditions = BTreeMap::new();
    if check_legs(q, iota, g).is_err() {
        for key in ["a", "b", "c", "d", "e", "final_topology", "overlap_law", "triple_law"] {
            conditions.insert(key.to_string(), false);
        }
        return GlueReport { variant: g.variant, conditions, verdict: false };
    }
    let n = g.n();
    let chart = |i: usize| &iota[&GlueObject::Single(i)];
    let image = |a: GlueObject| {
        let f = &iota[&a];
        f.image(f.dom().full())
    };

    let mut a_ok = true;
    let mut c_ok = true;
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let via_chart = g.inclusion(i, j).then(chart(i)).expect("typed");
            a_ok &= iota[&GlueObject::Pair(i, j)] == via_chart;
            let twisted = g.transition(i, j).then(g.inclusion(j, i)).and_then(|f| f.then(chart(j))).expect("typed");
            c_ok &= via_chart == twisted;
        }
    }
    let mut b_ok = true;
    let mut triple_ok = true;
    for (i, j, k) in distinct_triples(n).filter(|&(_, j, k)| j < k) {
        for via in [j, k] {
            let f = g.triple_projection(i, j, k, via).then(&iota[&GlueObject::Pair(i, via)]).expect("typed");
            b_ok &= iota[&GlueObject::Triple(i, j, k)] == f;
        }
        let meet = image(GlueObject::Single(i)).intersection(image(GlueObject::Single(j))).intersection(image(GlueObject::Single(k)));
        triple_ok &= image(GlueObject::Triple(i, j, k)) == meet;
    }
    let covered = (0..n).fold(PointSet::EMPTY, |acc, i| acc.union(image(GlueObject::Single(i))));
    let d_ok = covered == q.full();
    let e_ok = (0..n).all(|i| {
        let f = chart(i);
        f.is_injective() && f.is_continuous() && (g.variant == TopVariant::Top || f.is_open_map())
    });
    let mut overlap_ok = true;
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let meet = image(GlueObject::Single(i)).intersection(image(GlueObject::Single(j)));
            let from_i = chart(i).image(g.inclusion(i, j).image(g.inclusion(i, j).dom().full()));
            let from_j = chart(j).image(g.inclusion(j, i).image(g.inclusion(j, i).dom().full()));
            overlap_ok &= from_i == meet && from_j == meet;
        }
    }
    let charts: Vec<&ContinuousMap> = (0..n).map(chart).collect();
    let final_ok = final_topology(q.points(), &charts) == **q;

    for (key, v) in [
        ("a", a_ok),
        ("b", b_ok),
        ("c", c_ok),
        ("d", d_ok),
        ("e", e_ok),
        ("final_topology", final_ok),
        ("overlap_law", overlap_ok),
        ("triple_law", triple_ok),
    ] {
        conditions.insert(key.to_string(), v);
    }
    // (a)-(e) alone accept two identical charts collapsed onto one copy; the
    // pairwise-image law rules that out.
    let mut verdict = a_ok && b_ok && c_ok && d_ok && e_ok && overlap_ok;
    if g.variant == TopVariant::Top {
        verdict &= final_ok;
    }
    GlueReport { variant: g.variant, conditions, verdict }
}

/// The finest topology on `points` points making every map in `maps` continuous.
pub fn final_topology(points: usize, maps: &[&ContinuousMap]) -> FinSpace {
    let nbhd = (0..points)
        .map(|q| {
            let mut cur = PointSet::singleton(q);
            loop {
                let mut grown = cur;
                for f in maps {
                    for x in f.preimage(cur).iter() {
                        grown = grown.union(f.image(f.dom().minimal_open(x)));
                    }
                }
                if grown == cur {
                    break cur;
                }
                cur = grown;
            }
        })
        .collect();
    FinSpace::from_minimal(points, nbhd).expect("final topology")
}

/// `μ(q) = ψ_i(x)` for `q = ι_i(x)`.
pub fn mediating_morphism(
    cone: &TopCone,
    q: &Space,
    iota: &BTreeMap<GlueObject, ContinuousMap>,
    g: &TopGluingFunctor,
) -> Result<ContinuousMap, GlueError> {
    check_legs(&cone.apex, &cone.legs, g)?;
    check_legs(q, iota, g)?;
    let mut assign: Vec<Option<usize>> = vec![None; q.points()];
    for i in 0..g.n() {
        let chart = &iota[&GlueObject::Single(i)];
        let leg = &cone.legs[&GlueObject::Single(i)];
        for x in 0..chart.dom().points() {
            let slot = &mut assign[chart.apply(x)];
            match *slot {
                None => *slot = Some(leg.apply(x)),
                Some(y) if y == leg.apply(x) => {}
                Some(y) => {
                    return Err(Falsification::new(
                        "the mediating map is well defined",
                        format!("point {} has images {y} and {}", chart.apply(x), leg.apply(x)),
                    )
                    .into())
                }
            }
        }
    }
    let assign = assign
        .into_iter()
        .enumerate()
        .map(|(p, y)| y.ok_or(GlueError::NotCovered(p)))
        .collect::<Result<Vec<_>, _>>()?;
    let mu = ContinuousMap::new(q.clone(), cone.apex.clone(), assign)?;
    let open_ok = g.variant == TopVariant::Top || mu.is_open_map();
    if !mu.is_continuous() || !open_ok {
        return Err(Falsification::new(
            "the mediating map is a morphism",
            format!("continuous {}, open {}", mu.is_continuous(), open_ok),
        )
        .into());
    }
    Ok(mu)
}

/// Count, by enumerating every point function `Q → N`, the morphisms `μ` with
/// `μ ∘ ι_i = ψ_i`. `None` when `|N|^|Q|` exceeds `limit`.
pub fn count_mediating(
    cone: &TopCone,
    q: &Space,
    iota: &BTreeMap<GlueObject, ContinuousMap>,
    g: &TopGluingFunctor,
    limit: u64,
) -> Option<usize> {
    let (qn, nn) = (q.points(), cone.apex.points());
    let total = (nn as u64).checked_pow(qn as u32)?;
    if total > limit {
        return None;
    }
    let charts: Vec<(&ContinuousMap, &ContinuousMap)> =
        (0..g.n()).map(|i| (&iota[&GlueObject::Single(i)], &cone.legs[&GlueObject::Single(i)])).collect();
    let mut digits = vec![0usize; qn];
    let mut count = 0;
    for _ in 0..total {
        let commutes = charts
            .iter()
            .all(|(chart, leg)| (0..chart.dom().points()).all(|x| digits[chart.apply(x)] == leg.apply(x)));
        if commutes {
            let mu = ContinuousMap::new(q.clone(), cone.apex.clone(), digits.clone()).expect("in range");
            if mu.is_continuous() && (g.variant == TopVariant::Top || mu.is_open_map()) {
                count += 1;
            }
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < nn {
                break;
            }
            *d = 0;
        }
    }
    Some(count)
}

// Position of each point of `inner` within `outer` (both subsets of the same space).
fn local_inclusion(inner: PointSet, outer: PointSet) -> Vec<usize> {
    let outer_pts: Vec<usize> = outer.iter().collect();
    inner.iter().map(|x| outer_pts.iter().position(|&y| y == x).expect("nested")).collect()
}

/// The functor of a cover by subsets together with the inclusion legs into `space`.
/// With `variant = OTop` the members must be open.
pub fn cover_functor(
    space: &Space,
    cover: &[PointSet],
    variant: TopVariant,
) -> Result<(TopGluingFunctor, BTreeMap<GlueObject, ContinuousMap>), GlueError> {
    if cover.is_empty() {
        return Err(GlueError::NotACover("empty family".into()));
    }
    let union = cover.iter().fold(PointSet::EMPTY, |a, c| a.union(*c));
    if union != space.full() {
        return Err(GlueError::NotACover(format!("union {union} is not the whole space")));
    }
    if let Some(c) = cover.iter().find(|c| !c.is_subset(space.full())) {
        return Err(GlueError::NotACover(format!("{c} is not a subset")));
    }
    if variant == TopVariant::OTop {
        if let Some(c) = cover.iter().find(|c| !space.is_open(**c)) {
            return Err(GlueError::NotACover(format!("{c} is not open")));
        }
    }
    let n = cover.len();
    let sub = |set: PointSet| space.subspace(set).map(|(s, _)| s);
    let charts: Vec<Space> = cover.iter().map(|&c| sub(c)).collect::<Result<_, _>>()?;
    let mut overlap_spaces = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            overlap_spaces[i][j] = Some(if i == j { charts[i].clone() } else { sub(cover[i].intersection(cover[j]))? });
        }
    }
    let overlap = |i: usize, j: usize| overlap_spaces[i][j].clone().expect("filled");
    let mut inclusions = Vec::new();
    let mut transitions = Vec::new();
    for i in 0..n {
        let mut inc_row = Vec::new();
        let mut tr_row = Vec::new();
        for j in 0..n {
            let meet = cover[i].intersection(cover[j]);
            inc_row.push(ContinuousMap::new(overlap(i, j), charts[i].clone(), local_inclusion(meet, cover[i]))?);
            tr_row.push(ContinuousMap::new(overlap(i, j), overlap(j, i), (0..meet.len()).collect())?);
        }
        inclusions.push(inc_row);
        transitions.push(tr_row);
    }
    let mut triples = BTreeMap::new();
    let mut triple_spaces = HashMap::new();
    for (i, j, k) in distinct_triples(n).filter(|&(_, j, k)| j < k) {
        let meet = cover[i].intersection(cover[j]).intersection(cover[k]);
        let t = sub(meet)?;
        triple_spaces.insert((i, j, k), t.clone());
        let to_lower = ContinuousMap::new(t.clone(), overlap(i, j), local_inclusion(meet, cover[i].intersection(cover[j])))?;
        let to_upper = ContinuousMap::new(t.clone(), overlap(i, k), local_inclusion(meet, cover[i].intersection(cover[k])))?;
        triples.insert((i, j, k), TripleOverlap { space: t, to_lower, to_upper });
    }
    let mut triple_transitions = BTreeMap::new();
    for (i, j, k) in distinct_triples(n) {
        let key = |a: usize, b: usize, c: usize| {
            let (lo, hi) = ordered(b, c);
            triple_spaces[&(a, lo, hi)].clone()
        };
        let (src, dst) = (key(i, j, k), key(j, i, k));
        let size = src.points();
        triple_transitions.insert((i, j, k), ContinuousMap::new(src, dst, (0..size).collect())?);
    }
    let data = TopGluingData { variant, charts, inclusions, transitions, triples, triple_transitions };
    let functor = functor_from_data(&data)?;
    let mut legs = BTreeMap::new();
    for a in functor.index.objects() {
        let set = a.indices().iter().fold(space.full(), |acc, &i| acc.intersection(cover[i]));
        legs.insert(*a, ContinuousMap::new(functor.objects[a].clone(), space.clone(), set.iter().collect())?);
    }
    Ok((functor, legs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn single_chart() {
        let s = Arc::new(FinSpace::sierpinski());
        let (g, legs) = cover_functor(&s, &[s.full()], TopVariant::OTop).unwrap();
        assert_eq!(g.objects().len(), 1);
        let glued = standard_representative(&g).unwrap();
        assert_eq!(*glued.q, *s);
        assert!(verify_glued(&s, &legs, &g).verdict);
    }

    #[test]
    fn sierpinski_cover() {
        let s = Arc::new(FinSpace::sierpinski());
        let (g, legs) = cover_functor(&s, &[s.full(), PointSet::singleton(0)], TopVariant::OTop).unwrap();
        assert!(g.violations().is_empty());
        let r = verify_glued(&s, &legs, &g);
        assert!(r.conditions.values().all(|&b| b), "{r:?}");
        assert!(cover_functor(&s, &[PointSet::singleton(1), PointSet::singleton(0)], TopVariant::OTop).is_err());
    }
}
