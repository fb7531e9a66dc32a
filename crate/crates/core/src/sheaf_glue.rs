//! Gluing presheaves of abelian groups along an open cover: gluing data, the
//! GL(I)-shaped functor into the enriched presheaf category, the limit presheaf
//! built from compatible families, and the check that a candidate is glued.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::group::{factor_through, kernel, product, tuple_hom, AbHom, FgAbGroup, Group, GroupError, IntMatrix};
use crate::index::{check_generator_relations, cone_characterizations, GlueObject, Generator, GluingDiagram, GluingIndexCategory, IndexError};
use crate::presheaf::{EnrichedMorphism, Presheaf, PresheafError, PresheafRef};
use crate::space::{PointSet, Space};
use crate::top_glue::Violation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafGlueError {
    #[error("invalid sheaf gluing data: {}", list(.0))]
    InvalidData(Vec<Violation>),
    #[error("invalid sheaf gluing functor: {}", list(.0))]
    InvalidFunctor(Vec<Violation>),
    #[error("not an open cover: {0}")]
    NotACover(String),
    #[error("{0} is not an open of the limit")]
    UnknownOpen(PointSet),
    #[error("projection family has {got} members, expected {expected}")]
    ProjectionCount { got: usize, expected: usize },
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Index(#[from] IndexError),
}

fn list(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

fn push(out: &mut Vec<Violation>, condition: &'static str, detail: String) {
    out.push(Violation { condition, detail });
}

fn check_cover(base: &Space, cover: &[PointSet]) -> Result<(), SheafGlueError> {
    if cover.is_empty() {
        return Err(SheafGlueError::NotACover("empty family".into()));
    }
    if let Some(u) = cover.iter().find(|u| !base.is_open(**u)) {
        return Err(SheafGlueError::NotACover(format!("{u} is not open")));
    }
    let union = cover.iter().fold(PointSet::EMPTY, |a, u| a.union(*u));
    if union != base.full() {
        return Err(SheafGlueError::NotACover(format!("union {union} is not the whole space")));
    }
    Ok(())
}

/// Presheaves `F_i` on the members of an open cover with transition isomorphisms
/// `Φ_ij: F_i|U_ij → F_j|U_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct SheafGluingData {
    pub base: Space,
    pub cover: Vec<PointSet>,
    pub sheaves: Vec<PresheafRef>,
    pub transitions: Vec<Vec<EnrichedMorphism>>,
}

impl SheafGluingData {
    pub fn n(&self) -> usize {
        self.cover.len()
    }

    /// Data with every transition the identity; the charts must agree on overlaps.
    pub fn identity_transitions(base: Space, cover: Vec<PointSet>, sheaves: Vec<PresheafRef>) -> Result<Self, SheafGlueError> {
        let n = cover.len();
        let mut transitions = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let w = cover[i].intersection(cover[j]);
                let src = Arc::new(sheaves[i].restrict_to(w)?);
                let dst = Arc::new(sheaves[j].restrict_to(w)?);
                let alpha = src.opens().iter().map(|&o| (o, AbHom::identity(src.sections(o).clone()))).collect();
                row.push(EnrichedMorphism::new(src, dst, alpha)?);
            }
            transitions.push(row);
        }
        Ok(SheafGluingData { base, cover, sheaves, transitions })
    }

    /// The restrictions of one sheaf to the members of a cover.
    pub fn from_sheaf(f: &PresheafRef, cover: Vec<PointSet>) -> Result<Self, SheafGlueError> {
        check_cover(f.space(), &cover)?;
        let sheaves = cover.iter().map(|&u| f.restrict_to(u).map(Arc::new)).collect::<Result<Vec<_>, _>>()?;
        SheafGluingData::identity_transitions(f.space().clone(), cover, sheaves)
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n();
        if let Err(e) = check_cover(&self.base, &self.cover) {
            push(&mut out, "cover", e.to_string());
            return out;
        }
        if self.sheaves.len() != n || self.transitions.len() != n || self.transitions.iter().any(|r| r.len() != n) {
            push(&mut out, "shape", format!("expected {n} charts and {n}x{n} transitions"));
            return out;
        }
        for (i, f) in self.sheaves.iter().enumerate() {
            if f.space() != &self.base || f.support() != self.cover[i] {
                push(&mut out, "shape", format!("F_{i} does not live on U_{i}"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for i in 0..n {
            for j in 0..n {
                let phi = &self.transitions[i][j];
                let w = self.cover[i].intersection(self.cover[j]);
                let expected_src = self.sheaves[i].restrict_to(w).expect("open");
                let expected_dst = self.sheaves[j].restrict_to(w).expect("open");
                if **phi.source() != expected_src || **phi.target() != expected_dst {
                    push(&mut out, "shape", format!("Φ_{i}{j} is not F_{i}|U_{i}{j} → F_{j}|U_{i}{j}"));
                    continue;
                }
                if !phi.is_natural() {
                    push(&mut out, "natural", format!("Φ_{i}{j} is not natural"));
                }
                if !phi.is_isomorphism() {
                    push(&mut out, "iso", format!("Φ_{i}{j} is not an isomorphism"));
                }
                if i == j && !phi.same(&EnrichedMorphism::identity(phi.source().clone())) {
                    push(&mut out, "identity", format!("Φ_{i}{i} is not the identity"));
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let w = self.cover[i].intersection(self.cover[j]);
                for o in self.base.opens_within(w) {
                    let round = self.transitions[i][j].component(o).then(self.transitions[j][i].component(o)).expect("typed");
                    if !round.same(&AbHom::identity(self.sheaves[i].sections(o).clone())) {
                        push(&mut out, "inverse", format!("Φ_{j}{i} ∘ Φ_{i}{j} is not the identity on {o}"));
                        break;
                    }
                }
            }
        }
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                for k in (0..n).filter(|&k| k != i && k != j) {
                    let w = self.cover[i].intersection(self.cover[j]).intersection(self.cover[k]);
                    for o in self.base.opens_within(w) {
                        let via = self.transitions[i][j].component(o).then(self.transitions[j][k].component(o)).expect("typed");
                        if !via.same(self.transitions[i][k].component(o)) {
                            push(&mut out, "cocycle", format!("Φ_{i}{k} ≠ Φ_{j}{k} ∘ Φ_{i}{j} at ({i},{j},{k}) on {o}"));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), SheafGlueError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(SheafGlueError::InvalidData(v))
        }
    }
}

/// A functor GL(I) → EPSh sending `[i]` to `(U_i, F_i)`.
#[derive(Debug, Clone)]
pub struct SheafGluingFunctor {
    base: Space,
    index: GluingIndexCategory,
    objects: BTreeMap<GlueObject, PresheafRef>,
    arrows: BTreeMap<Generator, EnrichedMorphism>,
}

impl PartialEq for SheafGluingFunctor {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.index == other.index && self.objects == other.objects && self.arrows == other.arrows
    }
}

impl SheafGluingFunctor {
    pub fn base(&self) -> &Space {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.index.n()
    }

    pub fn object(&self, a: &GlueObject) -> &PresheafRef {
        &self.objects[a]
    }

    pub fn objects(&self) -> &BTreeMap<GlueObject, PresheafRef> {
        &self.objects
    }

    pub fn arrow(&self, g: &Generator) -> &EnrichedMorphism {
        &self.arrows[g]
    }

    pub fn with_arrow(&self, g: Generator, m: EnrichedMorphism) -> Self {
        let mut out = self.clone();
        out.arrows.insert(g, m);
        out
    }

    pub fn chart(&self, i: usize) -> &PresheafRef {
        &self.objects[&GlueObject::Single(i)]
    }

    pub fn cover(&self) -> Vec<PointSet> {
        (0..self.n()).map(|i| self.chart(i).support()).collect()
    }

    /// `Φ_ij`, the image of `τ_ji`.
    pub fn transition(&self, i: usize, j: usize) -> &EnrichedMorphism {
        &self.arrows[&Generator::TauPair { i: j, j: i }]
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
        let cover = self.cover();
        if let Err(e) = check_cover(&self.base, &cover) {
            push(&mut out, "cover", e.to_string());
            return out;
        }
        for (a, f) in &self.objects {
            let expected = a.indices().iter().fold(self.base.full(), |acc, &i| acc.intersection(cover[i]));
            if f.space() != &self.base || f.support() != expected {
                push(&mut out, "shape", format!("image of {a} does not live on the expected open"));
            }
        }
        for g in self.index.generators() {
            let Some(m) = self.arrows.get(&g) else {
                push(&mut out, "shape", format!("no image for {g}"));
                continue;
            };
            if m.source() != &self.objects[&g.dom()] || m.target() != &self.objects[&g.cod()] {
                push(&mut out, "shape", format!("image of {g} has the wrong endpoints"));
                continue;
            }
            if !m.is_natural() {
                push(&mut out, "natural", format!("image of {} is not natural", g.label()));
            }
            let restriction_like = matches!(g, Generator::EtaPair { .. } | Generator::EtaTriple { .. });
            if restriction_like {
                let canonical = EnrichedMorphism::restriction(m.source().clone(), m.open_part()).expect("open");
                if !m.same(&canonical) {
                    push(&mut out, "restriction", format!("image of {} is not the canonical restriction", g.label()));
                }
            } else if !m.is_isomorphism() {
                push(&mut out, "iso", format!("image of {} is not an isomorphism", g.label()));
            }
        }
        if !out.is_empty() {
            return out;
        }
        match check_generator_relations(self) {
            Ok(fails) => {
                for f in fails {
                    push(&mut out, "relations", f.to_string());
                }
            }
            Err(e) => push(&mut out, "shape", e.to_string()),
        }
        out
    }

    pub fn validate(&self) -> Result<(), SheafGlueError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(SheafGlueError::InvalidFunctor(v))
        }
    }
}

impl GluingDiagram for SheafGluingFunctor {
    type Arrow = EnrichedMorphism;

    fn index(&self) -> &GluingIndexCategory {
        &self.index
    }

    fn generator_image(&self, g: &Generator) -> Option<EnrichedMorphism> {
        self.arrows.get(g).cloned()
    }

    fn identity(&self, a: GlueObject) -> EnrichedMorphism {
        EnrichedMorphism::identity(self.objects[&a].clone())
    }

    fn compose(&self, after: &EnrichedMorphism, before: &EnrichedMorphism) -> EnrichedMorphism {
        before.then(after).expect("composable images")
    }

    fn same(&self, a: &EnrichedMorphism, b: &EnrichedMorphism) -> bool {
        a.same(b)
    }
}

pub fn sheaf_functor_from_data(d: &SheafGluingData) -> Result<SheafGluingFunctor, SheafGlueError> {
    d.validate()?;
    let n = d.n();
    let index = GluingIndexCategory::new(n)?;
    let mut objects: BTreeMap<GlueObject, PresheafRef> = BTreeMap::new();
    for a in index.objects() {
        let f = match *a {
            GlueObject::Single(i) => d.sheaves[i].clone(),
            GlueObject::Pair(i, j) => d.transitions[i][j].source().clone(),
            GlueObject::Triple(i, j, k) => Arc::new(d.sheaves[i].restrict_to(d.cover[i].intersection(d.cover[j]).intersection(d.cover[k]))?),
        };
        objects.insert(*a, f);
    }
    let mut arrows = BTreeMap::new();
    for g in index.generators() {
        let m = match g {
            Generator::EtaPair { i, j } => {
                let r = EnrichedMorphism::restriction(objects[&GlueObject::Single(i)].clone(), d.cover[i].intersection(d.cover[j]))?;
                retarget(&r, &objects[&GlueObject::pair(i, j)])?
            }
            Generator::EtaTriple { i, j, k, via } => {
                let src = objects[&GlueObject::pair(i, via)].clone();
                let r = EnrichedMorphism::restriction(src, objects[&GlueObject::Triple(i, j, k)].support())?;
                retarget(&r, &objects[&GlueObject::Triple(i, j, k)])?
            }
            Generator::TauPair { i, j } => {
                let phi = &d.transitions[j][i];
                EnrichedMorphism::new(objects[&GlueObject::pair(j, i)].clone(), objects[&GlueObject::pair(i, j)].clone(), components(phi))?
            }
            Generator::TauTriple { i, j, k } => {
                let src = objects[&GlueObject::triple(j, i, k)].clone();
                let dst = objects[&GlueObject::triple(i, j, k)].clone();
                let phi = &d.transitions[j][i];
                let alpha = src.opens().iter().map(|&o| (o, phi.component(o).clone())).collect();
                EnrichedMorphism::new(src, dst, alpha)?
            }
        };
        arrows.insert(g, m);
    }
    Ok(SheafGluingFunctor { base: d.base.clone(), index, objects, arrows })
}

fn components(m: &EnrichedMorphism) -> HashMap<PointSet, AbHom> {
    m.source().opens().iter().map(|&o| (o, m.component(o).clone())).collect()
}

// Same morphism with the target replaced by an equal presheaf held elsewhere.
fn retarget(m: &EnrichedMorphism, target: &PresheafRef) -> Result<EnrichedMorphism, PresheafError> {
    EnrichedMorphism::new(m.source().clone(), target.clone(), components(m))
}

pub fn data_from_sheaf_functor(g: &SheafGluingFunctor) -> Result<SheafGluingData, SheafGlueError> {
    g.validate()?;
    let n = g.n();
    let sheaves = (0..n).map(|i| g.chart(i).clone()).collect();
    let transitions = (0..n).map(|i| (0..n).map(|j| g.transition(i, j).clone()).collect()).collect();
    Ok(SheafGluingData { base: g.base.clone(), cover: g.cover(), sheaves, transitions })
}

/// `L(V)` as the compatible families inside `∏ F_i(V ∩ U_i)`.
#[derive(Debug, Clone)]
pub struct LimitSheaf {
    pub sheaf: PresheafRef,
    pub projections: Vec<EnrichedMorphism>,
    families: HashMap<PointSet, Family>,
}

#[derive(Debug, Clone)]
struct Family {
    product: Group,
    factors: Vec<AbHom>,
    inclusion: AbHom,
}

impl LimitSheaf {
    /// `L(V) → ∏ F_i(V ∩ U_i)`.
    pub fn inclusion(&self, v: PointSet) -> Option<&AbHom> {
        self.families.get(&v).map(|f| &f.inclusion)
    }

    /// `π_a` for every object: `π_[i,j] = G(η_ij) ∘ π_i` and so on.
    pub fn legs(&self, g: &SheafGluingFunctor) -> BTreeMap<GlueObject, EnrichedMorphism> {
        legs_from(&self.projections, g)
    }
}

fn legs_from(projections: &[EnrichedMorphism], g: &SheafGluingFunctor) -> BTreeMap<GlueObject, EnrichedMorphism> {
    g.index
        .objects()
        .iter()
        .map(|a| {
            let leg = match *a {
                GlueObject::Single(i) => projections[i].clone(),
                GlueObject::Pair(i, j) => projections[i].then(g.arrow(&Generator::EtaPair { i, j })).expect("typed"),
                GlueObject::Triple(i, j, k) => projections[i]
                    .then(g.arrow(&Generator::EtaPair { i, j }))
                    .and_then(|m| m.then(g.arrow(&Generator::eta_triple(i, j, k, j))))
                    .expect("typed"),
            };
            (*a, leg)
        })
        .collect()
}

pub fn build_limit_sheaf(g: &SheafGluingFunctor) -> Result<LimitSheaf, SheafGlueError> {
    g.validate()?;
    let n = g.n();
    let cover = g.cover();
    let charts: Vec<&PresheafRef> = (0..n).map(|i| g.chart(i)).collect();
    let opens: Vec<PointSet> = g.base.opens().to_vec();
    let mut families = HashMap::new();
    for &v in &opens {
        let pieces: Vec<Group> = (0..n).map(|i| charts[i].sections(v.intersection(cover[i])).clone()).collect();
        let (prod, factors, _) = product(&pieces);
        let mut targets = Vec::new();
        let mut diffs = Vec::new();
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let w = v.intersection(cover[i]).intersection(cover[j]);
                let phi = g.transition(i, j).component(w);
                let left = factors[i].then(charts[i].restriction(v.intersection(cover[i]), w))?.then(phi)?;
                let right = factors[j].then(charts[j].restriction(v.intersection(cover[j]), w))?;
                targets.push(charts[j].sections(w).clone());
                diffs.push(left.sub(&right)?);
            }
        }
        let (constraints, _, _) = product(&targets);
        let constraint = tuple_hom(&prod, &constraints, &diffs)?;
        let (_, inclusion) = kernel(&constraint);
        families.insert(v, Family { product: prod, factors, inclusion });
    }
    let mut sections = HashMap::new();
    let mut restrictions = HashMap::new();
    for &v in &opens {
        sections.insert(v, families[&v].inclusion.dom().clone());
    }
    for &v in &opens {
        for &w in opens.iter().filter(|w| w.is_subset(v)) {
            let fv = &families[&v];
            let fw = &families[&w];
            let h = if v == w {
                AbHom::identity(sections[&v].clone())
            } else {
                let parts = (0..n)
                    .map(|i| fv.factors[i].then(charts[i].restriction(v.intersection(cover[i]), w.intersection(cover[i]))))
                    .collect::<Result<Vec<_>, _>>()?;
                let down = fv.inclusion.then(&tuple_hom(&fv.product, &fw.product, &parts)?)?;
                factor_through(&fw.inclusion, &down).expect("restrictions of compatible families stay compatible")
            };
            restrictions.insert((v, w), h);
        }
    }
    let sheaf = Arc::new(Presheaf::new(g.base.clone(), g.base.full(), sections, restrictions)?);
    let projections = (0..n)
        .map(|i| {
            let alpha = opens.iter().map(|&v| Ok((v, families[&v].inclusion.then(&families[&v].factors[i])?))).collect::<Result<_, GroupError>>()?;
            Ok(EnrichedMorphism::new(sheaf.clone(), charts[i].clone(), alpha)?)
        })
        .collect::<Result<Vec<_>, SheafGlueError>>()?;
    Ok(LimitSheaf { sheaf, projections, families })
}

/// The family of transported restrictions of `s ∈ F_i(V)` when `V ⊆ U_i`, as an element
/// of `L(V)`; `None` when `V` leaves `U_i` or the family is not compatible.
pub fn extend_section(g: &SheafGluingFunctor, limit: &LimitSheaf, i: usize, v: PointSet, s: &[BigInt]) -> Option<Vec<BigInt>> {
    let cover = g.cover();
    if i >= cover.len() || !v.is_subset(cover[i]) {
        return None;
    }
    let family = limit.families.get(&v)?;
    let chart = g.chart(i);
    if s.len() != chart.sections(v).ambient() {
        return None;
    }
    let mut coords = Vec::new();
    for (j, &uj) in cover.iter().enumerate() {
        let w = v.intersection(uj);
        let here = chart.restriction(v, w).apply(s);
        coords.extend(g.transition(i, j).component(w).apply(&here));
    }
    let one = Arc::new(FgAbGroup::free(1));
    let columns = vec![coords];
    let pick = AbHom::new(one, family.product.clone(), IntMatrix::from_columns(family.product.ambient(), &columns)).ok()?;
    let lifted = factor_through(&family.inclusion, &pick)?;
    Some(lifted.matrix().column(0))
}

/// Per-check outcome for a candidate glued presheaf.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SheafGlueReport {
    pub conditions: BTreeMap<String, bool>,
    pub verdict: bool,
}

/// The comparison `F → L` with components `(π_i,V)_i`, when every tuple is compatible.
pub fn comparison(limit: &LimitSheaf, candidate: &PresheafRef, projections: &[EnrichedMorphism]) -> Option<EnrichedMorphism> {
    let mut alpha = HashMap::new();
    for &v in candidate.opens() {
        let family = limit.families.get(&v)?;
        let parts: Vec<AbHom> = projections.iter().map(|p| p.component(v).clone()).collect();
        let into_product = tuple_hom(candidate.sections(v), &family.product, &parts).ok()?;
        alpha.insert(v, factor_through(&family.inclusion, &into_product)?);
    }
    EnrichedMorphism::new(candidate.clone(), limit.sheaf.clone(), alpha).ok()
}

/// Whether `(F, projections)` is a glued presheaf: the projections form a cone and the
/// comparison to the limit is a natural isomorphism compatible with both families.
pub fn verify_sheaf_glued(
    candidate: &PresheafRef,
    projections: &[EnrichedMorphism],
    g: &SheafGluingFunctor,
    limit: &LimitSheaf,
) -> Result<SheafGlueReport, SheafGlueError> {
    let n = g.n();
    if projections.len() != n {
        return Err(SheafGlueError::ProjectionCount { got: projections.len(), expected: n });
    }
    let mut conditions = BTreeMap::new();
    let endpoints = candidate.space() == &g.base
        && candidate.support() == g.base.full()
        && projections.iter().enumerate().all(|(i, p)| p.source() == candidate && p.target() == g.chart(i));
    conditions.insert("endpoints".to_string(), endpoints);
    if !endpoints {
        return Ok(SheafGlueReport { conditions, verdict: false });
    }
    let natural = projections.iter().all(EnrichedMorphism::is_natural);
    conditions.insert("natural".to_string(), natural);
    let cone = natural && cone_characterizations(g, &legs_from(projections, g))?.all();
    conditions.insert("cone".to_string(), cone);
    let cmp = comparison(limit, candidate, projections);
    conditions.insert("comparison".to_string(), cmp.is_some());
    let (iso, commutes) = match &cmp {
        Some(c) => (
            c.is_natural() && c.is_isomorphism(),
            (0..n).all(|i| c.then(&limit.projections[i]).map(|m| m.same(&projections[i])).unwrap_or(false)),
        ),
        None => (false, false),
    };
    conditions.insert("isomorphism".to_string(), iso);
    conditions.insert("commutes".to_string(), commutes);
    let verdict = conditions.values().all(|&b| b);
    Ok(SheafGlueReport { conditions, verdict })
}

/// `F` transported along per-open isomorphisms `F(V) → F'(V)`; returns `F'` and the
/// natural isomorphism `F' → F`.
pub fn transport(f: &PresheafRef, isos: &HashMap<PointSet, (AbHom, AbHom)>) -> Result<(PresheafRef, EnrichedMorphism), SheafGlueError> {
    let sections: HashMap<PointSet, Group> = f.opens().iter().map(|v| (*v, isos[v].0.cod().clone())).collect();
    let mut restrictions = HashMap::new();
    for (&(v, w), r) in f.restrictions() {
        let h = isos[&v].1.then(r)?.then(&isos[&w].0)?;
        restrictions.insert((v, w), h);
    }
    let twisted = Arc::new(Presheaf::new(f.space().clone(), f.support(), sections, restrictions)?);
    let back = f.opens().iter().map(|v| (*v, isos[v].1.clone())).collect();
    let psi = EnrichedMorphism::new(twisted.clone(), f.clone(), back)?;
    Ok((twisted, psi))
}

/// Re-present every section group in Smith normal form.
pub fn canonical_twist(f: &PresheafRef) -> Result<(PresheafRef, EnrichedMorphism), SheafGlueError> {
    let isos = f
        .opens()
        .iter()
        .map(|v| {
            let (_, to, from) = f.sections(*v).canonical();
            (*v, (to, from))
        })
        .collect();
    transport(f, &isos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::locally_constant;
    use crate::space::FinSpace;

    fn two_origins_base() -> Space {
        // points 0, 1 the origins, 2 the common punctured part
        Arc::new(FinSpace::new(3, vec![PointSet::EMPTY, PointSet(0b100), PointSet(0b101), PointSet(0b110), PointSet(0b111)]).unwrap())
    }

    #[test]
    fn constant_z_on_two_charts() {
        let base = two_origins_base();
        let z = Arc::new(FgAbGroup::free(1));
        let cover = vec![PointSet(0b101), PointSet(0b110)];
        let sheaves = cover.iter().map(|&u| Arc::new(locally_constant(base.clone(), u, z.clone()).unwrap())).collect();
        let d = SheafGluingData::identity_transitions(base.clone(), cover, sheaves).unwrap();
        let g = sheaf_functor_from_data(&d).unwrap();
        assert!(g.violations().is_empty());
        assert_eq!(data_from_sheaf_functor(&g).unwrap(), d);
        let limit = build_limit_sheaf(&g).unwrap();
        assert_eq!(limit.sheaf.sections(base.full()).to_string(), "Z");
        let r = verify_sheaf_glued(&limit.sheaf, &limit.projections, &g, &limit).unwrap();
        assert!(r.verdict, "{r:?}");
        assert!(limit.sheaf.is_sheaf());
        let (twisted, psi) = canonical_twist(&limit.sheaf).unwrap();
        let moved: Vec<_> = limit.projections.iter().map(|p| psi.then(p).unwrap()).collect();
        assert!(verify_sheaf_glued(&twisted, &moved, &g, &limit).unwrap().verdict);
        let s = vec![BigInt::from(5)];
        let ext = extend_section(&g, &limit, 0, PointSet(0b101), &s).unwrap();
        let back = limit.projections[0].component(PointSet(0b101)).apply(&ext);
        assert!(g.chart(0).sections(PointSet(0b101)).elements_equal(&back, &s));
    }

    #[test]
    fn disjoint_charts_give_product() {
        let base = Arc::new(FinSpace::discrete(2));
        let z = Arc::new(FgAbGroup::free(1));
        let cover = vec![PointSet(0b01), PointSet(0b10)];
        let sheaves = cover.iter().map(|&u| Arc::new(locally_constant(base.clone(), u, z.clone()).unwrap())).collect();
        let d = SheafGluingData::identity_transitions(base.clone(), cover, sheaves).unwrap();
        let limit = build_limit_sheaf(&sheaf_functor_from_data(&d).unwrap()).unwrap();
        assert_eq!(limit.sheaf.sections(base.full()).free_rank(), 2);
    }
}
