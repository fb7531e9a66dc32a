//! Presheaves of finitely generated abelian groups on an open `U` of a finite
//! space, morphisms of the enriched presheaf category, and the sheaf test.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::group::{equalizer, factor_through, kernel, product, tuple_hom, AbHom, FgAbGroup, Group, GroupError};
use crate::space::{PointSet, Space};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresheafError {
    #[error("{0} is not open")]
    NotOpen(PointSet),
    #[error("no group given for the open {0}")]
    MissingOpen(PointSet),
    #[error("no restriction {0} > {1}")]
    MissingRestriction(PointSet, PointSet),
    #[error("restriction {0} > {1} has the wrong endpoints")]
    WrongEndpoints(PointSet, PointSet),
    #[error("restriction {0} > {0} is not the identity")]
    NotIdentity(PointSet),
    #[error("functoriality fails for {}", fmt_chains(.0))]
    Functoriality(Vec<(PointSet, PointSet, PointSet)>),
    #[error("presheaves live on different spaces")]
    DifferentSpaces,
    #[error("open part {0} is not inside {1}")]
    OpenPartNotInside(PointSet, PointSet),
    #[error("component at {0} is missing or has the wrong endpoints")]
    BadComponent(PointSet),
    #[error("morphisms do not compose")]
    NotComposable,
    #[error(transparent)]
    Group(#[from] GroupError),
}

fn fmt_chains(chains: &[(PointSet, PointSet, PointSet)]) -> String {
    chains.iter().map(|(u, v, w)| format!("{w} ⊆ {v} ⊆ {u}")).collect::<Vec<_>>().join(", ")
}

/// A presheaf on the opens of `space` contained in the open `support`.
#[derive(Clone)]
pub struct Presheaf {
    space: Space,
    support: PointSet,
    opens: Vec<PointSet>,
    sections: HashMap<PointSet, Group>,
    restrictions: HashMap<(PointSet, PointSet), AbHom>,
}

pub type PresheafRef = Arc<Presheaf>;

impl fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.opens.iter().map(|o| format!("{o}: {}", self.sections[o])).collect();
        write!(f, "Presheaf on {} [{}]", self.support, items.join("; "))
    }
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space
            && self.support == other.support
            && self.opens.iter().all(|o| self.sections[o] == other.sections[o])
            && self.restrictions.len() == other.restrictions.len()
            && self.restrictions.iter().all(|(k, h)| other.restrictions.get(k) == Some(h))
    }
}

impl Presheaf {
    /// Validate a fully specified presheaf.
    pub fn new(
        space: Space,
        support: PointSet,
        sections: HashMap<PointSet, Group>,
        restrictions: HashMap<(PointSet, PointSet), AbHom>,
    ) -> Result<Self, PresheafError> {
        let ps = Presheaf::assemble(space, support, sections, restrictions)?;
        ps.check_functoriality()?;
        Ok(ps)
    }

    /// Complete restrictions given on some inclusions by composing along chains, then validate.
    /// Missing identity restrictions are filled in.
    pub fn from_generators(
        space: Space,
        support: PointSet,
        sections: HashMap<PointSet, Group>,
        given: HashMap<(PointSet, PointSet), AbHom>,
    ) -> Result<Self, PresheafError> {
        if !space.is_open(support) {
            return Err(PresheafError::NotOpen(support));
        }
        let opens: Vec<PointSet> = space.opens_within(support).collect();
        let mut all = given.clone();
        for &u in &opens {
            let group = sections.get(&u).ok_or(PresheafError::MissingOpen(u))?;
            all.entry((u, u)).or_insert_with(|| AbHom::identity(group.clone()));
        }
        for &u in &opens {
            // breadth-first along given restrictions
            let mut reached: HashMap<PointSet, AbHom> = HashMap::from([(u, all[&(u, u)].clone())]);
            let mut queue = VecDeque::from([u]);
            while let Some(v) = queue.pop_front() {
                let here = reached[&v].clone();
                for (&(a, b), h) in &given {
                    if a == v && b != v && !reached.contains_key(&b) {
                        reached.insert(b, here.then(h)?);
                        queue.push_back(b);
                    }
                }
            }
            for (v, h) in reached {
                all.entry((u, v)).or_insert(h);
            }
        }
        Presheaf::new(space, support, sections, all)
    }

    fn assemble(
        space: Space,
        support: PointSet,
        sections: HashMap<PointSet, Group>,
        restrictions: HashMap<(PointSet, PointSet), AbHom>,
    ) -> Result<Self, PresheafError> {
        if !space.is_open(support) {
            return Err(PresheafError::NotOpen(support));
        }
        let opens: Vec<PointSet> = space.opens_within(support).collect();
        for &u in &opens {
            if !sections.contains_key(&u) {
                return Err(PresheafError::MissingOpen(u));
            }
        }
        for &u in &opens {
            for &v in opens.iter().filter(|v| v.is_subset(u)) {
                let h = restrictions.get(&(u, v)).ok_or(PresheafError::MissingRestriction(u, v))?;
                if h.dom() != &sections[&u] || h.cod() != &sections[&v] {
                    return Err(PresheafError::WrongEndpoints(u, v));
                }
            }
            if !restrictions[&(u, u)].same(&AbHom::identity(sections[&u].clone())) {
                return Err(PresheafError::NotIdentity(u));
            }
        }
        let restrictions = restrictions.into_iter().filter(|((u, v), _)| opens.contains(u) && opens.contains(v)).collect();
        let sections = sections.into_iter().filter(|(u, _)| opens.contains(u)).collect();
        Ok(Presheaf { space, support, opens, sections, restrictions })
    }

    fn check_functoriality(&self) -> Result<(), PresheafError> {
        let mut bad = Vec::new();
        for &u in &self.opens {
            for &v in self.opens.iter().filter(|v| v.is_subset(u) && **v != u) {
                for &w in self.opens.iter().filter(|w| w.is_subset(v) && **w != v) {
                    let composite = self.restriction(u, v).then(self.restriction(v, w))?;
                    if !composite.same(self.restriction(u, w)) {
                        bad.push((u, v, w));
                    }
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(PresheafError::Functoriality(bad))
        }
    }

    /// Every open gets the same group, every restriction is the identity.
    pub fn constant(space: Space, support: PointSet, group: Group) -> Result<Self, PresheafError> {
        let opens: Vec<PointSet> = space.opens_within(support).collect();
        let sections = opens.iter().map(|&u| (u, group.clone())).collect();
        let restrictions = opens
            .iter()
            .flat_map(|&u| opens.iter().filter(move |v| v.is_subset(u)).map(move |&v| (u, v)))
            .map(|k| (k, AbHom::identity(group.clone())))
            .collect();
        Presheaf::new(space, support, sections, restrictions)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn support(&self) -> PointSet {
        self.support
    }

    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn sections(&self, u: PointSet) -> &Group {
        &self.sections[&u]
    }

    pub fn restriction(&self, u: PointSet, v: PointSet) -> &AbHom {
        &self.restrictions[&(u, v)]
    }

    pub fn restrictions(&self) -> impl Iterator<Item = (&(PointSet, PointSet), &AbHom)> {
        self.restrictions.iter()
    }

    /// `F|_W` for an open `W` inside the support.
    pub fn restrict_to(&self, w: PointSet) -> Result<Presheaf, PresheafError> {
        if !self.space.is_open(w) {
            return Err(PresheafError::NotOpen(w));
        }
        if !w.is_subset(self.support) {
            return Err(PresheafError::OpenPartNotInside(w, self.support));
        }
        let opens: Vec<PointSet> = self.space.opens_within(w).collect();
        let sections = opens.iter().map(|o| (*o, self.sections[o].clone())).collect();
        let restrictions = self
            .restrictions
            .iter()
            .filter(|((a, b), _)| a.is_subset(w) && b.is_subset(w))
            .map(|(k, h)| (*k, h.clone()))
            .collect();
        Ok(Presheaf { space: self.space.clone(), support: w, opens, sections, restrictions })
    }

    /// The covers `is_sheaf` examines for the open `v`.
    pub fn cover_family(&self, v: PointSet) -> Vec<Vec<PointSet>> {
        let mut covers: BTreeSet<Vec<PointSet>> = BTreeSet::new();
        let mut minimal: Vec<PointSet> = v.iter().map(|x| self.space.minimal_open(x)).collect();
        minimal.sort();
        minimal.dedup();
        covers.insert(minimal);
        let parts: Vec<PointSet> = self.space.opens_within(v).filter(|o| !o.is_empty() && *o != v).collect();
        let irredundant = |c: &[PointSet]| {
            (0..c.len()).all(|skip| {
                c.iter().enumerate().filter(|(p, _)| *p != skip).fold(PointSet::EMPTY, |a, (_, o)| a.union(*o)) != v
            })
        };
        for a in 0..parts.len() {
            for b in a + 1..parts.len() {
                let pair = [parts[a], parts[b]];
                if parts[a].union(parts[b]) == v && irredundant(&pair) {
                    covers.insert(pair.to_vec());
                }
                for c in b + 1..parts.len() {
                    let triple = [parts[a], parts[b], parts[c]];
                    if triple.iter().fold(PointSet::EMPTY, |acc, o| acc.union(*o)) == v && irredundant(&triple) {
                        covers.insert(triple.to_vec());
                    }
                }
            }
        }
        covers.into_iter().collect()
    }

    /// Identity and gluing axioms for a single cover of `v`.
    pub fn check_cover(&self, v: PointSet, cover: &[PointSet]) -> Result<(), SheafFailure> {
        let groups: Vec<Group> = cover.iter().map(|c| self.sections[c].clone()).collect();
        let (prod, projections, _) = product(&groups);
        let res: Vec<AbHom> = cover.iter().map(|&c| self.restriction(v, c).clone()).collect();
        let r = tuple_hom(&self.sections[&v], &prod, &res).expect("restrictions share a domain");
        let fail = |axiom| SheafFailure::Axiom { open: v, cover: cover.to_vec(), axiom };
        if !r.is_injective() {
            return Err(fail(Axiom::Identity));
        }
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut overlaps = Vec::new();
        for a in 0..cover.len() {
            for b in a + 1..cover.len() {
                let w = cover[a].intersection(cover[b]);
                overlaps.push(self.sections[&w].clone());
                left.push(projections[a].then(self.restriction(cover[a], w)).expect("typed"));
                right.push(projections[b].then(self.restriction(cover[b], w)).expect("typed"));
            }
        }
        let (target, _, _) = product(&overlaps);
        let f = tuple_hom(&prod, &target, &left).expect("typed");
        let g = tuple_hom(&prod, &target, &right).expect("typed");
        let (_, incl) = equalizer(&f, &g).expect("parallel pair");
        match factor_through(&incl, &r) {
            Some(into_eq) if into_eq.is_surjective() => Ok(()),
            _ => Err(fail(Axiom::Gluing)),
        }
    }

    pub fn check_sheaf(&self) -> Result<(), SheafFailure> {
        if !self.sections[&PointSet::EMPTY].is_trivial() {
            return Err(SheafFailure::EmptyNotTrivial);
        }
        for &v in self.opens.iter().filter(|v| !v.is_empty()) {
            for cover in self.cover_family(v) {
                self.check_cover(v, &cover)?;
            }
        }
        Ok(())
    }

    pub fn is_sheaf(&self) -> bool {
        self.check_sheaf().is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Identity,
    Gluing,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafFailure {
    #[error("sections over the empty set are not trivial")]
    EmptyNotTrivial,
    #[error("{axiom:?} axiom fails for {open} covered by {cover:?}")]
    Axiom { open: PointSet, cover: Vec<PointSet>, axiom: Axiom },
}

/// A morphism `(U, F) → (V, G)` with `V ⊆ U`: components `F(W) → G(W ∩ V)` for opens `W ⊆ U`.
#[derive(Clone)]
pub struct EnrichedMorphism {
    source: PresheafRef,
    target: PresheafRef,
    alpha: HashMap<PointSet, AbHom>,
}

impl fmt::Debug for EnrichedMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EnrichedMorphism({} -> {})", self.source.support, self.target.support)
    }
}

impl PartialEq for EnrichedMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.alpha.iter().all(|(w, h)| other.alpha.get(w) == Some(h))
    }
}

/// A square `W' ⊆ W` whose naturality condition fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FailingSquare {
    pub outer: PointSet,
    pub inner: PointSet,
}

impl EnrichedMorphism {
    pub fn new(
        source: PresheafRef,
        target: PresheafRef,
        alpha: HashMap<PointSet, AbHom>,
    ) -> Result<Self, PresheafError> {
        if source.space != target.space {
            return Err(PresheafError::DifferentSpaces);
        }
        if !target.support.is_subset(source.support) {
            return Err(PresheafError::OpenPartNotInside(target.support, source.support));
        }
        for &w in &source.opens {
            let h = alpha.get(&w).ok_or(PresheafError::BadComponent(w))?;
            if h.dom() != source.sections(w) || h.cod() != target.sections(w.intersection(target.support)) {
                return Err(PresheafError::BadComponent(w));
            }
        }
        Ok(EnrichedMorphism { source, target, alpha })
    }

    /// `(id, id)` on `(U, F)`.
    pub fn identity(f: PresheafRef) -> Self {
        let alpha = f.opens.iter().map(|&w| (w, AbHom::identity(f.sections(w).clone()))).collect();
        EnrichedMorphism { source: f.clone(), target: f, alpha }
    }

    /// The canonical `(U, F) → (V, F|_V)` with components `F(W) → F(W ∩ V)`.
    pub fn restriction(f: PresheafRef, v: PointSet) -> Result<Self, PresheafError> {
        let target = Arc::new(f.restrict_to(v)?);
        let alpha = f.opens.iter().map(|&w| (w, f.restriction(w, w.intersection(v)).clone())).collect();
        Ok(EnrichedMorphism { source: f, target, alpha })
    }

    /// Identity open part, componentwise multiplication by `k`.
    pub fn scaling(f: PresheafRef, k: i64) -> Self {
        let alpha = f.opens.iter().map(|&w| (w, AbHom::scalar(f.sections(w).clone(), k))).collect();
        EnrichedMorphism { source: f.clone(), target: f, alpha }
    }

    pub fn source(&self) -> &PresheafRef {
        &self.source
    }

    pub fn target(&self) -> &PresheafRef {
        &self.target
    }

    pub fn open_part(&self) -> PointSet {
        self.target.support
    }

    pub fn component(&self, w: PointSet) -> &AbHom {
        &self.alpha[&w]
    }

    pub fn with_component(&self, w: PointSet, h: AbHom) -> Result<Self, PresheafError> {
        let mut alpha = self.alpha.clone();
        alpha.insert(w, h);
        EnrichedMorphism::new(self.source.clone(), self.target.clone(), alpha)
    }

    /// Every naturality square that fails.
    pub fn failing_squares(&self) -> Vec<FailingSquare> {
        let v = self.open_part();
        let mut out = Vec::new();
        for &w in &self.source.opens {
            for &w2 in self.source.opens.iter().filter(|o| o.is_subset(w) && **o != w) {
                let down = self.target.restriction(w.intersection(v), w2.intersection(v));
                let lhs = self.alpha[&w].then(down).expect("typed");
                let rhs = self.source.restriction(w, w2).then(&self.alpha[&w2]).expect("typed");
                if !lhs.same(&rhs) {
                    out.push(FailingSquare { outer: w, inner: w2 });
                }
            }
        }
        out
    }

    pub fn is_natural(&self) -> bool {
        self.failing_squares().is_empty()
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &EnrichedMorphism) -> Result<EnrichedMorphism, PresheafError> {
        if *self.target != *next.source {
            return Err(PresheafError::NotComposable);
        }
        let v = self.open_part();
        let alpha = self
            .source
            .opens
            .iter()
            .map(|&w| Ok((w, self.alpha[&w].then(&next.alpha[&w.intersection(v)])?)))
            .collect::<Result<_, GroupError>>()?;
        Ok(EnrichedMorphism { source: self.source.clone(), target: next.target.clone(), alpha })
    }

    /// Equality as morphisms: same endpoints, components equal as homs.
    pub fn same(&self, other: &EnrichedMorphism) -> bool {
        self.source.support == other.source.support
            && self.target.support == other.target.support
            && self.source.opens.iter().all(|w| match other.alpha.get(w) {
                Some(h) => self.alpha[w].same(h),
                None => false,
            })
    }

    /// Identity open part and every component an isomorphism.
    pub fn is_isomorphism(&self) -> bool {
        self.open_part() == self.source.support && self.alpha.values().all(AbHom::is_isomorphism)
    }

    pub fn inverse(&self) -> Option<EnrichedMorphism> {
        if self.open_part() != self.source.support {
            return None;
        }
        let alpha = self
            .alpha
            .iter()
            .map(|(w, h)| h.inverse().map(|inv| (*w, inv)))
            .collect::<Option<HashMap<_, _>>>()?;
        Some(EnrichedMorphism { source: self.target.clone(), target: self.source.clone(), alpha })
    }

    /// Restrict source and target to an open `w` inside the open part.
    pub fn restrict_to(&self, w: PointSet) -> Result<EnrichedMorphism, PresheafError> {
        let source = Arc::new(self.source.restrict_to(w)?);
        let target = Arc::new(self.target.restrict_to(w)?);
        let alpha = source.opens.iter().map(|o| (*o, self.alpha[o].clone())).collect();
        Ok(EnrichedMorphism { source, target, alpha })
    }
}

/// Whether the canonical map `F(U ∪ V) → F(U) × F(V)` is an isomorphism.
pub fn splits_over_disjoint(f: &Presheaf, u: PointSet, v: PointSet) -> bool {
    let whole = u.union(v);
    let (prod, _, _) = product(&[f.sections(u).clone(), f.sections(v).clone()]);
    let r = tuple_hom(f.sections(whole), &prod, &[f.restriction(whole, u).clone(), f.restriction(whole, v).clone()])
        .expect("typed");
    r.is_isomorphism()
}

/// Trivial presheaf on the empty open.
pub fn trivial_on(space: Space, support: PointSet) -> Result<Presheaf, PresheafError> {
    Presheaf::constant(space, support, Arc::new(FgAbGroup::trivial()))
}

/// The kernel of every component, as a plain check that a natural map is injective.
pub fn componentwise_injective(m: &EnrichedMorphism) -> bool {
    m.alpha.values().all(|h| kernel(h).0.is_trivial())
}

/// Connected components of the subspace `v`, each as a point set, ordered by least point.
pub fn components(space: &Space, v: PointSet) -> Vec<PointSet> {
    let mut out: Vec<PointSet> = Vec::new();
    let mut seen = PointSet::EMPTY;
    for x in v.iter() {
        if seen.contains(x) {
            continue;
        }
        let mut comp = PointSet::singleton(x);
        let mut frontier = vec![x];
        while let Some(y) = frontier.pop() {
            for z in v.difference(comp).iter() {
                if space.specializes(y, z) || space.specializes(z, y) {
                    comp.insert(z);
                    frontier.push(z);
                }
            }
        }
        seen = seen.union(comp);
        out.push(comp);
    }
    out
}

/// Sections `A^{π0(V)}` with the diagonal-type restrictions.
pub fn locally_constant(space: Space, support: PointSet, group: Group) -> Result<Presheaf, PresheafError> {
    let opens: Vec<PointSet> = space.opens_within(support).collect();
    let comps: HashMap<PointSet, Vec<PointSet>> = opens.iter().map(|&v| (v, components(&space, v))).collect();
    let sections: HashMap<PointSet, Group> =
        opens.iter().map(|&v| (v, product(&vec![group.clone(); comps[&v].len()]).0)).collect();
    let mut restrictions = HashMap::new();
    for &v in &opens {
        let (_, proj_v, _) = product(&vec![group.clone(); comps[&v].len()]);
        for &w in opens.iter().filter(|w| w.is_subset(v)) {
            let parts: Vec<AbHom> = comps[&w]
                .iter()
                .map(|c| {
                    let host = comps[&v].iter().position(|d| c.is_subset(*d)).expect("component inside a component");
                    proj_v[host].clone()
                })
                .collect();
            restrictions.insert((v, w), tuple_hom(&sections[&v], &sections[&w], &parts)?);
        }
    }
    Presheaf::new(space, support, sections, restrictions)
}

/// `A` on opens containing `y`, zero elsewhere.
pub fn skyscraper(space: Space, support: PointSet, y: usize, group: Group) -> Result<Presheaf, PresheafError> {
    let zero = Arc::new(FgAbGroup::trivial());
    let opens: Vec<PointSet> = space.opens_within(support).collect();
    let pick = |v: PointSet| if v.contains(y) { group.clone() } else { zero.clone() };
    let sections: HashMap<PointSet, Group> = opens.iter().map(|&v| (v, pick(v))).collect();
    let mut restrictions = HashMap::new();
    for &v in &opens {
        for &w in opens.iter().filter(|w| w.is_subset(v)) {
            let h = if w.contains(y) {
                AbHom::identity(group.clone())
            } else {
                AbHom::zero(sections[&v].clone(), sections[&w].clone())
            };
            restrictions.insert((v, w), h);
        }
    }
    Presheaf::new(space, support, sections, restrictions)
}

/// Open-wise direct sum of presheaves on the same open.
pub fn direct_sum(parts: &[PresheafRef]) -> Result<Presheaf, PresheafError> {
    let first = parts.first().ok_or(PresheafError::NotComposable)?;
    if parts.iter().any(|p| p.space != first.space || p.support != first.support) {
        return Err(PresheafError::DifferentSpaces);
    }
    let mut sections = HashMap::new();
    let mut restrictions = HashMap::new();
    let sums: HashMap<PointSet, (Group, Vec<AbHom>)> = first
        .opens
        .iter()
        .map(|&v| {
            let (g, proj, _) = product(&parts.iter().map(|p| p.sections(v).clone()).collect::<Vec<_>>());
            (v, (g, proj))
        })
        .collect();
    for &v in &first.opens {
        sections.insert(v, sums[&v].0.clone());
        for &w in first.opens.iter().filter(|w| w.is_subset(v)) {
            let (_, _, inj_w) = product(&parts.iter().map(|p| p.sections(w).clone()).collect::<Vec<_>>());
            let mut total = AbHom::zero(sums[&v].0.clone(), sums[&w].0.clone());
            for (k, p) in parts.iter().enumerate() {
                total = total.add(&sums[&v].1[k].then(p.restriction(v, w))?.then(&inj_w[k])?)?;
            }
            restrictions.insert((v, w), total);
        }
    }
    Presheaf::new(first.space.clone(), first.support, sections, restrictions)
}
