//! Sheaves of finite commutative rings on finite spaces, (locally) ringed spaces,
//! stalks, and gluing of ringed spaces along open charts.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::AbHom;
use crate::presheaf::{components, EnrichedMorphism, Presheaf, PresheafError, PresheafRef};
use crate::ring::{FinCommRing, Ring, RingError, RingHom};
use crate::sheaf_glue::{build_limit_sheaf, sheaf_functor_from_data, verify_sheaf_glued, LimitSheaf, SheafGlueError, SheafGluingData};
use crate::space::{ContinuousMap, PointSet, Space, TopologyError};
use crate::top_glue::{
    functor_from_data, legs_from_charts, standard_representative, verify_glued, Falsification, GlueError, GlueReport,
    GluedSpace, TopGluingData, TopGluingFunctor, TopVariant, Violation,
};
use crate::index::GlueObject;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingedVariant {
    Rts,
    Lrts,
    Sch,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingedError {
    #[error("scheme verification unsupported")]
    SchemeUnsupported,
    #[error("{0} is not open")]
    NotOpen(PointSet),
    #[error("no ring for the open {0}")]
    MissingOpen(PointSet),
    #[error("restriction {0} > {1} is missing or has the wrong endpoints")]
    BadRestriction(PointSet, PointSet),
    #[error("restriction {0} > {0} is not the identity")]
    NotIdentity(PointSet),
    #[error("functoriality fails for {2} ⊆ {1} ⊆ {0}")]
    Functoriality(PointSet, PointSet, PointSet),
    #[error("the additive presheaf is not a sheaf")]
    NotASheaf,
    #[error("sheaf map at {0} is missing or has the wrong endpoints")]
    BadComponent(PointSet),
    #[error("sheaf map is not natural at {0} > {1}")]
    NotNatural(PointSet, PointSet),
    #[error("invalid ringed gluing data: {}", list(.0))]
    InvalidData(Vec<Violation>),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error(transparent)]
    Glue(#[from] GlueError),
    #[error(transparent)]
    SheafGlue(#[from] SheafGlueError),
    #[error(transparent)]
    Falsified(#[from] Falsification),
}

fn list(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

fn push(out: &mut Vec<Violation>, condition: &'static str, detail: String) {
    out.push(Violation { condition, detail });
}

/// A presheaf of rings on the opens of `space` inside the open `support`.
#[derive(Debug, Clone, PartialEq)]
pub struct RingSheaf {
    space: Space,
    support: PointSet,
    opens: Vec<PointSet>,
    rings: HashMap<PointSet, Ring>,
    restrictions: HashMap<(PointSet, PointSet), RingHom>,
}

impl RingSheaf {
    /// Validate rings and restrictions: endpoints, identities, functoriality and
    /// the sheaf condition on the additive groups.
    pub fn new(
        space: Space,
        support: PointSet,
        rings: HashMap<PointSet, Ring>,
        restrictions: HashMap<(PointSet, PointSet), RingHom>,
    ) -> Result<Self, RingedError> {
        let sheaf = RingSheaf::presheaf(space, support, rings, restrictions)?;
        if !sheaf.to_ab().is_sheaf() {
            return Err(RingedError::NotASheaf);
        }
        Ok(sheaf)
    }

    /// As `new` without the sheaf condition.
    pub fn presheaf(
        space: Space,
        support: PointSet,
        rings: HashMap<PointSet, Ring>,
        restrictions: HashMap<(PointSet, PointSet), RingHom>,
    ) -> Result<Self, RingedError> {
        if !space.is_open(support) {
            return Err(RingedError::NotOpen(support));
        }
        let opens: Vec<PointSet> = space.opens_within(support).collect();
        for u in &opens {
            if !rings.contains_key(u) {
                return Err(RingedError::MissingOpen(*u));
            }
        }
        for &u in &opens {
            for &v in opens.iter().filter(|v| v.is_subset(u)) {
                match restrictions.get(&(u, v)) {
                    Some(h) if *h.dom() == rings[&u] && *h.cod() == rings[&v] => {}
                    _ => return Err(RingedError::BadRestriction(u, v)),
                }
            }
            if restrictions[&(u, u)] != RingHom::identity(rings[&u].clone()) {
                return Err(RingedError::NotIdentity(u));
            }
        }
        for &u in &opens {
            for &v in opens.iter().filter(|v| v.is_subset(u) && **v != u) {
                for &w in opens.iter().filter(|w| w.is_subset(v) && **w != v) {
                    let chain = restrictions[&(u, v)].then(&restrictions[&(v, w)]).expect("typed");
                    if chain.map() != restrictions[&(u, w)].map() {
                        return Err(RingedError::Functoriality(u, v, w));
                    }
                }
            }
        }
        let restrictions = restrictions.into_iter().filter(|((u, v), _)| opens.contains(u) && opens.contains(v)).collect();
        Ok(RingSheaf { space, support, opens, rings, restrictions })
    }

    /// `A^{π0(V)}`, the sheaf of locally constant `A`-valued functions.
    pub fn locally_constant(space: Space, support: PointSet, ring: Ring) -> Result<Self, RingedError> {
        let opens: Vec<PointSet> = space.opens_within(support).collect();
        let comps: HashMap<PointSet, Vec<PointSet>> = opens.iter().map(|&v| (v, components(&space, v))).collect();
        let factors = |v: PointSet| vec![ring.clone(); comps[&v].len()];
        let rings: HashMap<PointSet, Ring> = opens.iter().map(|&v| (v, Arc::new(FinCommRing::product(&factors(v))))).collect();
        let mut restrictions = HashMap::new();
        for &v in &opens {
            for &w in opens.iter().filter(|w| w.is_subset(v)) {
                let hosts: Vec<usize> =
                    comps[&w].iter().map(|c| comps[&v].iter().position(|d| c.is_subset(*d)).expect("nested")).collect();
                let map = (0..rings[&v].order())
                    .map(|x| {
                        let parts = FinCommRing::product_parts(&factors(v), x);
                        let down: Vec<usize> = hosts.iter().map(|&h| parts[h]).collect();
                        FinCommRing::product_id(&factors(w), &down)
                    })
                    .collect();
                restrictions.insert((v, w), RingHom::new(rings[&v].clone(), rings[&w].clone(), map)?);
            }
        }
        RingSheaf::new(space, support, rings, restrictions)
    }

    /// `A` on opens containing `y`, the zero ring elsewhere.
    pub fn skyscraper(space: Space, support: PointSet, y: usize, ring: Ring) -> Result<Self, RingedError> {
        let zero = Arc::new(FinCommRing::zero_ring());
        let opens: Vec<PointSet> = space.opens_within(support).collect();
        let rings: HashMap<PointSet, Ring> = opens.iter().map(|&v| (v, if v.contains(y) { ring.clone() } else { zero.clone() })).collect();
        let mut restrictions = HashMap::new();
        for &v in &opens {
            for &w in opens.iter().filter(|w| w.is_subset(v)) {
                let map = if w.contains(y) { (0..ring.order()).collect() } else { vec![0; rings[&v].order()] };
                restrictions.insert((v, w), RingHom::new(rings[&v].clone(), rings[&w].clone(), map)?);
            }
        }
        RingSheaf::new(space, support, rings, restrictions)
    }

    /// Open-wise product of sheaves on the same open.
    pub fn product(parts: &[RingSheaf]) -> Result<Self, RingedError> {
        let first = &parts[0];
        let mut rings = HashMap::new();
        let mut restrictions = HashMap::new();
        let factors = |v: PointSet| parts.iter().map(|p| p.rings[&v].clone()).collect::<Vec<_>>();
        for &v in &first.opens {
            rings.insert(v, Arc::new(FinCommRing::product(&factors(v))));
        }
        for &v in &first.opens {
            for &w in first.opens.iter().filter(|w| w.is_subset(v)) {
                let map = (0..rings[&v].order())
                    .map(|x| {
                        let xs = FinCommRing::product_parts(&factors(v), x);
                        let ys: Vec<usize> = parts.iter().zip(&xs).map(|(p, &e)| p.restrictions[&(v, w)].apply(e)).collect();
                        FinCommRing::product_id(&factors(w), &ys)
                    })
                    .collect();
                restrictions.insert((v, w), RingHom::new(rings[&v].clone(), rings[&w].clone(), map)?);
            }
        }
        RingSheaf::new(first.space.clone(), first.support, rings, restrictions)
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

    pub fn ring(&self, u: PointSet) -> &Ring {
        &self.rings[&u]
    }

    pub fn restriction(&self, u: PointSet, v: PointSet) -> &RingHom {
        &self.restrictions[&(u, v)]
    }

    /// The underlying presheaf of additive groups.
    pub fn to_ab(&self) -> Presheaf {
        let sections = self.opens.iter().map(|&u| (u, self.rings[&u].additive_group().clone())).collect();
        let restrictions = self.restrictions.iter().map(|(k, h)| (*k, h.to_ab())).collect();
        Presheaf::new(self.space.clone(), self.support, sections, restrictions).expect("additive image of a valid presheaf")
    }

    /// Reindex along an open embedding `j: Y → X` with image inside the support:
    /// `(j^* O)(W) = O(j(W))`.
    pub fn pullback_embedding(&self, j: &ContinuousMap) -> Result<Self, RingedError> {
        let target = |w: PointSet| j.image(w);
        let space = j.dom().clone();
        let opens: Vec<PointSet> = space.opens().to_vec();
        for &w in &opens {
            let t = target(w);
            if !self.space.is_open(t) || !t.is_subset(self.support) {
                return Err(RingedError::NotOpen(t));
            }
        }
        let rings = opens.iter().map(|&w| (w, self.rings[&target(w)].clone())).collect();
        let restrictions = opens
            .iter()
            .flat_map(|&w| opens.iter().filter(move |v| v.is_subset(w)).map(move |&v| (w, v)))
            .map(|(w, v)| ((w, v), self.restrictions[&(target(w), target(v))].clone()))
            .collect();
        RingSheaf::presheaf(space.clone(), space.full(), rings, restrictions)
    }

    /// Push forward along an injective open map `j: X → Y` onto its image:
    /// `(j_* O)(V) = O(j⁻¹V)` for opens `V ⊆ j(X)`.
    pub fn pushforward_embedding(&self, j: &ContinuousMap) -> Result<Self, RingedError> {
        let space = j.cod().clone();
        let support = j.image(j.dom().full());
        if !space.is_open(support) {
            return Err(RingedError::NotOpen(support));
        }
        let opens: Vec<PointSet> = space.opens_within(support).collect();
        let rings = opens.iter().map(|&v| (v, self.rings[&j.preimage(v)].clone())).collect();
        let restrictions = opens
            .iter()
            .flat_map(|&w| opens.iter().filter(move |v| v.is_subset(w)).map(move |&v| (w, v)))
            .map(|(w, v)| ((w, v), self.restrictions[&(j.preimage(w), j.preimage(v))].clone()))
            .collect();
        RingSheaf::presheaf(space, support, rings, restrictions)
    }
}

/// A finite space with a sheaf of rings on all of it.
#[derive(Debug, Clone, PartialEq)]
pub struct RingedSpace {
    pub space: Space,
    pub sheaf: RingSheaf,
}

pub type RingedRef = Arc<RingedSpace>;

impl RingedSpace {
    pub fn new(space: Space, sheaf: RingSheaf) -> Result<Self, RingedError> {
        if sheaf.space != space || sheaf.support != space.full() {
            return Err(RingedError::NotOpen(sheaf.support));
        }
        Ok(RingedSpace { space, sheaf })
    }

    pub fn stalk(&self, x: usize) -> Stalk {
        stalk_at(self, x)
    }

    pub fn is_locally_ringed(&self) -> bool {
        (0..self.space.points()).all(|x| self.stalk(x).ring.is_local())
    }
}

/// The stalk at `x`: sections over the minimal open, with germ maps from every open
/// containing `x`.
#[derive(Debug, Clone)]
pub struct Stalk {
    pub point: usize,
    pub minimal_open: PointSet,
    pub ring: Ring,
    pub germs: BTreeMap<PointSet, RingHom>,
}

pub fn stalk_at(r: &RingedSpace, x: usize) -> Stalk {
    let minimal_open = r.space.minimal_open(x);
    let germs = r
        .sheaf
        .opens
        .iter()
        .filter(|u| u.contains(x))
        .map(|&u| (u, r.sheaf.restriction(u, minimal_open).clone()))
        .collect();
    Stalk { point: x, minimal_open, ring: r.sheaf.ring(minimal_open).clone(), germs }
}

/// A co-cone over the neighbourhood system of a point: maps `O(U) → T` for `U ∋ x`.
#[derive(Debug, Clone)]
pub struct CoCone {
    pub apex: Ring,
    pub maps: BTreeMap<PointSet, RingHom>,
}

/// Whether the germ maps form a co-cone and every given co-cone factors uniquely
/// through the stalk.
pub fn check_stalk_colimit(r: &RingedSpace, stalk: &Stalk, cocones: &[CoCone]) -> bool {
    let nbhds: Vec<PointSet> = stalk.germs.keys().copied().collect();
    let is_cocone = |maps: &BTreeMap<PointSet, RingHom>| {
        nbhds.iter().all(|&u| {
            nbhds
                .iter()
                .filter(|v| v.is_subset(u))
                .all(|&v| r.sheaf.restriction(u, v).then(&maps[&v]).map(|h| h == maps[&u]).unwrap_or(false))
        })
    };
    if !is_cocone(&stalk.germs) || stalk.germs[&stalk.minimal_open] != RingHom::identity(stalk.ring.clone()) {
        return false;
    }
    cocones.iter().all(|c| {
        if c.maps.len() != nbhds.len() || !is_cocone(&c.maps) {
            return false;
        }
        // the germ at the minimal open is the identity, so any mediating map equals this one
        let mediating = &c.maps[&stalk.minimal_open];
        nbhds.iter().all(|u| stalk.germs[u].then(mediating).as_ref() == Some(&c.maps[u]))
    })
}

/// A morphism of ringed spaces `(f, f#): X → Y` with `f#_V: O_Y(V) → O_X(f⁻¹V)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RingedMorphism {
    pub source: RingedRef,
    pub target: RingedRef,
    pub top: ContinuousMap,
    pub sheaf: HashMap<PointSet, RingHom>,
}

impl RingedMorphism {
    pub fn new(source: RingedRef, target: RingedRef, top: ContinuousMap, sheaf: HashMap<PointSet, RingHom>) -> Result<Self, RingedError> {
        if top.dom() != &source.space || top.cod() != &target.space {
            return Err(RingedError::Topology(TopologyError::NotComposable));
        }
        if !top.is_continuous() {
            return Err(RingedError::Topology(TopologyError::NotComposable));
        }
        for &v in target.sheaf.opens() {
            match sheaf.get(&v) {
                Some(h) if h.dom() == target.sheaf.ring(v) && h.cod() == source.sheaf.ring(top.preimage(v)) => {}
                _ => return Err(RingedError::BadComponent(v)),
            }
        }
        for &v in target.sheaf.opens() {
            for &w in target.sheaf.opens().iter().filter(|w| w.is_subset(v)) {
                let lhs = sheaf[&v].then(source.sheaf.restriction(top.preimage(v), top.preimage(w)));
                let rhs = target.sheaf.restriction(v, w).then(&sheaf[&w]);
                if lhs.map(|h| h.map().to_vec()) != rhs.map(|h| h.map().to_vec()) {
                    return Err(RingedError::NotNatural(v, w));
                }
            }
        }
        Ok(RingedMorphism { source, target, top, sheaf })
    }

    pub fn identity(x: RingedRef) -> Self {
        let top = ContinuousMap::identity(x.space.clone());
        let sheaf = x.sheaf.opens().iter().map(|&v| (v, RingHom::identity(x.sheaf.ring(v).clone()))).collect();
        RingedMorphism { source: x.clone(), target: x, top, sheaf }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &RingedMorphism) -> Option<RingedMorphism> {
        if *self.target != *next.source {
            return None;
        }
        let top = self.top.then(&next.top).ok()?;
        let sheaf = next
            .target
            .sheaf
            .opens()
            .iter()
            .map(|&w| Some((w, next.sheaf[&w].then(&self.sheaf[&next.top.preimage(w)])?)))
            .collect::<Option<HashMap<_, _>>>()?;
        Some(RingedMorphism { source: self.source.clone(), target: next.target.clone(), top, sheaf })
    }

    /// The restriction of a ringed space to an open, with its inclusion.
    pub fn open_inclusion(x: &RingedRef, u: PointSet) -> Result<RingedMorphism, RingedError> {
        let (sub, incl) = x.space.subspace(u)?;
        let sheaf = x.sheaf.pullback_embedding(&incl)?;
        let source = Arc::new(RingedSpace::new(sub, sheaf)?);
        let maps = x
            .sheaf
            .opens()
            .iter()
            .map(|&v| (v, x.sheaf.restriction(v, v.intersection(u)).clone()))
            .collect();
        RingedMorphism::new(source, x.clone(), incl, maps)
    }
}

/// `O_Y,f(x) → O_X,x`, sending the germ `[s, V]` to `[f#_V(s), f⁻¹V]`.
pub fn stalk_hom(m: &RingedMorphism, x: usize) -> RingHom {
    let y = m.top.apply(x);
    let v = m.target.space.minimal_open(y);
    let pre = m.top.preimage(v);
    m.sheaf[&v].then(m.source.sheaf.restriction(pre, m.source.space.minimal_open(x))).expect("typed")
}

/// Ringed gluing data. Overlaps `U_ij` are opens of chart `i`; `φ_ij` is given as a
/// point map on `U_ij`; `θ_ij,W: O_i(W) → O_j(φ_ij W)` for opens `W ⊆ U_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct RingedGluingData {
    pub variant: RingedVariant,
    pub charts: Vec<RingedRef>,
    pub overlaps: Vec<Vec<PointSet>>,
    pub transitions: Vec<Vec<BTreeMap<usize, usize>>>,
    pub sheaf_transitions: Vec<Vec<HashMap<PointSet, RingHom>>>,
}

impl RingedGluingData {
    pub fn n(&self) -> usize {
        self.charts.len()
    }

    fn image(&self, i: usize, j: usize, w: PointSet) -> PointSet {
        PointSet::from_points(w.iter().map(|x| self.transitions[i][j][&x]))
    }

    /// Charts, overlaps and transition maps as classical topological gluing data.
    pub fn top_data(&self) -> Result<TopGluingData, RingedError> {
        let n = self.n();
        let charts: Vec<Space> = self.charts.iter().map(|c| c.space.clone()).collect();
        let mut subs = vec![vec![None; n]; n];
        let mut inclusions = Vec::new();
        for i in 0..n {
            let mut row = Vec::new();
            for j in 0..n {
                let (sub, incl) = if i == j {
                    (charts[i].clone(), ContinuousMap::identity(charts[i].clone()))
                } else {
                    charts[i].subspace(self.overlaps[i][j])?
                };
                subs[i][j] = Some(sub);
                row.push(incl);
            }
            inclusions.push(row);
        }
        let mut transitions = Vec::new();
        for i in 0..n {
            let mut row = Vec::new();
            for j in 0..n {
                let src: Vec<usize> = self.overlaps[i][j].iter().collect();
                let dst: Vec<usize> = self.overlaps[j][i].iter().collect();
                let assign = src
                    .iter()
                    .map(|x| {
                        let y = self.transitions[i][j].get(x).ok_or_else(|| missing(i, j))?;
                        dst.iter().position(|d| d == y).ok_or_else(|| missing(i, j))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let from = subs[i][j].clone().expect("filled");
                let to = subs[j][i].clone().expect("filled");
                row.push(ContinuousMap::new(from, to, assign)?);
            }
            transitions.push(row);
        }
        Ok(TopGluingData::with_fiber_triples(TopVariant::OTop, charts, inclusions, transitions)?)
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n();
        if self.variant == RingedVariant::Sch {
            push(&mut out, "variant", "scheme verification unsupported".into());
            return out;
        }
        if self.overlaps.len() != n
            || self.transitions.len() != n
            || self.sheaf_transitions.len() != n
            || (0..n).any(|i| self.overlaps[i].len() != n || self.transitions[i].len() != n || self.sheaf_transitions[i].len() != n)
        {
            push(&mut out, "shape", format!("expected {n}x{n} tables"));
            return out;
        }
        for i in 0..n {
            let c = &self.charts[i];
            if !c.sheaf.to_ab().is_sheaf() {
                push(&mut out, "sheaf", format!("structure presheaf of chart {i} is not a sheaf"));
            }
            if self.variant == RingedVariant::Lrts && !c.is_locally_ringed() {
                push(&mut out, "local", format!("chart {i} has a non-local stalk"));
            }
            if self.overlaps[i][i] != c.space.full() {
                push(&mut out, "a", format!("U_{i}{i} is not the whole chart"));
            }
            for j in 0..n {
                if !c.space.is_open(self.overlaps[i][j]) {
                    push(&mut out, "open", format!("U_{i}{j} is not open in chart {i}"));
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        let top = match self.top_data().and_then(|d| Ok(functor_from_data(&d)?)) {
            Ok(f) => f,
            Err(e) => {
                push(&mut out, "top", e.to_string());
                return out;
            }
        };
        drop(top);
        for i in 0..n {
            for j in 0..n {
                let theta = &self.sheaf_transitions[i][j];
                for w in self.charts[i].space.opens_within(self.overlaps[i][j]) {
                    let img = self.image(i, j, w);
                    match theta.get(&w) {
                        Some(h) if h.dom() == self.charts[i].sheaf.ring(w) && h.cod() == self.charts[j].sheaf.ring(img) => {
                            if !h.is_bijective() {
                                push(&mut out, "iso", format!("θ_{i}{j} at {w} is not bijective"));
                            }
                            if i == j && *h != RingHom::identity(h.dom().clone()) {
                                push(&mut out, "b", format!("θ_{i}{i} at {w} is not the identity"));
                            }
                        }
                        _ => push(&mut out, "shape", format!("θ_{i}{j} at {w} missing or mistyped")),
                    }
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for i in 0..n {
            for j in 0..n {
                let theta = &self.sheaf_transitions[i][j];
                let opens: Vec<PointSet> = self.charts[i].space.opens_within(self.overlaps[i][j]).collect();
                for &w in &opens {
                    for &v in opens.iter().filter(|v| v.is_subset(w)) {
                        let lhs = theta[&w].then(self.charts[j].sheaf.restriction(self.image(i, j, w), self.image(i, j, v)));
                        let rhs = self.charts[i].sheaf.restriction(w, v).then(&theta[&v]);
                        if lhs != rhs {
                            push(&mut out, "natural", format!("θ_{i}{j} is not natural at {w} > {v}"));
                        }
                    }
                    if i != j {
                        let back = theta[&w].then(&self.sheaf_transitions[j][i][&self.image(i, j, w)]);
                        if back != Some(RingHom::identity(self.charts[i].sheaf.ring(w).clone())) {
                            push(&mut out, "inverse", format!("θ_{j}{i} ∘ θ_{i}{j} is not the identity at {w}"));
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                for k in (0..n).filter(|&k| k != i && k != j) {
                    let meet = self.overlaps[i][j].intersection(self.overlaps[i][k]);
                    for w in self.charts[i].space.opens_within(meet) {
                        let via = self.sheaf_transitions[i][j][&w].then(&self.sheaf_transitions[j][k][&self.image(i, j, w)]);
                        if via.as_ref() != Some(&self.sheaf_transitions[i][k][&w]) {
                            push(&mut out, "cocycle", format!("θ cocycle fails at ({i},{j},{k}) on {w}"));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), RingedError> {
        if self.variant == RingedVariant::Sch {
            return Err(RingedError::SchemeUnsupported);
        }
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(RingedError::InvalidData(v))
        }
    }
}

fn missing(i: usize, j: usize) -> RingedError {
    RingedError::InvalidData(vec![Violation { condition: "shape", detail: format!("φ_{i}{j} does not map U_{i}{j} into U_{j}{i}") }])
}

/// Validated ringed gluing data with its induced topological functor.
#[derive(Debug, Clone)]
pub struct RingedGluingFunctor {
    data: RingedGluingData,
    top: TopGluingFunctor,
}

impl RingedGluingFunctor {
    pub fn new(data: RingedGluingData) -> Result<Self, RingedError> {
        data.validate()?;
        let top = functor_from_data(&data.top_data()?)?;
        Ok(RingedGluingFunctor { data, top })
    }

    pub fn data(&self) -> &RingedGluingData {
        &self.data
    }

    pub fn variant(&self) -> RingedVariant {
        self.data.variant
    }

    pub fn induced_top_functor(&self) -> &TopGluingFunctor {
        &self.top
    }

    /// Push every chart sheaf forward onto its image in the glued space and
    /// reindex the transitions accordingly.
    pub fn induced_sheaf_data(&self, glued: &GluedSpace) -> Result<SheafGluingData, RingedError> {
        let d = &self.data;
        let n = d.n();
        let iota: Vec<&ContinuousMap> = (0..n).map(|i| &glued.iota[&GlueObject::Single(i)]).collect();
        let cover: Vec<PointSet> = iota.iter().map(|f| f.image(f.dom().full())).collect();
        let pushed: Vec<RingSheaf> =
            (0..n).map(|i| d.charts[i].sheaf.pushforward_embedding(iota[i])).collect::<Result<_, _>>()?;
        let sheaves: Vec<PresheafRef> = pushed.iter().map(|s| Arc::new(s.to_ab())).collect();
        let mut transitions = Vec::new();
        for i in 0..n {
            let mut row = Vec::new();
            for j in 0..n {
                let w = cover[i].intersection(cover[j]);
                let src = Arc::new(sheaves[i].restrict_to(w)?);
                let dst = Arc::new(sheaves[j].restrict_to(w)?);
                let alpha: HashMap<PointSet, AbHom> = src
                    .opens()
                    .iter()
                    .map(|&o| (o, d.sheaf_transitions[i][j][&iota[i].preimage(o)].to_ab()))
                    .collect();
                row.push(EnrichedMorphism::new(src, dst, alpha)?);
            }
            transitions.push(row);
        }
        Ok(SheafGluingData { base: glued.q.clone(), cover, sheaves, transitions })
    }
}

/// The standard glued ringed space with its projections and intermediate pieces.
#[derive(Debug, Clone)]
pub struct GluedRinged {
    pub ringed: RingedRef,
    pub glued: GluedSpace,
    pub sheaf_data: SheafGluingData,
    pub limit: LimitSheaf,
    pub projections: Vec<RingedMorphism>,
}

/// Compatible tuples of sections over `V`, found chart by chart.
fn compatible_tuples(d: &RingedGluingData, pre: &[PointSet]) -> Vec<Vec<usize>> {
    let n = d.n();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(d: &RingedGluingData, pre: &[PointSet], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let j = cur.len();
        if j == pre.len() {
            out.push(cur.clone());
            return;
        }
        for s in 0..d.charts[j].sheaf.ring(pre[j]).order() {
            let ok = (0..j).all(|i| {
                let w = pre[i].intersection(d.overlaps[i][j]);
                let img = d.image(i, j, w);
                let here = d.charts[i].sheaf.restriction(pre[i], w).apply(cur[i]);
                let moved = d.sheaf_transitions[i][j][&w].apply(here);
                moved == d.charts[j].sheaf.restriction(pre[j], img).apply(s)
            });
            if ok {
                cur.push(s);
                rec(d, pre, cur, out);
                cur.pop();
            }
        }
    }
    rec(d, pre, &mut cur, &mut out);
    let _ = n;
    out
}

/// Glue: the standard glued space, the limit sheaf of the pushed-forward charts, and
/// the ring structure on compatible families, with the projections back to the charts.
pub fn glue_ringed(g: &RingedGluingFunctor) -> Result<GluedRinged, RingedError> {
    let d = &g.data;
    let n = d.n();
    let glued = standard_representative(&g.top)?;
    let sheaf_data = g.induced_sheaf_data(&glued)?;
    let sheaf_functor = sheaf_functor_from_data(&sheaf_data)?;
    let limit = build_limit_sheaf(&sheaf_functor)?;
    let q = glued.q.clone();
    let iota: Vec<ContinuousMap> = (0..n).map(|i| glued.iota[&GlueObject::Single(i)].clone()).collect();

    let mut rings = HashMap::new();
    let mut tuples: HashMap<PointSet, Vec<Vec<usize>>> = HashMap::new();
    let mut lookup: HashMap<PointSet, HashMap<Vec<usize>, usize>> = HashMap::new();
    for &v in q.opens() {
        let pre: Vec<PointSet> = iota.iter().map(|f| f.preimage(v)).collect();
        let elements = compatible_tuples(d, &pre);
        let expected = limit.sheaf.sections(v).order();
        if expected != Some(BigInt::from(elements.len())) {
            return Err(Falsification::new(
                "compatible families form the limit",
                format!("open {v}: {} ring elements, limit group of order {expected:?}", elements.len()),
            )
            .into());
        }
        let factors: Vec<&Ring> = (0..n).map(|i| d.charts[i].sheaf.ring(pre[i])).collect();
        let index: HashMap<Vec<usize>, usize> = elements.iter().enumerate().map(|(k, e)| (e.clone(), k)).collect();
        let op = |f: &dyn Fn(&FinCommRing, usize, usize) -> usize| -> Option<Vec<Vec<usize>>> {
            elements
                .iter()
                .map(|a| {
                    elements
                        .iter()
                        .map(|b| {
                            let c: Vec<usize> = (0..n).map(|i| f(factors[i], a[i], b[i])).collect();
                            index.get(&c).copied()
                        })
                        .collect()
                })
                .collect()
        };
        let closed = "compatible families are closed under the ring operations";
        let add = op(&|r, a, b| r.add(a, b)).ok_or_else(|| Falsification::new(closed, format!("sum leaves {v}")))?;
        let mul = op(&|r, a, b| r.mul(a, b)).ok_or_else(|| Falsification::new(closed, format!("product leaves {v}")))?;
        let zero = index[&factors.iter().map(|r| r.zero()).collect::<Vec<_>>()];
        let one = *index
            .get(&factors.iter().map(|r| r.one()).collect::<Vec<_>>())
            .ok_or_else(|| Falsification::new(closed, format!("unit missing at {v}")))?;
        rings.insert(v, Arc::new(FinCommRing::unchecked(add, mul, zero, one)));
        tuples.insert(v, elements);
        lookup.insert(v, index);
    }
    let mut restrictions = HashMap::new();
    for &v in q.opens() {
        for &w in q.opens().iter().filter(|w| w.is_subset(v)) {
            let map = tuples[&v]
                .iter()
                .map(|t| {
                    let down: Vec<usize> = (0..n)
                        .map(|i| d.charts[i].sheaf.restriction(iota[i].preimage(v), iota[i].preimage(w)).apply(t[i]))
                        .collect();
                    lookup[&w][&down]
                })
                .collect();
            restrictions.insert((v, w), RingHom::new(rings[&v].clone(), rings[&w].clone(), map)?);
        }
    }
    let sheaf = RingSheaf::presheaf(q.clone(), q.full(), rings, restrictions)?;
    let ringed = Arc::new(RingedSpace::new(q.clone(), sheaf)?);

    let mut projections = Vec::new();
    for i in 0..n {
        let maps = q
            .opens()
            .iter()
            .map(|&v| {
                let target = d.charts[i].sheaf.ring(iota[i].preimage(v)).clone();
                let map = tuples[&v].iter().map(|t| t[i]).collect();
                Ok((v, RingHom::new(ringed.sheaf.ring(v).clone(), target, map)?))
            })
            .collect::<Result<HashMap<_, _>, RingedError>>()?;
        projections.push(RingedMorphism::new(d.charts[i].clone(), ringed.clone(), iota[i].clone(), maps)?);
    }

    let ab = Arc::new(ringed.sheaf.to_ab());
    let ab_projections = projections
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let alpha = q.opens().iter().map(|&v| (v, p.sheaf[&v].to_ab())).collect();
            EnrichedMorphism::new(ab.clone(), sheaf_functor.chart(i).clone(), alpha)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let report = verify_sheaf_glued(&ab, &ab_projections, &sheaf_functor, &limit)?;
    if !report.verdict {
        return Err(Falsification::new("the ring of compatible families is the glued sheaf", format!("{:?}", report.conditions)).into());
    }
    let out = GluedRinged { ringed, glued, sheaf_data, limit, projections };
    check_stalk_lemma(&out)?;
    if g.variant() == RingedVariant::Lrts && !out.ringed.is_locally_ringed() {
        return Err(Falsification::new("gluing locally ringed charts gives a locally ringed space", "non-local stalk").into());
    }
    Ok(out)
}

/// For every chart point, the projection's stalk map is a ring isomorphism and the
/// germ square commutes.
pub fn check_stalk_lemma(g: &GluedRinged) -> Result<(), Falsification> {
    for (i, p) in g.projections.iter().enumerate() {
        let chart = &p.source;
        for x in 0..chart.space.points() {
            let s = stalk_hom(p, x);
            if !s.is_bijective() {
                return Err(Falsification::new("projection stalk maps are isomorphisms", format!("chart {i}, point {x}")));
            }
            let q_stalk = g.ringed.stalk(p.top.apply(x));
            let c_stalk = chart.stalk(x);
            for (&v, germ) in &q_stalk.germs {
                let lhs = germ.then(&s);
                let rhs = p.sheaf[&v].then(&c_stalk.germs[&p.top.preimage(v)]);
                if lhs != rhs {
                    return Err(Falsification::new("the stalk square commutes", format!("chart {i}, point {x}, open {v}")));
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RingedGlueReport {
    pub top: GlueReport,
    pub conditions: BTreeMap<String, bool>,
    pub verdict: bool,
}

/// Whether `(candidate, projections)` is a glued ringed space for `g`: the underlying
/// maps glue the charts, the comparison from the standard glued space is a
/// homeomorphism, and it identifies the structure sheaves.
pub fn verify_ringed_glued(
    candidate: &RingedRef,
    projections: &[RingedMorphism],
    g: &RingedGluingFunctor,
    standard: &GluedRinged,
) -> Result<RingedGlueReport, RingedError> {
    let d = &g.data;
    let n = d.n();
    if d.variant == RingedVariant::Sch {
        return Err(RingedError::SchemeUnsupported);
    }
    let mut conditions = BTreeMap::new();
    let endpoints = projections.len() == n
        && projections.iter().enumerate().all(|(i, p)| *p.source == *d.charts[i] && *p.target == **candidate);
    conditions.insert("endpoints".to_string(), endpoints);
    let tops: Vec<ContinuousMap> = if endpoints {
        projections.iter().map(|p| p.top.clone()).collect()
    } else {
        (0..n).map(|i| standard.glued.iota[&GlueObject::Single(i)].clone()).collect()
    };
    let legs = legs_from_charts(&g.top, &tops)?;
    let apex = if endpoints { &candidate.space } else { &standard.glued.q };
    let top = verify_glued(apex, &legs, &g.top);
    conditions.insert("top".to_string(), endpoints && top.verdict);
    let homeo = if endpoints && top.verdict {
        mediating(standard, candidate, projections).filter(ContinuousMap::is_homeomorphism)
    } else {
        None
    };
    conditions.insert("homeomorphism".to_string(), homeo.is_some());
    let sheaf_iso = homeo.as_ref().is_some_and(|mu| sheaves_agree(mu, candidate, projections, standard));
    conditions.insert("sheaf_isomorphism".to_string(), sheaf_iso);
    if d.variant == RingedVariant::Lrts {
        conditions.insert("local_stalks".to_string(), candidate.is_locally_ringed());
        let maps = endpoints && projections.iter().all(|p| (0..p.source.space.points()).all(|x| stalk_hom(p, x).is_local()));
        conditions.insert("local_maps".to_string(), maps);
    }
    let verdict = conditions.values().all(|&b| b);
    Ok(RingedGlueReport { top, conditions, verdict })
}

/// For every open `V` of the candidate, sections of `V` go bijectively onto sections
/// of `μ⁻¹V` in the standard space, matching the projections chart by chart.
fn sheaves_agree(mu: &ContinuousMap, candidate: &RingedRef, projections: &[RingedMorphism], standard: &GluedRinged) -> bool {
    let n = projections.len();
    candidate.space.opens().iter().all(|&v| {
        let w = mu.preimage(v);
        let lookup: HashMap<Vec<usize>, usize> = (0..standard.ringed.sheaf.ring(w).order())
            .map(|e| ((0..n).map(|i| standard.projections[i].sheaf[&w].apply(e)).collect(), e))
            .collect();
        let image: Option<Vec<usize>> = (0..candidate.sheaf.ring(v).order())
            .map(|s| lookup.get(&(0..n).map(|i| projections[i].sheaf[&v].apply(s)).collect::<Vec<_>>()).copied())
            .collect();
        image
            .and_then(|map| RingHom::new(candidate.sheaf.ring(v).clone(), standard.ringed.sheaf.ring(w).clone(), map).ok())
            .is_some_and(|h| h.is_bijective())
    })
}

/// The point map `Q → candidate` determined by the chart projections, if it is well
/// defined and continuous.
fn mediating(standard: &GluedRinged, candidate: &RingedRef, projections: &[RingedMorphism]) -> Option<ContinuousMap> {
    let mut assign = vec![None; standard.glued.q.points()];
    for (i, p) in projections.iter().enumerate() {
        let chart = &standard.glued.iota[&GlueObject::Single(i)];
        for x in 0..chart.dom().points() {
            let y = p.top.apply(x);
            match assign[chart.apply(x)] {
                Some(prev) if prev != y => return None,
                _ => assign[chart.apply(x)] = Some(y),
            }
        }
    }
    let assign = assign.into_iter().collect::<Option<Vec<_>>>()?;
    ContinuousMap::new(standard.glued.q.clone(), candidate.space.clone(), assign).ok().filter(ContinuousMap::is_continuous)
}

/// Two copies of a chart glued along an open by the identity, with `θ` given by a ring
/// automorphism `twist` on every nonempty open of the overlap (the identity when `None`).
pub fn glue_two_copies(
    variant: RingedVariant,
    chart: RingedRef,
    overlap: PointSet,
    twist: Option<&RingHom>,
) -> Result<RingedGluingData, RingedError> {
    let sheaf = &chart.sheaf;
    let ident: BTreeMap<usize, usize> = overlap.iter().map(|x| (x, x)).collect();
    let full: BTreeMap<usize, usize> = (0..chart.space.points()).map(|x| (x, x)).collect();
    let mut thetas: Vec<Vec<HashMap<PointSet, RingHom>>> = vec![vec![HashMap::new(), HashMap::new()], vec![HashMap::new(), HashMap::new()]];
    for i in 0..2 {
        for w in chart.space.opens_within(chart.space.full()) {
            thetas[i][i].insert(w, RingHom::identity(sheaf.ring(w).clone()));
        }
    }
    for w in chart.space.opens_within(overlap) {
        let r = sheaf.ring(w);
        let forward = match twist {
            Some(t) if t.dom() == r => t.clone(),
            _ => RingHom::identity(r.clone()),
        };
        let back = forward.inverse().ok_or(RingedError::BadComponent(w))?;
        thetas[0][1].insert(w, forward);
        thetas[1][0].insert(w, back);
    }
    Ok(RingedGluingData {
        variant,
        overlaps: vec![vec![chart.space.full(), overlap], vec![overlap, chart.space.full()]],
        charts: vec![chart.clone(), chart],
        transitions: vec![vec![full.clone(), ident.clone()], vec![ident, full]],
        sheaf_transitions: thetas,
    })
}
