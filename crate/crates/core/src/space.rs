//! Finite topological spaces with explicit open-set lattices and maps between them.
//!
//! Points are `0..n` with `n <= 64`; a point set is a bitmask. Every finite
//! topology is determined by the minimal open neighbourhoods `U_x`, which are
//! cached next to the sorted list of opens.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_POINTS: usize = 64;
/// Refuse to materialize topologies with more opens than this.
pub const MAX_OPENS: usize = 1 << 18;

#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet(pub u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(x: usize) -> Self {
        PointSet(1 << x)
    }

    pub fn from_points<I: IntoIterator<Item = usize>>(points: I) -> Self {
        PointSet(points.into_iter().fold(0, |acc, x| acc | (1 << x)))
    }

    pub fn contains(self, x: usize) -> bool {
        x < 64 && self.0 >> x & 1 == 1
    }

    pub fn insert(&mut self, x: usize) {
        self.0 |= 1 << x;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: PointSet) -> PointSet {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: PointSet) -> PointSet {
        PointSet(self.0 & other.0)
    }

    pub fn difference(self, other: PointSet) -> PointSet {
        PointSet(self.0 & !other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let x = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(x)
            }
        })
    }

    fn sort_key(self) -> (u32, u64) {
        (self.0.count_ones(), self.0)
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("a space has at most {MAX_POINTS} points, got {0}")]
    TooManyPoints(usize),
    #[error("topology would have more than {MAX_OPENS} opens")]
    TooManyOpens,
    #[error("open {0} mentions a point outside the space")]
    PointOutOfRange(PointSet),
    #[error("open {0} listed twice")]
    DuplicateOpen(PointSet),
    #[error("empty set missing")]
    EmptyMissing,
    #[error("full set missing")]
    FullMissing,
    #[error("union {0} missing")]
    UnionMissing(PointSet),
    #[error("intersection {0} missing")]
    IntersectionMissing(PointSet),
    #[error("{0} is not a subset of the space")]
    NotASubset(PointSet),
    #[error("{0} is not open")]
    NotOpen(PointSet),
    #[error("assignment has length {got}, domain has {expected} points")]
    AssignmentLength { expected: usize, got: usize },
    #[error("point {point} is sent to {image}, outside a codomain of {cod} points")]
    AssignmentRange { point: usize, image: usize, cod: usize },
    #[error("maps do not compose: codomain and domain differ")]
    NotComposable,
    #[error("square does not commute")]
    NotCommuting,
}

#[derive(Clone)]
pub struct FinSpace {
    points: usize,
    opens: Vec<PointSet>,
    minimal: Vec<PointSet>,
}

pub type Space = Arc<FinSpace>;

impl PartialEq for FinSpace {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.minimal == other.minimal
    }
}

impl Eq for FinSpace {}

impl fmt::Debug for FinSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinSpace({} points, opens {:?})", self.points, self.opens)
    }
}

impl FinSpace {
    /// Validate an explicit list of opens.
    pub fn new(points: usize, opens: Vec<PointSet>) -> Result<Self, TopologyError> {
        if points > MAX_POINTS {
            return Err(TopologyError::TooManyPoints(points));
        }
        let full = PointSet::full(points);
        let mut seen = HashSet::new();
        for &o in &opens {
            if !o.is_subset(full) {
                return Err(TopologyError::PointOutOfRange(o));
            }
            if !seen.insert(o) {
                return Err(TopologyError::DuplicateOpen(o));
            }
        }
        if !seen.contains(&PointSet::EMPTY) {
            return Err(TopologyError::EmptyMissing);
        }
        if !seen.contains(&full) {
            return Err(TopologyError::FullMissing);
        }
        let mut sorted = opens;
        sorted.sort_by_key(|o| o.sort_key());
        if sorted.len() <= 2048 {
            for (p, &a) in sorted.iter().enumerate() {
                for &b in &sorted[p + 1..] {
                    if !seen.contains(&a.union(b)) {
                        return Err(TopologyError::UnionMissing(a.union(b)));
                    }
                    if !seen.contains(&a.intersection(b)) {
                        return Err(TopologyError::IntersectionMissing(a.intersection(b)));
                    }
                }
            }
        }
        let minimal = minimal_from_opens(points, &sorted);
        for &m in &minimal {
            if !seen.contains(&m) {
                return Err(TopologyError::IntersectionMissing(m));
            }
        }
        let space = FinSpace::from_minimal(points, minimal)?;
        if space.opens.len() != sorted.len() {
            // some union of minimal opens is absent
            let missing = space.opens.iter().find(|o| !seen.contains(o)).copied().unwrap_or_default();
            return Err(TopologyError::UnionMissing(missing));
        }
        Ok(space)
    }

    /// Topology generated by a family of subsets.
    pub fn from_subbasis(points: usize, sets: &[PointSet]) -> Result<Self, TopologyError> {
        if points > MAX_POINTS {
            return Err(TopologyError::TooManyPoints(points));
        }
        let full = PointSet::full(points);
        let minimal = (0..points)
            .map(|x| {
                sets.iter()
                    .filter(|s| s.contains(x))
                    .fold(full, |acc, &s| acc.intersection(s))
            })
            .collect();
        FinSpace::from_minimal(points, minimal)
    }

    /// Topology generated by the given neighbourhoods; `nbhd[x]` must contain `x`.
    pub fn from_minimal(points: usize, nbhd: Vec<PointSet>) -> Result<Self, TopologyError> {
        if points > MAX_POINTS {
            return Err(TopologyError::TooManyPoints(points));
        }
        assert_eq!(nbhd.len(), points);
        // close the neighbourhoods under the generated preorder
        let minimal: Vec<PointSet> = (0..points)
            .map(|x| {
                nbhd.iter()
                    .filter(|s| s.contains(x))
                    .fold(PointSet::full(points), |acc, &s| acc.intersection(s))
            })
            .collect();
        let mut opens: HashSet<PointSet> = HashSet::from([PointSet::EMPTY]);
        for &m in &minimal {
            let grown: Vec<PointSet> = opens.iter().map(|o| o.union(m)).collect();
            opens.extend(grown);
            if opens.len() > MAX_OPENS {
                return Err(TopologyError::TooManyOpens);
            }
        }
        let mut opens: Vec<PointSet> = opens.into_iter().collect();
        opens.sort_by_key(|o| o.sort_key());
        Ok(FinSpace { points, opens, minimal })
    }

    pub fn discrete(points: usize) -> Self {
        FinSpace::from_minimal(points, (0..points).map(PointSet::singleton).collect()).expect("discrete space")
    }

    pub fn indiscrete(points: usize) -> Self {
        FinSpace::from_minimal(points, vec![PointSet::full(points); points]).expect("indiscrete space")
    }

    /// Two points, opens ∅, {0}, {0,1}.
    pub fn sierpinski() -> Self {
        FinSpace::from_minimal(2, vec![PointSet::singleton(0), PointSet::full(2)]).expect("sierpinski")
    }

    pub fn empty() -> Self {
        FinSpace::discrete(0)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn full(&self) -> PointSet {
        PointSet::full(self.points)
    }

    /// Opens in canonical order: by size, then by bitmask.
    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn minimal_open(&self, x: usize) -> PointSet {
        self.minimal[x]
    }

    pub fn minimal_opens(&self) -> &[PointSet] {
        &self.minimal
    }

    pub fn is_open(&self, set: PointSet) -> bool {
        set.is_subset(self.full()) && set.iter().all(|x| self.minimal[x].is_subset(set))
    }

    pub fn open_id(&self, set: PointSet) -> Option<usize> {
        self.opens.binary_search_by_key(&set.sort_key(), |o| o.sort_key()).ok()
    }

    /// Opens contained in `set`.
    pub fn opens_within(&self, set: PointSet) -> impl Iterator<Item = PointSet> + '_ {
        self.opens.iter().copied().filter(move |o| o.is_subset(set))
    }

    /// Largest open inside `set`.
    pub fn interior(&self, set: PointSet) -> PointSet {
        PointSet::from_points(set.iter().filter(|&x| self.minimal[x].is_subset(set)))
    }

    /// `y` lies in the closure of `{x}`, equivalently `x ∈ U_y`.
    pub fn specializes(&self, x: usize, y: usize) -> bool {
        self.minimal[y].contains(x)
    }

    /// Hasse diagram of the specialization preorder. An edge `x -> y` means
    /// `y` lies in the closure of `{x}`, i.e. `x ∈ U_y`.
    pub fn specialization_dot(&self, name: &str) -> String {
        let mut out = format!("digraph {name} {{\n");
        for x in 0..self.points {
            out.push_str(&format!("  p{x} [label=\"{x}\"];\n"));
        }
        for x in 0..self.points {
            for y in 0..self.points {
                if x == y || !self.specializes(x, y) || self.specializes(y, x) {
                    continue;
                }
                let covered = (0..self.points).any(|z| {
                    z != x
                        && z != y
                        && self.specializes(x, z)
                        && self.specializes(z, y)
                        && !self.specializes(z, x)
                        && !self.specializes(y, z)
                });
                if !covered {
                    out.push_str(&format!("  p{x} -> p{y};\n"));
                }
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn subspace(self: &Arc<Self>, set: PointSet) -> Result<(Space, ContinuousMap), TopologyError> {
        if !set.is_subset(self.full()) {
            return Err(TopologyError::NotASubset(set));
        }
        let members: Vec<usize> = set.iter().collect();
        let mut local = HashMap::new();
        for (p, &x) in members.iter().enumerate() {
            local.insert(x, p);
        }
        let nbhd = members
            .iter()
            .map(|&x| PointSet::from_points(self.minimal[x].intersection(set).iter().map(|y| local[&y])))
            .collect();
        let sub = Arc::new(FinSpace::from_minimal(members.len(), nbhd)?);
        let incl = ContinuousMap::new(sub.clone(), self.clone(), members)?;
        Ok((sub, incl))
    }

    /// Same points and opens transported along the permutation `perm` (point `x` becomes `perm[x]`).
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut nbhd = vec![PointSet::EMPTY; self.points];
        for x in 0..self.points {
            nbhd[perm[x]] = PointSet::from_points(self.minimal[x].iter().map(|y| perm[y]));
        }
        FinSpace::from_minimal(self.points, nbhd).expect("relabel keeps the size")
    }
}

fn minimal_from_opens(points: usize, opens: &[PointSet]) -> Vec<PointSet> {
    (0..points)
        .map(|x| {
            opens
                .iter()
                .filter(|o| o.contains(x))
                .fold(PointSet::full(points), |acc, &o| acc.intersection(o))
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    points: usize,
    opens: Vec<Vec<usize>>,
}

impl Serialize for FinSpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SpaceRepr { points: self.points, opens: self.opens.iter().map(|o| o.iter().collect()).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinSpace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = SpaceRepr::deserialize(d)?;
        if let Some(&x) = repr.opens.iter().flatten().find(|&&x| x >= repr.points.min(MAX_POINTS)) {
            return Err(serde::de::Error::custom(format!("point {x} out of range")));
        }
        let opens = repr.opens.into_iter().map(PointSet::from_points).collect();
        FinSpace::new(repr.points, opens).map_err(serde::de::Error::custom)
    }
}

/// A total point function between finite spaces. Continuity and openness are
/// predicates, not construction invariants.
#[derive(Clone)]
pub struct ContinuousMap {
    dom: Space,
    cod: Space,
    assign: Vec<usize>,
}

fn same_space(a: &Space, b: &Space) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl PartialEq for ContinuousMap {
    fn eq(&self, other: &Self) -> bool {
        self.assign == other.assign && same_space(&self.dom, &other.dom) && same_space(&self.cod, &other.cod)
    }
}

impl Eq for ContinuousMap {}

impl fmt::Debug for ContinuousMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Map({} -> {} points: {:?})", self.dom.points, self.cod.points, self.assign)
    }
}

impl ContinuousMap {
    pub fn new(dom: Space, cod: Space, assign: Vec<usize>) -> Result<Self, TopologyError> {
        if assign.len() != dom.points {
            return Err(TopologyError::AssignmentLength { expected: dom.points, got: assign.len() });
        }
        if let Some((point, &image)) = assign.iter().enumerate().find(|(_, &y)| y >= cod.points) {
            return Err(TopologyError::AssignmentRange { point, image, cod: cod.points });
        }
        Ok(ContinuousMap { dom, cod, assign })
    }

    pub fn identity(space: Space) -> Self {
        let assign = (0..space.points).collect();
        ContinuousMap { dom: space.clone(), cod: space, assign }
    }

    pub fn constant(dom: Space, cod: Space, y: usize) -> Self {
        assert!(y < cod.points);
        let assign = vec![y; dom.points];
        ContinuousMap { dom, cod, assign }
    }

    pub fn dom(&self) -> &Space {
        &self.dom
    }

    pub fn cod(&self) -> &Space {
        &self.cod
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assign
    }

    pub fn apply(&self, x: usize) -> usize {
        self.assign[x]
    }

    pub fn image(&self, set: PointSet) -> PointSet {
        PointSet::from_points(set.iter().map(|x| self.assign[x]))
    }

    pub fn preimage(&self, set: PointSet) -> PointSet {
        PointSet::from_points((0..self.dom.points).filter(|&x| set.contains(self.assign[x])))
    }

    // Preimages commute with unions, so the minimal opens of the codomain suffice.
    pub fn is_continuous(&self) -> bool {
        self.cod.minimal.iter().all(|&m| self.dom.is_open(self.preimage(m)))
    }

    // Images commute with unions, so the minimal opens of the domain suffice.
    pub fn is_open_map(&self) -> bool {
        self.dom.minimal.iter().all(|&m| self.cod.is_open(self.image(m)))
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = HashSet::new();
        self.assign.iter().all(|y| seen.insert(*y))
    }

    pub fn is_surjective(&self) -> bool {
        self.image(self.dom.full()) == self.cod.full()
    }

    pub fn is_homeomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective() && self.is_continuous() && self.is_open_map()
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &ContinuousMap) -> Result<ContinuousMap, TopologyError> {
        if !same_space(&self.cod, &next.dom) {
            return Err(TopologyError::NotComposable);
        }
        Ok(ContinuousMap {
            dom: self.dom.clone(),
            cod: next.cod.clone(),
            assign: self.assign.iter().map(|&y| next.assign[y]).collect(),
        })
    }

    /// Inverse of a bijection.
    pub fn inverse(&self) -> Option<ContinuousMap> {
        if !(self.is_injective() && self.is_surjective()) {
            return None;
        }
        let mut assign = vec![0; self.cod.points];
        for (x, &y) in self.assign.iter().enumerate() {
            assign[y] = x;
        }
        Some(ContinuousMap { dom: self.cod.clone(), cod: self.dom.clone(), assign })
    }

    /// Same assignment read between other (equal-sized) spaces.
    pub fn retarget(&self, dom: Space, cod: Space) -> Result<ContinuousMap, TopologyError> {
        ContinuousMap::new(dom, cod, self.assign.clone())
    }
}

/// Disjoint union with its canonical injections.
pub fn coproduct(spaces: &[Space]) -> Result<(Space, Vec<ContinuousMap>), TopologyError> {
    let total: usize = spaces.iter().map(|s| s.points).sum();
    if total > MAX_POINTS {
        return Err(TopologyError::TooManyPoints(total));
    }
    let mut nbhd = Vec::with_capacity(total);
    let mut offsets = Vec::with_capacity(spaces.len());
    let mut offset = 0;
    for s in spaces {
        offsets.push(offset);
        nbhd.extend(s.minimal.iter().map(|m| PointSet(m.0 << offset)));
        offset += s.points;
    }
    let sum = Arc::new(FinSpace::from_minimal(total, nbhd)?);
    let injections = spaces
        .iter()
        .zip(offsets)
        .map(|(s, off)| ContinuousMap::new(s.clone(), sum.clone(), (off..off + s.points).collect()))
        .collect::<Result<_, _>>()?;
    Ok((sum, injections))
}

/// Union-find classes of the equivalence relation generated by `relation`,
/// numbered in order of their smallest member.
pub fn equivalence_classes(points: usize, relation: &[(usize, usize)]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..points).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = x;
        while parent[c] != r {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    for &(a, b) in relation {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut class_of_root = HashMap::new();
    let mut classes = Vec::with_capacity(points);
    for x in 0..points {
        let r = find(&mut parent, x);
        let next = class_of_root.len();
        classes.push(*class_of_root.entry(r).or_insert(next));
    }
    classes
}

/// Quotient by the equivalence relation generated by `relation`, with the final topology.
pub fn quotient_final(space: &Space, relation: &[(usize, usize)]) -> Result<(Space, ContinuousMap), TopologyError> {
    let classes = equivalence_classes(space.points, relation);
    let count = classes.iter().copied().max().map_or(0, |m| m + 1);
    let members: Vec<PointSet> = (0..count)
        .map(|c| PointSet::from_points((0..space.points).filter(|&x| classes[x] == c)))
        .collect();
    let saturate = |set: PointSet| -> PointSet {
        set.iter().fold(PointSet::EMPTY, |acc, x| acc.union(members[classes[x]]))
    };
    // smallest saturated open containing each class
    let nbhd = (0..count)
        .map(|c| {
            let mut cur = members[c];
            loop {
                let grown = saturate(cur.iter().fold(cur, |acc, x| acc.union(space.minimal[x])));
                if grown == cur {
                    break;
                }
                cur = grown;
            }
            PointSet::from_points(cur.iter().map(|x| classes[x]))
        })
        .collect();
    let q = Arc::new(FinSpace::from_minimal(count, nbhd)?);
    let pi = ContinuousMap::new(space.clone(), q.clone(), classes)?;
    Ok((q, pi))
}

/// `A ×_C B` with the initial topology and both projections.
pub fn fiber_product(
    f: &ContinuousMap,
    g: &ContinuousMap,
) -> Result<(Space, ContinuousMap, ContinuousMap), TopologyError> {
    if !same_space(&f.cod, &g.cod) {
        return Err(TopologyError::NotComposable);
    }
    let pairs: Vec<(usize, usize)> = (0..f.dom.points)
        .flat_map(|a| (0..g.dom.points).map(move |b| (a, b)))
        .filter(|&(a, b)| f.apply(a) == g.apply(b))
        .collect();
    if pairs.len() > MAX_POINTS {
        return Err(TopologyError::TooManyPoints(pairs.len()));
    }
    let nbhd = pairs
        .iter()
        .map(|&(a, b)| {
            PointSet::from_points(
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(_, &(c, d))| f.dom.minimal[a].contains(c) && g.dom.minimal[b].contains(d))
                    .map(|(p, _)| p),
            )
        })
        .collect();
    let apex = Arc::new(FinSpace::from_minimal(pairs.len(), nbhd)?);
    let p1 = ContinuousMap::new(apex.clone(), f.dom.clone(), pairs.iter().map(|p| p.0).collect())?;
    let p2 = ContinuousMap::new(apex.clone(), g.dom.clone(), pairs.iter().map(|p| p.1).collect())?;
    Ok((apex, p1, p2))
}

/// Whether `(apex; p1, p2)` over `(f, g)` is a pullback in Top: the comparison map into
/// the standard fiber product must be a homeomorphism.
pub fn is_pullback_square(
    p1: &ContinuousMap,
    p2: &ContinuousMap,
    f: &ContinuousMap,
    g: &ContinuousMap,
) -> Result<bool, TopologyError> {
    if !same_space(&p1.dom, &p2.dom) {
        return Err(TopologyError::NotComposable);
    }
    if p1.then(f)? != p2.then(g)? {
        return Err(TopologyError::NotCommuting);
    }
    let (fp, _, _) = fiber_product(f, g)?;
    let index: HashMap<(usize, usize), usize> = (0..f.dom.points)
        .flat_map(|a| (0..g.dom.points).map(move |b| (a, b)))
        .filter(|&(a, b)| f.apply(a) == g.apply(b))
        .enumerate()
        .map(|(p, ab)| (ab, p))
        .collect();
    let assign = (0..p1.dom.points).map(|x| index[&(p1.apply(x), p2.apply(x))]).collect();
    let comparison = ContinuousMap::new(p1.dom.clone(), fp, assign)?;
    Ok(comparison.is_homeomorphism())
}

/// Pushouts in Top^op are pullbacks in Top.
pub fn is_pushout_in_opposite(
    p1: &ContinuousMap,
    p2: &ContinuousMap,
    f: &ContinuousMap,
    g: &ContinuousMap,
) -> Result<bool, TopologyError> {
    is_pullback_square(p1, p2, f, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[usize]) -> PointSet {
        PointSet::from_points(xs.iter().copied())
    }

    #[test]
    fn validation_messages() {
        assert!(FinSpace::new(2, vec![set(&[]), set(&[0]), set(&[0, 1])]).is_ok());
        let e = FinSpace::new(2, vec![set(&[]), set(&[0])]).unwrap_err();
        assert_eq!(e.to_string(), "full set missing");
        let e = FinSpace::new(3, vec![set(&[]), set(&[0]), set(&[1]), set(&[0, 1, 2])]).unwrap_err();
        assert_eq!(e.to_string(), "union {0,1} missing");
    }

    #[test]
    fn sierpinski_swap_is_not_continuous() {
        let s = Arc::new(FinSpace::sierpinski());
        let swap = ContinuousMap::new(s.clone(), s.clone(), vec![1, 0]).unwrap();
        assert!(!swap.is_continuous());
        assert!(ContinuousMap::identity(s).is_homeomorphism());
    }

    #[test]
    fn subspaces() {
        let s = Arc::new(FinSpace::sierpinski());
        let (open_pt, _) = s.subspace(set(&[0])).unwrap();
        assert_eq!(open_pt.points(), 1);
        let (closed_pt, incl) = s.subspace(set(&[1])).unwrap();
        assert_eq!(closed_pt.opens().len(), 2);
        assert!(incl.is_continuous());
        assert!(!incl.is_open_map());
        assert!(s.subspace(set(&[2])).is_err());
    }

    #[test]
    fn open_ids_follow_canonical_order() {
        let s = FinSpace::discrete(3);
        for (p, &o) in s.opens().iter().enumerate() {
            assert_eq!(s.open_id(o), Some(p));
        }
        assert_eq!(s.opens()[0], PointSet::EMPTY);
    }

    #[test]
    fn fiber_product_into_a_point() {
        let s = Arc::new(FinSpace::sierpinski());
        let pt = Arc::new(FinSpace::discrete(1));
        let f = ContinuousMap::constant(s.clone(), pt.clone(), 0);
        let (fp, _, _) = fiber_product(&f, &f).unwrap();
        assert_eq!(fp.points(), 4);
    }

    #[test]
    fn dot_lists_points() {
        let dot = FinSpace::sierpinski().specialization_dot("q");
        assert!(dot.contains("p0 -> p1"));
    }
}
