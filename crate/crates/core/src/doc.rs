//! Gluing-data documents: `{"kind", "variant", "payload"}` JSON, parsed with
//! JSON-pointer diagnostics, and written back from in-memory data.
//!
//! Opens are written as point lists in braces (`"{0,2}"`, `"{}"`), restrictions
//! as `"{0,2}>{2}"`. Spaces, groups and rings live in id-keyed registries inside
//! the payload and are referenced by id.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::group::{AbHom, FgAbGroup, Group, HomRepr};
use crate::presheaf::{EnrichedMorphism, Presheaf, PresheafRef};
use crate::ring::{FinCommRing, Ring, RingHom};
use crate::ringed::{RingSheaf, RingedGluingData, RingedRef, RingedSpace, RingedVariant};
use crate::sheaf_glue::SheafGluingData;
use crate::space::{ContinuousMap, FinSpace, PointSet, Space};
use crate::top_glue::{TopGluingData, TopVariant, TripleOverlap};

/// First problem found in a document, located by JSON pointer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pointer}: {message}")]
pub struct DocError {
    pub pointer: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("invalid document at {0}")]
    Invalid(#[from] DocError),
    #[error("scheme verification unsupported")]
    SchemeUnsupported,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Top,
    Sheaf,
    Ringed,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Top => "top",
            Kind::Sheaf => "sheaf",
            Kind::Ringed => "ringed",
        }
    }
}

/// A candidate glued space for a top document: a space and one map per chart.
#[derive(Debug, Clone)]
pub struct TopCandidate {
    pub space: Space,
    pub charts: Vec<ContinuousMap>,
}

#[derive(Debug, Clone)]
pub enum GluingDocument {
    Top { data: TopGluingData, candidate: Option<TopCandidate> },
    Sheaf { data: SheafGluingData },
    Ringed { data: RingedGluingData },
}

impl GluingDocument {
    pub fn kind(&self) -> Kind {
        match self {
            GluingDocument::Top { .. } => Kind::Top,
            GluingDocument::Sheaf { .. } => Kind::Sheaf,
            GluingDocument::Ringed { .. } => Kind::Ringed,
        }
    }

    pub fn variant(&self) -> Option<&'static str> {
        match self {
            GluingDocument::Top { data, .. } => Some(match data.variant {
                TopVariant::Top => "top",
                TopVariant::OTop => "otop",
            }),
            GluingDocument::Sheaf { .. } => None,
            GluingDocument::Ringed { data } => Some(match data.variant {
                RingedVariant::Rts => "rts",
                RingedVariant::Lrts => "lrts",
                RingedVariant::Sch => "sch",
            }),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            GluingDocument::Top { data, candidate } => top_document(data, candidate.as_ref()),
            GluingDocument::Sheaf { data } => sheaf_document(data),
            GluingDocument::Ringed { data } => ringed_document(data),
        }
    }
}

/// A node of the parsed JSON tree with its pointer.
#[derive(Clone, Copy)]
struct At<'a> {
    value: &'a Value,
    path: &'a Path<'a>,
}

/// Linked pointer segments, rendered only when an error is reported.
enum Path<'a> {
    Root,
    Key(&'a Path<'a>, &'a str),
    Index(&'a Path<'a>, usize),
}

impl Path<'_> {
    fn render(&self) -> String {
        match self {
            Path::Root => String::new(),
            Path::Key(p, k) => format!("{}/{}", p.render(), k.replace('~', "~0").replace('/', "~1")),
            Path::Index(p, i) => format!("{}/{i}", p.render()),
        }
    }
}

type Parsed<T> = Result<T, DocError>;

impl<'a> At<'a> {
    fn fail<T>(&self, message: impl Into<String>) -> Parsed<T> {
        let pointer = self.path.render();
        Err(DocError { pointer: if pointer.is_empty() { "/".into() } else { pointer }, message: message.into() })
    }

    fn object(&self) -> Parsed<&'a Map<String, Value>> {
        match self.value.as_object() {
            Some(m) => Ok(m),
            None => self.fail("expected an object"),
        }
    }

    fn array(&self) -> Parsed<&'a Vec<Value>> {
        match self.value.as_array() {
            Some(a) => Ok(a),
            None => self.fail("expected an array"),
        }
    }

    fn str(&self) -> Parsed<&'a str> {
        match self.value.as_str() {
            Some(s) => Ok(s),
            None => self.fail("expected a string"),
        }
    }

    fn usize(&self) -> Parsed<usize> {
        match self.value.as_u64() {
            Some(x) => Ok(x as usize),
            None => self.fail("expected a nonnegative integer"),
        }
    }

    fn decode<T: DeserializeOwned>(&self) -> Parsed<T> {
        serde_json::from_value(self.value.clone()).or_else(|e| self.fail(e.to_string()))
    }
}

/// Visit a child, building its pointer segment on the stack.
fn key<'a, T>(at: At<'a>, k: &str, f: impl FnOnce(At<'_>) -> Parsed<T>) -> Parsed<T> {
    let path = Path::Key(at.path, k);
    match at.object()?.get(k) {
        Some(v) => f(At { value: v, path: &path }),
        None => At { value: at.value, path: &path }.fail("missing field"),
    }
}

fn opt_key<'a, T>(at: At<'a>, k: &str, f: impl FnOnce(At<'_>) -> Parsed<T>) -> Parsed<Option<T>> {
    let path = Path::Key(at.path, k);
    match at.object()?.get(k) {
        Some(Value::Null) | None => Ok(None),
        Some(v) => f(At { value: v, path: &path }).map(Some),
    }
}

fn items<'a, T>(at: At<'a>, mut f: impl FnMut(usize, At<'_>) -> Parsed<T>) -> Parsed<Vec<T>> {
    at.array()?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let path = Path::Index(at.path, i);
            f(i, At { value: v, path: &path })
        })
        .collect()
}

fn entries<'a, T>(at: At<'a>, mut f: impl FnMut(&str, At<'_>) -> Parsed<T>) -> Parsed<Vec<T>> {
    at.object()?
        .iter()
        .map(|(k, v)| {
            let path = Path::Key(at.path, k);
            f(k, At { value: v, path: &path })
        })
        .collect()
}

/// An `n × n` table of entries.
fn square<'a, T>(at: At<'a>, n: usize, mut f: impl FnMut(usize, usize, At<'_>) -> Parsed<T>) -> Parsed<Vec<Vec<T>>> {
    if at.array()?.len() != n {
        return at.fail(format!("expected {n} rows"));
    }
    items(at, |i, row| {
        if row.array()?.len() != n {
            return row.fail(format!("expected {n} entries"));
        }
        items(row, |j, cell| f(i, j, cell))
    })
}

fn registry<'a, T: DeserializeOwned>(at: At<'a>, field: &str) -> Parsed<HashMap<String, Arc<T>>> {
    key(at, field, |reg| {
        entries(reg, |id, v| Ok((id.to_string(), Arc::new(v.decode::<T>()?)))).map(|v| v.into_iter().collect())
    })
}

fn lookup<T>(reg: &HashMap<String, Arc<T>>, at: At<'_>, what: &str) -> Parsed<Arc<T>> {
    let id = at.str()?;
    match reg.get(id) {
        Some(x) => Ok(x.clone()),
        None => at.fail(format!("undefined {what} id {id:?}")),
    }
}

pub fn parse_open(s: &str) -> Option<PointSet> {
    let inner = s.trim().strip_prefix('{')?.strip_suffix('}')?.trim();
    if inner.is_empty() {
        return Some(PointSet::EMPTY);
    }
    let points = inner.split(',').map(|p| p.trim().parse::<usize>().ok()).collect::<Option<Vec<_>>>()?;
    if points.iter().any(|&p| p >= 64) {
        return None;
    }
    Some(PointSet::from_points(points))
}

fn open_key(at: At<'_>, k: &str, space: &Space) -> Parsed<PointSet> {
    match parse_open(k) {
        Some(u) if space.is_open(u) => Ok(u),
        Some(u) => at.fail(format!("{u} is not open")),
        None => at.fail(format!("malformed open {k:?}")),
    }
}

fn pair_key(at: At<'_>, k: &str, space: &Space) -> Parsed<(PointSet, PointSet)> {
    match k.split_once('>') {
        Some((u, v)) => Ok((open_key(at, u, space)?, open_key(at, v, space)?)),
        None => at.fail(format!("malformed restriction key {k:?}, expected \"U>V\"")),
    }
}

fn point_set(at: At<'_>, space: &Space) -> Parsed<PointSet> {
    let points = items(at, |_, p| p.usize())?;
    if let Some(&x) = points.iter().find(|&&x| x >= space.points()) {
        return at.fail(format!("point {x} out of range"));
    }
    Ok(PointSet::from_points(points))
}

fn map_at(at: At<'_>, spaces: &HashMap<String, Arc<FinSpace>>, dom: Option<&Space>, cod: Option<&Space>) -> Parsed<ContinuousMap> {
    let d = key(at, "dom", |v| lookup(spaces, v, "space"))?;
    let c = key(at, "cod", |v| lookup(spaces, v, "space"))?;
    if dom.is_some_and(|x| **x != *d) {
        return key(at, "dom", |v| v.fail("domain is not the expected space"));
    }
    if cod.is_some_and(|x| **x != *c) {
        return key(at, "cod", |v| v.fail("codomain is not the expected space"));
    }
    let assign = key(at, "assign", |v| items(v, |_, x| x.usize()))?;
    ContinuousMap::new(d, c, assign).or_else(|e| key(at, "assign", |v| v.fail(e.to_string())))
}

/// Parse a document from text.
pub fn parse_document(text: &str) -> Result<GluingDocument, DocumentError> {
    let root_path = Path::Root;
    let value: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => return Err(DocError { pointer: "/".into(), message: format!("not JSON: {e}") }.into()),
    };
    let root = At { value: &value, path: &root_path };
    let kind = key(root, "kind", |k| match k.str()? {
        "top" => Ok(Kind::Top),
        "sheaf" => Ok(Kind::Sheaf),
        "ringed" => Ok(Kind::Ringed),
        other => k.fail(format!("unknown kind {other:?}")),
    })?;
    let variant = opt_key(root, "variant", |v| v.str().map(str::to_string))?;
    if variant.as_deref() == Some("sch") {
        return Err(DocumentError::SchemeUnsupported);
    }
    let bad_variant = |v: &str| -> Result<GluingDocument, DocumentError> {
        key(root, "variant", |at| at.fail(format!("variant {v:?} does not fit kind {:?}", kind.name()))).map_err(Into::into)
    };
    let doc = match kind {
        Kind::Top => {
            let variant = match variant.as_deref() {
                Some("top") => TopVariant::Top,
                Some("otop") | None => TopVariant::OTop,
                Some(v) => return bad_variant(v),
            };
            key(root, "payload", |p| parse_top(p, variant))?
        }
        Kind::Sheaf => {
            if let Some(v) = variant.as_deref().filter(|v| *v != "top" && *v != "otop") {
                return bad_variant(v);
            }
            key(root, "payload", parse_sheaf)?
        }
        Kind::Ringed => {
            let variant = match variant.as_deref() {
                Some("rts") | None => RingedVariant::Rts,
                Some("lrts") => RingedVariant::Lrts,
                Some(v) => return bad_variant(v),
            };
            key(root, "payload", |p| parse_ringed(p, variant))?
        }
    };
    Ok(doc)
}

fn parse_top(p: At<'_>, variant: TopVariant) -> Parsed<GluingDocument> {
    let spaces = registry::<FinSpace>(p, "spaces")?;
    let charts: Vec<Space> = key(p, "charts", |c| items(c, |_, id| lookup(&spaces, id, "space")))?;
    let n = charts.len();
    if n == 0 {
        return key(p, "charts", |c| c.fail("at least one chart is required"));
    }
    let inclusions = key(p, "inclusions", |t| square(t, n, |i, _, m| map_at(m, &spaces, None, Some(&charts[i]))))?;
    let transitions = key(p, "transitions", |t| {
        square(t, n, |i, j, m| map_at(m, &spaces, Some(inclusions[i][j].dom()), Some(inclusions[j][i].dom())))
    })?;
    let triples = opt_key(p, "triples", |t| {
        items(t, |_, e| {
            let at = key(e, "at", |a| triple_index(a, n))?;
            let space = key(e, "space", |id| lookup(&spaces, id, "space"))?;
            let to_lower = key(e, "to_lower", |m| map_at(m, &spaces, Some(&space), Some(inclusions[at.0][at.1].dom())))?;
            let to_upper = key(e, "to_upper", |m| map_at(m, &spaces, Some(&space), Some(inclusions[at.0][at.2].dom())))?;
            Ok((at, TripleOverlap { space, to_lower, to_upper }))
        })
    })?;
    let data = match triples {
        Some(triples) => {
            let triples: BTreeMap<_, _> = triples.into_iter().collect();
            let triple_transitions = key(p, "triple_transitions", |t| {
                items(t, |_, e| {
                    let at = key(e, "at", |a| triple_index(a, n))?;
                    let dom = triples.get(&(at.0, at.1.min(at.2), at.1.max(at.2))).map(|t| t.space.clone());
                    let cod = triples.get(&(at.1, at.0.min(at.2), at.0.max(at.2))).map(|t| t.space.clone());
                    Ok((at, key(e, "map", |m| map_at(m, &spaces, dom.as_ref(), cod.as_ref()))?))
                })
            })?
            .into_iter()
            .collect();
            TopGluingData { variant, charts: charts.clone(), inclusions, transitions, triples, triple_transitions }
        }
        None => match TopGluingData::with_fiber_triples(variant, charts.clone(), inclusions, transitions) {
            Ok(d) => d,
            Err(e) => return p.fail(e.to_string()),
        },
    };
    let candidate = opt_key(p, "candidate", |c| {
        let space = key(c, "space", |id| lookup(&spaces, id, "space"))?;
        let maps = key(c, "charts", |ms| {
            if ms.array()?.len() != n {
                return ms.fail(format!("expected {n} chart maps"));
            }
            items(ms, |i, m| map_at(m, &spaces, Some(&charts[i]), Some(&space)))
        })?;
        Ok(TopCandidate { space, charts: maps })
    })?;
    Ok(GluingDocument::Top { data, candidate })
}

fn triple_index(at: At<'_>, n: usize) -> Parsed<(usize, usize, usize)> {
    match items(at, |_, x| x.usize())?[..] {
        [i, j, k] if i != j && i != k && j != k && i.max(j).max(k) < n => Ok((i, j, k)),
        _ => at.fail(format!("expected three distinct chart indices below {n}")),
    }
}

fn parse_sheaf(p: At<'_>) -> Parsed<GluingDocument> {
    let spaces = registry::<FinSpace>(p, "spaces")?;
    let groups = registry::<FgAbGroup>(p, "groups")?;
    let base = key(p, "base", |id| lookup(&spaces, id, "space"))?;
    let cover: Vec<PointSet> = key(p, "cover", |c| {
        items(c, |_, u| {
            let set = point_set(u, &base)?;
            if !base.is_open(set) {
                return u.fail(format!("{set} is not open"));
            }
            Ok(set)
        })
    })?;
    let n = cover.len();
    if n == 0 {
        return key(p, "cover", |c| c.fail("at least one cover member is required"));
    }
    let sheaves: Vec<PresheafRef> = key(p, "sheaves", |s| {
        if s.array()?.len() != n {
            return s.fail(format!("expected {n} sheaves"));
        }
        items(s, |i, f| parse_presheaf(f, &base, cover[i], &groups).map(Arc::new))
    })?;
    let transitions = key(p, "transitions", |t| {
        square(t, n, |i, j, m| {
            let w = cover[i].intersection(cover[j]);
            let (src, dst) = match (sheaves[i].restrict_to(w), sheaves[j].restrict_to(w)) {
                (Ok(a), Ok(b)) => (Arc::new(a), Arc::new(b)),
                _ => return m.fail("overlap is not open"),
            };
            let alpha = entries(m, |k, h| {
                let o = open_key(h, k, &base)?;
                if !o.is_subset(w) {
                    return h.fail(format!("{o} is not inside the overlap {w}"));
                }
                let repr: HomRepr = h.decode()?;
                AbHom::from_repr(src.sections(o).clone(), dst.sections(o).clone(), &repr)
                    .map(|hom| (o, hom))
                    .or_else(|e| h.fail(e.to_string()))
            })?;
            let alpha: HashMap<PointSet, AbHom> = alpha.into_iter().collect();
            EnrichedMorphism::new(src, dst, alpha).or_else(|e| m.fail(e.to_string()))
        })
    })?;
    Ok(GluingDocument::Sheaf { data: SheafGluingData { base, cover, sheaves, transitions } })
}

fn parse_presheaf(f: At<'_>, space: &Space, support: PointSet, groups: &HashMap<String, Arc<FgAbGroup>>) -> Parsed<Presheaf> {
    let sections: HashMap<PointSet, Group> = key(f, "sections", |s| {
        entries(s, |k, g| {
            let o = open_key(g, k, space)?;
            if !o.is_subset(support) {
                return g.fail(format!("{o} is outside the support {support}"));
            }
            Ok((o, lookup(groups, g, "group")?))
        })
    })?
    .into_iter()
    .collect();
    let restrictions = key(f, "restrictions", |r| {
        entries(r, |k, h| {
            let (u, v) = pair_key(h, k, space)?;
            let (Some(gu), Some(gv)) = (sections.get(&u), sections.get(&v)) else {
                return h.fail("restriction between opens without sections");
            };
            let repr: HomRepr = h.decode()?;
            AbHom::from_repr(gu.clone(), gv.clone(), &repr).map(|m| ((u, v), m)).or_else(|e| h.fail(e.to_string()))
        })
    })?
    .into_iter()
    .collect();
    Presheaf::new(space.clone(), support, sections, restrictions).or_else(|e| f.fail(e.to_string()))
}

fn ring_hom_at(at: At<'_>, dom: &Ring, cod: &Ring) -> Parsed<RingHom> {
    let map = items(at, |_, x| x.usize())?;
    RingHom::new(dom.clone(), cod.clone(), map).or_else(|e| at.fail(e.to_string()))
}

fn parse_ringed(p: At<'_>, variant: RingedVariant) -> Parsed<GluingDocument> {
    let spaces = registry::<FinSpace>(p, "spaces")?;
    let rings = registry::<FinCommRing>(p, "rings")?;
    let charts: Vec<RingedRef> = key(p, "charts", |cs| {
        items(cs, |_, c| {
            let space = key(c, "space", |id| lookup(&spaces, id, "space"))?;
            let by_open: HashMap<PointSet, Ring> = key(c, "rings", |rs| {
                entries(rs, |k, r| Ok((open_key(r, k, &space)?, lookup(&rings, r, "ring")?)))
            })?
            .into_iter()
            .collect();
            let restrictions: HashMap<(PointSet, PointSet), RingHom> = key(c, "restrictions", |rs| {
                entries(rs, |k, h| {
                    let (u, v) = pair_key(h, k, &space)?;
                    let (Some(ru), Some(rv)) = (by_open.get(&u), by_open.get(&v)) else {
                        return h.fail("restriction between opens without rings");
                    };
                    Ok(((u, v), ring_hom_at(h, ru, rv)?))
                })
            })?
            .into_iter()
            .collect();
            let sheaf = RingSheaf::presheaf(space.clone(), space.full(), by_open, restrictions).or_else(|e| c.fail(e.to_string()))?;
            RingedSpace::new(space, sheaf).map(Arc::new).or_else(|e| c.fail(e.to_string()))
        })
    })?;
    let n = charts.len();
    if n == 0 {
        return key(p, "charts", |c| c.fail("at least one chart is required"));
    }
    let overlaps = key(p, "overlaps", |t| square(t, n, |i, _, u| point_set(u, &charts[i].space)))?;
    let transitions = key(p, "transitions", |t| {
        square(t, n, |i, j, m| {
            let pairs = items(m, |_, pair| {
                let xy = items(pair, |_, x| x.usize())?;
                match xy[..] {
                    [x, y] if overlaps[i][j].contains(x) && overlaps[j][i].contains(y) => Ok((x, y)),
                    [_, _] => pair.fail("pair leaves the overlaps"),
                    _ => pair.fail("expected a pair [x, y]"),
                }
            })?;
            Ok(pairs.into_iter().collect::<BTreeMap<usize, usize>>())
        })
    })?;
    let sheaf_transitions = key(p, "sheaf_transitions", |t| {
        square(t, n, |i, j, m| {
            let out = entries(m, |k, h| {
                let w = open_key(h, k, &charts[i].space)?;
                if !w.is_subset(overlaps[i][j]) || !w.iter().all(|x| transitions[i][j].contains_key(&x)) {
                    return h.fail(format!("{w} is not inside the overlap"));
                }
                let image = PointSet::from_points(w.iter().map(|x| transitions[i][j][&x]));
                if !charts[j].space.is_open(image) {
                    return h.fail(format!("image {image} is not open in chart {j}"));
                }
                Ok((w, ring_hom_at(h, charts[i].sheaf.ring(w), charts[j].sheaf.ring(image))?))
            })?;
            Ok(out.into_iter().collect::<HashMap<_, _>>())
        })
    })?;
    Ok(GluingDocument::Ringed { data: RingedGluingData { variant, charts, overlaps, transitions, sheaf_transitions } })
}

/// Interning registry used when writing documents.
struct Interner<T> {
    prefix: &'static str,
    items: Vec<Arc<T>>,
}

impl<T: PartialEq + serde::Serialize> Interner<T> {
    fn new(prefix: &'static str) -> Self {
        Interner { prefix, items: Vec::new() }
    }

    fn id(&mut self, x: &Arc<T>) -> String {
        let k = match self.items.iter().position(|y| **y == **x) {
            Some(k) => k,
            None => {
                self.items.push(x.clone());
                self.items.len() - 1
            }
        };
        format!("{}{k}", self.prefix)
    }

    fn to_json(&self) -> Value {
        let m: Map<String, Value> = self
            .items
            .iter()
            .enumerate()
            .map(|(k, x)| (format!("{}{k}", self.prefix), serde_json::to_value(&**x).expect("serializable")))
            .collect();
        Value::Object(m)
    }
}

fn map_json(spaces: &mut Interner<FinSpace>, f: &ContinuousMap) -> Value {
    json!({"dom": spaces.id(f.dom()), "cod": spaces.id(f.cod()), "assign": f.assignment()})
}

fn hom_json(h: &AbHom) -> Value {
    serde_json::to_value(h.to_repr().expect("entries fit in i64")).expect("serializable")
}

pub fn top_document(d: &TopGluingData, candidate: Option<&TopCandidate>) -> Value {
    let mut spaces = Interner::new("s");
    let charts: Vec<String> = d.charts.iter().map(|c| spaces.id(c)).collect();
    let inclusions: Vec<Vec<Value>> = d.inclusions.iter().map(|row| row.iter().map(|f| map_json(&mut spaces, f)).collect()).collect();
    let transitions: Vec<Vec<Value>> = d.transitions.iter().map(|row| row.iter().map(|f| map_json(&mut spaces, f)).collect()).collect();
    let triples: Vec<Value> = d
        .triples
        .iter()
        .map(|(&(i, j, k), t)| {
            json!({
                "at": [i, j, k],
                "space": spaces.id(&t.space),
                "to_lower": map_json(&mut spaces, &t.to_lower),
                "to_upper": map_json(&mut spaces, &t.to_upper),
            })
        })
        .collect();
    let triple_transitions: Vec<Value> = d
        .triple_transitions
        .iter()
        .map(|(&(i, j, k), f)| json!({"at": [i, j, k], "map": map_json(&mut spaces, f)}))
        .collect();
    let mut payload = json!({
        "charts": charts,
        "inclusions": inclusions,
        "transitions": transitions,
        "triples": triples,
        "triple_transitions": triple_transitions,
    });
    if let Some(c) = candidate {
        let maps: Vec<Value> = c.charts.iter().map(|f| map_json(&mut spaces, f)).collect();
        payload["candidate"] = json!({"space": spaces.id(&c.space), "charts": maps});
    }
    payload["spaces"] = spaces.to_json();
    let variant = match d.variant {
        TopVariant::Top => "top",
        TopVariant::OTop => "otop",
    };
    json!({"kind": "top", "variant": variant, "payload": payload})
}

fn presheaf_json(f: &Presheaf, groups: &mut Interner<FgAbGroup>) -> Value {
    let sections: Map<String, Value> = f.opens().iter().map(|&o| (o.to_string(), Value::from(groups.id(f.sections(o))))).collect();
    let restrictions: Map<String, Value> = f.restrictions().map(|((u, v), h)| (format!("{u}>{v}"), hom_json(h))).collect();
    json!({"sections": sections, "restrictions": restrictions})
}

pub fn sheaf_document(d: &SheafGluingData) -> Value {
    let mut spaces = Interner::new("s");
    let mut groups = Interner::new("g");
    let base = spaces.id(&d.base);
    let cover: Vec<Vec<usize>> = d.cover.iter().map(|u| u.iter().collect()).collect();
    let sheaves: Vec<Value> = d.sheaves.iter().map(|f| presheaf_json(f, &mut groups)).collect();
    let transitions: Vec<Vec<Value>> = d
        .transitions
        .iter()
        .map(|row| {
            row.iter()
                .map(|m| {
                    let comps: Map<String, Value> = m.source().opens().iter().map(|&o| (o.to_string(), hom_json(m.component(o)))).collect();
                    Value::Object(comps)
                })
                .collect()
        })
        .collect();
    json!({
        "kind": "sheaf",
        "payload": {
            "spaces": spaces.to_json(),
            "groups": groups.to_json(),
            "base": base,
            "cover": cover,
            "sheaves": sheaves,
            "transitions": transitions,
        }
    })
}

pub fn ringed_document(d: &RingedGluingData) -> Value {
    let mut spaces = Interner::new("s");
    let mut rings = Interner::new("r");
    let charts: Vec<Value> = d
        .charts
        .iter()
        .map(|c| {
            let by_open: Map<String, Value> = c.sheaf.opens().iter().map(|&o| (o.to_string(), Value::from(rings.id(c.sheaf.ring(o))))).collect();
            let mut restrictions = Map::new();
            for &u in c.sheaf.opens() {
                for &v in c.sheaf.opens().iter().filter(|v| v.is_subset(u)) {
                    restrictions.insert(format!("{u}>{v}"), json!(c.sheaf.restriction(u, v).map()));
                }
            }
            json!({"space": spaces.id(&c.space), "rings": by_open, "restrictions": restrictions})
        })
        .collect();
    let overlaps: Vec<Vec<Vec<usize>>> = d.overlaps.iter().map(|row| row.iter().map(|u| u.iter().collect()).collect()).collect();
    let transitions: Vec<Vec<Vec<[usize; 2]>>> =
        d.transitions.iter().map(|row| row.iter().map(|m| m.iter().map(|(&x, &y)| [x, y]).collect()).collect()).collect();
    let sheaf_transitions: Vec<Vec<Value>> = d
        .sheaf_transitions
        .iter()
        .map(|row| {
            row.iter()
                .map(|m| Value::Object(m.iter().map(|(w, h)| (w.to_string(), json!(h.map()))).collect()))
                .collect()
        })
        .collect();
    let variant = match d.variant {
        RingedVariant::Rts => "rts",
        RingedVariant::Lrts => "lrts",
        RingedVariant::Sch => "sch",
    };
    json!({
        "kind": "ringed",
        "variant": variant,
        "payload": {
            "spaces": spaces.to_json(),
            "rings": rings.to_json(),
            "charts": charts,
            "overlaps": overlaps,
            "transitions": transitions,
            "sheaf_transitions": sheaf_transitions,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::Sampler;

    #[test]
    fn open_keys() {
        assert_eq!(parse_open("{}"), Some(PointSet::EMPTY));
        assert_eq!(parse_open("{0, 2}"), Some(PointSet(0b101)));
        assert_eq!(parse_open("0,2"), None);
        assert_eq!(PointSet(0b101).to_string(), "{0,2}");
    }

    #[test]
    fn empty_and_undefined_ids() {
        let e = parse_document("").unwrap_err();
        assert!(matches!(e, DocumentError::Invalid(ref d) if d.pointer == "/"));
        let text = r#"{"kind":"top","payload":{"spaces":{"a":{"points":1,"opens":[[],[0]]}},"charts":["a"],
            "inclusions":[[{"dom":"a","cod":"b","assign":[0]}]],"transitions":[[{"dom":"a","cod":"a","assign":[0]}]]}}"#;
        match parse_document(text).unwrap_err() {
            DocumentError::Invalid(d) => assert_eq!(d.pointer, "/payload/inclusions/0/0/cod"),
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_document(r#"{"kind":"ringed","variant":"sch"}"#).unwrap_err(), DocumentError::SchemeUnsupported);
    }

    #[test]
    fn generated_documents_round_trip() {
        let mut s = Sampler::new(11);
        for _ in 0..5 {
            let t = s.top_instance(4, 3, TopVariant::OTop);
            let d = crate::top_glue::data_from_functor(&t.functor).unwrap();
            let text = top_document(&d, None).to_string();
            match parse_document(&text).unwrap() {
                GluingDocument::Top { data, .. } => assert_eq!(data, d),
                _ => panic!("kind"),
            }
            let sd = s.sheaf_data(3, 2, 3);
            match parse_document(&sheaf_document(&sd).to_string()).unwrap() {
                GluingDocument::Sheaf { data } => assert_eq!(data, sd),
                _ => panic!("kind"),
            }
            let rd = s.ringed_data(3, 2, RingedVariant::Rts);
            match parse_document(&ringed_document(&rd).to_string()).unwrap() {
                GluingDocument::Ringed { data } => assert_eq!(data, rd),
                _ => panic!("kind"),
            }
        }
    }
}
