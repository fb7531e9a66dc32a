//! Independent oracles: brute-force recomputations that share no code paths with the
//! library beyond its data types.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use glue_core::doc::{parse_document, GluingDocument};
use glue_core::group::{Group, IntMatrix};
use glue_core::index::GlueObject;
use glue_core::ring::FinCommRing;
use glue_core::sheaf_glue::SheafGluingFunctor;
use glue_core::space::{ContinuousMap, PointSet};
use glue_core::top_glue::{GluedSpace, TopGluingData};
use num_bigint::BigInt;
use num_integer::Integer;

pub const TWO_ORIGINS: &str = include_str!("../../../../fixtures/two_origins.json");
pub const TWO_ORIGINS_SHEAF: &str = include_str!("../../../../fixtures/two_origins_sheaf.json");
pub const TWO_ORIGINS_RINGED: &str = include_str!("../../../../fixtures/two_origins_ringed.json");

pub fn two_origins_data() -> TopGluingData {
    match parse_document(TWO_ORIGINS).expect("fixture parses") {
        GluingDocument::Top { data, .. } => data,
        _ => panic!("fixture kind"),
    }
}

/// Index category from raw tuples: a class is (first entry, set of the other
/// entries different from it); arrows are the generating inclusions and swaps, closed
/// reflexively and transitively.
pub struct IndexOracle {
    pub classes: Vec<(usize, BTreeSet<usize>)>,
    pub reach: Vec<Vec<bool>>,
}

pub fn class_of(t: &[usize]) -> (usize, BTreeSet<usize>) {
    (t[0], t[1..].iter().copied().filter(|&x| x != t[0]).collect())
}

impl IndexOracle {
    pub fn new(n: usize) -> Self {
        let mut classes: BTreeSet<(usize, BTreeSet<usize>)> = BTreeSet::new();
        let mut edges = Vec::new();
        for i in 0..n {
            classes.insert(class_of(&[i]));
            for j in 0..n {
                classes.insert(class_of(&[i, j]));
                edges.push((class_of(&[i]), class_of(&[i, j])));
                edges.push((class_of(&[j, i]), class_of(&[i, j])));
                for k in 0..n {
                    classes.insert(class_of(&[i, j, k]));
                    edges.push((class_of(&[i, j]), class_of(&[i, j, k])));
                    edges.push((class_of(&[i, k]), class_of(&[i, j, k])));
                    edges.push((class_of(&[j, i, k]), class_of(&[i, j, k])));
                }
            }
        }
        let classes: Vec<_> = classes.into_iter().collect();
        let pos: HashMap<_, usize> = classes.iter().enumerate().map(|(p, c)| (c.clone(), p)).collect();
        let m = classes.len();
        let mut reach = vec![vec![false; m]; m];
        for (p, row) in reach.iter_mut().enumerate() {
            row[p] = true;
        }
        for (a, b) in edges {
            reach[pos[&a]][pos[&b]] = true;
        }
        for k in 0..m {
            for a in 0..m {
                if reach[a][k] {
                    for b in 0..m {
                        if reach[k][b] {
                            reach[a][b] = true;
                        }
                    }
                }
            }
        }
        IndexOracle { classes, reach }
    }

    pub fn position(&self, a: &GlueObject) -> usize {
        let c = class_of(&a.indices());
        self.classes.iter().position(|d| *d == c).expect("class exists")
    }

    pub fn morphisms(&self) -> usize {
        self.reach.iter().flatten().filter(|&&b| b).count()
    }
}

/// Glued space recomputed by union-find on the disjoint union and brute-force
/// quotient topology. Returns the class of every chart point and the open sets as
/// sets of classes.
pub struct GluedOracle {
    pub class: Vec<Vec<usize>>,
    pub classes: usize,
    pub opens: BTreeSet<BTreeSet<usize>>,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

pub fn glue_oracle(d: &TopGluingData) -> GluedOracle {
    let n = d.n();
    let offsets: Vec<usize> = d.charts.iter().scan(0, |acc, c| {
        let o = *acc;
        *acc += c.points();
        Some(o)
    }).collect();
    let total: usize = d.charts.iter().map(|c| c.points()).sum();
    let mut parent: Vec<usize> = (0..total).collect();
    for i in 0..n {
        for j in 0..n {
            let up = &d.inclusions[i][j];
            let across = &d.transitions[i][j];
            let back = &d.inclusions[j][i];
            for u in 0..up.dom().points() {
                let a = find(&mut parent, offsets[i] + up.apply(u));
                let b = find(&mut parent, offsets[j] + back.apply(across.apply(u)));
                parent[a] = b;
            }
        }
    }
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    let mut class = Vec::new();
    for i in 0..n {
        let row: Vec<usize> = (0..d.charts[i].points())
            .map(|x| {
                let r = find(&mut parent, offsets[i] + x);
                let next = ids.len();
                *ids.entry(r).or_insert(next)
            })
            .collect();
        class.push(row);
    }
    let classes = ids.len();
    let mut opens = BTreeSet::new();
    for mask in 0u64..(1 << classes) {
        let open = (0..n).all(|i| {
            let pre = PointSet::from_points((0..d.charts[i].points()).filter(|&x| mask >> class[i][x] & 1 == 1));
            d.charts[i].is_open(pre)
        });
        if open {
            opens.insert((0..classes).filter(|&c| mask >> c & 1 == 1).collect());
        }
    }
    GluedOracle { class, classes, opens }
}

/// Whether the library's glued space matches the oracle through the chart maps.
pub fn agrees_with_oracle(oracle: &GluedOracle, glued: &GluedSpace) -> bool {
    let q = &glued.q;
    if q.points() != oracle.classes {
        return false;
    }
    let mut to_q = vec![None; oracle.classes];
    for (i, row) in oracle.class.iter().enumerate() {
        let chart = &glued.iota[&GlueObject::Single(i)];
        for (x, &c) in row.iter().enumerate() {
            match to_q[c] {
                None => to_q[c] = Some(chart.apply(x)),
                Some(p) if p == chart.apply(x) => {}
                Some(_) => return false,
            }
        }
    }
    let to_q: Vec<usize> = to_q.into_iter().map(|p| p.expect("every class has a chart point")).collect();
    let lib_opens: BTreeSet<BTreeSet<usize>> = q
        .opens()
        .iter()
        .map(|o| (0..oracle.classes).filter(|&c| o.contains(to_q[c])).collect())
        .collect();
    lib_opens == oracle.opens
}

/// Whether `mu ∘ chart_i` equals `leg_i` pointwise.
pub fn commutes(mu: &ContinuousMap, chart: &ContinuousMap, leg: &ContinuousMap) -> bool {
    (0..chart.dom().points()).all(|x| mu.apply(chart.apply(x)) == leg.apply(x))
}

/// Permutation-expansion determinant.
pub fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = 0i128;
    loop {
        let mut sign = 1i128;
        for a in 0..n {
            for b in a + 1..n {
                if perm[a] > perm[b] {
                    sign = -sign;
                }
            }
        }
        total += sign * (0..n).map(|r| m[r][perm[r]]).product::<i128>();
        // next permutation
        let Some(k) = (0..n.saturating_sub(1)).rev().find(|&k| perm[k] < perm[k + 1]) else { break };
        let l = (k + 1..n).rev().find(|&l| perm[k] < perm[l]).expect("exists");
        perm.swap(k, l);
        perm[k + 1..].reverse();
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect()).collect()
}

/// Invariant factors from determinantal divisors: `d_k` is the gcd of all `k × k`
/// minors and the factors are `d_k / d_{k-1}` while `d_k ≠ 0`.
pub fn invariant_factors_by_minors(a: &[Vec<i64>]) -> Vec<i128> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut prev = 1i128;
    for k in 1..=rows.min(cols) {
        let mut g = 0i128;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<i128>> = rs.iter().map(|&r| cs.iter().map(|&c| a[r][c] as i128).collect()).collect();
                g = g.gcd(&det(&minor));
            }
        }
        if g == 0 {
            break;
        }
        out.push(g / prev);
        prev = g;
    }
    out
}

pub fn to_i128(m: &IntMatrix) -> Vec<Vec<i128>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(|x| i128::try_from(x.clone()).expect("small")).collect()).collect()
}

/// Locality by the criterion "x or 1 - x is a unit for every x", checked on the tables.
pub fn local_by_units(r: &FinCommRing) -> bool {
    let n = r.order();
    if n == 1 {
        return false;
    }
    let unit = |x: usize| (0..n).any(|y| r.mul(x, y) == r.one());
    (0..n).all(|x| unit(x) || unit(r.add(r.one(), r.neg(x))))
}

/// Order of `L(V)` by enumerating compatible tuples, when every group involved is finite
/// and the search space is at most `limit`.
pub fn limit_order_by_enumeration(g: &SheafGluingFunctor, v: PointSet, limit: usize) -> Option<usize> {
    let n = g.n();
    let cover = g.cover();
    let pieces: Vec<Group> = (0..n).map(|i| g.chart(i).sections(v.intersection(cover[i])).clone()).collect();
    let mut size = 1usize;
    for p in &pieces {
        let o = p.order()?;
        size = size.checked_mul(usize::try_from(o).ok()?)?;
        if size > limit {
            return None;
        }
    }
    let elements: Vec<Vec<Vec<BigInt>>> = pieces.iter().map(|p| p.elements().expect("finite")).collect();
    let mut count = 0;
    let mut idx = vec![0usize; n];
    'outer: loop {
        let ok = (0..n).all(|i| {
            (0..n).filter(|&j| j != i).all(|j| {
                let w = v.intersection(cover[i]).intersection(cover[j]);
                let fi = g.chart(i);
                let fj = g.chart(j);
                let left = g.transition(i, j).component(w).apply(&fi.restriction(v.intersection(cover[i]), w).apply(&elements[i][idx[i]]));
                let right = fj.restriction(v.intersection(cover[j]), w).apply(&elements[j][idx[j]]);
                fj.sections(w).elements_equal(&left, &right)
            })
        });
        if ok {
            count += 1;
        }
        for p in 0..n {
            idx[p] += 1;
            if idx[p] < elements[p].len() {
                continue 'outer;
            }
            idx[p] = 0;
        }
        break;
    }
    Some(count)
}
