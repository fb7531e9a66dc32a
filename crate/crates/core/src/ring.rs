//! Finite commutative rings with unity as operation tables, their homomorphisms,
//! and the additive group of a ring as a finitely generated abelian group.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{AbHom, FgAbGroup, Group, IntMatrix};

pub const MAX_RING_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("ring order {0} outside 1..={MAX_RING_ORDER}")]
    Order(usize),
    #[error("table {0} is not {1}x{1} with entries below {1}")]
    Table(&'static str, usize),
    #[error("no additive identity")]
    NoZero,
    #[error("{law} fails at {witness:?}")]
    Law { law: &'static str, witness: Vec<usize> },
    #[error("map does not preserve {0}")]
    NotHom(&'static str),
    #[error("map has {got} entries, expected {expected}")]
    MapLength { got: usize, expected: usize },
}

/// Additive structure: greedy generators with triangular relations.
#[derive(Clone)]
struct Additive {
    gens: Vec<usize>,
    orders: Vec<usize>,
    coords: Vec<Vec<BigInt>>,
    group: Group,
}

#[derive(Clone)]
pub struct FinCommRing {
    order: usize,
    add: Vec<Vec<usize>>,
    mul: Vec<Vec<usize>>,
    zero: usize,
    one: usize,
    neg: Vec<usize>,
    additive: Additive,
}

pub type Ring = Arc<FinCommRing>;

impl PartialEq for FinCommRing {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.one == other.one && self.add == other.add && self.mul == other.mul
    }
}

impl Eq for FinCommRing {}

impl fmt::Debug for FinCommRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring(order {}, additive {})", self.order, self.additive.group)
    }
}

fn check_table(name: &'static str, t: &[Vec<usize>], n: usize) -> Result<(), RingError> {
    if t.len() != n || t.iter().any(|row| row.len() != n || row.iter().any(|&e| e >= n)) {
        return Err(RingError::Table(name, n));
    }
    Ok(())
}

/// Validate operation tables and build the ring.
pub fn make_ring(add: Vec<Vec<usize>>, mul: Vec<Vec<usize>>, one: usize) -> Result<FinCommRing, RingError> {
    let n = add.len();
    if n == 0 || n > MAX_RING_ORDER {
        return Err(RingError::Order(n));
    }
    check_table("add", &add, n)?;
    check_table("mul", &mul, n)?;
    if one >= n {
        return Err(RingError::Table("one", n));
    }
    let zero = (0..n).find(|&z| (0..n).all(|x| add[z][x] == x)).ok_or(RingError::NoZero)?;
    let law = |law, witness: Vec<usize>| Err(RingError::Law { law, witness });
    for x in 0..n {
        if !(0..n).any(|y| add[x][y] == zero) {
            return law("additive inverses", vec![x]);
        }
        if mul[one][x] != x {
            return law("multiplicative unit", vec![x]);
        }
        for y in 0..n {
            if add[x][y] != add[y][x] {
                return law("additive commutativity", vec![x, y]);
            }
            if mul[x][y] != mul[y][x] {
                return law("multiplicative commutativity", vec![x, y]);
            }
            for z in 0..n {
                if add[add[x][y]][z] != add[x][add[y][z]] {
                    return law("additive associativity", vec![x, y, z]);
                }
                if mul[mul[x][y]][z] != mul[x][mul[y][z]] {
                    return law("multiplicative associativity", vec![x, y, z]);
                }
                if mul[x][add[y][z]] != add[mul[x][y]][mul[x][z]] {
                    return law("distributivity", vec![x, y, z]);
                }
            }
        }
    }
    Ok(FinCommRing::unchecked(add, mul, zero, one))
}

impl FinCommRing {
    /// Trusted tables, used for rings assembled from rings already checked.
    pub(crate) fn unchecked(add: Vec<Vec<usize>>, mul: Vec<Vec<usize>>, zero: usize, one: usize) -> Self {
        let order = add.len();
        let neg = (0..order).map(|x| (0..order).find(|&y| add[x][y] == zero).expect("inverse")).collect();
        let additive = additive_structure(&add, zero);
        FinCommRing { order, add, mul, zero, one, neg, additive }
    }

    pub fn zmod(n: usize) -> Self {
        let add = (0..n).map(|x| (0..n).map(|y| (x + y) % n).collect()).collect();
        let mul = (0..n).map(|x| (0..n).map(|y| (x * y) % n).collect()).collect();
        FinCommRing::unchecked(add, mul, 0, 1 % n)
    }

    /// The field with four elements `{0, 1, a, a+1}` with `a² = a + 1`.
    pub fn gf4() -> Self {
        // element b0 + 2*b1 stands for b0 + b1 a
        let add = (0..4).map(|x| (0..4).map(|y| x ^ y).collect()).collect();
        let mul_poly = |x: usize, y: usize| {
            let (x0, x1, y0, y1) = (x & 1, x >> 1, y & 1, y >> 1);
            let c0 = (x0 & y0) ^ (x1 & y1);
            let c1 = (x0 & y1) ^ (x1 & y0) ^ (x1 & y1);
            c0 | (c1 << 1)
        };
        let mul = (0..4).map(|x| (0..4).map(|y| mul_poly(x, y)).collect()).collect();
        FinCommRing::unchecked(add, mul, 0, 1)
    }

    pub fn zero_ring() -> Self {
        FinCommRing::unchecked(vec![vec![0]], vec![vec![0]], 0, 0)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn add(&self, x: usize, y: usize) -> usize {
        self.add[x][y]
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x][y]
    }

    pub fn neg(&self, x: usize) -> usize {
        self.neg[x]
    }

    pub fn add_table(&self) -> &[Vec<usize>] {
        &self.add
    }

    pub fn mul_table(&self) -> &[Vec<usize>] {
        &self.mul
    }

    /// `k · x` for any integer `k`.
    pub fn times(&self, k: &BigInt, x: usize) -> usize {
        let ord = self.additive_order(x);
        let r = (k % BigInt::from(ord) + BigInt::from(ord)) % BigInt::from(ord);
        let r = r.to_usize().expect("small");
        (0..r).fold(self.zero, |acc, _| self.add[acc][x])
    }

    pub fn additive_order(&self, x: usize) -> usize {
        let mut cur = x;
        let mut k = 1;
        while cur != self.zero {
            cur = self.add[cur][x];
            k += 1;
        }
        k
    }

    pub fn is_unit(&self, x: usize) -> bool {
        (0..self.order).any(|y| self.mul[x][y] == self.one)
    }

    pub fn units(&self) -> Vec<usize> {
        (0..self.order).filter(|&x| self.is_unit(x)).collect()
    }

    /// A nonzero ring whose non-units are closed under addition.
    pub fn is_local(&self) -> bool {
        if self.order == 1 {
            return false;
        }
        let non_units: Vec<usize> = (0..self.order).filter(|&x| !self.is_unit(x)).collect();
        non_units.iter().all(|&x| non_units.iter().all(|&y| !self.is_unit(self.add[x][y])))
    }

    pub fn characteristic(&self) -> usize {
        self.additive_order(self.one)
    }

    pub fn additive_group(&self) -> &Group {
        &self.additive.group
    }

    /// Coordinates of `x` in the additive group.
    pub fn encode(&self, x: usize) -> &[BigInt] {
        &self.additive.coords[x]
    }

    /// The element with the given additive coordinates.
    pub fn decode(&self, v: &[BigInt]) -> usize {
        self.additive.gens.iter().zip(v).fold(self.zero, |acc, (&g, c)| self.add[acc][self.times(c, g)])
    }

    pub fn additive_generators(&self) -> &[usize] {
        &self.additive.gens
    }

    /// Product ring; element `(x_0, .., x_k)` has id in mixed radix with the first factor fastest.
    pub fn product(factors: &[Ring]) -> Self {
        let sizes: Vec<usize> = factors.iter().map(|r| r.order).collect();
        let total: usize = sizes.iter().product();
        let split = |mut id: usize| {
            sizes
                .iter()
                .map(|&s| {
                    let d = id % s;
                    id /= s;
                    d
                })
                .collect::<Vec<_>>()
        };
        let join = |parts: &[usize]| parts.iter().zip(&sizes).rev().fold(0, |acc, (&d, &s)| acc * s + d);
        let parts: Vec<Vec<usize>> = (0..total).map(split).collect();
        let table = |op: &dyn Fn(&FinCommRing, usize, usize) -> usize| -> Vec<Vec<usize>> {
            (0..total)
                .map(|x| {
                    (0..total)
                        .map(|y| {
                            let z: Vec<usize> = factors.iter().enumerate().map(|(k, r)| op(r, parts[x][k], parts[y][k])).collect();
                            join(&z)
                        })
                        .collect()
                })
                .collect()
        };
        let add = table(&|r, a, b| r.add[a][b]);
        let mul = table(&|r, a, b| r.mul[a][b]);
        let zero = join(&factors.iter().map(|r| r.zero).collect::<Vec<_>>());
        let one = join(&factors.iter().map(|r| r.one).collect::<Vec<_>>());
        FinCommRing::unchecked(add, mul, zero, one)
    }

    /// Mixed-radix digits of a product-ring element.
    pub fn product_parts(factors: &[Ring], mut id: usize) -> Vec<usize> {
        factors
            .iter()
            .map(|r| {
                let d = id % r.order;
                id /= r.order;
                d
            })
            .collect()
    }

    pub fn product_id(factors: &[Ring], parts: &[usize]) -> usize {
        parts.iter().zip(factors).rev().fold(0, |acc, (&d, r)| acc * r.order + d)
    }
}

fn additive_structure(add: &[Vec<usize>], zero: usize) -> Additive {
    let n = add.len();
    let mut coords: Vec<Option<Vec<i64>>> = vec![None; n];
    coords[zero] = Some(vec![]);
    let mut members = vec![zero];
    let mut gens = Vec::new();
    let mut orders = Vec::new();
    let mut relations: Vec<Vec<i64>> = Vec::new();
    for cand in 0..n {
        if coords[cand].is_some() {
            continue;
        }
        let t = gens.len();
        let mut m = 1;
        let mut cur = cand;
        while coords[cur].is_none() {
            cur = add[cur][cand];
            m += 1;
        }
        let mut rel: Vec<i64> = coords[cur].clone().expect("in span").iter().map(|c| -c).collect();
        rel.resize(t, 0);
        rel.push(m as i64);
        relations.push(rel);
        for c in coords.iter_mut().flatten() {
            c.resize(t + 1, 0);
        }
        let old = members.clone();
        for &s in &old {
            let mut e = s;
            for c in 1..m {
                e = add[e][cand];
                let mut v = coords[s].clone().expect("member");
                v[t] = c as i64;
                coords[e] = Some(v);
                members.push(e);
            }
        }
        gens.push(cand);
        let mut ord = 1;
        let mut x = cand;
        while x != zero {
            x = add[x][cand];
            ord += 1;
        }
        orders.push(ord);
    }
    let k = gens.len();
    let columns: Vec<Vec<BigInt>> = relations
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.resize(k, 0);
            r.into_iter().map(BigInt::from).collect()
        })
        .collect();
    let group = Arc::new(FgAbGroup::new(k, IntMatrix::from_columns(k, &columns)).expect("additive presentation"));
    let coords = coords
        .into_iter()
        .map(|c| {
            let mut c = c.expect("greedy span covers the ring");
            c.resize(k, 0);
            c.into_iter().map(BigInt::from).collect()
        })
        .collect();
    Additive { gens, orders, coords, group }
}

#[derive(Serialize, Deserialize)]
pub struct RingRepr {
    pub order: usize,
    pub add: Vec<Vec<usize>>,
    pub mul: Vec<Vec<usize>>,
    pub one: usize,
}

impl Serialize for FinCommRing {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RingRepr { order: self.order, add: self.add.clone(), mul: self.mul.clone(), one: self.one }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinCommRing {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = RingRepr::deserialize(d)?;
        if r.add.len() != r.order {
            return Err(serde::de::Error::custom(format!("order {} does not match the tables", r.order)));
        }
        make_ring(r.add, r.mul, r.one).map_err(serde::de::Error::custom)
    }
}

/// A unital ring homomorphism given by its values.
#[derive(Clone, PartialEq, Eq)]
pub struct RingHom {
    dom: Ring,
    cod: Ring,
    map: Vec<usize>,
}

impl fmt::Debug for RingHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingHom{:?}", self.map)
    }
}

impl RingHom {
    pub fn new(dom: Ring, cod: Ring, map: Vec<usize>) -> Result<Self, RingError> {
        if map.len() != dom.order || map.iter().any(|&y| y >= cod.order) {
            return Err(RingError::MapLength { got: map.len(), expected: dom.order });
        }
        if map[dom.one] != cod.one {
            return Err(RingError::NotHom("one"));
        }
        for x in 0..dom.order {
            for y in 0..dom.order {
                if map[dom.add[x][y]] != cod.add[map[x]][map[y]] {
                    return Err(RingError::NotHom("addition"));
                }
                if map[dom.mul[x][y]] != cod.mul[map[x]][map[y]] {
                    return Err(RingError::NotHom("multiplication"));
                }
            }
        }
        Ok(RingHom { dom, cod, map })
    }

    pub fn identity(r: Ring) -> Self {
        let map = (0..r.order).collect();
        RingHom { dom: r.clone(), cod: r, map }
    }

    pub fn dom(&self) -> &Ring {
        &self.dom
    }

    pub fn cod(&self) -> &Ring {
        &self.cod
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &RingHom) -> Option<RingHom> {
        if *self.cod != *next.dom {
            return None;
        }
        Some(RingHom { dom: self.dom.clone(), cod: next.cod.clone(), map: self.map.iter().map(|&y| next.map[y]).collect() })
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.cod.order];
        self.dom.order == self.cod.order && self.map.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    pub fn inverse(&self) -> Option<RingHom> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.cod.order];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y] = x;
        }
        Some(RingHom { dom: self.cod.clone(), cod: self.dom.clone(), map: inv })
    }

    /// Units are reflected.
    pub fn is_local(&self) -> bool {
        (0..self.dom.order).all(|x| !self.cod.is_unit(self.map[x]) || self.dom.is_unit(x))
    }

    /// The underlying additive homomorphism.
    pub fn to_ab(&self) -> AbHom {
        let columns: Vec<Vec<BigInt>> = self.dom.additive.gens.iter().map(|&g| self.cod.encode(self.map[g]).to_vec()).collect();
        let rows = self.cod.additive.group.ambient();
        AbHom::new(self.dom.additive.group.clone(), self.cod.additive.group.clone(), IntMatrix::from_columns(rows, &columns))
            .expect("ring homs are additive")
    }
}

/// Every ring homomorphism `dom → cod`, by choosing images of additive generators.
pub fn all_homs(dom: &Ring, cod: &Ring) -> Vec<RingHom> {
    let gens = &dom.additive.gens;
    let orders = &dom.additive.orders;
    let mut out = Vec::new();
    let mut images = vec![0usize; gens.len()];
    fn rec(t: usize, dom: &Ring, cod: &Ring, orders: &[usize], images: &mut Vec<usize>, out: &mut Vec<RingHom>) {
        if t == images.len() {
            let map: Vec<usize> = (0..dom.order)
                .map(|x| {
                    dom.encode(x).iter().zip(images.iter()).fold(cod.zero, |acc, (c, &y)| cod.add[acc][cod.times(c, y)])
                })
                .collect();
            if let Ok(h) = RingHom::new(dom.clone(), cod.clone(), map) {
                out.push(h);
            }
            return;
        }
        for y in 0..cod.order {
            if orders[t].is_multiple_of(cod.additive_order(y)) {
                images[t] = y;
                rec(t + 1, dom, cod, orders, images, out);
            }
        }
    }
    rec(0, dom, cod, orders, &mut images, &mut out);
    out
}

pub fn automorphisms(r: &Ring) -> Vec<RingHom> {
    all_homs(r, r).into_iter().filter(RingHom::is_bijective).collect()
}

/// `x ↦ x^p` when it is a ring endomorphism (`p` the characteristic, a prime).
pub fn frobenius(r: &Ring) -> Option<RingHom> {
    let p = r.characteristic();
    if p < 2 || (2..p).any(|d| p.is_multiple_of(d)) {
        return None;
    }
    let map = (0..r.order).map(|x| (1..p).fold(x, |acc, _| r.mul[acc][x])).collect();
    RingHom::new(r.clone(), r.clone(), map).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locality() {
        assert!(FinCommRing::zmod(2).is_local());
        assert!(FinCommRing::zmod(4).is_local());
        assert!(!FinCommRing::zmod(6).is_local());
        assert!(FinCommRing::gf4().is_local());
        assert!(!FinCommRing::zero_ring().is_local());
    }

    #[test]
    fn additive_groups() {
        assert_eq!(FinCommRing::zmod(8).additive_group().to_string(), "Z/8");
        let v4 = FinCommRing::gf4();
        assert_eq!(v4.additive_group().order(), Some(BigInt::from(4)));
        for x in 0..4 {
            assert_eq!(v4.decode(v4.encode(x)), x);
        }
    }

    #[test]
    fn homs_and_automorphisms() {
        let z4 = Arc::new(FinCommRing::zmod(4));
        let z2 = Arc::new(FinCommRing::zmod(2));
        assert_eq!(all_homs(&z4, &z2).len(), 1);
        assert!(all_homs(&z2, &z4).is_empty());
        let f = Arc::new(FinCommRing::gf4());
        assert_eq!(automorphisms(&f).len(), 2);
        assert!(frobenius(&f).unwrap().is_bijective());
        let v = Arc::new(FinCommRing::product(&[z2.clone(), z2.clone()]));
        assert_eq!(automorphisms(&v).len(), 2);
    }

    #[test]
    fn rejects_bad_tables() {
        let add = vec![vec![0, 1], vec![1, 0]];
        let mul = vec![vec![0, 0], vec![0, 0]];
        assert!(matches!(make_ring(add, mul, 1), Err(RingError::Law { law: "multiplicative unit", .. })));
    }
}
