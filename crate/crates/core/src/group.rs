//! Finitely generated abelian groups `Z^m / span(R)` and their homomorphisms,
//! decided with Smith normal form over arbitrary-precision integers.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix does not send relations into relations (column {0})")]
    NotWellDefined(usize),
    #[error("homs are not composable")]
    NotComposable,
    #[error("entry {0} does not fit in 64 bits")]
    TooLarge(BigInt),
}

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> =
            (0..self.rows).map(|r| (0..self.cols).map(|c| self[(r, c)].to_string()).collect()).collect();
        write!(f, "{rows:?}")
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m[(i, i)] = BigInt::from(d);
        }
        m
    }

    /// Build from rows; all rows must have length `cols`.
    pub fn from_rows(rows: usize, cols: usize, entries: &[Vec<i64>]) -> Self {
        assert_eq!(entries.len(), rows);
        let mut m = Self::zeros(rows, cols);
        for (r, row) in entries.iter().enumerate() {
            assert_eq!(row.len(), cols);
            for (c, &x) in row.iter().enumerate() {
                m[(r, c)] = BigInt::from(x);
            }
        }
        m
    }

    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (r, x) in col.iter().enumerate() {
                m[(r, c)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn row(&self, r: usize) -> Vec<BigInt> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimensions");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| &self[(r, c)] * &v[c]).sum())
            .collect()
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * k).collect() }
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].clone();
            }
        }
        out
    }

    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = IntMatrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = self[(r, c)].clone();
            }
            for c in 0..other.cols {
                out[(r, self.cols + c)] = other[(r, c)].clone();
            }
        }
        out
    }

    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn block_diagonal(blocks: &[&IntMatrix]) -> IntMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = IntMatrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out[(r0 + r, c0 + c)] = b[(r, c)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> IntMatrix {
        let mut out = IntMatrix::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            for c in 0..self.cols {
                out[(i, c)] = self[(r, c)].clone();
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out[(r, j)] = self[(r, c)].clone();
            }
        }
        out
    }

    /// Determinant by fraction-free elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&r| !a[(r, k)].is_zero()) {
                    Some(r) => {
                        a.swap_rows(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = v / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    pub fn to_i64_rows(&self) -> Result<Vec<Vec<i64>>, GroupError> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self[(r, c)].to_i64().ok_or_else(|| GroupError::TooLarge(self[(r, c)].clone())))
                    .collect()
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    // row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for c in 0..self.cols {
            let v = &self[(src, c)] * k;
            self[(dst, c)] += v;
        }
    }

    // col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for r in 0..self.rows {
            let v = &self[(r, src)] * k;
            self[(r, dst)] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -&self[(r, c)];
            self[(r, c)] = v;
        }
    }

    fn negate_col(&mut self, c: usize) {
        for r in 0..self.rows {
            let v = -&self[(r, c)];
            self[(r, c)] = v;
        }
    }
}

/// `u · a · v = s` with `u`, `v` unimodular and `s` diagonal with a divisibility chain.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub rank: usize,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s[(i, i)].clone()).collect()
    }

    /// Some `x` with `a · x = b`, if one exists.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        let c = self.u.mul_vec(b);
        let mut y = vec![BigInt::zero(); self.s.cols];
        for (t, ct) in c.iter().enumerate() {
            if t < self.rank {
                let (q, r) = ct.div_rem(&self.s[(t, t)]);
                if !r.is_zero() {
                    return None;
                }
                y[t] = q;
            } else if !ct.is_zero() {
                return None;
            }
        }
        Some(self.v.mul_vec(&y))
    }

    /// Basis of the integer kernel of `a`.
    pub fn kernel_basis(&self) -> IntMatrix {
        let cols: Vec<usize> = (self.rank..self.s.cols).collect();
        self.v.select_columns(&cols)
    }

    /// Basis of the column span of `a`.
    pub fn image_basis(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.s.rows, self.rank);
        for t in 0..self.rank {
            for r in 0..self.s.rows {
                out[(r, t)] = &self.u_inv[(r, t)] * &self.s[(t, t)];
            }
        }
        out
    }
}

// Quotient rounded to nearest, so remainders are at most half the divisor.
fn nearest_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if (&r * 2u32).abs() > b.abs() {
        q + 1
    } else {
        q
    }
}

pub fn snf(a: &IntMatrix) -> Snf {
    let (m, n) = (a.rows, a.cols);
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);

    // every row/column operation is mirrored on the transforms and their inverses
    let swap_rows = |s: &mut IntMatrix, u: &mut IntMatrix, u_inv: &mut IntMatrix, a: usize, b: usize| {
        s.swap_rows(a, b);
        u.swap_rows(a, b);
        u_inv.swap_cols(a, b);
    };
    let swap_cols = |s: &mut IntMatrix, v: &mut IntMatrix, v_inv: &mut IntMatrix, a: usize, b: usize| {
        s.swap_cols(a, b);
        v.swap_cols(a, b);
        v_inv.swap_rows(a, b);
    };
    let add_row = |s: &mut IntMatrix, u: &mut IntMatrix, u_inv: &mut IntMatrix, dst: usize, src: usize, k: &BigInt| {
        s.add_row(dst, src, k);
        u.add_row(dst, src, k);
        u_inv.add_col(src, dst, &-k);
    };
    let add_col = |s: &mut IntMatrix, v: &mut IntMatrix, v_inv: &mut IntMatrix, dst: usize, src: usize, k: &BigInt| {
        s.add_col(dst, src, k);
        v.add_col(dst, src, k);
        v_inv.add_row(src, dst, &-k);
    };

    let mut t = 0;
    while t < m.min(n) {
        let pivot = (t..m)
            .flat_map(|r| (t..n).map(move |c| (r, c)))
            .filter(|&rc| !s[rc].is_zero())
            .min_by_key(|&rc| s[rc].abs());
        let Some((pr, pc)) = pivot else { break };
        swap_rows(&mut s, &mut u, &mut u_inv, t, pr);
        swap_cols(&mut s, &mut v, &mut v_inv, t, pc);
        loop {
            // smallest nonzero entry of row t and column t becomes the pivot
            let line = (t..m).map(|r| (r, t)).chain((t + 1..n).map(|c| (t, c)));
            let (pr, pc) = line.filter(|&rc| !s[rc].is_zero()).min_by_key(|&rc| s[rc].abs()).expect("pivot is nonzero");
            swap_rows(&mut s, &mut u, &mut u_inv, t, pr);
            swap_cols(&mut s, &mut v, &mut v_inv, t, pc);
            let mut clean = true;
            for r in t + 1..m {
                if !s[(r, t)].is_zero() {
                    let q = nearest_quotient(&s[(r, t)], &s[(t, t)]);
                    add_row(&mut s, &mut u, &mut u_inv, r, t, &-q);
                    clean &= s[(r, t)].is_zero();
                }
            }
            if !clean {
                continue;
            }
            for c in t + 1..n {
                if !s[(t, c)].is_zero() {
                    let q = nearest_quotient(&s[(t, c)], &s[(t, t)]);
                    add_col(&mut s, &mut v, &mut v_inv, c, t, &-q);
                    clean &= s[(t, c)].is_zero();
                }
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..m)
                .flat_map(|r| (t + 1..n).map(move |c| (r, c)))
                .find(|&rc| !s[rc].is_multiple_of(&s[(t, t)]));
            match bad {
                Some((r, _)) => add_row(&mut s, &mut u, &mut u_inv, t, r, &BigInt::one()),
                None => break,
            }
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
        t += 1;
    }
    Snf { u, u_inv, s, v, v_inv, rank: t }
}

/// Some `x` with `a · x = b`, if `b` lies in the integer column span of `a`.
pub fn solve_membership(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    snf(a).solve(b)
}

pub fn int_vec(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

/// `Z^ambient / span(relations)`; relations are the columns of an `ambient × r` matrix.
#[derive(Clone)]
pub struct FgAbGroup {
    ambient: usize,
    relations: IntMatrix,
    snf: Snf,
}

pub type Group = Arc<FgAbGroup>;

impl PartialEq for FgAbGroup {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.relations == other.relations
    }
}

impl Eq for FgAbGroup {}

impl fmt::Debug for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FgAbGroup(Z^{} / {:?} ≅ {})", self.ambient, self.relations, self)
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.invariant_factors().iter().map(|d| format!("Z/{d}")).collect();
        if self.free_rank() > 0 {
            parts.push(if self.free_rank() == 1 { "Z".into() } else { format!("Z^{}", self.free_rank()) });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

impl FgAbGroup {
    pub fn new(ambient: usize, relations: IntMatrix) -> Result<Self, GroupError> {
        if relations.rows != ambient {
            return Err(GroupError::Dimension(format!(
                "relations have {} rows, ambient rank is {ambient}",
                relations.rows
            )));
        }
        let snf = snf(&relations);
        Ok(FgAbGroup { ambient, relations, snf })
    }

    pub fn trivial() -> Self {
        FgAbGroup::new(0, IntMatrix::zeros(0, 0)).unwrap()
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup::new(rank, IntMatrix::zeros(rank, 0)).unwrap()
    }

    pub fn cyclic(order: i64) -> Self {
        FgAbGroup::new(1, IntMatrix::diagonal(&[order])).unwrap()
    }

    /// `Z/d_1 ⊕ .. ⊕ Z/d_k ⊕ Z^free`.
    pub fn from_invariants(torsion: &[BigInt], free: usize) -> Self {
        let k = torsion.len();
        let mut rel = IntMatrix::zeros(k + free, k);
        for (t, d) in torsion.iter().enumerate() {
            rel[(t, t)] = d.clone();
        }
        FgAbGroup::new(k + free, rel).unwrap()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// Invariant factors different from 1, in divisibility order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.snf.diagonal().into_iter().take(self.snf.rank).filter(|d| !d.is_one()).collect()
    }

    pub fn free_rank(&self) -> usize {
        self.ambient - self.snf.rank
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank() == 0 && self.invariant_factors().is_empty()
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank() == 0).then(|| self.invariant_factors().iter().product())
    }

    pub fn is_zero(&self, v: &[BigInt]) -> bool {
        self.snf.solve(v).is_some()
    }

    pub fn elements_equal(&self, a: &[BigInt], b: &[BigInt]) -> bool {
        let d: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.is_zero(&d)
    }

    pub fn zero_element(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.ambient]
    }

    pub fn generator(&self, t: usize) -> Vec<BigInt> {
        let mut v = self.zero_element();
        v[t] = BigInt::one();
        v
    }

    /// The canonical form `C = ⊕ Z/d_t ⊕ Z^r` with mutually inverse maps `G → C` and `C → G`.
    pub fn canonical(self: &Arc<Self>) -> (Group, AbHom, AbHom) {
        let diag = self.snf.diagonal();
        let kept: Vec<usize> = (0..self.ambient).filter(|&t| t >= self.snf.rank || !diag[t].is_one()).collect();
        let torsion: Vec<BigInt> = kept.iter().filter(|&&t| t < self.snf.rank).map(|&t| diag[t].clone()).collect();
        let c = Arc::new(FgAbGroup::from_invariants(&torsion, self.free_rank()));
        let to = AbHom { dom: self.clone(), cod: c.clone(), matrix: self.snf.u.select_rows(&kept) };
        let from = AbHom { dom: c.clone(), cod: self.clone(), matrix: self.snf.u_inv.select_columns(&kept) };
        (c, to, from)
    }

    /// Explicit isomorphisms when the invariants agree.
    pub fn isomorphism(self: &Arc<Self>, other: &Group) -> Option<(AbHom, AbHom)> {
        if self.invariant_factors() != other.invariant_factors() || self.free_rank() != other.free_rank() {
            return None;
        }
        let (c1, to1, from1) = self.canonical();
        let (c2, to2, from2) = other.canonical();
        // identical canonical groups; reinterpret
        debug_assert_eq!(*c1, *c2);
        let bridge = AbHom { dom: c1.clone(), cod: c2.clone(), matrix: IntMatrix::identity(c1.ambient) };
        let back = AbHom { dom: c2, cod: c1.clone(), matrix: IntMatrix::identity(c1.ambient) };
        let f = to1.then(&bridge).ok()?.then(&from2).ok()?;
        let g = to2.then(&back).ok()?.then(&from1).ok()?;
        Some((f, g))
    }

    /// All elements of a finite group, as ambient coordinates of distinct classes.
    pub fn elements(self: &Arc<Self>) -> Option<Vec<Vec<BigInt>>> {
        if self.free_rank() > 0 {
            return None;
        }
        let (c, _, from) = self.canonical();
        let bounds: Vec<i64> = c.invariant_factors().iter().map(|d| d.to_i64().expect("small group")).collect();
        let mut out = Vec::new();
        let mut digits = vec![0i64; bounds.len()];
        loop {
            out.push(from.apply(&int_vec(&digits)));
            let mut p = 0;
            loop {
                if p == digits.len() {
                    return Some(out);
                }
                digits[p] += 1;
                if digits[p] < bounds[p] {
                    break;
                }
                digits[p] = 0;
                p += 1;
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GroupRepr {
    ambient: usize,
    relations: Vec<Vec<i64>>,
}

impl Serialize for FgAbGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let cols = self.relations.transpose().to_i64_rows().map_err(serde::ser::Error::custom)?;
        GroupRepr { ambient: self.ambient, relations: cols }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FgAbGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = GroupRepr::deserialize(d)?;
        if let Some(col) = repr.relations.iter().find(|c| c.len() != repr.ambient) {
            return Err(serde::de::Error::custom(format!(
                "relation of length {} in a group of ambient rank {}",
                col.len(),
                repr.ambient
            )));
        }
        let cols: Vec<Vec<BigInt>> = repr.relations.iter().map(|c| int_vec(c)).collect();
        FgAbGroup::new(repr.ambient, IntMatrix::from_columns(repr.ambient, &cols)).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone)]
pub struct AbHom {
    dom: Group,
    cod: Group,
    matrix: IntMatrix,
}

impl fmt::Debug for AbHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AbHom({} -> {}: {:?})", self.dom, self.cod, self.matrix)
    }
}

/// Representation equality: same endpoints and the same matrix. See [`AbHom::same`]
/// for equality as homomorphisms.
impl PartialEq for AbHom {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix && same_group(&self.dom, &other.dom) && same_group(&self.cod, &other.cod)
    }
}

pub(crate) fn same_group(a: &Group, b: &Group) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl AbHom {
    pub fn new(dom: Group, cod: Group, matrix: IntMatrix) -> Result<Self, GroupError> {
        if matrix.rows != cod.ambient || matrix.cols != dom.ambient {
            return Err(GroupError::Dimension(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows, matrix.cols, cod.ambient, dom.ambient
            )));
        }
        let image = matrix.mul(&dom.relations);
        for c in 0..image.cols {
            if !cod.is_zero(&image.column(c)) {
                return Err(GroupError::NotWellDefined(c));
            }
        }
        Ok(AbHom { dom, cod, matrix })
    }

    pub fn identity(g: Group) -> Self {
        let matrix = IntMatrix::identity(g.ambient);
        AbHom { dom: g.clone(), cod: g, matrix }
    }

    pub fn zero(dom: Group, cod: Group) -> Self {
        let matrix = IntMatrix::zeros(cod.ambient, dom.ambient);
        AbHom { dom, cod, matrix }
    }

    pub fn scalar(g: Group, k: i64) -> Self {
        let matrix = IntMatrix::identity(g.ambient).scale(&BigInt::from(k));
        AbHom { dom: g.clone(), cod: g, matrix }
    }

    pub fn dom(&self) -> &Group {
        &self.dom
    }

    pub fn cod(&self) -> &Group {
        &self.cod
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(v)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &AbHom) -> Result<AbHom, GroupError> {
        if !same_group(&self.cod, &next.dom) {
            return Err(GroupError::NotComposable);
        }
        Ok(AbHom { dom: self.dom.clone(), cod: next.cod.clone(), matrix: next.matrix.mul(&self.matrix) })
    }

    pub fn sub(&self, other: &AbHom) -> Result<AbHom, GroupError> {
        if !same_group(&self.dom, &other.dom) || !same_group(&self.cod, &other.cod) {
            return Err(GroupError::NotComposable);
        }
        Ok(AbHom { dom: self.dom.clone(), cod: self.cod.clone(), matrix: self.matrix.sub(&other.matrix) })
    }

    pub fn add(&self, other: &AbHom) -> Result<AbHom, GroupError> {
        if !same_group(&self.dom, &other.dom) || !same_group(&self.cod, &other.cod) {
            return Err(GroupError::NotComposable);
        }
        Ok(AbHom { dom: self.dom.clone(), cod: self.cod.clone(), matrix: self.matrix.add(&other.matrix) })
    }

    /// Equality as homomorphisms: differences vanish in the codomain.
    pub fn same(&self, other: &AbHom) -> bool {
        if self.matrix.rows != other.matrix.rows || self.matrix.cols != other.matrix.cols {
            return false;
        }
        let diff = self.matrix.sub(&other.matrix);
        (0..diff.cols).all(|c| self.cod.is_zero(&diff.column(c)))
    }

    pub fn is_zero(&self) -> bool {
        (0..self.matrix.cols).all(|c| self.cod.is_zero(&self.matrix.column(c)))
    }

    pub fn is_injective(&self) -> bool {
        kernel(self).0.is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        let solver = snf(&self.matrix.hstack(&self.cod.relations));
        (0..self.cod.ambient).all(|t| solver.solve(&self.cod.generator(t)).is_some())
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// Two-sided inverse of an isomorphism.
    pub fn inverse(&self) -> Option<AbHom> {
        if !self.is_injective() {
            return None;
        }
        let inv = factor_through(self, &AbHom::identity(self.cod.clone()))?;
        Some(inv)
    }
}

/// Some `u` with `g ∘ u = h`; unique when `g` is injective.
pub fn factor_through(g: &AbHom, h: &AbHom) -> Option<AbHom> {
    if !same_group(&g.cod, &h.cod) {
        return None;
    }
    let k = g.dom.ambient;
    let solver = snf(&g.matrix.hstack(&g.cod.relations));
    let mut columns = Vec::with_capacity(h.dom.ambient);
    for c in 0..h.matrix.cols {
        let z = solver.solve(&h.matrix.column(c))?;
        columns.push(z[..k].to_vec());
    }
    let matrix = IntMatrix::from_columns(k, &columns);
    AbHom::new(h.dom.clone(), g.dom.clone(), matrix).ok()
}

/// Kernel of `h` with its inclusion.
pub fn kernel(h: &AbHom) -> (Group, AbHom) {
    let m = h.dom.ambient;
    let preimage = snf(&h.matrix.hstack(&h.cod.relations)).kernel_basis();
    let top = preimage.select_rows(&(0..m).collect::<Vec<_>>());
    let basis = snf(&top).image_basis();
    let k = basis.cols;
    let solver = snf(&basis);
    let relation_cols: Vec<Vec<BigInt>> = (0..h.dom.relations.cols)
        .map(|c| solver.solve(&h.dom.relations.column(c)).expect("relations lie in the kernel"))
        .collect();
    let group = Arc::new(FgAbGroup::new(k, IntMatrix::from_columns(k, &relation_cols)).expect("kernel presentation"));
    let incl = AbHom { dom: group.clone(), cod: h.dom.clone(), matrix: basis };
    (group, incl)
}

/// Equalizer of a parallel pair, as the kernel of the difference.
pub fn equalizer(f: &AbHom, g: &AbHom) -> Result<(Group, AbHom), GroupError> {
    Ok(kernel(&f.sub(g)?))
}

/// Direct product with projections and injections.
pub fn product(groups: &[Group]) -> (Group, Vec<AbHom>, Vec<AbHom>) {
    let blocks: Vec<&IntMatrix> = groups.iter().map(|g| &g.relations).collect();
    let ambient = groups.iter().map(|g| g.ambient).sum();
    let prod = Arc::new(FgAbGroup::new(ambient, IntMatrix::block_diagonal(&blocks)).expect("product"));
    let mut projections = Vec::new();
    let mut injections = Vec::new();
    let mut offset = 0;
    for g in groups {
        let mut p = IntMatrix::zeros(g.ambient, ambient);
        for t in 0..g.ambient {
            p[(t, offset + t)] = BigInt::one();
        }
        injections.push(AbHom { dom: g.clone(), cod: prod.clone(), matrix: p.transpose() });
        projections.push(AbHom { dom: prod.clone(), cod: g.clone(), matrix: p });
        offset += g.ambient;
    }
    (prod, projections, injections)
}

/// The hom `dom → ∏ cod_i` with components `homs`.
pub fn tuple_hom(dom: &Group, prod: &Group, homs: &[AbHom]) -> Result<AbHom, GroupError> {
    let mut matrix = IntMatrix::zeros(0, dom.ambient);
    for h in homs {
        if !same_group(&h.dom, dom) {
            return Err(GroupError::NotComposable);
        }
        matrix = matrix.vstack(&h.matrix);
    }
    AbHom::new(dom.clone(), prod.clone(), matrix)
}

#[derive(Serialize, Deserialize)]
pub struct HomRepr {
    pub matrix: Vec<Vec<i64>>,
}

impl AbHom {
    pub fn to_repr(&self) -> Result<HomRepr, GroupError> {
        Ok(HomRepr { matrix: self.matrix.to_i64_rows()? })
    }

    pub fn from_repr(dom: Group, cod: Group, repr: &HomRepr) -> Result<AbHom, GroupError> {
        let rows = repr.matrix.len();
        if rows != cod.ambient || repr.matrix.iter().any(|r| r.len() != dom.ambient) {
            return Err(GroupError::Dimension(format!(
                "hom matrix must be {}x{}",
                cod.ambient, dom.ambient
            )));
        }
        AbHom::new(dom.clone(), cod, IntMatrix::from_rows(rows, dom.ambient, &repr.matrix))
    }
}
