//! Dense rational matrices, matrices over coordinate rings, and an
//! incremental row-echelon span used for growth series.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, q, Rational};
use crate::ring::{Ring, RingElem};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, &Rational::one())
    }

    pub fn scalar(n: usize, c: &Rational) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    /// Matrix unit `E_ij` of size `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.set(i, j, Rational::one());
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// The scalar `c` when the matrix equals `c * I`.
    pub fn as_scalar(&self) -> Option<Rational> {
        if !self.is_square() {
            return None;
        }
        if self.rows == 0 {
            return Some(Rational::zero());
        }
        let c = self.get(0, 0).clone();
        (*self == Self::scalar(self.rows, &c)).then_some(c)
    }

    pub fn add(&self, o: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = Rational::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        s += a * b;
                    }
                }
                s
            })
            .collect()
    }

    pub fn commutator(&self, o: &QMatrix) -> QMatrix {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn transpose(&self) -> QMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Kronecker product.
    pub fn kron(&self, o: &QMatrix) -> QMatrix {
        let mut out = Self::zeros(self.rows * o.rows, self.cols * o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..o.rows {
                    for l in 0..o.cols {
                        out.set(i * o.rows + k, j * o.cols + l, a * o.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, o: &QMatrix) -> QMatrix {
        let mut out = Self::zeros(self.rows + o.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                out.set(self.rows + i, self.cols + j, o.get(i, j).clone());
            }
        }
        out
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).recip();
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = m.get(i, j) - &f * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (m, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -m.get(r, f).clone();
                }
                v
            })
            .collect()
    }

    /// Some solution of `self * x = b`, if one exists.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows);
        let mut rows = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut r = self.row(i).to_vec();
            r.push(b[i].clone());
            rows.push(r);
        }
        let aug = QMatrix { rows: self.rows, cols: self.cols + 1, data: rows.into_iter().flatten().collect() };
        let (m, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = m.get(r, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rational::one());
        }
        let (m, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, m.get(i, n + j).clone());
            }
        }
        Some(out)
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let r: Vec<String> = self.row(i).iter().map(fmt_rational).collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// Square matrix over a coordinate ring.
#[derive(Clone, Debug, PartialEq)]
pub struct RingMatrix {
    ring: Ring,
    n: usize,
    data: Vec<RingElem>,
}

impl RingMatrix {
    pub fn zeros(ring: &Ring, n: usize) -> Self {
        RingMatrix { ring: ring.clone(), n, data: vec![RingElem::zero(ring); n * n] }
    }

    pub fn identity(ring: &Ring, n: usize) -> Self {
        let mut m = Self::zeros(ring, n);
        for i in 0..n {
            m.set(i, i, RingElem::one(ring));
        }
        m
    }

    pub fn from_rows(ring: &Ring, rows: Vec<Vec<RingElem>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        RingMatrix { ring: ring.clone(), n, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_q(ring: &Ring, m: &QMatrix) -> Self {
        assert!(m.is_square());
        let mut out = Self::zeros(ring, m.rows());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(i, j, RingElem::constant(ring, m.get(i, j).clone()));
            }
        }
        out
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElem {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RingElem) {
        self.data[i * self.n + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, o: &RingMatrix) -> RingMatrix {
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect();
        RingMatrix { ring: self.ring.clone(), n: self.n, data }
    }

    pub fn sub(&self, o: &RingMatrix) -> RingMatrix {
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect();
        RingMatrix { ring: self.ring.clone(), n: self.n, data }
    }

    pub fn scale(&self, c: &RingElem) -> RingMatrix {
        let data = self.data.iter().map(|a| a.mul(c)).collect();
        RingMatrix { ring: self.ring.clone(), n: self.n, data }
    }

    pub fn mul(&self, o: &RingMatrix) -> RingMatrix {
        assert_eq!(self.n, o.n);
        let mut out = Self::zeros(&self.ring, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut s = RingElem::zero(&self.ring);
                for k in 0..self.n {
                    let a = self.get(i, k);
                    let b = o.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        s = s.add(&a.mul(b));
                    }
                }
                out.set(i, j, s);
            }
        }
        out
    }

    pub fn apply(&self, v: &[RingElem]) -> Vec<RingElem> {
        (0..self.n)
            .map(|i| {
                let mut s = RingElem::zero(&self.ring);
                for (k, x) in v.iter().enumerate() {
                    let a = self.get(i, k);
                    if !a.is_zero() && !x.is_zero() {
                        s = s.add(&a.mul(x));
                    }
                }
                s
            })
            .collect()
    }

    pub fn transpose(&self) -> RingMatrix {
        let mut out = Self::zeros(&self.ring, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Entrywise basis derivation `D_i`.
    pub fn derive(&self, i: usize) -> RingMatrix {
        let data = self.data.iter().map(|a| a.derive(i)).collect();
        RingMatrix { ring: self.ring.clone(), n: self.n, data }
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> RingMatrix {
        let mut rows = Vec::new();
        for i in (0..self.n).filter(|&i| i != skip_r) {
            rows.push((0..self.n).filter(|&j| j != skip_c).map(|j| self.get(i, j).clone()).collect());
        }
        Self::from_rows(&self.ring, rows)
    }

    /// Determinant by cofactor expansion (charts have small dimension).
    pub fn det(&self) -> RingElem {
        match self.n {
            0 => RingElem::one(&self.ring),
            1 => self.get(0, 0).clone(),
            _ => {
                let mut s = RingElem::zero(&self.ring);
                for j in 0..self.n {
                    let a = self.get(0, j);
                    if a.is_zero() {
                        continue;
                    }
                    let t = a.mul(&self.minor(0, j).det());
                    s = if j % 2 == 0 { s.add(&t) } else { s.sub(&t) };
                }
                s
            }
        }
    }

    /// Inverse via the adjugate; needs an invertible determinant.
    pub fn inverse(&self) -> Result<RingMatrix> {
        let d = self.det();
        let dinv = d.inverse().map_err(|_| Error::NotInvertible(format!("det = {d}")))?;
        let mut out = Self::zeros(&self.ring, self.n);
        if self.n == 1 {
            out.set(0, 0, dinv);
            return Ok(out);
        }
        for i in 0..self.n {
            for j in 0..self.n {
                let c = self.minor(j, i).det();
                let c = if (i + j) % 2 == 0 { c } else { c.neg() };
                out.set(i, j, c.mul(&dinv));
            }
        }
        Ok(out)
    }
}

/// Incrementally maintained echelon basis of a subspace of a sparse
/// vector space with ordered coordinates.
#[derive(Clone, Debug, Default)]
pub struct SparseSpan<K: Ord + Clone> {
    rows: BTreeMap<K, BTreeMap<K, Rational>>,
}

impl<K: Ord + Clone> SparseSpan<K> {
    pub fn new() -> Self {
        SparseSpan { rows: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut v: BTreeMap<K, Rational>) -> BTreeMap<K, Rational> {
        loop {
            let hit = v.iter().rev().find(|(k, _)| self.rows.contains_key(*k)).map(|(k, c)| (k.clone(), c.clone()));
            let Some((k, c)) = hit else { return v };
            for (kk, x) in &self.rows[&k] {
                let e = v.entry(kk.clone()).or_insert_with(Rational::zero);
                *e -= &c * x;
                if e.is_zero() {
                    v.remove(kk);
                }
            }
        }
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: BTreeMap<K, Rational>) -> bool {
        let v: BTreeMap<K, Rational> = v.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let v = self.reduce(v);
        let Some((pk, pc)) = v.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let inv = pc.recip();
        let v: BTreeMap<K, Rational> = v.into_iter().map(|(k, c)| (k, c * &inv)).collect();
        self.rows.insert(pk, v);
        true
    }

    pub fn contains(&self, v: BTreeMap<K, Rational>) -> bool {
        let v: BTreeMap<K, Rational> = v.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        self.reduce(v).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::ring::RingSpec;

    #[test]
    fn rank_and_kernel() {
        let m = QMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let ker = m.nullspace();
        assert_eq!(ker.len(), 1);
        assert!(m.apply(&ker[0]).iter().all(|x| x.is_zero()));
        let x = m.solve(&[q(1), q(2), q(0)]).unwrap();
        assert_eq!(m.apply(&x), vec![q(1), q(2), q(0)]);
        assert!(m.solve(&[q(1), q(0), q(0)]).is_none());
    }

    #[test]
    fn inverse_roundtrip() {
        let m = QMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMatrix::identity(2));
        assert!(QMatrix::from_i64(&[&[1, 1], &[1, 1]]).inverse().is_none());
    }

    #[test]
    fn ring_matrix_inverse() {
        let r = RingSpec::laurent(&["y"]);
        let y = RingElem::var(&r, 0);
        let one = RingElem::one(&r);
        let zero = RingElem::zero(&r);
        let m = RingMatrix::from_rows(&r, vec![vec![y.clone(), one.clone()], vec![zero, y.clone()]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), RingMatrix::identity(&r, 2));
        assert_eq!(m.det(), y.pow(2));
        let p = RingSpec::poly(&["x"]);
        let bad = RingMatrix::from_rows(&p, vec![vec![RingElem::from_poly(&p, Poly::var(1, 0))]]);
        assert!(bad.inverse().is_err());
    }

    #[test]
    fn sparse_span() {
        let mut s: SparseSpan<u32> = SparseSpan::new();
        let v = |xs: &[(u32, i64)]| xs.iter().map(|&(k, c)| (k, q(c))).collect::<BTreeMap<_, _>>();
        assert!(s.insert(v(&[(0, 1), (1, 1)])));
        assert!(s.insert(v(&[(1, 1)])));
        assert!(!s.insert(v(&[(0, 3)])));
        assert!(s.contains(v(&[(0, 2), (1, -5)])));
        assert_eq!(s.dim(), 2);
    }
}
