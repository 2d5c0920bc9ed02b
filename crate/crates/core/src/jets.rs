//! Jets of vector fields: the graded Lie algebra of formal vector fields
//! vanishing at the origin, its truncations, PBW arithmetic in the
//! truncated enveloping algebra, and finite-dimensional jet modules.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gl::Rep;
use crate::linalg::QMatrix;
use crate::rational::{q, Rational};
use crate::ring::{multi_indices, RingElem};
use crate::weyl::{fmt_scaled, join_terms, DiffOp};

/// `X^exp d/dX_dir` with `|exp| >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JetGen {
    exp: Vec<u32>,
    dir: usize,
}

impl JetGen {
    pub fn new(exp: Vec<u32>, dir: usize) -> Result<Self> {
        if exp.iter().sum::<u32>() == 0 {
            return Err(Error::InvalidInput("jet generators need |k| >= 1".into()));
        }
        if dir >= exp.len() {
            return Err(Error::InvalidInput(format!("direction {dir} out of range")));
        }
        Ok(JetGen { exp, dir })
    }

    /// `X_j d/dX_i`.
    pub fn linear(n: usize, j: usize, i: usize) -> Self {
        let mut exp = vec![0; n];
        exp[j] = 1;
        JetGen { exp, dir: i }
    }

    pub fn exp(&self) -> &[u32] {
        &self.exp
    }

    pub fn dir(&self) -> usize {
        self.dir
    }

    pub fn n(&self) -> usize {
        self.exp.len()
    }

    pub fn degree(&self) -> i64 {
        self.exp.iter().sum::<u32>() as i64 - 1
    }
}

impl Ord for JetGen {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.degree(), &self.exp, self.dir).cmp(&(o.degree(), &o.exp, o.dir))
    }
}

impl PartialOrd for JetGen {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

fn jet_var_names(n: usize) -> Vec<String> {
    if n == 1 {
        vec!["X".into()]
    } else {
        (1..=n).map(|i| format!("X{i}")).collect()
    }
}

impl fmt::Display for JetGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = jet_var_names(self.n());
        let e: Vec<i64> = self.exp.iter().map(|&x| x as i64).collect();
        write!(f, "{}*d{}", crate::poly::format_monomial(&e, &names), names[self.dir])
    }
}

/// All generators in `n` variables of degree at most `s`, in PBW order.
pub fn generators(n: usize, s: u32) -> Vec<JetGen> {
    let mut out = Vec::new();
    for k in multi_indices(n, s + 1) {
        if k.iter().sum::<u32>() == 0 {
            continue;
        }
        for i in 0..n {
            out.push(JetGen { exp: k.clone(), dir: i });
        }
    }
    out.sort();
    out
}

/// `[X^a d_i, X^b d_j] = b_i X^{a+b-e_i} d_j - a_j X^{a+b-e_j} d_i`.
pub fn jet_bracket(a: &JetGen, b: &JetGen) -> BTreeMap<JetGen, Rational> {
    assert_eq!(a.n(), b.n(), "jet generators in different dimensions");
    let mut out: BTreeMap<JetGen, Rational> = BTreeMap::new();
    let mut push = |g: JetGen, c: Rational| {
        let e = out.entry(g.clone()).or_insert_with(Rational::zero);
        *e += c;
        if Zero::is_zero(e) {
            out.remove(&g);
        }
    };
    let sum: Vec<u32> = a.exp.iter().zip(&b.exp).map(|(x, y)| x + y).collect();
    if b.exp[a.dir] > 0 {
        let mut e = sum.clone();
        e[a.dir] -= 1;
        push(JetGen { exp: e, dir: b.dir }, q(b.exp[a.dir] as i64));
    }
    if a.exp[b.dir] > 0 {
        let mut e = sum;
        e[b.dir] -= 1;
        push(JetGen { exp: e, dir: a.dir }, -q(a.exp[b.dir] as i64));
    }
    out
}

/// Degree-zero generator `X_j d_i` as the index pair `(j, i)` of `E_ji`.
pub fn gl_embed(g: &JetGen) -> Result<(usize, usize)> {
    if g.degree() != 0 {
        return Err(Error::DegreeError(g.to_string(), g.degree()));
    }
    let j = g.exp.iter().position(|&x| x == 1).unwrap();
    Ok((j, g.dir))
}

/// Coefficients of jet polynomials. Coefficients commute with jet
/// generators; their own product may be non-commutative.
pub trait Coeff: Clone + fmt::Debug {
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, c: &Rational) -> Self;
    fn text(&self) -> String;
}

impl Coeff for Rational {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: &Rational) -> Self {
        self * c
    }
    fn text(&self) -> String {
        crate::rational::fmt_rational(self)
    }
}

impl Coeff for RingElem {
    fn is_zero(&self) -> bool {
        RingElem::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        RingElem::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RingElem::mul(self, o)
    }
    fn scale(&self, c: &Rational) -> Self {
        RingElem::scale(self, c)
    }
    fn text(&self) -> String {
        self.to_string()
    }
}

impl Coeff for DiffOp {
    fn is_zero(&self) -> bool {
        DiffOp::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        DiffOp::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        self.compose(o).unwrap_or_else(|e| panic!("{e}"))
    }
    fn scale(&self, c: &Rational) -> Self {
        DiffOp::scale(self, c)
    }
    fn text(&self) -> String {
        self.to_string()
    }
}

pub type Word = Vec<JetGen>;

type OrderCache = Mutex<HashMap<(u32, Word), Vec<(Word, Rational)>>>;

fn cache() -> &'static OrderCache {
    static CACHE: OnceLock<OrderCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// PBW normal form of a word in `U(L^s)`, rewriting `ba = ab - [a,b]`.
pub fn normal_order(word: &[JetGen], s: u32) -> Vec<(Word, Rational)> {
    if word.iter().any(|g| g.degree() > s as i64) {
        return Vec::new();
    }
    let Some(pos) = (1..word.len()).find(|&k| word[k - 1] > word[k]) else {
        return vec![(word.to_vec(), Rational::one())];
    };
    let key = (s, word.to_vec());
    if let Some(hit) = cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let mut acc: BTreeMap<Word, Rational> = BTreeMap::new();
    let mut push = |w: Word, c: Rational| {
        let e = acc.entry(w.clone()).or_insert_with(Rational::zero);
        *e += c;
        if Zero::is_zero(e) {
            acc.remove(&w);
        }
    };
    let (b, a) = (&word[pos - 1], &word[pos]);
    let mut swapped = word.to_vec();
    swapped.swap(pos - 1, pos);
    for (w, c) in normal_order(&swapped, s) {
        push(w, c);
    }
    // ba = ab + [b,a]
    for (g, c) in jet_bracket(b, a) {
        let mut w = word[..pos - 1].to_vec();
        w.push(g);
        w.extend_from_slice(&word[pos + 1..]);
        for (w2, c2) in normal_order(&w, s) {
            push(w2, c2 * &c);
        }
    }
    let out: Vec<(Word, Rational)> = acc.into_iter().collect();
    cache().lock().unwrap().insert(key, out.clone());
    out
}

/// PBW-normal-ordered element of `C (x) U(L^s)`.
#[derive(Clone, Debug)]
pub struct JetPoly<C: Coeff> {
    n: usize,
    s: u32,
    terms: BTreeMap<Word, C>,
}

impl<C: Coeff> JetPoly<C> {
    pub fn zero(n: usize, s: u32) -> Self {
        JetPoly { n, s, terms: BTreeMap::new() }
    }

    /// `c * w` for an arbitrary word, normal-ordered.
    pub fn from_word(n: usize, s: u32, word: &[JetGen], c: C) -> Self {
        let mut p = Self::zero(n, s);
        for (w, r) in normal_order(word, s) {
            p.push(w, c.scale(&r));
        }
        p
    }

    pub fn scalar(n: usize, s: u32, c: C) -> Self {
        Self::from_word(n, s, &[], c)
    }

    pub fn gen(n: usize, s: u32, g: &JetGen, c: C) -> Self {
        Self::from_word(n, s, std::slice::from_ref(g), c)
    }

    fn push(&mut self, w: Word, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(x) => {
                let y = x.add(&c);
                if y.is_zero() {
                    self.terms.remove(&w);
                } else {
                    *x = y;
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn truncation(&self) -> u32 {
        self.s
    }

    pub fn terms(&self) -> &BTreeMap<Word, C> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.s != o.s {
            return Err(Error::TruncationMismatch(self.s, o.s));
        }
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.push(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = Self::zero(self.n, self.s);
        for (w, c) in &self.terms {
            out.push(w.clone(), c.scale(r));
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&q(-1)))
    }

    pub fn pbw_mul(&self, o: &Self) -> Result<Self> {
        if self.s != o.s {
            return Err(Error::TruncationMismatch(self.s, o.s));
        }
        let mut out = Self::zero(self.n, self.s);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                let c = c1.mul(c2);
                if c.is_zero() {
                    continue;
                }
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                for (w3, r) in normal_order(&w, self.s) {
                    out.push(w3, c.scale(&r));
                }
            }
        }
        Ok(out)
    }

    /// Maps coefficients, keeping the words.
    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> JetPoly<D> {
        let mut out = JetPoly::zero(self.n, self.s);
        for (w, c) in &self.terms {
            out.push(w.clone(), f(c));
        }
        out
    }
}

impl<C: Coeff> fmt::Display for JetPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let word: String = w.iter().map(|g| format!("({g})")).collect();
                let word = if word.is_empty() { "1".to_string() } else { word };
                fmt_scaled(&c.text(), &word)
            })
            .collect();
        write!(f, "{}", join_terms(parts))
    }
}

/// Finite-dimensional module over `L^s`: a matrix for each generator of
/// degree at most `s`; unlisted generators act by zero.
#[derive(Clone, Debug, PartialEq)]
pub struct JetRep {
    n: usize,
    s: u32,
    dim: usize,
    mats: BTreeMap<JetGen, QMatrix>,
    label: String,
}

impl JetRep {
    /// Builds and validates the bracket relations.
    pub fn new(n: usize, s: u32, dim: usize, mats: BTreeMap<JetGen, QMatrix>, label: &str) -> Result<Self> {
        let rep = Self::new_unchecked(n, s, dim, mats, label);
        rep.validate()?;
        Ok(rep)
    }

    /// Skips validation; for deliberately broken fixtures.
    pub fn new_unchecked(n: usize, s: u32, dim: usize, mats: BTreeMap<JetGen, QMatrix>, label: &str) -> Self {
        let mats = mats.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        JetRep { n, s, dim, mats, label: label.to_string() }
    }

    pub fn validate(&self) -> Result<()> {
        for (g, m) in &self.mats {
            if g.n() != self.n || g.degree() > self.s as i64 || m.rows() != self.dim || !m.is_square() {
                return Err(Error::InvalidRep(format!("bad matrix for {g}")));
            }
        }
        let gens = generators(self.n, self.s);
        for (ia, a) in gens.iter().enumerate() {
            for b in &gens[ia + 1..] {
                let lhs = self.matrix(a).commutator(&self.matrix(b));
                let rhs = self.bracket_matrix(a, b);
                if lhs != rhs {
                    return Err(Error::InvalidRep(format!("[{a}, {b}] is not respected")));
                }
            }
        }
        Ok(())
    }

    fn bracket_matrix(&self, a: &JetGen, b: &JetGen) -> QMatrix {
        let mut m = QMatrix::zeros(self.dim, self.dim);
        for (g, c) in jet_bracket(a, b) {
            if let Some(x) = self.mats.get(&g) {
                m = m.add(&x.scale(&c));
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn truncation(&self) -> u32 {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrix(&self, g: &JetGen) -> QMatrix {
        self.mats.get(g).cloned().unwrap_or_else(|| QMatrix::zeros(self.dim, self.dim))
    }

    pub fn acting(&self) -> impl Iterator<Item = (&JetGen, &QMatrix)> {
        self.mats.iter()
    }

    /// Highest degree of a generator acting non-trivially (`-1` if none).
    pub fn top_degree(&self) -> i64 {
        self.mats.keys().map(|g| g.degree()).max().unwrap_or(-1)
    }

    pub fn act(&self, g: &JetGen, w: &[Rational]) -> Vec<Rational> {
        match self.mats.get(g) {
            Some(m) => m.apply(w),
            None => vec![Rational::zero(); self.dim],
        }
    }

    /// Matrix of a rational element of `U(L^s)`.
    pub fn act_poly(&self, p: &JetPoly<Rational>) -> QMatrix {
        let mut out = QMatrix::zeros(self.dim, self.dim);
        for (w, c) in p.terms() {
            let mut m = QMatrix::identity(self.dim);
            for g in w {
                m = m.mul(&self.matrix(g));
            }
            out = out.add(&m.scale(c));
        }
        out
    }

    /// Pulls a `gl_n`-module back along `L^s -> L_0 = gl_n`.
    pub fn from_rep(rep: &Rep) -> Self {
        let n = rep.n();
        let mut mats = BTreeMap::new();
        for j in 0..n {
            for i in 0..n {
                let g = JetGen::linear(n, j, i);
                let (a, b) = gl_embed(&g).expect("degree zero");
                mats.insert(g, rep.e(a, b).clone());
            }
        }
        Self::new_unchecked(n, 0, rep.dim(), mats, &rep.to_string())
    }

    pub fn trivial(n: usize) -> Self {
        Self::new_unchecked(n, 0, 1, BTreeMap::new(), &format!("trivial({n})"))
    }

    pub fn dual(&self) -> Self {
        let mats = self.mats.iter().map(|(g, m)| (g.clone(), m.transpose().scale(&q(-1)))).collect();
        Self::new_unchecked(self.n, self.s, self.dim, mats, &format!("dual({})", self.label))
    }

    pub fn tensor(&self, o: &JetRep) -> Result<Self> {
        if self.n != o.n {
            return Err(Error::InvalidRep("tensor of jet modules in different dimensions".into()));
        }
        let s = self.s.max(o.s);
        let i1 = QMatrix::identity(self.dim);
        let i2 = QMatrix::identity(o.dim);
        let mut mats = BTreeMap::new();
        for g in generators(self.n, s) {
            let m = self.matrix(&g).kron(&i2).add(&i1.kron(&o.matrix(&g)));
            mats.insert(g, m);
        }
        Ok(Self::new_unchecked(self.n, s, self.dim * o.dim, mats, &format!("tensor({}, {})", self.label, o.label)))
    }

    /// `k[X]/m^{order+1}` with vector fields acting as derivations; basis
    /// `X^a`, `|a| <= order`, ordered by degree then lexicographically.
    pub fn truncated_polynomials(n: usize, order: u32) -> Self {
        let basis = multi_indices(n, order);
        let index: HashMap<Vec<u32>, usize> = basis.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let s = order.saturating_sub(1);
        let mut mats = BTreeMap::new();
        for g in generators(n, s) {
            let mut m = QMatrix::zeros(basis.len(), basis.len());
            for (col, a) in basis.iter().enumerate() {
                if a[g.dir] == 0 {
                    continue;
                }
                let mut t: Vec<u32> = a.iter().zip(&g.exp).map(|(x, y)| x + y).collect();
                t[g.dir] -= 1;
                if let Some(&row) = index.get(&t) {
                    m.set(row, col, q(a[g.dir] as i64));
                }
            }
            mats.insert(g, m);
        }
        Self::new_unchecked(n, s, basis.len(), mats, &format!("poly({n},{order})"))
    }

    /// Two-dimensional module on `(v, u)` with `X d = diag(alpha, alpha+1)`
    /// and `X^2 d v = 2u`.
    pub fn alpha(alpha: &Rational) -> Self {
        let mut mats = BTreeMap::new();
        let mut e = QMatrix::zeros(2, 2);
        e.set(0, 0, alpha.clone());
        e.set(1, 1, alpha + q(1));
        mats.insert(JetGen { exp: vec![1], dir: 0 }, e);
        let mut r = QMatrix::zeros(2, 2);
        r.set(1, 0, q(2));
        mats.insert(JetGen { exp: vec![2], dir: 0 }, r);
        Self::new_unchecked(1, 1, 2, mats, &format!("alpha({})", crate::rational::fmt_rational(alpha)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(exp: &[u32], dir: usize) -> JetGen {
        JetGen::new(exp.to_vec(), dir).unwrap()
    }

    #[test]
    fn brackets() {
        let e = g(&[1], 0);
        let x2 = g(&[2], 0);
        assert_eq!(jet_bracket(&e, &x2), BTreeMap::from([(x2.clone(), q(1))]));
        let a = g(&[1, 0], 1);
        let b = g(&[0, 1], 0);
        let r = jet_bracket(&a, &b);
        assert_eq!(r, BTreeMap::from([(g(&[1, 0], 0), q(1)), (g(&[0, 1], 1), q(-1))]));
        assert!(jet_bracket(&x2, &x2).is_empty());
    }

    #[test]
    fn embedding() {
        assert_eq!(gl_embed(&g(&[0, 1], 0)).unwrap(), (1, 0));
        assert_eq!(gl_embed(&g(&[1], 0)).unwrap(), (0, 0));
        assert!(matches!(gl_embed(&g(&[2], 0)), Err(Error::DegreeError(_, 1))));
    }

    #[test]
    fn order_and_pbw() {
        let e = g(&[1], 0);
        let x2 = g(&[2], 0);
        assert!(e < x2);
        let pe = JetPoly::gen(1, 2, &e, q(1));
        let px2 = JetPoly::gen(1, 2, &x2, q(1));
        let sq = pe.pbw_mul(&pe).unwrap();
        assert_eq!(sq.terms().len(), 1);
        assert_eq!(sq.terms().keys().next().unwrap().len(), 2);
        // (X^2 d)(X d) = (X d)(X^2 d) - X^2 d
        let ba = px2.pbw_mul(&pe).unwrap();
        let expect = pe.pbw_mul(&px2).unwrap().sub(&px2).unwrap();
        assert_eq!(ba.terms(), expect.terms());
        let one = JetPoly::scalar(1, 2, q(1));
        assert_eq!(one.pbw_mul(&ba).unwrap().terms(), ba.terms());
        let other = JetPoly::scalar(1, 3, q(1));
        assert!(matches!(one.pbw_mul(&other), Err(Error::TruncationMismatch(2, 3))));
    }

    #[test]
    fn truncation_drops_high_degree() {
        let x2 = g(&[2], 0);
        let x3 = g(&[3], 0);
        let p = JetPoly::gen(1, 1, &x2, q(1));
        assert_eq!(p.terms().len(), 1);
        assert!(JetPoly::gen(1, 1, &x3, q(1)).is_zero());
        // [X^2 d, X^3 d] = X^4 d vanishes in L^1
        let a = JetPoly::gen(1, 2, &x2, q(1));
        let b = JetPoly::gen(1, 2, &x3, q(1));
        assert!(b.pbw_mul(&a).unwrap().sub(&a.pbw_mul(&b).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn modules_validate() {
        for n in 1..=2 {
            for order in 0..=3 {
                JetRep::truncated_polynomials(n, order).validate().unwrap();
            }
        }
        for a in [-1, 0, 1, 5] {
            JetRep::alpha(&q(a)).validate().unwrap();
        }
        let w = JetRep::truncated_polynomials(2, 1);
        assert_eq!(w.dim(), 3);
        w.dual().validate().unwrap();
        w.tensor(&JetRep::alpha(&q(0)).dual()).unwrap_err();
        w.tensor(&w.dual()).unwrap().validate().unwrap();
    }

    #[test]
    fn broken_module_rejected() {
        let mut mats = BTreeMap::new();
        mats.insert(g(&[1], 0), QMatrix::from_i64(&[&[0, 0], &[0, 0]]));
        mats.insert(g(&[2], 0), QMatrix::from_i64(&[&[0, 0], &[1, 0]]));
        mats.insert(g(&[1], 0), QMatrix::from_i64(&[&[1, 0], &[0, 1]]));
        assert!(JetRep::new(1, 1, 2, mats, "broken").is_err());
    }
}
