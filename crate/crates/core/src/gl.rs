//! Finite-dimensional `gl_n`-modules, Casimir elements and the exterior
//! power obstruction.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{QMatrix, RingMatrix};
use crate::rational::{fmt_rational, is_integer, parse_rational, q, to_i64, Rational};
use crate::ring::{multi_indices, RingElem};

/// Construction recipe of a representation; also drives the group action
/// used by chart gluing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepExpr {
    Natural(usize),
    Dual(Box<RepExpr>),
    Ext(usize, usize),
    Sym(usize, usize),
    Det(Rational, usize),
    Tensor(Box<RepExpr>, Box<RepExpr>),
    Sum(Box<RepExpr>, Box<RepExpr>),
    Trivial(usize),
    Hwc(Box<RepExpr>, Vec<Rational>),
}

impl fmt::Display for RepExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepExpr::Natural(n) => write!(f, "natural({n})"),
            RepExpr::Dual(r) => write!(f, "dual({r})"),
            RepExpr::Ext(k, n) => write!(f, "ext({k},{n})"),
            RepExpr::Sym(k, n) => write!(f, "sym({k},{n})"),
            RepExpr::Det(l, n) => write!(f, "det({},{n})", fmt_rational(l)),
            RepExpr::Tensor(a, b) => write!(f, "tensor({a},{b})"),
            RepExpr::Sum(a, b) => write!(f, "sum({a},{b})"),
            RepExpr::Trivial(n) => write!(f, "trivial({n})"),
            RepExpr::Hwc(r, w) => {
                let ws: Vec<String> = w.iter().map(fmt_rational).collect();
                write!(f, "hwc({r},[{}])", ws.join(","))
            }
        }
    }
}

/// A `gl_n`-module given by the matrices of all `E_ij`.
#[derive(Clone, Debug)]
pub struct Rep {
    n: usize,
    dim: usize,
    mats: Vec<QMatrix>,
    labels: Vec<String>,
    highest_weight: Option<Vec<Rational>>,
    integrable: bool,
    expr: RepExpr,
    /// Columns spanning this module inside the module built by the inner
    /// expression (only for `hwc`).
    embedding: Option<QMatrix>,
}

impl Rep {
    /// Builds a representation, checking the `gl_n` commutation relations.
    pub fn new(
        n: usize,
        mats: Vec<QMatrix>,
        labels: Vec<String>,
        highest_weight: Option<Vec<Rational>>,
        integrable: bool,
        expr: RepExpr,
    ) -> Result<Self> {
        let dim = labels.len();
        if mats.len() != n * n || mats.iter().any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::InvalidRep(format!("expected {} matrices of size {dim}", n * n)));
        }
        let rep = Rep { n, dim, mats, labels, highest_weight, integrable, expr, embedding: None };
        rep.check_relations()?;
        Ok(rep)
    }

    fn check_relations(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let lhs = self.e(i, j).commutator(self.e(k, l));
                        let mut rhs = QMatrix::zeros(self.dim, self.dim);
                        if j == k {
                            rhs = rhs.add(self.e(i, l));
                        }
                        if l == i {
                            rhs = rhs.sub(self.e(k, j));
                        }
                        if lhs != rhs {
                            return Err(Error::InvalidRep(format!(
                                "[E{}{}, E{}{}] fails the gl_n relation",
                                i + 1,
                                j + 1,
                                k + 1,
                                l + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Matrix of `E_ij` (zero-based indices).
    pub fn e(&self, i: usize, j: usize) -> &QMatrix {
        &self.mats[i * self.n + j]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn highest_weight(&self) -> Option<&[Rational]> {
        self.highest_weight.as_deref()
    }

    pub fn is_integrable(&self) -> bool {
        self.integrable
    }

    pub fn expr(&self) -> &RepExpr {
        &self.expr
    }

    /// Image of an element `sum a_ij E_ij` of `gl_n`.
    pub fn act_gl(&self, a: &QMatrix) -> QMatrix {
        let mut out = QMatrix::zeros(self.dim, self.dim);
        for i in 0..self.n {
            for j in 0..self.n {
                let c = a.get(i, j);
                if !c.is_zero() {
                    out = out.add(&self.e(i, j).scale(c));
                }
            }
        }
        out
    }

    pub fn natural(n: usize) -> Self {
        let mats = (0..n * n).map(|x| QMatrix::unit(n, x / n, x % n)).collect();
        let labels = (1..=n).map(|i| format!("e{i}")).collect();
        let mut hw = vec![Rational::zero(); n];
        hw[0] = q(1);
        Rep::new(n, mats, labels, Some(hw), true, RepExpr::Natural(n)).expect("natural")
    }

    pub fn trivial(n: usize) -> Self {
        let mats = vec![QMatrix::zeros(1, 1); n * n];
        Rep::new(n, mats, vec!["1".into()], Some(vec![Rational::zero(); n]), true, RepExpr::Trivial(n))
            .expect("trivial")
    }

    pub fn dual(r: &Rep) -> Self {
        let mats = r.mats.iter().map(|m| m.transpose().scale(&q(-1))).collect();
        let labels = r.labels.iter().map(|l| format!("{l}*")).collect();
        let hw = r.highest_weight.as_ref().map(|w| w.iter().rev().map(|x| -x.clone()).collect());
        Rep::new(r.n, mats, labels, hw, r.integrable, RepExpr::Dual(Box::new(r.expr.clone()))).expect("dual")
    }

    pub fn ext(k: usize, n: usize) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidRep(format!("ext({k},{n}) needs k <= n")));
        }
        let basis = subsets(n, k);
        let index: BTreeMap<Vec<usize>, usize> = basis.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let mut mats = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut m = QMatrix::zeros(basis.len(), basis.len());
                for (col, set) in basis.iter().enumerate() {
                    let Some(p) = set.iter().position(|&x| x == j) else { continue };
                    if i != j && set.contains(&i) {
                        continue;
                    }
                    let mut w = set.clone();
                    w[p] = i;
                    let sign = sort_sign(&mut w);
                    m.set(index[&w], col, q(sign));
                }
                mats.push(m);
            }
        }
        let labels = basis
            .iter()
            .map(|s| if s.is_empty() { "1".to_string() } else { s.iter().map(|x| format!("e{}", x + 1)).collect::<Vec<_>>().join("^") })
            .collect();
        let hw = (0..n).map(|i| if i < k { q(1) } else { q(0) }).collect();
        Rep::new(n, mats, labels, Some(hw), true, RepExpr::Ext(k, n))
    }

    pub fn sym(k: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidRep("sym needs n >= 1".into()));
        }
        let basis: Vec<Vec<u32>> = multi_indices(n, k as u32)
            .into_iter()
            .filter(|a| a.iter().sum::<u32>() == k as u32)
            .collect();
        let index: BTreeMap<Vec<u32>, usize> = basis.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let mut mats = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut m = QMatrix::zeros(basis.len(), basis.len());
                for (col, a) in basis.iter().enumerate() {
                    if a[j] == 0 {
                        continue;
                    }
                    let mut b = a.clone();
                    b[j] -= 1;
                    b[i] += 1;
                    m.set(index[&b], col, q(a[j] as i64));
                }
                mats.push(m);
            }
        }
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let labels = basis
            .iter()
            .map(|a| {
                let e: Vec<i64> = a.iter().map(|&x| x as i64).collect();
                let s = crate::poly::format_monomial(&e, &names);
                if s.is_empty() { "1".to_string() } else { s }
            })
            .collect();
        let hw = (0..n).map(|i| if i == 0 { q(k as i64) } else { q(0) }).collect();
        Rep::new(n, mats, labels, Some(hw), true, RepExpr::Sym(k, n))
    }

    /// One-dimensional `T v = lambda tr(T) v`; integrable iff `lambda` is an integer.
    pub fn det(lambda: &Rational, n: usize) -> Self {
        let mats = (0..n * n)
            .map(|x| if x / n == x % n { QMatrix::scalar(1, lambda) } else { QMatrix::zeros(1, 1) })
            .collect();
        Rep::new(
            n,
            mats,
            vec![format!("det^{}", fmt_rational(lambda))],
            Some(vec![lambda.clone(); n]),
            is_integer(lambda),
            RepExpr::Det(lambda.clone(), n),
        )
        .expect("det")
    }

    pub fn tensor(a: &Rep, b: &Rep) -> Result<Self> {
        if a.n != b.n {
            return Err(Error::InvalidRep("tensor of reps of different rank".into()));
        }
        let ia = QMatrix::identity(a.dim);
        let ib = QMatrix::identity(b.dim);
        let mats = a.mats.iter().zip(&b.mats).map(|(x, y)| x.kron(&ib).add(&ia.kron(y))).collect();
        let mut labels = Vec::new();
        for x in &a.labels {
            for y in &b.labels {
                labels.push(format!("{x}|{y}"));
            }
        }
        let expr = RepExpr::Tensor(Box::new(a.expr.clone()), Box::new(b.expr.clone()));
        Rep::new(a.n, mats, labels, None, a.integrable && b.integrable, expr)
    }

    pub fn sum(a: &Rep, b: &Rep) -> Result<Self> {
        if a.n != b.n {
            return Err(Error::InvalidRep("sum of reps of different rank".into()));
        }
        let mats = a.mats.iter().zip(&b.mats).map(|(x, y)| x.direct_sum(y)).collect();
        let labels = a.labels.iter().chain(&b.labels).cloned().collect();
        let expr = RepExpr::Sum(Box::new(a.expr.clone()), Box::new(b.expr.clone()));
        Rep::new(a.n, mats, labels, None, a.integrable && b.integrable, expr)
    }

    /// Submodule generated by a highest-weight vector of weight `w`.
    pub fn hwc(r: &Rep, w: &[Rational]) -> Result<Self> {
        let n = r.n;
        let wtxt = || w.iter().map(fmt_rational).collect::<Vec<_>>().join(",");
        if w.len() != n {
            return Err(Error::InvalidWeight(format!("[{}] needs {n} entries", wtxt())));
        }
        for i in 0..n.saturating_sub(1) {
            let d = &w[i] - &w[i + 1];
            if !is_integer(&d) || d.is_negative() {
                return Err(Error::InvalidWeight(format!("[{}] is not dominant integral", wtxt())));
            }
        }
        // Stack (E_ii - w_i) and the raising operators E_ij (i < j).
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for i in 0..n {
            for j in i..n {
                let m = if i == j { r.e(i, i).sub(&QMatrix::scalar(r.dim, &w[i])) } else { r.e(i, j).clone() };
                for a in 0..r.dim {
                    rows.push(m.row(a).to_vec());
                }
            }
        }
        let stacked = QMatrix::from_rows(rows);
        let vecs = stacked.nullspace();
        let Some(top) = vecs.into_iter().next() else {
            return Err(Error::InvalidWeight(format!("no highest-weight vector of weight [{}]", wtxt())));
        };
        // Close under the lowering operators (and everything else, harmlessly).
        let mut basis: Vec<Vec<Rational>> = Vec::new();
        let mut queue = vec![top];
        let mut span = crate::linalg::SparseSpan::<usize>::new();
        while let Some(v) = queue.pop() {
            let sparse: BTreeMap<usize, Rational> = v.iter().cloned().enumerate().filter(|(_, c)| !c.is_zero()).collect();
            if !span.insert(sparse) {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    if i > j {
                        queue.push(r.e(i, j).apply(&v));
                    }
                }
            }
            basis.push(v);
        }
        let d = basis.len();
        let mut bm = QMatrix::zeros(r.dim, d);
        for (c, v) in basis.iter().enumerate() {
            for (row, x) in v.iter().enumerate() {
                bm.set(row, c, x.clone());
            }
        }
        let mut mats = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let img = r.e(i, j).mul(&bm);
                let mut m = QMatrix::zeros(d, d);
                for c in 0..d {
                    let x = bm.solve(&img.column(c)).ok_or_else(|| {
                        Error::InvalidRep("highest-weight span is not a submodule".into())
                    })?;
                    for (row, val) in x.into_iter().enumerate() {
                        m.set(row, c, val);
                    }
                }
                mats.push(m);
            }
        }
        let labels = (1..=d).map(|i| format!("v{i}")).collect();
        let expr = RepExpr::Hwc(Box::new(r.expr.clone()), w.to_vec());
        let mut rep = Rep::new(n, mats, labels, Some(w.to_vec()), r.integrable, expr)?;
        rep.embedding = Some(bm);
        Ok(rep)
    }

    /// Builds the module described by an expression.
    pub fn build(expr: &RepExpr) -> Result<Self> {
        match expr {
            RepExpr::Natural(n) => check_n(*n).map(|_| Rep::natural(*n)),
            RepExpr::Trivial(n) => check_n(*n).map(|_| Rep::trivial(*n)),
            RepExpr::Dual(r) => Ok(Rep::dual(&Rep::build(r)?)),
            RepExpr::Ext(k, n) => check_n(*n).and_then(|_| Rep::ext(*k, *n)),
            RepExpr::Sym(k, n) => check_n(*n).and_then(|_| Rep::sym(*k, *n)),
            RepExpr::Det(l, n) => check_n(*n).map(|_| Rep::det(l, *n)),
            RepExpr::Tensor(a, b) => Rep::tensor(&Rep::build(a)?, &Rep::build(b)?),
            RepExpr::Sum(a, b) => Rep::sum(&Rep::build(a)?, &Rep::build(b)?),
            RepExpr::Hwc(r, w) => Rep::hwc(&Rep::build(r)?, w),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Rep::build(&parse_rep_expr(text)?)
    }

    /// Action of an invertible matrix over a coordinate ring (the group
    /// element whose differential is this representation).
    pub fn rho_tilde(&self, g: &RingMatrix) -> Result<RingMatrix> {
        rho_tilde(&self.expr, g)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidRep("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

impl fmt::Display for Rep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Sorts in place and returns the sign of the sorting permutation.
fn sort_sign(w: &mut [usize]) -> i64 {
    let mut sign = 1;
    for i in 0..w.len() {
        for j in 0..w.len() - 1 - i {
            if w[j] > w[j + 1] {
                w.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    sign
}

/// Matrix of `Omega_k = sum E_{i1 i2} E_{i2 i3} ... E_{ik i1}`. Indices
/// `k > n` are accepted; those elements are central but not generators.
pub fn casimir(k: usize, rep: &Rep) -> Result<QMatrix> {
    let n = rep.n;
    if k == 0 {
        return Err(Error::InvalidInput("Casimir index must be at least 1".into()));
    }
    // chain[a][b] = sum over paths a -> b of length m.
    let mut chain: Vec<QMatrix> = rep.mats.clone();
    for _ in 1..k {
        let mut next = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let mut s = QMatrix::zeros(rep.dim, rep.dim);
                for c in 0..n {
                    s = s.add(&chain[a * n + c].mul(rep.e(c, b)));
                }
                next.push(s);
            }
        }
        chain = next;
    }
    let mut out = QMatrix::zeros(rep.dim, rep.dim);
    for a in 0..n {
        out = out.add(&chain[a * n + a]);
    }
    Ok(out)
}

/// Scalars by which `Omega_1..Omega_n` act; `NotScalar(k)` otherwise.
pub fn central_character(rep: &Rep) -> Result<Vec<Rational>> {
    (1..=rep.n)
        .map(|k| casimir(k, rep)?.as_scalar().ok_or(Error::NotScalar(k)))
        .collect()
}

/// `delta_il E_lj - E_li E_lj` (zero-based indices).
pub fn obstruction_operator(rep: &Rep, i: usize, j: usize, l: usize) -> QMatrix {
    let mut m = rep.e(l, i).mul(rep.e(l, j)).scale(&q(-1));
    if i == l {
        m = m.add(rep.e(l, j));
    }
    m
}

/// `Some(k)` when the module passes every obstruction test and has the
/// central character of the `k`-th exterior power.
pub fn is_exterior_type(rep: &Rep) -> Result<Option<usize>> {
    let chi = central_character(rep)?;
    let n = rep.n;
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                if !obstruction_operator(rep, i, j, l).is_zero() {
                    return Ok(None);
                }
            }
        }
    }
    for k in 0..=n {
        if central_character(&Rep::ext(k, n)?)? == chi {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Simple modules with pairwise distinct highest weights, used as a
/// reference catalog.
pub fn simple_catalog(n: usize) -> Vec<Rep> {
    let mut out = vec![Rep::trivial(n), Rep::natural(n), Rep::dual(&Rep::natural(n))];
    for k in 2..=n {
        out.push(Rep::ext(k, n).unwrap());
    }
    for k in 2..=3 {
        out.push(Rep::sym(k, n).unwrap());
    }
    out.push(Rep::det(&crate::rational::qf(1, 2), n));
    out.push(Rep::det(&q(-1), n));
    if n >= 2 {
        let adj = Rep::tensor(&Rep::natural(n), &Rep::dual(&Rep::natural(n))).unwrap();
        let mut w = vec![q(0); n];
        w[0] = q(1);
        w[n - 1] = q(-1);
        out.push(Rep::hwc(&adj, &w).unwrap());
    }
    if n >= 3 {
        let t = Rep::tensor(&Rep::natural(n), &Rep::ext(2, n).unwrap()).unwrap();
        let mut w = vec![q(0); n];
        w[0] = q(2);
        w[1] = q(1);
        out.push(Rep::hwc(&t, &w).unwrap());
    }
    out
}

fn ring_minor(g: &RingMatrix, rows: &[usize], cols: &[usize]) -> RingElem {
    let sub = rows.iter().map(|&r| cols.iter().map(|&c| g.get(r, c).clone()).collect()).collect();
    RingMatrix::from_rows(g.ring(), sub).det()
}

/// Group action attached to a representation expression.
pub fn rho_tilde(expr: &RepExpr, g: &RingMatrix) -> Result<RingMatrix> {
    let ring = g.ring().clone();
    let n = g.size();
    match expr {
        RepExpr::Natural(m) => {
            check_rank(*m, n)?;
            Ok(g.clone())
        }
        RepExpr::Trivial(m) => {
            check_rank(*m, n)?;
            Ok(RingMatrix::identity(&ring, 1))
        }
        RepExpr::Dual(r) => Ok(rho_tilde(r, &g.inverse()?.transpose())?),
        RepExpr::Det(l, m) => {
            check_rank(*m, n)?;
            if !is_integer(l) {
                return Err(Error::NotIntegrable(fmt_rational(l)));
            }
            let d = g.det().pow_signed(to_i64(l).unwrap())?;
            Ok(RingMatrix::from_rows(&ring, vec![vec![d]]))
        }
        RepExpr::Ext(k, m) => {
            check_rank(*m, n)?;
            let basis = subsets(n, *k);
            let rows = basis
                .iter()
                .map(|s| basis.iter().map(|t| if *k == 0 { RingElem::one(&ring) } else { ring_minor(g, s, t) }).collect())
                .collect();
            Ok(RingMatrix::from_rows(&ring, rows))
        }
        RepExpr::Sym(k, m) => {
            check_rank(*m, n)?;
            let basis: Vec<Vec<u32>> = multi_indices(n, *k as u32)
                .into_iter()
                .filter(|a| a.iter().sum::<u32>() == *k as u32)
                .collect();
            let index: BTreeMap<Vec<u32>, usize> = basis.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
            let mut out = RingMatrix::zeros(&ring, basis.len());
            for (col, a) in basis.iter().enumerate() {
                // prod_j (sum_i g_ij x_i)^{a_j}
                let mut poly: BTreeMap<Vec<u32>, RingElem> = BTreeMap::from([(vec![0; n], RingElem::one(&ring))]);
                for (j, &aj) in a.iter().enumerate() {
                    for _ in 0..aj {
                        let mut next: BTreeMap<Vec<u32>, RingElem> = BTreeMap::new();
                        for (e, c) in &poly {
                            for i in 0..n {
                                let gij = g.get(i, j);
                                if gij.is_zero() {
                                    continue;
                                }
                                let mut e2 = e.clone();
                                e2[i] += 1;
                                let v = c.mul(gij);
                                let slot = next.entry(e2).or_insert_with(|| RingElem::zero(&ring));
                                *slot = slot.add(&v);
                            }
                        }
                        poly = next;
                    }
                }
                for (e, c) in poly {
                    out.set(index[&e], col, c);
                }
            }
            Ok(out)
        }
        RepExpr::Tensor(a, b) => {
            let x = rho_tilde(a, g)?;
            let y = rho_tilde(b, g)?;
            let (da, db) = (x.size(), y.size());
            let mut out = RingMatrix::zeros(&ring, da * db);
            for i in 0..da {
                for j in 0..da {
                    for k in 0..db {
                        for l in 0..db {
                            out.set(i * db + k, j * db + l, x.get(i, j).mul(y.get(k, l)));
                        }
                    }
                }
            }
            Ok(out)
        }
        RepExpr::Sum(a, b) => {
            let x = rho_tilde(a, g)?;
            let y = rho_tilde(b, g)?;
            let (da, db) = (x.size(), y.size());
            let mut out = RingMatrix::zeros(&ring, da + db);
            for i in 0..da {
                for j in 0..da {
                    out.set(i, j, x.get(i, j).clone());
                }
            }
            for i in 0..db {
                for j in 0..db {
                    out.set(da + i, da + j, y.get(i, j).clone());
                }
            }
            Ok(out)
        }
        RepExpr::Hwc(inner, w) => {
            let sub = Rep::hwc(&Rep::build(inner)?, w)?;
            let b = sub.embedding.as_ref().expect("hwc embedding");
            let big = rho_tilde(inner, g)?;
            let d = b.cols();
            // Rows of b forming an invertible block.
            let (_, pivots) = b.transpose().rref();
            let bp = QMatrix::from_rows(pivots.iter().map(|&r| b.row(r).to_vec()).collect());
            let bp_inv = bp.inverse().expect("pivot block invertible");
            let mut out = RingMatrix::zeros(&ring, d);
            for c in 0..d {
                // image of basis vector c, restricted to pivot rows
                let img: Vec<RingElem> = pivots
                    .iter()
                    .map(|&r| {
                        let mut s = RingElem::zero(&ring);
                        for k in 0..b.rows() {
                            let bk = b.get(k, c);
                            if !bk.is_zero() {
                                s = s.add(&big.get(r, k).scale(bk));
                            }
                        }
                        s
                    })
                    .collect();
                for row in 0..d {
                    let mut s = RingElem::zero(&ring);
                    for (t, x) in img.iter().enumerate() {
                        let coef = bp_inv.get(row, t);
                        if !coef.is_zero() {
                            s = s.add(&x.scale(coef));
                        }
                    }
                    out.set(row, c, s);
                }
            }
            Ok(out)
        }
    }
}

fn check_rank(m: usize, n: usize) -> Result<()> {
    if m != n {
        return Err(Error::InvalidRep(format!("rank {m} module on a {n}-dimensional chart")));
    }
    Ok(())
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.to_string() })
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        self.ws();
        if self.pos < self.s.len() && self.s[self.pos] == c {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected '{}'", c as char))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a constructor name");
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn token(&mut self) -> Result<(usize, String)> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || b"-+/".contains(&self.s[self.pos])) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        Ok((start, String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()))
    }

    fn rational(&mut self) -> Result<Rational> {
        let (start, t) = self.token()?;
        parse_rational(&t).ok_or(Error::Parse { pos: start, msg: format!("invalid rational '{t}'") })
    }

    fn natural(&mut self) -> Result<usize> {
        let (start, t) = self.token()?;
        t.parse().map_err(|_| Error::Parse { pos: start, msg: format!("invalid integer '{t}'") })
    }

    fn expr(&mut self) -> Result<RepExpr> {
        self.ws();
        let start = self.pos;
        let name = self.ident()?;
        self.eat(b'(')?;
        let e = match name.as_str() {
            "natural" => RepExpr::Natural(self.natural()?),
            "trivial" => RepExpr::Trivial(self.natural()?),
            "dual" => RepExpr::Dual(Box::new(self.expr()?)),
            "ext" | "sym" => {
                let k = self.natural()?;
                self.eat(b',')?;
                let n = self.natural()?;
                if name == "ext" { RepExpr::Ext(k, n) } else { RepExpr::Sym(k, n) }
            }
            "det" => {
                let l = self.rational()?;
                self.eat(b',')?;
                RepExpr::Det(l, self.natural()?)
            }
            "tensor" | "sum" => {
                let a = self.expr()?;
                self.eat(b',')?;
                let b = self.expr()?;
                if name == "tensor" {
                    RepExpr::Tensor(Box::new(a), Box::new(b))
                } else {
                    RepExpr::Sum(Box::new(a), Box::new(b))
                }
            }
            "hwc" => {
                let r = self.expr()?;
                self.eat(b',')?;
                self.eat(b'[')?;
                let mut w = vec![self.rational()?];
                loop {
                    self.ws();
                    if self.pos < self.s.len() && self.s[self.pos] == b',' {
                        self.pos += 1;
                        w.push(self.rational()?);
                    } else {
                        break;
                    }
                }
                self.eat(b']')?;
                RepExpr::Hwc(Box::new(r), w)
            }
            _ => return Err(Error::Parse { pos: start, msg: format!("unknown constructor '{name}'") }),
        };
        self.eat(b')')?;
        Ok(e)
    }
}

/// Parses the representation mini-language, e.g. `hwc(tensor(natural(3),ext(2,3)),[2,1,0])`.
pub fn parse_rep_expr(text: &str) -> Result<RepExpr> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.ws();
    if p.pos != p.s.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// `true` when consecutive differences are non-negative integers.
pub fn is_dominant_integral(w: &[Rational]) -> bool {
    w.windows(2).all(|p| {
        let d = &p[0] - &p[1];
        is_integer(&d) && !d.is_negative()
    })
}
