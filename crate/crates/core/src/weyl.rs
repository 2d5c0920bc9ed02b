//! Differential operators, vector fields and delta-function modules.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::format_monomial;
use crate::rational::{fmt_rational, multi_binomial, q, Rational};
use crate::ring::{check_same, same_ring, Ring, RingElem};

/// Normal-ordered operator `sum_b c_b D^b` over the basis derivations of a chart.
#[derive(Clone, Debug)]
pub struct DiffOp {
    ring: Ring,
    terms: BTreeMap<Vec<u32>, RingElem>,
}

fn add_into(map: &mut BTreeMap<Vec<u32>, RingElem>, key: Vec<u32>, c: RingElem) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(&key) {
        Some(v) => {
            let s = v.add(&c);
            if s.is_zero() {
                map.remove(&key);
            } else {
                *v = s;
            }
        }
        None => {
            map.insert(key, c);
        }
    }
}

impl DiffOp {
    pub fn zero(ring: &Ring) -> Self {
        DiffOp { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn from_elem(f: &RingElem) -> Self {
        let mut op = Self::zero(f.ring());
        add_into(&mut op.terms, vec![0; f.ring().dim()], f.clone());
        op
    }

    pub fn one(ring: &Ring) -> Self {
        Self::from_elem(&RingElem::one(ring))
    }

    /// The basis derivation `D_i`.
    pub fn d(ring: &Ring, i: usize) -> Self {
        let mut b = vec![0; ring.dim()];
        b[i] = 1;
        Self::term(&RingElem::one(ring), b)
    }

    /// `f D^b`.
    pub fn term(f: &RingElem, b: Vec<u32>) -> Self {
        assert_eq!(b.len(), f.ring().dim());
        let mut op = Self::zero(f.ring());
        add_into(&mut op.terms, b, f.clone());
        op
    }

    pub fn from_field(v: &VecField) -> Self {
        let mut op = Self::zero(&v.ring);
        for (i, c) in v.comps.iter().enumerate() {
            let mut b = vec![0; v.ring.dim()];
            b[i] = 1;
            add_into(&mut op.terms, b, c.clone());
        }
        op
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, RingElem> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximal derivative order; `-1` for the zero operator.
    pub fn order(&self) -> i64 {
        self.terms
            .keys()
            .map(|b| b.iter().map(|&x| x as i64).sum())
            .max()
            .unwrap_or(-1)
    }

    pub fn checked_add(&self, other: &DiffOp) -> Result<DiffOp> {
        check_same(&self.ring, &other.ring)?;
        let mut out = self.clone();
        for (b, c) in &other.terms {
            add_into(&mut out.terms, b.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        self.checked_add(other).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn neg(&self) -> DiffOp {
        self.scale(&q(-1))
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> DiffOp {
        let mut out = Self::zero(&self.ring);
        for (b, f) in &self.terms {
            add_into(&mut out.terms, b.clone(), f.scale(c));
        }
        out
    }

    /// Left multiplication by a ring element.
    pub fn lmul(&self, f: &RingElem) -> DiffOp {
        let mut out = Self::zero(&self.ring);
        for (b, g) in &self.terms {
            add_into(&mut out.terms, b.clone(), f.mul(g));
        }
        out
    }

    /// Normal-ordered product, using `(f D^a)(g D^b) = sum_{c<=a} C(a,c) f D^c(g) D^{a-c+b}`.
    pub fn compose(&self, other: &DiffOp) -> Result<DiffOp> {
        check_same(&self.ring, &other.ring)?;
        let mut out = Self::zero(&self.ring);
        for (a, f) in &self.terms {
            let sub = sub_indices(a);
            for (b, g) in &other.terms {
                for c in &sub {
                    let coef = multi_binomial(a, c);
                    let dg = g.derive_multi(c);
                    if dg.is_zero() {
                        continue;
                    }
                    let key: Vec<u32> = a.iter().zip(c).zip(b).map(|((x, y), z)| x - y + z).collect();
                    add_into(&mut out.terms, key, f.mul(&dg).scale(&coef));
                }
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &DiffOp) -> Result<DiffOp> {
        Ok(self.compose(other)?.sub(&other.compose(self)?))
    }

    pub fn apply(&self, f: &RingElem) -> Result<RingElem> {
        check_same(&self.ring, f.ring())?;
        let mut acc = RingElem::zero(&self.ring);
        for (b, c) in &self.terms {
            acc = acc.add(&c.mul(&f.derive_multi(b)));
        }
        Ok(acc)
    }

    /// The vector field when the operator has order at most one and no
    /// order-zero part.
    pub fn as_field(&self) -> Option<VecField> {
        let n = self.ring.dim();
        let mut comps = vec![RingElem::zero(&self.ring); n];
        for (b, c) in &self.terms {
            let s: u32 = b.iter().sum();
            if s != 1 {
                return None;
            }
            let i = b.iter().position(|&x| x == 1).unwrap();
            comps[i] = c.clone();
        }
        Some(VecField { ring: self.ring.clone(), comps })
    }
}

impl PartialEq for DiffOp {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.sub(other).is_zero()
    }
}

/// All `c <= a` componentwise.
pub(crate) fn sub_indices(a: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &ai in a {
        let mut next = Vec::new();
        for prefix in &out {
            for k in 0..=ai {
                let mut p = prefix.clone();
                p.push(k);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn deriv_names(ring: &Ring) -> Vec<String> {
    if ring.is_coordinate() {
        ring.vars().iter().map(|v| format!("d{v}")).collect()
    } else if ring.dim() == 1 {
        vec!["D".to_string()]
    } else {
        (1..=ring.dim()).map(|i| format!("D{i}")).collect()
    }
}

/// Text form of a coefficient-times-monomial product, with parentheses
/// around sums.
pub(crate) fn fmt_scaled(c: &str, mono: &str) -> String {
    if mono.is_empty() || mono == "1" {
        return c.to_string();
    }
    match c {
        "1" => mono.to_string(),
        "-1" => format!("-{mono}"),
        _ if c.contains(" + ") || c.contains(" - ") || c.contains('/') => format!("({c})*{mono}"),
        _ => format!("{c}*{mono}"),
    }
}

pub(crate) fn join_terms(parts: Vec<String>) -> String {
    if parts.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (k, p) in parts.into_iter().enumerate() {
        if k == 0 {
            s.push_str(&p);
        } else if let Some(rest) = p.strip_prefix('-') {
            s.push_str(" - ");
            s.push_str(rest);
        } else {
            s.push_str(" + ");
            s.push_str(&p);
        }
    }
    s
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = deriv_names(&self.ring);
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(b, c)| {
                let e: Vec<i64> = b.iter().map(|&x| x as i64).collect();
                fmt_scaled(&c.to_string(), &format_monomial(&e, &names))
            })
            .collect();
        write!(f, "{}", join_terms(parts))
    }
}

/// Vector field `sum_i f_i D_i` in the basis derivations of a chart.
#[derive(Clone, Debug)]
pub struct VecField {
    ring: Ring,
    comps: Vec<RingElem>,
}

impl VecField {
    pub fn new(ring: &Ring, comps: Vec<RingElem>) -> Result<Self> {
        if comps.len() != ring.dim() {
            return Err(Error::InvalidInput(format!(
                "vector field needs {} components, got {}",
                ring.dim(),
                comps.len()
            )));
        }
        for c in &comps {
            check_same(ring, c.ring())?;
        }
        Ok(VecField { ring: ring.clone(), comps })
    }

    pub fn zero(ring: &Ring) -> Self {
        VecField { ring: ring.clone(), comps: vec![RingElem::zero(ring); ring.dim()] }
    }

    /// `f D_i`.
    pub fn basis(f: &RingElem, i: usize) -> Self {
        let mut v = Self::zero(f.ring());
        v.comps[i] = f.clone();
        v
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn comps(&self) -> &[RingElem] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &VecField) -> VecField {
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect();
        VecField { ring: self.ring.clone(), comps }
    }

    pub fn sub(&self, other: &VecField) -> VecField {
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a.sub(b)).collect();
        VecField { ring: self.ring.clone(), comps }
    }

    pub fn scale(&self, c: &Rational) -> VecField {
        VecField { ring: self.ring.clone(), comps: self.comps.iter().map(|a| a.scale(c)).collect() }
    }

    pub fn lmul(&self, f: &RingElem) -> VecField {
        VecField { ring: self.ring.clone(), comps: self.comps.iter().map(|a| f.mul(a)).collect() }
    }

    pub fn apply(&self, f: &RingElem) -> Result<RingElem> {
        check_same(&self.ring, f.ring())?;
        let mut acc = RingElem::zero(&self.ring);
        for (i, c) in self.comps.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.add(&c.mul(&f.derive(i)));
            }
        }
        Ok(acc)
    }

    pub fn bracket(&self, other: &VecField) -> Result<VecField> {
        check_same(&self.ring, &other.ring)?;
        let comps = (0..self.ring.dim())
            .map(|i| Ok(self.apply(&other.comps[i])?.sub(&other.apply(&self.comps[i])?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(VecField { ring: self.ring.clone(), comps })
    }

    /// Divergence `sum_i D_i f_i`.
    pub fn divergence(&self) -> RingElem {
        let mut acc = RingElem::zero(&self.ring);
        for (i, c) in self.comps.iter().enumerate() {
            acc = acc.add(&c.derive(i));
        }
        acc
    }
}

impl PartialEq for VecField {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.comps == other.comps
    }
}

impl fmt::Display for VecField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", DiffOp::from_field(self))
    }
}

/// Element `sum_b c_b d^b delta_p` of the delta-function module at `p`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeltaElem {
    point: Vec<Rational>,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl DeltaElem {
    pub fn zero(point: &[Rational]) -> Self {
        DeltaElem { point: point.to_vec(), terms: BTreeMap::new() }
    }

    /// `d^b delta_p`.
    pub fn basis(point: &[Rational], b: Vec<u32>) -> Self {
        assert_eq!(point.len(), b.len());
        let mut e = Self::zero(point);
        e.terms.insert(b, Rational::one());
        e
    }

    pub fn point(&self) -> &[Rational] {
        &self.point
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, b: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(b.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&b);
        }
    }

    pub fn add(&self, other: &DeltaElem) -> DeltaElem {
        assert_eq!(self.point, other.point, "delta modules at different points");
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_term(b.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> DeltaElem {
        let mut out = Self::zero(&self.point);
        for (b, x) in &self.terms {
            out.add_term(b.clone(), x * c);
        }
        out
    }

    pub fn sub(&self, other: &DeltaElem) -> DeltaElem {
        self.add(&other.scale(&q(-1)))
    }

    /// `x_i . d^b delta = p_i d^b delta - b_i d^{b - e_i} delta`.
    pub fn act_var(&self, i: usize) -> DeltaElem {
        let mut out = Self::zero(&self.point);
        for (b, c) in &self.terms {
            out.add_term(b.clone(), c * &self.point[i]);
            if b[i] > 0 {
                let mut b2 = b.clone();
                b2[i] -= 1;
                out.add_term(b2, -(c * q(b[i] as i64)));
            }
        }
        out
    }

    pub fn act_deriv(&self, i: usize) -> DeltaElem {
        let mut out = Self::zero(&self.point);
        for (b, c) in &self.terms {
            let mut b2 = b.clone();
            b2[i] += 1;
            out.add_term(b2, c.clone());
        }
        out
    }

    /// Action of a polynomial (the ring must be a polynomial ring in
    /// `point.len()` variables).
    pub fn act_ring(&self, f: &RingElem) -> Result<DeltaElem> {
        check_poly_ring(f.ring(), self.point.len())?;
        let mut out = Self::zero(&self.point);
        for (e, c) in f.numerator().terms() {
            let mut v = self.clone();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    v = v.act_var(i);
                }
            }
            out = out.add(&v.scale(c));
        }
        Ok(out)
    }

    pub fn act_field(&self, v: &VecField) -> Result<DeltaElem> {
        self.act_op(&DiffOp::from_field(v))
    }

    pub fn act_op(&self, op: &DiffOp) -> Result<DeltaElem> {
        check_poly_ring(op.ring(), self.point.len())?;
        let mut out = Self::zero(&self.point);
        for (b, c) in op.terms() {
            let mut v = self.clone();
            for (i, &k) in b.iter().enumerate() {
                for _ in 0..k {
                    v = v.act_deriv(i);
                }
            }
            out = out.add(&v.act_ring(c)?);
        }
        Ok(out)
    }

    pub fn format(&self, var_names: &[String]) -> String {
        let names: Vec<String> = var_names.iter().map(|v| format!("d{v}")).collect();
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(b, c)| {
                let e: Vec<i64> = b.iter().map(|&x| x as i64).collect();
                let m = format_monomial(&e, &names);
                let m = if m.is_empty() { "delta".to_string() } else { format!("{m}*delta") };
                fmt_scaled(&fmt_rational(c), &m)
            })
            .collect();
        join_terms(parts)
    }
}

fn check_poly_ring(ring: &Ring, n: usize) -> Result<()> {
    if !matches!(ring.kind(), crate::ring::RingKind::Poly) || ring.nvars() != n {
        return Err(Error::InvalidRing(format!(
            "delta modules need a polynomial ring in {n} variables, got {}",
            ring.name()
        )));
    }
    Ok(())
}

/// Checked composition, reporting mixed charts as `SpecMismatch`.
pub fn op_compose(a: &DiffOp, b: &DiffOp) -> Result<DiffOp> {
    a.compose(b)
}

pub fn op_apply(a: &DiffOp, f: &RingElem) -> Result<RingElem> {
    a.apply(f)
}

pub fn bracket(a: &VecField, b: &VecField) -> Result<VecField> {
    a.bracket(b)
}

pub fn delta_act(op: &DiffOp, v: &DeltaElem) -> Result<DeltaElem> {
    v.act_op(op)
}
