//! Coordinate rings of charts and their elements.
//!
//! Every ring is presented over a set of ambient variables together with a
//! list of commuting basis derivations. Polynomial and Laurent rings use the
//! coordinate partials; quotient rings (one relation `lead^d = tail`) carry
//! explicit derivations that preserve the relation; localizations at a
//! single element inherit or override the derivations of their base.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{Exponent, Poly};
use crate::rational::{multi_factorial, q, Rational};

pub type Ring = Arc<RingSpec>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingKind {
    Poly,
    Laurent,
    /// `vars[lead]^degree` rewrites to `tail`; `tail` has lower degree in `lead`.
    Quotient { lead: usize, degree: i64, tail: Poly },
    /// Elements `num / denom^k` with `num` in the base ring.
    Localized { base: Ring, denom: Poly },
}

/// Derivation given by its ambient components `sum_j c_j d/dv_j`; each
/// component is `num / denom^k` (`k = 0` outside localizations).
pub type AmbientDerivation = Vec<(Poly, u32)>;

#[derive(Debug, PartialEq, Eq)]
pub struct RingSpec {
    kind: RingKind,
    vars: Vec<String>,
    derivations: Option<Vec<AmbientDerivation>>,
}

fn names(vars: &[&str]) -> Vec<String> {
    vars.iter().map(|s| s.to_string()).collect()
}

impl RingSpec {
    pub fn poly(vars: &[&str]) -> Ring {
        assert!(!vars.is_empty(), "a ring needs at least one variable");
        Arc::new(RingSpec { kind: RingKind::Poly, vars: names(vars), derivations: None })
    }

    pub fn laurent(vars: &[&str]) -> Ring {
        assert!(!vars.is_empty(), "a ring needs at least one variable");
        Arc::new(RingSpec { kind: RingKind::Laurent, vars: names(vars), derivations: None })
    }

    /// `k[vars] / (vars[lead]^degree - tail)` with explicit basis derivations.
    ///
    /// Each derivation is a list of polynomial ambient components and must
    /// annihilate the relation modulo itself.
    pub fn quotient(
        vars: &[&str],
        lead: usize,
        degree: i64,
        tail: Poly,
        derivations: Vec<Vec<Poly>>,
    ) -> Result<Ring> {
        let n = vars.len();
        if lead >= n || degree < 1 {
            return Err(Error::InvalidRing("bad leading variable or degree".into()));
        }
        if tail.nvars() != n || tail.has_negative_exponents() || tail.degree_in(lead) >= degree {
            return Err(Error::InvalidRing("relation tail must have lower leading degree".into()));
        }
        if derivations.is_empty() || derivations.iter().any(|d| d.len() != n) {
            return Err(Error::InvalidRing("quotient rings need explicit derivations".into()));
        }
        let spec = RingSpec {
            kind: RingKind::Quotient { lead, degree, tail: tail.clone() },
            vars: names(vars),
            derivations: Some(
                derivations
                    .into_iter()
                    .map(|d| d.into_iter().map(|p| (p, 0)).collect())
                    .collect(),
            ),
        };
        let ring = Arc::new(spec);
        let mut e = vec![0; n];
        e[lead] = degree;
        let rel = Poly::monomial(n, e, Rational::one()).sub(&tail);
        for i in 0..ring.dim() {
            let d = ring.apply_to_raw(i, &rel);
            if !d.is_zero() {
                return Err(Error::InvalidRing(format!(
                    "derivation {i} does not preserve the relation"
                )));
            }
        }
        Ok(ring)
    }

    /// Localization of `base` at `denom`; `derivations` overrides the basis
    /// derivations (components are fractions over `denom`).
    pub fn localized(
        base: &Ring,
        denom: Poly,
        derivations: Option<Vec<AmbientDerivation>>,
    ) -> Result<Ring> {
        if matches!(base.kind, RingKind::Localized { .. }) {
            return Err(Error::InvalidRing("nested localization".into()));
        }
        let denom = base.normalize_base(denom);
        if denom.is_zero() {
            return Err(Error::InvalidRing("cannot localize at zero".into()));
        }
        let derivations = match derivations {
            Some(d) => Some(d),
            None => base
                .derivations
                .as_ref()
                .map(|ds| ds.iter().map(|d| d.iter().map(|(p, _)| (p.clone(), 0)).collect()).collect()),
        };
        Ok(Arc::new(RingSpec {
            kind: RingKind::Localized { base: base.clone(), denom },
            vars: base.vars.clone(),
            derivations,
        }))
    }

    /// The affine elliptic curve `y^2 = t^3 - t` with `Der(A) = A tau`,
    /// `tau = 2y d/dt + (3t^2 - 1) d/dy`.
    pub fn elliptic() -> Ring {
        let t = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let tail = t.pow(3).sub(&t);
        let tau = vec![y.scale(&q(2)), t.pow(2).scale(&q(3)).sub(&Poly::one(2))];
        RingSpec::quotient(&["t", "y"], 1, 2, tail, vec![tau]).expect("elliptic ring")
    }

    pub fn kind(&self) -> &RingKind {
        &self.kind
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Number of ambient variables.
    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Number of basis derivations (the chart dimension).
    pub fn dim(&self) -> usize {
        match &self.derivations {
            Some(d) => d.len(),
            None => self.vars.len(),
        }
    }

    /// True when the basis derivations are the coordinate partials, i.e.
    /// the ambient variables are uniformizing parameters.
    pub fn is_coordinate(&self) -> bool {
        self.derivations.is_none()
    }

    pub fn base(&self) -> Option<&Ring> {
        match &self.kind {
            RingKind::Localized { base, .. } => Some(base),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        let v = self.vars.join(",");
        match &self.kind {
            RingKind::Poly => format!("Q[{v}]"),
            RingKind::Laurent => format!("Q[{v}]^±"),
            RingKind::Quotient { lead, degree, tail } => {
                format!("Q[{v}]/({}^{} - ({}))", self.vars[*lead], degree, tail.format(&self.vars))
            }
            RingKind::Localized { base, denom } => {
                format!("{}[1/({})]", base.name(), denom.format(&self.vars))
            }
        }
    }

    fn normalize_base(&self, p: Poly) -> Poly {
        match &self.kind {
            RingKind::Poly => {
                assert!(!p.has_negative_exponents(), "negative exponent in polynomial ring {}", self.name());
                p
            }
            RingKind::Laurent => p,
            RingKind::Quotient { lead, degree, tail } => reduce_quotient(p, *lead, *degree, tail),
            RingKind::Localized { base, .. } => base.normalize_base(p),
        }
    }

    /// Exact division inside the (non-localized) base presentation.
    fn base_exact_div(&self, a: &Poly, f: &Poly) -> Option<Poly> {
        if a.is_zero() {
            return Some(a.clone());
        }
        match &self.kind {
            RingKind::Poly => a.exact_div(f),
            RingKind::Laurent => {
                if f.len() == 1 {
                    let (e, c) = f.leading()?;
                    let inv: Exponent = e.iter().map(|x| -x).collect();
                    Some(a.mul_monomial(&inv, &c.recip()))
                } else {
                    let (sa, ea) = shift_nonneg(a);
                    let (sf, ef) = shift_nonneg(f);
                    let qq = sa.exact_div(&sf)?;
                    let shift: Exponent = ea.iter().zip(&ef).map(|(x, y)| x - y).collect();
                    Some(qq.mul_monomial(&shift, &Rational::one()))
                }
            }
            RingKind::Quotient { lead, degree, tail } => {
                if f.len() != 1 {
                    if let Some(qq) = a.exact_div(f) {
                        // Representative division; confirm it in the ring.
                        if self.normalize_base(qq.mul(f)).sub(a).is_zero() {
                            return Some(self.normalize_base(qq));
                        }
                    }
                    return None;
                }
                let (e, c) = f.leading()?;
                let mut cur = a.scale(&c.recip());
                for (v, &k) in e.iter().enumerate() {
                    for _ in 0..k {
                        cur = div_by_var(&cur, v, *lead, *degree, tail)?;
                    }
                }
                Some(cur)
            }
            RingKind::Localized { .. } => None,
        }
    }

    /// Components of basis derivation `i` as elements of this ring.
    pub fn derivation_components(self: &Arc<Self>, i: usize) -> Vec<RingElem> {
        let n = self.nvars();
        match &self.derivations {
            None => (0..n)
                .map(|j| if i == j { RingElem::one(self) } else { RingElem::zero(self) })
                .collect(),
            Some(ds) => ds[i]
                .iter()
                .map(|(p, k)| RingElem::from_parts(self, p.clone(), *k))
                .collect(),
        }
    }

    /// Applies derivation `i` to a raw ambient polynomial, for relation checks.
    fn apply_to_raw(self: &Arc<Self>, i: usize, p: &Poly) -> Poly {
        let comps = self.derivation_components(i);
        let mut acc = RingElem::zero(self);
        for (j, c) in comps.iter().enumerate() {
            let dp = RingElem::from_poly(self, p.partial(j));
            acc = acc.add(&c.mul(&dp));
        }
        acc.num
    }

    /// Normal-form monomials of total degree at most `d` (Laurent rings use
    /// the sum of absolute exponents; localizations add `m / denom`).
    pub fn monomials(self: &Arc<Self>, d: u32) -> Vec<RingElem> {
        let n = self.nvars();
        let d = d as i64;
        let mut out = Vec::new();
        match &self.kind {
            RingKind::Poly => {
                for e in exponents_upto(n, d, false) {
                    out.push(RingElem::from_poly(self, Poly::monomial(n, e, Rational::one())));
                }
            }
            RingKind::Laurent => {
                for e in exponents_upto(n, d, true) {
                    out.push(RingElem::from_poly(self, Poly::monomial(n, e, Rational::one())));
                }
            }
            RingKind::Quotient { lead, degree, .. } => {
                for e in exponents_upto(n, d, false) {
                    if e[*lead] < *degree {
                        out.push(RingElem::from_poly(self, Poly::monomial(n, e, Rational::one())));
                    }
                }
            }
            RingKind::Localized { base, .. } => {
                for m in base.monomials(d as u32) {
                    out.push(RingElem::from_parts(self, m.num.clone(), 0));
                }
                for m in base.monomials(d.saturating_sub(1).max(0) as u32) {
                    out.push(RingElem::from_parts(self, m.num.clone(), 1));
                }
            }
        }
        out
    }
}

fn shift_nonneg(p: &Poly) -> (Poly, Exponent) {
    let n = p.nvars();
    let mut mins = vec![0i64; n];
    for e in p.terms().keys() {
        for i in 0..n {
            mins[i] = mins[i].min(e[i]);
        }
    }
    let neg: Exponent = mins.iter().map(|x| -x).collect();
    (p.mul_monomial(&neg, &Rational::one()), mins)
}

fn reduce_quotient(p: Poly, lead: usize, degree: i64, tail: &Poly) -> Poly {
    let n = p.nvars();
    let mut done = Poly::zero(n);
    let mut work = p;
    while !work.is_zero() {
        let mut next = Poly::zero(n);
        for (e, c) in work.into_terms() {
            if e[lead] >= degree {
                let mut e2 = e.clone();
                e2[lead] -= degree;
                next = next.add(&tail.mul_monomial(&e2, &c));
            } else {
                done.add_term(e, c);
            }
        }
        work = next;
    }
    done
}

fn div_by_var(a: &Poly, v: usize, lead: usize, degree: i64, tail: &Poly) -> Option<Poly> {
    let n = a.nvars();
    if v != lead {
        if a.terms().keys().any(|e| e[v] < 1) {
            return None;
        }
        let mut e = vec![0; n];
        e[v] = -1;
        return Some(a.mul_monomial(&e, &Rational::one()));
    }
    // a = c_0 + (terms with lead exponent >= 1); c_0 / v = (c_0 / tail) v^(degree-1).
    let c0 = a.filter_terms(|e| e[lead] == 0);
    let rest = a.filter_terms(|e| e[lead] > 0);
    let q0 = c0.exact_div(tail)?;
    let mut down = vec![0; n];
    down[lead] = -1;
    let mut up = vec![0; n];
    up[lead] = degree - 1;
    Some(rest.mul_monomial(&down, &Rational::one()).add(&q0.mul_monomial(&up, &Rational::one())))
}

/// All exponent vectors with total (absolute) degree at most `d`.
pub fn exponents_upto(n: usize, d: i64, signed: bool) -> Vec<Exponent> {
    fn rec(n: usize, d: i64, signed: bool, cur: &mut Exponent, out: &mut Vec<Exponent>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let lo = if signed { -d } else { 0 };
        for k in lo..=d {
            cur.push(k);
            rec(n, d - k.abs(), signed, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, signed, &mut Vec::new(), &mut out);
    out.sort_by_key(|e| (e.iter().map(|x| x.abs()).sum::<i64>(), e.clone()));
    out
}

/// Element of a coordinate ring, stored as `num / denom^den` (the
/// denominator only appears in localized rings).
#[derive(Clone, Debug)]
pub struct RingElem {
    ring: Ring,
    num: Poly,
    den: u32,
}

pub(crate) fn same_ring(a: &Ring, b: &Ring) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn check_same(a: &Ring, b: &Ring) -> Result<()> {
    if same_ring(a, b) {
        Ok(())
    } else {
        Err(Error::SpecMismatch(a.name(), b.name()))
    }
}

impl RingElem {
    pub fn from_parts(ring: &Ring, num: Poly, den: u32) -> Self {
        assert_eq!(num.nvars(), ring.nvars(), "variable count mismatch for {}", ring.name());
        let mut num = ring.normalize_base(num);
        let mut den = den;
        if num.is_zero() {
            den = 0;
        }
        if let RingKind::Localized { base, denom } = &ring.kind {
            while den > 0 {
                match base.base_exact_div(&num, denom) {
                    Some(qq) => {
                        num = qq;
                        den -= 1;
                    }
                    None => break,
                }
            }
        } else {
            assert_eq!(den, 0, "denominators only exist in localized rings");
        }
        RingElem { ring: ring.clone(), num, den }
    }

    pub fn from_poly(ring: &Ring, p: Poly) -> Self {
        Self::from_parts(ring, p, 0)
    }

    pub fn zero(ring: &Ring) -> Self {
        RingElem { ring: ring.clone(), num: Poly::zero(ring.nvars()), den: 0 }
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, Rational::one())
    }

    pub fn constant(ring: &Ring, c: Rational) -> Self {
        Self::from_poly(ring, Poly::constant(ring.nvars(), c))
    }

    pub fn var(ring: &Ring, i: usize) -> Self {
        Self::from_poly(ring, Poly::var(ring.nvars(), i))
    }

    /// `c x^exp`. Over a localization at a monomial, negative exponents are
    /// written over a power of the denominator.
    pub fn monomial(ring: &Ring, exp: &[i64], c: Rational) -> Self {
        if let RingKind::Localized { denom, .. } = &ring.kind {
            if exp.iter().any(|&e| e < 0) && denom.len() == 1 {
                let (de, dc) = denom.leading().expect("nonzero denominator");
                let mut k = 0i64;
                for (e, d) in exp.iter().zip(de.iter()) {
                    if *e < 0 {
                        assert!(*d > 0, "exponent not invertible in {}", ring.name());
                        k = k.max((-e + d - 1) / d);
                    }
                }
                let shifted: Vec<i64> = exp.iter().zip(de.iter()).map(|(e, d)| e + k * d).collect();
                let scale = c / dc.pow(k as i32);
                return Self::from_parts(ring, Poly::monomial(ring.nvars(), shifted, scale), k as u32);
            }
        }
        Self::from_poly(ring, Poly::monomial(ring.nvars(), exp.to_vec(), c))
    }

    /// The localizing element's inverse power `1 / denom^k`.
    pub fn denom_inverse_pow(ring: &Ring, k: u32) -> Self {
        Self::from_parts(ring, Poly::one(ring.nvars()), k)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_power(&self) -> u32 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den == 0 && self.num == Poly::one(self.ring.nvars())
    }

    /// Constant value if the element is a scalar.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.den == 0 && self.num.is_constant() {
            Some(self.num.constant_term())
        } else {
            None
        }
    }

    fn denom_poly(&self) -> Option<&Poly> {
        match &self.ring.kind {
            RingKind::Localized { denom, .. } => Some(denom),
            _ => None,
        }
    }

    fn lift(&self, extra: u32) -> Poly {
        match self.denom_poly() {
            Some(f) if extra > 0 => self.num.mul(&f.pow(extra)),
            _ => self.num.clone(),
        }
    }

    pub fn checked_add(&self, other: &RingElem) -> Result<RingElem> {
        check_same(&self.ring, &other.ring)?;
        let m = self.den.max(other.den);
        let num = self.lift(m - self.den).add(&other.lift(m - other.den));
        Ok(RingElem::from_parts(&self.ring, num, m))
    }

    pub fn checked_mul(&self, other: &RingElem) -> Result<RingElem> {
        check_same(&self.ring, &other.ring)?;
        Ok(RingElem::from_parts(&self.ring, self.num.mul(&other.num), self.den + other.den))
    }

    pub fn add(&self, other: &RingElem) -> RingElem {
        self.checked_add(other).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn sub(&self, other: &RingElem) -> RingElem {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RingElem) -> RingElem {
        self.checked_mul(other).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn neg(&self) -> RingElem {
        RingElem { ring: self.ring.clone(), num: self.num.neg(), den: self.den }
    }

    pub fn scale(&self, c: &Rational) -> RingElem {
        if c.is_zero() {
            return RingElem::zero(&self.ring);
        }
        RingElem { ring: self.ring.clone(), num: self.num.scale(c), den: self.den }
    }

    pub fn pow(&self, k: u32) -> RingElem {
        let mut acc = RingElem::one(&self.ring);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Integer power; negative exponents require an invertible element.
    pub fn pow_signed(&self, k: i64) -> Result<RingElem> {
        if k >= 0 {
            Ok(self.pow(k as u32))
        } else {
            Ok(self.inverse()?.pow((-k) as u32))
        }
    }

    /// Applies basis derivation `i`.
    pub fn derive(&self, i: usize) -> RingElem {
        assert!(i < self.ring.dim(), "derivation index {i} out of range");
        let d_raw = |p: &Poly| -> RingElem {
            let comps = self.ring.derivation_components(i);
            let mut acc = RingElem::zero(&self.ring);
            for (j, c) in comps.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                acc = acc.add(&c.mul(&RingElem::from_poly(&self.ring, p.partial(j))));
            }
            acc
        };
        let dnum = d_raw(&self.num);
        if self.den == 0 {
            return dnum;
        }
        let f = self.denom_poly().expect("localized").clone();
        let df = d_raw(&f);
        let k = self.den;
        let num_elem = RingElem::from_poly(&self.ring, self.num.clone());
        dnum.mul(&RingElem::denom_inverse_pow(&self.ring, k)).sub(
            &num_elem
                .mul(&df)
                .mul(&RingElem::denom_inverse_pow(&self.ring, k + 1))
                .scale(&q(k as i64)),
        )
    }

    /// Iterated derivative `D_1^{k_1} ... D_n^{k_n}`.
    pub fn derive_multi(&self, k: &[u32]) -> RingElem {
        let mut cur = self.clone();
        for (i, &ki) in k.iter().enumerate() {
            for _ in 0..ki {
                cur = cur.derive(i);
            }
        }
        cur
    }

    pub fn inverse(&self) -> Result<RingElem> {
        let fail = || Error::NotInvertible(self.to_string());
        if self.is_zero() {
            return Err(fail());
        }
        match &self.ring.kind {
            RingKind::Poly | RingKind::Quotient { .. } => {
                let c = self.as_constant().ok_or_else(fail)?;
                Ok(RingElem::constant(&self.ring, c.recip()))
            }
            RingKind::Laurent => {
                if self.num.len() != 1 {
                    return Err(fail());
                }
                let (e, c) = self.num.leading().unwrap();
                let inv: Exponent = e.iter().map(|x| -x).collect();
                Ok(RingElem::monomial(&self.ring, &inv, c.recip()))
            }
            RingKind::Localized { base, denom } => {
                let bound = (self.num.total_degree() / denom.total_degree().max(1)) as u32 + 1;
                let mut fj = Poly::one(self.ring.nvars());
                for j in 0..=bound {
                    if let Some(qq) = base.base_exact_div(&self.num, &fj) {
                        let qe = RingElem::from_poly(base, qq);
                        if let Ok(qi) = qe.inverse() {
                            // (qq f^j / f^den)^-1 = qi f^den / f^j
                            let num = qi.num.mul(&denom.pow(self.den));
                            return Ok(RingElem::from_parts(&self.ring, num, j));
                        }
                    }
                    fj = fj.mul(denom);
                }
                // Divisors of a power of the denominator: f^j = num * h.
                let mut fj = Poly::one(self.ring.nvars());
                for j in 0..=bound + self.num.total_degree().max(0) as u32 {
                    if let Some(h) = base.base_exact_div(&base.normalize_base(fj.clone()), &self.num) {
                        let num = h.mul(&denom.pow(self.den));
                        return Ok(RingElem::from_parts(&self.ring, num, j));
                    }
                    fj = fj.mul(denom);
                }
                Err(fail())
            }
        }
    }

    /// Exact quotient `self / other` when it exists in the ring.
    pub fn try_div(&self, other: &RingElem) -> Option<RingElem> {
        if !same_ring(&self.ring, &other.ring) || other.is_zero() {
            return None;
        }
        if let Ok(inv) = other.inverse() {
            return Some(self.mul(&inv));
        }
        match &self.ring.kind {
            RingKind::Localized { base, .. } => {
                let a = self.lift(other.den);
                let qq = base.base_exact_div(&a, &other.num)?;
                Some(RingElem::from_parts(&self.ring, qq, self.den))
            }
            _ => {
                let qq = self.ring.base_exact_div(&self.num, &other.num)?;
                Some(RingElem::from_poly(&self.ring, qq))
            }
        }
    }

    /// Truncated Taylor expansion `sum_{|k| <= order} (1/k!) D^k f X^k`.
    pub fn taylor_shift(&self, order: u32) -> BTreeMap<Vec<u32>, RingElem> {
        let n = self.ring.dim();
        let mut derivs: BTreeMap<Vec<u32>, RingElem> = BTreeMap::new();
        derivs.insert(vec![0; n], self.clone());
        let mut out = BTreeMap::new();
        for k in multi_indices(n, order) {
            if k.iter().all(|&x| x == 0) {
                if !self.is_zero() {
                    out.insert(k, self.clone());
                }
                continue;
            }
            let i = k.iter().position(|&x| x > 0).unwrap();
            let mut prev = k.clone();
            prev[i] -= 1;
            let d = derivs[&prev].derive(i);
            if !d.is_zero() {
                out.insert(k.clone(), d.scale(&multi_factorial(&k).recip()));
            }
            derivs.insert(k, d);
        }
        out
    }

    /// Canonical image of a base-ring element in its localization.
    pub fn localize(&self, target: &Ring) -> Result<RingElem> {
        match &target.kind {
            RingKind::Localized { base, .. } if same_ring(base, &self.ring) => {
                Ok(RingElem::from_parts(target, self.num.clone(), 0))
            }
            _ => Err(Error::SpecMismatch(self.ring.name(), target.name())),
        }
    }

    /// Linear coordinates in a monomial basis, when the presentation is
    /// canonical (not for localizations at non-monomials or over quotients).
    pub fn coords(&self) -> Option<BTreeMap<Vec<i64>, Rational>> {
        match &self.ring.kind {
            RingKind::Localized { base, denom } => {
                if !matches!(base.kind, RingKind::Poly | RingKind::Laurent) || denom.len() != 1 {
                    return None;
                }
                let (fe, fc) = denom.leading().unwrap();
                let scale = crate::rational::pow_signed(fc, -(self.den as i64));
                let shift: Exponent = fe.iter().map(|x| -x * self.den as i64).collect();
                let p = self.num.mul_monomial(&shift, &scale);
                Some(p.into_terms())
            }
            _ => Some(self.num.terms().clone()),
        }
    }

    pub fn total_degree(&self) -> i64 {
        self.num.total_degree()
    }
}

impl PartialEq for RingElem {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.sub(other).is_zero()
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = self.ring.vars();
        let num = self.num.format(vars);
        if self.den == 0 {
            return write!(f, "{num}");
        }
        let d = self.denom_poly().unwrap();
        let ds = if d.len() == 1 { d.format(vars) } else { format!("({})", d.format(vars)) };
        let ns = if self.num.len() == 1 { num } else { format!("({num})") };
        if self.den == 1 {
            write!(f, "{ns}/{ds}")
        } else {
            write!(f, "{ns}/{ds}^{}", self.den)
        }
    }
}

/// Multi-indices in `n` variables with total degree at most `order`,
/// ordered by degree then lexicographically.
pub fn multi_indices(n: usize, order: u32) -> Vec<Vec<u32>> {
    exponents_upto(n, order as i64, false)
        .into_iter()
        .map(|e| e.into_iter().map(|x| x as u32).collect())
        .collect()
}

/// Checked product, the `SpecMismatch`-reporting form of [`RingElem::mul`].
pub fn ring_mul(a: &RingElem, b: &RingElem) -> Result<RingElem> {
    a.checked_mul(b)
}

/// Checked derivation; `i` must index a basis derivation of the ring.
pub fn derive(f: &RingElem, i: usize) -> Result<RingElem> {
    if i >= f.ring().dim() {
        return Err(Error::InvalidInput(format!("derivation index {i} out of range")));
    }
    Ok(f.derive(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    #[test]
    fn elliptic_relation() {
        let a = RingSpec::elliptic();
        let y = RingElem::var(&a, 1);
        let t = RingElem::var(&a, 0);
        assert_eq!(y.mul(&y), t.pow(3).sub(&t));
        assert_eq!(y.mul(&y).to_string(), "t^3 - t");
    }

    #[test]
    fn identity_and_expansion() {
        let r = RingSpec::poly(&["x"]);
        let x = RingElem::var(&r, 0);
        let one = RingElem::one(&r);
        assert_eq!(one.mul(&x), x);
        assert_eq!(x.add(&one).mul(&x.sub(&one)).to_string(), "x^2 - 1");
    }

    #[test]
    fn mismatch_is_reported() {
        let a = RingSpec::poly(&["x"]);
        let b = RingSpec::poly(&["y"]);
        let r = ring_mul(&RingElem::var(&a, 0), &RingElem::var(&b, 0));
        assert!(matches!(r, Err(Error::SpecMismatch(_, _))));
    }

    #[test]
    fn partials() {
        let r = RingSpec::poly(&["x", "y"]);
        let x = RingElem::var(&r, 0);
        let y = RingElem::var(&r, 1);
        assert_eq!(x.pow(3).derive(0), x.pow(2).scale(&q(3)));
        assert_eq!(x.pow(2).mul(&y).derive(0), x.mul(&y).scale(&q(2)));
        let l = RingSpec::laurent(&["y"]);
        let yi = RingElem::monomial(&l, &[-2], q(1));
        assert_eq!(yi.derive(0), RingElem::monomial(&l, &[-3], q(-2)));
        assert!(derive(&x, 2).is_err());
    }

    #[test]
    fn tau_on_elliptic() {
        let a = RingSpec::elliptic();
        let t = RingElem::var(&a, 0);
        let y = RingElem::var(&a, 1);
        assert_eq!(t.derive(0), y.scale(&q(2)));
        assert_eq!(y.derive(0), t.pow(2).scale(&q(3)).sub(&RingElem::one(&a)));
    }

    #[test]
    fn taylor_examples() {
        let r = RingSpec::poly(&["x"]);
        let x = RingElem::var(&r, 0);
        let ts = x.pow(2).taylor_shift(2);
        assert_eq!(ts[&vec![0]], x.pow(2));
        assert_eq!(ts[&vec![1]], x.scale(&q(2)));
        assert_eq!(ts[&vec![2]], RingElem::one(&r));
        assert_eq!(x.pow(2).taylor_shift(0).len(), 1);

        let l = RingSpec::laurent(&["y"]);
        let yi = RingElem::monomial(&l, &[-1], q(1));
        let ts = yi.taylor_shift(2);
        assert_eq!(ts[&vec![1]], RingElem::monomial(&l, &[-2], q(-1)));
        assert_eq!(ts[&vec![2]], RingElem::monomial(&l, &[-3], q(1)));
    }

    #[test]
    fn localization() {
        let r = RingSpec::poly(&["x"]);
        let rx = RingSpec::localized(&r, Poly::var(1, 0), None).unwrap();
        let x = RingElem::var(&r, 0).localize(&rx).unwrap();
        assert_eq!(x.to_string(), "x");
        let xinv = RingElem::denom_inverse_pow(&rx, 1);
        assert!(xinv.mul(&x).is_one());
        assert_eq!(x.inverse().unwrap(), xinv);
        // (1/x) d/dx (x^2) = 2
        assert_eq!(xinv.mul(&x.pow(2).derive(0)), RingElem::constant(&rx, q(2)));

        let a = RingSpec::elliptic();
        let ay = RingSpec::localized(&a, Poly::var(2, 1), None).unwrap();
        let t = RingElem::var(&ay, 0);
        let y = RingElem::var(&ay, 1);
        let g = t.pow(2).sub(&RingElem::one(&ay)).mul(&RingElem::denom_inverse_pow(&ay, 1));
        assert_eq!(g.to_string(), "(t^2 - 1)/y");
        assert_eq!(g.mul(&y), t.pow(2).sub(&RingElem::one(&ay)));
        // y(t^2 - 1)/(t^3 - t) is the same element
        let alt = y.mul(&t.pow(2).sub(&RingElem::one(&ay)));
        let den = t.pow(3).sub(&t);
        assert_eq!(alt.try_div(&den).unwrap(), g);
        // t/y reduces nothing, y/y reduces to 1
        assert!(RingElem::from_parts(&ay, Poly::var(2, 1), 1).is_one());
        let _ = qf(1, 2);
    }

    #[test]
    fn quotient_rejects_bad_derivation() {
        let t = Poly::var(2, 0);
        let tail = t.pow(3).sub(&t);
        let bad = vec![Poly::one(2), Poly::zero(2)];
        assert!(RingSpec::quotient(&["t", "y"], 1, 2, tail, vec![bad]).is_err());
    }
}
