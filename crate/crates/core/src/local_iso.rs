//! The truncated isomorphism between the smash product `A # U(V)` and
//! `D (x) U(L^s)` on a coordinate chart, its inverse on generators, and
//! the resulting jet action on modules.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::jets::{generators, JetGen, JetPoly};
use crate::modules::{AvModule, ModElem};
use crate::rational::{multi_binomial, q, Rational};
use crate::ring::{check_same, Ring, RingElem};
use crate::weyl::{DiffOp, VecField};

/// One factor of a smash word.
#[derive(Clone, Debug)]
pub enum Factor {
    Fn(RingElem),
    Field(VecField),
}

/// A formal product `lead # f_1 f_2 ... f_k`; evaluation acts with the
/// rightmost factor first.
#[derive(Clone, Debug)]
pub struct SmashWord {
    lead: RingElem,
    factors: Vec<Factor>,
}

/// A generator of `D (x) U(L^s)`.
#[derive(Clone, Debug)]
pub enum IsoGen {
    /// `g (x) 1`
    Function(RingElem),
    /// `g d_i (x) 1`
    Field(RingElem, usize),
    /// `1 (x) X^p d_i`
    Jet(JetGen),
}

impl fmt::Display for IsoGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoGen::Function(g) => write!(f, "({g}) (x) 1"),
            IsoGen::Field(g, i) => write!(f, "{} (x) 1", VecField::basis(g, *i)),
            IsoGen::Jet(j) => write!(f, "1 (x) {j}"),
        }
    }
}

impl SmashWord {
    pub fn new(lead: RingElem, factors: Vec<Factor>) -> Result<Self> {
        for x in &factors {
            match x {
                Factor::Fn(g) => check_same(lead.ring(), g.ring())?,
                Factor::Field(v) => check_same(lead.ring(), v.ring())?,
            }
        }
        Ok(SmashWord { lead, factors })
    }

    /// `g # 1`
    pub fn function(g: &RingElem) -> Self {
        SmashWord { lead: g.clone(), factors: Vec::new() }
    }

    /// `g # eta`
    pub fn field(g: &RingElem, v: &VecField) -> Self {
        SmashWord { lead: g.clone(), factors: vec![Factor::Field(v.clone())] }
    }

    pub fn ring(&self) -> &Ring {
        self.lead.ring()
    }

    pub fn lead(&self) -> &RingElem {
        &self.lead
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Concatenation.
    pub fn mul(&self, o: &SmashWord) -> Result<SmashWord> {
        check_same(self.ring(), o.ring())?;
        let mut factors = self.factors.clone();
        factors.push(Factor::Fn(o.lead.clone()));
        factors.extend(o.factors.iter().cloned());
        Ok(SmashWord { lead: self.lead.clone(), factors })
    }

    pub fn scale(&self, c: &Rational) -> SmashWord {
        SmashWord { lead: self.lead.scale(c), factors: self.factors.clone() }
    }

    /// Rewrites the word as `sum g # eta_1 ... eta_k` using
    /// `eta g = eta(g) + g eta`.
    pub fn normalize(&self) -> Result<Vec<(RingElem, Vec<VecField>)>> {
        let mut terms: Vec<(RingElem, Vec<VecField>)> = vec![(self.lead.clone(), Vec::new())];
        for x in &self.factors {
            match x {
                Factor::Field(v) => {
                    for t in terms.iter_mut() {
                        t.1.push(v.clone());
                    }
                }
                Factor::Fn(h) => {
                    let mut next = Vec::new();
                    for (g, fields) in terms {
                        for (c, fs) in move_left(&fields, h)? {
                            if !c.is_zero() {
                                next.push((g.mul(&c), fs));
                            }
                        }
                    }
                    terms = next;
                }
            }
        }
        Ok(terms)
    }

    /// Action on a module element.
    pub fn eval(&self, m: &dyn AvModule, x: &ModElem) -> Result<ModElem> {
        let mut cur = x.clone();
        for f in self.factors.iter().rev() {
            cur = match f {
                Factor::Fn(g) => m.act_ring(g, &cur)?,
                Factor::Field(v) => m.act_field(v, &cur)?,
            };
        }
        m.act_ring(&self.lead, &cur)
    }

    /// A word with `len` factors, each a monomial function or monomial
    /// field of degree at most `degree` with a small integer coefficient.
    pub fn random<R: Rng>(ring: &Ring, rng: &mut R, len: usize, degree: u32) -> SmashWord {
        let monos = ring.monomials(degree);
        let pick = |rng: &mut R| {
            let c = q(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
            monos[rng.gen_range(0..monos.len())].scale(&c)
        };
        let lead = pick(rng);
        let factors = (0..len)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    Factor::Fn(pick(rng))
                } else {
                    let i = rng.gen_range(0..ring.dim());
                    Factor::Field(VecField::basis(&pick(rng), i))
                }
            })
            .collect();
        SmashWord { lead, factors }
    }
}

impl fmt::Display for SmashWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) #", self.lead)?;
        if self.factors.is_empty() {
            return write!(f, " 1");
        }
        for x in &self.factors {
            match x {
                Factor::Fn(g) => write!(f, " [{g}]")?,
                Factor::Field(v) => write!(f, " [{v}]")?,
            }
        }
        Ok(())
    }
}

/// `eta_1 ... eta_k h` as `sum c # eta_{j_1} ... eta_{j_r}`.
fn move_left(fields: &[VecField], h: &RingElem) -> Result<Vec<(RingElem, Vec<VecField>)>> {
    let Some((last, prefix)) = fields.split_last() else {
        return Ok(vec![(h.clone(), Vec::new())]);
    };
    let mut out = move_left(prefix, &last.apply(h)?)?;
    for (c, mut fs) in move_left(prefix, h)? {
        fs.push(last.clone());
        out.push((c, fs));
    }
    Ok(out)
}

/// `phi(g # 1) = g (x) 1`.
pub fn phi_function(g: &RingElem, s: u32) -> JetPoly<DiffOp> {
    JetPoly::scalar(g.ring().dim(), s, DiffOp::from_elem(g))
}

/// `phi(1 # f d_i) = f d_i (x) 1 + sum_{k != 0} (1/k!) D^k f (x) X^k d_i`.
pub fn phi_field(v: &VecField, s: u32) -> JetPoly<DiffOp> {
    let ring = v.ring();
    let n = ring.dim();
    let mut out = JetPoly::scalar(n, s, DiffOp::from_field(v));
    for (i, f) in v.comps().iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        for (k, c) in f.taylor_shift(s + 1) {
            if k.iter().all(|&x| x == 0) {
                continue;
            }
            let g = JetGen::new(k, i).expect("valid jet generator");
            out = out.add(&JetPoly::gen(n, s, &g, DiffOp::from_elem(&c))).expect("same truncation");
        }
    }
    out
}

/// Image of a smash word at truncation `s`.
pub fn phi(w: &SmashWord, s: u32) -> Result<JetPoly<DiffOp>> {
    let n = w.ring().dim();
    let mut out = JetPoly::zero(n, s);
    for (g, fields) in w.normalize()? {
        let mut t = phi_function(&g, s);
        for v in &fields {
            t = t.pbw_mul(&phi_field(v, s))?;
        }
        out = out.add(&t)?;
    }
    Ok(out)
}

/// Image of a sum of smash words.
pub fn phi_sum(ws: &[SmashWord], s: u32, ring: &Ring) -> Result<JetPoly<DiffOp>> {
    let mut out = JetPoly::zero(ring.dim(), s);
    for w in ws {
        check_same(ring, w.ring())?;
        out = out.add(&phi(w, s)?)?;
    }
    Ok(out)
}

/// Inverse image of a generator, as a sum of smash words:
/// `psi(1 (x) X^p d_i) = sum_{k<=p} (-1)^{|p-k|} C(p,k) x^{p-k} # x^k d_i`.
pub fn psi(e: &IsoGen, ring: &Ring) -> Result<Vec<SmashWord>> {
    match e {
        IsoGen::Function(g) => {
            check_same(ring, g.ring())?;
            Ok(vec![SmashWord::function(g)])
        }
        IsoGen::Field(g, i) => {
            check_same(ring, g.ring())?;
            if *i >= ring.dim() {
                return Err(Error::InvalidInput(format!("no derivation {i}")));
            }
            Ok(vec![SmashWord::field(g, &VecField::basis(&RingElem::one(ring), *i))])
        }
        IsoGen::Jet(j) => {
            if !ring.is_coordinate() {
                return Err(Error::NotCoordinateChart(ring.name()));
            }
            if j.n() != ring.dim() {
                return Err(Error::InvalidInput(format!("jet in dimension {} on {}", j.n(), ring.name())));
            }
            let p = j.exp();
            let total: u32 = p.iter().sum();
            let mut out = Vec::new();
            for k in crate::weyl::sub_indices(p) {
                let sign = if (total - k.iter().sum::<u32>()) % 2 == 0 { q(1) } else { q(-1) };
                let c = multi_binomial(p, &k) * sign;
                let xk: Vec<i64> = k.iter().map(|&x| x as i64).collect();
                let xpk: Vec<i64> = p.iter().zip(&k).map(|(a, b)| (a - b) as i64).collect();
                let v = VecField::basis(&RingElem::monomial(ring, &xk, q(1)), j.dir());
                out.push(SmashWord::field(&RingElem::monomial(ring, &xpk, c), &v));
            }
            Ok(out)
        }
    }
}

/// `phi(psi(e))` compared with `e` itself.
pub fn round_trip(e: &IsoGen, ring: &Ring, s: u32) -> Result<bool> {
    let back = phi_sum(&psi(e, ring)?, s, ring)?;
    let n = ring.dim();
    let direct = match e {
        IsoGen::Function(g) => phi_function(g, s),
        IsoGen::Field(g, i) => JetPoly::scalar(n, s, DiffOp::from_field(&VecField::basis(g, *i))),
        IsoGen::Jet(j) => JetPoly::gen(n, s, j, DiffOp::one(ring)),
    };
    Ok(back.sub(&direct)?.is_zero())
}

/// Generators with monomial coefficients of degree at most `degree` and
/// jets of degree at most `s`.
pub fn iso_generators(ring: &Ring, s: u32, degree: u32) -> Vec<IsoGen> {
    let mut out = Vec::new();
    for g in ring.monomials(degree) {
        out.push(IsoGen::Function(g.clone()));
        for i in 0..ring.dim() {
            out.push(IsoGen::Field(g.clone(), i));
        }
    }
    out.extend(generators(ring.dim(), s).into_iter().map(IsoGen::Jet));
    out
}

/// Action of `X^p d_i` on a module element through `psi`.
pub fn jet_act(m: &dyn AvModule, g: &JetGen, x: &ModElem) -> Result<ModElem> {
    let mut acc: Option<ModElem> = None;
    for w in psi(&IsoGen::Jet(g.clone()), m.ring())? {
        let t = w.eval(m, x)?;
        acc = Some(match acc {
            None => t,
            Some(a) => a.add(&t),
        });
    }
    Ok(acc.expect("nonempty expansion"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingSpec;

    #[test]
    fn phi_of_quadratic_field() {
        let r = RingSpec::poly(&["x"]);
        let v = VecField::basis(&RingElem::monomial(&r, &[2], q(1)), 0);
        let p = phi(&SmashWord::field(&RingElem::one(&r), &v), 2).unwrap();
        let x = RingElem::var(&r, 0);
        let mut want = JetPoly::scalar(1, 2, DiffOp::from_field(&v));
        want = want.add(&JetPoly::gen(1, 2, &JetGen::new(vec![1], 0).unwrap(), DiffOp::from_elem(&x.scale(&q(2))))).unwrap();
        want = want.add(&JetPoly::gen(1, 2, &JetGen::new(vec![2], 0).unwrap(), DiffOp::one(&r))).unwrap();
        assert!(p.sub(&want).unwrap().is_zero(), "{p}");
        let d = phi(&SmashWord::field(&RingElem::one(&r), &VecField::basis(&RingElem::one(&r), 0)), 2).unwrap();
        assert_eq!(d.terms().len(), 1);
    }

    #[test]
    fn psi_expansions() {
        let r = RingSpec::poly(&["x"]);
        let w = psi(&IsoGen::Jet(JetGen::new(vec![2], 0).unwrap()), &r).unwrap();
        let text: Vec<String> = w.iter().map(|w| w.to_string()).collect();
        assert_eq!(text, vec!["(x^2) # [dx]", "(-2*x) # [x*dx]", "(1) # [x^2*dx]"]);
    }

    #[test]
    fn smash_relation_in_normal_form() {
        let r = RingSpec::poly(&["x"]);
        let x = RingElem::var(&r, 0);
        let d = VecField::basis(&RingElem::one(&r), 0);
        let w = SmashWord::new(RingElem::one(&r), vec![Factor::Field(d), Factor::Fn(x.pow(3))]).unwrap();
        let nf = w.normalize().unwrap();
        assert_eq!(nf.len(), 2);
        assert_eq!(nf[0].0, x.pow(2).scale(&q(3)));
        assert!(nf[0].1.is_empty());
        assert_eq!(nf[1].0, x.pow(3));
    }
}
