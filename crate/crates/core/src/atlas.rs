//! Two-chart atlases and transformation laws between their charts.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gl::{Rep, RepExpr};
use crate::jets::{generators, jet_bracket, JetGen, JetPoly};
use crate::linalg::RingMatrix;
use crate::modules::{charged_twist, AvModule, FreeModule, ModElem};
use crate::poly::Poly;
use crate::rational::{fmt_rational, is_integer, parse_rational, q, to_i64, Rational};
use crate::ring::{check_same, Ring, RingElem, RingKind, RingSpec};
use crate::weyl::{DiffOp, VecField};

/// A ring map given by the images of the ambient variables.
#[derive(Clone, Debug)]
pub struct RingHom {
    from: Ring,
    to: Ring,
    images: Vec<RingElem>,
}

impl RingHom {
    pub fn new(from: &Ring, to: &Ring, images: Vec<RingElem>) -> Result<Self> {
        if images.len() != from.nvars() {
            return Err(Error::InvalidInput(format!("{} images for {} variables", images.len(), from.nvars())));
        }
        for x in &images {
            check_same(to, x.ring())?;
        }
        Ok(RingHom { from: from.clone(), to: to.clone(), images })
    }

    pub fn source(&self) -> &Ring {
        &self.from
    }

    pub fn target(&self) -> &Ring {
        &self.to
    }

    pub fn images(&self) -> &[RingElem] {
        &self.images
    }

    fn eval_poly(&self, p: &Poly) -> Result<RingElem> {
        let mut acc = RingElem::zero(&self.to);
        for (e, c) in p.terms() {
            let mut t = RingElem::constant(&self.to, c.clone());
            for (x, &k) in self.images.iter().zip(e.iter()) {
                if k != 0 {
                    t = t.mul(&x.pow_signed(k)?);
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    pub fn apply(&self, f: &RingElem) -> Result<RingElem> {
        check_same(&self.from, f.ring())?;
        let num = self.eval_poly(f.numerator())?;
        let k = f.denominator_power();
        if k == 0 {
            return Ok(num);
        }
        let RingKind::Localized { denom, .. } = self.from.kind() else {
            unreachable!("denominators only occur in localizations")
        };
        Ok(num.mul(&self.eval_poly(denom)?.inverse()?.pow(k)))
    }

    pub fn then(&self, o: &RingHom) -> Result<RingHom> {
        check_same(&self.to, &o.from)?;
        let images = self.images.iter().map(|x| o.apply(x)).collect::<Result<Vec<_>>>()?;
        RingHom::new(&self.from, &o.to, images)
    }

    pub fn is_identity(&self) -> bool {
        (0..self.from.nvars()).all(|i| {
            let mut e = vec![0; self.from.nvars()];
            e[i] = 1;
            self.images[i] == RingElem::from_poly(&self.to, Poly::monomial(self.from.nvars(), e, q(1)))
        })
    }
}

#[derive(Clone, Debug)]
pub struct Chart {
    pub name: String,
    pub ring: Ring,
    /// The chart ring restricted to the overlap.
    pub overlap: Ring,
    /// Uniformizing parameters as functions on the overlap.
    pub coords: Vec<RingElem>,
    pub restrict: RingHom,
}

impl Chart {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

#[derive(Clone, Debug)]
pub struct Atlas {
    name: String,
    charts: Vec<Chart>,
    /// `transitions[(a, b)]` maps functions on the overlap written in chart
    /// `a` to the same functions written in chart `b`.
    transitions: BTreeMap<(usize, usize), RingHom>,
}

impl Atlas {
    /// Checks that the transitions are mutually inverse.
    pub fn new(name: &str, charts: Vec<Chart>, transitions: BTreeMap<(usize, usize), RingHom>) -> Result<Self> {
        for (&(a, b), h) in &transitions {
            check_same(h.source(), &charts[a].overlap)?;
            check_same(h.target(), &charts[b].overlap)?;
            let back = transitions.get(&(b, a)).ok_or(Error::NoOverlap(b, a))?;
            if !h.then(back)?.is_identity() {
                return Err(Error::InvalidInput(format!("transitions {a} -> {b} -> {a} do not compose to the identity")));
            }
            if charts[a].dim() != charts[b].dim() {
                return Err(Error::InvalidInput("charts of different dimension".into()));
            }
        }
        Ok(Atlas { name: name.to_string(), charts, transitions })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart(&self, i: usize) -> &Chart {
        &self.charts[i]
    }

    pub fn dim(&self) -> usize {
        self.charts[0].dim()
    }

    pub fn transition(&self, from: usize, to: usize) -> Result<&RingHom> {
        self.transitions.get(&(from, to)).ok_or(Error::NoOverlap(from, to))
    }

    /// A function on chart `from` (or its overlap) written on the overlap in chart `to`.
    pub fn transform_function(&self, from: usize, to: usize, f: &RingElem) -> Result<RingElem> {
        let t = self.transition(from, to)?;
        let c = &self.charts[from];
        if crate::ring::same_ring(f.ring(), &c.ring) && !crate::ring::same_ring(&c.ring, &c.overlap) {
            return t.apply(&c.restrict.apply(f)?);
        }
        t.apply(f)
    }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    if n == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }
}

fn var_images(ring: &Ring) -> Vec<RingElem> {
    (0..ring.nvars()).map(|i| RingElem::var(ring, i)).collect()
}

fn monomial_poly(n: usize, e: &[i64]) -> Poly {
    Poly::monomial(n, e.to_vec(), q(1))
}

/// Affine chart of projective space `P^n` where the first homogeneous
/// coordinate is nonzero, paired with the chart where the second one is.
fn projective(n: usize) -> Result<Atlas> {
    let xs = names("x", n);
    let ys = names("y", n);
    let xr: Vec<&str> = xs.iter().map(|s| s.as_str()).collect();
    let yr: Vec<&str> = ys.iter().map(|s| s.as_str()).collect();
    let a = RingSpec::poly(&xr);
    let b = RingSpec::poly(&yr);
    let mut e1 = vec![0; n];
    e1[0] = 1;
    let oa = RingSpec::localized(&a, monomial_poly(n, &e1), None)?;
    let ob = RingSpec::localized(&b, monomial_poly(n, &e1), None)?;
    let chart = |name: &str, r: &Ring, o: &Ring| -> Result<Chart> {
        let coords = var_images(o);
        Ok(Chart {
            name: name.into(),
            ring: r.clone(),
            overlap: o.clone(),
            restrict: RingHom::new(r, o, coords.clone())?,
            coords,
        })
    };
    // y1 = 1/x1, y_k = x_k/x1 and symmetrically.
    let swap = |src: &Ring, dst: &Ring| -> Result<RingHom> {
        let inv = RingElem::var(dst, 0).inverse()?;
        let mut images = vec![inv.clone()];
        for k in 1..n {
            images.push(RingElem::var(dst, k).mul(&inv));
        }
        RingHom::new(src, dst, images)
    };
    let mut tr = BTreeMap::new();
    tr.insert((0, 1), swap(&oa, &ob)?);
    tr.insert((1, 0), swap(&ob, &oa)?);
    let name = if n == 1 { "p1".to_string() } else { format!("p{n}") };
    Atlas::new(&name, vec![chart(&xs.join(","), &a, &oa)?, chart(&ys.join(","), &b, &ob)?], tr)
}

/// `G_m` with parameters `t` and `s = 1/t`.
fn gm() -> Result<Atlas> {
    let a = RingSpec::laurent(&["t"]);
    let b = RingSpec::laurent(&["s"]);
    let chart = |name: &str, r: &Ring| -> Result<Chart> {
        Ok(Chart {
            name: name.into(),
            ring: r.clone(),
            overlap: r.clone(),
            coords: var_images(r),
            restrict: RingHom::new(r, r, var_images(r))?,
        })
    };
    let mut tr = BTreeMap::new();
    tr.insert((0, 1), RingHom::new(&a, &b, vec![RingElem::monomial(&b, &[-1], q(1))])?);
    tr.insert((1, 0), RingHom::new(&b, &a, vec![RingElem::monomial(&a, &[-1], q(1))])?);
    Atlas::new("gm", vec![chart("t", &a)?, chart("s", &b)?], tr)
}

/// The circle `x^2 + y^2 = 1` covered by `{y != 0}` with parameter `x` and
/// `{x != 0}` with parameter `y`.
pub fn circle_base() -> Ring {
    let x = Poly::var(2, 0);
    let tail = Poly::one(2).sub(&x.pow(2));
    let rotation = vec![Poly::var(2, 1), x.scale(&q(-1))];
    RingSpec::quotient(&["x", "y"], 1, 2, tail, vec![rotation]).expect("circle")
}

fn circle() -> Result<Atlas> {
    let base = circle_base();
    let x = Poly::var(2, 0);
    let y = Poly::var(2, 1);
    let xy = x.mul(&y);
    // d/dx = (1, -x/y), d/dy = (-y/x, 1)
    let dx_a = vec![(y.clone(), 1), (x.scale(&q(-1)), 1)];
    let dy_b = vec![(y.scale(&q(-1)), 1), (x.clone(), 1)];
    let a = RingSpec::localized(&base, y.clone(), Some(vec![dx_a]))?;
    let b = RingSpec::localized(&base, x.clone(), Some(vec![dy_b]))?;
    let dx_o = vec![(xy.clone(), 1), (x.pow(2).scale(&q(-1)), 1)];
    let dy_o = vec![(y.pow(2).scale(&q(-1)), 1), (xy.clone(), 1)];
    let oa = RingSpec::localized(&base, xy.clone(), Some(vec![dx_o]))?;
    let ob = RingSpec::localized(&base, xy, Some(vec![dy_o]))?;
    let chart = |name: &str, r: &Ring, o: &Ring, coord: usize| -> Result<Chart> {
        Ok(Chart {
            name: name.into(),
            ring: r.clone(),
            overlap: o.clone(),
            coords: vec![RingElem::var(o, coord)],
            restrict: RingHom::new(r, o, var_images(o))?,
        })
    };
    let mut tr = BTreeMap::new();
    tr.insert((0, 1), RingHom::new(&oa, &ob, var_images(&ob))?);
    tr.insert((1, 0), RingHom::new(&ob, &oa, var_images(&oa))?);
    Atlas::new("circle", vec![chart("x", &a, &oa, 0)?, chart("y", &b, &ob, 1)?], tr)
}

fn elliptic_affine() -> Result<Atlas> {
    let a = RingSpec::elliptic();
    let chart = Chart {
        name: "t".into(),
        ring: a.clone(),
        overlap: a.clone(),
        coords: vec![RingElem::var(&a, 0)],
        restrict: RingHom::new(&a, &a, var_images(&a))?,
    };
    Atlas::new("elliptic-affine", vec![chart], BTreeMap::new())
}

pub const ATLAS_NAMES: [&str; 5] = ["p1", "gm", "circle", "elliptic-affine", "p2"];

/// Built-in atlases: `p1`, `gm`, `circle`, `elliptic-affine` and `p2`.
pub fn atlas(name: &str) -> Result<Atlas> {
    match name {
        "p1" => projective(1),
        "p2" => projective(2),
        "gm" => gm(),
        "circle" => circle(),
        "elliptic-affine" => elliptic_affine(),
        _ => Err(Error::InvalidInput(format!("unknown atlas '{name}'"))),
    }
}

/// `d x_i / d y_j` on the overlap, written in chart `to` (`x` are the
/// parameters of `from`, `y` those of `to`).
pub fn jacobian(a: &Atlas, from: usize, to: usize) -> Result<RingMatrix> {
    let t = a.transition(from, to)?;
    let o = &a.chart(to).overlap;
    let n = a.dim();
    let mut m = RingMatrix::zeros(o, n);
    for (i, c) in a.chart(from).coords.iter().enumerate() {
        let xi = t.apply(c)?;
        for j in 0..n {
            m.set(i, j, xi.derive(j));
        }
    }
    Ok(m)
}

/// Gluing data for sections, operators, modules or jets.
#[derive(Clone, Debug)]
pub enum TransitionRule {
    SectionOnly,
    TensorRep(Rep),
    DetPower(Rational),
    Charged(Rational),
    Jet(u32),
}

impl TransitionRule {
    pub fn tensor(rep: Rep) -> Result<Self> {
        if !rep.is_integrable() {
            return Err(Error::NotIntegrable(rep.to_string()));
        }
        Ok(TransitionRule::TensorRep(rep))
    }

    pub fn det_power(lambda: &Rational) -> Result<Self> {
        if !is_integer(lambda) {
            return Err(Error::NotIntegrable(format!("det^{}", fmt_rational(lambda))));
        }
        Ok(TransitionRule::DetPower(lambda.clone()))
    }

    /// `section`, `rep:<expr>`, `det:<lambda>`, `charged:<lambda>` or `jet:<s>`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "section" {
            return Ok(TransitionRule::SectionOnly);
        }
        let Some((kind, arg)) = text.split_once(':') else {
            return Err(Error::Parse { pos: 0, msg: format!("unknown rule '{text}'") });
        };
        let off = kind.len() + 1;
        let number = |s: &str| {
            parse_rational(s.trim()).ok_or(Error::Parse { pos: off, msg: format!("invalid rational '{s}'") })
        };
        match kind {
            "rep" => Self::tensor(Rep::parse(arg).map_err(|e| match e {
                Error::Parse { pos, msg } => Error::Parse { pos: pos + off, msg },
                other => other,
            })?),
            "det" => Self::det_power(&number(arg)?),
            "charged" => Ok(TransitionRule::Charged(number(arg)?)),
            "jet" => {
                let s = number(arg)?;
                let s = to_i64(&s).filter(|v| *v >= 0).ok_or(Error::Parse { pos: off, msg: "expected s >= 0".into() })?;
                Ok(TransitionRule::Jet(s as u32))
            }
            _ => Err(Error::Parse { pos: 0, msg: format!("unknown rule '{kind}'") }),
        }
    }
}

impl fmt::Display for TransitionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransitionRule::SectionOnly => write!(f, "section"),
            TransitionRule::TensorRep(r) => write!(f, "rep:{r}"),
            TransitionRule::DetPower(l) => write!(f, "det:{}", fmt_rational(l)),
            TransitionRule::Charged(l) => write!(f, "charged:{}", fmt_rational(l)),
            TransitionRule::Jet(s) => write!(f, "jet:{s}"),
        }
    }
}

fn rule_matrix(a: &Atlas, from: usize, to: usize, rule: &TransitionRule) -> Result<RingMatrix> {
    let o = &a.chart(to).overlap;
    match rule {
        TransitionRule::SectionOnly => Ok(RingMatrix::identity(o, 1)),
        TransitionRule::TensorRep(r) => r.rho_tilde(&gluing_matrix(a, from, to)?),
        TransitionRule::DetPower(l) => {
            crate::gl::rho_tilde(&RepExpr::Det(l.clone(), a.dim()), &gluing_matrix(a, from, to)?)
        }
        TransitionRule::Charged(_) | TransitionRule::Jet(_) => {
            Err(Error::InvalidInput(format!("rule {rule} does not act on sections")))
        }
    }
}

/// The matrix fed to `rho~`: entry `(j, i)` is `d x_i / d y_j`. With
/// `X_j d_i -> E_ji` the natural module transforms like 1-forms.
pub fn gluing_matrix(a: &Atlas, from: usize, to: usize) -> Result<RingMatrix> {
    Ok(jacobian(a, from, to)?.transpose())
}

/// `g w -> g rho~(phi) w` with `phi` from [`gluing_matrix`], components in
/// the fiber basis.
pub fn transform_section(
    a: &Atlas,
    from: usize,
    to: usize,
    rule: &TransitionRule,
    comps: &[RingElem],
) -> Result<Vec<RingElem>> {
    let m = rule_matrix(a, from, to, rule)?;
    if m.size() != comps.len() {
        return Err(Error::InvalidInput(format!("{} components for a rank {} rule", comps.len(), m.size())));
    }
    let g = comps.iter().map(|c| a.transform_function(from, to, c)).collect::<Result<Vec<_>>>()?;
    Ok(m.apply(&g))
}

/// `d y_j / d x_i` on the overlap, written in chart `from`.
fn inverse_partials(a: &Atlas, from: usize, to: usize) -> Result<Vec<Vec<RingElem>>> {
    let back = a.transition(to, from)?;
    let ys = a.chart(to).coords.iter().map(|c| back.apply(c)).collect::<Result<Vec<_>>>()?;
    Ok((0..a.dim()).map(|i| ys.iter().map(|y| y.derive(i)).collect()).collect())
}

/// Transforms an operator of order at most one under the `lambda`-charged law
/// `f d_{x_i} -> sum_j f (dy_j/dx_i) d_{y_j} + lambda f sum_{j,k} (d^2 y_j / dx_k dx_i) (dx_k / dy_j)`.
pub fn transform_operator_charged(
    a: &Atlas,
    from: usize,
    to: usize,
    lambda: &Rational,
    op: &DiffOp,
) -> Result<DiffOp> {
    if op.order() > 1 {
        return Err(Error::InvalidInput(format!("operator of order {} is not a charged field", op.order())));
    }
    let t = a.transition(from, to)?;
    let o = a.chart(to).overlap.clone();
    let n = a.dim();
    let dy = inverse_partials(a, from, to)?;
    let jac = jacobian(a, from, to)?;
    let mut out = DiffOp::zero(&o);
    for (b, f) in op.terms() {
        let Some(i) = b.iter().position(|&x| x == 1) else {
            out = out.add(&DiffOp::from_elem(&a.transform_function(from, to, f)?));
            continue;
        };
        let fy = a.transform_function(from, to, f)?;
        for (j, dyj) in dy[i].iter().enumerate() {
            let c = fy.mul(&t.apply(dyj)?);
            out = out.add(&DiffOp::d(&o, j).lmul(&c));
        }
        if !num_traits::Zero::is_zero(lambda) {
            let mut corr = RingElem::zero(&o);
            for j in 0..n {
                for k in 0..n {
                    let second = t.apply(&dy[i][j].derive(k))?;
                    corr = corr.add(&second.mul(jac.get(k, j)));
                }
            }
            out = out.add(&DiffOp::from_elem(&corr.mul(&fy).scale(lambda)));
        }
    }
    Ok(out)
}

/// Plain pushforward of a vector field to chart `to`.
pub fn push_field(a: &Atlas, from: usize, to: usize, v: &VecField) -> Result<VecField> {
    let op = transform_operator_charged(a, from, to, &q(0), &DiffOp::from_field(v))?;
    op.as_field().ok_or_else(|| Error::InvalidInput("pushforward is not a vector field".into()))
}

/// An element `sum c_g g` of `O (x) L^s` with coefficients constant in the
/// jet variables.
#[derive(Clone, Debug, PartialEq)]
pub struct JetField {
    ring: Ring,
    n: usize,
    terms: BTreeMap<JetGen, RingElem>,
}

impl JetField {
    pub fn zero(ring: &Ring, n: usize) -> Self {
        JetField { ring: ring.clone(), n, terms: BTreeMap::new() }
    }

    pub fn gen(ring: &Ring, g: &JetGen, c: RingElem) -> Self {
        let mut out = Self::zero(ring, g.n());
        out.push(g.clone(), c);
        out
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<JetGen, RingElem> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn push(&mut self, g: JetGen, c: RingElem) {
        if c.is_zero() {
            return;
        }
        let next = match self.terms.remove(&g) {
            Some(x) => x.add(&c),
            None => c,
        };
        if !next.is_zero() {
            self.terms.insert(g, next);
        }
    }

    pub fn add(&self, o: &JetField) -> JetField {
        let mut out = self.clone();
        for (g, c) in &o.terms {
            out.push(g.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &JetField) -> JetField {
        let mut out = self.clone();
        for (g, c) in &o.terms {
            out.push(g.clone(), c.scale(&q(-1)));
        }
        out
    }

    /// Bracket in `L^s`, dropping generators of degree above `s`.
    pub fn bracket(&self, o: &JetField, s: u32) -> JetField {
        let mut out = Self::zero(&self.ring, self.n);
        for (g, c) in &self.terms {
            for (h, d) in &o.terms {
                let cd = c.mul(d);
                for (k, r) in jet_bracket(g, h) {
                    if k.degree() <= s as i64 {
                        out.push(k, cd.scale(&r));
                    }
                }
            }
        }
        out
    }

    /// Keeps generators of degree at most `s`.
    pub fn truncate(&self, s: u32) -> JetField {
        let mut out = Self::zero(&self.ring, self.n);
        for (g, c) in &self.terms {
            if g.degree() <= s as i64 {
                out.push(g.clone(), c.clone());
            }
        }
        out
    }
}

impl fmt::Display for JetField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|(g, c)| crate::weyl::fmt_scaled(&format!("({c})"), &g.to_string())).collect();
        write!(f, "{}", crate::weyl::join_terms(parts))
    }
}

type YPoly = BTreeMap<Vec<u32>, RingElem>;

fn ymul(a: &YPoly, b: &YPoly, max: u32) -> YPoly {
    let mut out: YPoly = BTreeMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            if e.iter().sum::<u32>() > max {
                continue;
            }
            let c = ca.mul(cb);
            let next = match out.remove(&e) {
                Some(x) => x.add(&c),
                None => c,
            };
            if !next.is_zero() {
                out.insert(e, next);
            }
        }
    }
    out
}

/// The law `g(X) d_{X_i} -> g(G(y+Y) - G(y)) sum_j (dH_j/dx_i)(G(y+Y)) d_{Y_j}`,
/// truncated at jet degree `s`.
pub fn transform_jet(a: &Atlas, from: usize, to: usize, e: &JetField, s: u32) -> Result<JetField> {
    let t = a.transition(from, to)?;
    let o = a.chart(to).overlap.clone();
    let n = a.dim();
    let max = s + 1;
    let shifts: Vec<YPoly> = a
        .chart(from)
        .coords
        .iter()
        .map(|c| {
            let mut p = t.apply(c)?.taylor_shift(max);
            p.remove(&vec![0; n]);
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    let dy = inverse_partials(a, from, to)?;
    let mut out = JetField::zero(&o, n);
    for (g, c) in &e.terms {
        let c = a.transform_function(from, to, c)?;
        let mut mono: YPoly = BTreeMap::from([(vec![0; n], c)]);
        for (k, &pk) in g.exp().iter().enumerate() {
            for _ in 0..pk {
                mono = ymul(&mono, &shifts[k], max);
            }
        }
        for j in 0..n {
            let h = t.apply(&dy[g.dir()][j])?.taylor_shift(max);
            for (q_exp, coef) in ymul(&mono, &h, max) {
                if q_exp.iter().all(|&x| x == 0) {
                    return Err(Error::InvalidInput("jet generators must vanish at the origin".into()));
                }
                out.push(JetGen::new(q_exp, j)?, coef);
            }
        }
    }
    Ok(out.truncate(s))
}

fn e_gen(n: usize, a: usize, b: usize) -> JetGen {
    JetGen::linear(n, a, b)
}

/// `Omega_k = sum E_{i1 i2} E_{i2 i3} ... E_{ik i1}` in `O (x) U(gl_n)`.
fn casimir_poly(o: &Ring, n: usize, k: usize) -> JetPoly<RingElem> {
    let mut out = JetPoly::zero(n, 0);
    if k == 0 {
        return JetPoly::scalar(n, 0, RingElem::constant(o, q(n as i64)));
    }
    let total = n.pow(k as u32);
    for idx in 0..total {
        let mut is = Vec::with_capacity(k);
        let mut r = idx;
        for _ in 0..k {
            is.push(r % n);
            r /= n;
        }
        let word: Vec<JetGen> = (0..k).map(|t| e_gen(n, is[t], is[(t + 1) % k])).collect();
        out = out.add(&JetPoly::from_word(n, 0, &word, RingElem::one(o))).expect("same truncation");
    }
    out
}

/// The (1,1)-tensor law, or a variant dropping one Jacobian factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorLaw {
    Correct,
    DropFactor,
}

#[derive(Clone, Debug, Serialize)]
pub struct CasimirCheck {
    pub atlas: String,
    pub k: usize,
    pub passed: bool,
    /// Image minus `1 (x) Omega_k` when the check fails.
    pub witness: Option<String>,
}

/// Transforms `1 (x) Omega_k` from chart `from` to chart `to` via
/// `f (x) E_ij -> sum_{a,b} f (dy_a/dx_j) (dx_i/dy_b) (x) E_ba` and compares
/// with `1 (x) Omega_k`.
pub fn casimir_invariance_check(a: &Atlas, from: usize, to: usize, k: usize, law: TensorLaw) -> Result<CasimirCheck> {
    let t = a.transition(from, to)?;
    let o = a.chart(to).overlap.clone();
    let n = a.dim();
    let jac = jacobian(a, from, to)?;
    let dy = inverse_partials(a, from, to)?;
    let image = |i: usize, j: usize| -> Result<JetPoly<RingElem>> {
        let mut out = JetPoly::zero(n, 0);
        for b in 0..n {
            match law {
                TensorLaw::Correct => {
                    for aa in 0..n {
                        let c = t.apply(&dy[j][aa])?.mul(jac.get(i, b));
                        out = out.add(&JetPoly::gen(n, 0, &e_gen(n, b, aa), c))?;
                    }
                }
                TensorLaw::DropFactor => {
                    out = out.add(&JetPoly::gen(n, 0, &e_gen(n, b, j), jac.get(i, b).clone()))?;
                }
            }
        }
        Ok(out)
    };
    let omega = casimir_poly(&o, n, k);
    let mut transformed = JetPoly::zero(n, 0);
    for (word, c) in casimir_poly(&o, n, k).terms() {
        let mut acc = JetPoly::scalar(n, 0, c.clone());
        for g in word {
            let (j, i) = crate::jets::gl_embed(g)?;
            acc = acc.pbw_mul(&image(j, i)?)?;
        }
        transformed = transformed.add(&acc)?;
    }
    if k == 0 {
        transformed = omega.clone();
    }
    let diff = transformed.sub(&omega)?;
    Ok(CasimirCheck {
        atlas: a.name().to_string(),
        k,
        passed: diff.is_zero(),
        witness: if diff.is_zero() { None } else { Some(diff.to_string()) },
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GlueReport {
    pub atlas: String,
    pub rule: String,
    pub degree: u32,
    pub checks: usize,
    pub failures: usize,
    pub witnesses: Vec<String>,
    /// Exponents `c` for which `g v -> g y^c v` intertwines (charged rules).
    pub intertwiners: Option<Vec<i64>>,
}

impl GlueReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.intertwiners.as_ref().is_none_or(|c| !c.is_empty())
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.witnesses.len() < 8 {
                self.witnesses.push(witness());
            }
        }
    }
}

impl fmt::Display for GlueReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}] degree {}: ", self.atlas, self.rule, self.degree)?;
        if self.passed() {
            write!(f, "pass, {} checks", self.checks)?;
        } else {
            write!(f, "FAIL, {} of {} checks", self.failures, self.checks)?;
        }
        if let Some(c) = &self.intertwiners {
            write!(f, ", intertwiners y^c for c in {c:?}")?;
        }
        if let Some(w) = self.witnesses.first() {
            write!(f, "; first: {w}")?;
        }
        Ok(())
    }
}

pub const INTERTWINER_WINDOW: i64 = 4;

fn signed_monomials(o: &Ring, coords: &[RingElem], d: i64) -> Vec<RingElem> {
    let n = coords.len();
    crate::ring::exponents_upto(n, d, true)
        .into_iter()
        .filter_map(|e| {
            let mut t = RingElem::one(o);
            for (c, &k) in coords.iter().zip(&e) {
                t = t.mul(&c.pow_signed(k).ok()?);
            }
            Some(t)
        })
        .collect()
}

fn fields(o: &Ring, monos: &[RingElem]) -> Vec<VecField> {
    monos.iter().flat_map(|m| (0..o.dim()).map(move |i| VecField::basis(m, i))).collect()
}

/// Round trips and action compatibility between the two charts, with
/// monomials in the chart parameters of degree at most `d`.
pub fn glue_check(a: &Atlas, rule: &TransitionRule, d: u32) -> Result<GlueReport> {
    if a.charts().len() < 2 {
        return Err(Error::NoOverlap(0, 1));
    }
    let mut rep = GlueReport {
        atlas: a.name().to_string(),
        rule: rule.to_string(),
        degree: d,
        checks: 0,
        failures: 0,
        witnesses: Vec::new(),
        intertwiners: None,
    };
    let di = d as i64;
    let n = a.dim();
    for (from, to) in [(0usize, 1usize), (1, 0)] {
        let of = &a.chart(from).overlap;
        let monos = signed_monomials(of, &a.chart(from).coords, di);
        for f in &monos {
            let back = a.transform_function(to, from, &a.transform_function(from, to, f)?)?;
            rep.check(&back == f, || format!("function {f}: round trip gives {back}"));
        }
        let j = jacobian(a, from, to)?;
        let jb = jacobian(a, to, from)?;
        let mut jb_here = RingMatrix::zeros(&a.chart(to).overlap, n);
        for r in 0..n {
            for c in 0..n {
                jb_here.set(r, c, a.transform_function(from, to, jb.get(r, c))?);
            }
        }
        let prod = jb_here.mul(&j);
        rep.check(prod == RingMatrix::identity(&a.chart(to).overlap, n), || {
            format!("Jacobians {from}->{to} are not inverse")
        });
    }

    let (oa, ob) = (a.chart(0).overlap.clone(), a.chart(1).overlap.clone());
    let ca = a.chart(0).coords.clone();
    let cb = a.chart(1).coords.clone();
    match rule {
        TransitionRule::SectionOnly | TransitionRule::TensorRep(_) | TransitionRule::DetPower(_) => {
            let (ma, mb) = match rule {
                TransitionRule::SectionOnly => (FreeModule::ring_module(&oa), FreeModule::ring_module(&ob)),
                TransitionRule::TensorRep(r) => (FreeModule::from_rep(&oa, r)?, FreeModule::from_rep(&ob, r)?),
                TransitionRule::DetPower(l) => {
                    let r = Rep::det(l, n);
                    (FreeModule::from_rep(&oa, &r)?, FreeModule::from_rep(&ob, &r)?)
                }
                _ => unreachable!(),
            };
            let parts = |m: &ModElem| -> Vec<RingElem> { m.0.iter().map(|p| p.as_ring().clone()).collect() };
            let basis_a: Vec<ModElem> = signed_monomials(&oa, &ca, di)
                .iter()
                .flat_map(|f| (0..ma.rank()).map(|k| ma.elem(f, k)).collect::<Vec<_>>())
                .collect();
            for m in &basis_a {
                let there = transform_section(a, 0, 1, rule, &parts(m))?;
                let back = transform_section(a, 1, 0, rule, &there)?;
                rep.check(back == parts(m), || format!("section {}: round trip changes it", ma.format_elem(m)));
            }
            let vs = fields(&ob, &signed_monomials(&ob, &cb, di));
            for v in &vs {
                let va = push_field(a, 1, 0, v)?;
                for m in &basis_a {
                    let lhs = transform_section(a, 0, 1, rule, &parts(&ma.act_field(&va, m)?))?;
                    let tm = ModElem::ring_parts(transform_section(a, 0, 1, rule, &parts(m))?);
                    let rhs = parts(&mb.act_field(v, &tm)?);
                    rep.check(lhs == rhs, || {
                        format!("{v} on {}: transform-then-act differs from act-then-transform", ma.format_elem(m))
                    });
                }
            }
        }
        TransitionRule::Charged(lambda) => {
            if n != 1 {
                return Err(Error::InvalidInput("charged gluing is implemented for curves".into()));
            }
            let ops = signed_monomials(&oa, &ca, di)
                .into_iter()
                .map(|f| DiffOp::d(&oa, 0).lmul(&f))
                .chain(signed_monomials(&oa, &ca, di).into_iter().map(|f| DiffOp::from_elem(&f)));
            for op in ops {
                let there = transform_operator_charged(a, 0, 1, lambda, &op)?;
                let back = transform_operator_charged(a, 1, 0, lambda, &there)?;
                rep.check(back.sub(&op).is_zero(), || format!("operator {op}: charged round trip gives {back}"));
            }
            let ma = charged_twist(Box::new(FreeModule::ring_module(&oa)), lambda);
            let mb = charged_twist(Box::new(FreeModule::ring_module(&ob)), lambda);
            let y = &cb[0];
            let monos_b = signed_monomials(&ob, &cb, di);
            let vs = fields(&ob, &monos_b);
            let mut found = Vec::new();
            for c in -INTERTWINER_WINDOW..=INTERTWINER_WINDOW {
                let yc = y.pow_signed(c)?;
                let phi = |g: &RingElem| -> Result<ModElem> {
                    Ok(ModElem::ring_parts(vec![a.transform_function(1, 0, &g.mul(&yc))?]))
                };
                let mut ok = true;
                'outer: for v in &vs {
                    let va = push_field(a, 1, 0, v)?;
                    for g in &monos_b {
                        let lhs = phi(mb.act_field(v, &ModElem::ring_parts(vec![g.clone()]))?.component(0).as_ring())?;
                        let rhs = ma.act_field(&va, &phi(g)?)?;
                        if !ma.equal(&lhs, &rhs) {
                            ok = false;
                            break 'outer;
                        }
                    }
                }
                if ok {
                    found.push(c);
                }
            }
            rep.intertwiners = Some(found);
        }
        TransitionRule::Jet(s) => {
            let gens = generators(n, *s);
            let lift = |g: &JetGen| JetField::gen(&oa, g, RingElem::one(&oa));
            let images: Vec<JetField> =
                gens.iter().map(|g| transform_jet(a, 0, 1, &lift(g), *s)).collect::<Result<Vec<_>>>()?;
            for (g, img) in gens.iter().zip(&images) {
                let back = transform_jet(a, 1, 0, img, *s)?;
                rep.check(back == lift(g), || format!("jet {g}: round trip gives {back}"));
            }
            for (x, gx) in gens.iter().zip(&images) {
                for (y, gy) in gens.iter().zip(&images) {
                    let lhs = transform_jet(a, 0, 1, &lift(x).bracket(&lift(y), *s), *s)?;
                    let rhs = gx.bracket(gy, *s);
                    rep.check(lhs == rhs, || format!("bracket [{x}, {y}] is not preserved"));
                }
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atlases_build() {
        for name in ATLAS_NAMES {
            atlas(name).unwrap();
        }
        assert!(atlas("torus").is_err());
    }

    #[test]
    fn p1_jacobian() {
        let a = atlas("p1").unwrap();
        let j = jacobian(&a, 0, 1).unwrap();
        let o = &a.chart(1).overlap;
        assert_eq!(j.get(0, 0), &RingElem::monomial(o, &[-2], q(-1)));
        assert!(matches!(jacobian(&atlas("elliptic-affine").unwrap(), 0, 1), Err(Error::NoOverlap(0, 1))));
    }

    #[test]
    fn circle_jacobian() {
        let a = atlas("circle").unwrap();
        let j = jacobian(&a, 0, 1).unwrap();
        let o = &a.chart(1).overlap;
        let want = RingElem::var(o, 1).scale(&q(-1)).mul(&RingElem::var(o, 0).inverse().unwrap());
        assert_eq!(j.get(0, 0), &want);
    }

    #[test]
    fn gm_charged_operator() {
        let a = atlas("gm").unwrap();
        let lam = q(3);
        let t = &a.chart(0).overlap;
        let s = &a.chart(1).overlap;
        let out = transform_operator_charged(&a, 0, 1, &lam, &DiffOp::d(t, 0)).unwrap();
        let want = DiffOp::d(s, 0)
            .lmul(&RingElem::monomial(s, &[2], q(-1)))
            .add(&DiffOp::from_elem(&RingElem::monomial(s, &[1], q(-6))));
        assert!(out.sub(&want).is_zero(), "{out}");
    }

    #[test]
    fn rules() {
        assert!(matches!(TransitionRule::det_power(&crate::rational::qf(1, 2)), Err(Error::NotIntegrable(_))));
        assert!(matches!(TransitionRule::parse("det:1/2"), Err(Error::NotIntegrable(_))));
        assert!(matches!(TransitionRule::parse("rep:det(1/2,1)"), Err(Error::NotIntegrable(_))));
        assert!(matches!(TransitionRule::parse("jet:2"), Ok(TransitionRule::Jet(2))));
        assert!(TransitionRule::parse("bogus").is_err());
    }
}
