use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::JetRep;
use crate::poly::Poly;
use crate::rational::{binomial, q};
use crate::ring::{multi_indices, Ring, RingElem, RingKind};
use crate::weyl::VecField;

use super::{jet_act, AvModule, FreeModule, ModElem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Differentiability {
    /// Least `N` passing the test up to the degree bound.
    Order(u32),
    /// No `N <= N_max` passed.
    Unknown(u32),
}

impl fmt::Display for Differentiability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Differentiability::Order(n) => write!(f, "{n}"),
            Differentiability::Unknown(n) => write!(f, "unknown (> {n})"),
        }
    }
}

fn sample_functions(ring: &Ring) -> Vec<RingElem> {
    let mut out: Vec<RingElem> = ring.monomials(2).into_iter().filter(|m| m.as_constant().is_none()).collect();
    let mut sum = RingElem::zero(ring);
    for i in 0..ring.nvars() {
        sum = sum.add(&RingElem::var(ring, i));
    }
    out.push(sum);
    out
}

/// A witness that `N`-differentiability fails on carrier elements of
/// degree at most `d`, or `None`.
///
/// Coordinate charts use the monomial criterion: every `X^p d_i` with
/// `|p| in {N, N+1}` acts by zero. Other charts evaluate the defining sum
/// `sum_k (-1)^{N-k} C(N,k) f^k rho(f^{N-k} eta)` on sampled `f` and
/// monomial fields `eta`.
pub fn differentiability_defect(m: &dyn AvModule, n: u32, d: u32) -> Result<Option<String>> {
    let ring = m.ring().clone();
    let basis = m.basis(d);
    if ring.is_coordinate() {
        let dim = ring.dim();
        let ps: Vec<Vec<u32>> = multi_indices(dim, n + 1)
            .into_iter()
            .filter(|p| {
                let s = p.iter().sum::<u32>();
                s == n || s == n + 1
            })
            .collect();
        let found = basis.par_iter().find_map_first(|b| {
            for p in &ps {
                for i in 0..dim {
                    match jet_act(m, p, i, b) {
                        Ok(r) if m.is_zero(&r) => {}
                        Ok(r) => {
                            return Some(Ok(format!(
                                "X^{:?} d{} on {} gives {}",
                                p,
                                i + 1,
                                m.format_elem(b),
                                m.format_elem(&r)
                            )))
                        }
                        Err(e) => return Some(Err(e)),
                    }
                }
            }
            None
        });
        return found.transpose();
    }
    let fs = sample_functions(&ring);
    let etas: Vec<VecField> = ring
        .monomials(1)
        .into_iter()
        .flat_map(|mono| (0..ring.dim()).map(move |i| VecField::basis(&mono, i)))
        .collect();
    let found = basis.par_iter().find_map_first(|b| {
        for f in &fs {
            for eta in &etas {
                let mut acc: Option<ModElem> = None;
                for k in 0..=n {
                    let sign = if (n - k) % 2 == 0 { q(1) } else { q(-1) };
                    let c = binomial(n as i64, k as i64) * sign;
                    let field = eta.lmul(&f.pow(n - k));
                    let term = match m.act_field(&field, b).and_then(|x| m.act_ring(&f.pow(k).scale(&c), &x)) {
                        Ok(t) => t,
                        Err(e) => return Some(Err(e)),
                    };
                    acc = Some(match acc {
                        None => term,
                        Some(a) => a.add(&term),
                    });
                }
                let r = acc.expect("N >= 1");
                if !m.is_zero(&r) {
                    return Some(Ok(format!(
                        "f = {f}, eta = {eta} on {} gives {}",
                        m.format_elem(b),
                        m.format_elem(&r)
                    )));
                }
            }
        }
        None
    });
    found.transpose()
}

/// Least `N <= n_max` for which the module is `N`-differentiable on
/// carrier elements of degree at most `d`.
pub fn minimal_differentiability(m: &dyn AvModule, n_max: u32, d: u32) -> Result<Differentiability> {
    if n_max < 1 {
        return Err(Error::InvalidInput("N_max must be at least 1".into()));
    }
    for n in 1..=n_max {
        if differentiability_defect(m, n, d)?.is_none() {
            return Ok(Differentiability::Order(n));
        }
    }
    Ok(Differentiability::Unknown(n_max))
}

fn localizing_element(target: &Ring) -> Result<(Ring, Poly)> {
    match target.kind() {
        RingKind::Localized { base, denom } => Ok((base.clone(), denom.clone())),
        _ => Err(Error::InvalidRing(format!("{} is not a localization", target.name()))),
    }
}

/// Action of a vector field over `A_F` on `M_F`, computed from the action
/// of `V` on `M` alone for an `N`-differentiable `M`:
/// `rho(eta / G) = sum_{l=0}^{N-1} (-1)^l C(N, l+1) G^{-(l+1)} rho(G^l eta)`,
/// extended to fractions `m / F^j` by the quotient rule.
pub fn localized_action(
    m: &FreeModule,
    n_diff: Option<u32>,
    target: &Ring,
    v: &VecField,
    elem: &ModElem,
) -> Result<ModElem> {
    let n = n_diff.ok_or(Error::UnknownDifferentiability(0))?;
    if n == 0 {
        return Err(Error::UnknownDifferentiability(0));
    }
    let (base, denom) = localizing_element(target)?;
    crate::ring::check_same(&base, m.ring())?;
    crate::ring::check_same(target, v.ring())?;
    let f_base = RingElem::from_poly(&base, denom.clone());
    let f_loc = RingElem::from_poly(target, denom);
    let lift = |x: &RingElem| -> RingElem { RingElem::from_poly(&base, x.numerator().clone()) };

    // Field as (sum g_i D_i) / F^K with g_i in A.
    let kmax = v.comps().iter().map(|c| c.denominator_power()).max().unwrap_or(0);
    let gs: Vec<RingElem> = v
        .comps()
        .iter()
        .map(|c| lift(c).mul(&f_base.pow(kmax - c.denominator_power())))
        .collect();
    let eta = VecField::new(&base, gs)?;
    let g_base = f_base.pow(kmax);

    // Element as m' / F^J with m' in M.
    let jmax = elem.0.iter().map(|p| p.as_ring().denominator_power()).max().unwrap_or(0);
    let mprime = ModElem::ring_parts(
        elem.0
            .iter()
            .map(|p| {
                let r = p.as_ring();
                crate::ring::check_same(target, r.ring())?;
                Ok(lift(r).mul(&f_base.pow(jmax - r.denominator_power())))
            })
            .collect::<Result<Vec<_>>>()?,
    );

    // rho(eta / G) m'
    let mut acc = ModElem::ring_parts(vec![RingElem::zero(target); m.rank()]);
    for l in 0..n {
        let sign = if l % 2 == 0 { q(1) } else { q(-1) };
        let c = binomial(n as i64, (l + 1) as i64) * sign;
        let field = eta.lmul(&g_base.pow(l));
        let r = m.localize_elem(target, &m.act_field(&field, &mprime)?)?;
        let coef = RingElem::denom_inverse_pow(target, kmax * (l + 1)).scale(&c);
        acc = acc.add(&ModElem::ring_parts(r.0.iter().map(|p| coef.mul(p.as_ring())).collect()));
    }
    if jmax == 0 {
        return Ok(acc);
    }
    // (rho(xi) m') / F^J - J xi(F) / F^{J+1} m'
    let inv_j = RingElem::denom_inverse_pow(target, jmax);
    let xi_f = v.apply(&f_loc)?;
    let corr = RingElem::denom_inverse_pow(target, jmax + 1).mul(&xi_f).scale(&q(jmax as i64));
    let mloc = m.localize_elem(target, &mprime)?;
    Ok(ModElem::ring_parts(
        acc.0
            .iter()
            .zip(&mloc.0)
            .map(|(a, b)| inv_j.mul(a.as_ring()).sub(&corr.mul(b.as_ring())))
            .collect(),
    ))
}

/// `M_F` with the vector-field action given by [`localized_action`].
pub struct LocalizedModule {
    base: FreeModule,
    direct: FreeModule,
    n: u32,
}

impl LocalizedModule {
    pub fn new(base: &FreeModule, target: &Ring, n: u32) -> Result<Self> {
        Ok(LocalizedModule { base: base.clone(), direct: base.localize(target)?, n })
    }

    /// The same module with the closed-form tensor action over `A_F`.
    pub fn direct(&self) -> &FreeModule {
        &self.direct
    }
}

impl AvModule for LocalizedModule {
    fn ring(&self) -> &Ring {
        self.direct.ring()
    }

    fn rank(&self) -> usize {
        self.direct.rank()
    }

    fn act_ring(&self, f: &RingElem, m: &ModElem) -> Result<ModElem> {
        self.direct.act_ring(f, m)
    }

    fn act_field(&self, v: &VecField, m: &ModElem) -> Result<ModElem> {
        localized_action(&self.base, Some(self.n), self.direct.ring(), v, m)
    }

    fn basis(&self, d: u32) -> Vec<ModElem> {
        self.direct.basis(d)
    }

    fn jet_rep(&self) -> Option<&JetRep> {
        Some(self.base.jet())
    }

    fn describe(&self) -> String {
        format!("{} via {}-differentiable extension", self.direct.describe(), self.n)
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }

    fn fiber_labels(&self) -> Vec<String> {
        self.direct.fiber_labels()
    }
}
