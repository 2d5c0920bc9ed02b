//! AV-modules: carriers with a ring action and a compatible action of
//! vector fields.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::jets::JetRep;
use crate::rational::{multi_binomial, q, Rational};
use crate::ring::{Ring, RingElem};
use crate::weyl::{fmt_scaled, join_terms, DeltaElem, VecField};

mod charged;
mod delta;
mod differentiability;
pub mod expr;
pub mod fixtures;
mod free;
mod gauge;
mod validate;

pub use charged::{charged_twist, Charged};
pub use delta::{rudakov_module, DeltaTensor};
pub use differentiability::{
    differentiability_defect, localized_action, minimal_differentiability, Differentiability, LocalizedModule,
};
pub use free::{av_dual, av_tensor, tensor_module, FreeModule};
pub use gauge::{elliptic_gauge_data, gauge_module, GaugeData, GaugeModule};
pub use validate::{validate_smash, SmashReport, Violation};

/// One component of a module element.
#[derive(Clone, Debug)]
pub enum Part {
    Ring(RingElem),
    Delta(DeltaElem),
}

impl Part {
    pub fn is_zero(&self) -> bool {
        match self {
            Part::Ring(r) => r.is_zero(),
            Part::Delta(d) => d.is_zero(),
        }
    }

    pub fn add(&self, o: &Part) -> Part {
        match (self, o) {
            (Part::Ring(a), Part::Ring(b)) => Part::Ring(a.add(b)),
            (Part::Delta(a), Part::Delta(b)) => Part::Delta(a.add(b)),
            _ => panic!("mixed component kinds"),
        }
    }

    pub fn scale(&self, c: &Rational) -> Part {
        match self {
            Part::Ring(a) => Part::Ring(a.scale(c)),
            Part::Delta(a) => Part::Delta(a.scale(c)),
        }
    }

    pub fn as_ring(&self) -> &RingElem {
        match self {
            Part::Ring(r) => r,
            Part::Delta(_) => panic!("expected a ring component"),
        }
    }

    pub fn as_delta(&self) -> &DeltaElem {
        match self {
            Part::Delta(d) => d,
            Part::Ring(_) => panic!("expected a delta component"),
        }
    }

    pub fn text(&self, names: &[String]) -> String {
        match self {
            Part::Ring(r) => r.to_string(),
            Part::Delta(d) => d.format(names),
        }
    }
}

/// Element of a module: one component per basis vector of the fiber.
#[derive(Clone, Debug)]
pub struct ModElem(pub Vec<Part>);

impl ModElem {
    pub fn ring_parts(parts: Vec<RingElem>) -> Self {
        ModElem(parts.into_iter().map(Part::Ring).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Structural zero test (modules with relations override equality).
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|p| p.is_zero())
    }

    pub fn add(&self, o: &ModElem) -> ModElem {
        assert_eq!(self.len(), o.len(), "module elements of different rank");
        ModElem(self.0.iter().zip(&o.0).map(|(a, b)| a.add(b)).collect())
    }

    pub fn scale(&self, c: &Rational) -> ModElem {
        ModElem(self.0.iter().map(|a| a.scale(c)).collect())
    }

    pub fn sub(&self, o: &ModElem) -> ModElem {
        self.add(&o.scale(&q(-1)))
    }

    pub fn component(&self, i: usize) -> &Part {
        &self.0[i]
    }
}

/// Coordinate key of a module element in a fixed monomial basis.
pub type CoordKey = (usize, Vec<i64>);

/// A module over the smash product of a coordinate ring with its vector fields.
pub trait AvModule: Send + Sync {
    fn ring(&self) -> &Ring;

    /// Number of components of an element.
    fn rank(&self) -> usize;

    fn act_ring(&self, f: &RingElem, m: &ModElem) -> Result<ModElem>;

    fn act_field(&self, v: &VecField, m: &ModElem) -> Result<ModElem>;

    /// Spanning elements of the carrier up to degree `d`.
    fn basis(&self, d: u32) -> Vec<ModElem>;

    fn is_zero(&self, m: &ModElem) -> bool {
        m.is_zero()
    }

    /// Pairs of representatives declared equal (relations of the carrier).
    fn equivalent_pairs(&self) -> Vec<(ModElem, ModElem, String)> {
        Vec::new()
    }

    /// Linear coordinates, when the carrier has a canonical monomial basis.
    fn coords(&self, m: &ModElem) -> Option<BTreeMap<CoordKey, Rational>> {
        let mut out = BTreeMap::new();
        for (i, p) in m.0.iter().enumerate() {
            match p {
                Part::Ring(r) => {
                    for (e, c) in r.coords()? {
                        out.insert((i, e), c);
                    }
                }
                Part::Delta(d) => {
                    for (b, c) in d.terms() {
                        out.insert((i, b.iter().map(|&x| x as i64).collect()), c.clone());
                    }
                }
            }
        }
        Some(out)
    }

    /// The fiber module, when the module is of tensor type.
    fn jet_rep(&self) -> Option<&JetRep> {
        None
    }

    fn describe(&self) -> String;

    fn as_any(&self) -> &dyn std::any::Any;

    fn fiber_labels(&self) -> Vec<String>;

    fn format_elem(&self, m: &ModElem) -> String {
        let names = self.ring().vars().to_vec();
        let labels = self.fiber_labels();
        if labels.len() == 1 && labels[0] == "1" {
            return m.0[0].text(&names);
        }
        let parts = m
            .0
            .iter()
            .zip(&labels)
            .filter(|(p, _)| !p.is_zero())
            .map(|(p, l)| fmt_scaled(&p.text(&names), l))
            .collect();
        join_terms(parts)
    }

    fn equal(&self, a: &ModElem, b: &ModElem) -> bool {
        self.is_zero(&a.sub(b))
    }
}

pub(crate) fn ring_basis_elems(ring: &Ring, rank: usize, d: u32) -> Vec<ModElem> {
    let mut out = Vec::new();
    for m in ring.monomials(d) {
        for a in 0..rank {
            let mut parts = vec![RingElem::zero(ring); rank];
            parts[a] = m.clone();
            out.push(ModElem::ring_parts(parts));
        }
    }
    out
}

/// Multiplies a component by a ring element.
pub(crate) fn part_mul(f: &RingElem, p: &Part) -> Result<Part> {
    Ok(match p {
        Part::Ring(r) => Part::Ring(f.checked_mul(r)?),
        Part::Delta(d) => Part::Delta(d.act_ring(f)?),
    })
}

/// Derived action of the jet `X^p d_i` on a coordinate chart:
/// `sum_{k<=p} (-1)^{|p-k|} C(p,k) x^{p-k} rho(x^k d_i)`.
pub fn jet_act(m_mod: &dyn AvModule, p: &[u32], i: usize, m: &ModElem) -> Result<ModElem> {
    let ring = m_mod.ring();
    if !ring.is_coordinate() {
        return Err(Error::NotCoordinateChart(ring.name()));
    }
    let mut acc: Option<ModElem> = None;
    for k in crate::weyl::sub_indices(p) {
        let sign = if (p.iter().sum::<u32>() - k.iter().sum::<u32>()) % 2 == 0 { q(1) } else { q(-1) };
        let c = multi_binomial(p, &k) * sign;
        let xk: Vec<i64> = k.iter().map(|&x| x as i64).collect();
        let xpk: Vec<i64> = p.iter().zip(&k).map(|(a, b)| (a - b) as i64).collect();
        let field = VecField::basis(&RingElem::monomial(ring, &xk, q(1)), i);
        let inner = m_mod.act_field(&field, m)?;
        let term = m_mod.act_ring(&RingElem::monomial(ring, &xpk, c), &inner)?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term),
        });
    }
    Ok(acc.expect("at least one term"))
}
