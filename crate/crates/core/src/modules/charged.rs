use std::collections::BTreeMap;

use crate::error::Result;
use crate::jets::JetRep;
use crate::rational::{fmt_rational, Rational};
use crate::ring::{Ring, RingElem};
use crate::weyl::VecField;

use super::{part_mul, AvModule, CoordKey, ModElem};

/// `rho(sum f_i D_i) = sum f_i D_i + lambda sum_i D_i(f_i)` on top of an
/// existing module.
pub struct Charged {
    inner: Box<dyn AvModule>,
    lambda: Rational,
}

impl Charged {
    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn inner(&self) -> &dyn AvModule {
        self.inner.as_ref()
    }
}

pub fn charged_twist(inner: Box<dyn AvModule>, lambda: &Rational) -> Charged {
    Charged { inner, lambda: lambda.clone() }
}

impl AvModule for Charged {
    fn ring(&self) -> &Ring {
        self.inner.ring()
    }

    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn act_ring(&self, f: &RingElem, m: &ModElem) -> Result<ModElem> {
        self.inner.act_ring(f, m)
    }

    fn act_field(&self, v: &VecField, m: &ModElem) -> Result<ModElem> {
        let base = self.inner.act_field(v, m)?;
        let div = v.divergence().scale(&self.lambda);
        if div.is_zero() {
            return Ok(base);
        }
        let extra = ModElem(m.0.iter().map(|p| part_mul(&div, p)).collect::<Result<Vec<_>>>()?);
        Ok(base.add(&extra))
    }

    fn basis(&self, d: u32) -> Vec<ModElem> {
        self.inner.basis(d)
    }

    fn is_zero(&self, m: &ModElem) -> bool {
        self.inner.is_zero(m)
    }

    fn equivalent_pairs(&self) -> Vec<(ModElem, ModElem, String)> {
        self.inner.equivalent_pairs()
    }

    fn coords(&self, m: &ModElem) -> Option<BTreeMap<CoordKey, Rational>> {
        self.inner.coords(m)
    }

    fn jet_rep(&self) -> Option<&JetRep> {
        None
    }

    fn describe(&self) -> String {
        format!("charged({}, {})", self.inner.describe(), fmt_rational(&self.lambda))
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }

    fn fiber_labels(&self) -> Vec<String> {
        self.inner.fiber_labels()
    }

    fn format_elem(&self, m: &ModElem) -> String {
        self.inner.format_elem(m)
    }
}
