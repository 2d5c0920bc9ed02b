//! Built-in constructions and deliberately broken modules used as negative
//! controls for [`validate_smash`](super::validate_smash).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::jets::JetRep;
use crate::rational::{q, Rational};
use crate::ring::{Ring, RingElem};
use crate::weyl::VecField;

use super::expr::parse_module;
use super::{elliptic_gauge_data, AvModule, CoordKey, GaugeModule, ModElem};

pub const BUILTIN_CONSTRUCTIONS: &[&str] = &[
    "poly(x)",
    "poly(x,y)",
    "laurent(s)",
    "elliptic",
    "tensor(poly(x), natural(1))",
    "tensor(poly(x), det(3/2,1))",
    "tensor(poly(x,y), natural(2))",
    "tensor(poly(x,y), sym(2,2))",
    "tensor(poly(x,y), ext(2,2))",
    "tensor(poly(x), jets(1,2))",
    "tensor(elliptic, alpha(1/2))",
    "tensor(elliptic, alpha(-1))",
    "gauge(elliptic)",
    "charged(poly(x), 1/3)",
    "charged(laurent(s), -2)",
    "rudakov([0], natural(1))",
    "delta([0])",
    "delta([1,2])",
    "dual(tensor(poly(x,y), natural(2)))",
    "mtensor(tensor(poly(x), det(1,1)), tensor(poly(x), det(2,1)))",
    "localize(tensor(poly(x), det(1/2,1)), x)",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Vector fields act with an extra factor 2.
    DoubledField,
    /// `eta` acts as `x_1 eta` would.
    ShiftedField,
}

/// A module whose field action has been tampered with.
pub struct Mutant {
    inner: Box<dyn AvModule>,
    mutation: Mutation,
}

impl Mutant {
    pub fn new(inner: Box<dyn AvModule>, mutation: Mutation) -> Self {
        Mutant { inner, mutation }
    }
}

impl AvModule for Mutant {
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
        match self.mutation {
            Mutation::DoubledField => Ok(self.inner.act_field(v, m)?.scale(&q(2))),
            Mutation::ShiftedField => self.inner.act_field(&v.lmul(&RingElem::var(self.ring(), 0)), m),
        }
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

    fn describe(&self) -> String {
        let tag = match self.mutation {
            Mutation::DoubledField => "doubled-field",
            Mutation::ShiftedField => "shifted-field",
        };
        format!("mutant({tag}, {})", self.inner.describe())
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }

    fn fiber_labels(&self) -> Vec<String> {
        self.inner.fiber_labels()
    }
}

pub const NEGATIVE_CONTROLS: &[&str] = &["corrupt-gauge", "doubled-field", "shifted-field"];

/// A module that must fail validation, by name: the elliptic gauge module
/// with a corrupted gauge field, or one of two tampered tensor modules.
pub fn negative_control(name: &str) -> Result<Box<dyn AvModule>> {
    Ok(match name {
        "corrupt-gauge" => Box::new(GaugeModule::new_unchecked(elliptic_gauge_data(true), JetRep::trivial(1), None)?),
        "doubled-field" => Box::new(Mutant::new(parse_module("tensor(poly(x), det(1,1))")?, Mutation::DoubledField)),
        "shifted-field" => Box::new(Mutant::new(parse_module("tensor(poly(x,y), natural(2))")?, Mutation::ShiftedField)),
        other => return Err(Error::InvalidInput(format!("unknown negative control '{other}'"))),
    })
}

pub fn negative_controls() -> Result<Vec<Box<dyn AvModule>>> {
    NEGATIVE_CONTROLS.iter().map(|n| negative_control(n)).collect()
}
