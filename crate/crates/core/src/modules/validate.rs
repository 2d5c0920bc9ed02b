use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::ring::RingElem;
use crate::weyl::VecField;

use super::{AvModule, ModElem};

const KEEP: usize = 8;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Violation {
    pub kind: String,
    pub witness: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SmashReport {
    pub module: String,
    pub degree: u32,
    pub checks: usize,
    pub failures: usize,
    /// The first few failures, in a deterministic order.
    pub violations: Vec<Violation>,
}

impl SmashReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for SmashReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "{} (degree {}): pass, {} checks", self.module, self.degree, self.checks)
        } else {
            write!(
                f,
                "{} (degree {}): FAIL, {} of {} checks; first: [{}] {}",
                self.module, self.degree, self.failures, self.checks, self.violations[0].kind, self.violations[0].witness
            )
        }
    }
}

fn fields(m: &dyn AvModule, d: u32) -> Vec<VecField> {
    let ring = m.ring();
    let mut out = Vec::new();
    for mono in ring.monomials(d) {
        for i in 0..ring.dim() {
            out.push(VecField::basis(&mono, i));
        }
    }
    out
}

struct Acc {
    checks: usize,
    failures: Vec<Violation>,
    count: usize,
}

impl Acc {
    fn new() -> Self {
        Acc { checks: 0, failures: Vec::new(), count: 0 }
    }

    fn check(&mut self, ok: bool, kind: &str, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.count += 1;
            if self.failures.len() < KEEP {
                self.failures.push(Violation { kind: kind.to_string(), witness: witness() });
            }
        }
    }

    fn merge(mut self, o: Acc) -> Acc {
        self.checks += o.checks;
        self.count += o.count;
        for v in o.failures {
            if self.failures.len() < KEEP {
                self.failures.push(v);
            }
        }
        self
    }
}

fn eq_or_err(m: &dyn AvModule, a: crate::error::Result<ModElem>, b: crate::error::Result<ModElem>) -> bool {
    match (a, b) {
        (Ok(x), Ok(y)) => m.equal(&x, &y),
        _ => false,
    }
}

/// Exhaustive check of the smash-product relations on monomial data of
/// degree at most `d`:
/// ring action associativity, `[rho(eta), f] = eta(f)`,
/// `rho([eta, mu]) = [rho(eta), rho(mu)]`, and compatibility with the
/// carrier's relations.
pub fn validate_smash(m: &dyn AvModule, d: u32) -> SmashReport {
    let ring = m.ring().clone();
    let fs: Vec<RingElem> = ring.monomials(d);
    let vs = fields(m, d);
    let basis = m.basis(d);
    let show = |x: &ModElem| m.format_elem(x);

    let per_elem: Vec<Acc> = basis
        .par_iter()
        .map(|b| {
            let mut acc = Acc::new();
            for f in &fs {
                for g in &fs {
                    let lhs = m.act_ring(f, &m.act_ring(g, b).expect("ring action"));
                    let rhs = m.act_ring(&f.mul(g), b);
                    acc.check(eq_or_err(m, lhs, rhs), "ring action", || format!("f = {f}, g = {g}, m = {}", show(b)));
                }
            }
            let rv: Vec<ModElem> = vs.iter().map(|v| m.act_field(v, b).expect("field action")).collect();
            for (v, rvb) in vs.iter().zip(&rv) {
                for f in &fs {
                    let fb = m.act_ring(f, b).expect("ring action");
                    let lhs = m.act_field(v, &fb).map(|x| x.sub(&m.act_ring(f, rvb).expect("ring action")));
                    let rhs = m.act_ring(&v.apply(f).expect("same ring"), b);
                    acc.check(eq_or_err(m, lhs, rhs), "smash", || format!("eta = {v}, f = {f}, m = {}", show(b)));
                }
            }
            for (i, v) in vs.iter().enumerate() {
                for (j, w) in vs.iter().enumerate().skip(i + 1) {
                    let br = v.bracket(w).expect("same ring");
                    let lhs = m.act_field(&br, b);
                    let rhs = m
                        .act_field(v, &rv[j])
                        .and_then(|x| Ok(x.sub(&m.act_field(w, &rv[i])?)));
                    acc.check(eq_or_err(m, lhs, rhs), "bracket", || format!("eta = {v}, mu = {w}, m = {}", show(b)));
                }
            }
            acc
        })
        .collect();
    let mut total = per_elem.into_iter().fold(Acc::new(), Acc::merge);

    for (a, b, name) in m.equivalent_pairs() {
        for v in &vs {
            let lhs = m.act_field(v, &a);
            let rhs = m.act_field(v, &b);
            total.check(eq_or_err(m, lhs, rhs), "relation", || {
                let show_r = |r: crate::error::Result<ModElem>| r.map(|x| show(&x)).unwrap_or_else(|e| e.to_string());
                format!(
                    "{name} under {v}: {} != {}",
                    show_r(m.act_field(v, &a)),
                    show_r(m.act_field(v, &b))
                )
            });
        }
    }

    SmashReport {
        module: m.describe(),
        degree: d,
        checks: total.checks,
        failures: total.count,
        violations: total.failures,
    }
}
