use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::jets::JetRep;
use crate::rational::{q, Rational};
use crate::ring::{check_same, Ring, RingElem, RingSpec};
use crate::weyl::{fmt_scaled, join_terms, VecField};

use super::{AvModule, CoordKey, ModElem};

/// A projective module presented by generators inside the ring (an
/// ideal), their syzygies, and gauge fields `D_i(gen_g) = sum_h c_{ih g} gen_h`.
#[derive(Clone, Debug)]
pub struct GaugeData {
    ring: Ring,
    gens: Vec<String>,
    images: Vec<RingElem>,
    /// `fields[i][g][h]`: coefficient of `gen_h` in `D_i(gen_g)`.
    fields: Vec<Vec<Vec<RingElem>>>,
    syzygies: Vec<(Vec<RingElem>, Vec<RingElem>, String)>,
}

impl GaugeData {
    pub fn new(
        ring: &Ring,
        gens: Vec<String>,
        images: Vec<RingElem>,
        fields: Vec<Vec<Vec<RingElem>>>,
        syzygies: Vec<(Vec<RingElem>, Vec<RingElem>, String)>,
    ) -> Result<Self> {
        let k = gens.len();
        if images.len() != k
            || fields.len() != ring.dim()
            || fields.iter().any(|f| f.len() != k || f.iter().any(|r| r.len() != k))
            || syzygies.iter().any(|(a, b, _)| a.len() != k || b.len() != k)
        {
            return Err(Error::InvalidInput("gauge data has inconsistent sizes".into()));
        }
        for x in &images {
            check_same(ring, x.ring())?;
        }
        let data = GaugeData { ring: ring.clone(), gens, images, fields, syzygies };
        for (a, b, name) in &data.syzygies {
            if data.image(a) != data.image(b) {
                return Err(Error::InvalidInput(format!("relation {name} does not hold in the ring")));
            }
        }
        Ok(data)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn generators(&self) -> &[String] {
        &self.gens
    }

    pub fn syzygies(&self) -> &[(Vec<RingElem>, Vec<RingElem>, String)] {
        &self.syzygies
    }

    /// Image in the ring of a combination of generators.
    pub fn image(&self, comb: &[RingElem]) -> RingElem {
        let mut s = RingElem::zero(&self.ring);
        for (c, g) in comb.iter().zip(&self.images) {
            s = s.add(&c.mul(g));
        }
        s
    }

    /// `D_i` applied to a combination of generators.
    pub fn derive(&self, i: usize, comb: &[RingElem]) -> Vec<RingElem> {
        let k = self.gens.len();
        let mut out: Vec<RingElem> = comb.iter().map(|c| c.derive(i)).collect();
        for g in 0..k {
            if comb[g].is_zero() {
                continue;
            }
            for h in 0..k {
                let c = &self.fields[i][g][h];
                if !c.is_zero() {
                    out[h] = out[h].add(&comb[g].mul(c));
                }
            }
        }
        out
    }

    pub fn format_comb(&self, comb: &[RingElem]) -> String {
        join_terms(
            comb.iter()
                .zip(&self.gens)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, g)| fmt_scaled(&c.to_string(), g))
                .collect(),
        )
    }

    /// Checks that every gauge field preserves every syzygy.
    pub fn validate(&self) -> Result<()> {
        for (a, b, name) in &self.syzygies {
            for i in 0..self.ring.dim() {
                let da = self.derive(i, a);
                let db = self.derive(i, b);
                if self.image(&da) != self.image(&db) {
                    return Err(Error::SyzygyViolation {
                        relation: name.clone(),
                        witness: format!("{} != {}", self.format_comb(&da), self.format_comb(&db)),
                    });
                }
            }
        }
        Ok(())
    }
}

/// The ideal `(t, y)` of the elliptic curve with generators `T -> t`,
/// `Y -> y`, gauge fields `tau(T) = (t^2+1) Y`, `tau(Y) = (t^3+t) T`, and
/// relations `y Y = (t^2-1) T`, `t Y = y T`. `corrupt` replaces the first
/// gauge field by `(t^2+2) Y`.
pub fn elliptic_gauge_data(corrupt: bool) -> GaugeData {
    let a = RingSpec::elliptic();
    let t = RingElem::var(&a, 0);
    let y = RingElem::var(&a, 1);
    let one = RingElem::one(&a);
    let zero = RingElem::zero(&a);
    let shift = if corrupt { q(2) } else { q(1) };
    let tau_t = vec![zero.clone(), t.pow(2).add(&RingElem::constant(&a, shift))];
    let tau_y = vec![t.pow(3).add(&t), zero.clone()];
    let syz = vec![
        (vec![zero.clone(), y.clone()], vec![t.pow(2).sub(&one), zero.clone()], "yY = (t^2 - 1)T".to_string()),
        (vec![zero.clone(), t.clone()], vec![y.clone(), zero], "tY = yT".to_string()),
    ];
    GaugeData::new(&a, vec!["T".into(), "Y".into()], vec![t, y], vec![vec![tau_t, tau_y]], syz)
        .expect("elliptic gauge data")
}

/// `P (x) W` for a gauge-presented `P` and a jet module `W`.
#[derive(Clone, Debug)]
pub struct GaugeModule {
    data: GaugeData,
    jet: JetRep,
    wlabels: Vec<String>,
    label: String,
}

impl GaugeModule {
    /// Skips the syzygy check; for deliberately broken fixtures.
    pub fn new_unchecked(data: GaugeData, jet: JetRep, wlabels: Option<Vec<String>>) -> Result<Self> {
        if jet.n() != data.ring.dim() {
            return Err(Error::InvalidRep("fiber module of the wrong dimension".into()));
        }
        let wlabels = wlabels.unwrap_or_else(|| {
            if jet.dim() == 1 {
                vec!["1".into()]
            } else {
                (1..=jet.dim()).map(|i| format!("w{i}")).collect()
            }
        });
        let label = format!("gauge({}, {})", data.gens.join(","), jet.label());
        Ok(GaugeModule { data, jet, wlabels, label })
    }

    pub fn data(&self) -> &GaugeData {
        &self.data
    }

    fn r(&self) -> usize {
        self.jet.dim()
    }

    /// `c gen_g (x) w_a`.
    pub fn elem(&self, c: &RingElem, g: usize, a: usize) -> ModElem {
        let k = self.data.gens.len();
        let mut parts = vec![RingElem::zero(&self.data.ring); k * self.r()];
        parts[g * self.r() + a] = c.clone();
        ModElem::ring_parts(parts)
    }

    fn comb(&self, m: &ModElem, a: usize) -> Vec<RingElem> {
        (0..self.data.gens.len()).map(|g| m.0[g * self.r() + a].as_ring().clone()).collect()
    }

    /// The `w_a`-component of `m` written as `c gen_g`, if possible.
    pub fn as_multiple_of(&self, m: &ModElem, g: usize, a: usize) -> Option<RingElem> {
        self.data.image(&self.comb(m, a)).try_div(&self.data.images[g])
    }
}

/// Gauge module with the syzygies checked.
pub fn gauge_module(data: GaugeData, w: &JetRep) -> Result<GaugeModule> {
    data.validate()?;
    GaugeModule::new_unchecked(data, w.clone(), None)
}

impl AvModule for GaugeModule {
    fn ring(&self) -> &Ring {
        &self.data.ring
    }

    fn rank(&self) -> usize {
        self.data.gens.len() * self.r()
    }

    fn act_ring(&self, f: &RingElem, m: &ModElem) -> Result<ModElem> {
        check_same(&self.data.ring, f.ring())?;
        Ok(ModElem::ring_parts(m.0.iter().map(|p| f.mul(p.as_ring())).collect()))
    }

    fn act_field(&self, v: &VecField, m: &ModElem) -> Result<ModElem> {
        check_same(&self.data.ring, v.ring())?;
        let r = self.r();
        let k = self.data.gens.len();
        let mut out = vec![RingElem::zero(&self.data.ring); k * r];
        let top = self.jet.top_degree();
        for (i, f) in v.comps().iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for a in 0..r {
                let d = self.data.derive(i, &self.comb(m, a));
                for (g, c) in d.into_iter().enumerate() {
                    out[g * r + a] = out[g * r + a].add(&f.mul(&c));
                }
            }
            if top < 0 {
                continue;
            }
            let taylor = f.taylor_shift((top + 1) as u32);
            for (gen, mat) in self.jet.acting() {
                if gen.dir() != i {
                    continue;
                }
                let Some(coef) = taylor.get(gen.exp()) else { continue };
                for g in 0..k {
                    for b in 0..r {
                        for a in 0..r {
                            let c = mat.get(b, a);
                            let x = m.0[g * r + a].as_ring();
                            if !num_traits::Zero::is_zero(c) && !x.is_zero() {
                                out[g * r + b] = out[g * r + b].add(&coef.mul(x).scale(c));
                            }
                        }
                    }
                }
            }
        }
        Ok(ModElem::ring_parts(out))
    }

    fn basis(&self, d: u32) -> Vec<ModElem> {
        let mut out = Vec::new();
        for mono in self.data.ring.monomials(d) {
            for g in 0..self.data.gens.len() {
                for a in 0..self.r() {
                    out.push(self.elem(&mono, g, a));
                }
            }
        }
        out
    }

    fn is_zero(&self, m: &ModElem) -> bool {
        (0..self.r()).all(|a| self.data.image(&self.comb(m, a)).is_zero())
    }

    fn equivalent_pairs(&self) -> Vec<(ModElem, ModElem, String)> {
        let mut out = Vec::new();
        let r = self.r();
        let k = self.data.gens.len();
        for (lhs, rhs, name) in &self.data.syzygies {
            for a in 0..r {
                let place = |comb: &Vec<RingElem>| {
                    let mut parts = vec![RingElem::zero(&self.data.ring); k * r];
                    for g in 0..k {
                        parts[g * r + a] = comb[g].clone();
                    }
                    ModElem::ring_parts(parts)
                };
                out.push((place(lhs), place(rhs), name.clone()));
            }
        }
        out
    }

    fn coords(&self, _m: &ModElem) -> Option<BTreeMap<CoordKey, Rational>> {
        None
    }

    fn jet_rep(&self) -> Option<&JetRep> {
        Some(&self.jet)
    }

    fn describe(&self) -> String {
        self.label.clone()
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }

    fn fiber_labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        for g in &self.data.gens {
            for w in &self.wlabels {
                out.push(if w == "1" { g.clone() } else { format!("{g}|{w}") });
            }
        }
        out
    }

    fn format_elem(&self, m: &ModElem) -> String {
        let labels = self.fiber_labels();
        join_terms(
            m.0.iter()
                .zip(&labels)
                .filter(|(p, _)| !p.is_zero())
                .map(|(p, l)| fmt_scaled(&p.as_ring().to_string(), l))
                .collect(),
        )
    }
}
