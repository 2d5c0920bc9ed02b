use crate::error::{Error, Result};
use crate::gl::Rep;
use crate::jets::JetRep;
use crate::rational::{q, Rational};
use crate::ring::{check_same, multi_indices, Ring, RingElem, RingKind, RingSpec};
use crate::weyl::{DeltaElem, VecField};

use super::{AvModule, ModElem, Part};

/// `T(k[d] delta_p, W)` on affine space.
#[derive(Clone, Debug)]
pub struct DeltaTensor {
    ring: Ring,
    point: Vec<Rational>,
    jet: JetRep,
    labels: Vec<String>,
    label: String,
}

impl DeltaTensor {
    pub fn new(ring: &Ring, point: &[Rational], jet: JetRep, labels: Option<Vec<String>>) -> Result<Self> {
        if !matches!(ring.kind(), RingKind::Poly) || ring.nvars() != point.len() {
            return Err(Error::InvalidRing(format!(
                "delta modules at a point of dimension {} need a polynomial ring, got {}",
                point.len(),
                ring.name()
            )));
        }
        if jet.n() != ring.dim() {
            return Err(Error::InvalidRep("fiber module of the wrong dimension".into()));
        }
        let labels = labels.unwrap_or_else(|| {
            if jet.dim() == 1 {
                vec!["w".into()]
            } else {
                (1..=jet.dim()).map(|i| format!("w{i}")).collect()
            }
        });
        let pt: Vec<String> = point.iter().map(crate::rational::fmt_rational).collect();
        let label = format!("T(delta[{}], {})", pt.join(","), jet.label());
        Ok(DeltaTensor { ring: ring.clone(), point: point.to_vec(), jet, labels, label })
    }

    /// The delta-function module itself (trivial fiber) in `n` variables.
    pub fn delta(point: &[Rational]) -> Result<Self> {
        let names: Vec<String> = if point.len() == 1 {
            vec!["x".into()]
        } else {
            (1..=point.len()).map(|i| format!("x{i}")).collect()
        };
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let ring = RingSpec::poly(&refs);
        Self::new(&ring, point, JetRep::trivial(point.len()), Some(vec!["1".into()]))
    }

    pub fn point(&self) -> &[Rational] {
        &self.point
    }

    /// `d^b delta (x) w_a`.
    pub fn elem(&self, b: Vec<u32>, a: usize) -> ModElem {
        let mut parts = vec![Part::Delta(DeltaElem::zero(&self.point)); self.jet.dim()];
        parts[a] = Part::Delta(DeltaElem::basis(&self.point, b));
        ModElem(parts)
    }
}

impl AvModule for DeltaTensor {
    fn ring(&self) -> &Ring {
        &self.ring
    }

    fn rank(&self) -> usize {
        self.jet.dim()
    }

    fn act_ring(&self, f: &RingElem, m: &ModElem) -> Result<ModElem> {
        check_same(&self.ring, f.ring())?;
        Ok(ModElem(
            m.0.iter().map(|p| Ok(Part::Delta(p.as_delta().act_ring(f)?))).collect::<Result<Vec<_>>>()?,
        ))
    }

    fn act_field(&self, v: &VecField, m: &ModElem) -> Result<ModElem> {
        check_same(&self.ring, v.ring())?;
        let r = self.jet.dim();
        let p: Vec<&DeltaElem> = m.0.iter().map(|x| x.as_delta()).collect();
        let mut out: Vec<DeltaElem> = p.iter().map(|x| x.act_field(v)).collect::<Result<Vec<_>>>()?;
        let top = self.jet.top_degree();
        if top >= 0 {
            for (i, f) in v.comps().iter().enumerate() {
                if f.is_zero() {
                    continue;
                }
                let taylor = f.taylor_shift((top + 1) as u32);
                for (gen, mat) in self.jet.acting() {
                    if gen.dir() != i {
                        continue;
                    }
                    let Some(coef) = taylor.get(gen.exp()) else { continue };
                    for a in 0..r {
                        for b in 0..r {
                            let c = mat.get(a, b);
                            if !num_traits::Zero::is_zero(c) && !p[b].is_zero() {
                                out[a] = out[a].add(&p[b].act_ring(coef)?.scale(c));
                            }
                        }
                    }
                }
            }
        }
        Ok(ModElem(out.into_iter().map(Part::Delta).collect()))
    }

    fn basis(&self, d: u32) -> Vec<ModElem> {
        let mut out = Vec::new();
        for b in multi_indices(self.point.len(), d) {
            for a in 0..self.jet.dim() {
                out.push(self.elem(b.clone(), a));
            }
        }
        out
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
        self.labels.clone()
    }
}

/// `R_p(W) = T(k[d] delta_p, W (x) det(1))`.
pub fn rudakov_module(ring: &Ring, point: &[Rational], w: &Rep) -> Result<DeltaTensor> {
    let twisted = Rep::tensor(w, &Rep::det(&q(1), w.n()))?;
    let labels = twisted.labels().to_vec();
    let mut m = DeltaTensor::new(ring, point, JetRep::from_rep(&twisted), Some(labels))?;
    let pt: Vec<String> = point.iter().map(crate::rational::fmt_rational).collect();
    m.label = format!("rudakov([{}], {w})", pt.join(","));
    Ok(m)
}
