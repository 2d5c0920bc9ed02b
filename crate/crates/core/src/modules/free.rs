use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gl::Rep;
use crate::jets::JetRep;
use crate::linalg::RingMatrix;
use crate::rational::Rational;
use crate::ring::{check_same, Ring, RingElem, RingKind};
use crate::weyl::VecField;

use super::{ring_basis_elems, AvModule, ModElem};

/// `A (x) W` with `f D_i (g w) = f D_i(g) w + f Gamma_i g w + sum_{k != 0} (1/k!) D^k f g X^k d_i w`.
#[derive(Clone, Debug)]
pub struct FreeModule {
    ring: Ring,
    jet: JetRep,
    gamma: Option<Vec<RingMatrix>>,
    labels: Vec<String>,
    label: String,
}

fn default_labels(dim: usize) -> Vec<String> {
    if dim == 1 {
        vec!["w".into()]
    } else {
        (1..=dim).map(|i| format!("w{i}")).collect()
    }
}

impl FreeModule {
    pub fn new(ring: &Ring, jet: JetRep, labels: Option<Vec<String>>, label: &str) -> Result<Self> {
        if jet.n() != ring.dim() {
            return Err(Error::InvalidRep(format!(
                "fiber module in dimension {} on a {}-dimensional chart",
                jet.n(),
                ring.dim()
            )));
        }
        let labels = labels.unwrap_or_else(|| default_labels(jet.dim()));
        assert_eq!(labels.len(), jet.dim());
        Ok(FreeModule { ring: ring.clone(), jet, gamma: None, labels, label: label.to_string() })
    }

    /// The coordinate ring as a module over itself.
    pub fn ring_module(ring: &Ring) -> Self {
        FreeModule {
            ring: ring.clone(),
            jet: JetRep::trivial(ring.dim()),
            gamma: None,
            labels: vec!["1".into()],
            label: ring.name(),
        }
    }

    pub fn from_rep(ring: &Ring, rep: &Rep) -> Result<Self> {
        let labels = rep.labels().to_vec();
        Self::new(ring, JetRep::from_rep(rep), Some(labels), &format!("T({}, {rep})", ring.name()))
    }

    /// The rank-two module `A (x) W_alpha` on a one-dimensional chart.
    pub fn alpha_module(ring: &Ring, alpha: &Rational) -> Result<Self> {
        let w = JetRep::alpha(alpha);
        let label = format!("T({}, {})", ring.name(), w.label());
        Self::new(ring, w, Some(vec!["v".into(), "u".into()]), &label)
    }

    /// Adds a connection term `Gamma_i` for each basis derivation.
    pub fn with_connection(mut self, gamma: Vec<RingMatrix>) -> Result<Self> {
        if gamma.len() != self.ring.dim() || gamma.iter().any(|g| g.size() != self.jet.dim()) {
            return Err(Error::InvalidInput("connection has the wrong shape".into()));
        }
        for g in &gamma {
            check_same(&self.ring, g.ring())?;
        }
        self.label = format!("{} + connection", self.label);
        self.gamma = Some(gamma);
        Ok(self)
    }

    pub fn jet(&self) -> &JetRep {
        &self.jet
    }

    pub fn connection(&self) -> Option<&[RingMatrix]> {
        self.gamma.as_deref()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `g w_a`.
    pub fn elem(&self, g: &RingElem, a: usize) -> ModElem {
        let mut parts = vec![RingElem::zero(&self.ring); self.jet.dim()];
        parts[a] = g.clone();
        ModElem::ring_parts(parts)
    }

    /// The same module over a localization of its ring.
    pub fn localize(&self, target: &Ring) -> Result<FreeModule> {
        match target.kind() {
            RingKind::Localized { base, .. } if crate::ring::same_ring(base, &self.ring) => {}
            _ => return Err(Error::SpecMismatch(self.ring.name(), target.name())),
        }
        let gamma = match &self.gamma {
            None => None,
            Some(gs) => Some(
                gs.iter()
                    .map(|g| {
                        let n = g.size();
                        let rows = (0..n)
                            .map(|i| (0..n).map(|j| g.get(i, j).localize(target)).collect::<Result<Vec<_>>>())
                            .collect::<Result<Vec<_>>>()?;
                        Ok(RingMatrix::from_rows(target, rows))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Ok(FreeModule {
            ring: target.clone(),
            jet: self.jet.clone(),
            gamma,
            labels: self.labels.clone(),
            label: format!("{} localized", self.label),
        })
    }

    /// Image of an element in the localized module.
    pub fn localize_elem(&self, target: &Ring, m: &ModElem) -> Result<ModElem> {
        Ok(ModElem::ring_parts(
            m.0.iter().map(|p| p.as_ring().localize(target)).collect::<Result<Vec<_>>>()?,
        ))
    }
}

impl AvModule for FreeModule {
    fn ring(&self) -> &Ring {
        &self.ring
    }

    fn rank(&self) -> usize {
        self.jet.dim()
    }

    fn act_ring(&self, f: &RingElem, m: &ModElem) -> Result<ModElem> {
        check_same(&self.ring, f.ring())?;
        Ok(ModElem::ring_parts(m.0.iter().map(|p| f.mul(p.as_ring())).collect()))
    }

    fn act_field(&self, v: &VecField, m: &ModElem) -> Result<ModElem> {
        check_same(&self.ring, v.ring())?;
        let r = self.jet.dim();
        let g: Vec<&RingElem> = m.0.iter().map(|p| p.as_ring()).collect();
        for x in &g {
            check_same(&self.ring, x.ring())?;
        }
        let mut out: Vec<RingElem> = vec![RingElem::zero(&self.ring); r];
        let top = self.jet.top_degree();
        for (i, f) in v.comps().iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for a in 0..r {
                if !g[a].is_zero() {
                    out[a] = out[a].add(&f.mul(&g[a].derive(i)));
                }
            }
            if let Some(gamma) = &self.gamma {
                let gi = &gamma[i];
                for a in 0..r {
                    for b in 0..r {
                        let c = gi.get(a, b);
                        if !c.is_zero() && !g[b].is_zero() {
                            out[a] = out[a].add(&f.mul(c).mul(g[b]));
                        }
                    }
                }
            }
            if top < 0 {
                continue;
            }
            let taylor: BTreeMap<Vec<u32>, RingElem> = f.taylor_shift((top + 1) as u32);
            for (gen, mat) in self.jet.acting() {
                if gen.dir() != i {
                    continue;
                }
                let Some(coef) = taylor.get(gen.exp()) else { continue };
                for a in 0..r {
                    for b in 0..r {
                        let c = mat.get(a, b);
                        if !num_traits::Zero::is_zero(c) && !g[b].is_zero() {
                            out[a] = out[a].add(&coef.mul(g[b]).scale(c));
                        }
                    }
                }
            }
        }
        Ok(ModElem::ring_parts(out))
    }

    fn basis(&self, d: u32) -> Vec<ModElem> {
        ring_basis_elems(&self.ring, self.jet.dim(), d)
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

/// `T(A, W)` for a jet module `W` on the chart `ring`.
pub fn tensor_module(ring: &Ring, w: &JetRep) -> Result<FreeModule> {
    FreeModule::new(ring, w.clone(), None, &format!("T({}, {})", ring.name(), w.label()))
}

fn kron(a: &RingMatrix, b: &RingMatrix) -> RingMatrix {
    let (da, db) = (a.size(), b.size());
    let mut out = RingMatrix::zeros(a.ring(), da * db);
    for i in 0..da {
        for j in 0..da {
            if a.get(i, j).is_zero() {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out.set(i * db + k, j * db + l, a.get(i, j).mul(b.get(k, l)));
                }
            }
        }
    }
    out
}

/// Contragredient module of a free module.
pub fn av_dual(m: &dyn AvModule) -> Result<FreeModule> {
    let any = as_free(m).ok_or_else(|| Error::NotFree(m.describe()))?;
    let gamma = any.gamma.as_ref().map(|gs| {
        gs.iter()
            .map(|g| g.transpose().scale(&RingElem::constant(&any.ring, crate::rational::q(-1))))
            .collect()
    });
    Ok(FreeModule {
        ring: any.ring.clone(),
        jet: any.jet.dual(),
        gamma,
        labels: any.labels.iter().map(|l| if l == "1" { "1".into() } else { format!("{l}*") }).collect(),
        label: format!("dual({})", any.label),
    })
}

/// Tensor product over the ring, with the Leibniz action.
pub fn av_tensor(a: &dyn AvModule, b: &dyn AvModule) -> Result<FreeModule> {
    let x = as_free(a).ok_or_else(|| Error::NotFree(a.describe()))?;
    let y = as_free(b).ok_or_else(|| Error::NotFree(b.describe()))?;
    check_same(&x.ring, &y.ring)?;
    let jet = x.jet.tensor(&y.jet)?;
    let gamma = if x.gamma.is_none() && y.gamma.is_none() {
        None
    } else {
        let ix = RingMatrix::identity(&x.ring, x.jet.dim());
        let iy = RingMatrix::identity(&x.ring, y.jet.dim());
        let zx = RingMatrix::zeros(&x.ring, x.jet.dim());
        let zy = RingMatrix::zeros(&x.ring, y.jet.dim());
        Some(
            (0..x.ring.dim())
                .map(|i| {
                    let gx = x.gamma.as_ref().map_or(&zx, |g| &g[i]);
                    let gy = y.gamma.as_ref().map_or(&zy, |g| &g[i]);
                    kron(gx, &iy).add(&kron(&ix, gy))
                })
                .collect(),
        )
    };
    let mut labels = Vec::new();
    for l1 in &x.labels {
        for l2 in &y.labels {
            labels.push(match (l1.as_str(), l2.as_str()) {
                ("1", _) => l2.clone(),
                (_, "1") => l1.clone(),
                _ => format!("{l1}|{l2}"),
            });
        }
    }
    Ok(FreeModule { ring: x.ring.clone(), jet, gamma, labels, label: format!("mtensor({}, {})", x.label, y.label) })
}

fn as_free(m: &dyn AvModule) -> Option<&FreeModule> {
    m.as_any().downcast_ref::<FreeModule>()
}
