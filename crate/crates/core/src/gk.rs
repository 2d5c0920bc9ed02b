//! Growth of modules under finite frames.
//!
//! `F^l M0` is built layer by layer: only the vectors added at step `l - 1`
//! need to be hit by the frame, since the identity lies in every frame.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::{generators, JetGen};
use crate::linalg::SparseSpan;
use crate::modules::{jet_act, AvModule, ModElem};
use crate::ring::{Ring, RingElem};
use crate::weyl::VecField;

pub const BERNSTEIN_TOLERANCE: f64 = 0.2;
pub const DEFAULT_TAIL: f64 = 0.5;

#[derive(Clone, Debug)]
pub enum FrameOp {
    Identity,
    Mul(RingElem),
    Field(VecField),
    Jet(JetGen),
}

impl FrameOp {
    fn apply(&self, m: &dyn AvModule, x: &ModElem) -> Result<ModElem> {
        match self {
            FrameOp::Identity => Ok(x.clone()),
            FrameOp::Mul(f) => m.act_ring(f, x),
            FrameOp::Field(v) => m.act_field(v, x),
            FrameOp::Jet(g) => jet_act(m, g.exp(), g.dir(), x),
        }
    }

    /// Upper bound on how far the operator raises the monomial degree.
    fn shift(&self) -> i64 {
        match self {
            FrameOp::Identity => 0,
            FrameOp::Mul(f) => f.total_degree().max(0),
            FrameOp::Field(v) => v.comps().iter().map(|c| c.total_degree()).max().unwrap_or(0).max(1),
            FrameOp::Jet(g) => (g.exp().iter().sum::<u32>() as i64).max(1),
        }
    }
}

impl fmt::Display for FrameOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameOp::Identity => write!(f, "1"),
            FrameOp::Mul(g) => write!(f, "{g}"),
            FrameOp::Field(v) => write!(f, "{v}"),
            FrameOp::Jet(g) => write!(f, "{g}"),
        }
    }
}

/// A finite list of operators; the identity is always present.
#[derive(Clone, Debug)]
pub struct Frame {
    ops: Vec<FrameOp>,
}

impl Frame {
    pub fn new(ops: Vec<FrameOp>) -> Self {
        let mut all = vec![FrameOp::Identity];
        all.extend(ops.into_iter().filter(|o| !matches!(o, FrameOp::Identity)));
        Frame { ops: all }
    }

    /// `{1, x_i, d_i}`.
    pub fn weyl(ring: &Ring) -> Self {
        let n = ring.nvars();
        let mut ops = Vec::new();
        for i in 0..n {
            ops.push(FrameOp::Mul(RingElem::var(ring, i)));
        }
        for i in 0..n {
            ops.push(FrameOp::Field(VecField::basis(&RingElem::one(ring), i)));
        }
        Frame::new(ops)
    }

    /// The Weyl frame together with the jet generators of degree `0..=s`.
    pub fn with_jets(ring: &Ring, s: u32) -> Self {
        let mut f = Frame::weyl(ring);
        f.ops.extend(generators(ring.nvars(), s).into_iter().filter(|g| g.degree() >= 0).map(FrameOp::Jet));
        f
    }

    pub fn push(&mut self, op: FrameOp) {
        if !matches!(op, FrameOp::Identity) {
            self.ops.push(op);
        }
    }

    pub fn ops(&self) -> &[FrameOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max_shift(&self) -> i64 {
        self.ops.iter().map(|o| o.shift()).max().unwrap_or(0)
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.ops.iter().map(|o| o.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthSeries {
    pub dims: Vec<usize>,
    pub window: i64,
}

impl GrowthSeries {
    pub fn l_max(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    /// Rows `l,dim,log(l+1),log(dim)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,dim,log_l,log_dim\n");
        for (l, d) in self.dims.iter().enumerate() {
            out.push_str(&format!("{l},{d},{:.6},{:.6}\n", ((l + 1) as f64).ln(), (*d as f64).ln()));
        }
        out
    }
}

fn elem_degree(m: &dyn AvModule, x: &ModElem) -> Result<i64> {
    let coords = m.coords(x).ok_or_else(|| Error::InvalidInput(format!("{} has no monomial coordinates", m.describe())))?;
    Ok(coords.keys().map(|(_, e)| e.iter().map(|a| a.abs()).sum::<i64>()).max().unwrap_or(0))
}

/// `d_l = dim F^l M0` for `l = 0..=l_max`. With `window = None` the window is
/// `deg M0 + l_max * max shift`.
pub fn growth_series(
    m: &dyn AvModule,
    frame: &Frame,
    seed: &[ModElem],
    l_max: usize,
    window: Option<i64>,
) -> Result<GrowthSeries> {
    let mut span = SparseSpan::new();
    let mut frontier = Vec::new();
    let mut seed_deg = 0;
    for x in seed {
        seed_deg = seed_deg.max(elem_degree(m, x)?);
        if span.insert(m.coords(x).expect("checked above")) {
            frontier.push(x.clone());
        }
    }
    if span.dim() == 0 {
        return Err(Error::InvalidInput("seed spans the zero space".into()));
    }
    let window = window.unwrap_or(seed_deg + l_max as i64 * frame.max_shift());
    if seed_deg > window {
        return Err(Error::WindowTooSmall { window, reached: seed_deg });
    }
    let mut dims = vec![span.dim()];
    let moving: Vec<&FrameOp> = frame.ops().iter().filter(|o| !matches!(o, FrameOp::Identity)).collect();
    for _ in 1..=l_max {
        let images: Vec<ModElem> = frontier
            .par_iter()
            .flat_map_iter(|x| moving.iter().map(move |o| o.apply(m, x)))
            .collect::<Result<_>>()?;
        let mut next = Vec::new();
        for y in images {
            let deg = elem_degree(m, &y)?;
            if deg > window {
                return Err(Error::WindowTooSmall { window, reached: deg });
            }
            if span.insert(m.coords(&y).expect("checked above")) {
                next.push(y);
            }
        }
        frontier = next;
        dims.push(span.dim());
    }
    Ok(GrowthSeries { dims, window })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthFit {
    pub exponent: f64,
    pub offset: f64,
    pub residual: f64,
    pub points: usize,
}

/// Least-squares slope of `log d_l` against `log(l + c)` over the last
/// `tail` fraction of indices. The offset `c` ranges over a grid in
/// `[0, l_max / 2]` and the fit with the least RMS residual is kept.
pub fn growth_exponent(series: &GrowthSeries, tail: f64) -> Result<GrowthFit> {
    let l_max = series.l_max();
    if l_max < 8 {
        return Err(Error::InvalidInput(format!("l_max = {l_max} < 8")));
    }
    if !(tail > 0.0 && tail <= 1.0) {
        return Err(Error::InvalidInput(format!("tail fraction {tail} outside (0, 1]")));
    }
    let start = ((l_max as f64) * (1.0 - tail)).floor() as usize;
    let tail_dims = &series.dims[start..];
    let points = tail_dims.len();
    let ys: Vec<f64> = tail_dims.iter().map(|&d| (d.max(1) as f64).ln()).collect();
    if tail_dims.windows(2).all(|w| w[0] == w[1]) {
        return Ok(GrowthFit { exponent: 0.0, offset: 0.0, residual: 0.0, points });
    }
    let steps = 2 * l_max;
    let best = (0..=steps)
        .map(|t| {
            let c = t as f64 / 4.0;
            let xs: Vec<f64> = (start..=l_max).map(|l| (l as f64 + c).max(0.5).ln()).collect();
            let (slope, residual) = fit_line(&xs, &ys);
            (residual, slope, c)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("nonempty grid");
    Ok(GrowthFit { exponent: best.1, offset: best.2, residual: best.0, points })
}

fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let icpt = my - slope * mx;
    let res = (xs.iter().zip(ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum::<f64>() / k).sqrt();
    (slope, res)
}

#[derive(Clone, Debug, Serialize)]
pub struct BernsteinReport {
    pub module: String,
    pub n: usize,
    pub exponent: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub dims: Vec<usize>,
}

impl fmt::Display for BernsteinReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: exponent {:.3} (residual {:.4}) against n = {} with tolerance {}: {}",
            self.module,
            self.exponent,
            self.residual,
            self.n,
            self.tolerance,
            if self.passed { "pass" } else { "fail" }
        )
    }
}

/// Measures the cyclic D-submodule generated by the first nonzero basis
/// element of `m` under the frame `{1, x_i, d_i}`.
pub fn bernstein_check(m: &dyn AvModule, n: usize, l_max: usize) -> Result<BernsteinReport> {
    bernstein_check_with(m, n, l_max, &Frame::weyl(m.ring()), BERNSTEIN_TOLERANCE)
}

pub fn bernstein_check_with(
    m: &dyn AvModule,
    n: usize,
    l_max: usize,
    frame: &Frame,
    tolerance: f64,
) -> Result<BernsteinReport> {
    let gen = m
        .basis(0)
        .into_iter()
        .find(|b| !m.is_zero(b))
        .ok_or_else(|| Error::InvalidInput(format!("{} has no nonzero degree-0 element", m.describe())))?;
    let series = growth_series(m, frame, &[gen], l_max, None)?;
    let fit = growth_exponent(&series, DEFAULT_TAIL)?;
    Ok(BernsteinReport {
        module: m.describe(),
        n,
        exponent: fit.exponent,
        residual: fit.residual,
        tolerance,
        passed: fit.exponent >= n as f64 - tolerance,
        dims: series.dims,
    })
}
