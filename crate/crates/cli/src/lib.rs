//! Scenario runner behind the `avmod` binary.
//!
//! A scenario names a module expression and/or an atlas, a list of checks and
//! their parameters. Scenarios are read from a small JSON dialect; the
//! built-in suite is embedded in the binary.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use avmod::atlas::{atlas, casimir_invariance_check, glue_check, push_field, TensorLaw, TransitionRule};
use avmod::error::{Error, Result};
use avmod::gk::{bernstein_check_with, growth_exponent, growth_series, Frame, GrowthFit, BERNSTEIN_TOLERANCE, DEFAULT_TAIL};
use avmod::gl::{casimir, central_character, is_exterior_type, Rep};
use avmod::jets::JetRep;
use avmod::linalg::QMatrix;
use avmod::local_iso::{iso_generators, phi, round_trip, SmashWord};
use avmod::modules::expr::parse_module;
use avmod::modules::fixtures::{negative_control, negative_controls, BUILTIN_CONSTRUCTIONS};
use avmod::modules::{
    charged_twist, elliptic_gauge_data, gauge_module, minimal_differentiability, validate_smash, AvModule,
    Differentiability, FreeModule, ModElem,
};
use avmod::rational::{parse_rational, q, Rational};
use avmod::ring::{RingElem, RingSpec};
use avmod::weyl::VecField;

const BUILTIN: &str = include_str!("scenarios.json");

/// Exponent tolerance for `gk` checks with an expected value.
pub const GK_TOLERANCE: f64 = 0.15;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nmax: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atlas: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<String>,
    pub checks: Vec<String>,
    #[serde(default)]
    pub params: Params,
}

pub const CHECKS: &[&str] = &[
    "bernstein",
    "casimir-invariance",
    "casimir-table",
    "diff-order",
    "gauge-identity",
    "gk",
    "glue",
    "local-iso",
    "negative-controls",
    "obstruction",
    "reparametrization",
    "smash",
];

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub seed: u64,
    pub samples: usize,
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 0, samples: 64, timings: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub samples: usize,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn summary_line(&self) -> String {
        let parts: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                let mut s = format!("{}={}", c.check, if c.status == Status::Pass { "pass" } else { "FAIL" });
                if let Some(v) = &c.value {
                    s.push_str(&format!(" ({v})"));
                }
                if let (Status::Fail, Some(w)) = (c.status, &c.witness) {
                    s.push_str(&format!(" [{w}]"));
                }
                s
            })
            .collect();
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.scenario, parts.join("; "))
    }
}

/// Parses one scenario object or an array of them.
pub fn parse_scenarios(text: &str) -> Result<Vec<Scenario>> {
    let value: Value = serde_json::from_str(text).map_err(json_error(text))?;
    let list = match value {
        Value::Array(_) => serde_json::from_value::<Vec<Scenario>>(value),
        other => serde_json::from_value::<Scenario>(other).map(|s| vec![s]),
    }
    .map_err(|e| Error::InvalidInput(format!("scenario: {e}")))?;
    for s in &list {
        validate_scenario(s)?;
    }
    Ok(list)
}

fn json_error(text: &str) -> impl Fn(serde_json::Error) -> Error + '_ {
    move |e| {
        let pos: usize = text.lines().take(e.line().saturating_sub(1)).map(|l| l.len() + 1).sum::<usize>()
            + e.column().saturating_sub(1);
        Error::Parse { pos, msg: e.to_string() }
    }
}

/// Keeps parse failures; semantic rejections are left to the checks.
fn syntax_only<T>(r: Result<T>) -> Result<()> {
    match r {
        Err(e @ Error::Parse { .. }) => Err(e),
        _ => Ok(()),
    }
}

/// Checks names, module expressions, atlases, rules and reps up front.
pub fn validate_scenario(s: &Scenario) -> Result<()> {
    if s.checks.is_empty() {
        return Err(Error::InvalidInput(format!("scenario '{}' has no checks", s.name)));
    }
    for c in &s.checks {
        if !CHECKS.contains(&c.as_str()) {
            return Err(Error::InvalidInput(format!("scenario '{}': unknown check '{c}'", s.name)));
        }
    }
    if let Some(m) = &s.module {
        resolve_module(m)?;
    }
    if let Some(a) = &s.atlas {
        atlas(a)?;
    }
    if let Some(r) = &s.params.rule {
        syntax_only(TransitionRule::parse(r))?;
    }
    if let Some(r) = &s.params.rep {
        syntax_only(Rep::parse(r))?;
    }
    if let Some(l) = &s.params.lambda {
        lambda_of(l)?;
    }
    Ok(())
}

pub fn builtin_scenarios() -> Vec<Scenario> {
    let mut list = parse_scenarios(BUILTIN).expect("embedded scenarios parse");
    list.sort_by(|a, b| a.name.cmp(&b.name));
    list
}

/// Module expression, or `fixture:<name>` for a negative control.
pub fn resolve_module(text: &str) -> Result<Box<dyn AvModule>> {
    match text.strip_prefix("fixture:") {
        Some(name) => negative_control(name.trim()),
        None => parse_module(text),
    }
}

fn lambda_of(text: &str) -> Result<Rational> {
    parse_rational(text.trim()).ok_or(Error::Parse { pos: 0, msg: format!("invalid rational '{text}'") })
}

/// Parses `weyl`, `jets:<s>` or `jets` (truncation 1).
pub fn parse_frame(spec: &str, m: &dyn AvModule) -> Result<Frame> {
    let spec = spec.trim();
    match spec.split_once(':') {
        None if spec == "weyl" => Ok(Frame::weyl(m.ring())),
        None if spec == "jets" => Ok(Frame::with_jets(m.ring(), 1)),
        Some(("jets", s)) => {
            let s: u32 = s.trim().parse().map_err(|_| Error::Parse { pos: 5, msg: format!("invalid truncation '{s}'") })?;
            Ok(Frame::with_jets(m.ring(), s))
        }
        _ => Err(Error::Parse { pos: 0, msg: format!("unknown frame '{spec}'; use weyl or jets:<s>") }),
    }
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

struct Outcome {
    pass: bool,
    value: Option<Value>,
    witness: Option<String>,
}

impl Outcome {
    fn new(pass: bool, value: impl Into<Option<Value>>, witness: Option<String>) -> Self {
        Outcome { pass, value: value.into(), witness }
    }
}

fn need<'a, T>(x: &'a Option<T>, what: &str, s: &Scenario) -> Result<&'a T> {
    x.as_ref().ok_or_else(|| Error::InvalidInput(format!("scenario '{}' needs {what}", s.name)))
}

fn fit_value(fit: &GrowthFit) -> Value {
    serde_json::json!({
        "exponent": round6(fit.exponent),
        "offset": fit.offset,
        "residual": round6(fit.residual),
        "points": fit.points,
    })
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn check_smash(s: &Scenario) -> Result<Outcome> {
    let d = s.params.degree.unwrap_or(3);
    let exprs: Vec<String> = match &s.module {
        Some(m) => vec![m.clone()],
        None => BUILTIN_CONSTRUCTIONS.iter().map(|e| e.to_string()).collect(),
    };
    let mut checks = 0;
    for e in &exprs {
        let rep = validate_smash(resolve_module(e)?.as_ref(), d);
        checks += rep.checks;
        if !rep.passed() {
            return Ok(Outcome::new(false, Value::from(rep.failures), Some(rep.to_string())));
        }
    }
    Ok(Outcome::new(true, serde_json::json!({ "modules": exprs.len(), "checks": checks }), None))
}

fn check_negative_controls(s: &Scenario) -> Result<Outcome> {
    let d = s.params.degree.unwrap_or(3);
    let mut caught = Vec::new();
    for m in negative_controls()? {
        let rep = validate_smash(m.as_ref(), d);
        if rep.passed() || rep.violations.is_empty() {
            return Ok(Outcome::new(false, None, Some(format!("{} was not rejected", m.describe()))));
        }
        caught.push(Value::from(format!("{}: [{}] {}", m.describe(), rep.violations[0].kind, rep.violations[0].witness)));
    }
    Ok(Outcome::new(true, Value::Array(caught), None))
}

fn check_diff_order(s: &Scenario) -> Result<Outcome> {
    let m = resolve_module(need(&s.module, "a module", s)?)?;
    let got = minimal_differentiability(m.as_ref(), s.params.nmax.unwrap_or(4), s.params.degree.unwrap_or(6))?;
    let value = Value::from(got.to_string());
    Ok(match (got, s.params.expect.as_ref().and_then(|v| v.as_u64())) {
        (Differentiability::Order(n), Some(want)) if n as u64 == want => Outcome::new(true, value, None),
        (Differentiability::Order(_), None) => Outcome::new(true, value, None),
        (got, want) => Outcome::new(false, value, Some(format!("expected {want:?}, got {got}"))),
    })
}

fn check_gk(s: &Scenario) -> Result<Outcome> {
    let m = resolve_module(need(&s.module, "a module", s)?)?;
    let frame = parse_frame(s.params.frame.as_deref().unwrap_or("weyl"), m.as_ref())?;
    let seed = m.basis(0).into_iter().find(|b| !m.is_zero(b)).ok_or(Error::InvalidInput("zero module".into()))?;
    let series = growth_series(m.as_ref(), &frame, &[seed], s.params.l_max.unwrap_or(24), None)?;
    let fit = growth_exponent(&series, DEFAULT_TAIL)?;
    let mut value = fit_value(&fit);
    value["dims"] = serde_json::json!(series.dims);
    match s.params.expect.as_ref().and_then(|v| v.as_f64()) {
        Some(g) if (fit.exponent - g).abs() > GK_TOLERANCE => {
            Ok(Outcome::new(false, value, Some(format!("exponent {:.3} not within {GK_TOLERANCE} of {g}", fit.exponent))))
        }
        _ => Ok(Outcome::new(true, value, None)),
    }
}

fn check_bernstein(s: &Scenario) -> Result<Outcome> {
    let m = resolve_module(need(&s.module, "a module", s)?)?;
    let frame = parse_frame(s.params.frame.as_deref().unwrap_or("weyl"), m.as_ref())?;
    let n = s.params.n.unwrap_or(m.ring().dim());
    let rep = bernstein_check_with(m.as_ref(), n, s.params.l_max.unwrap_or(24), &frame, BERNSTEIN_TOLERANCE)?;
    let value = serde_json::json!({ "exponent": round6(rep.exponent), "n": n, "tolerance": rep.tolerance });
    Ok(Outcome::new(rep.passed, value, (!rep.passed).then(|| rep.to_string())))
}

fn glue_rule(s: &Scenario) -> Result<TransitionRule> {
    match (&s.params.rule, &s.params.lambda) {
        (Some(r), _) => TransitionRule::parse(r),
        (None, Some(l)) => TransitionRule::det_power(&lambda_of(l)?),
        (None, None) => Err(Error::InvalidInput(format!("scenario '{}' needs a rule or lambda", s.name))),
    }
}

fn check_glue(s: &Scenario) -> Result<Outcome> {
    let a = atlas(need(&s.atlas, "an atlas", s)?)?;
    let rule = glue_rule(s)?;
    let rep = glue_check(&a, &rule, s.params.degree.unwrap_or(3))?;
    let mut value = serde_json::json!({ "checks": rep.checks, "failures": rep.failures });
    if let Some(c) = &rep.intertwiners {
        value["intertwiners"] = serde_json::json!(c);
    }
    if let Some(want) = &s.params.expect {
        let got = serde_json::json!(rep.intertwiners.clone().unwrap_or_default());
        let ok = *want == got;
        return Ok(Outcome::new(ok, value, (!ok).then(|| format!("intertwiners {got}, expected {want}"))));
    }
    Ok(Outcome::new(rep.passed(), value, rep.witnesses.first().cloned()))
}

fn check_obstruction(s: &Scenario) -> Result<Outcome> {
    let rep = Rep::parse(need(&s.params.rep, "a rep", s)?)?;
    let got = is_exterior_type(&rep)?;
    let value = match got {
        Some(k) => Value::from(k),
        None => Value::from("none"),
    };
    let ok = s.params.expect.as_ref().is_none_or(|w| *w == value);
    Ok(Outcome::new(ok, value.clone(), (!ok).then(|| format!("expected {:?}, got {value}", s.params.expect))))
}

fn check_casimir_table(s: &Scenario) -> Result<Outcome> {
    let n_max = s.params.n.unwrap_or(4);
    let mut rows = 0;
    for n in 1..=n_max {
        for k in 0..=n {
            let rep = Rep::ext(k, n)?;
            let want = [k as i64, (k * (n + 1 - k)) as i64];
            for (idx, w) in want.iter().enumerate() {
                let c = casimir(idx + 1, &rep)?;
                if c != QMatrix::scalar(rep.dim(), &q(*w)) {
                    let witness = format!("Omega_{} on ext({k},{n}) is {:?}, expected {w}", idx + 1, c.as_scalar());
                    return Ok(Outcome::new(false, None, Some(witness)));
                }
            }
            rows += 1;
        }
    }
    Ok(Outcome::new(true, Value::from(rows), None))
}

fn check_casimir_invariance(s: &Scenario) -> Result<Outcome> {
    let a = atlas(need(&s.atlas, "an atlas", s)?)?;
    let k_max = s.params.k.unwrap_or(2);
    for k in 1..=k_max {
        for (f, t) in [(0, 1), (1, 0)] {
            let c = casimir_invariance_check(&a, f, t, k, TensorLaw::Correct)?;
            if !c.passed {
                return Ok(Outcome::new(false, None, c.witness.or(Some(format!("k = {k}")))));
            }
        }
    }
    Ok(Outcome::new(true, Value::from(k_max), None))
}

fn check_gauge_identity(_: &Scenario) -> Result<Outcome> {
    let m = gauge_module(elliptic_gauge_data(false), &JetRep::trivial(1))?;
    let a = m.ring().clone();
    let t = RingElem::var(&a, 0);
    let y = RingElem::var(&a, 1);
    let tau = VecField::basis(&RingElem::one(&a), 0);
    let lhs = m.act_field(&tau, &m.elem(&y, 1, 0))?;
    let rhs = m.act_field(&tau, &m.elem(&t.pow(2).sub(&RingElem::one(&a)), 0, 0))?;
    let want = t.pow(4).add(&t.pow(2).scale(&q(4))).sub(&RingElem::one(&a));
    let l = m.as_multiple_of(&lhs, 1, 0);
    let r = m.as_multiple_of(&rhs, 1, 0);
    let ok = l.as_ref() == Some(&want) && r.as_ref() == Some(&want);
    let witness = (!ok).then(|| format!("tau(yY) = {}, tau((t^2-1)T) = {}", m.format_elem(&lhs), m.format_elem(&rhs)));
    Ok(Outcome::new(ok, Value::from(format!("({want})Y")), witness))
}

fn check_reparametrization(s: &Scenario) -> Result<Outcome> {
    let a = atlas(s.atlas.as_deref().unwrap_or("gm"))?;
    let lam = lambda_of(s.params.lambda.as_deref().unwrap_or("1"))?;
    let t = a.chart(0).overlap.clone();
    let sr = a.chart(1).overlap.clone();
    let m = charged_twist(Box::new(FreeModule::ring_module(&t)), &lam);
    for k in -3i64..=3 {
        for l in -3i64..=3 {
            let v = VecField::basis(&RingElem::monomial(&sr, &[k], q(1)), 0);
            let vt = push_field(&a, 1, 0, &v)?;
            let f = a.transform_function(1, 0, &RingElem::monomial(&sr, &[l], q(1)))?;
            let out = m.act_field(&vt, &ModElem::ring_parts(vec![f]))?;
            let back = a.transform_function(0, 1, out.component(0).as_ring())?;
            let want = RingElem::monomial(&sr, &[k + l - 1], q(l) + q(k - 2) * &lam);
            if back != want {
                return Ok(Outcome::new(false, None, Some(format!("k = {k}, l = {l}: {back} != {want}"))));
            }
        }
    }
    Ok(Outcome::new(true, Value::from(49), None))
}

fn check_local_iso(s: &Scenario, opts: &RunOptions) -> Result<Outcome> {
    let degree = s.params.degree.unwrap_or(4);
    let rings = [RingSpec::poly(&["x"]), RingSpec::poly(&["x", "y"])];
    let mut gens = 0;
    for ring in &rings {
        for t in 0..=4 {
            for e in iso_generators(ring, t, degree) {
                if !round_trip(&e, ring, t)? {
                    return Ok(Outcome::new(false, None, Some(format!("round trip fails on {e} at s = {t}"))));
                }
                gens += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for i in 0..opts.samples {
        let ring = &rings[i % 2];
        let a = SmashWord::random(ring, &mut rng, 2, 3);
        let b = SmashWord::random(ring, &mut rng, 2, 3);
        let lhs = phi(&a.mul(&b)?, 3)?;
        let rhs = phi(&a, 3)?.pbw_mul(&phi(&b, 3)?)?;
        if !lhs.sub(&rhs)?.is_zero() {
            return Ok(Outcome::new(false, None, Some(format!("phi not multiplicative on {a} * {b}"))));
        }
    }
    Ok(Outcome::new(true, serde_json::json!({ "generators": gens, "products": opts.samples }), None))
}

fn run_check(name: &str, s: &Scenario, opts: &RunOptions) -> Result<Outcome> {
    match name {
        "smash" => check_smash(s),
        "negative-controls" => check_negative_controls(s),
        "diff-order" => check_diff_order(s),
        "gk" => check_gk(s),
        "bernstein" => check_bernstein(s),
        "glue" => check_glue(s),
        "obstruction" => check_obstruction(s),
        "casimir-table" => check_casimir_table(s),
        "casimir-invariance" => check_casimir_invariance(s),
        "gauge-identity" => check_gauge_identity(s),
        "reparametrization" => check_reparametrization(s),
        "local-iso" => check_local_iso(s, opts),
        other => Err(Error::InvalidInput(format!("unknown check '{other}'"))),
    }
}

pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Result<Report> {
    validate_scenario(s)?;
    let mut checks = Vec::new();
    for name in &s.checks {
        let start = Instant::now();
        let outcome = match (run_check(name, s, opts), &s.params.expect_error) {
            (Err(e), Some(kind)) if error_kind(&e) == *kind => Outcome::new(true, Value::from(e.to_string()), None),
            (Err(e), Some(kind)) => Outcome::new(false, None, Some(format!("expected {kind}, got {e}"))),
            (Ok(_), Some(kind)) => Outcome::new(false, None, Some(format!("expected {kind}, got success"))),
            (Err(e @ Error::Parse { .. }), None) => return Err(e),
            (Err(e), None) => Outcome::new(false, None, Some(e.to_string())),
            (Ok(o), None) => o,
        };
        checks.push(CheckResult {
            check: name.clone(),
            status: if outcome.pass { Status::Pass } else { Status::Fail },
            value: outcome.value,
            witness: outcome.witness,
            millis: opts.timings.then(|| start.elapsed().as_millis() as u64),
        });
    }
    Ok(Report {
        scenario: s.name.clone(),
        seed: opts.seed,
        samples: opts.samples,
        passed: checks.iter().all(|c| c.status == Status::Pass),
        checks,
    })
}

/// Runs scenarios concurrently; reports come back sorted by scenario name.
pub fn run_scenarios(list: &[Scenario], opts: &RunOptions) -> Result<Vec<Report>> {
    let mut reports = list.par_iter().map(|s| run_scenario(s, opts)).collect::<Result<Vec<_>>>()?;
    reports.sort_by(|a, b| a.scenario.cmp(&b.scenario));
    Ok(reports)
}

/// The built-in suite, optionally restricted to scenarios whose name or
/// checks contain `filter`.
pub fn run_all(filter: Option<&str>, opts: &RunOptions) -> Result<Vec<Report>> {
    let list: Vec<Scenario> = builtin_scenarios()
        .into_iter()
        .filter(|s| filter.is_none_or(|f| s.name.contains(f) || s.checks.iter().any(|c| c.contains(f))))
        .collect();
    run_scenarios(&list, opts)
}

pub fn all_passed(reports: &[Report]) -> bool {
    reports.iter().all(|r| r.passed)
}

pub fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

/// `dim`, the Casimir scalars `Omega_1..Omega_k` (or `null` when not scalar),
/// the central character and the exterior type of a rep.
pub fn rep_summary(expr: &str, k: usize) -> Result<Value> {
    let rep = Rep::parse(expr)?;
    let mut cas = Vec::new();
    for i in 1..=k {
        cas.push(match casimir(i, &rep)?.as_scalar() {
            Some(c) => Value::from(c.to_string()),
            None => Value::Null,
        });
    }
    let chi = match central_character(&rep) {
        Ok(c) => Value::from(c.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
        Err(Error::NotScalar(_)) => Value::from("not scalar"),
        Err(e) => return Err(e),
    };
    let ext = match is_exterior_type(&rep) {
        Ok(Some(k)) => Value::from(k),
        Ok(None) | Err(Error::NotScalar(_)) => Value::from("none"),
        Err(e) => return Err(e),
    };
    Ok(serde_json::json!({
        "expr": rep.to_string(),
        "dim": rep.dim(),
        "integrable": rep.is_integrable(),
        "casimirs": cas,
        "central_character": chi,
        "exterior_type": ext,
    }))
}

/// Renders a parse error against its input with a caret under the position.
pub fn show_error(e: &Error, input: Option<&str>) -> String {
    match (e, input) {
        (Error::Parse { pos, msg }, Some(text)) if *pos <= text.len() => {
            format!("error: {msg} at position {pos}\n  {text}\n  {}^", " ".repeat(*pos))
        }
        _ => format!("error: {e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse_and_are_sorted() {
        let list = builtin_scenarios();
        assert!(list.windows(2).all(|w| w[0].name < w[1].name));
        assert!(list.iter().any(|s| s.name == "elliptic-gauge"));
    }

    #[test]
    fn error_kinds() {
        assert_eq!(error_kind(&Error::NotIntegrable("x".into())), "NotIntegrable");
        assert_eq!(error_kind(&Error::Parse { pos: 1, msg: "m".into() }), "Parse");
    }
}
