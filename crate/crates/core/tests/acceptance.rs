//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero when any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use avmod::atlas::{atlas, casimir_invariance_check, glue_check, push_field, TensorLaw, TransitionRule};
use avmod::error::Error;
use avmod::gk::{growth_exponent, growth_series, Frame, DEFAULT_TAIL};
use avmod::gl::{casimir, is_exterior_type, Rep};
use avmod::jets::JetRep;
use avmod::linalg::QMatrix;
use avmod::local_iso::{iso_generators, phi, round_trip, SmashWord};
use avmod::modules::expr::parse_module;
use avmod::modules::fixtures::{negative_controls, BUILTIN_CONSTRUCTIONS};
use avmod::modules::{
    charged_twist, elliptic_gauge_data, gauge_module, minimal_differentiability, validate_smash, AvModule,
    DeltaTensor, Differentiability, FreeModule, ModElem,
};
use avmod::rational::{q, qf};
use avmod::ring::{RingElem, RingSpec};
use avmod::weyl::VecField;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn elliptic_gauge() -> Outcome {
    let start = Instant::now();
    let m = gauge_module(elliptic_gauge_data(false), &JetRep::trivial(1)).map_err(|e| e.to_string())?;
    let a = m.ring().clone();
    let t = RingElem::var(&a, 0);
    let y = RingElem::var(&a, 1);
    let tau = VecField::basis(&RingElem::one(&a), 0);
    let lhs = m.act_field(&tau, &m.elem(&y, 1, 0)).map_err(|e| e.to_string())?;
    let rhs = m.act_field(&tau, &m.elem(&t.pow(2).sub(&RingElem::one(&a)), 0, 0)).map_err(|e| e.to_string())?;
    let want = t.pow(4).add(&t.pow(2).scale(&q(4))).sub(&RingElem::one(&a));
    let l = m.as_multiple_of(&lhs, 1, 0).ok_or("tau(yY) is not a multiple of Y")?;
    let r = m.as_multiple_of(&rhs, 1, 0).ok_or("tau((t^2-1)T) is not a multiple of Y")?;
    let took = start.elapsed();
    ensure(l == want && r == want, || format!("tau(yY) = ({l})Y, tau((t^2-1)T) = ({r})Y"))?;
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("both sides reduce to ({want})Y in {took:?}"))
}

fn gm_reparametrization() -> Outcome {
    let a = atlas("gm").map_err(|e| e.to_string())?;
    let t = a.chart(0).overlap.clone();
    let s = a.chart(1).overlap.clone();
    let lambdas = [q(0), qf(1, 2), q(1), qf(1, 3), q(-2), qf(-7, 3)];
    let mut checked = 0;
    for lam in &lambdas {
        let m = charged_twist(Box::new(FreeModule::ring_module(&t)), lam);
        for k in -3i64..=3 {
            for l in -3i64..=3 {
                let v = VecField::basis(&RingElem::monomial(&s, &[k], q(1)), 0);
                let vt = push_field(&a, 1, 0, &v).map_err(|e| e.to_string())?;
                let f = a.transform_function(1, 0, &RingElem::monomial(&s, &[l], q(1))).map_err(|e| e.to_string())?;
                let out = m.act_field(&vt, &ModElem::ring_parts(vec![f])).map_err(|e| e.to_string())?;
                let back = a.transform_function(0, 1, out.component(0).as_ring()).map_err(|e| e.to_string())?;
                let want = RingElem::monomial(&s, &[k + l - 1], q(l) + q(k - 2) * lam);
                ensure(back == want, || format!("lambda = {lam}, k = {k}, l = {l}: {back} != {want}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} coefficients (l + (k-2) lambda) match for {} values of lambda", lambdas.len()))
}

fn differentiability_orders() -> Outcome {
    let mut cases: Vec<(String, Box<dyn AvModule>, u32)> = vec![
        ("k[x]".into(), Box::new(FreeModule::ring_module(&RingSpec::poly(&["x"]))), 1),
        ("delta(0)".into(), Box::new(DeltaTensor::delta(&[q(0)]).map_err(|e| e.to_string())?), 1),
        ("natural on k[x,y]".into(), parse_module("tensor(poly(x,y), natural(2))").map_err(|e| e.to_string())?, 2),
    ];
    for lam in [q(1), qf(-1, 2), q(3)] {
        let m = FreeModule::from_rep(&RingSpec::poly(&["x"]), &Rep::det(&lam, 1)).map_err(|e| e.to_string())?;
        cases.push((format!("det({lam})"), Box::new(m), 2));
    }
    for a in [0, 1, -1] {
        let m = FreeModule::alpha_module(&RingSpec::poly(&["x"]), &q(a)).map_err(|e| e.to_string())?;
        cases.push((format!("alpha({a})"), Box::new(m), 3));
    }
    let mut seen = Vec::new();
    for (name, m, want) in &cases {
        let got = minimal_differentiability(m.as_ref(), 4, 6).map_err(|e| e.to_string())?;
        ensure(got == Differentiability::Order(*want), || format!("{name}: expected {want}, got {got}"))?;
        seen.push(format!("{name}={want}"));
    }
    Ok(seen.join(", "))
}

/// `E_ij` on the wedge basis of `k`-subsets, straight from
/// `E_ij e_S = e_{S - j + i}` with the sign of sorting.
fn wedge_matrices(n: usize, k: usize) -> (Vec<Vec<usize>>, Vec<Vec<Vec<Vec<i64>>>>) {
    let subsets: Vec<Vec<usize>> = (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect();
    let d = subsets.len();
    let mut e = vec![vec![vec![vec![0i64; d]; d]; n]; n];
    for (col, s) in subsets.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let Some(pos) = s.iter().position(|&x| x == j) else { continue };
                if i != j && s.contains(&i) {
                    continue;
                }
                let mut t = s.clone();
                t[pos] = i;
                let mut sign = 1;
                for a in 0..t.len() {
                    for b in a + 1..t.len() {
                        if t[a] > t[b] {
                            sign = -sign;
                        }
                    }
                }
                t.sort();
                let row = subsets.iter().position(|u| *u == t).unwrap();
                e[i][j][row][col] += sign;
            }
        }
    }
    (subsets, e)
}

fn dense_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let d = a.len();
    (0..d).map(|i| (0..d).map(|j| (0..d).map(|t| a[i][t] * b[t][j]).sum()).collect()).collect()
}

fn oracle_scalar(m: &[Vec<i64>]) -> Option<i64> {
    let c = m[0][0];
    let ok = m.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, x)| *x == if i == j { c } else { 0 }));
    ok.then_some(c)
}

fn casimir_table() -> Outcome {
    let mut rows = 0;
    for n in 1..=4usize {
        for k in 0..=n {
            let (subsets, e) = wedge_matrices(n, k);
            let d = subsets.len();
            let zero = vec![vec![0i64; d]; d];
            let mut om1 = zero.clone();
            let mut om2 = zero.clone();
            for i in 0..n {
                for r in 0..d {
                    for c in 0..d {
                        om1[r][c] += e[i][i][r][c];
                    }
                }
                for j in 0..n {
                    let p = dense_mul(&e[i][j], &e[j][i]);
                    for r in 0..d {
                        for c in 0..d {
                            om2[r][c] += p[r][c];
                        }
                    }
                }
            }
            let o1 = oracle_scalar(&om1).ok_or(format!("oracle Omega_1 not scalar on ext({k},{n})"))?;
            let o2 = oracle_scalar(&om2).ok_or(format!("oracle Omega_2 not scalar on ext({k},{n})"))?;
            let (w1, w2) = (k as i64, (k * (n + 1 - k)) as i64);
            ensure(o1 == w1 && o2 == w2, || format!("oracle on ext({k},{n}): ({o1}, {o2}) vs ({w1}, {w2})"))?;
            let rep = Rep::ext(k, n).map_err(|e| e.to_string())?;
            let c1 = casimir(1, &rep).map_err(|e| e.to_string())?;
            let c2 = casimir(2, &rep).map_err(|e| e.to_string())?;
            ensure(c1 == QMatrix::scalar(d, &q(w1)) && c2 == QMatrix::scalar(d, &q(w2)), || {
                format!("ext({k},{n}): Omega_1 = {:?}, Omega_2 = {:?}", c1.as_scalar(), c2.as_scalar())
            })?;
            rows += 1;
        }
    }
    Ok(format!("{rows} (n, k) pairs match Omega_1 = k and Omega_2 = k(n+1-k)"))
}

fn obstruction_classifier() -> Outcome {
    let mut catalog: Vec<(String, Rep, Option<usize>)> = Vec::new();
    for n in 1..=3 {
        for k in 0..=n {
            catalog.push((format!("ext({k},{n})"), Rep::ext(k, n).map_err(|e| e.to_string())?, Some(k)));
        }
    }
    for n in [2, 3] {
        catalog.push((format!("sym(2,{n})"), Rep::sym(2, n).map_err(|e| e.to_string())?, None));
        let adj = Rep::tensor(&Rep::natural(n), &Rep::dual(&Rep::natural(n))).map_err(|e| e.to_string())?;
        let mut w = vec![q(0); n];
        w[0] = q(1);
        w[n - 1] = q(-1);
        catalog.push((format!("top(natural(x)dual, {n})"), Rep::hwc(&adj, &w).map_err(|e| e.to_string())?, None));
        for l in [1, -1] {
            let r = Rep::tensor(&Rep::det(&q(l), n), &Rep::natural(n)).map_err(|e| e.to_string())?;
            catalog.push((format!("det({l},{n})(x)natural({n})"), r, None));
        }
    }
    catalog.push(("det(1,2)".into(), Rep::det(&q(1), 2), Some(2)));
    for (name, rep, want) in &catalog {
        let got = is_exterior_type(rep).map_err(|e| format!("{name}: {e}"))?;
        ensure(got == *want, || format!("{name}: expected {want:?}, got {got:?}"))?;
    }
    Ok(format!("{} catalog entries classified", catalog.len()))
}

fn local_isomorphism() -> Outcome {
    let mut gens = 0;
    for ring in [RingSpec::poly(&["x"]), RingSpec::poly(&["x", "y"])] {
        for s in 0..=4 {
            for e in iso_generators(&ring, s, 4) {
                ensure(round_trip(&e, &ring, s).map_err(|x| x.to_string())?, || format!("round trip fails on {e} at s = {s}"))?;
                gens += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let rings = [RingSpec::poly(&["x"]), RingSpec::poly(&["x", "y"])];
    for t in 0..50 {
        let ring = &rings[t % 2];
        let a = SmashWord::random(ring, &mut rng, 2, 3);
        let b = SmashWord::random(ring, &mut rng, 2, 3);
        let lhs = phi(&a.mul(&b).map_err(|e| e.to_string())?, 3).map_err(|e| e.to_string())?;
        let rhs = phi(&a, 3).and_then(|x| x.pbw_mul(&phi(&b, 3)?)).map_err(|e| e.to_string())?;
        ensure(lhs.sub(&rhs).map_err(|e| e.to_string())?.is_zero(), || format!("phi not multiplicative on {a} * {b}"))?;
    }
    Ok(format!("{gens} generator round trips, 50 seeded products"))
}

fn gluing() -> Outcome {
    let p1 = atlas("p1").map_err(|e| e.to_string())?;
    for l in -2..=2 {
        let rule = TransitionRule::det_power(&q(l)).map_err(|e| e.to_string())?;
        let rep = glue_check(&p1, &rule, 3).map_err(|e| e.to_string())?;
        ensure(rep.passed(), || rep.to_string())?;
    }
    ensure(matches!(TransitionRule::det_power(&qf(1, 2)), Err(Error::NotIntegrable(_))), || {
        "det power 1/2 accepted".to_string()
    })?;
    let gm = atlas("gm").map_err(|e| e.to_string())?;
    for (l, c) in [(q(0), 0), (qf(1, 2), 1), (q(1), 2)] {
        let rep = glue_check(&gm, &TransitionRule::Charged(l.clone()), 3).map_err(|e| e.to_string())?;
        ensure(rep.passed() && rep.intertwiners == Some(vec![c]), || format!("lambda = {l}: {rep}"))?;
    }
    let rep = glue_check(&gm, &TransitionRule::Charged(qf(1, 3)), 3).map_err(|e| e.to_string())?;
    ensure(rep.intertwiners == Some(vec![]), || format!("lambda = 1/3: {rep}"))?;
    Ok("P1 det powers -2..2 glue; det(1/2) rejected; s^(2 lambda) intertwines at 0, 1/2, 1; none at 1/3".into())
}

fn casimir_invariance() -> Outcome {
    for name in ["p1", "circle"] {
        let a = atlas(name).map_err(|e| e.to_string())?;
        for k in 1..=2 {
            for (f, t) in [(0, 1), (1, 0)] {
                let c = casimir_invariance_check(&a, f, t, k, TensorLaw::Correct).map_err(|e| e.to_string())?;
                ensure(c.passed, || format!("{name}, k = {k}: {:?}", c.witness))?;
            }
        }
    }
    Ok("Omega_1, Omega_2 invariant on p1 and circle in both directions".into())
}

fn gk_growth() -> Outcome {
    let start = Instant::now();
    let x = RingSpec::poly(&["x"]);
    let xy = RingSpec::poly(&["x", "y"]);
    let kx = FreeModule::ring_module(&x);
    let kxy = FreeModule::ring_module(&xy);
    let t = parse_module("tensor(poly(x), jets(1,2))").map_err(|e| e.to_string())?;
    let delta = DeltaTensor::delta(&[q(0)]).map_err(|e| e.to_string())?;
    let cases: Vec<(&str, &dyn AvModule, Frame, f64)> = vec![
        ("k[x]", &kx, Frame::weyl(&x), 1.0),
        ("k[x,y]", &kxy, Frame::weyl(&xy), 2.0),
        ("tensor(k[x], jets(1,2))", t.as_ref(), Frame::with_jets(t.ring(), 1), 1.0),
        ("delta(0)", &delta, Frame::weyl(delta.ring()), 1.0),
    ];
    let mut out = Vec::new();
    for (name, m, frame, want) in cases {
        let series = growth_series(m, &frame, &m.basis(0)[..1], 24, None).map_err(|e| e.to_string())?;
        let fit = growth_exponent(&series, DEFAULT_TAIL).map_err(|e| e.to_string())?;
        ensure((fit.exponent - want).abs() <= 0.15, || format!("{name}: exponent {:.3}, expected {want}", fit.exponent))?;
        out.push(format!("{name}={:.3}", fit.exponent));
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(120), || format!("took {took:?}"))?;
    Ok(format!("{} in {took:?}", out.join(", ")))
}

fn smash_validators() -> Outcome {
    for e in BUILTIN_CONSTRUCTIONS {
        let m = parse_module(e).map_err(|x| format!("{e}: {x}"))?;
        let rep = validate_smash(m.as_ref(), 3);
        ensure(rep.passed(), || rep.to_string())?;
    }
    let controls = negative_controls().map_err(|e| e.to_string())?;
    for m in &controls {
        let rep = validate_smash(m.as_ref(), 3);
        ensure(!rep.passed() && !rep.violations.is_empty() && !rep.violations[0].witness.is_empty(), || {
            format!("negative control {} not rejected", m.describe())
        })?;
    }
    Ok(format!("{} constructions pass at degree 3; {} negative controls fail with witnesses", BUILTIN_CONSTRUCTIONS.len(), controls.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("elliptic gauge compatibility", elliptic_gauge),
        ("G_m reparametrization", gm_reparametrization),
        ("differentiability orders", differentiability_orders),
        ("Casimir table", casimir_table),
        ("obstruction classifier", obstruction_classifier),
        ("local isomorphism", local_isomorphism),
        ("gluing", gluing),
        ("Casimir chart invariance", casimir_invariance),
        ("GK growth", gk_growth),
        ("smash validators", smash_validators),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({took:.2}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({took:.2}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

