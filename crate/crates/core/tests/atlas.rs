use avmod::atlas::*;
use avmod::error::Error;
use avmod::gl::{simple_catalog, Rep};
use avmod::jets::{generators, gl_embed, JetGen};
use avmod::rational::{q, qf};
use avmod::ring::RingElem;
use avmod::weyl::{DiffOp, VecField};

#[test]
fn p1_det_power_round_trips() {
    let a = atlas("p1").unwrap();
    for l in -2..=2 {
        let rep = glue_check(&a, &TransitionRule::det_power(&q(l)).unwrap(), 3).unwrap();
        assert!(rep.passed(), "{rep}");
    }
    let o = &a.chart(1).overlap;
    let v = transform_section(&a, 0, 1, &TransitionRule::DetPower(q(1)), &[RingElem::one(&a.chart(0).overlap)]).unwrap();
    assert_eq!(v[0], RingElem::monomial(o, &[-2], q(-1)));
    let v0 = transform_section(&a, 0, 1, &TransitionRule::DetPower(q(0)), &[RingElem::one(&a.chart(0).overlap)]).unwrap();
    assert_eq!(v0[0], RingElem::one(o));
    assert!(matches!(TransitionRule::det_power(&qf(1, 2)), Err(Error::NotIntegrable(_))));
}

#[test]
fn tensor_reps_glue() {
    for (name, n) in [("p1", 1), ("p2", 2), ("circle", 1), ("gm", 1)] {
        let a = atlas(name).unwrap();
        for r in simple_catalog(n).into_iter().filter(|r| r.is_integrable()) {
            let rep = glue_check(&a, &TransitionRule::tensor(r.clone()).unwrap(), 2).unwrap();
            assert!(rep.passed(), "{rep}");
        }
        assert!(glue_check(&a, &TransitionRule::SectionOnly, 2).unwrap().passed());
    }
}

#[test]
fn gm_charged_intertwiners() {
    let a = atlas("gm").unwrap();
    for (l, c) in [(q(0), 0), (qf(1, 2), 1), (q(1), 2)] {
        let rep = glue_check(&a, &TransitionRule::Charged(l), 3).unwrap();
        assert!(rep.passed(), "{rep}");
        assert_eq!(rep.intertwiners, Some(vec![c]));
    }
    let rep = glue_check(&a, &TransitionRule::Charged(qf(1, 3)), 3).unwrap();
    assert!(!rep.passed());
    assert_eq!(rep.intertwiners, Some(vec![]));
}

#[test]
fn charged_operator_round_trip() {
    let a = atlas("gm").unwrap();
    let t = &a.chart(0).overlap;
    for l in [q(0), qf(2, 3), q(-5)] {
        for k in -3..=3 {
            let op = DiffOp::d(t, 0).lmul(&RingElem::monomial(t, &[k], q(1)));
            let there = transform_operator_charged(&a, 0, 1, &l, &op).unwrap();
            let back = transform_operator_charged(&a, 1, 0, &l, &there).unwrap();
            assert!(back.sub(&op).is_zero());
        }
    }
}

#[test]
fn charged_law_preserves_brackets() {
    for name in ["gm", "p1", "circle"] {
        let a = atlas(name).unwrap();
        let o = &a.chart(0).overlap;
        let x = &a.chart(0).coords[0];
        let lam = qf(3, 5);
        let fs: Vec<RingElem> = (-2..=2).map(|k| x.pow_signed(k).unwrap()).collect();
        for f in &fs {
            for g in &fs {
                let u = DiffOp::d(o, 0).lmul(f);
                let v = DiffOp::d(o, 0).lmul(g);
                let lhs = transform_operator_charged(&a, 0, 1, &lam, &u.commutator(&v).unwrap()).unwrap();
                let tu = transform_operator_charged(&a, 0, 1, &lam, &u).unwrap();
                let tv = transform_operator_charged(&a, 0, 1, &lam, &v).unwrap();
                assert!(lhs.sub(&tu.commutator(&tv).unwrap()).is_zero(), "{name}");
            }
        }
    }
}

#[test]
fn gm_reparametrized_charged_action() {
    let a = atlas("gm").unwrap();
    let t = a.chart(0).overlap.clone();
    let s = a.chart(1).overlap.clone();
    let lam = qf(-7, 3);
    let m = avmod::modules::charged_twist(Box::new(avmod::modules::FreeModule::ring_module(&t)), &lam);
    use avmod::modules::{AvModule, ModElem};
    for k in -3i64..=3 {
        for l in -3i64..=3 {
            let v = VecField::basis(&RingElem::monomial(&s, &[k], q(1)), 0);
            let vt = push_field(&a, 1, 0, &v).unwrap();
            let elem = ModElem::ring_parts(vec![a.transform_function(1, 0, &RingElem::monomial(&s, &[l], q(1))).unwrap()]);
            let out = m.act_field(&vt, &elem).unwrap();
            let back = a.transform_function(0, 1, out.component(0).as_ring()).unwrap();
            let c = q(l) + q(k - 2) * &lam;
            assert_eq!(back, RingElem::monomial(&s, &[k + l - 1], c));
        }
    }
}

#[test]
fn casimir_chart_invariance() {
    for name in ["p1", "circle", "p2", "gm"] {
        let a = atlas(name).unwrap();
        for k in 1..=3 {
            for (f, t) in [(0, 1), (1, 0)] {
                let c = casimir_invariance_check(&a, f, t, k, TensorLaw::Correct).unwrap();
                assert!(c.passed, "{name} k = {k}: {:?}", c.witness);
            }
        }
    }
    for name in ["p1", "circle", "p2"] {
        let c = casimir_invariance_check(&atlas(name).unwrap(), 0, 1, 1, TensorLaw::DropFactor).unwrap();
        assert!(!c.passed && c.witness.is_some());
    }
}

#[test]
fn jets_transform_consistently() {
    for name in ["p1", "p2", "gm", "circle"] {
        let a = atlas(name).unwrap();
        let rep = glue_check(&a, &TransitionRule::Jet(2), 1).unwrap();
        assert!(rep.passed(), "{rep}");
    }
}

#[test]
fn degree_zero_jets_conjugate_by_jacobian() {
    let a = atlas("p2").unwrap();
    let n = 2;
    let o0 = a.chart(0).overlap.clone();
    let o1 = a.chart(1).overlap.clone();
    let j = jacobian(&a, 0, 1).unwrap();
    let jb = jacobian(&a, 1, 0).unwrap();
    for g in generators(n, 0).into_iter().filter(|g| g.degree() == 0) {
        let (row, col) = gl_embed(&g).unwrap();
        let img = transform_jet(&a, 0, 1, &JetField::gen(&o0, &g, RingElem::one(&o0)), 0).unwrap();
        let mut want = JetField::zero(&o1, n);
        for aa in 0..n {
            for b in 0..n {
                // E_{row col} -> sum (dx_row/dy_aa)(dy_b/dx_col) E_{aa b}
                let c = j.get(row, aa).mul(&a.transform_function(0, 1, jb.get(b, col)).unwrap());
                want = want.add(&JetField::gen(&o1, &JetGen::linear(n, aa, b), c));
            }
        }
        assert_eq!(img, want, "{g}");
    }
}

#[test]
fn p1_jet_expansion() {
    let a = atlas("p1").unwrap();
    let o0 = a.chart(0).overlap.clone();
    let o1 = a.chart(1).overlap.clone();
    let g = JetGen::new(vec![1], 0).unwrap();
    let img = transform_jet(&a, 0, 1, &JetField::gen(&o0, &g, RingElem::one(&o0)), 1).unwrap();
    let want = JetField::gen(&o1, &g, RingElem::one(&o1))
        .add(&JetField::gen(&o1, &JetGen::new(vec![2], 0).unwrap(), RingElem::monomial(&o1, &[-1], q(1))));
    assert_eq!(img, want, "{img}");
}

#[test]
fn single_chart_has_no_overlap() {
    let a = atlas("elliptic-affine").unwrap();
    assert!(matches!(glue_check(&a, &TransitionRule::SectionOnly, 2), Err(Error::NoOverlap(..))));
    let _ = Rep::natural(1);
}
