use avmod::gl::{simple_catalog, Rep};
use avmod::jets::{generators, gl_embed, jet_bracket, JetGen};
use avmod::local_iso::*;
use avmod::modules::{jet_act as coord_jet_act, AvModule, FreeModule, ModElem};
use avmod::rational::q;
use avmod::ring::{RingElem, RingSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn round_trip_on_generators() {
    for ring in [RingSpec::poly(&["x"]), RingSpec::poly(&["x", "y"])] {
        for s in 0..=4 {
            for e in iso_generators(&ring, s, 2) {
                assert!(round_trip(&e, &ring, s).unwrap(), "{e} at s = {s}");
            }
        }
    }
}

#[test]
fn phi_is_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for ring in [RingSpec::poly(&["x"]), RingSpec::poly(&["x", "y"])] {
        for _ in 0..20 {
            let a = SmashWord::random(&ring, &mut rng, 2, 3);
            let b = SmashWord::random(&ring, &mut rng, 2, 3);
            let lhs = phi(&a.mul(&b).unwrap(), 3).unwrap();
            let rhs = phi(&a, 3).unwrap().pbw_mul(&phi(&b, 3).unwrap()).unwrap();
            assert!(lhs.sub(&rhs).unwrap().is_zero(), "{a} * {b}");
        }
    }
}

#[test]
fn degree_zero_jets_act_through_gl() {
    for n in 1..=3 {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let ring = RingSpec::poly(&refs);
        for rep in simple_catalog(n) {
            let m = FreeModule::from_rep(&ring, &rep).unwrap();
            for g in generators(n, 0).into_iter().filter(|g| g.degree() == 0) {
                let (j, i) = gl_embed(&g).unwrap();
                for a in 0..rep.dim() {
                    let out = jet_act(&m, &g, &m.elem(&RingElem::one(&ring), a)).unwrap();
                    for b in 0..rep.dim() {
                        let want = RingElem::constant(&ring, rep.e(j, i).get(b, a).clone());
                        assert_eq!(out.component(b).as_ring(), &want);
                    }
                }
            }
        }
    }
}

#[test]
fn jet_action_respects_brackets() {
    let ring = RingSpec::poly(&["x", "y"]);
    let m = FreeModule::from_rep(&ring, &Rep::natural(2)).unwrap();
    let gens = generators(2, 2);
    let samples: Vec<ModElem> =
        ring.monomials(2).iter().flat_map(|f| (0..2).map(|a| m.elem(f, a)).collect::<Vec<_>>()).collect();
    for g in &gens {
        for h in &gens {
            for x in &samples {
                let gh = jet_act(&m, g, &jet_act(&m, h, x).unwrap()).unwrap();
                let hg = jet_act(&m, h, &jet_act(&m, g, x).unwrap()).unwrap();
                let mut br = ModElem::ring_parts(vec![RingElem::zero(&ring); 2]);
                for (k, c) in jet_bracket(g, h) {
                    br = br.add(&jet_act(&m, &k, x).unwrap().scale(&c));
                }
                assert!(m.equal(&gh.sub(&hg), &br), "[{g}, {h}] on {}", m.format_elem(x));
            }
        }
    }
}

#[test]
fn jet_action_examples() {
    let r = RingSpec::poly(&["x"]);
    let lam = q(4);
    let m = FreeModule::from_rep(&r, &Rep::det(&lam, 1)).unwrap();
    let one = m.elem(&RingElem::one(&r), 0);
    let out = jet_act(&m, &JetGen::new(vec![1], 0).unwrap(), &one).unwrap();
    assert_eq!(out.component(0).as_ring(), &RingElem::constant(&r, lam));
    for f in r.monomials(4) {
        let x = m.elem(&f, 0);
        let two = JetGen::new(vec![2], 0).unwrap();
        assert!(jet_act(&m, &two, &x).unwrap().is_zero());
        assert!(m.equal(&jet_act(&m, &two, &x).unwrap(), &coord_jet_act(&m, &[2], 0, &x).unwrap()));
        let d = FreeModule::ring_module(&r);
        assert!(jet_act(&d, &JetGen::new(vec![1], 0).unwrap(), &d.elem(&f, 0)).unwrap().is_zero());
    }
}
