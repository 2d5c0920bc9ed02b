use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use avmod::atlas::{atlas, transform_section, TransitionRule};
use avmod::gk::{growth_exponent, growth_series, Frame, FrameOp, GrowthSeries};
use avmod::gl::Rep;
use avmod::jets::{generators, JetGen, JetPoly};
use avmod::local_iso::SmashWord;
use avmod::modules::{charged_twist, AvModule, FreeModule, LocalizedModule, ModElem};
use avmod::poly::Poly;
use avmod::rational::{q, qf, Rational};
use avmod::ring::{multi_indices, Ring, RingElem, RingSpec};
use avmod::weyl::{DiffOp, VecField};

fn rings() -> Vec<Ring> {
    vec![RingSpec::poly(&["x", "y"]), RingSpec::laurent(&["s", "t"]), RingSpec::elliptic()]
}

type Terms = Vec<((i64, i64), i64)>;

fn terms(lo: i64) -> impl Strategy<Value = Terms> {
    prop::collection::vec(((lo..=3i64, lo..=3i64), -5i64..=5), 1..4)
}

fn elem(r: &Ring, t: &Terms) -> RingElem {
    let mut f = RingElem::zero(r);
    for ((a, b), c) in t {
        let (a, b) = if r.kind_name() == "laurent" { (*a, *b) } else { (a.abs(), b.abs()) };
        f = f.add(&RingElem::monomial(r, &[a, b], q(*c)));
    }
    f
}

trait KindName {
    fn kind_name(&self) -> &'static str;
}

impl KindName for Ring {
    fn kind_name(&self) -> &'static str {
        if self.name().starts_with("laurent") {
            "laurent"
        } else {
            "other"
        }
    }
}

fn fields_equal(a: &VecField, b: &VecField) -> bool {
    a.sub(b).is_zero()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ring_axioms(which in 0usize..3, a in terms(-3), b in terms(-3), c in terms(-3)) {
        let r = &rings()[which];
        let (f, g, h) = (elem(r, &a), elem(r, &b), elem(r, &c));
        prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
        prop_assert_eq!(f.mul(&g.add(&h)), f.mul(&g).add(&f.mul(&h)));
        prop_assert_eq!(f.mul(&g), g.mul(&f));
    }

    #[test]
    fn leibniz(which in 0usize..3, a in terms(-3), b in terms(-3), i in 0usize..2) {
        let r = &rings()[which];
        let i = i % r.dim();
        let (f, g) = (elem(r, &a), elem(r, &b));
        prop_assert_eq!(f.mul(&g).derive(i), f.derive(i).mul(&g).add(&f.mul(&g.derive(i))));
    }

    #[test]
    fn taylor_coefficients_are_scaled_derivatives(which in 0usize..3, a in terms(-3)) {
        let r = &rings()[which];
        let f = elem(r, &a);
        let shift = f.taylor_shift(3);
        let zero = RingElem::zero(r);
        prop_assert_eq!(shift.get(&vec![0; r.dim()]).unwrap_or(&zero), &f);
        for k in multi_indices(r.dim(), 3) {
            let mut d = f.clone();
            let mut fact = 1i64;
            for (i, &ki) in k.iter().enumerate() {
                for j in 0..ki {
                    d = d.derive(i);
                    fact *= (j + 1) as i64;
                }
            }
            prop_assert_eq!(shift.get(&k).unwrap_or(&zero), &d.scale(&qf(1, fact)));
        }
    }

    #[test]
    fn quotient_normal_form_idempotent(a in terms(0)) {
        let r = RingSpec::elliptic();
        let f = elem(&r, &a);
        let again = RingElem::from_poly(&r, f.numerator().clone());
        prop_assert_eq!(&again, &f);
        prop_assert_eq!(RingElem::from_poly(&r, again.numerator().clone()), again);
    }

    #[test]
    fn operators_act_as_an_algebra(a in terms(0), b in terms(0), c in terms(0), ka in 0u32..3, kb in 0u32..3) {
        let r = RingSpec::poly(&["x", "y"]);
        let da = DiffOp::term(&elem(&r, &a), vec![ka, 1]);
        let db = DiffOp::term(&elem(&r, &b), vec![0, kb]);
        let f = elem(&r, &c);
        prop_assert_eq!(da.compose(&db).unwrap().apply(&f).unwrap(), da.apply(&db.apply(&f).unwrap()).unwrap());
        let g = DiffOp::from_elem(&elem(&r, &c));
        let br = da.commutator(&g).unwrap();
        prop_assert!(br.is_zero() || br.order() <= da.order() - 1);
    }

    #[test]
    fn field_bracket_is_lie(which in 0usize..3, a in terms(-2), b in terms(-2), c in terms(-2), d in terms(-2)) {
        let r = &rings()[which];
        let field = |x: &Terms, y: &Terms| VecField::new(r, vec![elem(r, x), elem(r, y)][..r.dim()].to_vec()).unwrap();
        let u = field(&a, &b);
        let v = field(&b, &c);
        let w = field(&d, &a);
        prop_assert!(fields_equal(&u.bracket(&v).unwrap(), &v.bracket(&u).unwrap().scale(&q(-1))));
        let j = u.bracket(&v.bracket(&w).unwrap()).unwrap()
            .add(&v.bracket(&w.bracket(&u).unwrap()).unwrap())
            .add(&w.bracket(&u.bracket(&v).unwrap()).unwrap());
        prop_assert!(j.is_zero());
    }

    #[test]
    fn pbw_associative(i in prop::collection::vec(0usize..10, 1..3), j in prop::collection::vec(0usize..10, 1..3), k in prop::collection::vec(0usize..10, 1..3)) {
        let gens = generators(2, 3);
        let word = |ix: &[usize]| -> Vec<JetGen> { ix.iter().map(|&t| gens[t % gens.len()].clone()).collect() };
        let a = JetPoly::from_word(2, 3, &word(&i), q(1));
        let b = JetPoly::from_word(2, 3, &word(&j), q(2));
        let c = JetPoly::from_word(2, 3, &word(&k), q(-1));
        let l = a.pbw_mul(&b).unwrap().pbw_mul(&c).unwrap();
        let rr = a.pbw_mul(&b.pbw_mul(&c).unwrap()).unwrap();
        prop_assert!(l.sub(&rr).unwrap().is_zero());
    }

    #[test]
    fn charged_equals_det_tensor(num in -6i64..=6, den in 1i64..=4, k in 0i64..=4, l in 0i64..=4) {
        let r = RingSpec::poly(&["x"]);
        let lam = qf(num, den);
        let a = charged_twist(Box::new(FreeModule::ring_module(&r)), &lam);
        let b = FreeModule::from_rep(&r, &Rep::det(&lam, 1)).unwrap();
        let v = VecField::basis(&RingElem::monomial(&r, &[k], q(1)), 0);
        let e = ModElem::ring_parts(vec![RingElem::monomial(&r, &[l], q(1))]);
        let x = a.act_field(&v, &e).unwrap();
        let y = b.act_field(&v, &e).unwrap();
        prop_assert_eq!(x.component(0).as_ring(), y.component(0).as_ring());
    }

    #[test]
    fn localized_action_extends_field_action(num in -4i64..=4, a in terms(0), b in terms(0)) {
        let r = RingSpec::poly(&["x", "y"]);
        let m = FreeModule::from_rep(&r, &Rep::det(&q(num), 2)).unwrap();
        let rx = RingSpec::localized(&r, Poly::var(2, 0), None).unwrap();
        let loc = LocalizedModule::new(&m, &rx, 2).unwrap();
        let v = VecField::new(&r, vec![elem(&r, &a), elem(&r, &b)]).unwrap();
        let e = ModElem::ring_parts(vec![elem(&r, &b)]);
        let plain = m.act_field(&v, &e).unwrap();
        let vl = VecField::new(&rx, v.comps().iter().map(|c| c.localize(&rx).unwrap()).collect()).unwrap();
        let el = ModElem::ring_parts(vec![e.component(0).as_ring().localize(&rx).unwrap()]);
        let lifted = loc.act_field(&vl, &el).unwrap();
        prop_assert_eq!(lifted.component(0).as_ring(), &plain.component(0).as_ring().localize(&rx).unwrap());
    }

    #[test]
    fn frame_monotone(mask in 0u32..16, l_max in 1usize..8) {
        let r = RingSpec::poly(&["x", "y"]);
        let m = FreeModule::from_rep(&r, &Rep::natural(2)).unwrap();
        let full = Frame::with_jets(&r, 1);
        let ops: Vec<FrameOp> = full.ops().iter().skip(1).enumerate().filter(|(t, _)| mask >> (t % 4) & 1 == 1).map(|(_, o)| o.clone()).collect();
        let sub = Frame::new(ops);
        let seed = &m.basis(0)[..1];
        let small = growth_series(&m, &sub, seed, l_max, None).unwrap();
        let big = growth_series(&m, &full, seed, l_max, None).unwrap();
        for (a, b) in small.dims.iter().zip(&big.dims) {
            prop_assert!(a <= b);
        }
        prop_assert!(big.dims.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn exponent_within_tolerance(g in 0u32..4, scale in 1usize..6, offset in 0usize..4) {
        let binom = |n: usize, k: u32| -> usize { (0..k as usize).fold(1usize, |acc, i| acc * (n - i) / (i + 1)) };
        let dims: Vec<usize> = (0..=24usize).map(|l| scale * binom(l + g as usize, g) + offset).collect();
        let fit = growth_exponent(&GrowthSeries { dims, window: 0 }, 0.5).unwrap();
        prop_assert!((fit.exponent - g as f64).abs() <= 0.15, "g = {}, fit = {:?}", g, fit);
    }

    #[test]
    fn section_round_trip(name in prop::sample::select(vec!["p1", "p2", "gm", "circle"]), a in terms(0), b in terms(0)) {
        let at = atlas(name).unwrap();
        let rule = TransitionRule::tensor(Rep::natural(at.dim())).unwrap();
        let r0 = at.chart(0).ring.clone();
        let comps: Vec<RingElem> = [&a, &b].iter().take(at.dim()).map(|t| {
            let mut f = RingElem::zero(&r0);
            for ((x, y), c) in t.iter() {
                let e: Vec<i64> = [*x, *y].into_iter().take(r0.nvars()).collect();
                f = f.add(&RingElem::monomial(&r0, &e, q(*c)));
            }
            f
        }).collect();
        let there = transform_section(&at, 0, 1, &rule, &comps).unwrap();
        let back = transform_section(&at, 1, 0, &rule, &there).unwrap();
        for (x, y) in back.iter().zip(&comps) {
            prop_assert_eq!(x, &at.chart(0).restrict.apply(y).unwrap());
        }
    }

    #[test]
    fn sampling_is_deterministic(seed in 0u64..1000) {
        let r = RingSpec::poly(&["x", "y"]);
        let a = SmashWord::random(&r, &mut ChaCha8Rng::seed_from_u64(seed), 3, 3);
        let b = SmashWord::random(&r, &mut ChaCha8Rng::seed_from_u64(seed), 3, 3);
        prop_assert_eq!(a.to_string(), b.to_string());
    }
}

#[test]
fn delta_weyl_relation() {
    let m = avmod::modules::DeltaTensor::delta(&[q(0)]).unwrap();
    let r = m.ring().clone();
    let x = RingElem::var(&r, 0);
    let d = VecField::basis(&RingElem::one(&r), 0);
    for b in m.basis(4) {
        let lhs = m.act_field(&d, &m.act_ring(&x, &b).unwrap()).unwrap().sub(&m.act_ring(&x, &m.act_field(&d, &b).unwrap()).unwrap());
        assert!(m.equal(&lhs, &b));
    }
}

#[test]
fn scalar_rationals_are_exact() {
    let third: Rational = qf(1, 3);
    assert_eq!(&third * q(3), q(1));
}
