use avmod::error::Error;
use avmod::gk::{bernstein_check, bernstein_check_with, growth_exponent, growth_series, Frame, GrowthSeries, BERNSTEIN_TOLERANCE};
use avmod::modules::expr::parse_module;
use avmod::modules::{AvModule, DeltaTensor, FreeModule};
use avmod::rational::q;
use avmod::ring::RingSpec;

fn monomial_count(n: usize, l: usize) -> usize {
    fn rec(n: usize, l: usize) -> usize {
        if n == 0 {
            return 1;
        }
        (0..=l).map(|a| rec(n - 1, l - a)).sum()
    }
    rec(n, l)
}

#[test]
fn polynomial_series_match_monomial_counts() {
    for (vars, n) in [(vec!["x"], 1), (vec!["x", "y"], 2), (vec!["x", "y", "z"], 3)] {
        let r = RingSpec::poly(&vars);
        let m = FreeModule::ring_module(&r);
        let s = growth_series(&m, &Frame::weyl(&r), &m.basis(0), 10, None).unwrap();
        let want: Vec<usize> = (0..=10).map(|l| monomial_count(n, l)).collect();
        assert_eq!(s.dims, want);
    }
}

#[test]
fn delta_series_is_linear() {
    let m = DeltaTensor::delta(&[q(0)]).unwrap();
    let r = m.ring().clone();
    let s = growth_series(&m, &Frame::weyl(&r), &m.basis(0), 12, None).unwrap();
    assert_eq!(s.dims, (1..=13).collect::<Vec<_>>());
}

#[test]
fn exponent_fits() {
    let lin = GrowthSeries { dims: (1..=25).collect(), window: 0 };
    let quad = GrowthSeries { dims: (0..=24).map(|l| (l + 1) * (l + 2) / 2).collect(), window: 0 };
    let e1 = growth_exponent(&lin, 0.5).unwrap();
    let e2 = growth_exponent(&quad, 0.5).unwrap();
    assert!((0.85..=1.15).contains(&e1.exponent), "{e1:?}");
    assert!((1.85..=2.15).contains(&e2.exponent), "{e2:?}");
    assert!(e1.residual < 1e-9);
    let short = GrowthSeries { dims: (1..=5).collect(), window: 0 };
    assert!(matches!(growth_exponent(&short, 0.5), Err(Error::InvalidInput(_))));
}

#[test]
fn explicit_window_too_small() {
    let r = RingSpec::poly(&["x", "y"]);
    let m = FreeModule::ring_module(&r);
    match growth_series(&m, &Frame::weyl(&r), &m.basis(0), 6, Some(3)) {
        Err(Error::WindowTooSmall { window: 3, reached: 4 }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn bernstein_examples() {
    let nat = parse_module("tensor(poly(x,y), natural(2))").unwrap();
    let rep = bernstein_check(nat.as_ref(), 2, 24).unwrap();
    assert!(rep.passed, "{rep}");
    assert!((rep.exponent - 2.0).abs() < 0.15, "{rep}");

    let delta = DeltaTensor::delta(&[q(0)]).unwrap();
    let rep = bernstein_check(&delta, 1, 24).unwrap();
    assert!(rep.passed && (rep.exponent - 1.0).abs() < 0.15, "{rep}");

    let t = parse_module("tensor(poly(x), jets(1,2))").unwrap();
    let frame = Frame::with_jets(t.ring(), 1);
    let rep = bernstein_check_with(t.as_ref(), 1, 24, &frame, BERNSTEIN_TOLERANCE).unwrap();
    assert!(rep.passed && (rep.exponent - 1.0).abs() < 0.15, "{rep}");
}

#[test]
fn bernstein_rejects_too_large_n() {
    let m = FreeModule::ring_module(&RingSpec::poly(&["x"]));
    assert!(!bernstein_check(&m, 2, 24).unwrap().passed);
}

#[test]
fn tensor_series_bounded_by_fiber_times_weyl() {
    let t = parse_module("tensor(poly(x), jets(1,2))").unwrap();
    let r = t.ring().clone();
    let p = FreeModule::ring_module(&r);
    let dim_w = 3;
    let with_jets = growth_series(t.as_ref(), &Frame::with_jets(&r, 1), &t.basis(0)[..1], 16, None).unwrap();
    let weyl = growth_series(&p, &Frame::weyl(&r), &p.basis(0), 16, None).unwrap();
    for (a, b) in with_jets.dims.iter().zip(&weyl.dims) {
        assert!(*a <= dim_w * b, "{a} > {dim_w} * {b}");
    }
}

#[test]
fn csv_has_header_and_rows() {
    let s = GrowthSeries { dims: vec![1, 2, 3], window: 2 };
    let csv = s.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "l,dim,log_l,log_dim");
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("1,2,"));
}
