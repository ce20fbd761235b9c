use proptest::prelude::*;
use rttforge::series::{exp_series, HSeries, Mode, Scalar, Shape, INF};

fn q(p: i64, d: i64) -> Scalar {
    Scalar::frac(Mode::Exact, p, d)
}

fn uni(h: i64, lo: i64, hi: i64) -> Shape {
    Shape::uni("u", Mode::Exact, h, (lo, hi))
}

#[test]
fn difference_of_squares() {
    let s = uni(4, -6, 6);
    let hu = HSeries::monomial(&s, 1, &[1], q(1, 1)).unwrap();
    let one = HSeries::one(&s);
    let p = one.add(&hu).unwrap().mul(&one.sub(&hu).unwrap()).unwrap();
    let want = HSeries::from_terms(&s, [(vec![0, 0], q(1, 1)), (vec![2, 2], q(-1, 1))]).unwrap();
    assert!(p.eq_on_window(&want).unwrap());
    assert!(p.add(&HSeries::zero(&s)).unwrap().eq_on_window(&p).unwrap());
}

#[test]
fn truncated_exponentials_cancel() {
    let s = uni(0, 0, 4);
    let e = exp_series(&s, &q(1, 1), 4).unwrap();
    let f = exp_series(&s, &q(-1, 1), 4).unwrap();
    let p = e.mul(&f).unwrap();
    assert_eq!(p.dims()[1].hi, 4);
    assert!(p.eq_on_window(&HSeries::one(&s)).unwrap());
    // each product coefficient in the box is a sum of several cross terms
    let mut cross = 0;
    for a in e.terms() {
        for b in f.terms() {
            if a.0[1] + b.0[1] <= 4 && a.0[1] + b.0[1] > 0 {
                cross += 1;
            }
        }
    }
    assert_eq!(cross, 14);
}

#[test]
fn invert_examples() {
    let s = uni(5, -8, 8);
    assert!(HSeries::one(&s).invert().unwrap().eq_on_window(&HSeries::one(&s)).unwrap());

    // 1 - h/u -> sum (h/u)^k
    let f = HSeries::from_terms(&s, [(vec![0, 0], q(1, 1)), (vec![1, -1], q(-1, 1))]).unwrap();
    let g = f.invert().unwrap();
    for k in 0..=5 {
        assert_eq!(g.coeff(k, &[-k]), q(1, 1));
    }
    assert_eq!(g.len(), 6);

    // u - h/4 -> u^-1 + (h/4) u^-2 + (h^2/16) u^-3 + ...
    let f = HSeries::from_terms(&s, [(vec![0, 1], q(1, 1)), (vec![1, 0], q(-1, 4))]).unwrap();
    let g = f.invert().unwrap();
    for k in 0..=5 {
        assert_eq!(g.coeff(k, &[-k - 1]), q(1, 4i64.pow(k as u32)));
    }
    let one = HSeries::one(&s);
    assert!(f.mul(&g).unwrap().eq_on_window(&one).unwrap());
    assert!(g.mul(&f).unwrap().eq_on_window(&one).unwrap());
}

#[test]
fn invert_errors() {
    let s = uni(3, -4, 4);
    assert!(HSeries::zero(&s).invert().is_err());
    let h = HSeries::h(&s);
    assert!(h.invert().is_err());
}

#[test]
fn invert_h_only_with_pole() {
    // -4/h + 1 + h: leading h^-1
    let s = Shape::new(&[], Mode::Exact, (-1, 4), &[]);
    let f = HSeries::from_terms(&s, [(vec![-1], q(-4, 1)), (vec![0], q(1, 1)), (vec![1], q(1, 1))]).unwrap();
    let g = f.invert().unwrap();
    assert_eq!(g.coeff(1, &[]), q(-1, 4));
    let p = f.mul(&g).unwrap();
    assert!(p.box_nonempty());
    assert!(p.eq_on_window(&HSeries::one(&s)).unwrap());
}

#[test]
fn shift_expand_examples() {
    let s = uni(0, -6, 6);
    let inv_t = HSeries::monomial(&s, 0, &[-1], q(1, 1)).unwrap();
    let e = inv_t.shift_expand(false, ("u", "v"), 5).unwrap();
    for m in 0..=5 {
        assert_eq!(e.coeff(0, &[-m - 1, m]), q(1, 1));
    }
    assert_eq!(e.len(), 6);

    let t = HSeries::var(&s, 0);
    let e = t.shift_expand(false, ("u", "v"), 5).unwrap();
    let want = HSeries::from_terms(&e.shape(), [(vec![0, 1, 0], q(1, 1)), (vec![0, 0, 1], q(-1, 1))]).unwrap();
    assert!(e.eq_on_window(&want).unwrap());

    let t2 = t.mul(&t).unwrap();
    let e = t2.shift_expand(false, ("u", "v"), 5).unwrap();
    assert_eq!(e.coeff(0, &[2, 0]), q(1, 1));
    assert_eq!(e.coeff(0, &[1, 1]), q(-2, 1));
    assert_eq!(e.coeff(0, &[0, 2]), q(1, 1));
    assert_eq!(e.len(), 3);
    // polynomials have a complete v direction
    assert_eq!(e.dims()[2].ceil, 2);
    assert_eq!(e.shift_expand(false, ("a", "b"), 1).is_err(), true);
}

#[test]
fn derive_examples() {
    let s = uni(0, -6, 6);
    let u = HSeries::var(&s, 0);
    assert!(u.mul(&u).unwrap().derive(0).unwrap().eq_on_window(&u.scale(&q(2, 1)).unwrap()).unwrap());
    let inv = HSeries::monomial(&s, 0, &[-1], q(1, 1)).unwrap();
    let d = inv.derive(0).unwrap();
    assert_eq!(d.coeff(0, &[-2]), q(-1, 1));
    let s5 = uni(0, 0, 5);
    let e5 = exp_series(&s5, &q(1, 1), 5).unwrap();
    let d = e5.derive(0).unwrap();
    assert_eq!(d.dims()[1].hi, 4);
    assert!(d.eq_on_window(&exp_series(&uni(0, 0, 4), &q(1, 1), 4).unwrap()).unwrap());
}

#[test]
fn shift_h_and_subst() {
    let s = uni(3, -6, 6);
    let inv = HSeries::monomial(&s, 0, &[-1], q(1, 1)).unwrap();
    // 1/(u + h/2) = sum (-h/2)^m u^{-m-1}
    let f = inv.shift_h(&q(1, 2)).unwrap();
    for m in 0..=3 {
        assert_eq!(f.coeff(m, &[-m - 1]), q((-1i64).pow(m as u32), 2i64.pow(m as u32)));
    }
    // 1/u at u = -h/4 is -4/h
    let g = inv.subst_h(&q(-1, 4), (-1, 3)).unwrap();
    assert_eq!(g.coeff(-1, &[]), q(-4, 1));
    assert_eq!(g.len(), 1);
}

#[test]
fn json_roundtrip() {
    let s = uni(2, -3, 3);
    let f = HSeries::from_terms(&s, [(vec![0, -1], q(1, 2)), (vec![2, 3], Scalar::root_of_unity(Mode::Exact, 3, 1))]).unwrap();
    let back = HSeries::from_json(&f.to_json()).unwrap();
    assert_eq!(back, f);
    let e = exp_series(&s, &q(1, 1), 3).unwrap();
    assert_eq!(e.dims()[1].ceil, INF);
    assert_eq!(HSeries::from_json(&e.to_json()).unwrap(), e);
}

#[test]
fn mode_and_var_mismatch() {
    let a = HSeries::one(&uni(1, 0, 2));
    let b = HSeries::one(&Shape::uni("u", Mode::Approx, 1, (0, 2)));
    assert!(a.add(&b).is_err());
    let c = HSeries::one(&Shape::uni("v", Mode::Exact, 1, (0, 2)));
    assert!(a.mul(&c).is_err());
}

fn arb_series(nvars: usize) -> impl Strategy<Value = Vec<(Vec<i64>, i64, i64)>> {
    prop::collection::vec(
        (prop::collection::vec(-2i64..=2, nvars + 1), -5i64..=5, 1i64..=4),
        0..6,
    )
}

fn build(shape: &Shape, raw: &[(Vec<i64>, i64, i64)]) -> HSeries {
    let terms = raw.iter().map(|(k, p, d)| {
        let mut k = k.clone();
        k[0] = k[0].abs();
        (k, Scalar::frac(Mode::Exact, *p, *d))
    });
    HSeries::from_terms(shape, terms).unwrap()
}

fn shape2() -> Shape {
    Shape::new(&["u", "v"], Mode::Exact, (0, 3), &[(-3, 3), (-2, 3)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(a in arb_series(2), b in arb_series(2), c in arb_series(2)) {
        let s = shape2();
        let (a, b, c) = (build(&s, &a), build(&s, &b), build(&s, &c));
        let l = a.mul(&b).unwrap().mul(&c).unwrap();
        let r = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(l.eq_on_window(&r).unwrap());
        let l = a.mul(&b.add(&c).unwrap()).unwrap();
        let r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert!(l.eq_on_window(&r).unwrap());
        prop_assert!(a.mul(&b).unwrap().eq_on_window(&b.mul(&a).unwrap()).unwrap());
    }

    #[test]
    fn leibniz(a in arb_series(2), b in arb_series(2)) {
        let s = shape2();
        let (a, b) = (build(&s, &a), build(&s, &b));
        for k in 0..2 {
            let l = a.mul(&b).unwrap().derive(k).unwrap();
            let r = a.derive(k).unwrap().mul(&b).unwrap().add(&a.mul(&b.derive(k).unwrap()).unwrap()).unwrap();
            prop_assert!(l.eq_on_window(&r).unwrap());
        }
    }

    #[test]
    fn shift_expand_is_multiplicative(a in arb_series(1), b in arb_series(1)) {
        let s = uni(2, -4, 4);
        let (a, b) = (build(&s, &a), build(&s, &b));
        let l = a.mul(&b).unwrap().shift_expand(false, ("u", "v"), 4).unwrap();
        let r = a.shift_expand(false, ("u", "v"), 4).unwrap().mul(&b.shift_expand(false, ("u", "v"), 4).unwrap()).unwrap();
        prop_assert!(l.box_nonempty());
        prop_assert!(l.eq_on_window(&r).unwrap());
    }

    #[test]
    fn invert_is_two_sided(raw in arb_series(1), lead in 1i64..=3, k in -2i64..=2) {
        let s = uni(3, -6, 6);
        let mut f = build(&s, &raw);
        // keep the h^0 slice led by lead * u^k with only higher powers after it
        let mut keep = Vec::new();
        for (key, v) in f.terms() {
            if key[0] > 0 || key[1] > k {
                keep.push((key.clone(), v.clone()));
            }
        }
        keep.push((vec![0, k], Scalar::int(Mode::Exact, lead)));
        f = HSeries::from_terms(&s, keep).unwrap();
        let g = f.invert().unwrap();
        let one = HSeries::one(&s);
        let l = f.mul(&g).unwrap();
        let r = g.mul(&f).unwrap();
        prop_assert!(l.box_nonempty());
        prop_assert!(l.eq_on_window(&one).unwrap());
        prop_assert!(r.eq_on_window(&one).unwrap());
    }
}
