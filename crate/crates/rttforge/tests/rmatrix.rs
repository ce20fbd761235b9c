use num_complex::Complex64;
use rttforge::rmatrix::checks::*;
use rttforge::rmatrix::{ClassicalR, Family, QuantumR, RMatrixSpec};
use rttforge::series::{HSeries, Mode, Scalar, Shape};
use rttforge::tensor::TensorOp;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn spec(f: Family, n: usize, h: i64, win: (i64, i64)) -> RMatrixSpec {
    RMatrixSpec::new(f, n).with_window(h, win)
}

#[test]
fn rational_r_matches_geometric_expansion() {
    // R_rat = 1 − Ω Σ_m h^{m+1} N^{−2m} u^{−m−1}
    let s = spec(Family::Rational, 2, 3, (-5, 3));
    let q = QuantumR::make(&s).unwrap();
    let om = &q.classical.special.omega_sl;
    let sh = q.shape();
    for (&(r, k), e) in q.series.entries() {
        let mut t = HSeries::zero(&sh);
        if r == k {
            t = t.add(&HSeries::one(&sh)).unwrap();
        }
        if let Some(w) = om.get(r, k) {
            for m in 0..3 {
                let coef = Scalar::frac(Mode::Exact, -1, 4i64.pow(m as u32)).mul(w).unwrap();
                t = t.add(&HSeries::monomial(&sh, m + 1, &[-m - 1], coef).unwrap()).unwrap();
            }
        }
        assert!(e.eq_on_window(&t).unwrap(), "entry {r},{k}");
    }
}

#[test]
fn series_agree_with_point_evaluators() {
    for f in [Family::Rational, Family::Trig, Family::Elliptic, Family::Yang] {
        let s = spec(f, 2, 2, (-4, 4));
        let q = QuantumR::make(&s).unwrap();
        let (u, h) = (c(0.05, 0.02), c(0.002, 0.001));
        let a = q.series.eval(&[u], h);
        let b = q.eval(u, h);
        let gap = a.sub(&b).unwrap().max_norm();
        assert!(gap < 1e-5, "{f:?}: {gap}");
        let cl = ClassicalR::make(&s).unwrap();
        let u = c(0.01, 0.005);
        let gap = cl.series.eval(&[u], c(0.0, 0.0)).sub(&cl.eval(u)).unwrap().max_norm();
        assert!(gap < 1e-6, "{f:?} classical: {gap}");
    }
}

#[test]
fn cybe_exact_for_yang_and_trig() {
    for (f, n) in [(Family::Yang, 2), (Family::Yang, 3), (Family::Trig, 2), (Family::Rational, 2)] {
        let cl = ClassicalR::make(&spec(f, n, 0, (-4, 4))).unwrap();
        let r = check_cybe(&cl, 0.0);
        assert!(r.passed && r.exact_zero == Some(true), "{f:?} {n}: {}", r.summary());
    }
}

#[test]
fn elliptic_cybe_numeric() {
    let cl = ClassicalR::make(&RMatrixSpec::new(Family::Elliptic, 2)).unwrap();
    let r = check_cybe_numeric(&cl, 20, 7, 1e-8);
    assert!(r.passed, "{}", r.summary());
}

#[test]
fn trig_cybe_numeric_n3_and_twist() {
    for r in [1, 2] {
        let mut s = RMatrixSpec::new(Family::Trig, 3);
        s.r = r;
        let cl = ClassicalR::make(&s).unwrap();
        let rep = check_cybe_numeric(&cl, 10, 3, 1e-10);
        assert!(rep.passed, "r={r}: {}", rep.summary());
    }
}

#[test]
fn qybe_exact_yang_n2() {
    let q = QuantumR::make(&spec(Family::Yang, 2, 4, (-6, 6))).unwrap();
    let r = check_qybe(&q, 0.0);
    assert!(r.passed, "{}", r.summary());
}

#[test]
fn qybe_numeric_families() {
    for (f, n) in [(Family::Rational, 3), (Family::Trig, 2), (Family::Trig, 3), (Family::Elliptic, 2), (Family::Elliptic, 3)] {
        let q = QuantumR::make(&spec(f, n, 2, (-3, 3))).unwrap();
        let r = check_qybe_numeric(&q, 8, 11, 1e-9);
        assert!(r.passed, "{f:?} {n}: {}", r.summary());
    }
}

#[test]
fn unitarity_classical_and_quantum() {
    for f in [Family::Yang, Family::Rational, Family::Trig] {
        let cl = ClassicalR::make(&spec(f, 2, 0, (-5, 5))).unwrap();
        assert!(check_unitarity_classical(&cl, 0.0).passed, "{f:?}");
    }
    let cl = ClassicalR::make(&RMatrixSpec::new(Family::Elliptic, 2)).unwrap();
    assert!(check_unitarity_classical(&cl, 1e-12).passed);
    let q = QuantumR::make(&spec(Family::Rational, 2, 3, (-5, 3))).unwrap();
    let r = check_unitarity_quantum(&q, 0.0);
    assert!(r.passed, "{}", r.summary());
}

#[test]
fn elliptic_axioms_hold_and_fail_for_yang() {
    for n in [2, 3] {
        let q = QuantumR::make(&RMatrixSpec::new(Family::Elliptic, n)).unwrap();
        let r = check_elliptic_axioms(&q, 5, 1e-9);
        assert!(r.passed, "N={n}:\n{}", r.summary());
        assert!(check_one_minus_hr(&q, 1e-9).passed);
    }
    let y = QuantumR::make(&RMatrixSpec::yang(2)).unwrap();
    let r = check_elliptic_axioms(&y, 5, 1e-9);
    assert!(!r.passed);
}

#[test]
fn degenerations() {
    let q = QuantumR::make(&RMatrixSpec::new(Family::Elliptic, 2)).unwrap();
    let r = check_degeneration(&q, 1, 1e-6);
    assert!(r.passed, "{}", r.summary());
    let t = QuantumR::make(&RMatrixSpec::new(Family::Trig, 3)).unwrap();
    assert!(check_degeneration(&t, 1, 1e-6).passed);
    let cl = ClassicalR::make(&RMatrixSpec::new(Family::Trig, 3)).unwrap();
    assert!(check_classical_degeneration(&cl, 1, 1e-6).passed);
    let rat = QuantumR::make(&RMatrixSpec::new(Family::Rational, 2)).unwrap();
    assert_eq!(check_degeneration(&rat, 1, 0.0).exact_zero, Some(true));
}

#[test]
fn one_minus_hr_exact_for_trig_and_yang() {
    for f in [Family::Yang, Family::Trig, Family::Rational] {
        let q = QuantumR::make(&spec(f, 2, 3, (-4, 4))).unwrap();
        let r = check_one_minus_hr(&q, 0.0);
        assert_eq!(r.exact_zero, Some(true), "{f:?}");
    }
}

#[test]
fn trig_free_term_has_zero_rho_after_gauge() {
    for n in [2, 3] {
        let cl = ClassicalR::make(&RMatrixSpec::new(Family::Trig, n)).unwrap();
        let rho = rttforge::rmatrix::classical::rho_of(&cl.series).unwrap();
        assert!(rho.is_zero());
        // residue is Ω
        assert!(cl.residue().unwrap().sub(&cl.special.omega_sl).unwrap().is_zero());
    }
}

#[test]
fn literal_form_has_exact_pole_cancellation() {
    let q = QuantumR::make(&spec(Family::Rational, 2, 2, (-3, 3))).unwrap();
    let lit = q.literal_form().unwrap();
    let h0: TensorOp<HSeries> = lit.map(|s| Ok(s.truncate(&[(0, 0), (-3, 3)]))).unwrap();
    let one = TensorOp::identity(2, 2, &HSeries::one(&Shape::uni("u", Mode::Exact, 0, (-3, 3))));
    for (&(r, k), s) in h0.entries() {
        let want = one.get(r, k).cloned().unwrap_or_else(|| HSeries::zero(&s.shape()));
        assert!(s.sub(&want).unwrap().is_zero(), "{r},{k}");
    }
}

#[test]
fn qybe_exact_trig_on_widened_build() {
    for n in [2, 3] {
        let r = check_qybe_spec(&spec(Family::Trig, n, 1, (-3, 3)), 0.0);
        assert_eq!(r.exact_zero, Some(true), "{}", r.summary());
    }
    let r = check_qybe_spec(&spec(Family::Elliptic, 2, 2, (-3, 3)), 1e-9);
    assert!(r.passed, "{}", r.summary());
}
