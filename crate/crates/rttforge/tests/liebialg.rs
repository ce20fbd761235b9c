use rttforge::liebialg::checks::*;
use rttforge::liebialg::{gbinom, LBasis, LieModel, PunctureConfig};
use rttforge::rmatrix::{Algebra, Family, RMatrixSpec};
use rttforge::series::{Mode, Scalar};

fn gl_yang(n: usize) -> RMatrixSpec {
    let mut s = RMatrixSpec::yang(n);
    s.algebra = Algebra::Gl;
    s
}

fn model(spec: RMatrixSpec, l: usize) -> LieModel {
    LieModel::new(PunctureConfig::single(spec), l).unwrap()
}

fn two_point(spec: RMatrixSpec, l: usize) -> LieModel {
    let z = vec![Scalar::int(Mode::Exact, 0), Scalar::int(Mode::Exact, 1)];
    LieModel::new(PunctureConfig::new(spec, z).unwrap(), l).unwrap()
}

fn all_models() -> Vec<(String, LieModel)> {
    vec![
        ("yang gl".into(), model(gl_yang(2), 3)),
        ("yang sl".into(), model(RMatrixSpec::yang(2), 3)),
        ("rational".into(), model(RMatrixSpec::new(Family::Rational, 2), 3)),
        ("trig".into(), model(RMatrixSpec::new(Family::Trig, 2), 3)),
        ("trig N=3".into(), model(RMatrixSpec::new(Family::Trig, 3), 2)),
        ("elliptic".into(), model(RMatrixSpec::new(Family::Elliptic, 2), 2)),
        ("yang gl two-point".into(), two_point(gl_yang(2), 2)),
        ("rational two-point".into(), two_point(RMatrixSpec::new(Family::Rational, 2), 2)),
    ]
}

#[test]
fn generalized_binomials() {
    assert_eq!(gbinom(5, 2), 10);
    assert_eq!(gbinom(2, 5), 0);
    // (1 + x)^{-1} = Σ (−x)^j
    for j in 0..6 {
        assert_eq!(gbinom(-1, j), if j % 2 == 0 { 1 } else { -1 });
    }
    assert_eq!(gbinom(-2, 3), -4);
}

#[test]
fn lie_axioms() {
    for (name, m) in all_models() {
        let tol = 1e-8;
        for r in [
            check_antisymmetry(&m, 4, 1, tol).unwrap(),
            check_jacobi(&m, 3, 2, tol).unwrap(),
            check_pole_cancellation(&m, tol).unwrap(),
        ] {
            assert!(r.passed, "{name}: {}", r.summary());
        }
    }
}

#[test]
fn bialgebra_axioms() {
    for (name, m) in all_models() {
        let tol = 1e-8;
        for r in [check_cojacobi(&m, tol).unwrap(), check_cocycle(&m, 3, 5, tol).unwrap()] {
            assert!(r.passed, "{name}: {}", r.summary());
        }
    }
}

#[test]
fn poisson_form_matches_bracket() {
    for (name, m) in all_models() {
        let r = check_poisson_duality(&m, 1e-8).unwrap();
        assert!(r.passed, "{name}: {}", r.summary());
    }
}

#[test]
fn beta_axioms() {
    for (name, m) in all_models() {
        if m.sites() > 1 {
            continue;
        }
        let tol = 1e-7;
        let win = (-6, 2);
        for r in [
            check_beta_routes(&m, win, tol).unwrap(),
            check_beta_shift(&m, 3, win, tol).unwrap(),
            check_beta_cocycle(&m, 2, 3, win, tol).unwrap(),
            check_beta_shift_bracket(&m, 2, 4, (-4, 2), tol).unwrap(),
        ] {
            assert!(r.passed, "{name}: {}", r.summary());
        }
    }
}

#[test]
fn isotropy_of_fz() {
    for (name, m) in all_models() {
        let r = check_isotropy(&m, 1e-8).unwrap();
        assert!(r.passed, "{name}: {}", r.summary());
    }
}

#[test]
fn trig_degenerates_to_yang() {
    let r = check_degeneration(2, 2, 4).unwrap();
    assert!(r.passed, "{}", r.to_json());
}

#[test]
fn yang_bracket_closed_form() {
    // [x_a(Y), x_b(Z)] = x_{a+b+1}([Y, Z]) for yang
    let m = model(gl_yang(2), 3);
    let b1 = LBasis::new(0, 0, 0, 1);
    let b2 = LBasis::new(0, 1, 1, 0);
    let s = m.structure(b1, b2).unwrap();
    let want = m.element(0, 2, &rttforge::liebialg::commutator(&m.unit(0, 1), &m.unit(1, 0)).unwrap()).unwrap();
    assert_eq!(*s, want);
}

#[test]
fn coincident_points_rejected() {
    let z = vec![Scalar::int(Mode::Exact, 1), Scalar::int(Mode::Exact, 1)];
    assert!(PunctureConfig::new(RMatrixSpec::yang(2), z).is_err());
    let z = vec![Scalar::int(Mode::Exact, 0), Scalar::int(Mode::Exact, 1)];
    let cfg = PunctureConfig::new(RMatrixSpec::new(Family::Trig, 2), z).unwrap();
    assert!(LieModel::new(cfg, 2).is_err());
}
