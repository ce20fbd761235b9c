use rttforge::liebialg::PunctureConfig;
use rttforge::reps::*;
use rttforge::rmatrix::{Algebra, RMatrixSpec};
use rttforge::rtt::{Gen, PoleR, RttAlgebra};
use rttforge::series::{HSeries, Mode, Scalar, Shape};
use rttforge::tensor::TensorOp;

fn two_point(h: u32) -> RttAlgebra {
    let mut s = RMatrixSpec::yang(2);
    s.algebra = Algebra::Gl;
    let z = vec![Scalar::int(Mode::Exact, 0), Scalar::int(Mode::Exact, 1)];
    RttAlgebra::new(PunctureConfig::new(s, z).unwrap(), PoleR::yang(2), h).unwrap()
}

#[test]
fn eval_rep_is_identity_at_h0_and_matches_r() {
    // t_{pq,0} ↦ h⁰ coefficient of −C/(−a) = C/a, with C = σ/2 on V
    let alg = RttAlgebra::single(PoleR::yang(2), 2);
    let rep = TensorRep::for_algebra(&alg, &[1]).unwrap();
    let img = rep.image_gen(Gen::new(0, 0, 0, 1)).unwrap();
    let sh = Shape::scalar(Mode::Exact, 2);
    // σ block (0,1) on leg 1 is E_10; R(u − 1) = 1 − hσ/(2(u − 1)), so t_0 = σ/2
    let want = TensorOp::from_entries(2, 1, [((1, 0), HSeries::constant(&sh, Scalar::frac(Mode::Exact, 1, 2)).unwrap())]).unwrap();
    assert!(img.sub(&want).unwrap().entries().values().all(|v| v.is_zero()));
    assert!(TensorRep::for_algebra(&alg, &[0]).is_err());
}

#[test]
fn relations_vanish_in_reps() {
    let alg = two_point(2);
    let rep = TensorRep::for_algebra(&alg, &[1, 2]).unwrap();
    let r = check_relations_in_rep(&alg, &rep, 1).unwrap();
    assert!(r.passed, "{}", r.summary());
    // swapping the points changes the images but not the verdict
    let swapped = TensorRep::for_algebra(&alg, &[2, 1]).unwrap();
    assert!(check_relations_in_rep(&alg, &swapped, 1).unwrap().passed);
    let g = Gen::new(0, 1, 0, 1);
    let d = rep.image_gen(g).unwrap().sub(&swapped.image_gen(g).unwrap()).unwrap();
    assert!(!d.entries().values().all(|v| v.is_zero()));
    for r in [PoleR::rational(2), PoleR::yang(3)] {
        let alg = RttAlgebra::single(r, 2);
        let rep = TensorRep::for_algebra(&alg, &[1, 3]).unwrap();
        assert!(check_relations_in_rep(&alg, &rep, 1).unwrap().passed);
    }
}

#[test]
fn corrupted_r_is_not_a_rep_of_its_own_relations() {
    let alg = RttAlgebra::single(PoleR::corrupted(2), 3);
    let rep = TensorRep::for_algebra(&alg, &[1, 2]).unwrap();
    assert!(!check_relations_in_rep(&alg, &rep, 1).unwrap().passed);
}

#[test]
fn normal_forms_are_sound_and_functorial() {
    let alg = two_point(2);
    let reps: Vec<TensorRep> = [vec![1], vec![2], vec![1, 2], vec![2, 1]].iter().map(|p| TensorRep::for_algebra(&alg, p).unwrap()).collect();
    let r = check_nf_soundness(&alg, &reps, 100, 17, 3, 1).unwrap();
    assert!(r.passed, "{}", r.summary());
    let r = check_functoriality(&alg, (1, 2), 20, 5, 1).unwrap();
    assert!(r.passed, "{}", r.summary());
}

#[test]
fn separation() {
    let alg = two_point(2);
    let a = alg.word(&[Gen::new(0, 0, 0, 1), Gen::new(1, 0, 1, 0)]);
    let b = alg.word(&[Gen::new(0, 0, 0, 0), Gen::new(1, 0, 1, 1)]);
    let r = separation_check(&alg, &a, &b, 2, &[1, 2, 3]).unwrap();
    assert!(r.passed, "{}", r.summary());
    assert!(!separation_check(&alg, &a, &a, 2, &[1, 2]).unwrap().passed);
    let single = RttAlgebra::single(PoleR::yang(2), 2);
    let x = single.gen(Gen::new(0, 1, 0, 1));
    let y = single.gen(Gen::new(0, 1, 1, 0));
    let r = separation_check(&single, &x, &y, 1, &[1]).unwrap();
    assert!(r.passed);
    assert_eq!(r.details["witness_points"], serde_json::json!([1]));
}

#[test]
fn qdet_acts_by_scalar() {
    let alg = RttAlgebra::single(PoleR::yang(2), 2);
    let r = check_qdet_in_rep(&alg, 1, 1).unwrap();
    assert!(r.passed, "{}", r.summary());
}
