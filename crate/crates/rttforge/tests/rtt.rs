use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rttforge::liebialg::PunctureConfig;
use rttforge::rmatrix::{Algebra, QuantumR, RMatrixSpec};
use rttforge::rtt::engine::Entry;
use rttforge::rtt::*;
use rttforge::series::{Mode, Scalar};

fn yang_cfg(n: usize, z: &[i64]) -> PunctureConfig {
    let mut s = RMatrixSpec::yang(n);
    s.algebra = Algebra::Gl;
    PunctureConfig::new(s, z.iter().map(|&x| Scalar::int(Mode::Exact, x)).collect()).unwrap()
}

#[test]
fn pole_r_series_matches_quantum_yang() {
    let q = QuantumR::make(&RMatrixSpec::yang(2).with_window(3, (-4, 2))).unwrap();
    let p = PoleR::yang(2).series(3, (-4, 2)).unwrap();
    let d = q.series.sub(&p).unwrap();
    assert!(d.entries().values().all(|s| s.is_zero()));
}

#[test]
fn relations_reduce_to_zero() {
    for r in [PoleR::yang(2), PoleR::rational(2)] {
        let alg = RttAlgebra::single(r, 3);
        let rels = alg.emit_relations(1).unwrap();
        assert!(rels.pole.is_empty());
        for rel in rels.all() {
            let nf = alg.normal_form(&rel.element).unwrap();
            assert!(nf.is_zero(), "{}: {}", rel.u, nf);
        }
    }
    let alg = RttAlgebra::new(yang_cfg(2, &[0, 1]), PoleR::yang(2), 2).unwrap();
    for rel in alg.emit_relations(1).unwrap().all() {
        assert!(alg.normal_form(&rel.element).unwrap().is_zero());
    }
}

#[test]
fn corrupted_r_leaves_pole_remainders() {
    let alg = RttAlgebra::single(PoleR::corrupted(2), 2);
    assert!(!alg.check_pole_cancellation(3).unwrap().passed);
    assert!(!alg.emit_relations(1).unwrap().pole.is_empty());
    for r in [PoleR::yang(3), PoleR::rational(3)] {
        assert!(RttAlgebra::single(r, 2).check_pole_cancellation(4).unwrap().passed);
    }
}

#[test]
fn normal_form_is_idempotent_and_confluent() {
    let alg = RttAlgebra::new(yang_cfg(2, &[0, 1]), PoleR::yang(2), 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let w = alg.random_word(&mut rng, 3, 1);
        let x = alg.normal_form(&alg.word(&w)).unwrap();
        assert!(RttAlgebra::is_normal(&x));
        assert_eq!(alg.normal_form(&x).unwrap(), x);
    }
    let r = alg.confluence_probe(30, 5, 4, 1).unwrap();
    assert!(r.passed, "{}", r.summary());
}

#[test]
fn tform_low_h_parts_vanish() {
    for r in [PoleR::yang(2), PoleR::rational(2)] {
        let alg = RttAlgebra::single(r, 3);
        for (a, b) in [(0, 0), (1, 0), (2, 1), (1, 2)] {
            let e = Entry { p: 0, q: 1, r: 1, s: 0 };
            let t = alg.tform_relation(0, a, b, e).unwrap();
            assert!(t.h_part(0).is_zero() && t.h_part(1).is_zero());
            assert!(!t.h_part(2).is_zero() || (a, b) == (0, 0));
        }
    }
}

#[test]
fn pbw_counts() {
    use rttforge::rtt::pbw::*;
    assert_eq!(sorted_word_count(8, 2), 45);
    assert_eq!(sorted_word_count(8, 3), 165);
    for (g, m) in [(3, 4), (8, 3), (5, 0)] {
        assert_eq!(sorted_word_count(g, m), monomial_count(g, m));
    }
    let alg = RttAlgebra::single(PoleR::yang(2), 2);
    let t = pbw_count(&alg, 1, 2).unwrap();
    println!("{}", t.to_json());
    assert!(t.flat() && t.classical == 45);
    let bad = RttAlgebra::single(PoleR::corrupted(2), 2);
    let t = pbw_count(&bad, 1, 2).unwrap();
    println!("corrupted {}", t.to_json());
    assert!(!t.flat());
}

#[test]
fn pbw_length_three() {
    use rttforge::rtt::pbw::*;
    let alg = RttAlgebra::single(PoleR::yang(2), 1);
    let t = pbw_count(&alg, 1, 3).unwrap();
    println!("{}", t.to_json());
    assert!(t.flat() && t.classical == 165);
}

#[test]
fn qdet_of_yang_and_f0() {
    use rttforge::rtt::qdet::*;
    use rttforge::series::{HSeries, Shape};
    let q = QuantumR::make(&RMatrixSpec::yang(2).with_window(3, (-6, 6))).unwrap();
    let d = qdet_r(&q).unwrap();
    assert!(d.off_scalar.is_zero());
    // (u − 3h/4)/(u − h/4) = 1 − Σ_m 2^{−1} 4^{−m} h^{m+1} u^{−m−1}
    let sh = q.shape();
    let mut want = HSeries::one(&sh);
    for m in 0..3 {
        let c = Scalar::frac(Mode::Exact, -1, 2 * 4i64.pow(m as u32));
        want = want.add(&HSeries::monomial(&sh, m + 1, &[-m - 1], c).unwrap()).unwrap();
    }
    println!("{}", d.scalar.to_json());
    assert!(d.scalar.sub(&want).unwrap().is_zero());
    let f = solve_f0(&q).unwrap();
    assert!(f.residual.is_zero(), "{}", f.residual.to_json());
    println!("f0 {}", f.f0.to_json());
    let r = check_h0_det(20, 3, 9).unwrap();
    assert!(r.passed, "{}", r.summary());
    assert_eq!(permutations(4).iter().filter(|p| p.1 == 1).count(), 12);
    let _ = Shape::uni("u", Mode::Exact, 1, (0, 0));
}

#[test]
fn qdet_scaling_law() {
    use rttforge::rtt::qdet::*;
    use rttforge::series::HSeries;
    let q = QuantumR::make(&RMatrixSpec::yang(3).with_window(2, (-5, 5))).unwrap();
    let sh = q.shape();
    let f = HSeries::one(&sh).add(&HSeries::monomial(&sh, 1, &[-1], Scalar::int(Mode::Exact, 2)).unwrap()).unwrap();
    let a = qdet_r(&q.scale_r(&f).unwrap()).unwrap().scalar;
    let b = shifted_product(&f, 3).unwrap().mul(&qdet_r(&q).unwrap().scalar).unwrap();
    assert!(a.sub(&b).unwrap().is_zero());
}

#[test]
fn qdet_is_central_in_yang_algebra() {
    use rttforge::rtt::qdet::*;
    let alg = RttAlgebra::single(PoleR::yang(2), 2);
    let r = check_qdet_central(&alg, 1, 1).unwrap();
    println!("{}", r.summary());
    assert!(r.passed);
}

#[test]
fn coproduct_laws() {
    use rttforge::rtt::hopf::*;
    let alg = RttAlgebra::new(yang_cfg(2, &[0, 1]), PoleR::yang(2), 2).unwrap();
    let one = alg.one();
    assert_eq!(coproduct(&alg, &one).unwrap(), one);
    assert!(check_counit(&alg, 30, 1, 2, 1).unwrap().passed);
    let r = check_hopf_ideal(&alg, 1).unwrap();
    assert!(r.passed, "{}", r.summary());
    let bad = RttAlgebra::single(PoleR::corrupted(2), 2);
    assert!(!check_hopf_ideal(&bad, 1).unwrap().passed);
}

#[test]
fn pairing_b_axioms() {
    use rttforge::rtt::pairing::*;
    for r in [PoleR::yang(2), PoleR::rational(2)] {
        let rep = check_b_axioms(&r, 12, 4, 3).unwrap();
        assert!(rep.passed, "{}", rep.summary());
    }
    let q = QuantumR::make(&RMatrixSpec::yang(2).with_window(3, (-6, 6))).unwrap();
    let rep = check_b_matches_r(&q, &PoleR::yang(2)).unwrap();
    assert!(rep.passed, "{}", rep.summary());
    let args: Vec<Scalar> = [(7, 2), (1, 1), (-2, 1)].iter().map(|&(a, b)| Scalar::frac(Mode::Exact, a, b)).collect();
    assert!(check_y_qybe(&PoleR::yang(2), &args, 3).unwrap().passed);
    assert!(check_y_qybe(&PoleR::rational(2), &args, 2).unwrap().passed);
    // the corrupted R is R_Y(w − h/2); its QYBE defect starts at h³
    assert!(check_y_qybe(&PoleR::corrupted(2), &args, 2).unwrap().passed);
    assert!(!check_y_qybe(&PoleR::corrupted(2), &args, 3).unwrap().passed);
}

#[test]
fn factored_product_laws() {
    use rttforge::rtt::factored::*;
    let alg = RttAlgebra::new(yang_cfg(2, &[0, 1]), PoleR::yang(2), 2).unwrap();
    let r = check_factored_assoc(&alg, 50, 8, 1).unwrap();
    assert!(r.passed, "{}", r.summary());
    let alg3 = RttAlgebra::new(yang_cfg(2, &[0, 1, 2]), PoleR::yang(2), 1).unwrap();
    let r = check_factored_assoc(&alg3, 50, 9, 1).unwrap();
    assert!(r.passed, "{}", r.summary());
    let r = check_hexagon(&alg3, 1).unwrap();
    assert!(r.passed, "{}", r.summary());
}

#[test]
fn classical_limit_matches_lie_model() {
    use rttforge::rtt::classical::classical_limit_check;
    let alg = RttAlgebra::single(PoleR::yang(2), 1);
    let r = classical_limit_check(&alg, 1).unwrap();
    assert!(r.passed, "{}", r.summary());
    let alg = RttAlgebra::new(yang_cfg(2, &[0, 1]), PoleR::yang(2), 1).unwrap();
    let r = classical_limit_check(&alg, 1).unwrap();
    assert!(r.passed, "{}", r.summary());
}

#[test]
fn yang_degree_zero_commutator_closed_form() {
    // [t_{pq,0}, t_{rs,0}] = (δ_ps t_{rq,1} − δ_rq t_{ps,1})/2 + O(h)
    let alg = RttAlgebra::single(PoleR::yang(2), 2);
    let g = |p, q, l| Gen::new(0, l, p, q);
    let half = Scalar::frac(Mode::Exact, 1, 2);
    for (p, q, r, s) in [(0, 1, 1, 0), (0, 0, 0, 1), (1, 1, 0, 0), (0, 1, 0, 1)] {
        let c = alg.commutator(g(p, q, 0), g(r, s, 0)).unwrap().h_part(0);
        let mut want = alg.zero();
        if p == s {
            want.add_term(Term { h: 0, word: vec![g(r, q, 1)] }, half.clone()).unwrap();
        }
        if r == q {
            want.add_term(Term { h: 0, word: vec![g(p, s, 1)] }, half.neg()).unwrap();
        }
        assert_eq!(c, want, "{p}{q}{r}{s}");
    }
}
