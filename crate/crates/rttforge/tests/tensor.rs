use proptest::prelude::*;
use rttforge::series::{HSeries, Mode, Scalar, Shape};
use rttforge::tensor::{adjoint_exp, fixed_points, fixed_points2, form, pair2, unit, Conj, SpecialElements, TensorOp};

fn q(p: i64, d: i64) -> Scalar {
    Scalar::frac(Mode::Exact, p, d)
}

fn one() -> Scalar {
    q(1, 1)
}

fn bracket(a: &TensorOp<Scalar>, b: &TensorOp<Scalar>) -> TensorOp<Scalar> {
    a.mul(b).unwrap().sub(&b.mul(a).unwrap()).unwrap()
}

/// Dense 8×8 matrix swapping legs i and j of (k²)^{⊗3}, built by hand.
fn swap8(i: usize, j: usize) -> [[i64; 8]; 8] {
    let mut m = [[0; 8]; 8];
    for c in 0..8 {
        let bits = [(c >> 2) & 1, (c >> 1) & 1, c & 1];
        let mut out = bits;
        // swap the two named legs
        out[i] = bits[j];
        out[j] = bits[i];
        let r = out[0] * 4 + out[1] * 2 + out[2];
        m[r][c] = 1;
    }
    m
}

fn mm8(a: &[[i64; 8]; 8], b: &[[i64; 8]; 8]) -> [[i64; 8]; 8] {
    let mut c = [[0; 8]; 8];
    for i in 0..8 {
        for j in 0..8 {
            for k in 0..8 {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

#[test]
fn leg_embed_examples() {
    let s = SpecialElements::new(2);
    assert_eq!(s.sigma.leg_embed(&[1, 2], 2).unwrap(), s.sigma);
    assert!(s.sigma.leg_embed(&[1, 1], 3).is_err());
    assert!(s.sigma.leg_embed(&[1, 4], 3).is_err());

    let s3 = SpecialElements::new(3);
    let o13 = s3.omega_sl.leg_embed(&[1, 3], 3).unwrap();
    for r in 0..27 {
        for c in 0..27 {
            let (ri, rj, rk) = (r / 9, (r / 3) % 3, r % 3);
            let (ci, cj, ck) = (c / 9, (c / 3) % 3, c % 3);
            let want = if rj == cj { s3.omega_sl.get(ri * 3 + rk, ci * 3 + ck).cloned() } else { None };
            assert_eq!(o13.get(r, c).cloned(), want);
        }
    }

    // σ¹²σ¹³ = σ¹³σ²³ against hand-built permutation matrices
    let s12 = s.sigma.leg_embed(&[1, 2], 3).unwrap();
    let s13 = s.sigma.leg_embed(&[1, 3], 3).unwrap();
    let s23 = s.sigma.leg_embed(&[2, 3], 3).unwrap();
    let lhs = s12.mul(&s13).unwrap();
    assert_eq!(lhs, s13.mul(&s23).unwrap());
    let oracle = mm8(&swap8(0, 1), &swap8(0, 2));
    assert_eq!(oracle, mm8(&swap8(0, 2), &swap8(1, 2)));
    for r in 0..8 {
        for c in 0..8 {
            let got = lhs.get(r, c).map(|v| if v.is_one() { 1 } else { 99 }).unwrap_or(0);
            assert_eq!(got, oracle[r][c]);
        }
    }
}

#[test]
fn heisenberg_pair_n2() {
    let s = SpecialElements::new(2);
    let a = TensorOp::from_entries(2, 1, [((0, 1), one()), ((1, 0), one())]).unwrap();
    let b = TensorOp::from_entries(2, 1, [((0, 0), one()), ((1, 1), q(-1, 1))]).unwrap();
    assert_eq!(s.a, a);
    assert_eq!(s.b, b);
    let binv = s.heis_inv(0, 1);
    assert_eq!(s.b.mul(&s.a).unwrap().mul(&binv).unwrap(), a.neg());
}

#[test]
fn heisenberg_relation() {
    for n in 1..=5 {
        let s = SpecialElements::new(n);
        let ba = s.b.mul(&s.a).unwrap();
        let ab = s.a.mul(&s.b).unwrap().scale(&s.epsilon()).unwrap();
        assert_eq!(ba, ab, "N = {n}");
        for p in 0..n as i64 {
            for qq in 0..n as i64 {
                let id = s.heis(p, qq).mul(&s.heis_inv(p, qq)).unwrap();
                assert_eq!(id, TensorOp::identity(n, 1, &one()));
            }
        }
    }
}

#[test]
fn omega_and_sigma() {
    for n in 1..=4 {
        let s = SpecialElements::new(n);
        let id = TensorOp::identity(n, 2, &one());
        assert_eq!(s.sigma.mul(&s.sigma).unwrap(), id);
        let want = s.sigma.sub(&id.scale(&q(1, n as i64)).unwrap()).unwrap().scale(&q(1, n as i64)).unwrap();
        assert_eq!(s.omega_sl, want);
        // invariance of the Casimir
        for x in s.sl_basis() {
            let d = x.leg_embed(&[1], 2).unwrap().add(&x.leg_embed(&[2], 2).unwrap()).unwrap();
            assert!(bracket(&s.omega_sl, &d).is_zero());
            assert!(bracket(&s.omega_gl, &d).is_zero());
        }
        // L + L²¹ = Ω
        assert_eq!(s.l.add(&s.l.flip().unwrap()).unwrap(), s.omega_sl);
    }
    let s = SpecialElements::new(2);
    let mut want = TensorOp::zero(2, 2);
    for (r, c, v) in [(0, 0, 1), (1, 2, 2), (2, 1, 2), (3, 3, 1), (1, 1, -1), (2, 2, -1)] {
        want.add_entry(r, c, q(v, 4)).unwrap();
    }
    want.prune();
    assert_eq!(s.omega_sl, want);
}

#[test]
fn l_zero_dual_on_cartan() {
    for n in 2..=4 {
        let s = SpecialElements::new(n);
        let basis: Vec<TensorOp<Scalar>> = s.sl_basis().into_iter().skip(n * (n - 1)).collect();
        let k = basis.len();
        // Gram matrix and its inverse by exact elimination
        let g: Vec<Vec<Scalar>> = basis.iter().map(|x| basis.iter().map(|y| form(x, y).unwrap()).collect()).collect();
        let mut aug: Vec<Vec<Scalar>> = (0..k)
            .map(|i| {
                let mut r = g[i].clone();
                r.extend((0..k).map(|j| if i == j { one() } else { q(0, 1) }));
                r
            })
            .collect();
        for c in 0..k {
            let p = (c..k).find(|&r| !aug[r][c].is_zero()).unwrap();
            aug.swap(c, p);
            let inv = aug[c][c].inv().unwrap();
            for v in aug[c].iter_mut() {
                *v = v.mul(&inv).unwrap();
            }
            for r in 0..k {
                if r != c && !aug[r][c].is_zero() {
                    let f = aug[r][c].clone();
                    let row_c = aug[c].clone();
                    for (x, y) in aug[r].iter_mut().zip(&row_c) {
                        *x = x.sub(&f.mul(y).unwrap()).unwrap();
                    }
                }
            }
        }
        let mut l0 = TensorOp::zero(n, 2);
        for i in 0..k {
            for j in 0..k {
                let c = aug[i][k + j].clone();
                let t = rttforge::tensor::kron(&basis[i], &basis[j]).unwrap().scale(&c).unwrap();
                l0 = l0.add(&t).unwrap();
            }
        }
        assert_eq!(l0, s.l_zero, "N = {n}");
        for x in &basis {
            for y in &basis {
                assert_eq!(pair2(&s.l_zero, x, y).unwrap(), form(x, y).unwrap());
            }
        }
    }
}

#[test]
fn constant_l_solves_cybe() {
    for n in 2..=3 {
        let s = SpecialElements::new(n);
        let l12 = s.l.leg_embed(&[1, 2], 3).unwrap();
        let l13 = s.l.leg_embed(&[1, 3], 3).unwrap();
        let l23 = s.l.leg_embed(&[2, 3], 3).unwrap();
        let res = bracket(&l12, &l13).add(&bracket(&l12, &l23)).unwrap().add(&bracket(&l13, &l23)).unwrap();
        assert!(res.is_zero());
        let o12 = s.omega_sl.leg_embed(&[1, 2], 3).unwrap();
        let o13 = s.omega_sl.leg_embed(&[1, 3], 3).unwrap();
        assert!(!bracket(&o12, &o13).is_zero());
    }
}

#[test]
fn lambda_is_a_homomorphism() {
    for n in 2..=4 {
        let s = SpecialElements::new(n);
        let ni = n as i64;
        let x = unit(n, 0, 1, &one()).add(&unit(n, n - 1, 0, &q(3, 2))).unwrap();
        let y = unit(n, 1, 1, &one()).add(&unit(n, 0, n - 1, &q(-2, 1))).unwrap();
        for a in 0..ni {
            for b in 0..ni {
                let l = s.lam(a, b);
                let lhs = l.apply(&x.mul(&y).unwrap()).unwrap();
                assert_eq!(lhs, l.apply(&x).unwrap().mul(&l.apply(&y).unwrap()).unwrap());
                for c in 0..ni {
                    for d in 0..ni {
                        let comp = l.compose(&s.lam(c, d)).unwrap();
                        let sum = s.lam(a + c, b + d);
                        assert_eq!(comp.apply(&x).unwrap(), sum.apply(&x).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn lambda_fixed_points_are_scalars() {
    for n in 2..=3 {
        let s = SpecialElements::new(n);
        let fp = fixed_points(n, &[s.lam(1, 0), s.lam(0, 1)]).unwrap();
        assert_eq!(fp.len(), 1);
        let c = fp[0].get(0, 0).unwrap().clone();
        assert_eq!(fp[0], TensorOp::identity(n, 1, &c));

        let id = Conj { g: TensorOp::identity(n, 1, &one()), ginv: TensorOp::identity(n, 1, &one()) };
        let gens = vec![
            (id.clone(), s.lam(1, 0)),
            (id.clone(), s.lam(0, 1)),
            (s.lam(1, 0), id.clone()),
            (s.lam(0, 1), id),
        ];
        let fp2 = fixed_points2(n, &gens).unwrap();
        assert_eq!(fp2.len(), 1);
        // diagonal twists alone fix much more, e.g. σ
        let diag = vec![(s.lam(1, 0), s.lam(1, 0)), (s.lam(0, 1), s.lam(0, 1))];
        assert!(fixed_points2(n, &diag).unwrap().len() > 1);
    }
}

#[test]
fn adjoint_exp_examples() {
    let s = SpecialElements::new(2);
    let shape = Shape::uni("u", Mode::Exact, 0, (-3, 6));
    let m = s.omega_sl.lift(&shape).unwrap();
    let zero = TensorOp::zero(2, 1);
    let out = adjoint_exp(&zero, &m, &[(1, 0, -1)], 6).unwrap();
    assert_eq!(out, m);
    let scalar = TensorOp::identity(2, 1, &q(5, 1));
    let out = adjoint_exp(&scalar, &m, &[(1, 0, -1), (2, 0, 1)], 6).unwrap();
    for (k, v) in m.entries() {
        assert!(out.get(k.0, k.1).unwrap().eq_on_window(v).unwrap());
    }
    // nilpotent ρ: Ad is exact and invariant tensors stay fixed under the diagonal action
    let e = unit(2, 0, 1, &one());
    let out = adjoint_exp(&e, &m, &[(1, 0, 1), (2, 0, 1)], 6).unwrap();
    for (k, v) in out.entries() {
        let want = m.get(k.0, k.1).cloned().unwrap_or_else(|| HSeries::zero(&shape));
        assert!(v.eq_on_window(&want).unwrap());
    }
}

fn arb_op(n: usize, legs: usize) -> impl Strategy<Value = TensorOp<Scalar>> {
    let dim = n.pow(legs as u32);
    prop::collection::vec(((0..dim), (0..dim), -3i64..=3), 0..10).prop_map(move |v| {
        TensorOp::from_entries(n, legs, v.into_iter().map(|(r, c, x)| ((r, c), q(x, 1)))).map(|mut t| {
            t.prune();
            t
        })
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn leg_embed_is_functorial(a in arb_op(2, 2), b in arb_op(2, 2), legs in prop::sample::select(vec![[1usize, 2], [1, 3], [2, 3], [3, 1], [2, 1], [3, 2]])) {
        let l = a.mul(&b).unwrap().leg_embed(&legs, 3).unwrap();
        let r = a.leg_embed(&legs, 3).unwrap().mul(&b.leg_embed(&legs, 3).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }
}
