//! The form B on matrix coefficients of T, from the ordered R-product
//! Π_{i=1..p} Π_{j=q..1} R^{i,p+j}(u_i − v_j + y), and the operator Y = X_l built from it.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::Result;
use crate::report::Report;
use crate::rmatrix::QuantumR;
use crate::series::{pow_scalar, HSeries, Mode, Scalar, Shape};
use crate::tensor::{digits, flat, TensorOp};

use super::poler::PoleR;

/// T_{row col}(arg).
#[derive(Clone, Debug, PartialEq)]
pub struct TFactor {
    pub row: usize,
    pub col: usize,
    pub arg: Scalar,
}

impl TFactor {
    pub fn new(row: usize, col: usize, arg: Scalar) -> TFactor {
        TFactor { row, col, arg }
    }

    fn shifted(&self, s: &Scalar) -> Result<TFactor> {
        Ok(TFactor { arg: self.arg.add(s)?, ..self.clone() })
    }
}

/// R(w) at exact w as a series in h alone: 1 − C Σ_m c^m w^{−m−1} h^{m+1}.
pub fn r_at(r: &PoleR, w: &Scalar, h_order: i64) -> Result<TensorOp<HSeries>> {
    let shape = Shape::scalar(Mode::Exact, h_order);
    let mut g = HSeries::zero(&shape);
    let mut cp = Scalar::one(Mode::Exact);
    for m in 0..h_order {
        let c = cp.mul(&pow_scalar(w, -m - 1)?)?.neg();
        g = g.add(&HSeries::monomial(&shape, m + 1, &[], c)?)?;
        cp = cp.mul(&r.shift)?;
    }
    TensorOp::identity(r.n, 2, &HSeries::one(&shape)).add(&r.c_op.map(|v| g.scale(v))?)
}

/// B(T_{a1b1}(u1)⋯T_{apbp}(up), T_{c1d1}(v1)⋯T_{cqdq}(vq))(y).
pub fn pair_b(r: &PoleR, xs: &[TFactor], ys: &[TFactor], y: &Scalar, h_order: i64) -> Result<HSeries> {
    let shape = Shape::scalar(Mode::Exact, h_order);
    let (p, q, n) = (xs.len(), ys.len(), r.n);
    let legs = p + q;
    if legs == 0 {
        return Ok(HSeries::one(&shape));
    }
    let mut prod = TensorOp::identity(n, legs, &HSeries::one(&shape));
    for (i, x) in xs.iter().enumerate() {
        for (j, v) in ys.iter().enumerate().rev() {
            let w = x.arg.sub(&v.arg)?.add(y)?;
            let rij = r_at(r, &w, h_order)?.leg_embed(&[i + 1, p + j + 1], legs)?;
            prod = prod.mul(&rij)?;
        }
    }
    let rows: Vec<usize> = xs.iter().map(|f| f.row).chain(ys.iter().map(|f| f.row)).collect();
    let cols: Vec<usize> = xs.iter().map(|f| f.col).chain(ys.iter().map(|f| f.col)).collect();
    Ok(prod.get(flat(&rows, n), flat(&cols, n)).cloned().unwrap_or_else(|| HSeries::zero(&shape)))
}

/// ε of a product of T entries: Π δ_{row col}.
pub fn counit(xs: &[TFactor], h_order: i64) -> HSeries {
    let shape = Shape::scalar(Mode::Exact, h_order);
    if xs.iter().all(|f| f.row == f.col) {
        HSeries::one(&shape)
    } else {
        HSeries::zero(&shape)
    }
}

/// Δ of a product of T entries: Σ_r (Π T_{a_k r_k}) ⊗ (Π T_{r_k b_k}).
pub fn coproduct_factors(xs: &[TFactor], n: usize) -> Vec<(Vec<TFactor>, Vec<TFactor>)> {
    let k = xs.len();
    (0..n.pow(k as u32))
        .map(|idx| {
            let r = digits(idx, n, k);
            let left = xs.iter().zip(&r).map(|(f, &m)| TFactor { col: m, ..f.clone() }).collect();
            let right = xs.iter().zip(&r).map(|(f, &m)| TFactor { row: m, ..f.clone() }).collect();
            (left, right)
        })
        .collect()
}

fn random_factors(rng: &mut impl Rng, n: usize, k: usize, lo: i64, hi: i64) -> Vec<TFactor> {
    (0..k).map(|_| TFactor::new(rng.gen_range(0..n), rng.gen_range(0..n), Scalar::int(Mode::Exact, rng.gen_range(lo..=hi)))).collect()
}

/// Compatibility of B with products on either side, shifts, and the unit.
pub fn check_b_axioms(r: &PoleR, trials: usize, seed: u64, h_order: i64) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = r.n;
    let y = Scalar::frac(Mode::Exact, 1, 2);
    let (mut prod_left, mut prod_right, mut shift, mut unit) = (0, 0, 0, 0);
    for _ in 0..trials {
        // u args in 1..5 and v args in −4..0 keep u − v + y away from 0
        let x = random_factors(&mut rng, n, 1, 1, 5);
        let x2 = random_factors(&mut rng, n, 1, 1, 5);
        let qz = rng.gen_range(1..=2);
        let z = random_factors(&mut rng, n, qz, -4, 0);
        // B(xy, z) = B(x ⊗ y, Δz)
        let xy: Vec<TFactor> = x.iter().chain(&x2).cloned().collect();
        let lhs = pair_b(r, &xy, &z, &y, h_order)?;
        let mut rhs = HSeries::zero(&lhs.shape());
        for (z1, z2) in coproduct_factors(&z, n) {
            rhs = rhs.add(&pair_b(r, &x, &z1, &y, h_order)?.mul(&pair_b(r, &x2, &z2, &y, h_order)?)?)?;
        }
        if !lhs.sub(&rhs)?.is_zero() {
            prod_left += 1;
        }
        // B(x, zy) = B(Δx, y ⊗ z)
        let px = rng.gen_range(1..=2);
        let xa = random_factors(&mut rng, n, px, 1, 5);
        let zz = random_factors(&mut rng, n, 1, -4, 0);
        let yy = random_factors(&mut rng, n, 1, -4, 0);
        let zy: Vec<TFactor> = zz.iter().chain(&yy).cloned().collect();
        let lhs = pair_b(r, &xa, &zy, &y, h_order)?;
        let mut rhs = HSeries::zero(&lhs.shape());
        for (a1, a2) in coproduct_factors(&xa, n) {
            rhs = rhs.add(&pair_b(r, &a1, &yy, &y, h_order)?.mul(&pair_b(r, &a2, &zz, &y, h_order)?)?)?;
        }
        if !lhs.sub(&rhs)?.is_zero() {
            prod_right += 1;
        }
        // B(α_s x, z)(y) = B(x, α_{−s} z)(y) = B(x, z)(y + s)
        let s = Scalar::frac(Mode::Exact, rng.gen_range(1..=5), 3);
        let xs: Vec<TFactor> = xa.iter().map(|f| f.shifted(&s)).collect::<Result<_>>()?;
        let zs: Vec<TFactor> = zy.iter().map(|f| f.shifted(&s.neg())).collect::<Result<_>>()?;
        let base = pair_b(r, &xa, &zy, &y.add(&s)?, h_order)?;
        if !pair_b(r, &xs, &zy, &y, h_order)?.sub(&base)?.is_zero() || !pair_b(r, &xa, &zs, &y, h_order)?.sub(&base)?.is_zero() {
            shift += 1;
        }
        // B(1, z) = B(z, 1) = ε(z); B = εε at h⁰
        let e = counit(&zy, h_order);
        let ok1 = pair_b(r, &[], &zy, &y, h_order)?.sub(&e)?.is_zero() && pair_b(r, &zy, &[], &y, h_order)?.sub(&e)?.is_zero();
        let b0 = pair_b(r, &xa, &zy, &y, 0)?.sub(&counit(&xa, 0).mul(&counit(&zy, 0))?)?;
        if !ok1 || !b0.is_zero() {
            unit += 1;
        }
    }
    let w = json!({"h_order": h_order, "max_factors": 2, "y": y.to_json()});
    Ok(Report::all(
        "b_axioms",
        vec![
            Report::exact("b_product_left", prod_left == 0).detail("failures", prod_left).with_window(w.clone()),
            Report::exact("b_product_right", prod_right == 0).detail("failures", prod_right).with_window(w.clone()),
            Report::exact("b_shift", shift == 0).detail("failures", shift).with_window(w.clone()),
            Report::exact("b_unit", unit == 0).detail("failures", unit).with_window(w),
        ],
    )
    .detail("trials", trials))
}

fn eval_at(s: &HSeries, w: &Scalar, h_order: i64) -> Result<HSeries> {
    let shape = Shape::scalar(Mode::Exact, h_order);
    let mut out = HSeries::zero(&shape);
    for (k, c) in s.terms() {
        if k[0] <= h_order {
            out = out.add(&HSeries::monomial(&shape, k[0], &[], c.mul(&pow_scalar(w, k[1])?)?)?)?;
        }
    }
    Ok(out)
}

/// B(T¹³(u), T²³(v))(y) against the R series of the rmatrix module, at exact points.
pub fn check_b_matches_r(q: &QuantumR, r: &PoleR) -> Result<Report> {
    let n = r.n;
    let h = q.spec.h_order;
    let mut bad = 0;
    let mut points = 0;
    for (u, v, y) in [(3, -1, 1), (2, 0, 5), (7, 2, -1)] {
        let (u, v, y) = (Scalar::int(Mode::Exact, u), Scalar::int(Mode::Exact, v), Scalar::frac(Mode::Exact, y, 2));
        let w = u.sub(&v)?.add(&y)?;
        for idx in 0..n.pow(4) {
            let d = digits(idx, n, 4);
            let (a, b, c, e) = (d[0], d[1], d[2], d[3]);
            let bv = pair_b(r, &[TFactor::new(a, b, u.clone())], &[TFactor::new(c, e, v.clone())], &y, h)?;
            let rv = match q.series.get(a * n + c, b * n + e) {
                Some(s) => eval_at(s, &w, h)?,
                None => HSeries::zero(&bv.shape()),
            };
            points += 1;
            if !bv.sub(&rv)?.is_zero() {
                bad += 1;
            }
        }
    }
    Ok(Report::exact("b_equals_r", bad == 0).detail("entries", points).detail("mismatches", bad).with_window(json!({"h_order": h})))
}

/// A tensor of T entries, one per slot, with h-series coefficients.
pub type TTensor = BTreeMap<Vec<(usize, usize)>, HSeries>;

fn tt_add(t: &mut TTensor, k: Vec<(usize, usize)>, v: HSeries) -> Result<()> {
    match t.get_mut(&k) {
        Some(old) => *old = old.add(&v)?,
        None => {
            t.insert(k, v);
        }
    }
    Ok(())
}

/// Y = X_l on slots (i, j): T_{ab}⊗T_{cd} ↦ Σ_{r,s} B(T_{ar}(u_i), T_{cs}(u_j)) T_{rb}⊗T_{sd}.
pub fn y_apply(r: &PoleR, t: &TTensor, i: usize, j: usize, args: &[Scalar], h_order: i64) -> Result<TTensor> {
    let n = r.n;
    let zero = Scalar::zero(Mode::Exact);
    let mut cache: BTreeMap<(usize, usize, usize, usize), HSeries> = BTreeMap::new();
    let mut out = TTensor::new();
    for (k, c) in t {
        let ((a, b), (cc, d)) = (k[i], k[j]);
        for rr in 0..n {
            for s in 0..n {
                let key = (a, rr, cc, s);
                let bv = match cache.get(&key) {
                    Some(v) => v.clone(),
                    None => {
                        let v = pair_b(r, &[TFactor::new(a, rr, args[i].clone())], &[TFactor::new(cc, s, args[j].clone())], &zero, h_order)?;
                        cache.insert(key, v.clone());
                        v
                    }
                };
                if bv.is_zero() {
                    continue;
                }
                let mut nk = k.clone();
                nk[i] = (rr, b);
                nk[j] = (s, d);
                tt_add(&mut out, nk, c.mul(&bv)?)?;
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// Y¹²Y¹³Y²³ = Y²³Y¹³Y¹² on all triples of T entries, arguments u_i − u_j.
pub fn check_y_qybe(r: &PoleR, args: &[Scalar], h_order: i64) -> Result<Report> {
    let n = r.n;
    let shape = Shape::scalar(Mode::Exact, h_order);
    let mut bad = 0;
    for idx in 0..n.pow(6) {
        let d = digits(idx, n, 6);
        let mut t = TTensor::new();
        t.insert(vec![(d[0], d[1]), (d[2], d[3]), (d[4], d[5])], HSeries::one(&shape));
        let mut lhs = t.clone();
        for (i, j) in [(1, 2), (0, 2), (0, 1)] {
            lhs = y_apply(r, &lhs, i, j, args, h_order)?;
        }
        let mut rhs = t;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            rhs = y_apply(r, &rhs, i, j, args, h_order)?;
        }
        let keys: std::collections::BTreeSet<_> = lhs.keys().chain(rhs.keys()).cloned().collect();
        for k in keys {
            let a = lhs.get(&k).cloned().unwrap_or_else(|| HSeries::zero(&shape));
            let b = rhs.get(&k).cloned().unwrap_or_else(|| HSeries::zero(&shape));
            if !a.sub(&b)?.is_zero() {
                bad += 1;
                break;
            }
        }
    }
    Ok(Report::exact("y_qybe", bad == 0)
        .detail("triples", n.pow(6))
        .detail("failures", bad)
        .with_window(json!({"h_order": h_order, "args": args.iter().map(|a| a.to_json()).collect::<Vec<_>>()})))
}
