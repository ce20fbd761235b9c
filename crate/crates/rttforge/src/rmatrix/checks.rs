//! Yang-Baxter, unitarity, elliptic axioms and degeneration checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::Result;
use crate::report::Report;
use crate::series::{HSeries, Mode, Scalar};
use crate::tensor::TensorOp;

use super::classical::{ClassicalR, Label};
use super::quantum::QuantumR;
use super::spec::{Family, RMatrixSpec};

/// v-order used when expanding X(u − v) in k((u))((v)).
pub const V_ORDER: i64 = 6;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Smallest exact box over all entries: `{"h": [lo, hi], "s1": .., "s2": ..}`.
pub fn residual_window(t: &TensorOp<HSeries>) -> Value {
    let mut b: Option<Vec<(i64, i64)>> = None;
    for s in t.entries().values() {
        let d: Vec<(i64, i64)> = s.dims().iter().map(|d| (d.lo, d.hi)).collect();
        b = Some(match b {
            None => d,
            Some(o) => o.iter().zip(&d).map(|(a, x)| (a.0.max(x.0), a.1.min(x.1))).collect(),
        });
    }
    let mut m = serde_json::Map::new();
    for (k, (lo, hi)) in b.unwrap_or_default().into_iter().enumerate() {
        let key = if k == 0 { "h".to_string() } else { format!("s{k}") };
        m.insert(key, json!([lo, hi]));
    }
    Value::Object(m)
}

/// Exact zero test (exact mode) or max |coefficient| ≤ tol (approx mode).
pub fn series_zero(check: &str, t: &TensorOp<HSeries>, mode: Mode, tol: f64) -> Report {
    let empty = t.entries().values().any(|s| !s.box_nonempty());
    let r = match mode {
        Mode::Exact => Report::exact(check, t.is_zero() && !empty),
        Mode::Approx => {
            let mut r = Report::numeric(check, t.max_abs(), tol);
            if empty {
                r.passed = false;
            }
            r
        }
    };
    r.with_window(residual_window(t))
}

fn legs3(x: &TensorOp<HSeries>, which: (usize, usize), arg: usize, boxes: &[(i64, i64)]) -> Result<TensorOp<HSeries>> {
    // arg 0: X(u − v), 1: X(u), 2: X(v)
    let m = x.map(|s| match arg {
        0 => s.shift_expand(false, ("u", "v"), V_ORDER),
        1 => s.embed(&["u", "v"], 0, boxes),
        _ => s.embed(&["u", "v"], 1, boxes),
    })?;
    m.leg_embed(&[which.0, which.1], 3)
}

fn boxes_of(x: &TensorOp<HSeries>) -> Vec<(i64, i64)> {
    let d = x.entries().values().next().map(|s| s.dims()[1]).expect("nonempty");
    vec![(d.lo, d.hi), (d.lo.min(0), V_ORDER)]
}

/// [r12, r13] + [r12, r23] + [r13, r23] with r12 = r(u − v), r13 = r(u), r23 = r(v).
pub fn cybe_residual(r: &TensorOp<HSeries>) -> Result<TensorOp<HSeries>> {
    if r.entries().is_empty() {
        // r = 0, e.g. sl_1
        return Ok(TensorOp::zero(r.n(), 3));
    }
    let b = boxes_of(r);
    let r12 = legs3(r, (1, 2), 0, &b)?;
    let r13 = legs3(r, (1, 3), 1, &b)?;
    let r23 = legs3(r, (2, 3), 2, &b)?;
    let com = |a: &TensorOp<HSeries>, b: &TensorOp<HSeries>| -> Result<TensorOp<HSeries>> { a.mul(b)?.sub(&b.mul(a)?) };
    com(&r12, &r13)?.add(&com(&r12, &r23)?)?.add(&com(&r13, &r23)?)
}

/// R12(u − v) R13(u) R23(v) − R23(v) R13(u) R12(u − v).
pub fn qybe_residual(r: &TensorOp<HSeries>) -> Result<TensorOp<HSeries>> {
    let b = boxes_of(r);
    let r12 = legs3(r, (1, 2), 0, &b)?;
    let r13 = legs3(r, (1, 3), 1, &b)?;
    let r23 = legs3(r, (2, 3), 2, &b)?;
    let (a, bb) = rayon::join(|| r12.mul(&r13).and_then(|x| x.mul(&r23)), || r23.mul(&r13).and_then(|x| x.mul(&r12)));
    a?.sub(&bb?)
}

pub fn check_cybe(cl: &ClassicalR, tol: f64) -> Report {
    match cybe_residual(&cl.series) {
        Ok(t) => series_zero("cybe", &t, cl.series_mode(), tol),
        Err(e) => Report::flag("cybe", false).detail("error", e.to_string()),
    }
}

pub fn check_qybe(q: &QuantumR, tol: f64) -> Report {
    match qybe_residual(&q.series) {
        Ok(t) => series_zero("qybe", &t, q.spec.mode(), tol),
        Err(e) => Report::flag("qybe", false).detail("error", e.to_string()),
    }
}

/// Window to build R on so that the three-fold products stay exact on the
/// requested window: entries reach down to u^{-1-H} with open upper support.
pub fn qybe_build_spec(spec: &RMatrixSpec) -> RMatrixSpec {
    let mut s = spec.clone();
    if matches!(spec.family, Family::Trig | Family::Elliptic) {
        let f = 1 + spec.h_order;
        s.u_window = (spec.u_window.0.min(-3 * f), spec.u_window.1 + 2 * f);
    }
    s
}

/// Builds R on the widened window and checks QYBE exactly (or to `tol`).
pub fn check_qybe_spec(spec: &RMatrixSpec, tol: f64) -> Report {
    match QuantumR::make(&qybe_build_spec(spec)) {
        Ok(q) => check_qybe(&q, tol),
        Err(e) => Report::flag("qybe", false).detail("error", e.to_string()),
    }
}

fn sample_points(seed: u64, count: usize, k: usize, spread: f64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (0..k).map(|_| c(rng.gen_range(-spread..spread), rng.gen_range(-spread..spread))).collect()).collect()
}

fn emb(x: &TensorOp<Complex64>, a: usize, b: usize) -> TensorOp<Complex64> {
    x.leg_embed(&[a, b], 3).expect("embed")
}

/// CYBE at random triples (u1, u2, u3); residual relative to the size of the terms.
pub fn check_cybe_numeric(cl: &ClassicalR, count: usize, seed: u64, tol: f64) -> Report {
    let pts = sample_points(seed, count, 3, 0.45);
    let worst = pts
        .par_iter()
        .map(|p| {
            let r12 = emb(&cl.eval(p[0] - p[1]), 1, 2);
            let r13 = emb(&cl.eval(p[0] - p[2]), 1, 3);
            let r23 = emb(&cl.eval(p[1] - p[2]), 2, 3);
            let com = |a: &TensorOp<Complex64>, b: &TensorOp<Complex64>| a.mul(b).unwrap().sub(&b.mul(a).unwrap()).unwrap();
            let res = com(&r12, &r13).add(&com(&r12, &r23)).unwrap().add(&com(&r13, &r23)).unwrap();
            let scale = 1.0 + r12.max_norm() * (r13.max_norm() + r23.max_norm()) + r13.max_norm() * r23.max_norm();
            res.max_norm() / scale
        })
        .reduce(|| 0.0, f64::max);
    Report::numeric("cybe_numeric", worst, tol).detail("samples", count)
}

pub fn check_qybe_numeric(q: &QuantumR, count: usize, seed: u64, tol: f64) -> Report {
    let pts = sample_points(seed, count, 3, 0.45);
    let worst = pts
        .par_iter()
        .map(|p| {
            let h = p[2] * 0.3;
            let r12 = emb(&q.eval(p[0] - p[1], h), 1, 2);
            let r13 = emb(&q.eval(p[0], h), 1, 3);
            let r23 = emb(&q.eval(p[1], h), 2, 3);
            let l = r12.mul(&r13).unwrap().mul(&r23).unwrap();
            let r = r23.mul(&r13).unwrap().mul(&r12).unwrap();
            l.sub(&r).unwrap().max_norm() / (1.0 + l.max_norm())
        })
        .reduce(|| 0.0, f64::max);
    Report::numeric("qybe_numeric", worst, tol).detail("samples", count)
}

/// r(u) + r²¹(−u).
pub fn check_unitarity_classical(cl: &ClassicalR, tol: f64) -> Report {
    let run = || -> Result<TensorOp<HSeries>> {
        let m1 = Scalar::int(cl.series_mode(), -1);
        let f = cl.series.flip()?.map(|s| s.scale_var(0, &m1))?;
        cl.series.add(&f)
    };
    match run() {
        Ok(t) => series_zero("unitarity_classical", &t, cl.series_mode(), tol),
        Err(e) => Report::flag("unitarity_classical", false).detail("error", e.to_string()),
    }
}

/// R²¹(−u) R(u) = f(u)·Id with f even; f is returned in the details.
pub fn check_unitarity_quantum(q: &QuantumR, tol: f64) -> Report {
    let mode = q.spec.mode();
    let run = || -> Result<(TensorOp<HSeries>, HSeries)> {
        let m1 = Scalar::int(mode, -1);
        let r21m = q.series.flip()?.map(|s| s.scale_var(0, &m1))?;
        let p = r21m.mul(&q.series)?;
        let f = p.get(0, 0).cloned().unwrap_or_else(|| HSeries::zero(&q.shape()));
        let id = TensorOp::identity(q.spec.n, 2, &f);
        Ok((p.sub(&id)?, f))
    };
    match run() {
        Ok((t, f)) => {
            let scalar = series_zero("scalar", &t, mode, tol);
            let odd = (|| -> Result<HSeries> { f.sub(&f.scale_var(0, &Scalar::int(mode, -1))?) })();
            let even = match odd {
                Ok(o) => series_zero("f_even", &TensorOp::from_entries(q.spec.n, 2, [((0, 0), o)]).expect("entry"), mode, tol),
                Err(e) => Report::flag("f_even", false).detail("error", e.to_string()),
            };
            Report::all("unitarity_quantum", vec![scalar, even]).detail("f", f.to_json())
        }
        Err(e) => Report::flag("unitarity_quantum", false).detail("error", e.to_string()),
    }
}

/// R = 1 − h r + O(h²) on the window.
pub fn check_one_minus_hr(q: &QuantumR, tol: f64) -> Report {
    let mode = q.spec.mode();
    let run = || -> Result<TensorOp<HSeries>> {
        let win = q.spec.u_window;
        let sh = crate::series::Shape::uni("u", mode, 1, win);
        let one = Scalar::one(mode);
        let r = q.classical.series.map(|s| Ok(s.truncate(&[(0, 0), win]).shift_monomial(1, &[0], &one)?.neg()))?;
        let r1 = r.map(|s| {
            let mut t = HSeries::zero(&sh);
            for (k, v) in s.terms() {
                t = t.add(&HSeries::monomial(&sh, k[0], &k[1..], v.clone())?)?;
            }
            Ok(t)
        })?;
        let lhs = q.series.map(|s| Ok(s.truncate_h(1)))?;
        let id = TensorOp::identity(q.spec.n, 2, &HSeries::one(&sh));
        let rhs = id.add(&r1)?;
        let d = lhs.sub(&rhs)?;
        d.map(|s| Ok(s.truncate(&[(0, 1), win])))
    };
    match run() {
        Ok(t) => series_zero("one_minus_hr", &t, mode, tol),
        Err(e) => Report::flag("one_minus_hr", false).detail("error", e.to_string()),
    }
}

/// Laurent data of R(γ + z + h/N², h) = Σ_m ρ_m(γ + z) h^m per Heisenberg weight:
/// `out[α][m][k + kneg]` is the coefficient of z^k in the weight of ρ_m.
fn rho_laurent(q: &QuantumR, gamma: Complex64, rz: f64, rh: f64, kneg: usize, kpos: usize) -> Vec<(Label, Vec<Vec<Complex64>>)> {
    let n = q.spec.n as f64;
    let hmax = q.spec.h_order as usize;
    let (mu, mh) = (64usize, 32usize);
    let labels: Vec<Label> = q.weights(c(0.3, 0.1), c(0.1, 0.0)).into_iter().map(|(a, _)| a).collect();
    let mut acc = vec![vec![vec![c(0.0, 0.0); kneg + kpos + 1]; hmax + 1]; labels.len()];
    for ju in 0..mu {
        let zu = Complex64::from_polar(1.0, 2.0 * PI * ju as f64 / mu as f64);
        let z = rz * zu;
        // coefficients of h^m at this z
        let mut hm = vec![vec![c(0.0, 0.0); hmax + 1]; labels.len()];
        for jh in 0..mh {
            let zh = Complex64::from_polar(1.0, 2.0 * PI * jh as f64 / mh as f64);
            let h = rh * zh;
            let ws = q.weights(gamma + z + h / (n * n), h);
            for (ai, (_, w)) in ws.iter().enumerate() {
                for (m, slot) in hm[ai].iter_mut().enumerate() {
                    *slot += w * zh.powi(-(m as i32));
                }
            }
        }
        for ai in 0..labels.len() {
            for m in 0..=hmax {
                let v = hm[ai][m] / mh as f64 / rh.powi(m as i32);
                for (ki, k) in (-(kneg as i64)..=kpos as i64).enumerate() {
                    acc[ai][m][ki] += v * zu.powi(-(k as i32));
                }
            }
        }
    }
    labels
        .into_iter()
        .zip(acc)
        .map(|(a, rows)| {
            let rows = rows
                .into_iter()
                .map(|row| row.into_iter().enumerate().map(|(ki, v)| v / mu as f64 / rz.powi(ki as i32 - kneg as i32)).collect())
                .collect();
            (a, rows)
        })
        .collect()
}

fn lattice(spec: &RMatrixSpec) -> Vec<(i64, i64, Complex64)> {
    let n = spec.n as i64;
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            out.push((a, b, (a as f64 + b as f64 * spec.tau) / n as f64));
        }
    }
    out
}

fn pole_gap(spec: &RMatrixSpec) -> f64 {
    let n = spec.n as f64;
    (1.0 / n).min((spec.tau / n).norm()).min(((spec.tau - 1.0) / n).norm()).min(((spec.tau + 1.0) / n).norm())
}

/// Axioms (i) simple poles on Γ, (ii) quasi-periodicity, (iii) R(0) = Nσ.
/// Works on any R with a point evaluator; failures are reported, never raised.
pub fn check_elliptic_axioms(q: &QuantumR, seed: u64, tol: f64) -> Report {
    let spec = &q.spec;
    let n = spec.n as i64;
    let nf = spec.n as f64;
    let gap = pole_gap(spec);
    let rz = 0.25 * gap;
    let rh = 0.1;
    let hmax = spec.h_order as usize;
    let kneg = hmax + 3;
    let pts = lattice(spec);
    let data: Vec<_> = pts.par_iter().map(|&(_, _, g)| rho_laurent(q, g, rz, rh, kneg, hmax + 1)).collect();

    // (i): coefficients of z^k, k ≤ −2, vanish at every γ
    let mut res_i: f64 = 0.0;
    for d in &data {
        for (_, rows) in d {
            for row in rows {
                for v in &row[..kneg - 1] {
                    res_i = res_i.max(v.norm());
                }
            }
        }
    }
    // slope of |ρ_1| approaching γ = 0, as information
    let mut slope = Value::Null;
    if hmax >= 1 {
        // h^1 coefficient of the (0, 0) entry by a small Cauchy circle in h
        let val = |d: f64| -> f64 {
            let z = c(d, 0.3 * d);
            let k = 16;
            let mut s = c(0.0, 0.0);
            for j in 0..k {
                let zh = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / k as f64);
                let h = 1e-3 * zh;
                s += q.eval(z + h / (nf * nf), h).get(0, 0).copied().unwrap_or_default() * zh.powi(-1);
            }
            (s / k as f64 / 1e-3).norm()
        };
        let (a, b) = (val(1e-2), val(1e-3));
        if a > 0.0 && b > 0.0 {
            slope = json!((b.ln() - a.ln()) / (1e-3f64.ln() - 1e-2f64.ln()));
        }
    }
    let r_i = Report::numeric("simple_poles", res_i, tol).detail("pole_order_slope", slope);

    // (ii): R(u + γ) = (1 ⊗ λ(γ)) R(u) = (λ(γ)^{-1} ⊗ 1) R(u)
    let sp = &q.classical.special;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut res_ii: f64 = 0.0;
    for &(a, b, g) in &pts {
        if (a, b) == (0, 0) {
            continue;
        }
        let mut lam = sp.lam(a, b);
        if let Some(p) = &q.classical.relabel {
            lam = p.compose(&lam).and_then(|x| x.compose(&p.inverse())).expect("compose");
        }
        for _ in 0..4 {
            let u = c(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4));
            let h = c(rng.gen_range(0.05..0.3), rng.gen_range(-0.1..0.1));
            let lhs = q.eval(u + g, h);
            let r = q.eval(u, h);
            let cx = |s: &Scalar| Ok(s.to_complex());
            let right = lam.on_leg(&r, 2, cx).expect("conj");
            let left = lam.inverse().on_leg(&r, 1, cx).expect("conj");
            let scale = 1.0 + r.max_norm();
            res_ii = res_ii.max(lhs.sub(&right).unwrap().max_norm() / scale);
            res_ii = res_ii.max(lhs.sub(&left).unwrap().max_norm() / scale);
        }
    }
    let r_ii = Report::numeric("quasi_periodicity", res_ii, tol);

    // (iii): Σ_m ρ_m(−h/N²) h^m = Nσ, i.e. every weight equals δ_{e0} at h^e
    let d0 = &data[0];
    let mut res_iii: f64 = 0.0;
    let c0 = c(-1.0 / (nf * nf), 0.0);
    for (_, rows) in d0 {
        for e in 0..hmax as i64 {
            let mut s = c(0.0, 0.0);
            for k in -1..=e {
                let m = (e - k) as usize;
                if m > hmax {
                    continue;
                }
                s += rows[m][(k + kneg as i64) as usize] * c0.powi(k as i32);
            }
            let target = if e == 0 { 1.0 } else { 0.0 };
            res_iii = res_iii.max((s - target).norm());
        }
    }
    let r_iii = Report::numeric("normalization", res_iii, tol).detail("h_orders", hmax as i64).detail("lattice_points", n * n);
    Report::all("elliptic_axioms", vec![r_i, r_ii, r_iii])
}

/// Richardson-extrapolated limit of F(s) as s = 2^{-k} → 0, assuming an expansion in powers of s.
pub fn richardson(vals: &[TensorOp<Complex64>]) -> TensorOp<Complex64> {
    let mut t: Vec<TensorOp<Complex64>> = vals.to_vec();
    let mut p = 1.0;
    while t.len() > 1 {
        p *= 2.0;
        t = t.windows(2).map(|w| w[1].scale_c(c(p / (p - 1.0), 0.0)).sub(&w[0].scale_c(c(1.0 / (p - 1.0), 0.0))).unwrap()).collect();
    }
    t.remove(0)
}

/// R(su, sh) → R_rat(u, h) as s → 0.
pub fn check_degeneration(q: &QuantumR, seed: u64, tol: f64) -> Report {
    let spec = &q.spec;
    if spec.family == Family::Rational || spec.family == Family::Yang {
        // homogeneous of degree 0 in (u, h): a fixed point of the rescaling
        let ok = q.series.entries().values().all(|s| s.terms().all(|(k, _)| k[0] + k[1] == 0));
        return Report::exact("degeneration_fixed_point", ok);
    }
    let rat = match QuantumR::make(&RMatrixSpec::new(Family::Rational, spec.n)) {
        Ok(r) => r,
        Err(e) => return Report::flag("degeneration", false).detail("error", e.to_string()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let u = c(rng.gen_range(0.2..0.6), rng.gen_range(-0.4..0.4));
        let h = c(rng.gen_range(0.05..0.3), rng.gen_range(-0.1..0.1));
        let vals: Vec<_> = (3..9).map(|k| {
            let s = 0.5f64.powi(k);
            q.eval(u * s, h * s)
        }).collect();
        let lim = richardson(&vals);
        let target = rat.eval(u, h);
        let target = q.classical.relabel_complex(&target);
        worst = worst.max(lim.sub(&target).unwrap().max_norm());
    }
    Report::numeric("degeneration", worst, tol)
}

/// s·r(su) → Ω/u as s → 0.
pub fn check_classical_degeneration(cl: &ClassicalR, seed: u64, tol: f64) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let om = cl.relabel_complex(&cl.omega().to_complex());
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let u = c(rng.gen_range(0.2..0.6), rng.gen_range(-0.4..0.4));
        let vals: Vec<_> = (3..9).map(|k| {
            let s = 0.5f64.powi(k);
            cl.eval(u * s).scale_c(c(s, 0.0))
        }).collect();
        let lim = richardson(&vals);
        worst = worst.max(lim.sub(&om.scale_c(1.0 / u)).unwrap().max_norm());
    }
    Report::numeric("classical_degeneration", worst, tol)
}
