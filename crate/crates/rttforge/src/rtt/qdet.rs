//! Quantum determinant with staggered shifts u + h(2k − 1 − N)/(2N), and the f₀ solve.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::liebialg::gbinom;
use crate::report::Report;
use crate::rmatrix::QuantumR;
use crate::series::{HSeries, Mode, Scalar, Shape};
use crate::tensor::TensorOp;

use super::algebra::{AlgebraElement, Gen, Term};
use super::engine::RttAlgebra;

/// Permutations of 0..n with their signs.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    if n == 0 {
        return vec![(vec![], 1)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(n - 1) {
        // insert n−1 at position k: k transpositions past the tail
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            let sign = if (p.len() - k) % 2 == 0 { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}

/// The shift of row k (0-based): (2k + 1 − N)/(2N).
pub fn row_shift(mode: Mode, n: usize, k: usize) -> Scalar {
    Scalar::frac(mode, 2 * k as i64 + 1 - n as i64, 2 * n as i64)
}

/// Σ_σ sgn σ X_{0σ0}(u + s_0h)⋯X_{N−1,σ(N−1)}(u + s_{N−1}h), rows left to right.
/// Entries are operators with series coefficients; plain series are the 1×1 case.
pub fn qdet_ops(x: &[Vec<TensorOp<HSeries>>], one: &HSeries) -> Result<TensorOp<HSeries>> {
    let n = x.len();
    if n == 0 || x.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("qdet needs a square matrix".into()));
    }
    let (dn, legs) = (x[0][0].n(), x[0][0].legs());
    let mode = one.mode();
    let mut shifted = vec![Vec::with_capacity(n); n];
    for (k, row) in x.iter().enumerate() {
        let s = row_shift(mode, n, k);
        for e in row {
            shifted[k].push(e.map(|v| v.shift_h(&s))?);
        }
    }
    let mut out: Option<TensorOp<HSeries>> = None;
    for (p, sign) in permutations(n) {
        let mut prod = TensorOp::identity(dn, legs, one);
        for (k, &c) in p.iter().enumerate() {
            prod = prod.mul(&shifted[k][c])?;
        }
        if sign < 0 {
            prod = prod.neg();
        }
        out = Some(match out {
            Some(o) => o.add(&prod)?,
            None => prod,
        });
    }
    Ok(out.expect("n > 0"))
}

/// qdet of a matrix of scalar series.
pub fn qdet_series(x: &[Vec<HSeries>]) -> Result<HSeries> {
    let one = HSeries::one(&x[0][0].shape());
    let ops: Vec<Vec<TensorOp<HSeries>>> = x
        .iter()
        .map(|r| r.iter().map(|v| TensorOp::from_entries(1, 1, [((0, 0), v.clone())])).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let d = qdet_ops(&ops, &one)?;
    Ok(d.get(0, 0).cloned().unwrap_or_else(|| HSeries::zero(&one.shape())))
}

/// Leg-1 blocks of a two-leg operator: X_{ab} acts on leg 2.
pub fn first_leg_blocks(r: &TensorOp<HSeries>) -> Result<Vec<Vec<TensorOp<HSeries>>>> {
    let n = r.n();
    let mut x = vec![vec![TensorOp::zero(n, 1); n]; n];
    for (&(row, col), v) in r.entries() {
        let (a, p) = (row / n, row % n);
        let (b, q) = (col / n, col % n);
        x[a][b].add_entry(p, q, v.clone())?;
    }
    Ok(x)
}

#[derive(Clone, Debug)]
pub struct QdetResult {
    pub scalar: HSeries,
    /// Largest coefficient of the off-scalar part; zero when qdet is central in End(k^N).
    pub off_scalar: HSeries,
}

/// qdet of R read with its first leg as matrix index; the result must be a scalar operator.
pub fn qdet_r(q: &QuantumR) -> Result<QdetResult> {
    let x = first_leg_blocks(&q.series)?;
    let shape = q.shape();
    let one = HSeries::one(&shape);
    let d = qdet_ops(&x, &one)?;
    let n = q.spec.n;
    let scalar = d.get(0, 0).cloned().unwrap_or_else(|| HSeries::zero(&shape));
    let mut off = HSeries::zero(&scalar.shape());
    for (&(r, c), v) in d.entries() {
        let want = if r == c { scalar.clone() } else { HSeries::zero(&scalar.shape()) };
        let gap = v.sub(&want)?;
        if !gap.is_zero() {
            off = off.add(&gap)?;
        }
    }
    for k in 0..n {
        if d.get(k, k).is_none() && !scalar.is_zero() {
            off = off.sub(&scalar)?;
        }
    }
    Ok(QdetResult { scalar, off_scalar: off })
}

/// Π_k f(u + s_k h).
pub fn shifted_product(f: &HSeries, n: usize) -> Result<HSeries> {
    let mut out = HSeries::one(&f.shape());
    for k in 0..n {
        out = out.mul(&f.shift_h(&row_shift(f.mode(), n, k))?)?;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct F0 {
    pub f0: HSeries,
    pub qdet: HSeries,
    /// qdet(R^{f₀}) − 1, computed from the rescaled R.
    pub residual: HSeries,
    pub iterations: usize,
}

/// f₀ = 1 + O(h) with qdet(f₀·R) = 1, solved one h order at a time.
pub fn solve_f0(q: &QuantumR) -> Result<F0> {
    let qd = qdet_r(q)?;
    if !qd.off_scalar.is_zero() {
        return Err(Error::Cancellation("qdet of R is not a scalar".into()));
    }
    let h_order = q.spec.h_order;
    let n = q.spec.n;
    let shape = q.shape();
    let mut f = HSeries::one(&shape);
    let mut iterations = 0;
    for j in 1..=h_order {
        let e = shifted_product(&f, n)?.mul(&qd.scalar)?.sub(&HSeries::one(&shape))?;
        if e.terms().any(|(k, _)| k[0] < j) {
            return Err(Error::Cancellation(format!("f0 solve left h order below {j} nonzero")));
        }
        let ud = e.dims()[1];
        let ej = HSeries::from_terms(&e.shape(), e.terms().filter(|(k, _)| k[0] == j).map(|(k, c)| (k.clone(), c.clone())))?
            .with_support(1, ud.floor, ud.ceil);
        f = f.sub(&ej.scale(&Scalar::frac(shape.mode, 1, n as i64))?)?;
        iterations += 1;
    }
    let residual = qdet_r(&q.scale_r(&f)?)?.scalar.sub(&HSeries::one(&shape))?;
    Ok(F0 { f0: f, qdet: qd.scalar, residual, iterations })
}

pub fn check_f0(q: &QuantumR) -> Result<Report> {
    let s = solve_f0(q)?;
    let again = solve_f0(q)?;
    Ok(Report::exact("qdet_f0", s.residual.is_zero() && s.f0 == again.f0)
        .detail("residual_terms", s.residual.len())
        .detail("deterministic", s.f0 == again.f0)
        .detail("f0", s.f0.to_json())
        .detail("qdet", s.qdet.to_json())
        .with_window(json!({"h_order": q.spec.h_order, "u_window": [q.spec.u_window.0, q.spec.u_window.1]})))
}

fn eval_h0(s: &HSeries, u: &Scalar) -> Result<Scalar> {
    let mut out = Scalar::zero(Mode::Exact);
    for (k, c) in s.terms() {
        if k[0] == 0 {
            out = out.add(&c.mul(&crate::series::pow_scalar(u, k[1])?)?)?;
        }
    }
    Ok(out)
}

/// Determinant by Gaussian elimination over exact scalars.
pub fn det(m: &[Vec<Scalar>]) -> Result<Scalar> {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m.to_vec();
    let mut d = Scalar::one(Mode::Exact);
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Ok(Scalar::zero(Mode::Exact));
        };
        if p != c {
            a.swap(p, c);
            d = d.neg();
        }
        d = d.mul(&a[c][c])?;
        let inv = a[c][c].inv()?;
        for r in c + 1..n {
            let f = a[r][c].mul(&inv)?;
            if f.is_zero() {
                continue;
            }
            for k in c..n {
                let v = a[c][k].mul(&f)?;
                a[r][k] = a[r][k].sub(&v)?;
            }
        }
    }
    Ok(d)
}

/// At h⁰, qdet of random series matrices is the determinant (compared at rational u).
pub fn check_h0_det(trials: usize, n: usize, seed: u64) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = Shape::uni("u", Mode::Exact, 2, (-2, 2));
    let mut bad = 0;
    for _ in 0..trials {
        let mut x = vec![Vec::with_capacity(n); n];
        for row in x.iter_mut() {
            let mut terms = Vec::new();
            for h in 0..=2 {
                for e in -2..=2 {
                    let c: i64 = rng.gen_range(-3..=3);
                    terms.push((vec![h, e], Scalar::int(Mode::Exact, c)));
                }
            }
            for _ in 0..n {
                let mut t = terms.clone();
                for (_, c) in t.iter_mut() {
                    *c = Scalar::int(Mode::Exact, rng.gen_range(-3..=3));
                }
                row.push(HSeries::from_terms(&shape, t)?);
            }
        }
        // entries are Laurent polynomials, so the box may grow to hold every product
        let w = 2 * n as i64 + 4;
        let wide: Vec<Vec<HSeries>> =
            x.iter().map(|r| r.iter().map(|v| v.clone().with_support(0, 0, 2).with_support(1, -2, 2).widen(&[(0, 2), (-w, w)])).collect()).collect();
        let qd = qdet_series(&wide)?;
        for u in [Scalar::int(Mode::Exact, 2), Scalar::frac(Mode::Exact, -1, 3)] {
            let m: Vec<Vec<Scalar>> = x.iter().map(|r| r.iter().map(|v| eval_h0(v, &u)).collect::<Result<_>>()).collect::<Result<_>>()?;
            if eval_h0(&qd, &u)? != det(&m)? {
                bad += 1;
            }
        }
    }
    Ok(Report::exact("qdet_h0_is_det", bad == 0).detail("trials", trials).detail("mismatches", bad).detail("N", n))
}

/// Matrix of T(u + s h) coefficients: u-power ↦ AlgebraElement.
pub type AlgSeries = BTreeMap<i64, AlgebraElement>;

fn alg_mul(a: &AlgSeries, b: &AlgSeries, kmax: i64) -> Result<AlgSeries> {
    let mut out = AlgSeries::new();
    for (i, x) in a {
        for (j, y) in b {
            if i + j > kmax {
                continue;
            }
            let p = x.mul(y)?;
            match out.get_mut(&(i + j)) {
                Some(v) => *v = v.add(&p)?,
                None => {
                    out.insert(i + j, p);
                }
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// Entry (a, b) of T_site(u + s h) = δ_ab + h Σ_ℓ t_ℓ (u + s h)^ℓ, up to u^kmax.
pub fn t_entry_shifted(alg: &RttAlgebra, site: usize, a: usize, b: usize, s: &Scalar, kmax: i64) -> Result<AlgSeries> {
    let mut out = AlgSeries::new();
    let hmax = alg.h_order as i64;
    if a == b {
        out.insert(0, alg.one());
    }
    for l in 0..=(kmax + hmax) {
        for j in 0..=l {
            let (power, hp) = (l - j, j + 1);
            if power > kmax || hp > hmax {
                continue;
            }
            let c = Scalar::int(alg.mode, gbinom(l, j)).mul(&crate::series::pow_scalar(s, j)?)?;
            let mut el = alg.zero();
            el.add_term(Term { h: hp as u32, word: vec![Gen::new(site, l as usize, a, b)] }, c)?;
            let e = out.entry(power).or_insert_with(|| alg.zero());
            *e = e.add(&el)?;
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// qdet of T_site(u) in U(R), coefficients u^0..u^kmax, exact modulo h^{H+1}.
pub fn qdet_algebra(alg: &RttAlgebra, site: usize, kmax: i64) -> Result<AlgSeries> {
    let n = alg.n;
    let mut out = AlgSeries::new();
    for (p, sign) in permutations(n) {
        let mut prod: AlgSeries = [(0, alg.one())].into_iter().collect();
        for (k, &c) in p.iter().enumerate() {
            let s = row_shift(alg.mode, n, k);
            prod = alg_mul(&prod, &t_entry_shifted(alg, site, k, c, &s, kmax)?, kmax)?;
        }
        let sg = Scalar::int(alg.mode, sign);
        for (k, v) in prod {
            let e = out.entry(k).or_insert_with(|| alg.zero());
            *e = e.add(&v.scale(&sg)?)?;
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// Whether the qdet coefficients commute with generators of tdeg ≤ l, after normal form.
pub fn check_qdet_central(alg: &RttAlgebra, kmax: i64, l: usize) -> Result<Report> {
    let mut noncentral = Vec::new();
    let mut tested = 0;
    for site in 0..alg.sites() {
        let q = qdet_algebra(alg, site, kmax)?;
        for (k, qk) in &q {
            for g in alg.generators(l) {
                let t = alg.gen(g);
                let c = alg.normal_form(&qk.mul(&t)?.sub(&t.mul(qk)?)?)?;
                tested += 1;
                if !c.is_zero() {
                    noncentral.push(json!({"site": site + 1, "u_power": k, "generator": g.to_json()}));
                }
            }
        }
    }
    Ok(Report::exact("qdet_central", noncentral.is_empty())
        .detail("pairs_tested", tested)
        .detail("noncentral", noncentral)
        .with_window(json!({"u_powers": [0, kmax], "L": l, "h_order": alg.h_order})))
}
