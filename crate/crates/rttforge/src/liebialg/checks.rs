//! Structural checks on the truncated models: Lie bialgebra axioms, the Poisson
//! form of the bracket, the axioms of β, isotropy of f_z and degeneration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::Report;
use crate::rmatrix::{Algebra, Family, RMatrixSpec};
use crate::series::{HSeries, Mode, Scalar};

use super::{LBasis, LieModel, LoopElement, LoopTensor, PunctureConfig, TLabel};

/// Exact models must give zero; float models are compared against `tol`.
pub fn verdict(check: &str, mode: Mode, zero: bool, residual: f64, tol: f64) -> Report {
    match mode {
        Mode::Exact => Report::exact(check, zero).detail("max_abs", residual),
        Mode::Approx => Report::numeric(check, residual, tol),
    }
}

fn series_diff(a: &HSeries, b: &HSeries, win: (i64, i64)) -> Result<HSeries> {
    for s in [a, b] {
        let d = s.dims()[1];
        if d.lo > win.0 || d.hi < win.1 {
            return Err(Error::Window(format!("series known on [{}, {}], need [{}, {}]", d.lo, d.hi, win.0, win.1)));
        }
    }
    Ok(a.sub(b)?.truncate(&[(0, 0), win]))
}

fn max_abs_series(s: &HSeries) -> f64 {
    s.terms().map(|(_, v)| v.abs()).fold(0.0, f64::max)
}

fn is_zero_series(s: &HSeries) -> bool {
    s.terms().all(|(_, v)| v.is_zero())
}

/// Random elements whose brackets stay inside the expansion order.
fn samples(m: &LieModel, trials: usize, seed: u64, k: usize) -> Result<Vec<Vec<LoopElement>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials).map(|_| (0..k).map(|_| m.random_element(&mut rng, m.l)).collect()).collect()
}

pub fn check_antisymmetry(m: &LieModel, trials: usize, seed: u64, tol: f64) -> Result<Report> {
    let mut acc = LoopElement::zero();
    let mut worst = 0.0f64;
    for s in samples(m, trials, seed, 2)? {
        let r = m.bracket_full(&s[0], &s[1])?.add(&m.bracket_full(&s[1], &s[0])?)?;
        worst = worst.max(r.max_abs());
        acc = acc.add(&r)?;
    }
    Ok(verdict("antisymmetry", m.mode, acc.is_zero() && worst == 0.0, worst, tol))
}

pub fn check_jacobi(m: &LieModel, trials: usize, seed: u64, tol: f64) -> Result<Report> {
    let mut worst = 0.0f64;
    let mut zero = true;
    for s in samples(m, trials, seed, 3)? {
        let (x, y, z) = (&s[0], &s[1], &s[2]);
        let j = m
            .bracket_full(x, &m.bracket_full(y, z)?)?
            .add(&m.bracket_full(y, &m.bracket_full(z, x)?)?)?
            .add(&m.bracket_full(z, &m.bracket_full(x, y)?)?)?;
        worst = worst.max(j.max_abs());
        zero &= j.is_zero();
    }
    Ok(verdict("jacobi", m.mode, zero, worst, tol).detail("trials", trials))
}

/// Negative u-powers of [r¹²(u − v), τ¹³(u) + τ²³(v)] cancel between the two terms.
pub fn check_pole_cancellation(m: &LieModel, tol: f64) -> Result<Report> {
    let mut worst = 0.0f64;
    let mut zero = true;
    let span = 2 * m.l as i64;
    for site in 0..m.sites() {
        for a in -span..0 {
            for b in 0..span {
                if a + b + 1 < 0 {
                    continue;
                }
                for p in 0..m.n {
                    for q in 0..m.n {
                        for r in 0..m.n {
                            for s in 0..m.n {
                                let e = m.pole_part(site, a, b, &m.unit(p, q), &m.unit(r, s))?;
                                worst = worst.max(e.max_abs());
                                zero &= e.is_zero();
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(verdict("pole_cancellation", m.mode, zero, worst, tol))
}

fn basis_elements(m: &LieModel) -> Result<Vec<LoopElement>> {
    m.basis().into_iter().map(|b| m.basis_element(b)).collect()
}

/// (δ ⊗ 1)δ summed over cyclic permutations.
pub fn check_cojacobi(m: &LieModel, tol: f64) -> Result<Report> {
    let mut worst = 0.0f64;
    let mut zero = true;
    for x in basis_elements(m)? {
        let d = m.cobracket(&x)?;
        let dd = d.apply_slot(0, |b| m.cobracket_basis(b))?;
        let cyc = dd.add(&dd.permute(&[1, 2, 0])?)?.add(&dd.permute(&[2, 0, 1])?)?;
        worst = worst.max(cyc.max_abs());
        zero &= cyc.is_zero();
    }
    Ok(verdict("co_jacobi", m.mode, zero, worst, tol))
}

fn ad(m: &LieModel, x: &LoopElement, t: &LoopTensor) -> Result<LoopTensor> {
    m.ad_slot(x, t, 0)?.add(&m.ad_slot(x, t, 1)?)
}

/// δ([x, y]) = ad_x δ(y) − ad_y δ(x).
pub fn check_cocycle(m: &LieModel, trials: usize, seed: u64, tol: f64) -> Result<Report> {
    let mut worst = 0.0f64;
    let mut zero = true;
    for s in samples(m, trials, seed, 2)? {
        let (x, y) = (&s[0], &s[1]);
        let lhs = m.cobracket(&m.bracket_full(x, y)?)?;
        let rhs = ad(m, x, &m.cobracket(y)?)?.sub(&ad(m, y, &m.cobracket(x)?)?)?;
        let d = lhs.sub(&rhs)?;
        worst = worst.max(d.max_abs());
        zero &= d.is_zero();
    }
    Ok(verdict("cocycle", m.mode, zero, worst, tol).detail("trials", trials))
}

/// The bracket read off the matrix Poisson relation agrees with the structure constants,
/// under t_{pq,m} = x_m(E_qp)/N.
pub fn check_poisson_duality(m: &LieModel, tol: f64) -> Result<Report> {
    let mut worst = 0.0f64;
    let mut zero = true;
    let inv_n2 = Scalar::frac(m.mode, 1, (m.n * m.n) as i64);
    let mut labels = Vec::new();
    for site in 0..m.sites() {
        for tdeg in 0..m.l {
            for row in 0..m.n {
                for col in 0..m.n {
                    labels.push(TLabel { site, row, col, tdeg });
                }
            }
        }
    }
    for a in &labels {
        for b in &labels {
            let pb = m.t_to_x(&m.poisson(*a, *b)?)?;
            let xa = m.element(a.site, a.tdeg, &m.unit(a.col, a.row))?;
            let xb = m.element(b.site, b.tdeg, &m.unit(b.col, b.row))?;
            let br = m.bracket_full(&xa, &xb)?.scale(&inv_n2)?;
            let d = pb.sub(&br)?;
            worst = worst.max(d.max_abs());
            zero &= d.is_zero();
        }
    }
    Ok(verdict("poisson_duality", m.mode, zero, worst, tol).detail("pairs", labels.len() * labels.len()))
}

fn site_pairs(m: &LieModel) -> Vec<(LBasis, LBasis)> {
    let b = m.basis();
    let mut out = Vec::new();
    for x in &b {
        for y in &b {
            if x.site == y.site {
                out.push((*x, *y));
            }
        }
    }
    out
}

fn single(m: &LieModel, b: LBasis) -> LoopElement {
    let mut x = LoopElement::zero();
    x.coords.insert(b, Scalar::one(m.mode));
    x
}

/// Residue route against derivatives of the closed-form series of r.
pub fn check_beta_routes(m: &LieModel, win: (i64, i64), tol: f64) -> Result<Report> {
    let mut worst = 0.0f64;
    let mut zero = true;
    for (bx, by) in site_pairs(m) {
        let (x, y) = (single(m, bx), single(m, by));
        let d = series_diff(&m.beta(&x, &y, win)?, &m.beta_derivative_route(&x, &y, win)?, win)?;
        worst = worst.max(max_abs_series(&d));
        zero &= is_zero_series(&d);
    }
    Ok(verdict("beta_two_routes", m.mode, zero, worst, tol).with_window(json!({"u": [win.0, win.1]})))
}

/// v^k coefficient of β(α_v(x), y)(u) equals ∂^k β(x, y)(u) / k!.
pub fn check_beta_shift(m: &LieModel, kmax: usize, win: (i64, i64), tol: f64) -> Result<Report> {
    let mut worst = 0.0f64;
    let mut zero = true;
    let wide = (win.0 - kmax as i64, win.1);
    for (bx, by) in site_pairs(m) {
        let (x, y) = (single(m, bx), single(m, by));
        let base = m.beta(&x, &y, (wide.0, wide.1 + kmax as i64))?;
        let mut der = base.clone();
        let mut fact: i64 = 1;
        for k in 0..=kmax {
            if k > 0 {
                der = der.derive(0)?;
                fact *= k as i64;
            }
            let lhs = m.beta(&m.alpha_coeff(&x, k, false)?, &y, win)?;
            let rhs = der.scale(&Scalar::frac(m.mode, 1, fact))?;
            let d = series_diff(&lhs, &rhs, win)?;
            worst = worst.max(max_abs_series(&d));
            zero &= is_zero_series(&d);
        }
    }
    Ok(verdict("beta_shift", m.mode, zero, worst, tol).with_window(json!({"u": [win.0, win.1], "k": kmax})))
}

/// Σ β(a, t_1) β(b, t_2) over t = Σ t_1 ⊗ t_2, on the u window `win`.
fn beta_pair_sum(m: &LieModel, a: &LoopElement, b: &LoopElement, t: &LoopTensor, slots: (usize, usize), win: (i64, i64), pad: i64) -> Result<HSeries> {
    let wide = (win.0 - pad, win.1 + pad);
    let mut out: Option<HSeries> = None;
    for (k, c) in &t.coords {
        let f = m.beta(a, &single(m, k[slots.0]), wide)?;
        let g = m.beta(b, &single(m, k[slots.1]), wide)?;
        let p = f.mul(&g)?.scale(c)?;
        out = Some(match out {
            Some(o) => o.add(&p)?,
            None => p,
        });
    }
    let shape = crate::series::Shape::uni("u", m.mode, 0, win);
    Ok(out.unwrap_or_else(|| HSeries::zero(&shape)).truncate(&[(0, 0), win]))
}

/// β([x, y], z) = Σ β(x, z')β(y, z'') and β(x, [z, y]) = Σ β(x', y)β(x'', z).
pub fn check_beta_cocycle(m: &LieModel, trials: usize, seed: u64, win: (i64, i64), tol: f64) -> Result<Report> {
    let mut worst = [0.0f64; 2];
    let mut zero = [true; 2];
    let pad = 2 * m.l as i64 + 2;
    for s in samples(m, trials, seed, 3)? {
        let (x, y, z) = (&s[0], &s[1], &s[2]);
        let lhs = m.beta(&m.bracket_full(x, y)?, z, win)?;
        let rhs = beta_pair_sum(m, x, y, &m.cobracket(z)?, (0, 1), win, pad)?;
        let d = series_diff(&lhs, &rhs, win)?;
        worst[0] = worst[0].max(max_abs_series(&d));
        zero[0] &= is_zero_series(&d);

        let lhs = m.beta(x, &m.bracket_full(z, y)?, win)?;
        let dx = m.cobracket(x)?;
        // Σ β(x', y) β(x'', z): both factors take the tensor slot as first argument
        let mut rhs: Option<HSeries> = None;
        let wide = (win.0 - pad, win.1 + pad);
        for (k, c) in &dx.coords {
            let f = m.beta(&single(m, k[0]), y, wide)?;
            let g = m.beta(&single(m, k[1]), z, wide)?;
            let p = f.mul(&g)?.scale(c)?;
            rhs = Some(match rhs {
                Some(o) => o.add(&p)?,
                None => p,
            });
        }
        let rhs = rhs.unwrap_or_else(|| HSeries::zero(&crate::series::Shape::uni("u", m.mode, 0, win))).truncate(&[(0, 0), win]);
        let d = series_diff(&lhs, &rhs, win)?;
        worst[1] = worst[1].max(max_abs_series(&d));
        zero[1] &= is_zero_series(&d);
    }
    Ok(Report::all(
        "beta_cocycle",
        vec![
            verdict("beta_bracket_left", m.mode, zero[0], worst[0], tol),
            verdict("beta_bracket_right", m.mode, zero[1], worst[1], tol),
        ],
    )
    .with_window(json!({"u": [win.0, win.1]})))
}

/// Terms of [y, α_u(x)] and of the two sides of its expansion at u^e, e in `es`.
pub struct ShiftTerms {
    pub lhs: Vec<LoopElement>,
    pub first: Vec<LoopElement>,
    pub second: Vec<LoopElement>,
    pub first_flipped: Vec<LoopElement>,
}

fn beta_coeff_elem(m: &LieModel, a: &LoopElement, b: &LoopElement, e: i64) -> Result<Scalar> {
    let mut acc = Scalar::zero(m.mode);
    for (bx, u) in &a.coords {
        for (by, v) in &b.coords {
            acc = acc.add(&m.beta_coeff(*bx, *by, e)?.mul(u)?.mul(v)?)?;
        }
    }
    Ok(acc)
}

pub fn shift_terms(m: &LieModel, x: &LoopElement, y: &LoopElement, es: (i64, i64)) -> Result<ShiftTerms> {
    let dy = m.cobracket(y)?;
    let dx = m.cobracket(x)?;
    let mut out = ShiftTerms { lhs: vec![], first: vec![], second: vec![], first_flipped: vec![] };
    let floor = -1 - 2 * m.l as i64 - 2;
    for e in es.0..=es.1 {
        let lhs = if e >= 0 { m.bracket_full(y, &m.alpha_coeff(x, e as usize, false)?)? } else { LoopElement::zero() };
        let mut first = LoopElement::zero();
        let mut flipped = LoopElement::zero();
        for (k, c) in &dy.coords {
            let b = beta_coeff_elem(m, x, &single(m, k[0]), e)?.mul(c)?;
            first = first.add(&single(m, k[1]).scale(&b)?)?;
            let b = beta_coeff_elem(m, x, &single(m, k[1]), e)?.mul(c)?;
            flipped = flipped.add(&single(m, k[0]).scale(&b)?)?;
        }
        let mut second = LoopElement::zero();
        for (k, c) in &dx.coords {
            for f in floor..=e {
                let b = beta_coeff_elem(m, &single(m, k[0]), y, f)?;
                if b.is_zero() {
                    continue;
                }
                let a = m.alpha_coeff(&single(m, k[1]), (e - f) as usize, false)?;
                second = second.add(&a.scale(&b.mul(c)?)?)?;
            }
        }
        out.lhs.push(lhs);
        out.first.push(first);
        out.second.push(second);
        out.first_flipped.push(flipped);
    }
    Ok(out)
}

/// [y, α_u(x)] = β₁₂(x ⊗ δy) + α_u(β(x', y) x''), coefficientwise in u.
pub fn check_beta_shift_bracket(m: &LieModel, trials: usize, seed: u64, es: (i64, i64), tol: f64) -> Result<Report> {
    let mut worst = 0.0f64;
    let mut zero = true;
    for s in samples(m, trials, seed, 2)? {
        let t = shift_terms(m, &s[0], &s[1], es)?;
        for i in 0..t.lhs.len() {
            let d = t.lhs[i].sub(&t.first[i])?.sub(&t.second[i])?;
            worst = worst.max(d.max_abs());
            zero &= d.is_zero();
        }
    }
    Ok(verdict("beta_shift_bracket", m.mode, zero, worst, tol).with_window(json!({"u": [es.0, es.1]})))
}

/// Σ_k Res N tr(f_z(x)_k f_z(y)_k) vanishes on all basis pairs.
pub fn check_isotropy(m: &LieModel, tol: f64) -> Result<Report> {
    let b = m.basis();
    let mut worst = 0.0f64;
    let mut zero = true;
    for x in &b {
        for y in &b {
            let v = m.fz_pairing(*x, *y)?;
            worst = worst.max(v.abs());
            zero &= v.is_zero();
        }
    }
    Ok(verdict("isotropy", m.mode, zero, worst, tol).detail("pairs", b.len() * b.len()))
}

/// Structure constants of the ε-rescaled trig model tend to the sl yang ones; the
/// observed convergence order is reported.
pub fn check_degeneration(n: usize, l: usize, levels: u32) -> Result<Report> {
    let trig = LieModel::new(PunctureConfig::single(RMatrixSpec::new(Family::Trig, n)), l)?;
    let mut ys = RMatrixSpec::yang(n);
    ys.algebra = Algebra::Sl;
    let yang = LieModel::new(PunctureConfig::single(ys), l)?;
    let mut res = Vec::new();
    for j in 1..=levels {
        let eps = Scalar::frac(Mode::Exact, 1, 1 << j);
        let t = trig.scaled(&eps)?;
        let mut worst = 0.0f64;
        for a in trig.basis() {
            for b in trig.basis() {
                let d = t.structure(a, b)?.sub(&*yang.structure(a, b)?)?;
                worst = worst.max(d.max_abs());
            }
        }
        res.push(worst);
    }
    let ratios: Vec<f64> = res.windows(2).map(|w| w[0] / w[1]).collect();
    let shrinking = ratios.iter().all(|r| r.is_finite() && *r >= 1.5);
    let order = ratios.last().map(|r| r.log2().round()).unwrap_or(0.0);
    Ok(Report::flag("lie_degeneration", shrinking)
        .detail("residuals", json!(res))
        .detail("ratios", json!(ratios))
        .detail("order", order))
}
