//! The form β(x, y)(u) on g(r), the shift α_v, and the residue pairing of f_z images.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::rmatrix::classical::lift_scalar;
use crate::rmatrix::{ClassicalR, Family};
use crate::series::{HSeries, Mode, Scalar, Shape, INF};
use crate::tensor::TensorOp;

use super::{contract_right, gbinom, pair_units, sign, trace_form, LBasis, LieModel, LoopElement};

fn factorial(k: i64) -> i64 {
    (1..=k).product()
}

impl LieModel {
    fn site_of(&self, bx: LBasis, by: LBasis) -> Result<usize> {
        if bx.site != by.site {
            return Err(Error::Spec("β pairs elements of one site".into()));
        }
        Ok(bx.site)
    }

    /// u^e coefficient of β(x_a(E_pq), x_b(E_rs)), read off the Laurent coefficients of r.
    pub fn beta_coeff(&self, bx: LBasis, by: LBasis, e: i64) -> Result<Scalar> {
        let site = self.site_of(bx, by)?;
        let (a, b) = (bx.m as i64, by.m as i64);
        let k = e + a + b;
        let ex = self.expansion(site, site);
        if k < ex.kmin {
            return Ok(Scalar::zero(self.mode));
        }
        if k > ex.kmax() {
            if matches!(self.cfg.spec.family, Family::Yang | Family::Rational) {
                return Ok(Scalar::zero(self.mode));
            }
            return Err(Error::Window(format!("β coefficient u^{e} needs r to order {k}")));
        }
        let pr = pair_units(ex.get(k).expect("k"), bx.row, bx.col, by.row, by.col)?;
        let c = -gbinom(a + b, a) * sign(b) * gbinom(k, a + b);
        lift_scalar(self.mode, &pr).mul(&Scalar::int(self.mode, c))
    }

    fn beta_support(&self, a: i64, b: i64) -> (i64, i64) {
        let floor = -1 - a - b;
        match self.cfg.spec.family {
            Family::Yang | Family::Rational => (floor, floor),
            _ => (floor, INF),
        }
    }

    /// β(x, y) on the u window `win`, from the residue route.
    pub fn beta(&self, x: &LoopElement, y: &LoopElement, win: (i64, i64)) -> Result<HSeries> {
        let shape = Shape::uni("u", self.mode, 0, win);
        let mut out = HSeries::zero(&shape);
        for (bx, u) in &x.coords {
            for (by, v) in &y.coords {
                let (a, b) = (bx.m as i64, by.m as i64);
                let mut terms = Vec::new();
                for e in win.0..=win.1 {
                    terms.push((vec![0, e], self.beta_coeff(*bx, *by, e)?.mul(u)?.mul(v)?));
                }
                let (f, c) = self.beta_support(a, b);
                let s = HSeries::from_terms(&shape, terms)?.with_support(1, f, c);
                out = out.add(&s)?;
            }
        }
        Ok(out)
    }

    /// β(x, y) from −(−1)^b/(a!b!) ∂^{a+b}⟨Y ⊗ Z, r(u)⟩ on the closed-form series of r.
    pub fn beta_derivative_route(&self, x: &LoopElement, y: &LoopElement, win: (i64, i64)) -> Result<HSeries> {
        let shape = Shape::uni("u", self.mode, 0, win);
        let mut out = HSeries::zero(&shape);
        let max_j = x.max_m().unwrap_or(0) + y.max_m().unwrap_or(0);
        let spec = self.cfg.spec.clone().with_window(0, (win.0.min(-1), win.1 + max_j as i64));
        let cl = ClassicalR::make(&spec)?;
        for (bx, u) in &x.coords {
            for (by, v) in &y.coords {
                self.site_of(*bx, *by)?;
                let (a, b) = (bx.m as i64, by.m as i64);
                let n = self.n;
                // ⟨E_pq ⊗ E_rs, r⟩ = N² r[(q,s),(p,r)]
                let entry = match cl.series.get(bx.col * n + by.col, bx.row * n + by.row) {
                    Some(s) => s.clone(),
                    None => continue,
                };
                let mut d = entry.scale(&Scalar::int(self.mode, (n * n) as i64))?;
                for _ in 0..a + b {
                    d = d.derive(0)?;
                }
                let c = Scalar::frac(self.mode, -sign(b), factorial(a) * factorial(b)).mul(u)?.mul(v)?;
                out = out.add(&d.scale(&c)?.truncate(&[(0, 0), win]))?;
            }
        }
        Ok(out)
    }

    /// Coefficient of v^k in α_v(x): x_a ↦ binom(a+k, k) x_{a+k}; `minus` gives α_{−v}.
    pub fn alpha_coeff(&self, x: &LoopElement, k: usize, minus: bool) -> Result<LoopElement> {
        let mut out = LoopElement::zero();
        let s = if minus { sign(k as i64) } else { 1 };
        for (b, v) in &x.coords {
            let c = gbinom((b.m + k) as i64, k as i64) * s;
            let nb = LBasis { m: b.m + k, ..*b };
            out.add_coord(nb, v.mul(&Scalar::int(self.mode, c))?)?;
        }
        Ok(out)
    }

    /// Components of f_z(x_{i,a}(E_pq)) at every site k, as Laurent series in t:
    /// Σ_κ ⟨E_pq ⊗ 1, r²¹⟩ coefficients gbinom(κ, a)(−1)^a t^{κ−a}.
    pub fn fz_image(&self, bx: LBasis) -> Result<Vec<BTreeMap<i64, TensorOp<Scalar>>>> {
        let y = self.unit(bx.row, bx.col);
        let a = bx.m as i64;
        let mut out = Vec::with_capacity(self.sites());
        for k in 0..self.sites() {
            let mut comp: BTreeMap<i64, TensorOp<Scalar>> = BTreeMap::new();
            for (kappa, mk) in self.expansion(k, bx.site).powers() {
                let c = gbinom(kappa, a) * sign(a);
                if c == 0 || mk.is_zero() {
                    continue;
                }
                let w = contract_right(mk, &y)?.scale(&Scalar::int(self.mode, c))?;
                let e = comp.entry(kappa - a).or_insert_with(|| TensorOp::zero(self.n, 1));
                *e = e.add(&w)?;
            }
            out.push(comp);
        }
        Ok(out)
    }

    /// Σ_k Res_t N tr(f_z(x)_k f_z(y)_k), with the t-window each image is exact on.
    pub fn fz_pairing(&self, bx: LBasis, by: LBasis) -> Result<Scalar> {
        let need = (bx.m + by.m) as i64;
        for k in 0..self.sites() {
            if self.expansion(k, bx.site).kmax() < need || self.expansion(k, by.site).kmax() < need {
                return Err(Error::Window("f_z pairing needs a longer expansion".into()));
            }
        }
        let fa = self.fz_image(bx)?;
        let fb = self.fz_image(by)?;
        let mut acc = Scalar::zero(self.mode);
        for k in 0..self.sites() {
            acc = acc.add(&residue_pair(&fa[k], &fb[k], self.mode)?)?;
        }
        Ok(acc)
    }
}

/// Res_t N tr(A(t) B(t)) for Laurent polynomials keyed by t-power.
pub fn residue_pair(a: &BTreeMap<i64, TensorOp<Scalar>>, b: &BTreeMap<i64, TensorOp<Scalar>>, mode: Mode) -> Result<Scalar> {
    let mut acc = Scalar::zero(mode);
    for (e, x) in a {
        if let Some(y) = b.get(&(-1 - e)) {
            acc = acc.add(&trace_form(x, y, mode)?)?;
        }
    }
    Ok(acc)
}
