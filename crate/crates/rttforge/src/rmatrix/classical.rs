//! Classical r-matrices as Laurent series at the origin plus point evaluators.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::{exp_series, HSeries, Mode, Scalar, Shape};
use crate::tensor::{adjoint_exp, Conj, SpecialElements, TensorOp};

use super::spec::{Algebra, Family, RMatrixSpec};
use super::theta::EllipticKernel;

/// Heisenberg label α = (p, q) for I_α = A^p B^q.
pub type Label = (i64, i64);

#[derive(Clone, Debug)]
pub struct ClassicalR {
    pub spec: RMatrixSpec,
    pub special: Arc<SpecialElements>,
    /// Entries are series in u (h box as requested by the caller).
    pub series: TensorOp<HSeries>,
    /// r = Σ c_α I_α ⊗ I_α^{-1} before relabeling.
    pub components: Vec<(Label, HSeries)>,
    pub kernel: Option<EllipticKernel>,
    /// Conjugation on both legs realizing the twist r (trig and elliptic).
    pub relabel: Option<Conj>,
    pairs: Vec<(Label, TensorOp<Complex64>)>,
}

fn modinv(r: i64, n: i64) -> i64 {
    (1..=n.max(1)).find(|s| (s * r).rem_euclid(n) == 1 % n).unwrap_or(1)
}

pub fn lift_scalar(mode: Mode, s: &Scalar) -> Scalar {
    match mode {
        Mode::Exact => s.clone(),
        Mode::Approx => Scalar::Approx(s.to_complex()),
    }
}

/// Σ_α c_α I_α ⊗ I_α^{-1}.
pub fn from_components(special: &SpecialElements, comps: &[(Label, HSeries)]) -> Result<TensorOp<HSeries>> {
    let n = special.n;
    let mut out = TensorOp::zero(n, 2);
    for ((p, q), c) in comps {
        let pair = special.heis_pair(*p, *q);
        for (&(r, k), v) in pair.entries() {
            out.add_entry(r, k, c.scale(&lift_scalar(c.mode(), v))?)?;
        }
    }
    Ok(out)
}

/// c_α = N^{-2} tr((I_α^{-1} ⊗ I_α) M) for every α, including α = 0.
pub fn heis_components(special: &SpecialElements, m: &TensorOp<HSeries>, shape: &Shape) -> Result<Vec<(Label, HSeries)>> {
    let n = special.n as i64;
    let mut out = Vec::new();
    for p in 0..n {
        for q in 0..n {
            let x = crate::tensor::kron(&special.heis_inv(p, q), &special.heis(p, q))?;
            let mut acc = HSeries::zero(shape);
            for (&(c, r), v) in x.entries() {
                if let Some(s) = m.get(r, c) {
                    acc = acc.add(&s.scale(&lift_scalar(shape.mode, v))?)?;
                }
            }
            let acc = acc.scale(&Scalar::frac(shape.mode, 1, n * n))?;
            out.push(((p, q), acc));
        }
    }
    Ok(out)
}

/// μ(T) = Σ [a, b] for T = Σ a ⊗ b.
pub fn mu(t: &TensorOp<Scalar>) -> Result<TensorOp<Scalar>> {
    let n = t.n();
    let mut out = TensorOp::zero(n, 1);
    for (&(r, c), v) in t.entries() {
        let (i, j) = (r / n, r % n);
        let (k, l) = (c / n, c % n);
        // a_ik b_jl: ab contributes at (i, l) when k = j; ba at (j, k) when l = i
        if k == j {
            out.add_entry(i, l, v.clone())?;
        }
        if l == i {
            out.add_entry(j, k, v.neg())?;
        }
    }
    out.prune();
    Ok(out)
}

/// Coefficient of h^0 u^k of every entry.
pub fn coefficient(series: &TensorOp<HSeries>, k: i64) -> Result<TensorOp<Scalar>> {
    let mut out = TensorOp::zero(series.n(), series.legs());
    for (&(r, c), s) in series.entries() {
        let v = s.coeff(0, &[k]);
        if !v.is_zero() {
            out.add_entry(r, c, v)?;
        }
    }
    Ok(out)
}

/// ρ_r = μ(f)/2 with f the free term of r.
pub fn rho_of(series: &TensorOp<HSeries>) -> Result<TensorOp<Scalar>> {
    let f = coefficient(series, 0)?;
    let m = mu(&f)?;
    let half = Scalar::frac(m.entries().values().next().map(|v| v.mode()).unwrap_or(Mode::Exact), 1, 2);
    m.scale(&half)
}

/// r̃(u) = (e^{−uρ} ⊗ 1) r(u) (e^{uρ} ⊗ 1), exponentials kept to `order`.
pub fn gauge_transform(series: &TensorOp<HSeries>, rho: &TensorOp<Scalar>, order: i64) -> Result<TensorOp<HSeries>> {
    if rho.is_zero() {
        return Ok(series.clone());
    }
    adjoint_exp(rho, series, &[(1, 0, -1)], order)
}

/// (L²¹e^u + L)/(e^u − 1) for the standard polarization.
pub fn trig_polarized(special: &SpecialElements, shape: &Shape) -> Result<TensorOp<HSeries>> {
    let hi = shape.boxes[1].1;
    let one = Scalar::one(shape.mode);
    let e = exp_series(shape, &one, hi + 3)?;
    let d = e.sub(&HSeries::one(shape))?;
    let dinv = d.invert()?;
    let l = &special.l;
    let l21 = l.flip()?;
    let n = special.n;
    let mut out = TensorOp::zero(n, 2);
    let keys: std::collections::BTreeSet<(usize, usize)> = l.entries().keys().chain(l21.entries().keys()).copied().collect();
    for (r, c) in keys {
        let mut num = HSeries::zero(shape);
        if let Some(v) = l21.get(r, c) {
            num = num.add(&e.scale(&lift_scalar(shape.mode, v))?)?;
        }
        if let Some(v) = l.get(r, c) {
            num = num.add(&HSeries::constant(shape, lift_scalar(shape.mode, v))?)?;
        }
        out.add_entry(r, c, num.mul(&dinv)?.truncate(&shape.boxes))?;
    }
    Ok(out)
}

/// Σ_{q≠0} (s/2)(ε^q + 1)/(ε^q − 1)/N² B^q ⊗ B^{−q}.
pub fn trig_cartan_constant(special: &SpecialElements, sign: i64) -> Result<TensorOp<Scalar>> {
    let n = special.n as i64;
    let mut out = TensorOp::zero(special.n, 2);
    for q in 1..n {
        let e = Scalar::root_of_unity(Mode::Exact, n as u32, q);
        let one = Scalar::one(Mode::Exact);
        let c = e.add(&one)?.div(&e.sub(&one)?)?.scale_frac(sign, 2 * n * n);
        out = out.add(&special.heis_pair(0, q).scale(&c)?)?;
    }
    Ok(out)
}

fn yang_component(algebra: Algebra, p: i64, q: i64) -> bool {
    algebra == Algebra::Gl || (p, q) != (0, 0)
}

impl ClassicalR {
    /// Builds r(u) with entries in `shape` (one spectral variable "u").
    pub fn build(spec: &RMatrixSpec, shape: &Shape) -> Result<ClassicalR> {
        spec.validate()?;
        if shape.nvars() != 1 || shape.mode != spec.mode() {
            return Err(Error::Shape("classical r needs a univariate shape in the spec's mode".into()));
        }
        let special = Arc::new(SpecialElements::new(spec.n));
        let n = spec.n as i64;
        let mode = shape.mode;
        let mut kernel = None;
        let mut relabel = None;
        let components: Vec<(Label, HSeries)> = match spec.family {
            Family::Yang | Family::Rational => {
                let alg = if spec.family == Family::Rational { Algebra::Sl } else { spec.algebra };
                let c = HSeries::monomial(shape, 0, &[-1], Scalar::frac(mode, 1, n * n))?;
                let mut v = Vec::new();
                for p in 0..n {
                    for q in 0..n {
                        if yang_component(alg, p, q) {
                            v.push(((p, q), c.clone()));
                        }
                    }
                }
                v
            }
            Family::Trig => {
                // work on a wider u box; the gauge and the inversion eat a few orders
                let mut wide = shape.clone();
                wide.boxes[1].1 += 4;
                let base = trig_polarized(&special, &wide)?;
                let rho = rho_of(&base)?;
                let hi = wide.boxes[1].1;
                let g = gauge_transform(&base, &rho, hi + 3)?;
                let k = trig_cartan_constant(&special, spec.cartan_sign)?.lift(&wide)?;
                let full = g.add(&k)?.map(|s| Ok(s.truncate(&shape.boxes).tighten()))?;
                let comps: Vec<(Label, HSeries)> =
                    heis_components(&special, &full, shape)?.into_iter().map(|(a, c)| (a, c.tighten())).collect();
                // the gauged matrix must be diagonal in the Heisenberg basis
                let back = from_components(&special, &comps)?;
                for (&(r, c), s) in full.entries() {
                    let o = back.get(r, c).cloned().unwrap_or_else(|| HSeries::zero(shape));
                    if !s.eq_on_window(&o)? {
                        return Err(Error::Cancellation("trig r is not Heisenberg-diagonal".into()));
                    }
                }
                if spec.r != 1 {
                    relabel = Some(special.relabel(modinv(spec.r, n))?);
                }
                comps.into_iter().filter(|(a, _)| *a != (0, 0)).collect()
            }
            Family::Elliptic => {
                let k = EllipticKernel::new(spec.n, spec.tau);
                let hi = shape.boxes[1].1;
                let kmax = hi.max(0) as usize;
                let mut v = Vec::new();
                for p in 0..n {
                    for q in 0..n {
                        if (p, q) == (0, 0) {
                            continue;
                        }
                        let a = k.laurent(p, q, kmax);
                        let mut terms = vec![(vec![0, -1], Scalar::frac(mode, 1, n * n))];
                        for (j, c) in a.iter().enumerate() {
                            let c = c / (n * n) as f64;
                            terms.push((vec![0, j as i64], Scalar::complex(c.re, c.im)));
                        }
                        let s = HSeries::from_terms(shape, terms)?.with_support(1, -1, crate::series::INF);
                        v.push(((p, q), s));
                    }
                }
                kernel = Some(k);
                if spec.r != 1 {
                    relabel = Some(special.relabel(modinv(spec.r, n))?);
                }
                v
            }
        };
        let mut series = from_components(&special, &components)?;
        if let Some(c) = &relabel {
            for leg in [1, 2] {
                series = c.on_leg(&series, leg, |s| HSeries::constant(shape, lift_scalar(mode, s)))?;
            }
        }
        let mut pairs = Vec::new();
        for p in 0..n {
            for q in 0..n {
                pairs.push(((p, q), special.heis_pair(p, q).to_complex()));
            }
        }
        Ok(ClassicalR { spec: spec.clone(), special, series, components, kernel, relabel, pairs })
    }

    /// r(u) at the spec's window, h box [0, 0].
    pub fn make(spec: &RMatrixSpec) -> Result<ClassicalR> {
        let shape = Shape::uni("u", spec.mode(), 0, spec.u_window);
        ClassicalR::build(spec, &shape)
    }

    pub fn shape(&self) -> Shape {
        self.series.entries().values().next().map(|s| s.shape()).expect("nonempty r")
    }

    /// Closed-form c_α(u).
    pub fn component_at(&self, p: i64, q: i64, u: Complex64) -> Complex64 {
        let n = self.spec.n as f64;
        let nn = n * n;
        match self.spec.family {
            Family::Yang | Family::Rational => 1.0 / (nn * u),
            Family::Trig => {
                let d = u.exp() - 1.0;
                if p != 0 {
                    (u * (n - p as f64) / n).exp() / (nn * d)
                } else {
                    let e = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * q as f64 / n);
                    let k = self.spec.cartan_sign as f64 * 0.5 * (e + 1.0) / (e - 1.0);
                    (1.0 / d + 0.5 + k) / nn
                }
            }
            Family::Elliptic => self.kernel.as_ref().expect("kernel").phi(p, q, u) / nn,
        }
    }

    /// Σ over `components` of f(α)·I_α ⊗ I_α^{-1}, relabeled.
    pub fn assemble(&self, f: impl Fn(Label) -> Complex64) -> TensorOp<Complex64> {
        let ws: Vec<(Label, Complex64)> = self.components.iter().map(|(a, _)| (*a, f(*a))).collect();
        self.assemble_weights(&ws)
    }

    /// Σ w_α I_α ⊗ I_α^{-1} over the given labels, relabeled.
    pub fn assemble_weights(&self, ws: &[(Label, Complex64)]) -> TensorOp<Complex64> {
        let n = self.spec.n as i64;
        let mut out = TensorOp::zero(self.spec.n, 2);
        for ((p, q), c) in ws {
            let pair = &self.pairs[(p.rem_euclid(n) * n + q.rem_euclid(n)) as usize].1;
            for (&(r, k), v) in pair.entries() {
                out.add_entry(r, k, v * c).expect("assemble");
            }
        }
        out.prune();
        self.relabel_complex(&out)
    }

    pub fn relabel_complex(&self, m: &TensorOp<Complex64>) -> TensorOp<Complex64> {
        match &self.relabel {
            None => m.clone(),
            Some(c) => {
                let mut out = m.clone();
                for leg in [1, 2] {
                    out = c.on_leg(&out, leg, |s| Ok(s.to_complex())).expect("relabel");
                }
                out
            }
        }
    }

    pub fn eval(&self, u: Complex64) -> TensorOp<Complex64> {
        self.assemble(|(p, q)| self.component_at(p, q, u))
    }

    pub fn series_mode(&self) -> Mode {
        self.spec.mode()
    }

    /// Labels carried by the Heisenberg decomposition.
    pub fn labels(&self) -> Vec<Label> {
        self.components.iter().map(|(a, _)| *a).collect()
    }

    /// Residue at u = 0 (coefficient of u^{-1}).
    pub fn residue(&self) -> Result<TensorOp<Scalar>> {
        coefficient(&self.series, -1)
    }

    pub fn free_term(&self) -> Result<TensorOp<Scalar>> {
        coefficient(&self.series, 0)
    }

    /// The Casimir this family is normalized against.
    pub fn omega(&self) -> &TensorOp<Scalar> {
        if self.spec.family == Family::Yang && self.spec.algebra == Algebra::Gl {
            &self.special.omega_gl
        } else {
            &self.special.omega_sl
        }
    }
}
