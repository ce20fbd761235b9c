//! Quantum R-matrices R(u, h) as truncated series plus point evaluators.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::{HSeries, Mode, Scalar, Shape};
use crate::tensor::TensorOp;

use super::classical::{lift_scalar, ClassicalR, Label};
use super::spec::{Algebra, Family, RMatrixSpec};

#[derive(Clone, Debug)]
pub struct QuantumR {
    pub spec: RMatrixSpec,
    /// Classical r on the widened u window with h box [0, H].
    pub classical: ClassicalR,
    pub series: TensorOp<HSeries>,
    /// Scalar factor applied by [`QuantumR::scale_r`].
    pub factor: Option<HSeries>,
    /// 1/c_α(−h/N²) for the ratio form.
    pub inv_den: Vec<(Label, HSeries)>,
}

fn neg_inv_n2(mode: Mode, n: usize) -> Scalar {
    let n = n as i64;
    Scalar::frac(mode, -1, n * n)
}

fn check_window(series: &TensorOp<HSeries>, h: i64, win: (i64, i64)) -> Result<()> {
    for s in series.entries().values() {
        let d = s.dims();
        if d[0].lo > 0 || d[0].hi < h || d[1].lo > win.0 || d[1].hi < win.1 {
            return Err(Error::Window(format!(
                "R entry only exact on h [{}, {}], u [{}, {}]; asked h [0, {h}], u [{}, {}]",
                d[0].lo, d[0].hi, d[1].lo, d[1].hi, win.0, win.1
            )));
        }
    }
    Ok(())
}

/// Widened shape for building r so that the h shift keeps the requested u window.
pub fn build_shape(spec: &RMatrixSpec) -> Shape {
    let (lo, hi) = spec.u_window;
    Shape::uni("u", spec.mode(), spec.h_order, (lo, hi + spec.h_order + 2))
}

/// Nσ − N²Ω must be the identity: the h^{-1} pole of h·r(−h/N²) cancels.
pub fn pole_cancellation(classical: &ClassicalR) -> Result<TensorOp<Scalar>> {
    let sp = &classical.special;
    let n = sp.n as i64;
    let lhs = sp.sigma.scale(&Scalar::int(Mode::Exact, n))?.sub(&sp.omega_sl.scale(&Scalar::int(Mode::Exact, n * n))?)?;
    let one = TensorOp::identity(sp.n, 2, &Scalar::one(Mode::Exact));
    if lhs.sub(&one)?.is_zero() {
        Ok(lhs)
    } else {
        Err(Error::Cancellation("N sigma - N^2 Omega is not the identity".into()))
    }
}

impl QuantumR {
    pub fn make(spec: &RMatrixSpec) -> Result<QuantumR> {
        spec.validate()?;
        let shape = build_shape(spec);
        let win = spec.u_window;
        let h = spec.h_order;
        let n = spec.n;
        if spec.family == Family::Yang {
            let mut cs = spec.clone();
            cs.algebra = Algebra::Gl;
            let classical = ClassicalR::build(&cs, &shape)?;
            let out_shape = Shape::uni("u", Mode::Exact, h, win);
            let term = HSeries::monomial(&out_shape, 1, &[-1], Scalar::frac(Mode::Exact, -1, n as i64))?;
            let one = HSeries::one(&out_shape);
            let series = TensorOp::identity(n, 2, &one).add(&classical.special.sigma.map(|v| term.scale(v))?)?;
            return Ok(QuantumR { spec: spec.clone(), classical, series, factor: None, inv_den: Vec::new() });
        }
        let classical = ClassicalR::build(spec, &shape)?;
        pole_cancellation(&classical)?;
        let mode = shape.mode;
        let c0 = neg_inv_n2(mode, n);
        let mut series = TensorOp::identity(n, 2, &HSeries::one(&Shape::uni("u", mode, h, win)));
        let mut inv_den = Vec::new();
        for (a, c) in &classical.components {
            let num = c.shift_h(&c0)?;
            let den = c.subst_h(&c0, (-1, h + 1))?;
            let lead = den.coeff(-1, &[]);
            let expect = Scalar::int(mode, -1);
            let ok = match mode {
                Mode::Exact => lead == expect,
                Mode::Approx => (lead.to_complex() + 1.0).norm() < 1e-12,
            };
            if !ok {
                return Err(Error::Cancellation(format!("h^-1 coefficient of c{a:?}(-h/N^2) is {lead:?}")));
            }
            let g = den.invert()?.widen(&[(0, h)]).truncate(&[(0, h)]);
            let ratio = num.mul(&g.lift_uni("u", shape.boxes[1])?)?.truncate(&[(0, h), win]);
            let pair = classical.special.heis_pair(a.0, a.1);
            let mut t = TensorOp::zero(n, 2);
            for (&(r, k), v) in pair.entries() {
                t.add_entry(r, k, ratio.scale(&lift_scalar(mode, v))?)?;
            }
            series = series.add(&t)?;
            inv_den.push((*a, g));
        }
        if let Some(c) = &classical.relabel {
            let s1 = Shape::uni("u", mode, h, win);
            for leg in [1, 2] {
                series = c.on_leg(&series, leg, |s| HSeries::constant(&s1, lift_scalar(mode, s)))?;
            }
        }
        check_window(&series, h, win)?;
        Ok(QuantumR { spec: spec.clone(), classical, series, factor: None, inv_den })
    }

    /// f·R for a scalar f = 1 + O(h) in (u, h).
    pub fn scale_r(&self, f: &HSeries) -> Result<QuantumR> {
        let d0: Vec<(&Vec<i64>, &Scalar)> = f.terms().filter(|(k, _)| k[0] == 0).collect();
        let unit = d0.len() == 1 && d0[0].0.iter().all(|&e| e == 0) && d0[0].1.is_one();
        if !unit || f.dims()[0].lo > 0 {
            return Err(Error::Spec("scale factor must be 1 + O(h)".into()));
        }
        let f = if f.vars().is_empty() { f.lift_uni("u", self.spec.u_window)? } else { f.clone() };
        let mut out = self.clone();
        out.series = self.series.map(|s| s.mul(&f))?;
        out.factor = Some(match &self.factor {
            Some(g) => g.mul(&f)?,
            None => f,
        });
        Ok(out)
    }

    pub fn shape(&self) -> Shape {
        Shape::uni("u", self.spec.mode(), self.spec.h_order, self.spec.u_window)
    }

    /// R(u, h) = Σ_α w_α(u, h) I_α ⊗ I_α^{-1} over all N² labels (before relabeling).
    pub fn weights(&self, u: Complex64, h: Complex64) -> Vec<(Label, Complex64)> {
        let n = self.spec.n as i64;
        let nn = (n * n) as f64;
        let cl = &self.classical;
        let f = self.factor.as_ref().map(|f| f.eval(&[u], h)).unwrap_or(Complex64::new(1.0, 0.0));
        let mut ws = Vec::new();
        for p in 0..n {
            for q in 0..n {
                let mut w = Complex64::new(if (p, q) == (0, 0) { 1.0 } else { 0.0 }, 0.0);
                if self.spec.family == Family::Yang {
                    w -= h / (nn * u);
                } else if (p, q) != (0, 0) {
                    let c0 = -h / nn;
                    w += cl.component_at(p, q, u + c0) / cl.component_at(p, q, c0);
                }
                ws.push(((p, q), w * f));
            }
        }
        ws
    }

    /// Closed-form value at (u, h), untruncated.
    pub fn eval(&self, u: Complex64, h: Complex64) -> TensorOp<Complex64> {
        self.classical.assemble_weights(&self.weights(u, h))
    }

    /// Diagnostic: Nσ − h(r(u − h/N²) − r(−h/N²)) built term by term as series.
    pub fn literal_form(&self) -> Result<TensorOp<HSeries>> {
        let cl = &self.classical;
        let shape = cl.shape();
        let mode = shape.mode;
        let n = self.spec.n;
        let c0 = neg_inv_n2(mode, n);
        let h = self.spec.h_order;
        let win = self.spec.u_window;
        let one_h = Scalar::one(mode);
        let base = cl.special.sigma.scale(&Scalar::int(Mode::Exact, n as i64))?;
        let out_shape = Shape::uni("u", mode, h, win);
        let mut out = base.map(|v| HSeries::constant(&out_shape, lift_scalar(mode, v)))?;
        for (&(r, k), s) in cl.series.entries() {
            let a = s.shift_h(&c0)?;
            let b = s.subst_h(&c0, (-1, h))?.lift_uni("u", shape.boxes[1])?;
            let t = a.sub(&b)?.shift_monomial(1, &[0], &one_h)?.neg().truncate(&[(0, h), win]);
            let mut e = TensorOp::zero(n, 2);
            e.add_entry(r, k, t)?;
            out = out.add(&e)?;
        }
        Ok(out)
    }
}
