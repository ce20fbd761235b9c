//! R-matrices of the form R(w) = 1 − hC/(w − ch), the class the rewriting engine handles.

use crate::error::{Error, Result};
use crate::rmatrix::{Algebra, Family, RMatrixSpec};
use crate::series::{HSeries, Mode, Scalar, Shape};
use crate::tensor::{SpecialElements, TensorOp};

#[derive(Clone, Debug, PartialEq)]
pub struct PoleR {
    pub n: usize,
    pub c_op: TensorOp<Scalar>,
    pub shift: Scalar,
    /// C + c·Id; multiplying the RTT relation by (w − ch) leaves w − hD.
    pub d_op: TensorOp<Scalar>,
    pub label: String,
}

impl PoleR {
    pub fn new(n: usize, c_op: TensorOp<Scalar>, shift: Scalar, label: &str) -> Result<PoleR> {
        let d_op = c_op.add(&TensorOp::identity(n, 2, &shift))?;
        Ok(PoleR { n, c_op, shift, d_op, label: label.to_string() })
    }

    /// R_Y = 1 − hσ/(Nu).
    pub fn yang(n: usize) -> PoleR {
        let sp = SpecialElements::new(n);
        let c = sp.sigma.scale(&Scalar::frac(Mode::Exact, 1, n as i64)).expect("sigma");
        PoleR::new(n, c, Scalar::zero(Mode::Exact), "yang").expect("yang")
    }

    /// R_rat = 1 − hΩ/(u − h/N²).
    pub fn rational(n: usize) -> PoleR {
        let sp = SpecialElements::new(n);
        PoleR::new(n, sp.omega_sl.clone(), Scalar::frac(Mode::Exact, 1, (n * n) as i64), "rational").expect("rational")
    }

    /// 1 − hσ/(N(u − h/2)): breaks unitarity and the pole cancellation; a negative control.
    pub fn corrupted(n: usize) -> PoleR {
        let sp = SpecialElements::new(n);
        let c = sp.sigma.scale(&Scalar::frac(Mode::Exact, 1, n as i64)).expect("sigma");
        PoleR::new(n, c, Scalar::frac(Mode::Exact, 1, 2), "corrupted").expect("corrupted")
    }

    pub fn from_spec(spec: &RMatrixSpec) -> Result<PoleR> {
        match spec.family {
            Family::Yang => Ok(PoleR::yang(spec.n)),
            Family::Rational => Ok(PoleR::rational(spec.n)),
            f => Err(Error::Spec(format!("the RTT engine needs R = 1 - hC/(u - ch); {f:?} is not of that form"))),
        }
    }

    /// The spec this R comes from, when there is one.
    pub fn spec(&self) -> Option<RMatrixSpec> {
        match self.label.as_str() {
            "yang" => {
                let mut s = RMatrixSpec::yang(self.n);
                s.algebra = Algebra::Gl;
                Some(s)
            }
            "rational" => Some(RMatrixSpec::new(Family::Rational, self.n)),
            _ => None,
        }
    }

    /// R(w) at exact w and h.
    pub fn eval(&self, w: &Scalar, h: &Scalar) -> Result<TensorOp<Scalar>> {
        let den = w.sub(&self.shift.mul(h)?)?;
        if den.is_zero() {
            return Err(Error::NotInvertible(format!("R has a pole at w = {}", w.to_json())));
        }
        let k = h.div(&den)?.neg();
        let mut out = TensorOp::identity(self.n, 2, &Scalar::one(w.mode())).add(&self.c_op.scale(&k)?)?;
        out.prune();
        Ok(out)
    }

    /// 1 − C Σ_m c^m h^{m+1} u^{−m−1} as a series.
    pub fn series(&self, h_order: i64, win: (i64, i64)) -> Result<TensorOp<HSeries>> {
        let shape = Shape::uni("u", Mode::Exact, h_order, win);
        let mut geo = HSeries::zero(&shape);
        let mut cp = Scalar::one(Mode::Exact);
        for m in 0..h_order {
            geo = geo.add(&HSeries::monomial(&shape, m + 1, &[-m - 1], cp.neg())?)?;
            cp = cp.mul(&self.shift)?;
        }
        let floor = if self.shift.is_zero() { -1 } else { -h_order.max(1) };
        let geo = geo.with_support(1, floor, -1);
        TensorOp::identity(self.n, 2, &HSeries::one(&shape)).add(&self.c_op.map(|v| geo.scale(v))?)
    }
}
