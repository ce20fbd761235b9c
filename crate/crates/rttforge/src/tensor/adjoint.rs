//! Truncated exponentials e^{c·u·ρ} and the adjoint action they induce.

use crate::error::{Error, Result};
use crate::series::{HSeries, Mode, Scalar, Shape, INF};

use super::op::TensorOp;

/// e^{sign·u_k·ρ} as a one-leg operator with series entries in `shape`,
/// kept to u_k-order `order`. Exact when ρ is nilpotent within the order.
pub fn exp_op(rho: &TensorOp<Scalar>, shape: &Shape, k: usize, sign: i64, order: i64) -> Result<TensorOp<HSeries>> {
    if rho.legs() != 1 {
        return Err(Error::Shape("exponent must act on one leg".into()));
    }
    if k >= shape.nvars() {
        return Err(Error::Shape(format!("no variable {k}")));
    }
    let n = rho.n();
    let mode = shape.mode;
    let lift = |v: &Scalar| match mode {
        Mode::Exact => v.clone(),
        Mode::Approx => Scalar::Approx(v.to_complex()),
    };
    // powers sign^j ρ^j / j!, in the mode of ρ
    let rmode = rho.entries().values().next().map(|v| v.mode()).unwrap_or(Mode::Exact);
    let mut pw = TensorOp::identity(n, 1, &Scalar::one(rmode));
    let mut terms: Vec<Vec<(Vec<i64>, Scalar)>> = vec![Vec::new(); n * n];
    let mut nilpotent = false;
    for j in 0..=order + 1 {
        if j > 0 {
            pw = pw.mul(rho)?.scale(&Scalar::frac(rmode, sign, j))?;
        }
        if pw.is_zero() {
            nilpotent = true;
            break;
        }
        if j > order {
            break;
        }
        for (&(r, c), v) in pw.entries() {
            let mut key = vec![0i64; shape.nvars() + 1];
            key[k + 1] = j;
            terms[r * n + c].push((key, lift(v)));
        }
    }
    let mut out = TensorOp::zero(n, 1);
    for (idx, t) in terms.into_iter().enumerate() {
        let mut s = HSeries::from_terms(shape, t)?;
        if !nilpotent {
            // higher powers of u_k are dropped, so every suffix sum containing it is open above
            for d in 1..=k + 1 {
                let fl = s.dims()[d].floor.min(0);
                s = s.with_support(d, fl, INF);
            }
        }
        if nilpotent && s.is_zero() {
            continue;
        }
        out.add_entry(idx / n, idx % n, s)?;
    }
    Ok(out)
}

/// Conjugates `m` by e^{sign·u_k·ρ} on each listed `(leg, k, sign)`.
pub fn adjoint_exp(rho: &TensorOp<Scalar>, m: &TensorOp<HSeries>, actions: &[(usize, usize, i64)], order: i64) -> Result<TensorOp<HSeries>> {
    let shape = m
        .entries()
        .values()
        .next()
        .map(|s| s.shape())
        .ok_or_else(|| Error::Shape("adjoint_exp of the zero operator needs a shape".into()))?;
    let mut out = m.clone();
    for &(leg, k, sign) in actions {
        let e = exp_op(rho, &shape, k, sign, order)?.leg_embed(&[leg], m.legs())?;
        let ei = exp_op(rho, &shape, k, -sign, order)?.leg_embed(&[leg], m.legs())?;
        out = e.mul(&out)?.mul(&ei)?;
    }
    Ok(out)
}
