//! Sparse operators on (k^N)^{⊗m}.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::series::{HSeries, Scalar, Shape};

/// Ring operations needed for matrix entries.
pub trait Coeff: Clone + Send + Sync {
    fn c_add(&self, o: &Self) -> Result<Self>;
    fn c_mul(&self, o: &Self) -> Result<Self>;
    fn c_neg(&self) -> Self;
    fn c_is_zero(&self) -> bool;
    fn c_json(&self) -> Value;
    /// Whether a sparse container may forget this entry. Series keep their
    /// window even when zero, so residual windows stay visible.
    fn c_droppable(&self) -> bool {
        self.c_is_zero()
    }
}

impl Coeff for Scalar {
    fn c_add(&self, o: &Self) -> Result<Self> {
        self.add(o)
    }
    fn c_mul(&self, o: &Self) -> Result<Self> {
        self.mul(o)
    }
    fn c_neg(&self) -> Self {
        self.neg()
    }
    fn c_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn c_json(&self) -> Value {
        self.to_json()
    }
}

impl Coeff for HSeries {
    fn c_add(&self, o: &Self) -> Result<Self> {
        self.add(o)
    }
    fn c_mul(&self, o: &Self) -> Result<Self> {
        self.mul(o)
    }
    fn c_neg(&self) -> Self {
        self.neg()
    }
    fn c_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn c_json(&self) -> Value {
        self.to_json()
    }
    fn c_droppable(&self) -> bool {
        false
    }
}

impl Coeff for Complex64 {
    fn c_add(&self, o: &Self) -> Result<Self> {
        Ok(self + o)
    }
    fn c_mul(&self, o: &Self) -> Result<Self> {
        Ok(self * o)
    }
    fn c_neg(&self) -> Self {
        -self
    }
    fn c_is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn c_json(&self) -> Value {
        json!([self.re, self.im])
    }
}

/// An operator on the m-fold tensor power of k^N. Entries are keyed by flat
/// (row, col) indices; leg 1 is the most significant digit.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorOp<T> {
    n: usize,
    legs: usize,
    entries: BTreeMap<(usize, usize), T>,
}

pub fn digits(mut idx: usize, n: usize, legs: usize) -> Vec<usize> {
    let mut out = vec![0; legs];
    for k in (0..legs).rev() {
        out[k] = idx % n;
        idx /= n;
    }
    out
}

pub fn flat(d: &[usize], n: usize) -> usize {
    d.iter().fold(0, |acc, &x| acc * n + x)
}

impl<T: Coeff> TensorOp<T> {
    pub fn zero(n: usize, legs: usize) -> Self {
        TensorOp { n, legs, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize, legs: usize, one: &T) -> Self {
        let mut out = Self::zero(n, legs);
        for i in 0..n.pow(legs as u32) {
            out.entries.insert((i, i), one.clone());
        }
        out
    }

    pub fn from_entries(n: usize, legs: usize, it: impl IntoIterator<Item = ((usize, usize), T)>) -> Result<Self> {
        let mut out = Self::zero(n, legs);
        let dim = out.dim();
        for ((r, c), v) in it {
            if r >= dim || c >= dim {
                return Err(Error::Shape(format!("index ({r},{c}) out of range {dim}")));
            }
            out.add_entry(r, c, v)?;
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn dim(&self) -> usize {
        self.n.pow(self.legs as u32)
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), T> {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&T> {
        self.entries.get(&(r, c))
    }

    /// Entry at multi-indices.
    pub fn get_multi(&self, r: &[usize], c: &[usize]) -> Option<&T> {
        self.entries.get(&(flat(r, self.n), flat(c, self.n)))
    }

    pub fn add_entry(&mut self, r: usize, c: usize, v: T) -> Result<()> {
        match self.entries.get_mut(&(r, c)) {
            Some(x) => *x = x.c_add(&v)?,
            None => {
                self.entries.insert((r, c), v);
            }
        }
        Ok(())
    }

    pub fn prune(&mut self) {
        self.entries.retain(|_, v| !v.c_droppable());
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|v| v.c_is_zero())
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.n != o.n || self.legs != o.legs {
            return Err(Error::Shape(format!("(N={}, m={}) vs (N={}, m={})", self.n, self.legs, o.n, o.legs)));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        let mut out = self.clone();
        for (&(r, c), v) in &o.entries {
            out.add_entry(r, c, v.clone())?;
        }
        out.prune();
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        TensorOp { n: self.n, legs: self.legs, entries: self.entries.iter().map(|(k, v)| (*k, v.c_neg())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    /// Multiplies every entry by `c` on the left.
    pub fn scale(&self, c: &T) -> Result<Self> {
        let mut out = Self::zero(self.n, self.legs);
        for (k, v) in &self.entries {
            out.entries.insert(*k, c.c_mul(v)?);
        }
        out.prune();
        Ok(out)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        let mut brows: BTreeMap<usize, Vec<(usize, &T)>> = BTreeMap::new();
        for ((r, c), v) in &o.entries {
            brows.entry(*r).or_default().push((*c, v));
        }
        let mut arows: BTreeMap<usize, Vec<(usize, &T)>> = BTreeMap::new();
        for ((r, c), v) in &self.entries {
            arows.entry(*r).or_default().push((*c, v));
        }
        let rows: Vec<(usize, Vec<(usize, &T)>)> = arows.into_iter().collect();
        let work = |(r, row): &(usize, Vec<(usize, &T)>)| -> Result<Vec<((usize, usize), T)>> {
            let mut acc: BTreeMap<usize, T> = BTreeMap::new();
            for (k, a) in row {
                if let Some(brow) = brows.get(k) {
                    for (c, b) in brow {
                        let p = a.c_mul(b)?;
                        match acc.get_mut(c) {
                            Some(x) => *x = x.c_add(&p)?,
                            None => {
                                acc.insert(*c, p);
                            }
                        }
                    }
                }
            }
            Ok(acc.into_iter().filter(|(_, v)| !v.c_droppable()).map(|(c, v)| ((*r, c), v)).collect())
        };
        let parts: Vec<Result<Vec<((usize, usize), T)>>> = if rows.len() > 16 {
            rows.par_iter().map(work).collect()
        } else {
            rows.iter().map(work).collect()
        };
        let mut out = Self::zero(self.n, self.legs);
        for p in parts {
            for (k, v) in p? {
                out.entries.insert(k, v);
            }
        }
        Ok(out)
    }

    /// Places this p-leg operator on `target_legs` (1-based, distinct) of an
    /// m-leg space, identity elsewhere. The k-th leg of `self` acts on
    /// `target_legs[k]`, so a permuted list transposes legs.
    pub fn leg_embed(&self, target_legs: &[usize], m: usize) -> Result<Self> {
        if target_legs.len() != self.legs {
            return Err(Error::Shape(format!("{} target legs for a {}-leg operator", target_legs.len(), self.legs)));
        }
        let mut seen = vec![false; m + 1];
        for &l in target_legs {
            if l == 0 || l > m {
                return Err(Error::Shape(format!("leg {l} outside 1..={m}")));
            }
            if seen[l] {
                return Err(Error::Shape(format!("leg {l} repeated")));
            }
            seen[l] = true;
        }
        let others: Vec<usize> = (1..=m).filter(|l| !seen[*l]).collect();
        let n = self.n;
        let mut out = Self::zero(n, m);
        let n_other = n.pow(others.len() as u32);
        for (&(r, c), v) in &self.entries {
            let rd = digits(r, n, self.legs);
            let cd = digits(c, n, self.legs);
            for o in 0..n_other {
                let od = digits(o, n, others.len());
                let mut row = vec![0; m];
                let mut col = vec![0; m];
                for (k, &l) in target_legs.iter().enumerate() {
                    row[l - 1] = rd[k];
                    col[l - 1] = cd[k];
                }
                for (k, &l) in others.iter().enumerate() {
                    row[l - 1] = od[k];
                    col[l - 1] = od[k];
                }
                out.entries.insert((flat(&row, n), flat(&col, n)), v.clone());
            }
        }
        Ok(out)
    }

    /// M ↦ M^{21} for a two-leg operator.
    pub fn flip(&self) -> Result<Self> {
        self.leg_embed(&[2, 1], 2)
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> Result<U>) -> Result<TensorOp<U>> {
        let mut out = TensorOp::zero(self.n, self.legs);
        for (k, v) in &self.entries {
            let w = f(v)?;
            if !w.c_droppable() {
                out.entries.insert(*k, w);
            }
        }
        Ok(out)
    }

    pub fn try_for_each(&self, mut f: impl FnMut((usize, usize), &T) -> Result<()>) -> Result<()> {
        for (k, v) in &self.entries {
            f(*k, v)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|(&(r, c), v)| json!([digits(r, self.n, self.legs), digits(c, self.n, self.legs), v.c_json()]))
            .collect();
        json!({"N": self.n, "legs": self.legs, "entries": entries})
    }
}

impl TensorOp<Scalar> {
    pub fn lift(&self, shape: &Shape) -> Result<TensorOp<HSeries>> {
        self.map(|s| HSeries::constant(shape, s.clone()))
    }

    pub fn to_complex(&self) -> TensorOp<Complex64> {
        self.map(|s| Ok(s.to_complex())).expect("complex")
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n = v["N"].as_u64().ok_or_else(|| Error::Parse("N".into()))? as usize;
        let legs = v["legs"].as_u64().ok_or_else(|| Error::Parse("legs".into()))? as usize;
        let mut out = TensorOp::zero(n, legs);
        for e in v["entries"].as_array().ok_or_else(|| Error::Parse("entries".into()))? {
            let r: Vec<usize> = serde_json::from_value(e[0].clone()).map_err(|_| Error::Parse("row".into()))?;
            let c: Vec<usize> = serde_json::from_value(e[1].clone()).map_err(|_| Error::Parse("col".into()))?;
            out.add_entry(flat(&r, n), flat(&c, n), Scalar::from_json(&e[2])?)?;
        }
        Ok(out)
    }
}

impl TensorOp<HSeries> {
    /// Evaluates every entry at a numeric point.
    pub fn eval(&self, point: &[Complex64], h: Complex64) -> TensorOp<Complex64> {
        self.map(|s| Ok(s.eval(point, h))).expect("eval")
    }

    /// Largest coefficient magnitude over all entries.
    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(|s| s.max_abs()).fold(0.0, f64::max)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n = v["N"].as_u64().ok_or_else(|| Error::Parse("N".into()))? as usize;
        let legs = v["legs"].as_u64().ok_or_else(|| Error::Parse("legs".into()))? as usize;
        let mut out = TensorOp::zero(n, legs);
        for e in v["entries"].as_array().ok_or_else(|| Error::Parse("entries".into()))? {
            let r: Vec<usize> = serde_json::from_value(e[0].clone()).map_err(|_| Error::Parse("row".into()))?;
            let c: Vec<usize> = serde_json::from_value(e[1].clone()).map_err(|_| Error::Parse("col".into()))?;
            out.add_entry(flat(&r, n), flat(&c, n), HSeries::from_json(&e[2])?)?;
        }
        Ok(out)
    }
}

impl TensorOp<Complex64> {
    pub fn max_norm(&self) -> f64 {
        self.entries.values().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale_c(&self, c: Complex64) -> Self {
        self.map(|z| Ok(z * c)).expect("scale")
    }
}

/// Matrix unit E_ab on one leg.
pub fn unit<T: Coeff>(n: usize, a: usize, b: usize, one: &T) -> TensorOp<T> {
    let mut m = TensorOp::zero(n, 1);
    m.entries.insert((a, b), one.clone());
    m
}

/// Tensor (Kronecker) product of a p-leg and a q-leg operator.
pub fn kron<T: Coeff>(a: &TensorOp<T>, b: &TensorOp<T>) -> Result<TensorOp<T>> {
    if a.n != b.n {
        return Err(Error::Shape("kron of different N".into()));
    }
    let db = b.dim();
    let mut out = TensorOp::zero(a.n, a.legs + b.legs);
    for (&(r1, c1), x) in &a.entries {
        for (&(r2, c2), y) in &b.entries {
            let p = x.c_mul(y)?;
            if !p.c_droppable() {
                out.entries.insert((r1 * db + r2, c1 * db + c2), p);
            }
        }
    }
    Ok(out)
}
