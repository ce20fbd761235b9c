//! Truncated series in h and nested-Laurent spectral variables.
//!
//! Windows are kept on the suffix sums s_k = e_k + e_{k+1} + … + e_n of the
//! spectral exponents (n = number of variables), plus the h exponent.
//! For one variable this is just the exponent. In k((u₁))((u₂)) the
//! expansion of 1/(u₁ − u₂) has s₁ = −1 and s₂ = m ≥ 0, so a box in
//! (s₁, s₂) is finite exactly when the nested convention says it should be.
//!
//! Every dimension carries the exact box `[lo, hi]` together with bounds
//! `[floor, ceil]` on the support of the true (untruncated) series. A series
//! has a truncation error above its box in a dimension when `hi < ceil`;
//! products use these bounds to shrink the box so that every stored
//! coefficient stays exact. The spectral bounds are only claimed for terms
//! whose h exponent lies inside the h box.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};

use super::scalar::{Mode, Scalar};
use crate::error::{Error, Result};

pub const INF: i64 = 1 << 40;

fn sat(x: i64) -> i64 {
    if x >= INF / 2 {
        INF
    } else if x <= -INF / 2 {
        -INF
    } else {
        x
    }
}

fn sadd(a: i64, b: i64) -> i64 {
    // an empty support (floor = INF) stays empty
    if a == INF || b == INF {
        return if a == -INF || b == -INF { 0 } else { INF };
    }
    if a == -INF || b == -INF {
        return -INF;
    }
    sat(a + b)
}

/// Box and support bounds for one dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dim {
    pub lo: i64,
    pub hi: i64,
    pub floor: i64,
    pub ceil: i64,
}

impl Dim {
    pub fn new(lo: i64, hi: i64, floor: i64, ceil: i64) -> Dim {
        Dim { lo, hi, floor, ceil }
    }

    /// A box with empty support (the zero series).
    pub fn empty(lo: i64, hi: i64) -> Dim {
        Dim { lo, hi, floor: INF, ceil: -INF }
    }

    pub fn top_err(&self) -> bool {
        self.hi < self.ceil
    }

    pub fn bot_err(&self) -> bool {
        self.lo > self.floor
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo <= x && x <= self.hi
    }

    fn shifted(&self, d: i64) -> Dim {
        Dim {
            lo: sadd(self.lo, d),
            hi: sadd(self.hi, d),
            floor: if self.floor == INF { INF } else { sadd(self.floor, d) },
            ceil: if self.ceil == -INF { -INF } else { sadd(self.ceil, d) },
        }
    }
}

/// Variables, mode and the default box used to build new series.
#[derive(Clone, Debug, PartialEq)]
pub struct Shape {
    pub vars: Arc<Vec<String>>,
    pub mode: Mode,
    /// `(lo, hi)` for h then for every suffix sum.
    pub boxes: Vec<(i64, i64)>,
}

impl Shape {
    pub fn new(vars: &[&str], mode: Mode, h: (i64, i64), spectral: &[(i64, i64)]) -> Shape {
        assert_eq!(vars.len(), spectral.len());
        let mut boxes = vec![h];
        boxes.extend_from_slice(spectral);
        Shape { vars: Arc::new(vars.iter().map(|s| s.to_string()).collect()), mode, boxes }
    }

    /// h-only series with h box `[0, h_order]`.
    pub fn scalar(mode: Mode, h_order: i64) -> Shape {
        Shape::new(&[], mode, (0, h_order), &[])
    }

    /// One spectral variable with the given Laurent box.
    pub fn uni(var: &str, mode: Mode, h_order: i64, win: (i64, i64)) -> Shape {
        Shape::new(&[var], mode, (0, h_order), &[win])
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }
}

/// A truncated series; keys are `[h, e_1, …, e_n]`.
#[derive(Clone, Debug)]
pub struct HSeries {
    vars: Arc<Vec<String>>,
    mode: Mode,
    dims: Vec<Dim>,
    terms: BTreeMap<Vec<i64>, Scalar>,
}

fn dim_values(key: &[i64]) -> Vec<i64> {
    let n = key.len() - 1;
    let mut out = vec![0; key.len()];
    out[0] = key[0];
    let mut acc = 0;
    for k in (0..n).rev() {
        acc += key[k + 1];
        out[k + 1] = acc;
    }
    out
}

fn binom_rat(k: i64, m: i64) -> BigRational {
    // generalized binomial C(k, m), m >= 0
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..m {
        num *= BigInt::from(k - j);
        den *= BigInt::from(j + 1);
    }
    BigRational::new(num, den)
}

impl HSeries {
    fn raw(vars: Arc<Vec<String>>, mode: Mode, dims: Vec<Dim>) -> HSeries {
        HSeries { vars, mode, dims, terms: BTreeMap::new() }
    }

    pub fn zero(shape: &Shape) -> HSeries {
        let dims = shape.boxes.iter().map(|&(lo, hi)| Dim::empty(lo, hi)).collect();
        HSeries::raw(shape.vars.clone(), shape.mode, dims)
    }

    /// The complete series given by `terms` (keys `[h, e_1..e_n]`), clipped to the shape's box.
    pub fn from_terms(shape: &Shape, terms: impl IntoIterator<Item = (Vec<i64>, Scalar)>) -> Result<HSeries> {
        let mut out = HSeries::zero(shape);
        for (k, v) in terms {
            if k.len() != shape.nvars() + 1 {
                return Err(Error::Shape(format!("key {k:?} for {} vars", shape.nvars())));
            }
            if v.mode() != shape.mode {
                return Err(Error::ModeMismatch);
            }
            if v.is_zero() {
                continue;
            }
            let dv = dim_values(&k);
            for (d, x) in out.dims.iter_mut().zip(dv.iter()) {
                d.floor = d.floor.min(*x);
                d.ceil = d.ceil.max(*x);
            }
            if out.in_box(&dv) {
                let e = out.terms.entry(k).or_insert_with(|| Scalar::zero(shape.mode));
                *e = e.add(&v)?;
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn constant(shape: &Shape, c: Scalar) -> Result<HSeries> {
        HSeries::from_terms(shape, [(vec![0; shape.nvars() + 1], c)])
    }

    pub fn one(shape: &Shape) -> HSeries {
        HSeries::constant(shape, Scalar::one(shape.mode)).expect("unit")
    }

    pub fn monomial(shape: &Shape, h: i64, exps: &[i64], c: Scalar) -> Result<HSeries> {
        let mut k = vec![h];
        k.extend_from_slice(exps);
        HSeries::from_terms(shape, [(k, c)])
    }

    /// The variable h.
    pub fn h(shape: &Shape) -> HSeries {
        HSeries::monomial(shape, 1, &vec![0; shape.nvars()], Scalar::one(shape.mode)).expect("h")
    }

    /// The k-th spectral variable.
    pub fn var(shape: &Shape, k: usize) -> HSeries {
        let mut e = vec![0; shape.nvars()];
        e[k] = 1;
        HSeries::monomial(shape, 0, &e, Scalar::one(shape.mode)).expect("var")
    }

    /// Overrides support bounds; used by constructors that know the true series.
    pub fn with_support(mut self, dim: usize, floor: i64, ceil: i64) -> HSeries {
        self.dims[dim].floor = floor;
        self.dims[dim].ceil = ceil;
        self
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn dims(&self) -> &[Dim] {
        &self.dims
    }

    pub fn h_order(&self) -> i64 {
        self.dims[0].hi
    }

    pub fn shape(&self) -> Shape {
        Shape { vars: self.vars.clone(), mode: self.mode, boxes: self.dims.iter().map(|d| (d.lo, d.hi)).collect() }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// No nonzero coefficient inside the box.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether the box contains at least one exponent tuple.
    pub fn box_nonempty(&self) -> bool {
        self.dims.iter().all(|d| d.lo <= d.hi)
    }

    pub fn coeff(&self, h: i64, exps: &[i64]) -> Scalar {
        let mut k = vec![h];
        k.extend_from_slice(exps);
        self.terms.get(&k).cloned().unwrap_or_else(|| Scalar::zero(self.mode))
    }

    fn in_box(&self, dv: &[i64]) -> bool {
        self.dims.iter().zip(dv).all(|(d, x)| d.contains(*x))
    }

    fn prune(&mut self) {
        self.terms.retain(|_, v| !v.is_zero());
    }

    fn compat(&self, o: &HSeries) -> Result<()> {
        if self.mode != o.mode {
            return Err(Error::ModeMismatch);
        }
        if self.vars != o.vars {
            return Err(Error::VarMismatch(self.vars.to_vec(), o.vars.to_vec()));
        }
        Ok(())
    }

    /// Restricts the box; coefficients outside are dropped.
    pub fn truncate(&self, boxes: &[(i64, i64)]) -> HSeries {
        let mut out = self.clone();
        for (d, &(lo, hi)) in out.dims.iter_mut().zip(boxes) {
            d.lo = d.lo.max(lo);
            d.hi = d.hi.min(hi);
        }
        let dims = out.dims.clone();
        out.terms.retain(|k, _| {
            let dv = dim_values(k);
            dims.iter().zip(&dv).all(|(d, x)| d.contains(*x))
        });
        out
    }

    /// Raises the spectral floor (and lowers the ceiling) of a univariate or
    /// h-only series to the stored terms when the box shows nothing is missing.
    pub fn tighten(&self) -> HSeries {
        let mut out = self.clone();
        if self.vars.len() > 1 {
            return out;
        }
        let k = self.vars.len();
        let d = &mut out.dims[k];
        let vals: Vec<i64> = self.terms.keys().map(|key| dim_values(key)[k]).collect();
        if !d.bot_err() && d.floor != INF {
            let m = vals.iter().copied().min().unwrap_or(sadd(d.hi, 1));
            d.floor = d.floor.max(m.min(sadd(d.hi, 1)));
        }
        if !d.top_err() && d.ceil != -INF {
            let m = vals.iter().copied().max().unwrap_or(sadd(d.lo, -1));
            d.ceil = d.ceil.min(m.max(sadd(d.lo, -1)));
        }
        if self.terms.is_empty() && !d.bot_err() && !d.top_err() {
            d.floor = INF;
            d.ceil = -INF;
        }
        out
    }

    /// Grows the box toward `boxes` wherever the support bounds show nothing is missing.
    pub fn widen(&self, boxes: &[(i64, i64)]) -> HSeries {
        let mut out = self.clone();
        for (d, &(lo, hi)) in out.dims.iter_mut().zip(boxes) {
            if !d.bot_err() {
                d.lo = d.lo.min(lo);
            }
            if !d.top_err() {
                d.hi = d.hi.max(hi);
            }
        }
        out
    }

    pub fn truncate_h(&self, h_order: i64) -> HSeries {
        let mut b: Vec<(i64, i64)> = self.dims.iter().map(|d| (d.lo, d.hi)).collect();
        b[0].1 = b[0].1.min(h_order);
        self.truncate(&b)
    }

    pub fn add(&self, o: &HSeries) -> Result<HSeries> {
        self.compat(o)?;
        let dims: Vec<Dim> = self
            .dims
            .iter()
            .zip(&o.dims)
            .map(|(a, b)| Dim::new(a.lo.max(b.lo), a.hi.min(b.hi), a.floor.min(b.floor), a.ceil.max(b.ceil)))
            .collect();
        let mut out = HSeries::raw(self.vars.clone(), self.mode, dims);
        for (k, v) in self.terms.iter().chain(o.terms.iter()) {
            if out.in_box(&dim_values(k)) {
                match out.terms.get_mut(k) {
                    Some(e) => *e = e.add(v)?,
                    None => {
                        out.terms.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn neg(&self) -> HSeries {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.neg();
        }
        out
    }

    pub fn sub(&self, o: &HSeries) -> Result<HSeries> {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Result<HSeries> {
        if c.mode() != self.mode {
            return Err(Error::ModeMismatch);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.mul(c)?;
        }
        out.prune();
        if out.terms.is_empty() && c.is_zero() {
            for d in out.dims.iter_mut() {
                d.floor = INF;
                d.ceil = -INF;
            }
        }
        Ok(out)
    }

    pub fn mul(&self, o: &HSeries) -> Result<HSeries> {
        self.compat(o)?;
        let dims: Vec<Dim> = self
            .dims
            .iter()
            .zip(&o.dims)
            .map(|(a, b)| {
                let mut lo = a.lo.max(b.lo);
                let mut hi = a.hi.min(b.hi);
                if a.top_err() {
                    hi = hi.min(sadd(a.hi, b.floor));
                }
                if b.top_err() {
                    hi = hi.min(sadd(b.hi, a.floor));
                }
                if a.bot_err() {
                    lo = lo.max(sadd(a.lo, b.ceil));
                }
                if b.bot_err() {
                    lo = lo.max(sadd(b.lo, a.ceil));
                }
                Dim::new(lo, hi, sadd(a.floor, b.floor), if a.ceil == -INF || b.ceil == -INF { -INF } else { sadd(a.ceil, b.ceil) })
            })
            .collect();
        let mut out = HSeries::raw(self.vars.clone(), self.mode, dims);
        if self.terms.is_empty() || o.terms.is_empty() {
            for d in out.dims.iter_mut() {
                d.floor = INF;
                d.ceil = -INF;
            }
            return Ok(out);
        }
        let n = self.vars.len() + 1;
        let mut key = vec![0i64; n];
        for (ka, va) in &self.terms {
            for (kb, vb) in &o.terms {
                for i in 0..n {
                    key[i] = ka[i] + kb[i];
                }
                if !out.in_box(&dim_values(&key)) {
                    continue;
                }
                let p = va.mul(vb)?;
                match out.terms.get_mut(&key) {
                    Some(e) => *e = e.add(&p)?,
                    None => {
                        out.terms.insert(key.clone(), p);
                    }
                }
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<HSeries> {
        let mut acc = HSeries::one(&self.shape());
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Multiplies by c·h^dh·u^de (a monomial), shifting the box.
    pub fn shift_monomial(&self, dh: i64, de: &[i64], c: &Scalar) -> Result<HSeries> {
        let mut key = vec![dh];
        key.extend_from_slice(de);
        let dv = dim_values(&key);
        let mut out = HSeries::raw(
            self.vars.clone(),
            self.mode,
            self.dims.iter().zip(&dv).map(|(d, x)| d.shifted(*x)).collect(),
        );
        for (k, v) in &self.terms {
            let nk: Vec<i64> = k.iter().zip(&key).map(|(a, b)| a + b).collect();
            out.terms.insert(nk, v.mul(c)?);
        }
        out.prune();
        Ok(out)
    }

    /// Two-sided inverse on the box. Supports h plus at most one spectral variable.
    pub fn invert(&self) -> Result<HSeries> {
        if self.vars.len() > 1 {
            return Err(Error::NotInvertible("inversion needs at most one spectral variable".into()));
        }
        if self.terms.is_empty() {
            return Err(Error::NotInvertible("zero series".into()));
        }
        let this = self.tighten();
        let this = &this;
        let hd = this.dims[0];
        let mh = this.terms.keys().map(|k| k[0]).min().unwrap();
        if hd.bot_err() || hd.floor == -INF {
            return Err(Error::NotInvertible("lowest h order not determined".into()));
        }
        if mh > hd.floor && self.vars.len() == 1 && this.dims[1].top_err() {
            return Err(Error::NotInvertible("leading h slice not determined inside the window".into()));
        }
        if mh > 0 && hd.floor >= 0 {
            // h alone is not invertible in k((u))[[h]]
            return Err(Error::NotInvertible("h^0 part is zero".into()));
        }
        let uni = self.vars.len() == 1;
        let k = if uni {
            let ud = this.dims[1];
            if ud.bot_err() || ud.floor == -INF {
                return Err(Error::NotInvertible("lowest u order not determined".into()));
            }
            this.terms.keys().filter(|key| key[0] == mh).map(|key| key[1]).min().unwrap()
        } else {
            0
        };
        let lead_key: Vec<i64> = if uni { vec![mh, k] } else { vec![mh] };
        let c = this.terms[&lead_key].clone();
        let cinv = c.inv()?;
        let neg_lead: Vec<i64> = lead_key.iter().map(|x| -x).collect();
        // e = self / lead - 1
        let normed = this.shift_monomial(neg_lead[0], &neg_lead[1..], &cinv)?;
        let one = HSeries::one(&normed.shape());
        let e = normed.sub(&one)?;
        for key in e.terms.keys() {
            if key[0] < 0 {
                return Err(Error::NotInvertible("negative h order after normalization".into()));
            }
            if uni && key[0] == 0 && key[1] <= 0 {
                return Err(Error::NotInvertible("leading coefficient not isolated".into()));
            }
        }
        // Every term of e has weight A h + u >= 1, so e^n only reaches the
        // box for n below the box's largest weight.
        // when e has no h dependence its powers stay at h^0
        let h_free = e.dims[0].ceil <= 0;
        let hg = if h_free { 0 } else { normed.dims[0].hi.max(0) };
        let (fmin, a_w, ug, uint) = if uni {
            let ed = e.dims[1];
            let fmin = ed.floor.min(0);
            if fmin == -INF {
                return Err(Error::NotInvertible("spectral floor is unbounded below".into()));
            }
            let mut ug = normed.dims[1].hi;
            if ed.top_err() {
                ug = ug.min(ed.hi + hg * fmin);
            }
            (fmin, (1 - fmin).max(1), ug, ug - hg * fmin)
        } else {
            (0, 1, 0, 0)
        };
        let nmax = (a_w * hg + ug.max(0)).max(0);
        let in_int = |k: &[i64]| k[0] <= hg && (!uni || k[1] <= uint);
        let mut g: BTreeMap<Vec<i64>, Scalar> = BTreeMap::new();
        g.insert(if uni { vec![0, 0] } else { vec![0] }, Scalar::one(self.mode));
        let neg_e: Vec<(Vec<i64>, Scalar)> = e.terms.iter().map(|(k, v)| (k.clone(), v.neg())).collect();
        let mut p = g.clone();
        for _ in 0..nmax {
            let mut next: BTreeMap<Vec<i64>, Scalar> = BTreeMap::new();
            for (ka, va) in &p {
                for (kb, vb) in &neg_e {
                    let k: Vec<i64> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
                    if !in_int(&k) {
                        continue;
                    }
                    let t = va.mul(vb)?;
                    match next.get_mut(&k) {
                        Some(x) => *x = x.add(&t)?,
                        None => {
                            next.insert(k, t);
                        }
                    }
                }
            }
            next.retain(|_, v| !v.is_zero());
            if next.is_empty() {
                break;
            }
            for (k, v) in &next {
                match g.get_mut(k) {
                    Some(x) => *x = x.add(v)?,
                    None => {
                        g.insert(k.clone(), v.clone());
                    }
                }
            }
            p = next;
        }
        let e_zero = e.terms.is_empty();
        let h_hi = normed.dims[0].hi.max(0);
        let mut dims = vec![Dim::new(normed.dims[0].lo.min(0), h_hi, 0, if e_zero || h_free { 0 } else { INF })];
        if uni {
            dims.push(Dim::new(normed.dims[1].lo.min(0), ug, hg * fmin, if e_zero { 0 } else { INF }));
        }
        let mut out = HSeries::raw(self.vars.clone(), self.mode, dims);
        for (k, v) in g {
            if !v.is_zero() && out.in_box(&dim_values(&k)) {
                out.terms.insert(k, v);
            }
        }
        out.shift_monomial(neg_lead[0], &neg_lead[1..], &cinv)
    }

    /// d/d(var k), term by term.
    pub fn derive(&self, k: usize) -> Result<HSeries> {
        if k >= self.vars.len() {
            return Err(Error::Shape(format!("no variable {k}")));
        }
        let mut dims = self.dims.clone();
        for d in dims.iter_mut().take(k + 2).skip(1) {
            *d = d.shifted(-1);
        }
        let mut out = HSeries::raw(self.vars.clone(), self.mode, dims);
        for (key, v) in &self.terms {
            let e = key[k + 1];
            if e == 0 {
                continue;
            }
            let mut nk = key.clone();
            nk[k + 1] -= 1;
            out.terms.insert(nk, v.mul(&Scalar::int(self.mode, e))?);
        }
        Ok(out)
    }

    pub fn derive_var(&self, name: &str) -> Result<HSeries> {
        let k = self
            .vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::Shape(format!("no variable {name}")))?;
        self.derive(k)
    }

    /// Places a univariate series into `vars` as a function of `vars[pos]`.
    /// `boxes` gives the suffix-sum boxes of the result (h box is kept).
    pub fn embed(&self, vars: &[&str], pos: usize, boxes: &[(i64, i64)]) -> Result<HSeries> {
        if self.vars.len() != 1 {
            return Err(Error::Shape("embed needs a univariate series".into()));
        }
        let n = vars.len();
        let t = self.dims[1];
        let mut dims = vec![self.dims[0]];
        for j in 0..n {
            let (lo, hi) = boxes[j];
            if j <= pos {
                dims.push(Dim::new(lo.max(t.lo), hi.min(t.hi), t.floor, t.ceil));
            } else {
                let (f, c) = if self.terms.is_empty() && t.floor == INF { (INF, -INF) } else { (0, 0) };
                dims.push(Dim::new(lo, hi, f, c));
            }
        }
        let mut out = HSeries::raw(Arc::new(vars.iter().map(|s| s.to_string()).collect()), self.mode, dims);
        for (key, v) in &self.terms {
            let mut nk = vec![0; n + 1];
            nk[0] = key[0];
            nk[pos + 1] = key[1];
            if out.in_box(&dim_values(&nk)) {
                out.terms.insert(nk, v.clone());
            }
        }
        Ok(out)
    }

    /// f(t) ↦ f(u ± v) in k((u))((v)), with v-order up to `v_order`.
    pub fn shift_expand(&self, plus: bool, names: (&str, &str), v_order: i64) -> Result<HSeries> {
        if self.vars.len() != 1 {
            return Err(Error::Shape("shift_expand needs a univariate series".into()));
        }
        if v_order < 0 {
            return Err(Error::Window(format!("v order {v_order} < 0")));
        }
        let t = self.dims[1];
        let poly = t.floor >= 0 && t.ceil < INF;
        let empty = self.terms.is_empty() && t.floor == INF;
        let v_dim = Dim::new(
            t.lo.min(0),
            v_order,
            if empty { INF } else { 0 },
            if empty { -INF } else if poly { t.ceil.max(0) } else { INF },
        );
        let dims = vec![self.dims[0], t, v_dim];
        let mut out = HSeries::raw(Arc::new(vec![names.0.to_string(), names.1.to_string()]), self.mode, dims);
        for (key, v) in &self.terms {
            let k = key[1];
            let mmax = if k >= 0 { k.min(v_order) } else { v_order };
            for m in 0..=mmax {
                let mut b = binom_rat(k, m);
                if !plus && m % 2 == 1 {
                    b = -b;
                }
                let c = match self.mode {
                    Mode::Exact => v.mul(&Scalar::rational(b))?,
                    Mode::Approx => v.mul(&Scalar::complex(num_traits::ToPrimitive::to_f64(&b).unwrap(), 0.0))?,
                };
                let nk = vec![key[0], k - m, m];
                match out.terms.get_mut(&nk) {
                    Some(e) => *e = e.add(&c)?,
                    None => {
                        out.terms.insert(nk, c);
                    }
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// f(u) ↦ f(u + c·h) for a univariate series, re-expanded in h.
    pub fn shift_h(&self, c: &Scalar) -> Result<HSeries> {
        if self.vars.len() != 1 {
            return Err(Error::Shape("shift_h needs a univariate series".into()));
        }
        if c.mode() != self.mode {
            return Err(Error::ModeMismatch);
        }
        let hd = self.dims[0];
        let ud = self.dims[1];
        if hd.bot_err() {
            return Err(Error::Window("h truncation below the box blocks the h shift".into()));
        }
        let span = if hd.floor == INF { 0 } else { (hd.hi - hd.floor).max(0) };
        let mut nu = ud;
        if ud.top_err() {
            nu.hi = sadd(ud.hi, -span);
        }
        if ud.floor != INF {
            // (u + ch)^k with k ≥ 0 never goes below u^0
            nu.floor = if ud.floor >= 0 { sadd(ud.floor, -span).max(0) } else { sadd(ud.floor, -span) };
        }
        let mut nh = hd;
        let poly = ud.floor >= 0 && ud.ceil < INF;
        if hd.ceil != -INF {
            nh.ceil = if poly { sadd(hd.ceil, ud.ceil) } else { INF };
        }
        let mut out = HSeries::raw(self.vars.clone(), self.mode, vec![nh, nu]);
        for (key, v) in &self.terms {
            let (j, k) = (key[0], key[1]);
            let mut cp = Scalar::one(self.mode);
            let mut m = 0i64;
            loop {
                if j + m > nh.hi {
                    break;
                }
                if k >= 0 && m > k {
                    break;
                }
                let b = binom_rat(k, m);
                let bs = match self.mode {
                    Mode::Exact => Scalar::rational(b),
                    Mode::Approx => Scalar::complex(num_traits::ToPrimitive::to_f64(&b).unwrap(), 0.0),
                };
                let term = v.mul(&bs)?.mul(&cp)?;
                let nk = vec![j + m, k - m];
                if out.in_box(&dim_values(&nk)) {
                    match out.terms.get_mut(&nk) {
                        Some(e) => *e = e.add(&term)?,
                        None => {
                            out.terms.insert(nk, term);
                        }
                    }
                }
                cp = cp.mul(c)?;
                m += 1;
            }
        }
        out.prune();
        Ok(out)
    }

    /// Substitutes u = c·h into a univariate series; the result has no spectral variables.
    pub fn subst_h(&self, c: &Scalar, h_box: (i64, i64)) -> Result<HSeries> {
        if self.vars.len() != 1 {
            return Err(Error::Shape("subst_h needs a univariate series".into()));
        }
        let hd = self.dims[0];
        let ud = self.dims[1];
        if ud.floor == -INF {
            return Err(Error::Window("u support unbounded below".into()));
        }
        let floor = sadd(hd.floor, ud.floor);
        let ceil = if hd.ceil == -INF || ud.ceil == -INF { -INF } else { sadd(hd.ceil, ud.ceil) };
        let mut hi = h_box.1;
        if hd.top_err() {
            // h^e collects u^k h^{e-k} with k >= floor(u)
            hi = hi.min(sadd(hd.hi, ud.floor));
        }
        if ud.top_err() {
            hi = hi.min(sadd(ud.hi, hd.floor));
        }
        let mut lo = h_box.0;
        if ud.bot_err() {
            lo = lo.max(sadd(ud.lo, hd.ceil));
        }
        let mut out = HSeries::raw(Arc::new(vec![]), self.mode, vec![Dim::new(lo, hi, floor, ceil)]);
        let mut pw: BTreeMap<i64, Scalar> = BTreeMap::new();
        for (key, v) in &self.terms {
            let e = key[0] + key[1];
            if !(lo..=hi).contains(&e) {
                continue;
            }
            let cp = match pw.get(&key[1]) {
                Some(x) => x.clone(),
                None => {
                    let x = pow_scalar(c, key[1])?;
                    pw.insert(key[1], x.clone());
                    x
                }
            };
            let term = v.mul(&cp)?;
            match out.terms.get_mut(&vec![e]) {
                Some(x) => *x = x.add(&term)?,
                None => {
                    out.terms.insert(vec![e], term);
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Substitutes var k ↦ c·var k.
    pub fn scale_var(&self, k: usize, c: &Scalar) -> Result<HSeries> {
        let mut out = self.clone();
        for (key, v) in out.terms.iter_mut() {
            *v = v.mul(&pow_scalar(c, key[k + 1])?)?;
        }
        out.prune();
        Ok(out)
    }

    /// Re-reads a series in h only as a univariate series (h box kept).
    pub fn lift_uni(&self, var: &str, win: (i64, i64)) -> Result<HSeries> {
        if !self.vars.is_empty() {
            return Err(Error::Shape("lift_uni needs an h-only series".into()));
        }
        let mut out = HSeries::raw(
            Arc::new(vec![var.to_string()]),
            self.mode,
            vec![self.dims[0], Dim::new(win.0, win.1, if self.terms.is_empty() { INF } else { 0 }, if self.terms.is_empty() { -INF } else { 0 })],
        );
        for (k, v) in &self.terms {
            out.terms.insert(vec![k[0], 0], v.clone());
        }
        Ok(out)
    }

    /// Numeric value of the retained terms.
    pub fn eval(&self, point: &[Complex64], h: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, v) in &self.terms {
            let mut t = v.to_complex() * h.powi(k[0] as i32);
            for (x, e) in point.iter().zip(&k[1..]) {
                t *= x.powi(*e as i32);
            }
            acc += t;
        }
        acc
    }

    /// Coefficientwise equality on the common box.
    pub fn eq_on_window(&self, o: &HSeries) -> Result<bool> {
        Ok(self.sub(o)?.is_zero())
    }

    /// Largest coefficient magnitude (0 for the zero series).
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<HSeries> {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = f(v)?;
        }
        out.prune();
        Ok(out)
    }

    /// Converts exact coefficients to complex doubles.
    pub fn to_approx(&self) -> HSeries {
        let mut out = self.clone();
        out.mode = Mode::Approx;
        for v in out.terms.values_mut() {
            *v = Scalar::Approx(v.to_complex());
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .terms
            .iter()
            .map(|(k, v)| json!([k[0], k[1..].to_vec(), v.to_json()]))
            .collect();
        let bound = |x: i64| if x >= INF { json!("inf") } else if x <= -INF { json!("-inf") } else { json!(x) };
        json!({
            "var_names": self.vars.as_ref(),
            "mode": self.mode,
            "h_order": self.dims[0].hi,
            "h_window": [self.dims[0].lo, self.dims[0].hi],
            "windows": self.dims[1..].iter().map(|d| json!([d.lo, d.hi])).collect::<Vec<_>>(),
            "support": self.dims.iter().map(|d| json!([bound(d.floor), bound(d.ceil)])).collect::<Vec<_>>(),
            "entries": entries,
        })
    }

    pub fn from_json(v: &Value) -> Result<HSeries> {
        let p = |m: &str| Error::Parse(m.to_string());
        let vars: Vec<String> = serde_json::from_value(v["var_names"].clone()).map_err(|_| p("var_names"))?;
        let mode: Mode = serde_json::from_value(v["mode"].clone()).unwrap_or(Mode::Exact);
        let hw: (i64, i64) = serde_json::from_value(v["h_window"].clone())
            .or_else(|_| v["h_order"].as_i64().map(|h| (0, h)).ok_or(()))
            .map_err(|_| p("h window"))?;
        let wins: Vec<(i64, i64)> = serde_json::from_value(v["windows"].clone()).map_err(|_| p("windows"))?;
        if wins.len() != vars.len() {
            return Err(p("windows length"));
        }
        let bnd = |x: &Value| -> Result<i64> {
            match x {
                Value::String(s) if s == "inf" => Ok(INF),
                Value::String(s) if s == "-inf" => Ok(-INF),
                _ => x.as_i64().ok_or_else(|| p("support")),
            }
        };
        let mut dims: Vec<Dim> = std::iter::once(hw).chain(wins).map(|(lo, hi)| Dim::empty(lo, hi)).collect();
        if let Some(sup) = v["support"].as_array() {
            for (d, s) in dims.iter_mut().zip(sup) {
                d.floor = bnd(&s[0])?;
                d.ceil = bnd(&s[1])?;
            }
        }
        let mut out = HSeries::raw(Arc::new(vars), mode, dims);
        for e in v["entries"].as_array().ok_or_else(|| p("entries"))? {
            let h = e[0].as_i64().ok_or_else(|| p("h exponent"))?;
            let ex: Vec<i64> = serde_json::from_value(e[1].clone()).map_err(|_| p("exponents"))?;
            let mut k = vec![h];
            k.extend(ex);
            let s = Scalar::from_json(&e[2])?;
            if s.mode() != mode {
                return Err(Error::ModeMismatch);
            }
            out.terms.insert(k, s);
        }
        if v["support"].is_null() {
            // without support data assume the entries are the whole series
            let keys: Vec<Vec<i64>> = out.terms.keys().cloned().collect();
            for k in keys {
                for (d, x) in out.dims.iter_mut().zip(dim_values(&k)) {
                    d.floor = d.floor.min(x);
                    d.ceil = d.ceil.max(x);
                }
            }
        }
        out.prune();
        Ok(out)
    }
}

pub fn pow_scalar(c: &Scalar, k: i64) -> Result<Scalar> {
    match c {
        Scalar::Exact(x) => Ok(Scalar::Exact(x.pow(k)?)),
        Scalar::Approx(z) => {
            if k < 0 && z.norm() == 0.0 {
                return Err(Error::NotInvertible("zero to a negative power".into()));
            }
            Ok(Scalar::Approx(z.powi(k as i32)))
        }
    }
}

/// Truncated exp(c·u) = Σ_{m ≤ order} (c u)^m / m! as a univariate series.
pub fn exp_series(shape: &Shape, c: &Scalar, order: i64) -> Result<HSeries> {
    let mut terms = Vec::new();
    let mut fact = BigInt::one();
    let mut cp = Scalar::one(shape.mode);
    for m in 0..=order {
        if m > 0 {
            fact *= BigInt::from(m);
            cp = cp.mul(c)?;
        }
        let inv = match shape.mode {
            Mode::Exact => Scalar::rational(BigRational::new(BigInt::one(), fact.clone())),
            Mode::Approx => Scalar::complex(1.0 / num_traits::ToPrimitive::to_f64(&fact).unwrap(), 0.0),
        };
        terms.push((vec![0, m], cp.mul(&inv)?));
    }
    let s = HSeries::from_terms(shape, terms)?;
    let ceil = if c.is_zero() { 0 } else { INF };
    let mut s = s.with_support(1, 0, ceil);
    if !c.is_zero() {
        // known only up to the requested order
        s.dims[1].hi = s.dims[1].hi.min(order);
    }
    Ok(s)
}

impl PartialEq for HSeries {
    fn eq(&self, o: &Self) -> bool {
        self.vars == o.vars && self.mode == o.mode && self.dims == o.dims && self.terms == o.terms
    }
}
