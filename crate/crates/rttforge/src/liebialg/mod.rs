//! Truncated models of the Lie bialgebra g(r) and its multi-point version.
//!
//! `LBasis { site, m, row, col }` is the u^m coefficient of ⟨E_{row,col} ⊗ 1, τ_site(u)⟩,
//! the element E_{row,col}·s^{m+1} of s·g[s] with s = t^{-1}. Elements are stored by
//! matrix entries; for sl every coefficient matrix is projected to trace zero.

pub mod beta;
pub mod checks;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rmatrix::classical::{coefficient, lift_scalar};
use crate::rmatrix::{Algebra, ClassicalR, Family, RMatrixSpec};
use crate::series::{pow_scalar, Mode, Scalar};
use crate::tensor::{SpecialElements, TensorOp};

/// Binomial coefficient, with k allowed negative.
pub fn gbinom(k: i64, j: i64) -> i64 {
    if j < 0 {
        return 0;
    }
    if k >= 0 {
        if j > k {
            return 0;
        }
        let mut out: i64 = 1;
        for t in 0..j {
            out = out * (k - t) / (t + 1);
        }
        out
    } else {
        let s = if j % 2 == 0 { 1 } else { -1 };
        s * gbinom(-k + j - 1, j)
    }
}

pub(crate) fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn near_zero(s: &Scalar) -> bool {
    match s {
        Scalar::Exact(_) => s.is_zero(),
        Scalar::Approx(z) => z.norm() < 1e-12,
    }
}

/// Marked points z_1..z_n with the r-matrix they are attached to.
#[derive(Clone, Debug)]
pub struct PunctureConfig {
    pub spec: RMatrixSpec,
    pub z: Vec<Scalar>,
}

impl PunctureConfig {
    pub fn new(spec: RMatrixSpec, z: Vec<Scalar>) -> Result<PunctureConfig> {
        spec.validate()?;
        if z.is_empty() {
            return Err(Error::Spec("need at least one marked point".into()));
        }
        let mode = spec.mode();
        let z: Vec<Scalar> = z.iter().map(|s| lift_scalar(mode, s)).collect();
        for i in 0..z.len() {
            for j in i + 1..z.len() {
                let d = z[i].sub(&z[j])?;
                if near_zero(&d) {
                    return Err(Error::Spec(format!("z_{} = z_{}", i + 1, j + 1)));
                }
                if spec.family == Family::Elliptic {
                    // z_i − z_j must avoid the pole lattice Γ = (Z + τZ)/N
                    let w = d.to_complex() * spec.n as f64;
                    let b = (w.im / spec.tau.im).round();
                    let a = (w.re - b * spec.tau.re).round();
                    if (w - (spec.tau * b + a)).norm() < 1e-9 {
                        return Err(Error::Spec(format!("z_{} - z_{} lies on a pole of r", i + 1, j + 1)));
                    }
                }
            }
        }
        Ok(PunctureConfig { spec, z })
    }

    pub fn single(spec: RMatrixSpec) -> PunctureConfig {
        let z = vec![Scalar::zero(spec.mode())];
        PunctureConfig { spec, z }
    }

    pub fn sites(&self) -> usize {
        self.z.len()
    }

    pub fn diff(&self, i: usize, j: usize) -> Result<Scalar> {
        self.z[i].sub(&self.z[j])
    }

    /// `{"r": {...spec...}, "z": [..]}`.
    pub fn from_json(v: &Value) -> Result<PunctureConfig> {
        let spec = RMatrixSpec::from_json(v.get("r").unwrap_or(v))?;
        match v.get("z").and_then(|z| z.as_array()) {
            Some(zs) => PunctureConfig::new(spec, zs.iter().map(Scalar::from_json).collect::<Result<_>>()?),
            None => Ok(PunctureConfig::single(spec)),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"r": self.spec.to_json(), "z": self.z.iter().map(|s| s.to_json()).collect::<Vec<_>>()})
    }
}

/// Laurent (same site) or Taylor (different sites) coefficients of r(w + z_i − z_j) in w.
#[derive(Clone, Debug)]
pub struct RExpansion {
    pub kmin: i64,
    pub coeffs: Vec<TensorOp<Scalar>>,
}

impl RExpansion {
    pub fn get(&self, k: i64) -> Option<&TensorOp<Scalar>> {
        if k < self.kmin {
            return None;
        }
        self.coeffs.get((k - self.kmin) as usize)
    }

    pub fn kmax(&self) -> i64 {
        self.kmin + self.coeffs.len() as i64 - 1
    }

    pub fn powers(&self) -> impl Iterator<Item = (i64, &TensorOp<Scalar>)> {
        self.coeffs.iter().enumerate().map(move |(i, m)| (self.kmin + i as i64, m))
    }

    fn scaled(&self, eps: &Scalar) -> Result<RExpansion> {
        let coeffs = self
            .powers()
            .map(|(k, m)| if k >= 0 { m.scale(&pow_scalar(eps, k + 1)?) } else { Ok(m.clone()) })
            .collect::<Result<_>>()?;
        Ok(RExpansion { kmin: self.kmin, coeffs })
    }
}

/// The Casimir matching the spec's r, in the spec's mode.
pub fn casimir(spec: &RMatrixSpec) -> Result<TensorOp<Scalar>> {
    let sp = SpecialElements::new(spec.n);
    let om = if spec.family == Family::Yang && spec.algebra == Algebra::Gl { sp.omega_gl } else { sp.omega_sl };
    let mode = spec.mode();
    om.map(|s| Ok(lift_scalar(mode, s)))
}

pub fn algebra_of(spec: &RMatrixSpec) -> Algebra {
    if spec.family == Family::Yang {
        spec.algebra
    } else {
        Algebra::Sl
    }
}

/// Coefficients of r(w + z_i − z_j) up to w^order.
pub fn expansion(cfg: &PunctureConfig, i: usize, j: usize, order: i64) -> Result<RExpansion> {
    let spec = &cfg.spec;
    let om = casimir(spec)?;
    if i == j {
        let cl = ClassicalR::make(&spec.clone().with_window(0, (-1, order)))?;
        let coeffs = (-1..=order).map(|k| coefficient(&cl.series, k)).collect::<Result<Vec<_>>>()?;
        let gap = coeffs[0].sub(&om)?;
        let ok = match spec.mode() {
            Mode::Exact => gap.is_zero(),
            Mode::Approx => gap.entries().values().all(|v| v.abs() < 1e-9),
        };
        if !ok {
            return Err(Error::Cancellation("residue of r is not the Casimir".into()));
        }
        return Ok(RExpansion { kmin: -1, coeffs });
    }
    match spec.family {
        Family::Yang | Family::Rational => {
            let z = cfg.diff(i, j)?;
            let coeffs = (0..=order)
                .map(|k| {
                    let c = pow_scalar(&z, -(k + 1))?.mul(&Scalar::int(spec.mode(), sign(k)))?;
                    om.scale(&c)
                })
                .collect::<Result<_>>()?;
            Ok(RExpansion { kmin: 0, coeffs })
        }
        _ => Err(Error::Spec("cross-site expansion needs a rational r (yang or rational family)".into())),
    }
}

fn unit_mat(n: usize, p: usize, q: usize, mode: Mode) -> TensorOp<Scalar> {
    let mut m = TensorOp::zero(n, 1);
    m.add_entry(p, q, Scalar::one(mode)).expect("unit");
    m
}

/// Σ_c ⟨Z, B_c⟩ A_c for M = Σ_c A_c ⊗ B_c, with ⟨X, Y⟩ = N tr(XY).
pub fn contract_right(m: &TensorOp<Scalar>, z: &TensorOp<Scalar>) -> Result<TensorOp<Scalar>> {
    let n = m.n();
    let nn = Scalar::int(Mode::Exact, n as i64);
    let mut out = TensorOp::zero(n, 1);
    for (&(row, col), v) in m.entries() {
        let (p, r, q, s) = (row / n, row % n, col / n, col % n);
        if let Some(w) = z.get(s, r) {
            out.add_entry(p, q, v.mul(w)?.mul(&lift_scalar(v.mode(), &nn))?)?;
        }
    }
    out.prune();
    Ok(out)
}

/// Σ_c ⟨Y, A_c⟩ B_c.
pub fn contract_left(m: &TensorOp<Scalar>, y: &TensorOp<Scalar>) -> Result<TensorOp<Scalar>> {
    let n = m.n();
    let nn = Scalar::int(Mode::Exact, n as i64);
    let mut out = TensorOp::zero(n, 1);
    for (&(row, col), v) in m.entries() {
        let (p, r, q, s) = (row / n, row % n, col / n, col % n);
        if let Some(w) = y.get(q, p) {
            out.add_entry(r, s, v.mul(w)?.mul(&lift_scalar(v.mode(), &nn))?)?;
        }
    }
    out.prune();
    Ok(out)
}

/// ⟨M, E_pq ⊗ E_rs⟩ = N² M[(q,s),(p,r)].
pub fn pair_units(m: &TensorOp<Scalar>, p: usize, q: usize, r: usize, s: usize) -> Result<Scalar> {
    let n = m.n();
    match m.get(q * n + s, p * n + r) {
        Some(v) => v.mul(&Scalar::int(v.mode(), (n * n) as i64)),
        None => Ok(Scalar::zero(Mode::Exact)),
    }
}

/// N tr(XY) in the given mode.
pub fn trace_form(x: &TensorOp<Scalar>, y: &TensorOp<Scalar>, mode: Mode) -> Result<Scalar> {
    let mut acc = Scalar::zero(mode);
    for (&(i, j), a) in x.entries() {
        if let Some(b) = y.get(j, i) {
            acc = acc.add(&a.mul(b)?)?;
        }
    }
    acc.mul(&Scalar::int(mode, x.n() as i64))
}

pub fn commutator(a: &TensorOp<Scalar>, b: &TensorOp<Scalar>) -> Result<TensorOp<Scalar>> {
    let mut c = a.mul(b)?.sub(&b.mul(a)?)?;
    c.prune();
    Ok(c)
}

/// Drops the trace for sl.
pub fn project(alg: Algebra, w: &TensorOp<Scalar>, mode: Mode) -> Result<TensorOp<Scalar>> {
    if alg == Algebra::Gl {
        return Ok(w.clone());
    }
    let n = w.n();
    let mut tr = Scalar::zero(mode);
    for i in 0..n {
        if let Some(v) = w.get(i, i) {
            tr = tr.add(v)?;
        }
    }
    if tr.is_zero() {
        return Ok(w.clone());
    }
    let c = tr.scale_frac(1, n as i64);
    let mut out = w.sub(&TensorOp::identity(n, 1, &c))?;
    out.prune();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LBasis {
    pub site: usize,
    pub m: usize,
    pub row: usize,
    pub col: usize,
}

impl LBasis {
    pub fn new(site: usize, m: usize, row: usize, col: usize) -> LBasis {
        LBasis { site, m, row, col }
    }
}

fn add_into<K: Ord + Clone>(map: &mut BTreeMap<K, Scalar>, k: K, c: Scalar) -> Result<()> {
    if c.is_zero() {
        return Ok(());
    }
    match map.get_mut(&k) {
        Some(v) => {
            *v = v.add(&c)?;
            if v.is_zero() {
                map.remove(&k);
            }
        }
        None => {
            map.insert(k, c);
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct LoopElement {
    pub coords: BTreeMap<LBasis, Scalar>,
}

impl LoopElement {
    pub fn zero() -> LoopElement {
        LoopElement::default()
    }

    pub fn add_coord(&mut self, b: LBasis, c: Scalar) -> Result<()> {
        add_into(&mut self.coords, b, c)
    }

    pub fn add(&self, o: &LoopElement) -> Result<LoopElement> {
        let mut out = self.clone();
        for (b, c) in &o.coords {
            out.add_coord(*b, c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Result<LoopElement> {
        let mut out = LoopElement::zero();
        for (b, v) in &self.coords {
            out.add_coord(*b, v.mul(c)?)?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> LoopElement {
        LoopElement { coords: self.coords.iter().map(|(b, v)| (*b, v.neg())).collect() }
    }

    pub fn sub(&self, o: &LoopElement) -> Result<LoopElement> {
        self.add(&o.neg())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.values().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn max_m(&self) -> Option<usize> {
        self.coords.keys().map(|b| b.m).max()
    }

    /// Coefficient matrix at (site, m).
    pub fn matrix(&self, site: usize, m: usize, n: usize) -> TensorOp<Scalar> {
        let mut out = TensorOp::zero(n, 1);
        for (b, v) in &self.coords {
            if b.site == site && b.m == m {
                out.add_entry(b.row, b.col, v.clone()).expect("matrix");
            }
        }
        out
    }

    /// The (site, m) pairs present.
    pub fn slots(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = self.coords.keys().map(|b| (b.site, b.m)).collect();
        v.dedup();
        v.sort();
        v.dedup();
        v
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.coords
                .iter()
                .map(|(b, v)| json!({"site": b.site + 1, "m": b.m, "row": b.row, "col": b.col, "c": v.to_json()}))
                .collect(),
        )
    }
}

/// Elements of the k-fold tensor power, keyed by basis words.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LoopTensor {
    pub coords: BTreeMap<Vec<LBasis>, Scalar>,
}

impl LoopTensor {
    pub fn zero() -> LoopTensor {
        LoopTensor::default()
    }

    pub fn add_term(&mut self, k: Vec<LBasis>, c: Scalar) -> Result<()> {
        add_into(&mut self.coords, k, c)
    }

    pub fn add(&self, o: &LoopTensor) -> Result<LoopTensor> {
        let mut out = self.clone();
        for (k, c) in &o.coords {
            out.add_term(k.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> LoopTensor {
        LoopTensor { coords: self.coords.iter().map(|(k, v)| (k.clone(), v.neg())).collect() }
    }

    pub fn sub(&self, o: &LoopTensor) -> Result<LoopTensor> {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Result<LoopTensor> {
        let mut out = LoopTensor::zero();
        for (k, v) in &self.coords {
            out.add_term(k.clone(), v.mul(c)?)?;
        }
        Ok(out)
    }

    pub fn outer(a: &LoopElement, b: &LoopElement) -> Result<LoopTensor> {
        let mut out = LoopTensor::zero();
        for (x, u) in &a.coords {
            for (y, v) in &b.coords {
                out.add_term(vec![*x, *y], u.mul(v)?)?;
            }
        }
        Ok(out)
    }

    /// Slot `out[i] = key[perm[i]]`.
    pub fn permute(&self, perm: &[usize]) -> Result<LoopTensor> {
        let mut out = LoopTensor::zero();
        for (k, v) in &self.coords {
            out.add_term(perm.iter().map(|&p| k[p]).collect(), v.clone())?;
        }
        Ok(out)
    }

    /// Applies a linear map to slot `slot`, which may produce several factors.
    pub fn apply_slot(&self, slot: usize, f: impl Fn(LBasis) -> Result<LoopTensor>) -> Result<LoopTensor> {
        let mut out = LoopTensor::zero();
        for (k, v) in &self.coords {
            let img = f(k[slot])?;
            for (w, c) in &img.coords {
                let mut key = k[..slot].to_vec();
                key.extend_from_slice(w);
                key.extend_from_slice(&k[slot + 1..]);
                out.add_term(key, v.mul(c)?)?;
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.values().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

impl From<&LoopElement> for LoopTensor {
    fn from(x: &LoopElement) -> LoopTensor {
        LoopTensor { coords: x.coords.iter().map(|(b, v)| (vec![*b], v.clone())).collect() }
    }
}

/// A generator t_{site, row col, tdeg} of the classical limit, T(u) = 1 + Σ t_ℓ u^ℓ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TLabel {
    pub site: usize,
    pub row: usize,
    pub col: usize,
    pub tdeg: usize,
}

/// g(r) or its multi-point version, truncated to modes 0..l at every site.
#[derive(Debug)]
pub struct LieModel {
    pub cfg: PunctureConfig,
    pub n: usize,
    pub algebra: Algebra,
    pub mode: Mode,
    pub l: usize,
    /// Highest power of w kept in the expansions of r.
    pub order: i64,
    exps: Vec<Vec<RExpansion>>,
    cache: RwLock<HashMap<(LBasis, LBasis), Arc<LoopElement>>>,
}

impl LieModel {
    pub fn new(cfg: PunctureConfig, l: usize) -> Result<LieModel> {
        LieModel::with_order(cfg, l, 4 * l as i64 + 4)
    }

    pub fn with_order(cfg: PunctureConfig, l: usize, order: i64) -> Result<LieModel> {
        let k = cfg.sites();
        let mut exps = Vec::with_capacity(k);
        for i in 0..k {
            let mut row = Vec::with_capacity(k);
            for j in 0..k {
                row.push(expansion(&cfg, i, j, order)?);
            }
            exps.push(row);
        }
        Ok(LieModel {
            n: cfg.spec.n,
            algebra: algebra_of(&cfg.spec),
            mode: cfg.spec.mode(),
            l,
            order,
            cfg,
            exps,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn sites(&self) -> usize {
        self.cfg.sites()
    }

    pub fn expansion(&self, i: usize, j: usize) -> &RExpansion {
        &self.exps[i][j]
    }

    /// Same model with the regular coefficients M_k scaled by ε^{k+1}.
    pub fn scaled(&self, eps: &Scalar) -> Result<LieModel> {
        let eps = lift_scalar(self.mode, eps);
        let exps = self.exps.iter().map(|row| row.iter().map(|e| e.scaled(&eps)).collect::<Result<_>>()).collect::<Result<_>>()?;
        Ok(LieModel {
            cfg: self.cfg.clone(),
            n: self.n,
            algebra: self.algebra,
            mode: self.mode,
            l: self.l,
            order: self.order,
            exps,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn unit(&self, p: usize, q: usize) -> TensorOp<Scalar> {
        unit_mat(self.n, p, q, self.mode)
    }

    /// x_{site, m}(W), with W projected for sl.
    pub fn element(&self, site: usize, m: usize, w: &TensorOp<Scalar>) -> Result<LoopElement> {
        let w = project(self.algebra, &w.map(|s| Ok(lift_scalar(self.mode, s)))?, self.mode)?;
        let mut out = LoopElement::zero();
        for (&(r, c), v) in w.entries() {
            out.add_coord(LBasis::new(site, m, r, c), v.clone())?;
        }
        Ok(out)
    }

    /// Spanning set of the truncated model: x_{site,m}(E_pq), projected.
    pub fn basis(&self) -> Vec<LBasis> {
        let mut out = Vec::new();
        for site in 0..self.sites() {
            for m in 0..self.l {
                for p in 0..self.n {
                    for q in 0..self.n {
                        if self.algebra == Algebra::Sl && p == q && p + 1 == self.n {
                            continue;
                        }
                        out.push(LBasis::new(site, m, p, q));
                    }
                }
            }
        }
        out
    }

    /// The basis vector as an element (projected for sl).
    pub fn basis_element(&self, b: LBasis) -> Result<LoopElement> {
        self.element(b.site, b.m, &self.unit(b.row, b.col))
    }

    /// Coefficient of u^a v^b of [r12(u − v), τ13(u) + τ23(v)] at the pole k = −1, with
    /// (u − v)^{-1} = Σ_m v^m u^{-m-1}. `a` may be negative.
    pub fn pole_part(&self, site: usize, a: i64, b: i64, y: &TensorOp<Scalar>, z: &TensorOp<Scalar>) -> Result<LoopElement> {
        let om = self.exps[site][site].get(-1).expect("pole");
        let mut out = LoopElement::zero();
        if b >= 0 && a + b + 1 >= 0 {
            let w = commutator(y, &contract_right(om, z)?)?;
            out = out.add(&self.element(site, (a + b + 1) as usize, &w)?)?;
        }
        if a <= -1 && a + b + 1 >= 0 {
            let w = commutator(z, &contract_left(om, y)?)?;
            out = out.add(&self.element(site, (a + b + 1) as usize, &w)?)?;
        }
        Ok(out)
    }

    /// [x_{i,a}(E_pq), x_{j,b}(E_rs)] without truncation.
    pub fn structure(&self, bx: LBasis, by: LBasis) -> Result<Arc<LoopElement>> {
        if let Some(v) = self.cache.read().expect("cache").get(&(bx, by)) {
            return Ok(v.clone());
        }
        let (i, a, j, b) = (bx.site, bx.m as i64, by.site, by.m as i64);
        let y = self.unit(bx.row, bx.col);
        let z = self.unit(by.row, by.col);
        let e = &self.exps[i][j];
        if a + b > e.kmax() {
            return Err(Error::Window(format!("bracket of modes {a}, {b} needs r to order {}, have {}", a + b, e.kmax())));
        }
        let mut out = if i == j { self.pole_part(i, a, b, &y, &z)? } else { LoopElement::zero() };
        for (k, mk) in e.powers() {
            if k < 0 || k > a + b || mk.is_zero() {
                continue;
            }
            let m = (a + b - k) as usize;
            if k >= b {
                let c = Scalar::int(self.mode, gbinom(k, b) * sign(b));
                let w = commutator(&y, &contract_right(mk, &z)?)?;
                out = out.add(&self.element(i, m, &w)?.scale(&c)?)?;
            }
            if k >= a {
                let c = Scalar::int(self.mode, gbinom(k, a) * sign(k - a));
                let w = commutator(&z, &contract_left(mk, &y)?)?;
                out = out.add(&self.element(j, m, &w)?.scale(&c)?)?;
            }
        }
        let out = Arc::new(out);
        self.cache.write().expect("cache").insert((bx, by), out.clone());
        Ok(out)
    }

    pub fn bracket_full(&self, x: &LoopElement, y: &LoopElement) -> Result<LoopElement> {
        let mut out = LoopElement::zero();
        for (bx, u) in &x.coords {
            for (by, v) in &y.coords {
                let c = u.mul(v)?;
                for (b, w) in &self.structure(*bx, *by)?.coords {
                    out.add_coord(*b, w.mul(&c)?)?;
                }
            }
        }
        Ok(out)
    }

    /// Drops modes ≥ l; the flag says whether anything was lost.
    pub fn truncate(&self, x: &LoopElement) -> (LoopElement, bool) {
        let mut out = LoopElement::zero();
        let mut lost = false;
        for (b, v) in &x.coords {
            if b.m < self.l {
                out.coords.insert(*b, v.clone());
            } else {
                lost = true;
            }
        }
        (out, lost)
    }

    /// Bracket in the truncated model.
    pub fn bracket(&self, x: &LoopElement, y: &LoopElement) -> Result<(LoopElement, bool)> {
        Ok(self.truncate(&self.bracket_full(x, y)?))
    }

    /// δ(x_m(Y)) = (1/N) Σ_{a+b=m} Σ_{p,q} x_a(E_pq) ⊗ x_b([Y, E_qp]), site by site.
    pub fn cobracket(&self, x: &LoopElement) -> Result<LoopTensor> {
        let inv_n = Scalar::frac(self.mode, 1, self.n as i64);
        let mut out = LoopTensor::zero();
        for (site, m) in x.slots() {
            let y = x.matrix(site, m, self.n);
            for a in 0..=m {
                for p in 0..self.n {
                    for q in 0..self.n {
                        let left = self.element(site, a, &self.unit(p, q))?;
                        let right = self.element(site, m - a, &commutator(&y, &self.unit(q, p))?)?;
                        out = out.add(&LoopTensor::outer(&left, &right)?.scale(&inv_n)?)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Cobracket of a tensor slot, as a map into two slots.
    pub fn cobracket_basis(&self, b: LBasis) -> Result<LoopTensor> {
        let mut x = LoopElement::zero();
        x.coords.insert(b, Scalar::one(self.mode));
        self.cobracket(&x)
    }

    /// ad_x on one slot of a tensor.
    pub fn ad_slot(&self, x: &LoopElement, t: &LoopTensor, slot: usize) -> Result<LoopTensor> {
        t.apply_slot(slot, |b| {
            let mut y = LoopElement::zero();
            y.coords.insert(b, Scalar::one(self.mode));
            Ok(LoopTensor::from(&self.bracket_full(x, &y)?))
        })
    }

    /// The Poisson bracket {t_A, t_B} from the matrix form
    /// {T¹³_i(u), T²³_j(v)} = [r¹²(u − v + z_i − z_j), T¹³_i(u) + T²³_j(v)], linear part.
    pub fn poisson(&self, a: TLabel, b: TLabel) -> Result<BTreeMap<TLabel, Scalar>> {
        let (i, j) = (a.site, b.site);
        let (p, q, r, s) = (a.row, a.col, b.row, b.col);
        let (ua, vb) = (a.tdeg as i64, b.tdeg as i64);
        let n = self.n;
        let e = &self.exps[i][j];
        if ua + vb + 1 > e.kmax() {
            return Err(Error::Window("Poisson bracket beyond the expansion order".into()));
        }
        let mut out: BTreeMap<TLabel, Scalar> = BTreeMap::new();
        let t = |site: usize, row: usize, col: usize, d: i64| TLabel { site, row, col, tdeg: d as usize };
        for (k, mk) in e.powers() {
            if mk.is_zero() {
                continue;
            }
            let at = |x: usize, y: usize| mk.get(x, y).cloned();
            // [M, t13]: t_i at u-power ua − (k − vb)
            let d = ua - k + vb;
            if d >= 0 {
                let c = Scalar::int(self.mode, gbinom(k, vb) * sign(vb));
                if !c.is_zero() {
                    for p2 in 0..n {
                        if let Some(m) = at(p * n + r, p2 * n + s) {
                            add_into(&mut out, t(i, p2, q, d), m.mul(&c)?)?;
                        }
                    }
                    for q2 in 0..n {
                        if let Some(m) = at(q2 * n + r, q * n + s) {
                            add_into(&mut out, t(i, p, q2, d), m.mul(&c)?.neg())?;
                        }
                    }
                }
            }
            // [M, t23]: t_j at v-power vb − (k − ua)
            let d = vb - k + ua;
            if k >= ua && d >= 0 {
                let c = Scalar::int(self.mode, gbinom(k, k - ua) * sign(k - ua));
                if !c.is_zero() {
                    for r2 in 0..n {
                        if let Some(m) = at(p * n + r, q * n + r2) {
                            add_into(&mut out, t(j, r2, s, d), m.mul(&c)?)?;
                        }
                    }
                    for s2 in 0..n {
                        if let Some(m) = at(p * n + s2, q * n + s) {
                            add_into(&mut out, t(j, r, s2, d), m.mul(&c)?.neg())?;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// t_{pq,m} ↦ x_m(E_qp)/N.
    pub fn t_to_x(&self, coords: &BTreeMap<TLabel, Scalar>) -> Result<LoopElement> {
        let inv_n = Scalar::frac(self.mode, 1, self.n as i64);
        let mut out = LoopElement::zero();
        for (l, v) in coords {
            out = out.add(&self.element(l.site, l.tdeg, &self.unit(l.col, l.row))?.scale(&v.mul(&inv_n)?)?)?;
        }
        Ok(out)
    }

    /// Random element with small integer coordinates in modes < max_m.
    pub fn random_element(&self, rng: &mut impl Rng, max_m: usize) -> Result<LoopElement> {
        let mut out = LoopElement::zero();
        for site in 0..self.sites() {
            for m in 0..max_m {
                let mut w = TensorOp::zero(self.n, 1);
                for p in 0..self.n {
                    for q in 0..self.n {
                        let v: i64 = rng.gen_range(-2..=2);
                        if v != 0 {
                            w.add_entry(p, q, Scalar::int(self.mode, v))?;
                        }
                    }
                }
                out = out.add(&self.element(site, m, &w)?)?;
            }
        }
        Ok(out)
    }
}
