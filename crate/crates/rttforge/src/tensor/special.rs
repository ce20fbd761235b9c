//! Constant elements: σ, Ω, the polarization L, the Heisenberg pair and λ.

use crate::error::{Error, Result};
use crate::linalg::{Echelon, Row};
use crate::series::{Mode, Scalar};

use super::op::{kron, unit, Coeff, TensorOp};

/// Constants for one N, all exact over Q(ε_N).
#[derive(Clone, Debug)]
pub struct SpecialElements {
    pub n: usize,
    pub sigma: TensorOp<Scalar>,
    /// (σ − 1/N)/N, dual to ⟨X,Y⟩ = N tr(XY) on sl_N.
    pub omega_sl: TensorOp<Scalar>,
    /// σ/N, the gl_N variant.
    pub omega_gl: TensorOp<Scalar>,
    pub l_plus: TensorOp<Scalar>,
    pub l_zero: TensorOp<Scalar>,
    /// L₊ + L₀/2.
    pub l: TensorOp<Scalar>,
    /// Cyclic shift, A e_i = e_{i+1}.
    pub a: TensorOp<Scalar>,
    /// diag(1, ε, …, ε^{N−1}).
    pub b: TensorOp<Scalar>,
}

fn ex(v: i64) -> Scalar {
    Scalar::int(Mode::Exact, v)
}

fn frac(p: i64, q: i64) -> Scalar {
    Scalar::frac(Mode::Exact, p, q)
}

/// Flip operator on two legs.
pub fn sigma(n: usize) -> TensorOp<Scalar> {
    let one = ex(1);
    let mut s = TensorOp::zero(n, 2);
    for i in 0..n {
        for j in 0..n {
            s.add_entry(i * n + j, j * n + i, one.clone()).expect("flip");
        }
    }
    s
}

/// Σ_{a,b} c(a,b) E_ab ⊗ E_ba.
fn pair_sum(n: usize, c: impl Fn(usize, usize) -> Option<Scalar>) -> TensorOp<Scalar> {
    let mut out = TensorOp::zero(n, 2);
    for a in 0..n {
        for b in 0..n {
            if let Some(v) = c(a, b) {
                out.add_entry(a * n + b, b * n + a, v).expect("pair sum");
            }
        }
    }
    out.prune();
    out
}

impl SpecialElements {
    pub fn new(n: usize) -> SpecialElements {
        assert!(n >= 1);
        let nn = n as i64;
        let sigma = sigma(n);
        let id2 = TensorOp::identity(n, 2, &ex(1));
        let omega_gl = sigma.scale(&frac(1, nn)).expect("scale");
        let omega_sl = sigma.sub(&id2.scale(&frac(1, nn)).expect("scale")).expect("sub").scale(&frac(1, nn)).expect("scale");
        let l_plus = pair_sum(n, |a, b| if a < b { Some(frac(1, nn)) } else { None });
        // Cartan part of Ω: (Σ_a E_aa ⊗ E_aa − 1/N)/N
        let mut l_zero = TensorOp::zero(n, 2);
        for a in 0..n {
            for c in 0..n {
                let v = if a == c { frac(nn - 1, nn * nn) } else { frac(-1, nn * nn) };
                l_zero.add_entry(a * n + c, a * n + c, v).expect("l0");
            }
        }
        l_zero.prune();
        let l = l_plus.add(&l_zero.scale(&frac(1, 2)).expect("half")).expect("L");
        let mut a = TensorOp::zero(n, 1);
        let mut b = TensorOp::zero(n, 1);
        for i in 0..n {
            a.add_entry((i + 1) % n, i, ex(1)).expect("A");
            b.add_entry(i, i, Scalar::root_of_unity(Mode::Exact, n as u32, i as i64)).expect("B");
        }
        SpecialElements { n, sigma, omega_sl, omega_gl, l_plus, l_zero, l, a, b }
    }

    pub fn epsilon(&self) -> Scalar {
        Scalar::root_of_unity(Mode::Exact, self.n as u32, 1)
    }

    /// I_{pq} = A^p B^q, exponents taken mod N.
    pub fn heis(&self, p: i64, q: i64) -> TensorOp<Scalar> {
        let n = self.n;
        let p = p.rem_euclid(n as i64) as usize;
        let mut out = TensorOp::zero(n, 1);
        for i in 0..n {
            let e = Scalar::root_of_unity(Mode::Exact, n as u32, q * i as i64);
            out.add_entry((i + p) % n, i, e).expect("heis");
        }
        out
    }

    /// I_{pq}^{-1} = B^{-q} A^{-p}.
    pub fn heis_inv(&self, p: i64, q: i64) -> TensorOp<Scalar> {
        let n = self.n;
        let p = p.rem_euclid(n as i64) as usize;
        let mut out = TensorOp::zero(n, 1);
        for i in 0..n {
            // maps e_{i+p} to ε^{-q i} e_i
            let e = Scalar::root_of_unity(Mode::Exact, n as u32, -q * i as i64);
            out.add_entry(i, (i + p) % n, e).expect("heis inv");
        }
        out
    }

    /// I_α ⊗ I_α^{-1}.
    pub fn heis_pair(&self, p: i64, q: i64) -> TensorOp<Scalar> {
        kron(&self.heis(p, q), &self.heis_inv(p, q)).expect("kron")
    }

    /// λ(γ) for γ = (a, b) ∈ (Z/N)²: conjugation by A^a B^b.
    pub fn lam(&self, a: i64, b: i64) -> Conj {
        Conj { g: self.heis(a, b), ginv: self.heis_inv(a, b) }
    }

    /// Permutation e_i ↦ e_{r i mod N}; conjugation by it relabels matrix units.
    pub fn relabel(&self, r: i64) -> Result<Conj> {
        let n = self.n as i64;
        if num_integer::gcd(r, n) != 1 {
            return Err(Error::Spec(format!("r = {r} not coprime to N = {n}")));
        }
        let mut g = TensorOp::zero(self.n, 1);
        let mut ginv = TensorOp::zero(self.n, 1);
        for i in 0..n {
            let j = (r * i).rem_euclid(n) as usize;
            g.add_entry(j, i as usize, ex(1))?;
            ginv.add_entry(i as usize, j, ex(1))?;
        }
        Ok(Conj { g, ginv })
    }

    /// Basis of sl_N: off-diagonal units and E_kk − E_{k+1,k+1}.
    pub fn sl_basis(&self) -> Vec<TensorOp<Scalar>> {
        let n = self.n;
        let one = ex(1);
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    out.push(unit(n, a, b, &one));
                }
            }
        }
        for k in 0..n.saturating_sub(1) {
            out.push(unit(n, k, k, &one).sub(&unit(n, k + 1, k + 1, &one)).expect("cartan"));
        }
        out
    }
}

/// ⟨X, Y⟩ = N tr(XY) on one leg.
pub fn form(x: &TensorOp<Scalar>, y: &TensorOp<Scalar>) -> Result<Scalar> {
    let p = x.mul(y)?;
    let mut acc = Scalar::zero(Mode::Exact);
    for i in 0..x.n() {
        if let Some(v) = p.get(i, i) {
            acc = acc.add(v)?;
        }
    }
    Ok(acc.scale_frac(x.n() as i64, 1))
}

/// ⟨T, x⊗y⟩ = N² Σ T_{(i,j),(k,l)} x_{ki} y_{lj}.
pub fn pair2(t: &TensorOp<Scalar>, x: &TensorOp<Scalar>, y: &TensorOp<Scalar>) -> Result<Scalar> {
    let n = t.n();
    let mut acc = Scalar::zero(Mode::Exact);
    for (&(r, c), v) in t.entries() {
        let (i, j) = (r / n, r % n);
        let (k, l) = (c / n, c % n);
        if let (Some(a), Some(b)) = (x.get(k, i), y.get(l, j)) {
            acc = acc.add(&v.mul(a)?.mul(b)?)?;
        }
    }
    Ok(acc.scale_frac((n * n) as i64, 1))
}

/// Conjugation X ↦ g X g⁻¹ by a fixed invertible matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Conj {
    pub g: TensorOp<Scalar>,
    pub ginv: TensorOp<Scalar>,
}

impl Conj {
    pub fn apply(&self, x: &TensorOp<Scalar>) -> Result<TensorOp<Scalar>> {
        self.g.mul(x)?.mul(&self.ginv)
    }

    pub fn inverse(&self) -> Conj {
        Conj { g: self.ginv.clone(), ginv: self.g.clone() }
    }

    pub fn compose(&self, o: &Conj) -> Result<Conj> {
        Ok(Conj { g: self.g.mul(&o.g)?, ginv: o.ginv.mul(&self.ginv)? })
    }

    /// Acts on one leg of a multi-leg operator with entries converted by `lift`.
    pub fn on_leg<T: Coeff>(&self, m: &TensorOp<T>, leg: usize, lift: impl Fn(&Scalar) -> Result<T>) -> Result<TensorOp<T>> {
        let g = self.g.map(&lift)?.leg_embed(&[leg], m.legs())?;
        let gi = self.ginv.map(&lift)?.leg_embed(&[leg], m.legs())?;
        g.mul(m)?.mul(&gi)
    }
}

/// Linear map Mat_N → Mat_N as a matrix on the N² entries (row-major).
fn conj_matrix(c: &Conj, n: usize) -> Result<Vec<Vec<Scalar>>> {
    let one = ex(1);
    let mut cols = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let img = c.apply(&unit(n, a, b, &one))?;
            let mut col = vec![Scalar::zero(Mode::Exact); n * n];
            for (&(r, s), v) in img.entries() {
                col[r * n + s] = v.clone();
            }
            cols.push(col);
        }
    }
    // transpose columns into rows
    let d = n * n;
    Ok((0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect())
}

/// Matrices X fixed by every conjugation in `gens`, as a basis of Mat_N elements.
pub fn fixed_points(n: usize, gens: &[Conj]) -> Result<Vec<TensorOp<Scalar>>> {
    let d = n * n;
    let mut e = Echelon::new(Mode::Exact);
    for c in gens {
        let m = conj_matrix(c, n)?;
        for (i, r) in m.iter().enumerate() {
            let mut row: Row = Row::new();
            for (j, v) in r.iter().enumerate() {
                let v = if i == j { v.sub(&ex(1))? } else { v.clone() };
                if !v.is_zero() {
                    row.insert(j, v);
                }
            }
            e.insert(row)?;
        }
    }
    e.nullspace(d)?
        .into_iter()
        .map(|x| TensorOp::from_entries(n, 1, x.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(k, v)| ((k / n, k % n), v))))
        .collect()
}

/// Two-leg operators fixed by every pair (g₁ ⊗ g₂) conjugation in `gens`.
pub fn fixed_points2(n: usize, gens: &[(Conj, Conj)]) -> Result<Vec<TensorOp<Scalar>>> {
    let d = n * n;
    let mut e = Echelon::new(Mode::Exact);
    for (c1, c2) in gens {
        let m1 = conj_matrix(c1, n)?;
        let m2 = conj_matrix(c2, n)?;
        // (m1 ⊗ m2 − 1) on vec(Mat_N ⊗ Mat_N), index (x, y) with x, y < N²
        for i1 in 0..d {
            for i2 in 0..d {
                let mut row = Row::new();
                for j1 in 0..d {
                    if m1[i1][j1].is_zero() {
                        continue;
                    }
                    for j2 in 0..d {
                        if m2[i2][j2].is_zero() {
                            continue;
                        }
                        row.insert(j1 * d + j2, m1[i1][j1].mul(&m2[i2][j2])?);
                    }
                }
                let k = i1 * d + i2;
                let v = row.get(&k).cloned().unwrap_or_else(|| Scalar::zero(Mode::Exact)).sub(&ex(1))?;
                if v.is_zero() {
                    row.remove(&k);
                } else {
                    row.insert(k, v);
                }
                e.insert(row)?;
            }
        }
    }
    let mut out = Vec::new();
    for x in e.nullspace(d * d)? {
        let mut op = TensorOp::zero(n, 2);
        for (k, v) in x.into_iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let (x1, x2) = (k / d, k % d);
            let (a, b) = (x1 / n, x1 % n);
            let (c, dd) = (x2 / n, x2 % n);
            op.add_entry(a * n + c, b * n + dd, v)?;
        }
        out.push(op);
    }
    Ok(out)
}
