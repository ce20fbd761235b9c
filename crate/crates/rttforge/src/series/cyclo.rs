//! Elements of the cyclotomic fields Q(ε_n), ε_n = exp(2πi/n).
//!
//! An element is a coefficient vector in the power basis 1, ε, …, ε^{φ(n)-1}
//! reduced modulo the n-th cyclotomic polynomial. Rational values are always
//! stored with n = 1, so the common rational case never touches a field table.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};

struct Field {
    phi: usize,
    /// `red[k]` expresses ε^k, 0 <= k < max(n, 2φ-1), in the power basis.
    red: Vec<Vec<BigInt>>,
}

fn cyclotomic_poly(n: u32) -> Vec<BigInt> {
    // x^n - 1 divided by Φ_d for every proper divisor d.
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let den = cyclotomic_poly(d);
            num = poly_div_exact(&num, &den);
        }
    }
    num
}

fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qlen = rem.len() - dn;
    let mut q = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn].clone();
        if c.is_zero() {
            continue;
        }
        // den is monic
        for (j, d) in den.iter().enumerate() {
            rem[i + j] -= &c * d;
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(|x| x.is_zero()));
    q
}

fn build_field(n: u32) -> Field {
    let poly = cyclotomic_poly(n);
    let phi = poly.len() - 1;
    let mut red: Vec<Vec<BigInt>> = Vec::with_capacity(2 * phi);
    for k in 0..phi {
        let mut v = vec![BigInt::zero(); phi];
        v[k] = BigInt::one();
        red.push(v);
    }
    // ε^phi = -(poly[0] + ... + poly[phi-1] ε^{phi-1})
    let mut cur: Vec<BigInt> = poly[..phi].iter().map(|c| -c).collect();
    red.push(cur.clone());
    let len = (n as usize).max(2 * phi - 1);
    for _ in phi + 1..len {
        // multiply by ε
        let top = cur[phi - 1].clone();
        let mut next = vec![BigInt::zero(); phi];
        for j in (1..phi).rev() {
            next[j] = cur[j - 1].clone();
        }
        for j in 0..phi {
            next[j] -= &top * &poly[j];
        }
        cur = next;
        red.push(cur.clone());
    }
    Field { phi, red }
}

fn field(n: u32) -> Arc<Field> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Field>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(f) = cache.read().unwrap().get(&n) {
        return f.clone();
    }
    let f = Arc::new(build_field(n));
    cache.write().unwrap().insert(n, f.clone());
    f
}

/// Euler's totient, via the field table.
pub fn totient(n: u32) -> usize {
    field(n).phi
}

#[derive(Clone, Debug)]
pub struct Cyclo {
    n: u32,
    c: Vec<BigRational>,
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl Cyclo {
    pub fn zero() -> Self {
        Cyclo { n: 1, c: vec![BigRational::zero()] }
    }

    pub fn one() -> Self {
        Cyclo { n: 1, c: vec![BigRational::one()] }
    }

    pub fn from_rational(q: BigRational) -> Self {
        Cyclo { n: 1, c: vec![q] }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(rat(v))
    }

    pub fn frac(p: i64, q: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// ε_n^k.
    pub fn root_of_unity(n: u32, k: i64) -> Self {
        assert!(n >= 1);
        let k = k.rem_euclid(n as i64) as usize;
        let f = field(n);
        let mut out = Cyclo { n, c: vec![BigRational::zero(); f.phi] };
        out.add_power(k, &BigRational::one(), &f);
        out.canon()
    }

    /// Builds Σ coeffs[k] ε_n^k for arbitrary length coeffs.
    pub fn from_power_coeffs(n: u32, coeffs: &[BigRational]) -> Self {
        let f = field(n);
        let mut out = Cyclo { n, c: vec![BigRational::zero(); f.phi] };
        for (k, q) in coeffs.iter().enumerate() {
            if !q.is_zero() {
                out.add_power(k % n as usize, q, &f);
            }
        }
        out.canon()
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    fn add_power(&mut self, k: usize, q: &BigRational, f: &Field) {
        let row = &f.red[k % (self.n as usize)];
        for (j, r) in row.iter().enumerate() {
            if !r.is_zero() {
                self.c[j] += q * BigRational::from_integer(r.clone());
            }
        }
    }

    fn canon(mut self) -> Self {
        if self.n != 1 && self.c[1..].iter().all(|x| x.is_zero()) {
            let c0 = std::mem::replace(&mut self.c[0], BigRational::zero());
            return Cyclo { n: 1, c: vec![c0] };
        }
        self
    }

    /// Raw embedding into Q(ε_m), n | m; result not canonicalized.
    fn embed(&self, m: u32) -> Cyclo {
        if self.n == m {
            return self.clone();
        }
        assert!(m % self.n == 0, "embed needs divisibility");
        let f = field(m);
        let step = (m / self.n) as usize;
        let mut out = Cyclo { n: m, c: vec![BigRational::zero(); f.phi] };
        for (k, q) in self.c.iter().enumerate() {
            if !q.is_zero() {
                out.add_power(k * step, q, &f);
            }
        }
        out
    }

    fn common(a: &Cyclo, b: &Cyclo) -> (Cyclo, Cyclo, u32) {
        let m = a.n.lcm(&b.n);
        (a.embed(m), b.embed(m), m)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.n == 1
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        if self.n == 1 {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, o: &Cyclo) -> Cyclo {
        if self.n == 1 && o.n == 1 {
            return Cyclo { n: 1, c: vec![&self.c[0] + &o.c[0]] };
        }
        let (mut a, b, _) = Self::common(self, o);
        for (x, y) in a.c.iter_mut().zip(b.c.iter()) {
            *x += y;
        }
        a.canon()
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo { n: self.n, c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn sub(&self, o: &Cyclo) -> Cyclo {
        self.add(&o.neg())
    }

    fn mul_same(&self, o: &Cyclo, f: &Field) -> Cyclo {
        let phi = f.phi;
        let mut wide = vec![BigRational::zero(); 2 * phi - 1];
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.c.iter().enumerate() {
                if !y.is_zero() {
                    wide[i + j] += x * y;
                }
            }
        }
        let mut out = Cyclo { n: self.n, c: vec![BigRational::zero(); phi] };
        for (k, q) in wide.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            for (j, r) in f.red[k].iter().enumerate() {
                if !r.is_zero() {
                    out.c[j] += q * BigRational::from_integer(r.clone());
                }
            }
        }
        out
    }

    pub fn mul(&self, o: &Cyclo) -> Cyclo {
        if self.n == 1 && o.n == 1 {
            return Cyclo { n: 1, c: vec![&self.c[0] * &o.c[0]] };
        }
        if self.n == 1 || o.n == 1 {
            let (q, v) = if self.n == 1 { (&self.c[0], o) } else { (&o.c[0], self) };
            return Cyclo { n: v.n, c: v.c.iter().map(|x| x * q).collect() }.canon();
        }
        let (a, b, m) = Self::common(self, o);
        a.mul_same(&b, &field(m)).canon()
    }

    pub fn scale(&self, q: &BigRational) -> Cyclo {
        Cyclo { n: self.n, c: self.c.iter().map(|x| x * q).collect() }.canon()
    }

    /// Multiplicative inverse, by solving the multiplication-matrix system.
    pub fn inv(&self) -> Result<Cyclo> {
        if self.is_zero() {
            return Err(Error::NotInvertible("zero scalar".into()));
        }
        if self.n == 1 {
            return Ok(Cyclo { n: 1, c: vec![self.c[0].recip()] });
        }
        let f = field(self.n);
        let phi = f.phi;
        // column j = self * ε^j
        let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(phi);
        for j in 0..phi {
            let mut e = Cyclo { n: self.n, c: vec![BigRational::zero(); phi] };
            e.c[j] = BigRational::one();
            cols.push(self.mul_same(&e, &f).c);
        }
        // augmented rows
        let mut m: Vec<Vec<BigRational>> = (0..phi)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..phi).map(|j| cols[j][i].clone()).collect();
                row.push(if i == 0 { BigRational::one() } else { BigRational::zero() });
                row
            })
            .collect();
        for col in 0..phi {
            let piv = (col..phi).find(|&r| !m[r][col].is_zero()).expect("field element is a unit");
            m.swap(col, piv);
            let p = m[col][col].clone();
            for x in m[col].iter_mut() {
                *x /= &p;
            }
            for r in 0..phi {
                if r != col && !m[r][col].is_zero() {
                    let fct = m[r][col].clone();
                    for k in col..=phi {
                        let d = &fct * &m[col][k];
                        m[r][k] -= d;
                    }
                }
            }
        }
        Ok(Cyclo { n: self.n, c: m.into_iter().map(|r| r[phi].clone()).collect() }.canon())
    }

    pub fn div(&self, o: &Cyclo) -> Result<Cyclo> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<Cyclo> {
        let mut base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Cyclo::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        Ok(acc)
    }

    /// Complex conjugate (ε ↦ ε⁻¹).
    pub fn conj(&self) -> Cyclo {
        if self.n == 1 {
            return self.clone();
        }
        let f = field(self.n);
        let mut out = Cyclo { n: self.n, c: vec![BigRational::zero(); f.phi] };
        for (k, q) in self.c.iter().enumerate() {
            if !q.is_zero() {
                out.add_power((self.n as usize - k) % self.n as usize, q, &f);
            }
        }
        out.canon()
    }

    pub fn to_complex(&self) -> Complex64 {
        let mut z = Complex64::new(0.0, 0.0);
        for (k, q) in self.c.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let ang = 2.0 * std::f64::consts::PI * k as f64 / self.n as f64;
            z += Complex64::from_polar(1.0, ang) * q.to_f64().unwrap_or(f64::NAN);
        }
        z
    }

    /// Exact equality in the common field.
    pub fn eq_value(&self, o: &Cyclo) -> bool {
        self.sub(o).is_zero()
    }

    /// Largest |numerator| or |denominator| bit length, a cost indicator.
    pub fn height_bits(&self) -> u64 {
        self.c
            .iter()
            .map(|q| q.numer().bits().max(q.denom().bits()))
            .max()
            .unwrap_or(0)
    }

    pub fn is_positive_rational(&self) -> bool {
        self.n == 1 && self.c[0].is_positive()
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, o: &Self) -> bool {
        if self.n == o.n {
            self.c == o.c
        } else {
            self.eq_value(o)
        }
    }
}

pub fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(p, q))
    } else {
        Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?))
    }
}

impl std::fmt::Display for Cyclo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.n == 1 {
            return write!(f, "{}", fmt_rational(&self.c[0]));
        }
        let mut first = true;
        for (k, q) in self.c.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", fmt_rational(q))?,
                _ => write!(f, "({})·ε{}^{}", fmt_rational(q), self.n, k)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totients() {
        let want = [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(totient(i as u32 + 1), *w, "n = {}", i + 1);
        }
    }

    #[test]
    fn eps_to_the_n_is_one() {
        for n in 1..=12u32 {
            let e = Cyclo::root_of_unity(n, 1);
            assert_eq!(e.pow(n as i64).unwrap(), Cyclo::one());
            // sum of all n-th roots vanishes for n > 1
            let mut s = Cyclo::zero();
            for k in 0..n {
                s = s.add(&Cyclo::root_of_unity(n, k as i64));
            }
            assert_eq!(s.is_zero(), n > 1);
        }
    }

    #[test]
    fn eps2_is_minus_one() {
        assert_eq!(Cyclo::root_of_unity(2, 1), Cyclo::from_int(-1));
        assert!(Cyclo::root_of_unity(2, 1).is_rational());
    }

    #[test]
    fn mixed_orders() {
        // ε_6^2 = ε_3
        let a = Cyclo::root_of_unity(6, 2);
        let b = Cyclo::root_of_unity(3, 1);
        assert_eq!(a, b);
        let p = Cyclo::root_of_unity(4, 1).mul(&Cyclo::root_of_unity(3, 1));
        assert_eq!(p, Cyclo::root_of_unity(12, 7));
    }

    #[test]
    fn inverse_and_complex() {
        let x = Cyclo::root_of_unity(5, 1).add(&Cyclo::frac(2, 3));
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), Cyclo::one());
        let z = x.to_complex() * y.to_complex();
        assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((x.conj().to_complex() - x.to_complex().conj()).norm() < 1e-14);
    }

    #[test]
    fn i_cot_is_exact() {
        // -i cot(pi/3) = (ε+1)/(ε-1) for ε = ε_6^1? use ε_3: x = π q/N, e^{2ix} = ε_N^q
        let e = Cyclo::root_of_unity(3, 1);
        let v = e.add(&Cyclo::one()).div(&e.sub(&Cyclo::one())).unwrap();
        let want = Complex64::new(0.0, -1.0) / (std::f64::consts::PI / 3.0).tan();
        assert!((v.to_complex() - want).norm() < 1e-14);
    }

    #[test]
    fn parse_roundtrip() {
        let q = parse_rational("-7/21").unwrap();
        assert_eq!(fmt_rational(&q), "-1/3");
        assert!(parse_rational("1/0").is_err());
    }
}
