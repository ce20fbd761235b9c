//! Scalars: exact cyclotomic rationals or complex doubles, never mixed.

use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::{json, Value};

use super::cyclo::{fmt_rational, parse_rational, Cyclo};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Approx,
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(Cyclo),
    Approx(Complex64),
}

impl Scalar {
    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(Cyclo::zero()),
            Mode::Approx => Scalar::Approx(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn one(mode: Mode) -> Self {
        Self::int(mode, 1)
    }

    pub fn int(mode: Mode, v: i64) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(Cyclo::from_int(v)),
            Mode::Approx => Scalar::Approx(Complex64::new(v as f64, 0.0)),
        }
    }

    pub fn frac(mode: Mode, p: i64, q: i64) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(Cyclo::frac(p, q)),
            Mode::Approx => Scalar::Approx(Complex64::new(p as f64 / q as f64, 0.0)),
        }
    }

    pub fn rational(q: BigRational) -> Self {
        Scalar::Exact(Cyclo::from_rational(q))
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Scalar::Approx(Complex64::new(re, im))
    }

    /// ε_n^k in the requested mode.
    pub fn root_of_unity(mode: Mode, n: u32, k: i64) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(Cyclo::root_of_unity(n, k)),
            Mode::Approx => {
                let ang = 2.0 * std::f64::consts::PI * (k.rem_euclid(n as i64) as f64) / n as f64;
                Scalar::Approx(Complex64::from_polar(1.0, ang))
            }
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Approx(_) => Mode::Approx,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(c) => c.is_zero(),
            Scalar::Approx(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(c) => c.to_rational().map(|q| q == BigRational::from_integer(1.into())).unwrap_or(false),
            Scalar::Approx(z) => z.re == 1.0 && z.im == 0.0,
        }
    }

    pub fn add(&self, o: &Scalar) -> Result<Scalar> {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a.add(b))),
            (Scalar::Approx(a), Scalar::Approx(b)) => Ok(Scalar::Approx(a + b)),
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn sub(&self, o: &Scalar) -> Result<Scalar> {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a.sub(b))),
            (Scalar::Approx(a), Scalar::Approx(b)) => Ok(Scalar::Approx(a - b)),
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn mul(&self, o: &Scalar) -> Result<Scalar> {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a.mul(b))),
            (Scalar::Approx(a), Scalar::Approx(b)) => Ok(Scalar::Approx(a * b)),
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn div(&self, o: &Scalar) -> Result<Scalar> {
        self.mul(&o.inv()?)
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(a.neg()),
            Scalar::Approx(a) => Scalar::Approx(-a),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        match self {
            Scalar::Exact(a) => Ok(Scalar::Exact(a.inv()?)),
            Scalar::Approx(a) => {
                if a.norm() == 0.0 {
                    Err(Error::NotInvertible("zero scalar".into()))
                } else {
                    Ok(Scalar::Approx(a.inv()))
                }
            }
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(a.conj()),
            Scalar::Approx(a) => Scalar::Approx(a.conj()),
        }
    }

    /// Multiplies by an integer ratio without leaving the mode.
    pub fn scale_frac(&self, p: i64, q: i64) -> Scalar {
        self.mul(&Scalar::frac(self.mode(), p, q)).expect("same mode")
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(a) => a.to_complex(),
            Scalar::Approx(z) => *z,
        }
    }

    pub fn as_exact(&self) -> Option<&Cyclo> {
        match self {
            Scalar::Exact(c) => Some(c),
            Scalar::Approx(_) => None,
        }
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.as_exact().and_then(|c| c.to_rational())
    }

    /// Magnitude used for residual norms.
    pub fn abs(&self) -> f64 {
        self.to_complex().norm()
    }

    pub fn to_json(&self) -> Value {
        match self {
            Scalar::Exact(c) => match c.to_rational() {
                Some(q) => Value::String(fmt_rational(&q)),
                None => json!({
                    "cyclo": c.order(),
                    "coeffs": c.coeffs().iter().map(fmt_rational).collect::<Vec<_>>(),
                }),
            },
            Scalar::Approx(z) => json!([z.re, z.im]),
        }
    }

    pub fn from_json(v: &Value) -> Result<Scalar> {
        match v {
            Value::String(s) => Ok(Scalar::rational(parse_rational(s)?)),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Scalar::int(Mode::Exact, i))
                } else {
                    Err(Error::Parse("float scalar must be written as [re, im]".into()))
                }
            }
            Value::Array(a) if a.len() == 2 => {
                let re = a[0].as_f64().ok_or_else(|| Error::Parse("re".into()))?;
                let im = a[1].as_f64().ok_or_else(|| Error::Parse("im".into()))?;
                Ok(Scalar::complex(re, im))
            }
            Value::Object(o) => {
                let n = o
                    .get("cyclo")
                    .and_then(|x| x.as_u64())
                    .ok_or_else(|| Error::Parse("cyclo order".into()))? as u32;
                let coeffs = o
                    .get("coeffs")
                    .and_then(|x| x.as_array())
                    .ok_or_else(|| Error::Parse("coeffs".into()))?;
                let qs = coeffs
                    .iter()
                    .map(|c| c.as_str().ok_or_else(|| Error::Parse("coeff".into())).and_then(parse_rational))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Scalar::Exact(Cyclo::from_power_coeffs(n, &qs)))
            }
            _ => Err(Error::Parse(format!("bad scalar {v}"))),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Self) -> bool {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Approx(a), Scalar::Approx(b)) => a == b,
            _ => false,
        }
    }
}

impl std::fmt::Display for Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scalar::Exact(c) => write!(f, "{c}"),
            Scalar::Approx(z) => write!(f, "({:.6e}{:+.6e}i)", z.re, z.im),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixing_modes_is_an_error() {
        let a = Scalar::int(Mode::Exact, 2);
        let b = Scalar::int(Mode::Approx, 2);
        assert_eq!(a.add(&b), Err(Error::ModeMismatch));
        assert_eq!(a.mul(&b), Err(Error::ModeMismatch));
    }

    #[test]
    fn json_roundtrip() {
        let vals = [
            Scalar::frac(Mode::Exact, -3, 4),
            Scalar::root_of_unity(Mode::Exact, 3, 1),
            Scalar::complex(0.5, -2.0),
        ];
        for v in vals {
            assert_eq!(Scalar::from_json(&v.to_json()).unwrap(), v);
        }
    }
}
