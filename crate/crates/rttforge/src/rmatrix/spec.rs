//! Family descriptions as read from run configs.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::series::Mode;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Yang,
    Rational,
    Trig,
    Elliptic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algebra {
    Sl,
    Gl,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RMatrixSpec {
    pub family: Family,
    pub n: usize,
    pub algebra: Algebra,
    /// Trig twist exponent, coprime to N.
    pub r: i64,
    /// Elliptic modulus.
    pub tau: Complex64,
    /// Sign of the Cartan constant in the trig r-matrix.
    pub cartan_sign: i64,
    pub h_order: i64,
    pub u_window: (i64, i64),
    pub tol: f64,
}

impl RMatrixSpec {
    pub fn new(family: Family, n: usize) -> RMatrixSpec {
        RMatrixSpec {
            family,
            n,
            algebra: Algebra::Sl,
            r: 1,
            tau: Complex64::new(0.0, 1.0),
            cartan_sign: 1,
            h_order: 3,
            u_window: (-6, 6),
            tol: 1e-9,
        }
    }

    pub fn yang(n: usize) -> RMatrixSpec {
        RMatrixSpec::new(Family::Yang, n)
    }

    pub fn with_window(mut self, h_order: i64, u_window: (i64, i64)) -> RMatrixSpec {
        self.h_order = h_order;
        self.u_window = u_window;
        self
    }

    pub fn mode(&self) -> Mode {
        match self.family {
            Family::Elliptic => Mode::Approx,
            _ => Mode::Exact,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Spec("N must be at least 1".into()));
        }
        if matches!(self.family, Family::Trig | Family::Elliptic) {
            if num_integer::gcd(self.r, self.n as i64) != 1 {
                return Err(Error::Spec(format!("r = {} must be coprime to N = {}", self.r, self.n)));
            }
            if self.algebra == Algebra::Gl {
                return Err(Error::Spec("trig and elliptic families are built for sl_N".into()));
            }
        }
        if self.family == Family::Elliptic && self.tau.im < 0.5 {
            return Err(Error::Spec(format!("Im tau = {} below 0.5; theta tails not controlled", self.tau.im)));
        }
        if self.h_order < 0 || self.u_window.0 > self.u_window.1 {
            return Err(Error::Spec("empty window".into()));
        }
        if ![1, -1].contains(&self.cartan_sign) {
            return Err(Error::Spec("cartan_sign must be +1 or -1".into()));
        }
        Ok(())
    }

    pub fn from_json(v: &Value) -> Result<RMatrixSpec> {
        let fam = match v.get("family").and_then(|x| x.as_str()).unwrap_or("yang") {
            "yang" => Family::Yang,
            "rational" => Family::Rational,
            "trig" => Family::Trig,
            "elliptic" => Family::Elliptic,
            f => return Err(Error::Parse(format!("unknown family {f}"))),
        };
        let n = v.get("N").and_then(|x| x.as_u64()).unwrap_or(2) as usize;
        let mut s = RMatrixSpec::new(fam, n);
        if let Some(a) = v.get("algebra").and_then(|x| x.as_str()) {
            s.algebra = match a {
                "sl" => Algebra::Sl,
                "gl" => Algebra::Gl,
                _ => return Err(Error::Parse(format!("unknown algebra {a}"))),
            };
        }
        if let Some(r) = v.get("r").and_then(|x| x.as_i64()) {
            s.r = r;
        }
        if let Some(t) = v.get("tau") {
            s.tau = parse_complex(t)?;
        }
        if let Some(c) = v.get("cartan_sign").and_then(|x| x.as_i64()) {
            s.cartan_sign = c;
        }
        if let Some(h) = v.get("h_order").and_then(|x| x.as_i64()) {
            s.h_order = h;
        }
        if let Some(w) = v.get("u_window") {
            s.u_window = serde_json::from_value(w.clone()).map_err(|_| Error::Parse("u_window".into()))?;
        }
        if let Some(t) = v.get("tol").and_then(|x| x.as_f64()) {
            s.tol = t;
        }
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "family": match self.family {
                Family::Yang => "yang",
                Family::Rational => "rational",
                Family::Trig => "trig",
                Family::Elliptic => "elliptic",
            },
            "N": self.n,
            "algebra": match self.algebra { Algebra::Sl => "sl", Algebra::Gl => "gl" },
            "r": self.r,
            "tau": [self.tau.re, self.tau.im],
            "cartan_sign": self.cartan_sign,
            "h_order": self.h_order,
            "u_window": [self.u_window.0, self.u_window.1],
            "tol": self.tol,
        })
    }
}

/// Reads `"1i"`, `"0.5+1.2i"`, `"-i"`, a number, or `[re, im]`.
pub fn parse_complex(v: &Value) -> Result<Complex64> {
    let bad = || Error::Parse(format!("bad complex {v}"));
    match v {
        Value::Number(x) => Ok(Complex64::new(x.as_f64().ok_or_else(bad)?, 0.0)),
        Value::Array(a) if a.len() == 2 => Ok(Complex64::new(a[0].as_f64().ok_or_else(bad)?, a[1].as_f64().ok_or_else(bad)?)),
        Value::String(s) => {
            let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
            if !s.ends_with('i') {
                return s.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|_| bad());
            }
            let body = &s[..s.len() - 1];
            // split at the last sign that is not the leading one or part of an exponent
            let bytes = body.as_bytes();
            let mut cut = None;
            for k in (1..bytes.len()).rev() {
                if (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'e' && bytes[k - 1] != b'E' {
                    cut = Some(k);
                    break;
                }
            }
            let (re, im) = match cut {
                Some(k) => (&body[..k], &body[k..]),
                None => ("0", body),
            };
            let im = match im {
                "" | "+" => 1.0,
                "-" => -1.0,
                x => x.parse::<f64>().map_err(|_| bad())?,
            };
            let re = re.parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, im))
        }
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        for (s, re, im) in [("1i", 0.0, 1.0), ("i", 0.0, 1.0), ("0.5+1.2i", 0.5, 1.2), ("-2-i", -2.0, -1.0), ("3", 3.0, 0.0)] {
            assert_eq!(parse_complex(&json!(s)).unwrap(), Complex64::new(re, im));
        }
    }

    #[test]
    fn config_example_parses() {
        let v = json!({"family":"elliptic","N":2,"algebra":"sl","tau":"1i","r":1,"h_order":3,"u_window":[-6,6],"tol":1e-9});
        let s = RMatrixSpec::from_json(&v).unwrap();
        assert_eq!(s.family, Family::Elliptic);
        assert_eq!(s.tau, Complex64::new(0.0, 1.0));
        assert_eq!(RMatrixSpec::from_json(&s.to_json()).unwrap(), s);
    }
}
