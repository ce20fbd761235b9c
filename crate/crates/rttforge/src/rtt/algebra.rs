//! Free algebra on the generators t_{site, row col, tdeg}, with coefficients in k[h]/h^{H+1}.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::series::{Mode, Scalar};

/// Coefficient of u^tdeg in the (row, col) entry of t_site(u); `copy` separates tensor factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Gen {
    pub copy: u8,
    pub site: u8,
    pub tdeg: u16,
    pub row: u8,
    pub col: u8,
}

impl Gen {
    pub fn new(site: usize, tdeg: usize, row: usize, col: usize) -> Gen {
        Gen { copy: 0, site: site as u8, tdeg: tdeg as u16, row: row as u8, col: col as u8 }
    }

    pub fn on_copy(self, copy: u8) -> Gen {
        Gen { copy, ..self }
    }

    pub fn to_json(&self) -> Value {
        if self.copy == 0 {
            json!([self.site + 1, self.tdeg, self.row, self.col])
        } else {
            json!([self.site + 1, self.tdeg, self.row, self.col, self.copy])
        }
    }

    pub fn from_json(v: &Value) -> Result<Gen> {
        let a = v.as_array().ok_or_else(|| Error::Parse(format!("generator {v}")))?;
        let f = |k: usize| a.get(k).and_then(|x| x.as_u64()).ok_or_else(|| Error::Parse(format!("generator {v}")));
        if a.len() < 4 {
            return Err(Error::Parse(format!("generator {v}")));
        }
        let site = f(0)?;
        if site == 0 {
            return Err(Error::Parse("sites are numbered from 1".into()));
        }
        let copy = if a.len() > 4 { f(4)? as u8 } else { 0 };
        Ok(Gen { copy, site: (site - 1) as u8, tdeg: f(1)? as u16, row: f(2)? as u8, col: f(3)? as u8 })
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}[{}]({}{})", self.site + 1, self.tdeg, self.row, self.col)?;
        if self.copy > 0 {
            write!(f, "'{}", self.copy)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub h: u32,
    pub word: Vec<Gen>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    pub mode: Mode,
    pub h_order: u32,
    pub terms: BTreeMap<Term, Scalar>,
}

impl AlgebraElement {
    pub fn zero(mode: Mode, h_order: u32) -> AlgebraElement {
        AlgebraElement { mode, h_order, terms: BTreeMap::new() }
    }

    pub fn one(mode: Mode, h_order: u32) -> AlgebraElement {
        AlgebraElement::monomial(mode, h_order, vec![], 0, Scalar::one(mode))
    }

    pub fn monomial(mode: Mode, h_order: u32, word: Vec<Gen>, h: u32, c: Scalar) -> AlgebraElement {
        let mut out = AlgebraElement::zero(mode, h_order);
        out.add_term(Term { h, word }, c).expect("monomial");
        out
    }

    pub fn gen(mode: Mode, h_order: u32, g: Gen) -> AlgebraElement {
        AlgebraElement::monomial(mode, h_order, vec![g], 0, Scalar::one(mode))
    }

    pub fn word(mode: Mode, h_order: u32, w: &[Gen]) -> AlgebraElement {
        AlgebraElement::monomial(mode, h_order, w.to_vec(), 0, Scalar::one(mode))
    }

    /// Adds c·term; terms beyond the h order are dropped.
    pub fn add_term(&mut self, t: Term, c: Scalar) -> Result<()> {
        if t.h > self.h_order || c.is_zero() {
            return Ok(());
        }
        if c.mode() != self.mode {
            return Err(Error::ModeMismatch);
        }
        match self.terms.get_mut(&t) {
            Some(v) => {
                *v = v.add(&c)?;
                if v.is_zero() {
                    self.terms.remove(&t);
                }
            }
            None => {
                self.terms.insert(t, c);
            }
        }
        Ok(())
    }

    pub fn add_scaled(&mut self, o: &AlgebraElement, c: &Scalar) -> Result<()> {
        for (t, v) in &o.terms {
            self.add_term(t.clone(), v.mul(c)?)?;
        }
        Ok(())
    }

    pub fn add(&self, o: &AlgebraElement) -> Result<AlgebraElement> {
        let mut out = self.clone();
        out.h_order = self.h_order.min(o.h_order);
        out.terms.retain(|t, _| t.h <= out.h_order);
        out.add_scaled(o, &Scalar::one(self.mode))?;
        Ok(out)
    }

    pub fn neg(&self) -> AlgebraElement {
        AlgebraElement { mode: self.mode, h_order: self.h_order, terms: self.terms.iter().map(|(t, v)| (t.clone(), v.neg())).collect() }
    }

    pub fn sub(&self, o: &AlgebraElement) -> Result<AlgebraElement> {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Result<AlgebraElement> {
        let mut out = AlgebraElement::zero(self.mode, self.h_order);
        out.add_scaled(self, c)?;
        Ok(out)
    }

    /// Multiplies by h^k.
    pub fn h_shift(&self, k: u32) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.mode, self.h_order);
        for (t, v) in &self.terms {
            if t.h + k <= self.h_order {
                out.terms.insert(Term { h: t.h + k, word: t.word.clone() }, v.clone());
            }
        }
        out
    }

    pub fn mul(&self, o: &AlgebraElement) -> Result<AlgebraElement> {
        let mut out = AlgebraElement::zero(self.mode, self.h_order.min(o.h_order));
        for (a, u) in &self.terms {
            for (b, v) in &o.terms {
                if a.h + b.h > out.h_order {
                    continue;
                }
                let mut w = a.word.clone();
                w.extend_from_slice(&b.word);
                out.add_term(Term { h: a.h + b.h, word: w }, u.mul(v)?)?;
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(|t| t.word.len()).max().unwrap_or(0)
    }

    /// The h^c part, returned with h = 0.
    pub fn h_part(&self, c: u32) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.mode, self.h_order);
        for (t, v) in &self.terms {
            if t.h == c {
                out.terms.insert(Term { h: 0, word: t.word.clone() }, v.clone());
            }
        }
        out
    }

    pub fn map_gens(&self, f: impl Fn(Gen) -> Gen) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.mode, self.h_order);
        for (t, v) in &self.terms {
            let w = t.word.iter().map(|g| f(*g)).collect();
            out.add_term(Term { h: t.h, word: w }, v.clone()).expect("map");
        }
        out
    }

    pub fn filter(&self, keep: impl Fn(&Term) -> bool) -> AlgebraElement {
        let mut out = self.clone();
        out.terms.retain(|t, _| keep(t));
        out
    }

    pub fn with_h_order(&self, h: u32) -> AlgebraElement {
        let mut out = self.clone();
        out.h_order = h;
        out.terms.retain(|t, _| t.h <= h);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(t, v)| json!({"h": t.h, "word": t.word.iter().map(|g| g.to_json()).collect::<Vec<_>>(), "c": v.to_json()}))
                .collect(),
        )
    }

    pub fn from_json(v: &Value, mode: Mode, h_order: u32) -> Result<AlgebraElement> {
        let arr = v.as_array().ok_or_else(|| Error::Parse("element must be a list of terms".into()))?;
        let mut out = AlgebraElement::zero(mode, h_order);
        for t in arr {
            let h = t.get("h").and_then(|x| x.as_u64()).unwrap_or(0) as u32;
            let word = t
                .get("word")
                .and_then(|x| x.as_array())
                .ok_or_else(|| Error::Parse("term word".into()))?
                .iter()
                .map(Gen::from_json)
                .collect::<Result<Vec<_>>>()?;
            let c = match t.get("c") {
                Some(c) => Scalar::from_json(c)?,
                None => Scalar::one(mode),
            };
            out.add_term(Term { h, word }, c)?;
        }
        Ok(out)
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (t, v) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", v.to_json())?;
            if t.h > 0 {
                write!(f, " h^{}", t.h)?;
            }
            for g in &t.word {
                write!(f, " {g}")?;
            }
        }
        Ok(())
    }
}
