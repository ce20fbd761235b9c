//! Exact sparse row echelon forms over the scalar field.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::series::{Mode, Scalar};

pub type Row = BTreeMap<usize, Scalar>;

/// Incremental echelon basis. Each stored row has leading coefficient 1 at
/// its pivot column and no entries in earlier pivot columns of later rows.
#[derive(Clone, Debug)]
pub struct Echelon {
    mode: Mode,
    pivots: BTreeMap<usize, Row>,
}

fn axpy(row: &mut Row, c: &Scalar, other: &Row) -> Result<()> {
    for (k, v) in other {
        let p = c.mul(v)?;
        match row.get_mut(k) {
            Some(x) => {
                *x = x.add(&p)?;
                if x.is_zero() {
                    row.remove(k);
                }
            }
            None => {
                if !p.is_zero() {
                    row.insert(*k, p);
                }
            }
        }
    }
    Ok(())
}

impl Echelon {
    pub fn new(mode: Mode) -> Self {
        Echelon { mode, pivots: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_cols(&self) -> impl Iterator<Item = &usize> {
        self.pivots.keys()
    }

    /// Remainder of `row` modulo the span.
    pub fn reduce(&self, mut row: Row) -> Result<Row> {
        row.retain(|_, v| !v.is_zero());
        let mut cursor = 0usize;
        loop {
            let next = row.range(cursor..).map(|(k, _)| *k).find(|k| self.pivots.contains_key(k));
            let Some(c) = next else { break };
            let f = row[&c].neg();
            axpy(&mut row, &f, &self.pivots[&c])?;
            cursor = c + 1;
        }
        Ok(row)
    }

    /// Adds a row; returns whether it was independent.
    pub fn insert(&mut self, row: Row) -> Result<bool> {
        let r = self.reduce(row)?;
        let Some((&c, lead)) = r.iter().next() else { return Ok(false) };
        let inv = lead.inv()?;
        let r: Row = r.iter().map(|(k, v)| Ok((*k, v.mul(&inv)?))).collect::<Result<_>>()?;
        self.pivots.insert(c, r);
        Ok(true)
    }

    pub fn contains(&self, row: Row) -> Result<bool> {
        Ok(self.reduce(row)?.is_empty())
    }

    /// Basis of the solutions x (length `ncols`) of row·x = 0 for all stored rows.
    pub fn nullspace(&self, ncols: usize) -> Result<Vec<Vec<Scalar>>> {
        // back-substitute to reduced form
        let mut rref: BTreeMap<usize, Row> = BTreeMap::new();
        for (&c, row) in self.pivots.iter().rev() {
            let mut r = row.clone();
            let cols: Vec<usize> = r.keys().copied().filter(|k| *k != c && rref.contains_key(k)).collect();
            for k in cols {
                if let Some(v) = r.get(&k).cloned() {
                    axpy(&mut r, &v.neg(), &rref[&k])?;
                }
            }
            rref.insert(c, r);
        }
        let mut out = Vec::new();
        for free in (0..ncols).filter(|k| !rref.contains_key(k)) {
            let mut x = vec![Scalar::zero(self.mode); ncols];
            x[free] = Scalar::one(self.mode);
            for (&c, r) in &rref {
                if let Some(v) = r.get(&free) {
                    x[c] = v.neg();
                }
            }
            out.push(x);
        }
        Ok(out)
    }
}

/// Rank of a list of sparse rows.
pub fn rank(mode: Mode, rows: impl IntoIterator<Item = Row>) -> Result<usize> {
    let mut e = Echelon::new(mode);
    for r in rows {
        e.insert(r)?;
    }
    Ok(e.rank())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: &[(usize, i64)]) -> Row {
        v.iter().map(|&(k, x)| (k, Scalar::int(Mode::Exact, x))).collect()
    }

    #[test]
    fn rank_and_nullspace() {
        let rows = vec![row(&[(0, 1), (1, 2), (2, 3)]), row(&[(0, 2), (1, 4), (2, 6)]), row(&[(1, 1), (2, 1)])];
        let mut e = Echelon::new(Mode::Exact);
        for r in rows.clone() {
            e.insert(r).unwrap();
        }
        assert_eq!(e.rank(), 2);
        let ns = e.nullspace(3).unwrap();
        assert_eq!(ns.len(), 1);
        for r in rows {
            let mut acc = Scalar::zero(Mode::Exact);
            for (k, v) in r {
                acc = acc.add(&v.mul(&ns[0][k]).unwrap()).unwrap();
            }
            assert!(acc.is_zero());
        }
    }
}
