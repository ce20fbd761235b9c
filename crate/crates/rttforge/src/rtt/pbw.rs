//! Dimension counts of U(R) truncated to words of bounded length and tdeg ≤ L.

use std::collections::HashMap;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::Result;
use crate::linalg::{Echelon, Row};
use crate::report::Report;

use super::algebra::{AlgebraElement, Gen, Term};
use super::engine::RttAlgebra;

/// Number of sorted words of length ≤ max_len in `g` letters, by enumeration.
pub fn sorted_word_count(g: usize, max_len: usize) -> usize {
    fn rec(g: usize, start: usize, left: usize) -> usize {
        if left == 0 {
            return 1;
        }
        1 + (start..g).map(|k| rec(g, k, left - 1)).sum::<usize>()
    }
    rec(g, 0, max_len)
}

/// C(g + m, m), the closed form of [`sorted_word_count`].
pub fn monomial_count(g: usize, m: usize) -> usize {
    (1..=m).fold(1usize, |acc, k| acc * (g + k) / k)
}

#[derive(Clone, Debug)]
pub struct PbwTable {
    pub generators: usize,
    pub max_len: usize,
    pub l: usize,
    pub h_order: u32,
    pub classical: usize,
    /// Quotient dimension of each h layer.
    pub quantum: Vec<usize>,
    pub rows: usize,
    pub rank: usize,
}

impl PbwTable {
    pub fn flat(&self) -> bool {
        self.quantum.iter().all(|&d| d == self.classical)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "generators": self.generators,
            "max_word_len": self.max_len,
            "L": self.l,
            "h_order": self.h_order,
            "classical": self.classical,
            "quantum": self.quantum,
            "relation_rows": self.rows,
            "rank": self.rank,
        })
    }
}

fn words(gens: &[Gen], max_len: usize) -> Vec<Vec<Gen>> {
    let mut out = vec![vec![]];
    let mut last = vec![vec![]];
    for _ in 0..max_len {
        let next: Vec<Vec<Gen>> = last
            .iter()
            .flat_map(|w: &Vec<Gen>| {
                gens.iter().map(move |g| {
                    let mut v = w.clone();
                    v.push(*g);
                    v
                })
            })
            .collect();
        out.extend(next.iter().cloned());
        last = next;
    }
    out
}

/// Ranks the two-sided relation consequences on the span of h^e·w, |w| ≤ max_len.
/// Columns are h-major, so the pivots of each h layer count the torsion-free part of that layer.
pub fn pbw_count(alg: &RttAlgebra, l: usize, max_len: usize) -> Result<PbwTable> {
    let gens = alg.generators(l);
    let h_order = alg.h_order;
    let all_words = words(&gens, max_len);
    let width = all_words.len();
    let mut col: HashMap<(u32, Vec<Gen>), usize> = HashMap::new();
    for h in 0..=h_order {
        for (k, w) in all_words.iter().enumerate() {
            col.insert((h, w.clone()), h as usize * width + k);
        }
    }
    let mut base: Vec<AlgebraElement> = Vec::new();
    if max_len >= 2 {
        for a in &gens {
            for b in &gens {
                base.push(alg.relation(*a, *b)?);
            }
        }
        for rel in alg.emit_relations(l)?.pole {
            base.push(rel.element);
        }
    }
    let keep = |t: &Term| t.word.iter().all(|g| g.tdeg as usize <= l);
    let base: Vec<AlgebraElement> = base.into_iter().map(|r| r.filter(keep)).filter(|r| !r.is_zero()).collect();
    let pads: Vec<(Vec<Gen>, Vec<Gen>)> = {
        let short = words(&gens, max_len.saturating_sub(2));
        let mut v = Vec::new();
        for x in &short {
            for y in &short {
                if x.len() + y.len() + 2 <= max_len {
                    v.push((x.clone(), y.clone()));
                }
            }
        }
        v
    };
    let rows: Vec<Row> = base
        .par_iter()
        .flat_map_iter(|rel| {
            let mut out = Vec::new();
            for (x, y) in &pads {
                for e in 0..=h_order {
                    let mut row = Row::new();
                    for (t, c) in &rel.terms {
                        let h = t.h + e;
                        if h > h_order {
                            continue;
                        }
                        let mut w = x.clone();
                        w.extend_from_slice(&t.word);
                        w.extend_from_slice(y);
                        let k = col[&(h, w)];
                        let v = match row.remove(&k) {
                            Some(old) => old.add(c).expect("same mode"),
                            None => c.clone(),
                        };
                        if !v.is_zero() {
                            row.insert(k, v);
                        }
                    }
                    if !row.is_empty() {
                        out.push(row);
                    }
                }
            }
            out
        })
        .collect();
    let mut ech = Echelon::new(alg.mode);
    for r in &rows {
        ech.insert(r.clone())?;
    }
    let mut pivots = vec![0usize; h_order as usize + 1];
    for &p in ech.pivot_cols() {
        pivots[p / width] += 1;
    }
    Ok(PbwTable {
        generators: gens.len(),
        max_len,
        l,
        h_order,
        classical: sorted_word_count(gens.len(), max_len),
        quantum: pivots.iter().map(|p| width - p).collect(),
        rows: rows.len(),
        rank: ech.rank(),
    })
}

pub fn check_pbw(alg: &RttAlgebra, l: usize, max_len: usize) -> Result<Report> {
    let t = pbw_count(alg, l, max_len)?;
    Ok(Report::flag("pbw_flatness", t.flat())
        .detail("table", t.to_json())
        .detail("R", alg.r.label.clone())
        .with_window(json!({"max_word_len": max_len, "L": l, "h_order": alg.h_order})))
}

