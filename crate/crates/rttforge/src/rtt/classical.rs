//! The h⁰ part of the RTT commutators against the Lie bialgebra model.

use std::collections::BTreeMap;

use serde_json::json;

use crate::error::{Error, Result};
use crate::liebialg::{LieModel, TLabel};
use crate::report::Report;
use crate::series::Scalar;

use super::algebra::{AlgebraElement, Gen};
use super::engine::RttAlgebra;

fn label(g: Gen) -> TLabel {
    TLabel { site: g.site as usize, row: g.row as usize, col: g.col as usize, tdeg: g.tdeg as usize }
}

/// The h⁰ part of x as t-coordinates; it must be linear.
pub fn linear_part(x: &AlgebraElement) -> Result<BTreeMap<TLabel, Scalar>> {
    let mut out = BTreeMap::new();
    for (t, v) in &x.terms {
        if t.h != 0 {
            continue;
        }
        match t.word.as_slice() {
            [g] => {
                out.insert(label(*g), v.clone());
            }
            _ => return Err(Error::Spec(format!("h^0 part of a commutator has a word of length {}", t.word.len()))),
        }
    }
    Ok(out)
}

/// [t_A, t_B] mod h against the Poisson bracket and, through t ↦ x/N, the loop bracket.
pub fn classical_limit_check(alg: &RttAlgebra, l: usize) -> Result<Report> {
    let model = LieModel::new(alg.cfg.clone(), 2 * l + 2)?;
    let gens = alg.generators(l);
    let (mut poisson_bad, mut bracket_bad, mut anti_bad) = (Vec::new(), 0, 0);
    for &a in &gens {
        for &b in &gens {
            let c = linear_part(&*alg.commutator(a, b)?)?;
            let p = model.poisson(label(a), label(b))?;
            let p: BTreeMap<TLabel, Scalar> = p.into_iter().filter(|(_, v)| !v.is_zero()).collect();
            if c != p {
                poisson_bad.push(json!({"a": a.to_json(), "b": b.to_json()}));
            }
            let xa = model.t_to_x(&[(label(a), Scalar::one(alg.mode))].into_iter().collect())?;
            let xb = model.t_to_x(&[(label(b), Scalar::one(alg.mode))].into_iter().collect())?;
            let lhs = model.t_to_x(&c)?;
            let rhs = model.bracket_full(&xa, &xb)?;
            if !lhs.sub(&rhs)?.is_zero() {
                bracket_bad += 1;
            }
            let back = linear_part(&*alg.commutator(b, a)?)?;
            let mut sum = AlgebraElement::zero(alg.mode, 0);
            for (k, v) in c.iter().chain(back.iter()) {
                sum.add_term(super::algebra::Term { h: 0, word: vec![Gen::new(k.site, k.tdeg, k.row, k.col)] }, v.clone())?;
            }
            if !sum.is_zero() {
                anti_bad += 1;
            }
        }
    }
    let w = json!({"L": l, "sites": alg.sites(), "z": alg.cfg.z.iter().map(|z| z.to_json()).collect::<Vec<_>>()});
    Ok(Report::all(
        "classical_limit",
        vec![
            Report::exact("poisson_constants", poisson_bad.is_empty()).detail("failures", poisson_bad).with_window(w.clone()),
            Report::exact("loop_bracket_constants", bracket_bad == 0).detail("failures", bracket_bad).with_window(w.clone()),
            Report::exact("antisymmetry", anti_bad == 0).detail("failures", anti_bad).with_window(w),
        ],
    )
    .detail("pairs", gens.len() * gens.len()))
}
