//! Coproduct Δ(t(u)) = t′(u) + t″(u) + h t′(u)t″(u) per site, and the counit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::Result;
use crate::report::Report;

use super::algebra::{AlgebraElement, Gen, Term};
use super::engine::RttAlgebra;

/// Tensor factors are told apart by `Gen::copy`: 1 is the left factor, 2 the right.
pub const LEFT: u8 = 1;
pub const RIGHT: u8 = 2;

pub fn coproduct_gen(alg: &RttAlgebra, g: Gen) -> Result<AlgebraElement> {
    let one = crate::series::Scalar::one(alg.mode);
    let mut out = alg.zero();
    out.add_term(Term { h: 0, word: vec![g.on_copy(LEFT)] }, one.clone())?;
    out.add_term(Term { h: 0, word: vec![g.on_copy(RIGHT)] }, one.clone())?;
    for l1 in 0..=g.tdeg {
        for r in 0..alg.n {
            let a = Gen { copy: LEFT, tdeg: l1, col: r as u8, ..g };
            let b = Gen { copy: RIGHT, tdeg: g.tdeg - l1, row: r as u8, ..g };
            out.add_term(Term { h: 1, word: vec![a, b] }, one.clone())?;
        }
    }
    Ok(out)
}

/// Δ extended multiplicatively; the input lives on copy 0.
pub fn coproduct(alg: &RttAlgebra, x: &AlgebraElement) -> Result<AlgebraElement> {
    let mut out = alg.zero().with_h_order(x.h_order);
    for (t, c) in &x.terms {
        let mut p = AlgebraElement::monomial(x.mode, x.h_order, vec![], t.h, c.clone());
        for g in &t.word {
            p = p.mul(&coproduct_gen(alg, *g)?)?;
        }
        out = out.add(&p)?;
    }
    Ok(out)
}

/// ε on the factor `copy` (T ↦ 1, so t ↦ 0); the other factor is moved to copy 0.
pub fn counit_on(x: &AlgebraElement, copy: u8) -> AlgebraElement {
    x.filter(|t| t.word.iter().all(|g| g.copy != copy)).map_gens(|g| g.on_copy(0))
}

/// (ε⊗id)Δ = (id⊗ε)Δ = id on random words of length ≤ max_len.
pub fn check_counit(alg: &RttAlgebra, trials: usize, seed: u64, max_len: usize, l: usize) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for _ in 0..trials {
        let len = rng.gen_range(0..=max_len);
        let x = alg.word(&alg.random_word(&mut rng, len, l));
        let d = coproduct(alg, &x)?;
        for copy in [LEFT, RIGHT] {
            if counit_on(&d, copy) != x {
                bad += 1;
            }
        }
    }
    Ok(Report::exact("counit", bad == 0).detail("trials", trials).detail("failures", bad).with_window(json!({"max_word_len": max_len, "L": l})))
}

/// Δ maps every relation into the relation ideal: nf(Δ(rel)) = 0 on both factors.
pub fn check_hopf_ideal(alg: &RttAlgebra, l: usize) -> Result<Report> {
    let rels = alg.emit_relations(l)?;
    let mut bad = Vec::new();
    let mut n = 0;
    for rel in rels.all() {
        n += 1;
        let d = alg.normal_form(&coproduct(alg, &rel.element)?)?;
        if !d.is_zero() {
            bad.push(json!({"u": rel.u, "v": rel.v, "sites": [rel.sites.0 + 1, rel.sites.1 + 1], "terms": d.len()}));
        }
    }
    Ok(Report::exact("hopf_ideal", bad.is_empty())
        .detail("relations", n)
        .detail("failures", bad)
        .with_window(json!({"L": l, "h_order": alg.h_order})))
}
