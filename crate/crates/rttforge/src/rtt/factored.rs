//! Reordering operators X_ij(a⊗b) = m_ij⁻¹(b·a) realized by normal forms, and the
//! product on A_1⊗…⊗A_n assembled from them.

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::Report;
use crate::series::Scalar;

use super::algebra::{AlgebraElement, Gen, Term};
use super::engine::RttAlgebra;

/// Σ c · h^e · (w_1 ⊗ … ⊗ w_k), each w_s a sorted word.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotTensor {
    pub h_order: u32,
    pub terms: BTreeMap<(u32, Vec<Vec<Gen>>), Scalar>,
}

impl SlotTensor {
    pub fn zero(h_order: u32) -> SlotTensor {
        SlotTensor { h_order, terms: BTreeMap::new() }
    }

    pub fn pure(h_order: u32, words: Vec<Vec<Gen>>, c: Scalar) -> SlotTensor {
        let mut t = SlotTensor::zero(h_order);
        t.add_term(0, words, c).expect("pure");
        t
    }

    pub fn add_term(&mut self, h: u32, words: Vec<Vec<Gen>>, c: Scalar) -> Result<()> {
        if h > self.h_order || c.is_zero() {
            return Ok(());
        }
        let k = (h, words);
        match self.terms.get_mut(&k) {
            Some(v) => {
                *v = v.add(&c)?;
                if v.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
        Ok(())
    }

    pub fn add(&self, o: &SlotTensor) -> Result<SlotTensor> {
        let mut out = self.clone();
        for ((h, w), c) in &o.terms {
            out.add_term(*h, w.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn slots(&self) -> Option<usize> {
        self.terms.keys().next().map(|(_, w)| w.len())
    }
}

pub struct Factored<'a> {
    pub alg: &'a RttAlgebra,
    cache: RwLock<HashMap<(Vec<Gen>, Vec<Gen>), AlgebraElement>>,
}

fn split_at_site(word: &[Gen], site: u8) -> (Vec<Gen>, Vec<Gen>) {
    let k = word.iter().position(|g| g.site > site).unwrap_or(word.len());
    (word[..k].to_vec(), word[k..].to_vec())
}

impl<'a> Factored<'a> {
    pub fn new(alg: &'a RttAlgebra) -> Factored<'a> {
        Factored { alg, cache: RwLock::new(HashMap::new()) }
    }

    fn nf_product(&self, b: &[Gen], a: &[Gen]) -> Result<AlgebraElement> {
        let key = (b.to_vec(), a.to_vec());
        if let Some(v) = self.cache.read().expect("cache").get(&key) {
            return Ok(v.clone());
        }
        let mut w = b.to_vec();
        w.extend_from_slice(a);
        let v = self.alg.normal_form(&self.alg.word(&w))?;
        self.cache.write().expect("cache").insert(key, v.clone());
        Ok(v)
    }

    /// X_ij acting on slots (si, sj), which hold an A_i word and an A_j word, i < j.
    pub fn x_apply(&self, t: &SlotTensor, si: usize, sj: usize) -> Result<SlotTensor> {
        let mut out = SlotTensor::zero(t.h_order);
        for ((h, words), c) in &t.terms {
            let (a, b) = (&words[si], &words[sj]);
            if a.is_empty() || b.is_empty() {
                out.add_term(*h, words.clone(), c.clone())?;
                continue;
            }
            let (i, j) = (a[0].site, b[0].site);
            if i >= j {
                return Err(Error::Shape(format!("X_ij needs site {} < site {}", i + 1, j + 1)));
            }
            for (term, v) in &self.nf_product(b, a)?.terms {
                let (left, right) = split_at_site(&term.word, i);
                let mut nw = words.clone();
                nw[si] = left;
                nw[sj] = right;
                out.add_term(h + term.h, nw, c.mul(v)?)?;
            }
        }
        Ok(out)
    }

    /// Product inside one A_i: normal form of the concatenation.
    fn site_mul(&self, a: &[Gen], b: &[Gen]) -> Result<AlgebraElement> {
        if a.is_empty() || b.is_empty() {
            let mut w = a.to_vec();
            w.extend_from_slice(b);
            return Ok(self.alg.word(&w));
        }
        self.nf_product(a, b)
    }

    /// m on slot pairs (k, n + k) for every k.
    fn multiply_pairs(&self, t: &SlotTensor, n: usize) -> Result<SlotTensor> {
        let mut out = SlotTensor::zero(t.h_order);
        for ((h, words), c) in &t.terms {
            let mut partial: Vec<(u32, Vec<Vec<Gen>>, Scalar)> = vec![(*h, vec![], c.clone())];
            for k in 0..n {
                let p = self.site_mul(&words[k], &words[n + k])?;
                let mut next = Vec::new();
                for (h0, ws, c0) in &partial {
                    for (term, v) in &p.terms {
                        if h0 + term.h > t.h_order {
                            continue;
                        }
                        let mut w2 = ws.clone();
                        w2.push(term.word.clone());
                        next.push((h0 + term.h, w2, c0.mul(v)?));
                    }
                }
                partial = next;
            }
            for (h0, ws, c0) in partial {
                out.add_term(h0, ws, c0)?;
            }
        }
        Ok(out)
    }

    /// (a_1⊗…⊗a_n)·(b_1⊗…⊗b_n): X_ij on slots (n + i, j) for i ascending and j from n down to i + 1, then m⊗…⊗m.
    pub fn product(&self, x: &SlotTensor, y: &SlotTensor) -> Result<SlotTensor> {
        let n = self.alg.sites();
        let h_order = x.h_order.min(y.h_order);
        let mut t = SlotTensor::zero(h_order);
        for ((h1, w1), c1) in &x.terms {
            for ((h2, w2), c2) in &y.terms {
                let mut w = w1.clone();
                w.extend(w2.iter().cloned());
                t.add_term(h1 + h2, w, c1.mul(c2)?)?;
            }
        }
        for i in 0..n {
            for j in (i + 1..n).rev() {
                t = self.x_apply(&t, n + i, j)?;
            }
        }
        self.multiply_pairs(&t, n)
    }

    pub fn unit(&self, h_order: u32) -> SlotTensor {
        SlotTensor::pure(h_order, vec![vec![]; self.alg.sites()], Scalar::one(self.alg.mode))
    }

    /// φ(a_1⊗…⊗a_n) = a_1⋯a_n in U(R)_z.
    pub fn to_algebra(&self, t: &SlotTensor) -> Result<AlgebraElement> {
        let mut out = self.alg.zero().with_h_order(t.h_order);
        for ((h, ws), c) in &t.terms {
            out.add_term(Term { h: *h, word: ws.concat() }, c.clone())?;
        }
        Ok(out)
    }

    pub fn random_element(&self, rng: &mut impl Rng, terms: usize, l: usize, h_order: u32) -> SlotTensor {
        let n = self.alg.sites();
        let nn = self.alg.n;
        let mut t = SlotTensor::zero(h_order);
        for _ in 0..terms {
            let words: Vec<Vec<Gen>> = (0..n)
                .map(|s| {
                    if rng.gen_bool(0.5) {
                        vec![Gen::new(s, rng.gen_range(0..=l), rng.gen_range(0..nn), rng.gen_range(0..nn))]
                    } else {
                        vec![]
                    }
                })
                .collect();
            let h = rng.gen_range(0..=h_order.min(1));
            t.add_term(h, words, Scalar::int(self.alg.mode, rng.gen_range(-2..=2))).expect("term");
        }
        t
    }
}

/// Associativity and unit of the factored product, with φ(x·y) = nf(φ(x)φ(y)) as a second route.
pub fn check_factored_assoc(alg: &RttAlgebra, trials: usize, seed: u64, l: usize) -> Result<Report> {
    let f = Factored::new(alg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = alg.h_order;
    let (mut assoc, mut unit, mut hom) = (0, 0, 0);
    for _ in 0..trials {
        let x = f.random_element(&mut rng, 2, l, h);
        let y = f.random_element(&mut rng, 2, l, h);
        let z = f.random_element(&mut rng, 2, l, h);
        let xy = f.product(&x, &y)?;
        if f.product(&xy, &z)? != f.product(&x, &f.product(&y, &z)?)? {
            assoc += 1;
        }
        let one = f.unit(h);
        if f.product(&one, &x)? != x || f.product(&x, &one)? != x {
            unit += 1;
        }
        let direct = alg.normal_form(&f.to_algebra(&x)?.mul(&f.to_algebra(&y)?)?)?;
        if f.to_algebra(&xy)? != direct {
            hom += 1;
        }
    }
    let w = json!({"sites": alg.sites(), "L": l, "h_order": h});
    Ok(Report::all(
        "factored_product",
        vec![
            Report::exact("associativity", assoc == 0).detail("failures", assoc).with_window(w.clone()),
            Report::exact("unit", unit == 0).detail("failures", unit).with_window(w.clone()),
            Report::exact("matches_normal_form_product", hom == 0).detail("failures", hom).with_window(w),
        ],
    )
    .detail("trials", trials))
}

/// Hexagon X12 X13 X23 = X23 X13 X12, module laws and unit laws on generators, three sites.
pub fn check_hexagon(alg: &RttAlgebra, l: usize) -> Result<Report> {
    if alg.sites() < 3 {
        return Err(Error::Spec("the hexagon needs three sites".into()));
    }
    let f = Factored::new(alg);
    let h = alg.h_order;
    let one = Scalar::one(alg.mode);
    let gens = |s: usize| alg.generators(l).into_iter().filter(move |g| g.site as usize == s);
    let (mut hex, mut module, mut unit, mut cases) = (0, 0, 0, 0);
    for a in gens(0) {
        for b in gens(1) {
            for c in gens(2) {
                cases += 1;
                let t = SlotTensor::pure(h, vec![vec![a], vec![b], vec![c]], one.clone());
                let lhs = f.x_apply(&f.x_apply(&f.x_apply(&t, 1, 2)?, 0, 2)?, 0, 1)?;
                let rhs = f.x_apply(&f.x_apply(&f.x_apply(&t, 0, 1)?, 0, 2)?, 1, 2)?;
                if lhs != rhs {
                    hex += 1;
                }
            }
        }
    }
    for a in gens(0) {
        for b in gens(1) {
            // X(a ⊗ bc) = (1⊗m) X¹² X¹³ (a⊗b⊗c), X(ab ⊗ c) = (m⊗1) X²³ X¹³ (a⊗b⊗c)
            for c in gens(1).take(3) {
                let bc = alg.normal_form(&alg.word(&[b, c]))?;
                let mut lhs = SlotTensor::zero(h);
                for (t, v) in &bc.terms {
                    let x = f.x_apply(&SlotTensor::pure(h, vec![vec![a], t.word.clone()], v.clone()), 0, 1)?;
                    lhs = lhs.add(&shift_h(&x, t.h))?;
                }
                let t3 = SlotTensor::pure(h, vec![vec![a], vec![b], vec![c]], one.clone());
                let rhs = merge(&f, &f.x_apply(&f.x_apply(&t3, 0, 2)?, 0, 1)?, 1)?;
                if lhs != rhs {
                    module += 1;
                }
            }
            for c in gens(0).take(3) {
                let ac = alg.normal_form(&alg.word(&[a, c]))?;
                let mut lhs = SlotTensor::zero(h);
                for (t, v) in &ac.terms {
                    let x = f.x_apply(&SlotTensor::pure(h, vec![t.word.clone(), vec![b]], v.clone()), 0, 1)?;
                    lhs = lhs.add(&shift_h(&x, t.h))?;
                }
                let t3 = SlotTensor::pure(h, vec![vec![a], vec![c], vec![b]], one.clone());
                let rhs = merge(&f, &f.x_apply(&f.x_apply(&t3, 0, 2)?, 1, 2)?, 0)?;
                if lhs != rhs {
                    module += 1;
                }
            }
            for t in [vec![vec![a], vec![]], vec![vec![], vec![b]]] {
                let t = SlotTensor::pure(h, t, one.clone());
                if f.x_apply(&t, 0, 1)? != t {
                    unit += 1;
                }
            }
        }
    }
    let w = json!({"L": l, "h_order": h});
    Ok(Report::all(
        "x_operator_laws",
        vec![
            Report::exact("hexagon", hex == 0).detail("triples", cases).detail("failures", hex).with_window(w.clone()),
            Report::exact("module_laws", module == 0).detail("failures", module).with_window(w.clone()),
            Report::exact("unit_laws", unit == 0).detail("failures", unit).with_window(w),
        ],
    ))
}

fn shift_h(t: &SlotTensor, k: u32) -> SlotTensor {
    let mut out = SlotTensor::zero(t.h_order);
    for ((h, w), c) in &t.terms {
        out.add_term(h + k, w.clone(), c.clone()).expect("shift");
    }
    out
}

/// Multiplies slot k with slot k + 1 inside one site.
fn merge(f: &Factored, t: &SlotTensor, k: usize) -> Result<SlotTensor> {
    let mut out = SlotTensor::zero(t.h_order);
    for ((h, ws), c) in &t.terms {
        let p = f.site_mul(&ws[k], &ws[k + 1])?;
        for (term, v) in &p.terms {
            let mut nw = ws.clone();
            nw[k] = term.word.clone();
            nw.remove(k + 1);
            out.add_term(h + term.h, nw, c.mul(v)?)?;
        }
    }
    Ok(out)
}
