//! Shifted evaluation representations T(u) ↦ R(u − a) and their tensor products,
//! used to cross-check the rewriting engine.

use std::collections::HashMap;
use std::sync::RwLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::liebialg::{gbinom, PunctureConfig};
use crate::report::Report;
use crate::rtt::algebra::{AlgebraElement, Gen};
use crate::rtt::engine::RttAlgebra;
use crate::rtt::hopf::{coproduct, LEFT, RIGHT};
use crate::rtt::poler::PoleR;
use crate::rtt::qdet::{first_leg_blocks, qdet_algebra, qdet_ops};
use crate::series::{pow_scalar, HSeries, Mode, Scalar, Shape};
use crate::tensor::TensorOp;

/// T_i(u) ↦ R^{01}(u + d_{i1})⋯R^{0m}(u + d_{im}) with d_{ik} = z_i − z_n − a_k; leg 0 is the matrix index.
#[derive(Debug)]
pub struct TensorRep {
    pub r: PoleR,
    pub cfg: PunctureConfig,
    pub points: Vec<Scalar>,
    pub h_order: i64,
    cache: RwLock<HashMap<(usize, usize), Vec<TensorOp<HSeries>>>>,
}

impl Clone for TensorRep {
    fn clone(&self) -> TensorRep {
        TensorRep::new(self.r.clone(), self.cfg.clone(), self.points.clone(), self.h_order).expect("validated")
    }
}

impl TensorRep {
    pub fn new(r: PoleR, cfg: PunctureConfig, points: Vec<Scalar>, h_order: i64) -> Result<TensorRep> {
        if points.is_empty() {
            return Err(Error::Spec("a tensor representation needs at least one point".into()));
        }
        let rep = TensorRep { r, cfg, points, h_order, cache: RwLock::new(HashMap::new()) };
        for i in 0..rep.sites() {
            for k in 0..rep.points.len() {
                if rep.offset(i, k)?.is_zero() {
                    return Err(Error::NotInvertible(format!("R(u + d) is singular at u = 0 for site {} and point {}", i + 1, k + 1)));
                }
            }
        }
        Ok(rep)
    }

    /// V(a) on one site at z = 0.
    pub fn eval(r: PoleR, a: Scalar, h_order: i64) -> Result<TensorRep> {
        let spec = r.spec().unwrap_or_else(|| crate::rmatrix::RMatrixSpec::yang(r.n));
        TensorRep::new(r, PunctureConfig::single(spec), vec![a], h_order)
    }

    pub fn for_algebra(alg: &RttAlgebra, points: &[i64]) -> Result<TensorRep> {
        TensorRep::new(alg.r.clone(), alg.cfg.clone(), points.iter().map(|&a| Scalar::int(Mode::Exact, a)).collect(), alg.h_order as i64)
    }

    pub fn sites(&self) -> usize {
        self.cfg.sites()
    }

    pub fn n(&self) -> usize {
        self.r.n
    }

    fn offset(&self, site: usize, k: usize) -> Result<Scalar> {
        let last = self.sites() - 1;
        self.cfg.z[site].sub(&self.cfg.z[last])?.sub(&self.points[k])
    }

    fn shape(&self) -> Shape {
        Shape::scalar(Mode::Exact, self.h_order)
    }

    /// X_ℓ with R(u + d) = 1 + h Σ_ℓ X_ℓ u^ℓ: X_ℓ = −C(−1)^ℓ (d − ch)^{−ℓ−1}.
    fn x_coeff(&self, d: &Scalar, l: usize) -> Result<TensorOp<HSeries>> {
        let shape = self.shape();
        let c = &self.r.shift;
        let mut s = HSeries::zero(&shape);
        let l = l as i64;
        for j in 0..=self.h_order {
            let v = Scalar::int(Mode::Exact, gbinom(l + j, j)).mul(&pow_scalar(c, j)?)?.mul(&pow_scalar(d, -l - 1 - j)?)?;
            s = s.add(&HSeries::monomial(&shape, j, &[], v)?)?;
        }
        let sign = if l % 2 == 0 { Scalar::int(Mode::Exact, -1) } else { Scalar::one(Mode::Exact) };
        let s = s.scale(&sign)?;
        self.r.c_op.map(|v| s.scale(v))
    }

    /// Images of (T_site(u) − 1)/h coefficients u^0..u^lmax on legs 0..m, before the leg-0 split.
    fn full_images(&self, site: usize, lmax: usize) -> Result<Vec<TensorOp<HSeries>>> {
        let m = self.points.len();
        let legs = m + 1;
        let shape = self.shape();
        let h = HSeries::h(&shape);
        // polynomials in u: index ℓ ↦ operator
        let xs: Vec<Vec<TensorOp<HSeries>>> = (0..m)
            .map(|k| {
                let d = self.offset(site, k)?;
                (0..=lmax).map(|l| self.x_coeff(&d, l)?.leg_embed(&[1, k + 2], legs)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        // (Π_k (1 + hX_k) − 1)/h = Σ_{S ≠ ∅} h^{|S|−1} Π_{k∈S} X_k, S increasing
        let zero = || TensorOp::<HSeries>::zero(self.n(), legs);
        let mut total: Vec<TensorOp<HSeries>> = vec![zero(); lmax + 1];
        // acc[s] = Σ over subsets ending before the current k of h^{|S|−1}Π X, as polynomials
        let mut acc: Vec<Vec<TensorOp<HSeries>>> = Vec::new();
        for x in &xs {
            let mut fresh: Vec<TensorOp<HSeries>> = x.clone();
            for prev in &acc {
                for (a, pa) in prev.iter().enumerate() {
                    for (b, xb) in x.iter().enumerate() {
                        if a + b > lmax {
                            continue;
                        }
                        let p = pa.mul(xb)?.scale(&h)?;
                        fresh[a + b] = fresh[a + b].add(&p)?;
                    }
                }
            }
            for (t, f) in total.iter_mut().zip(&fresh) {
                *t = t.add(f)?;
            }
            acc.push(fresh);
        }
        Ok(total)
    }

    /// Image of t_{site, pq, ℓ}: an operator on V^{⊗m}.
    pub fn image_gen(&self, g: Gen) -> Result<TensorOp<HSeries>> {
        let (site, l) = (g.site as usize, g.tdeg as usize);
        let have = self.cache.read().expect("cache").get(&(site, 0)).map(|v| v.len()).unwrap_or(0);
        if have <= l {
            let lmax = (l + 1).max(2 * have).max(4);
            let full = self.full_images(site, lmax)?;
            self.cache.write().expect("cache").insert((site, 0), full);
        }
        let full = self.cache.read().expect("cache")[&(site, 0)][l].clone();
        let m = self.points.len();
        let nm = self.n().pow(m as u32);
        let (p, q) = (g.row as usize, g.col as usize);
        let mut out = TensorOp::zero(self.n(), m);
        for (&(r, c), v) in full.entries() {
            if r / nm == p && c / nm == q {
                out.add_entry(r % nm, c % nm, v.clone())?;
            }
        }
        Ok(out)
    }

    /// Image of an element on copy 0.
    pub fn image(&self, x: &AlgebraElement) -> Result<TensorOp<HSeries>> {
        let shape = self.shape();
        let m = self.points.len();
        let mut out = TensorOp::zero(self.n(), m);
        for (t, c) in &x.terms {
            if t.h as i64 > self.h_order {
                continue;
            }
            let coef = HSeries::monomial(&shape, t.h as i64, &[], c.clone())?;
            let mut p = TensorOp::identity(self.n(), m, &coef);
            for g in &t.word {
                if g.copy != 0 {
                    return Err(Error::Spec("tensor representation images take copy-0 elements".into()));
                }
                p = p.mul(&self.image_gen(*g)?)?;
            }
            out = out.add(&p)?;
        }
        out.prune();
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({"R": self.r.label, "points": self.points.iter().map(|a| a.to_json()).collect::<Vec<_>>(), "h_order": self.h_order})
    }
}

fn op_zero(t: &TensorOp<HSeries>) -> bool {
    t.entries().values().all(|v| v.is_zero())
}

fn op_max(t: &TensorOp<HSeries>) -> f64 {
    t.entries().values().map(|v| v.max_abs()).fold(0.0, f64::max)
}

/// Every emitted relation has zero image.
pub fn check_relations_in_rep(alg: &RttAlgebra, rep: &TensorRep, l: usize) -> Result<Report> {
    let rels = alg.emit_relations(l)?;
    let all: Vec<_> = rels.all().collect();
    let bad: Vec<Value> = all
        .par_iter()
        .filter_map(|rel| match rep.image(&rel.element) {
            Ok(img) if op_zero(&img) => None,
            Ok(_) => Some(Ok(json!({"u": rel.u, "v": rel.v, "sites": [rel.sites.0 + 1, rel.sites.1 + 1]}))),
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_>>()?;
    Ok(Report::exact("relations_in_rep", bad.is_empty())
        .detail("relations", all.len())
        .detail("failures", bad)
        .detail("rep", rep.to_json())
        .with_window(json!({"L": l, "h_order": alg.h_order})))
}

/// x and nf(x) have the same image in every rep, on random words.
pub fn check_nf_soundness(alg: &RttAlgebra, reps: &[TensorRep], trials: usize, seed: u64, max_len: usize, l: usize) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<Vec<Gen>> = (0..trials)
        .map(|_| {
            let len = rand::Rng::gen_range(&mut rng, 1..=max_len);
            alg.random_word(&mut rng, len, l)
        })
        .collect();
    let bad: usize = words
        .par_iter()
        .map(|w| -> Result<usize> {
            let x = alg.word(w);
            let y = alg.normal_form(&x)?;
            let mut b = 0;
            for rep in reps {
                if !op_zero(&rep.image(&x)?.sub(&rep.image(&y)?)?) {
                    b += 1;
                }
            }
            Ok(b)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok(Report::exact("nf_soundness", bad == 0)
        .detail("words", trials)
        .detail("reps", reps.iter().map(|r| r.to_json()).collect::<Vec<_>>())
        .detail("failures", bad)
        .with_window(json!({"max_word_len": max_len, "L": l, "h_order": alg.h_order})))
}

/// The image of x in V(a₁)⊗V(a₂) equals (ρ_{a₁}⊗ρ_{a₂})(Δx).
pub fn check_functoriality(alg: &RttAlgebra, points: (i64, i64), trials: usize, seed: u64, l: usize) -> Result<Report> {
    let both = TensorRep::for_algebra(alg, &[points.0, points.1])?;
    let left = TensorRep::for_algebra(alg, &[points.0])?;
    let right = TensorRep::for_algebra(alg, &[points.1])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = both.shape();
    let mut bad = 0;
    for _ in 0..trials {
        let len = rand::Rng::gen_range(&mut rng, 1..=2);
        let x = alg.word(&alg.random_word(&mut rng, len, l));
        let d = coproduct(alg, &x)?;
        let mut img = TensorOp::zero(alg.n, 2);
        for (t, c) in &d.terms {
            if t.h as i64 > both.h_order {
                continue;
            }
            let mut p = TensorOp::identity(alg.n, 2, &HSeries::monomial(&shape, t.h as i64, &[], c.clone())?);
            for g in &t.word {
                let (rep, leg) = match g.copy {
                    LEFT => (&left, 1),
                    RIGHT => (&right, 2),
                    _ => return Err(Error::Spec("coproduct left a copy-0 generator".into())),
                };
                p = p.mul(&rep.image_gen(g.on_copy(0))?.leg_embed(&[leg], 2)?)?;
            }
            img = img.add(&p)?;
        }
        if !op_zero(&img.sub(&both.image(&x)?)?) {
            bad += 1;
        }
    }
    Ok(Report::exact("rep_functoriality", bad == 0).detail("trials", trials).detail("failures", bad).detail("points", vec![points.0, points.1]))
}

/// Looks for a tensor rep with ≤ budget points from `candidates` where x and y differ.
pub fn separation_check(alg: &RttAlgebra, x: &AlgebraElement, y: &AlgebraElement, budget: usize, candidates: &[i64]) -> Result<Report> {
    let mut tuples: Vec<Vec<i64>> = Vec::new();
    for k in 1..=budget {
        let mut cur: Vec<Vec<i64>> = vec![vec![]];
        for _ in 0..k {
            let mut next = Vec::new();
            for t in &cur {
                for &a in candidates {
                    if !t.contains(&a) {
                        next.push([t.clone(), vec![a]].concat());
                    }
                }
            }
            cur = next;
        }
        tuples.extend(cur);
    }
    let diff = x.sub(y)?;
    let hit = tuples
        .par_iter()
        .map(|pts| -> Result<Option<(Vec<i64>, f64)>> {
            let rep = match TensorRep::for_algebra(alg, pts) {
                Ok(r) => r,
                Err(Error::NotInvertible(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let img = rep.image(&diff)?;
            Ok(if op_zero(&img) { None } else { Some((pts.clone(), op_max(&img))) })
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .min_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(&b.0)));
    let (separated, witness, residual) = match hit {
        Some((p, r)) => (true, p, r),
        None => (false, vec![], 0.0),
    };
    Ok(Report::flag("separation", separated)
        .detail("separated", separated)
        .detail("witness_points", witness)
        .detail("residual", residual)
        .detail("budget", budget)
        .detail("candidates", candidates.to_vec()))
}

/// In V(a) the qdet coefficients act by the scalars of qdet(R(u − a)).
pub fn check_qdet_in_rep(alg: &RttAlgebra, a: i64, kmax: i64) -> Result<Report> {
    if alg.sites() != 1 {
        return Err(Error::Spec("qdet in a rep is checked on one site".into()));
    }
    let rep = TensorRep::for_algebra(alg, &[a])?;
    let h = alg.h_order as i64;
    let q = qdet_algebra(alg, 0, kmax)?;
    // R(u − a) as a series in u ≥ 0; the u window covers the h-shifts
    let shape = Shape::uni("u", Mode::Exact, h, (0, kmax + h + 1));
    let d = rep.offset(0, 0)?;
    let mut m = TensorOp::identity(alg.n, 2, &HSeries::one(&shape));
    for l in 0..=(kmax + h + 1) as usize {
        let x = rep.x_coeff(&d, l)?;
        let lifted = x.map(|s| {
            let terms: Vec<(Vec<i64>, Scalar)> = s.terms().filter(|(k, _)| k[0] < h).map(|(k, c)| (vec![k[0] + 1, l as i64], c.clone())).collect();
            Ok(HSeries::from_terms(&shape, terms)?.with_support(1, 0, crate::series::INF))
        })?;
        m = m.add(&lifted)?;
    }
    let qd = qdet_ops(&first_leg_blocks(&m)?, &HSeries::one(&shape))?;
    let mut bad = Vec::new();
    for k in 0..=kmax {
        let want = qd.get(0, 0).map(|s| {
            let sh = Shape::scalar(Mode::Exact, h);
            let terms: Vec<(Vec<i64>, Scalar)> = s.terms().filter(|(key, _)| key[1] == k).map(|(key, c)| (vec![key[0]], c.clone())).collect();
            HSeries::from_terms(&sh, terms)
        });
        let want = match want {
            Some(w) => w?,
            None => HSeries::zero(&Shape::scalar(Mode::Exact, h)),
        };
        let img = match q.get(&k) {
            Some(x) => rep.image(x)?,
            None => TensorOp::zero(alg.n, 1),
        };
        let target = TensorOp::identity(alg.n, 1, &want);
        let off = qd.entries().iter().any(|(&(r, c), s)| r != c && s.terms().any(|(key, _)| key[1] == k));
        if off || !op_zero(&img.sub(&target)?) {
            bad.push(k);
        }
    }
    Ok(Report::exact("qdet_in_rep", bad.is_empty()).detail("failing_u_powers", bad).detail("point", a).with_window(json!({"u_powers": [0, kmax], "h_order": h})))
}
