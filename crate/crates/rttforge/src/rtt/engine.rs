//! Relations of U(R)_z in the t-presentation T_i(u) = 1 + h t_i(u), and normal forms.
//!
//! With R(w) = (w − hD)/(w − ch), w = u − v + z_i − z_j, the relation
//! R T¹³_i(u) T²³_j(v) = T²³_j(v) T¹³_i(u) R becomes
//! w·[t¹³_i(u), t²³_j(v)] = [C, t¹³_i(u) + t²³_j(v)] + h(D t¹³ t²³ − t²³ t¹³ D).

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::liebialg::{gbinom, PunctureConfig};
use crate::report::Report;
use crate::series::{pow_scalar, Mode, Scalar};

use super::algebra::{AlgebraElement, Gen, Term};
use super::poler::PoleR;

/// Matrix position ((p, r), (q, s)) of a relation: [t_{i,pq}, t_{j,rs}].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Entry {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub s: usize,
}

#[derive(Clone, Debug)]
pub struct Relation {
    pub sites: (usize, usize),
    pub u: usize,
    pub v: usize,
    pub entry: Entry,
    /// t_A t_B − t_B t_A − [t_A, t_B], or a pole remainder.
    pub element: AlgebraElement,
}

impl Relation {
    pub fn to_json(&self) -> Vec<Value> {
        let top = self.element.terms.keys().map(|t| t.h).max().unwrap_or(0);
        (0..=top)
            .map(|c| {
                json!({
                    "coeff_monomial": {"u": self.u, "v": self.v, "h": c},
                    "sites": [self.sites.0 + 1, self.sites.1 + 1],
                    "entry": [self.entry.p, self.entry.q, self.entry.r, self.entry.s],
                    "element": self.element.h_part(c).to_json(),
                })
            })
            .collect()
    }
}

#[derive(Clone, Debug, Default)]
pub struct RelationSet {
    pub relations: Vec<Relation>,
    /// Σ_k G_{k, b−k} on one site: must vanish for the pole at u = v to cancel.
    pub pole: Vec<Relation>,
}

impl RelationSet {
    pub fn all(&self) -> impl Iterator<Item = &Relation> {
        self.relations.iter().chain(self.pole.iter())
    }

    /// The JSON dump: one record per coefficient monomial u^a v^b h^c.
    pub fn to_json(&self) -> Value {
        Value::Array(self.all().flat_map(|r| r.to_json()).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

pub const NF_STEP_CAP: usize = 2_000_000;

/// U(R)_z truncated modulo h^{H+1}.
#[derive(Debug)]
pub struct RttAlgebra {
    pub cfg: PunctureConfig,
    pub r: PoleR,
    pub n: usize,
    pub h_order: u32,
    pub mode: Mode,
    comm: RwLock<HashMap<(Gen, Gen), Arc<AlgebraElement>>>,
}

impl RttAlgebra {
    pub fn new(cfg: PunctureConfig, r: PoleR, h_order: u32) -> Result<RttAlgebra> {
        if cfg.spec.mode() != Mode::Exact || cfg.z.iter().any(|z| z.mode() != Mode::Exact) {
            return Err(Error::ModeMismatch);
        }
        if cfg.spec.n != r.n {
            return Err(Error::Spec(format!("config has N = {}, R has N = {}", cfg.spec.n, r.n)));
        }
        Ok(RttAlgebra { n: r.n, cfg, r, h_order, mode: Mode::Exact, comm: RwLock::new(HashMap::new()) })
    }

    /// One site at z = 0.
    pub fn single(r: PoleR, h_order: u32) -> RttAlgebra {
        let spec = r.spec().unwrap_or_else(|| crate::rmatrix::RMatrixSpec::yang(r.n));
        RttAlgebra::new(PunctureConfig::single(spec), r, h_order).expect("single site")
    }

    pub fn sites(&self) -> usize {
        self.cfg.sites()
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement::zero(self.mode, self.h_order)
    }

    pub fn one(&self) -> AlgebraElement {
        AlgebraElement::one(self.mode, self.h_order)
    }

    pub fn gen(&self, g: Gen) -> AlgebraElement {
        AlgebraElement::gen(self.mode, self.h_order, g)
    }

    pub fn word(&self, w: &[Gen]) -> AlgebraElement {
        AlgebraElement::word(self.mode, self.h_order, w)
    }

    /// All generators with tdeg ≤ l, in the generator order.
    pub fn generators(&self, l: usize) -> Vec<Gen> {
        let mut out = Vec::new();
        for site in 0..self.sites() {
            for tdeg in 0..=l {
                for row in 0..self.n {
                    for col in 0..self.n {
                        out.push(Gen::new(site, tdeg, row, col));
                    }
                }
            }
        }
        out
    }

    fn c_at(&self, x: usize, y: usize) -> Option<&Scalar> {
        self.r.c_op.get(x, y)
    }

    fn d_at(&self, x: usize, y: usize) -> Option<&Scalar> {
        self.r.d_op.get(x, y)
    }

    /// Coefficient of u^α v^β of [C, t¹³_i(u) + t²³_j(v)] + h(D t¹³ t²³ − t²³ t¹³ D) at `e`.
    pub fn g_entry(&self, i: usize, j: usize, alpha: usize, beta: usize, e: Entry) -> Result<AlgebraElement> {
        let n = self.n;
        let Entry { p, q, r, s } = e;
        let mut out = self.zero();
        let one = |c: &Scalar, w: Vec<Gen>, h: u32, out: &mut AlgebraElement| out.add_term(Term { h, word: w }, c.clone());
        if beta == 0 {
            for p2 in 0..n {
                if let Some(c) = self.c_at(p * n + r, p2 * n + s) {
                    one(c, vec![Gen::new(i, alpha, p2, q)], 0, &mut out)?;
                }
            }
            for q2 in 0..n {
                if let Some(c) = self.c_at(q2 * n + r, q * n + s) {
                    one(&c.neg(), vec![Gen::new(i, alpha, p, q2)], 0, &mut out)?;
                }
            }
        }
        if alpha == 0 {
            for r2 in 0..n {
                if let Some(c) = self.c_at(p * n + r, q * n + r2) {
                    one(c, vec![Gen::new(j, beta, r2, s)], 0, &mut out)?;
                }
            }
            for s2 in 0..n {
                if let Some(c) = self.c_at(p * n + s2, q * n + s) {
                    one(&c.neg(), vec![Gen::new(j, beta, r, s2)], 0, &mut out)?;
                }
            }
        }
        for p2 in 0..n {
            for r2 in 0..n {
                if let Some(d) = self.d_at(p * n + r, p2 * n + r2) {
                    one(d, vec![Gen::new(i, alpha, p2, q), Gen::new(j, beta, r2, s)], 1, &mut out)?;
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                if let Some(d) = self.d_at(x * n + y, q * n + s) {
                    one(&d.neg(), vec![Gen::new(j, beta, r, y), Gen::new(i, alpha, p, x)], 1, &mut out)?;
                }
            }
        }
        Ok(out)
    }

    /// Coefficient u^a v^b of [t¹³_i(u), t²³_j(v)] at `e`, solved from w·F = G.
    pub fn f_entry(&self, i: usize, j: usize, a: usize, b: usize, e: Entry) -> Result<AlgebraElement> {
        let mut out = self.zero();
        if i == j {
            // 1/(u − v) acting on G with G(u, u) = 0
            for k in 0..=b {
                out = out.add(&self.g_entry(i, i, a + 1 + k, b - k, e)?)?;
            }
            return Ok(out);
        }
        let z = self.cfg.diff(i, j)?;
        for alpha in 0..=a {
            for beta in 0..=b {
                let (m, nn) = ((a - alpha) as i64, (b - beta) as i64);
                let k = Scalar::int(self.mode, crate::liebialg::sign(m) * gbinom(m + nn, m)).mul(&pow_scalar(&z, -(m + nn + 1))?)?;
                out.add_scaled(&self.g_entry(i, j, alpha, beta, e)?, &k)?;
            }
        }
        Ok(out)
    }

    /// Σ_{k ≤ b} G_{k, b−k} on one site; zero exactly when the u = v pole cancels.
    pub fn pole_remainder(&self, i: usize, b: usize, e: Entry) -> Result<AlgebraElement> {
        let mut out = self.zero();
        for k in 0..=b {
            out = out.add(&self.g_entry(i, i, k, b - k, e)?)?;
        }
        Ok(out)
    }

    /// [t_A, t_B]; generators on different copies commute.
    pub fn commutator(&self, a: Gen, b: Gen) -> Result<Arc<AlgebraElement>> {
        if a.copy != b.copy {
            return Ok(Arc::new(self.zero()));
        }
        if let Some(v) = self.comm.read().expect("cache").get(&(a, b)) {
            return Ok(v.clone());
        }
        let (a0, b0) = (a.on_copy(0), b.on_copy(0));
        let e = Entry { p: a.row as usize, q: a.col as usize, r: b.row as usize, s: b.col as usize };
        let mut f = self.f_entry(a.site as usize, b.site as usize, a0.tdeg as usize, b0.tdeg as usize, e)?;
        if a.copy != 0 {
            f = f.map_gens(|g| g.on_copy(a.copy));
        }
        let f = Arc::new(f);
        self.comm.write().expect("cache").insert((a, b), f.clone());
        Ok(f)
    }

    /// t_A t_B − t_B t_A − [t_A, t_B].
    pub fn relation(&self, a: Gen, b: Gen) -> Result<AlgebraElement> {
        self.word(&[a, b]).sub(&self.word(&[b, a]))?.sub(&*self.commutator(a, b)?)
    }

    /// Relations for all site pairs and tdeg ≤ l, plus nonzero pole remainders up to 2l + 1.
    pub fn emit_relations(&self, l: usize) -> Result<RelationSet> {
        let mut out = RelationSet::default();
        let n = self.n;
        let entries: Vec<Entry> = (0..n.pow(4)).map(|x| Entry { p: x / n.pow(3), q: (x / n.pow(2)) % n, r: (x / n) % n, s: x % n }).collect();
        for i in 0..self.sites() {
            for j in 0..self.sites() {
                for a in 0..=l {
                    for b in 0..=l {
                        for e in &entries {
                            let ga = Gen::new(i, a, e.p, e.q);
                            let gb = Gen::new(j, b, e.r, e.s);
                            out.relations.push(Relation { sites: (i, j), u: a, v: b, entry: *e, element: self.relation(ga, gb)? });
                        }
                    }
                }
            }
        }
        for i in 0..self.sites() {
            for b in 0..=2 * l + 1 {
                for e in &entries {
                    let rem = self.pole_remainder(i, b, *e)?;
                    if !rem.is_zero() {
                        out.pole.push(Relation { sites: (i, i), u: b, v: b, entry: *e, element: rem });
                    }
                }
            }
        }
        Ok(out)
    }

    /// The u = v pole cancels for every same-site coefficient up to total degree `deg`.
    pub fn check_pole_cancellation(&self, deg: usize) -> Result<Report> {
        let n = self.n;
        let mut bad = 0usize;
        for i in 0..self.sites() {
            for b in 0..=deg {
                for x in 0..n.pow(4) {
                    let e = Entry { p: x / n.pow(3), q: (x / n.pow(2)) % n, r: (x / n) % n, s: x % n };
                    if !self.pole_remainder(i, b, e)?.is_zero() {
                        bad += 1;
                    }
                }
            }
        }
        Ok(Report::exact("pole_cancellation", bad == 0).detail("nonzero_remainders", bad).with_window(json!({"total_degree": deg})))
    }

    fn descent(word: &[Gen], strat: Strategy) -> Option<usize> {
        let mut it = (0..word.len().saturating_sub(1)).filter(|&k| word[k] > word[k + 1]);
        match strat {
            Strategy::Leftmost => it.next(),
            Strategy::Rightmost => it.next_back(),
        }
    }

    pub fn normal_form(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.nf_with(x, Strategy::Leftmost)
    }

    /// Rewrites every descent b·a (b > a) as a·b − [a, b] until words are sorted.
    pub fn nf_with(&self, x: &AlgebraElement, strat: Strategy) -> Result<AlgebraElement> {
        let h_order = x.h_order.min(self.h_order);
        let mut pending = AlgebraElement::zero(x.mode, h_order);
        for (t, v) in &x.terms {
            pending.add_term(t.clone(), v.clone())?;
        }
        let mut done = AlgebraElement::zero(x.mode, h_order);
        let mut steps = 0usize;
        while let Some((t, c)) = pending.terms.pop_last() {
            let Some(k) = Self::descent(&t.word, strat) else {
                done.add_term(t, c)?;
                continue;
            };
            steps += 1;
            if steps > NF_STEP_CAP {
                return Err(Error::Confluence(format!("normal form exceeded {NF_STEP_CAP} rewrites")));
            }
            let (b, a) = (t.word[k], t.word[k + 1]);
            let mut w = t.word.clone();
            w.swap(k, k + 1);
            pending.add_term(Term { h: t.h, word: w }, c.clone())?;
            let com = self.commutator(a, b)?;
            for (ct, v) in &com.terms {
                if t.h + ct.h > h_order {
                    continue;
                }
                let mut w = t.word[..k].to_vec();
                w.extend_from_slice(&ct.word);
                w.extend_from_slice(&t.word[k + 2..]);
                pending.add_term(Term { h: t.h + ct.h, word: w }, c.mul(v)?.neg())?;
            }
        }
        Ok(done)
    }

    pub fn is_normal(x: &AlgebraElement) -> bool {
        x.terms.keys().all(|t| t.word.windows(2).all(|w| w[0] <= w[1]))
    }

    pub fn random_word(&self, rng: &mut impl Rng, len: usize, l: usize) -> Vec<Gen> {
        let gens = self.generators(l);
        (0..len).map(|_| gens[rng.gen_range(0..gens.len())]).collect()
    }

    /// Leftmost and rightmost rewriting agree on random words.
    pub fn confluence_probe(&self, trials: usize, seed: u64, max_len: usize, l: usize) -> Result<Report> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut mismatches = 0usize;
        for _ in 0..trials {
            let len = rng.gen_range(2..=max_len.max(2));
            let w = self.random_word(&mut rng, len, l);
            let x = self.word(&w);
            if self.nf_with(&x, Strategy::Leftmost)? != self.nf_with(&x, Strategy::Rightmost)? {
                mismatches += 1;
            }
        }
        Ok(Report::exact("confluence", mismatches == 0)
            .detail("trials", trials)
            .detail("mismatches", mismatches)
            .with_window(json!({"max_word_len": max_len, "L": l, "h_order": self.h_order})))
    }

    /// T-form coefficient u^a v^b of (w − hD)T¹³_i T²³_j − T²³_j T¹³_i(w − hD), same site.
    /// Its h⁰ and h¹ parts vanish identically.
    pub fn tform_relation(&self, i: usize, a: usize, b: usize, e: Entry) -> Result<AlgebraElement> {
        // (u − v)(T¹³T²³ − T²³T¹³) − h(D T¹³ T²³ − T²³ T¹³ D) with T = 1 + h t
        let n = self.n;
        let Entry { p, q, r, s } = e;
        let h_order = self.h_order + 3;
        let mut out = AlgebraElement::zero(self.mode, h_order);
        let one = Scalar::one(self.mode);
        let delta = |x: usize, y: usize| x == y;
        // T_{pq}(u) coefficient u^α: δ_{α0}δ_pq + h t_α
        let t_coeff = |site: usize, alpha: usize, x: usize, y: usize| -> AlgebraElement {
            let mut el = AlgebraElement::monomial(self.mode, h_order, vec![Gen::new(site, alpha, x, y)], 1, one.clone());
            if alpha == 0 && delta(x, y) {
                el.add_term(Term { h: 0, word: vec![] }, one.clone()).expect("unit");
            }
            el
        };
        // (T¹³T²³)_{(x,y),(q,s)} coefficient u^α v^β and (T²³T¹³)_{(p,r),(x,y)}
        let tt = |alpha: usize, beta: usize, x: usize, y: usize| t_coeff(i, alpha, x, q).mul(&t_coeff(i, beta, y, s));
        let tt_rev = |alpha: usize, beta: usize, x: usize, y: usize| t_coeff(i, beta, r, y).mul(&t_coeff(i, alpha, p, x));
        let comm = |alpha: usize, beta: usize| -> Result<AlgebraElement> { tt(alpha, beta, p, r)?.sub(&tt_rev(alpha, beta, q, s)?) };
        if a >= 1 {
            out = out.add(&comm(a - 1, b)?)?;
        }
        if b >= 1 {
            out = out.sub(&comm(a, b - 1)?)?;
        }
        for x in 0..n {
            for y in 0..n {
                if let Some(d) = self.d_at(p * n + r, x * n + y) {
                    out.add_scaled(&tt(a, b, x, y)?.h_shift(1), &d.neg())?;
                }
                if let Some(d) = self.d_at(x * n + y, q * n + s) {
                    out.add_scaled(&tt_rev(a, b, x, y)?.h_shift(1), d)?;
                }
            }
        }
        Ok(out)
    }
}

/// Coefficients of the sorted words of an element, keyed by (h, word).
pub fn coords(x: &AlgebraElement) -> BTreeMap<(u32, Vec<Gen>), Scalar> {
    x.terms.iter().map(|(t, v)| ((t.h, t.word.clone()), v.clone())).collect()
}
