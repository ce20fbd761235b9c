//! One function per command; each returns the check tree and an optional data dump.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rttforge::liebialg::checks::check_degeneration as lie_degeneration;
use rttforge::reps::{check_nf_soundness, check_relations_in_rep, separation_check, TensorRep};
use rttforge::report::Report;
use rttforge::rmatrix::checks::*;
use rttforge::rmatrix::{ClassicalR, Family, QuantumR};
use rttforge::rtt::classical::classical_limit_check;
use rttforge::rtt::factored::{check_factored_assoc, check_hexagon};
use rttforge::rtt::pairing::{check_b_axioms, check_b_matches_r, check_y_qybe};
use rttforge::rtt::pbw::pbw_count;
use rttforge::rtt::qdet::{check_f0, check_h0_det, qdet_r, solve_f0};
use rttforge::rtt::{AlgebraElement, Gen, PoleR, RttAlgebra, Strategy};
use rttforge::series::{Mode, Scalar};
use rttforge::{Error, Result};
use serde_json::{json, Value};

use crate::config::RunConfig;

pub const COMMANDS: [&str; 15] = [
    "verify-cybe",
    "verify-qybe",
    "verify-unitarity",
    "verify-elliptic",
    "verify-degeneration",
    "qdet",
    "solve-f0",
    "emit-relations",
    "normal-form",
    "pbw-count",
    "factored-assoc",
    "pair-b",
    "rep-check",
    "separate",
    "classical-limit",
];

pub struct Outcome {
    pub checks: Report,
    pub data: Option<Value>,
}

fn only(checks: Report) -> Result<Outcome> {
    Ok(Outcome { checks, data: None })
}

fn window(cfg: &RunConfig) -> Value {
    json!({"h_order": cfg.windows.h_order, "u_window": [cfg.windows.u_window.0, cfg.windows.u_window.1]})
}

fn rtt_window(cfg: &RunConfig) -> Value {
    json!({"h_order": cfg.windows.h_order, "L": cfg.windows.l, "max_word_len": cfg.windows.max_word_len})
}

fn algebra(cfg: &RunConfig) -> Result<RttAlgebra> {
    let r = PoleR::from_spec(&cfg.spec)?;
    let h = u32::try_from(cfg.windows.h_order).map_err(|_| Error::Spec("h_order must be non-negative".into()))?;
    RttAlgebra::new(cfg.punctures()?, r, h)
}

pub fn run(command: &str, cfg: &RunConfig) -> Result<Outcome> {
    match command {
        "verify-cybe" => verify_cybe(cfg),
        "verify-qybe" => verify_qybe(cfg),
        "verify-unitarity" => verify_unitarity(cfg),
        "verify-elliptic" => verify_elliptic(cfg),
        "verify-degeneration" => verify_degeneration(cfg),
        "qdet" => qdet(cfg),
        "solve-f0" => f0(cfg),
        "emit-relations" => emit_relations(cfg),
        "normal-form" => normal_form(cfg),
        "pbw-count" => pbw(cfg),
        "factored-assoc" => factored(cfg),
        "pair-b" => pair_b(cfg),
        "rep-check" => rep_check(cfg),
        "separate" => separate(cfg),
        "classical-limit" => classical_limit(cfg),
        c => Err(Error::Parse(format!("unknown command {c}"))),
    }
}

fn verify_cybe(cfg: &RunConfig) -> Result<Outcome> {
    let cl = ClassicalR::make(&cfg.spec)?;
    let r = match cfg.spec.mode() {
        Mode::Exact => check_cybe(&cl, 0.0).with_window(window(cfg)),
        Mode::Approx => check_cybe_numeric(&cl, cfg.opt_usize("samples", 20)?, cfg.seed, cfg.tol),
    };
    only(r)
}

fn verify_qybe(cfg: &RunConfig) -> Result<Outcome> {
    let mut out = vec![check_qybe_spec(&cfg.spec, cfg.exact_tol()).with_window(window(cfg))];
    if cfg.spec.mode() == Mode::Approx {
        let q = QuantumR::make(&cfg.spec)?;
        out.push(check_qybe_numeric(&q, cfg.opt_usize("samples", 20)?, cfg.seed, cfg.tol));
    }
    only(Report::all("verify_qybe", out))
}

fn verify_unitarity(cfg: &RunConfig) -> Result<Outcome> {
    let cl = ClassicalR::make(&cfg.spec)?;
    let q = QuantumR::make(&cfg.spec)?;
    let tol = cfg.exact_tol();
    only(Report::all(
        "verify_unitarity",
        vec![check_unitarity_classical(&cl, tol).with_window(window(cfg)), check_unitarity_quantum(&q, tol).with_window(window(cfg))],
    ))
}

fn verify_elliptic(cfg: &RunConfig) -> Result<Outcome> {
    let q = QuantumR::make(&cfg.spec)?;
    only(Report::all(
        "verify_elliptic",
        vec![check_elliptic_axioms(&q, cfg.seed, cfg.tol), check_one_minus_hr(&q, cfg.exact_tol()).with_window(window(cfg))],
    ))
}

fn verify_degeneration(cfg: &RunConfig) -> Result<Outcome> {
    let q = QuantumR::make(&cfg.spec)?;
    let mut out = vec![check_degeneration(&q, cfg.seed, cfg.tol)];
    if matches!(cfg.spec.family, Family::Trig | Family::Elliptic) {
        out.push(check_classical_degeneration(&ClassicalR::make(&cfg.spec)?, cfg.seed, cfg.tol));
    }
    if cfg.spec.family == Family::Trig {
        out.push(lie_degeneration(cfg.spec.n, cfg.windows.l, 4)?);
    }
    only(Report::all("verify_degeneration", out))
}

fn qdet(cfg: &RunConfig) -> Result<Outcome> {
    let q = QuantumR::make(&cfg.spec)?;
    let d = qdet_r(&q)?;
    let scalar = Report::exact("qdet_is_scalar", d.off_scalar.is_zero()).with_window(window(cfg));
    let det = check_h0_det(cfg.opt_usize("trials", 20)?, cfg.spec.n, cfg.seed)?;
    Ok(Outcome { checks: Report::all("qdet", vec![scalar, det]), data: Some(json!({"qdet": d.scalar.to_json()})) })
}

fn f0(cfg: &RunConfig) -> Result<Outcome> {
    let q = QuantumR::make(&cfg.spec)?;
    let f = solve_f0(&q)?;
    let checks = check_f0(&q)?.with_window(window(cfg)).detail("iterations", f.iterations);
    Ok(Outcome { checks, data: Some(json!({"f0": f.f0.to_json(), "qdet": f.qdet.to_json()})) })
}

fn emit_relations(cfg: &RunConfig) -> Result<Outcome> {
    let alg = algebra(cfg)?;
    let rels = alg.emit_relations(cfg.windows.l)?;
    let mut bad = 0usize;
    for r in rels.all() {
        if !alg.normal_form(&r.element)?.is_zero() {
            bad += 1;
        }
    }
    let checks = Report::all(
        "emit_relations",
        vec![
            Report::exact("pole_remainders_vanish", rels.pole.is_empty()).detail("count", rels.pole.len()),
            Report::exact("relations_reduce_to_zero", bad == 0).detail("nonzero", bad),
        ],
    )
    .with_window(rtt_window(cfg))
    .detail("relations", rels.relations.len());
    Ok(Outcome { checks, data: Some(json!({"relations": rels.to_json()})) })
}

fn parse_word(v: &Value) -> Result<Vec<Gen>> {
    v.as_array().ok_or_else(|| Error::Parse("a word is a list of generators".into()))?.iter().map(Gen::from_json).collect()
}

fn element_option(cfg: &RunConfig, alg: &RttAlgebra, key: &str) -> Result<Option<AlgebraElement>> {
    match cfg.options.get(key) {
        None => Ok(None),
        Some(v) => {
            // a bare word, or a list of {h, word, c} terms
            if let Ok(w) = parse_word(v) {
                return Ok(Some(alg.word(&w)));
            }
            AlgebraElement::from_json(v, alg.mode, alg.h_order).map(Some)
        }
    }
}

fn normal_form(cfg: &RunConfig) -> Result<Outcome> {
    let alg = algebra(cfg)?;
    let l = cfg.windows.l;
    let inputs: Vec<AlgebraElement> = match cfg.options.get("words") {
        Some(Value::Array(ws)) => ws.iter().map(|w| parse_word(w).map(|w| alg.word(&w))).collect::<Result<_>>()?,
        Some(_) => return Err(Error::Parse("words must be a list of words".into())),
        None => match element_option(cfg, &alg, "element")? {
            Some(x) => vec![x],
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                (0..cfg.opt_usize("trials", 10)?).map(|_| alg.word(&alg.random_word(&mut rng, cfg.windows.max_word_len, l))).collect()
            }
        },
    };
    let mut dump = Vec::new();
    let (mut normal, mut idem, mut confl) = (true, true, true);
    for x in &inputs {
        let nf = alg.normal_form(x)?;
        normal &= RttAlgebra::is_normal(&nf);
        idem &= alg.normal_form(&nf)? == nf;
        confl &= alg.nf_with(x, Strategy::Rightmost)? == nf;
        dump.push(json!({"input": x.to_json(), "normal_form": nf.to_json()}));
    }
    let checks = Report::all(
        "normal_form",
        vec![Report::flag("output_is_normal", normal), Report::flag("idempotent", idem), Report::flag("strategies_agree", confl)],
    )
    .with_window(rtt_window(cfg))
    .detail("inputs", inputs.len());
    Ok(Outcome { checks, data: Some(Value::Array(dump)) })
}

fn pbw(cfg: &RunConfig) -> Result<Outcome> {
    let alg = algebra(cfg)?;
    let t = pbw_count(&alg, cfg.windows.l, cfg.windows.max_word_len)?;
    let checks = Report::flag("pbw_flat", t.flat()).with_window(rtt_window(cfg)).detail("table", t.to_json());
    Ok(Outcome { checks, data: Some(t.to_json()) })
}

fn factored(cfg: &RunConfig) -> Result<Outcome> {
    let alg = algebra(cfg)?;
    let mut out = vec![check_factored_assoc(&alg, cfg.opt_usize("trials", 50)?, cfg.seed, cfg.windows.l)?];
    if alg.sites() >= 3 {
        out.push(check_hexagon(&alg, cfg.windows.l)?);
    }
    only(Report::all("factored_assoc", out).with_window(rtt_window(cfg)))
}

fn pair_b(cfg: &RunConfig) -> Result<Outcome> {
    let r = PoleR::from_spec(&cfg.spec)?;
    let h = cfg.windows.h_order;
    let args: Vec<Scalar> = match cfg.options.get("args") {
        Some(Value::Array(a)) => a.iter().map(Scalar::from_json).collect::<Result<_>>()?,
        Some(_) => return Err(Error::Parse("args must be a list of three scalars".into())),
        None => vec![Scalar::frac(Mode::Exact, 7, 2), Scalar::int(Mode::Exact, 1), Scalar::int(Mode::Exact, -2)],
    };
    if args.len() != 3 {
        return Err(Error::Parse("args must be a list of three scalars".into()));
    }
    let q = QuantumR::make(&cfg.spec)?;
    only(
        Report::all(
            "pair_b",
            vec![check_b_axioms(&r, cfg.opt_usize("trials", 12)?, cfg.seed, h)?, check_b_matches_r(&q, &r)?, check_y_qybe(&r, &args, h)?],
        )
        .with_window(window(cfg)),
    )
}

fn rep_points(cfg: &RunConfig) -> Result<Vec<i64>> {
    Ok(cfg.opt_ints("points")?.unwrap_or_else(|| (1..=cfg.sites() as i64).collect()))
}

fn rep_check(cfg: &RunConfig) -> Result<Outcome> {
    let alg = algebra(cfg)?;
    let points = rep_points(cfg)?;
    let rep = TensorRep::for_algebra(&alg, &points)?;
    let mut reps = vec![rep.clone()];
    for &p in &points {
        reps.push(TensorRep::for_algebra(&alg, &[p])?);
    }
    let l = cfg.windows.l;
    let checks = Report::all(
        "rep_check",
        vec![
            check_relations_in_rep(&alg, &rep, l)?,
            check_nf_soundness(&alg, &reps, cfg.opt_usize("trials", 100)?, cfg.seed, cfg.windows.max_word_len, l)?,
        ],
    )
    .with_window(rtt_window(cfg))
    .detail("points", points);
    only(checks)
}

fn separate(cfg: &RunConfig) -> Result<Outcome> {
    let alg = algebra(cfg)?;
    let gens = alg.generators(cfg.windows.l);
    if gens.len() < 3 {
        return Err(Error::Spec("need at least three generators".into()));
    }
    let x = match element_option(cfg, &alg, "x")? {
        Some(x) => x,
        None => alg.word(&[gens[0], gens[1]]),
    };
    let y = match element_option(cfg, &alg, "y")? {
        Some(y) => y,
        None => alg.word(&[gens[0], gens[2]]),
    };
    let x = alg.normal_form(&x)?;
    let y = alg.normal_form(&y)?;
    let budget = cfg.opt_usize("budget", 2)?;
    let candidates = cfg.opt_ints("candidates")?.unwrap_or_else(|| vec![1, 2, 3]);
    let r = separation_check(&alg, &x, &y, budget, &candidates)?.with_window(rtt_window(cfg));
    Ok(Outcome { checks: r, data: Some(json!({"x": x.to_json(), "y": y.to_json()})) })
}

fn classical_limit(cfg: &RunConfig) -> Result<Outcome> {
    let alg = algebra(cfg)?;
    only(classical_limit_check(&alg, cfg.windows.l)?.with_window(rtt_window(cfg)))
}
