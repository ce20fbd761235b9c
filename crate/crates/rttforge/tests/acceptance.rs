//! Acceptance gate: one PASS/FAIL line per criterion. Runs without the test harness so
//! the lines always show; exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use rttforge::liebialg::checks::*;
use rttforge::liebialg::{LieModel, PunctureConfig};
use rttforge::reps::*;
use rttforge::report::Report;
use rttforge::rmatrix::checks::*;
use rttforge::rmatrix::quantum::pole_cancellation;
use rttforge::rmatrix::{Algebra, ClassicalR, Family, QuantumR, RMatrixSpec};
use rttforge::rtt::classical::classical_limit_check;
use rttforge::rtt::factored::{check_factored_assoc, check_hexagon};
use rttforge::rtt::pairing::{check_b_axioms, check_b_matches_r, check_y_qybe};
use rttforge::rtt::pbw::{monomial_count, pbw_count, sorted_word_count};
use rttforge::rtt::qdet::{check_h0_det, solve_f0};
use rttforge::rtt::{Gen, PoleR, RttAlgebra};
use rttforge::series::{HSeries, Mode, Scalar, Shape};
use rttforge::tensor::TensorOp;
use rttforge::Result;

struct Outcome {
    passed: bool,
    note: String,
}

impl Outcome {
    fn new() -> Outcome {
        Outcome { passed: true, note: String::new() }
    }

    fn need(&mut self, what: &str, ok: bool) {
        if !ok {
            self.passed = false;
            self.note.push_str(&format!(" [failed: {what}]"));
        }
    }

    fn report(&mut self, what: &str, r: &Report) {
        if !r.passed {
            eprintln!("{what}:\n{}", r.summary());
        }
        self.need(what, r.passed);
    }

    fn info(&mut self, s: &str) {
        self.note.push_str(&format!(" {s};"));
    }
}

/// Passed, and every leaf is an exact zero.
fn exact(r: &Report) -> bool {
    r.passed && if r.children.is_empty() { r.exact_zero == Some(true) } else { r.children.iter().all(exact) }
}

fn z(pts: &[i64]) -> Vec<Scalar> {
    pts.iter().map(|&x| Scalar::int(Mode::Exact, x)).collect()
}

fn gl_yang(n: usize) -> RMatrixSpec {
    let mut s = RMatrixSpec::yang(n);
    s.algebra = Algebra::Gl;
    s
}

fn yang_alg(pts: &[i64], h: u32) -> Result<RttAlgebra> {
    RttAlgebra::new(PunctureConfig::new(gl_yang(2), z(pts))?, PoleR::yang(2), h)
}

fn qybe() -> Result<Outcome> {
    let mut o = Outcome::new();
    let t = Instant::now();
    for n in [2, 3] {
        let q = QuantumR::make(&RMatrixSpec::yang(n).with_window(4, (-6, 6)))?;
        o.need(&format!("QYBE yang N={n}"), exact(&check_qybe(&q, 0.0)));
    }
    let el = t.elapsed();
    o.info(&format!("{:.1} s", el.as_secs_f64()));
    o.need("runtime <= 60 s", el <= Duration::from_secs(60));
    Ok(o)
}

fn cybe() -> Result<Outcome> {
    let mut o = Outcome::new();
    for (f, n) in [(Family::Yang, 2), (Family::Yang, 3), (Family::Trig, 2)] {
        let cl = ClassicalR::make(&RMatrixSpec::new(f, n))?;
        o.need(&format!("CYBE {f:?} N={n}"), exact(&check_cybe(&cl, 0.0)));
    }
    let cl = ClassicalR::make(&RMatrixSpec::new(Family::Elliptic, 2))?;
    let r = check_cybe_numeric(&cl, 20, 2024, 1e-8);
    o.info(&format!("elliptic residual {:.1e}", r.residual.unwrap_or(f64::NAN)));
    o.report("elliptic CYBE", &r);
    Ok(o)
}

fn unitarity() -> Result<Outcome> {
    let mut o = Outcome::new();
    for (f, n) in [(Family::Yang, 2), (Family::Yang, 3), (Family::Rational, 2), (Family::Trig, 2), (Family::Trig, 3)] {
        let cl = ClassicalR::make(&RMatrixSpec::new(f, n))?;
        o.need(&format!("classical unitarity {f:?} N={n}"), exact(&check_unitarity_classical(&cl, 0.0)));
    }
    // the elliptic r is evaluated in floating point: held to roundoff
    let cl = ClassicalR::make(&RMatrixSpec::new(Family::Elliptic, 2))?;
    let r = check_unitarity_classical(&cl, 1e-12);
    o.info(&format!("elliptic classical residual {:.1e}", r.residual.unwrap_or(f64::NAN)));
    o.report("elliptic classical unitarity", &r);
    let q = QuantumR::make(&RMatrixSpec::new(Family::Rational, 2).with_window(3, (-5, 3)))?;
    let r = check_unitarity_quantum(&q, 0.0);
    o.need("R_rat21(-u) R_rat(u) = f(u) Id, f even", exact(&r));
    Ok(o)
}

fn elliptic() -> Result<Outcome> {
    let mut o = Outcome::new();
    for n in [2, 3] {
        let q = QuantumR::make(&RMatrixSpec::new(Family::Elliptic, n))?;
        o.report(&format!("axioms N={n}"), &check_elliptic_axioms(&q, 5, 1e-9));
        o.report(&format!("1 - h r N={n}"), &check_one_minus_hr(&q, 1e-9));
        o.need(&format!("N sigma - N^2 Omega = 1 N={n}"), pole_cancellation(&q.classical).is_ok());
    }
    // the literal form's h^0 part is exactly the identity
    let q = QuantumR::make(&RMatrixSpec::new(Family::Rational, 2).with_window(2, (-3, 3)))?;
    let lit = q.literal_form()?;
    let h0: TensorOp<HSeries> = lit.map(|s| Ok(s.truncate(&[(0, 0), (-3, 3)])))?;
    let one = TensorOp::identity(2, 2, &HSeries::one(&Shape::uni("u", Mode::Exact, 0, (-3, 3))));
    let d = h0.sub(&one)?;
    o.need("h^-1 cancellation in the series engine", d.entries().values().all(|s| s.is_zero()));
    Ok(o)
}

fn qdet() -> Result<Outcome> {
    let mut o = Outcome::new();
    let q = QuantumR::make(&RMatrixSpec::yang(2).with_window(3, (-6, 6)))?;
    let f = solve_f0(&q)?;
    o.need("qdet(R^f0) - 1 = 0", f.residual.is_zero());
    for n in [2, 3] {
        o.report(&format!("qdet = det at h^0, N={n}"), &check_h0_det(20, n, 31 + n as u64)?);
    }
    Ok(o)
}

fn pbw() -> Result<Outcome> {
    let mut o = Outcome::new();
    let t = Instant::now();
    let g = 8;
    let (oracle2, oracle3) = (sorted_word_count(g, 2), sorted_word_count(g, 3));
    o.need("oracles agree", oracle2 == monomial_count(g, 2) && oracle3 == monomial_count(g, 3) && oracle2 == 45);
    let t2 = pbw_count(&RttAlgebra::single(PoleR::yang(2), 2), 1, 2)?;
    o.need("length <= 2", t2.flat() && t2.classical == oracle2);
    let t3 = pbw_count(&RttAlgebra::single(PoleR::yang(2), 1), 1, 3)?;
    o.need("length <= 3", t3.flat() && t3.classical == oracle3);
    let bad = pbw_count(&RttAlgebra::single(PoleR::corrupted(2), 2), 1, 2)?;
    o.need("corrupted R deficit", !bad.flat() && bad.quantum.iter().any(|&q| q < oracle2));
    let el = t.elapsed();
    o.info(&format!("yang {:?}/{} and {:?}/{}, corrupted {:?}, {:.1} s", t2.quantum, oracle2, t3.quantum, oracle3, bad.quantum, el.as_secs_f64()));
    o.need("runtime <= 5 min", el <= Duration::from_secs(300));
    Ok(o)
}

fn factored() -> Result<Outcome> {
    let mut o = Outcome::new();
    let two = yang_alg(&[0, 1], 2)?;
    o.report("n=2 associativity and unit", &check_factored_assoc(&two, 50, 8, 1)?);
    let three = yang_alg(&[0, 1, 2], 1)?;
    o.report("n=3 associativity and unit", &check_factored_assoc(&three, 50, 9, 1)?);
    o.report("hexagon", &check_hexagon(&three, 1)?);
    let args: Vec<Scalar> = [(7, 2), (1, 1), (-2, 1)].iter().map(|&(a, b)| Scalar::frac(Mode::Exact, a, b)).collect();
    o.report("X-QYBE", &check_y_qybe(&PoleR::yang(2), &args, 3)?);
    Ok(o)
}

fn classical() -> Result<Outcome> {
    let mut o = Outcome::new();
    o.report("n=1", &classical_limit_check(&RttAlgebra::single(PoleR::yang(2), 1), 1)?);
    o.report("n=2", &classical_limit_check(&yang_alg(&[0, 1], 1)?, 1)?);
    Ok(o)
}

fn beta_b() -> Result<Outcome> {
    let mut o = Outcome::new();
    for spec in [gl_yang(2), RMatrixSpec::yang(2)] {
        let m = LieModel::new(PunctureConfig::single(spec), 3)?;
        let win = (-6, 2);
        for r in [
            check_beta_routes(&m, win, 0.0)?,
            check_beta_shift(&m, 3, win, 0.0)?,
            check_beta_shift_bracket(&m, 2, 4, (-4, 2), 0.0)?,
            check_beta_cocycle(&m, 2, 3, win, 0.0)?,
        ] {
            o.need(&r.check, exact(&r));
        }
    }
    let b = check_b_axioms(&PoleR::yang(2), 12, 4, 3)?;
    o.need("B axioms", exact(&b));
    let q = QuantumR::make(&RMatrixSpec::yang(2).with_window(3, (-6, 6)))?;
    o.need("B(T, T) = R", exact(&check_b_matches_r(&q, &PoleR::yang(2))?));
    Ok(o)
}

fn reps() -> Result<Outcome> {
    let mut o = Outcome::new();
    let alg = yang_alg(&[0, 1], 2)?;
    let rep = TensorRep::for_algebra(&alg, &[1, 2])?;
    o.report("relations vanish in V(1) x V(2)", &check_relations_in_rep(&alg, &rep, 1)?);
    let family: Vec<TensorRep> = [vec![1], vec![2], vec![1, 2], vec![2, 1]].iter().map(|p| TensorRep::for_algebra(&alg, p)).collect::<Result<_>>()?;
    o.report("nf soundness", &check_nf_soundness(&alg, &family, 100, 17, 3, 1)?);
    let x = alg.normal_form(&alg.word(&[Gen::new(0, 0, 0, 1), Gen::new(1, 0, 1, 0)]))?;
    let y = alg.normal_form(&alg.word(&[Gen::new(0, 0, 0, 0), Gen::new(1, 0, 1, 1)]))?;
    o.need("inputs are distinct normal forms", x != y && RttAlgebra::is_normal(&x) && RttAlgebra::is_normal(&y));
    o.report("separated within budget 2", &separation_check(&alg, &x, &y, 2, &[1, 2, 3])?);
    Ok(o)
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("QYBE exact for R_Y, N = 2, 3", qybe),
        ("CYBE exact (yang, trig), elliptic numeric", cybe),
        ("unitarity and the scalar law", unitarity),
        ("elliptic axioms, 1 - h r, h^-1 cancellation", elliptic),
        ("quantum determinant and f0", qdet),
        ("PBW flatness", pbw),
        ("factored product laws", factored),
        ("classical limit", classical),
        ("beta and B axioms", beta_b),
        ("representation cross-check", reps),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, note) = match f() {
            Ok(o) => (o.passed, o.note),
            Err(e) => (false, format!(" [error: {e}]")),
        };
        if !ok {
            failed += 1;
        }
        println!("{} {:>2}. {name} ({:.1} s){note}", if ok { "PASS" } else { "FAIL" }, k + 1, t.elapsed().as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
