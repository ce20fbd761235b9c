//! `rttforge <command> --config run.json`: runs one command and writes a JSON report.

mod commands;
mod config;
mod golden;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};

use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "rttforge", version, about = "Verify R-matrices, RTT algebras and factored algebras")]
struct Cli {
    /// One of: verify-cybe, verify-qybe, verify-unitarity, verify-elliptic, verify-degeneration,
    /// qdet, solve-f0, emit-relations, normal-form, pbw-count, factored-assoc, pair-b,
    /// rep-check, separate, classical-limit.
    command: String,
    /// Run config (JSON). Reads stdin when absent or `-`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Rewrite the golden file for this command instead of comparing against it.
    #[arg(long)]
    bless: bool,
    /// Directory holding golden files.
    #[arg(long, default_value = golden::DEFAULT_DIR)]
    golden_dir: PathBuf,
}

fn read_config(path: &Option<PathBuf>) -> Result<Value, String> {
    let text = match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?,
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| e.to_string())?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| format!("config is not valid JSON: {e}"))
}

fn set_threads() {
    if let Some(n) = std::env::var("RTTFORGE_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn fail(msg: &str) -> ExitCode {
    eprintln!("rttforge: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !commands::COMMANDS.contains(&cli.command.as_str()) {
        return fail(&format!("unknown command {}; expected one of {}", cli.command, commands::COMMANDS.join(", ")));
    }
    set_threads();
    let raw = match read_config(&cli.config) {
        Ok(v) => v,
        Err(e) => return fail(&e),
    };
    let mut cfg = match RunConfig::from_json(&raw) {
        Ok(c) => c,
        Err(e) => return fail(&format!("config: {e}")),
    };
    if let Some(t) = cli.tol {
        cfg.tol = t;
        cfg.spec.tol = t;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let start = Instant::now();
    let (mut checks, data) = match commands::run(&cli.command, &cfg) {
        Ok(o) => (o.checks, o.data),
        Err(e) => (rttforge::report::Report::flag(&cli.command.replace('-', "_"), false).detail("error", e.to_string()), None),
    };
    if let Some(d) = &data {
        match golden::handle(&cli.golden_dir, &cli.command, &cfg, d, cli.bless) {
            Ok(Some(g)) => checks = rttforge::report::Report::all(&checks.check.clone(), vec![checks, g]),
            Ok(None) => {}
            Err(e) => return fail(&e),
        }
    }
    eprintln!("rttforge: {} finished in {:.2} s", cli.command, start.elapsed().as_secs_f64());
    let mut report = json!({
        "command": cli.command,
        "config": cfg.to_json(),
        "passed": checks.passed,
        "checks": checks.to_json(),
    });
    if let Some(d) = data {
        report["data"] = d;
    }
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match &cli.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                return fail(&format!("{}: {e}", p.display()));
            }
        }
        None => print!("{text}"),
    }
    if checks.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
