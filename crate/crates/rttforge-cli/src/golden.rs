//! Golden files for exact dumps: `<dir>/<command>.json` holds `{config, data}`.
//! A run is compared only when its spec, points and windows equal the stored ones.

use std::path::Path;

use rttforge::report::Report;
use rttforge::rmatrix::Family;
use serde_json::{json, Value};

use crate::config::RunConfig;

pub const DEFAULT_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/golden");

const GOLDEN: [&str; 2] = ["emit-relations", "qdet"];

fn key(cfg: &RunConfig) -> Value {
    let c = cfg.to_json();
    json!({"spec": c["spec"], "z": c["z"], "windows": c["windows"]})
}

pub fn handle(dir: &Path, command: &str, cfg: &RunConfig, data: &Value, bless: bool) -> Result<Option<Report>, String> {
    if !GOLDEN.contains(&command) {
        return if bless { Err(format!("{command} has no golden file")) } else { Ok(None) };
    }
    let path = dir.join(format!("{command}.json"));
    if bless {
        if cfg.spec.family != Family::Yang || cfg.spec.n != 2 {
            return Err("golden files are kept for yang N = 2 only".into());
        }
        let body = json!({"config": key(cfg), "data": data});
        let text = serde_json::to_string_pretty(&body).expect("golden serializes") + "\n";
        std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
        std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
        return Ok(Some(Report::flag("golden", true).detail("blessed", path.display().to_string())));
    }
    let Ok(text) = std::fs::read_to_string(&path) else {
        return Ok(None);
    };
    let stored: Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if stored["config"] != key(cfg) {
        return Ok(None);
    }
    Ok(Some(Report::exact("golden", stored["data"] == *data).detail("file", format!("{command}.json"))))
}
