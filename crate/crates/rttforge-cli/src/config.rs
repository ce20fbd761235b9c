//! Run configuration as read from JSON.

use rttforge::liebialg::PunctureConfig;
use rttforge::rmatrix::{Algebra, Family, RMatrixSpec};
use rttforge::series::{Mode, Scalar};
use rttforge::{Error, Result};
use serde_json::{json, Map, Value};

#[derive(Clone, Debug)]
pub struct Windows {
    pub h_order: i64,
    pub u_window: (i64, i64),
    pub max_word_len: usize,
    pub l: usize,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub spec: RMatrixSpec,
    /// Marked points; `None` means a single site at 0.
    pub z: Option<Vec<Scalar>>,
    pub windows: Windows,
    pub tol: f64,
    pub seed: u64,
    pub options: Map<String, Value>,
}

fn get<'a>(v: &'a Value, nested: Option<&'a Value>, key: &str) -> Option<&'a Value> {
    nested.and_then(|w| w.get(key)).or_else(|| v.get(key))
}

fn uint(v: Option<&Value>, key: &str, default: usize) -> Result<usize> {
    match v {
        None => Ok(default),
        Some(x) => x.as_u64().map(|x| x as usize).ok_or_else(|| Error::Parse(format!("{key} must be a non-negative integer"))),
    }
}

impl RunConfig {
    /// Accepts `{spec: {...}, z, windows: {...}, tol, seed, options}` or the flat form
    /// `{family, N, h_order, L, ...}` with everything at the top level.
    pub fn from_json(v: &Value) -> Result<RunConfig> {
        if !v.is_object() {
            return Err(Error::Parse("config must be a JSON object".into()));
        }
        let w = v.get("windows");
        let mut sv = v.get("spec").cloned().unwrap_or_else(|| v.clone());
        if let Some(obj) = sv.as_object_mut() {
            for key in ["h_order", "u_window"] {
                if let Some(x) = get(v, w, key) {
                    obj.insert(key.into(), x.clone());
                }
            }
        }
        let mut spec = RMatrixSpec::from_json(&sv)?;
        let tol = match v.get("tol") {
            Some(t) => t.as_f64().ok_or_else(|| Error::Parse("tol must be a number".into()))?,
            None => spec.tol,
        };
        spec.tol = tol;
        let seed = match v.get("seed") {
            Some(s) => s.as_u64().ok_or_else(|| Error::Parse("seed must be a non-negative integer".into()))?,
            None => 1,
        };
        let z = match v.get("z") {
            None | Some(Value::Null) => None,
            Some(Value::Array(a)) => Some(a.iter().map(Scalar::from_json).collect::<Result<Vec<_>>>()?),
            Some(_) => return Err(Error::Parse("z must be a list".into())),
        };
        let windows = Windows {
            h_order: spec.h_order,
            u_window: spec.u_window,
            max_word_len: uint(get(v, w, "max_word_len"), "max_word_len", 3)?,
            l: uint(get(v, w, "L"), "L", 2)?,
        };
        if windows.max_word_len == 0 {
            return Err(Error::Parse("max_word_len must be positive".into()));
        }
        let options = match v.get("options") {
            None => Map::new(),
            Some(Value::Object(o)) => o.clone(),
            Some(_) => return Err(Error::Parse("options must be an object".into())),
        };
        Ok(RunConfig { spec, z, windows, tol, seed, options })
    }

    /// Canonical echo of the config, with every default filled in.
    pub fn to_json(&self) -> Value {
        json!({
            "spec": self.spec.to_json(),
            "z": self.z.as_ref().map(|z| z.iter().map(|s| s.to_json()).collect::<Vec<_>>()),
            "windows": {
                "h_order": self.windows.h_order,
                "u_window": [self.windows.u_window.0, self.windows.u_window.1],
                "max_word_len": self.windows.max_word_len,
                "L": self.windows.l,
            },
            "tol": self.tol,
            "seed": self.seed,
            "options": self.options,
        })
    }

    /// Puncture data for the Lie and RTT models. Yang is taken in gl.
    pub fn punctures(&self) -> Result<PunctureConfig> {
        let mut spec = self.spec.clone();
        if spec.family == Family::Yang {
            spec.algebra = Algebra::Gl;
        }
        match &self.z {
            None => Ok(PunctureConfig::single(spec)),
            Some(z) => PunctureConfig::new(spec, z.clone()),
        }
    }

    pub fn sites(&self) -> usize {
        self.z.as_ref().map_or(1, |z| z.len())
    }

    /// Effective numeric tolerance: exact families are held to zero.
    pub fn exact_tol(&self) -> f64 {
        match self.spec.mode() {
            Mode::Exact => 0.0,
            Mode::Approx => self.tol,
        }
    }

    pub fn opt_usize(&self, key: &str, default: usize) -> Result<usize> {
        uint(self.options.get(key), key, default)
    }

    pub fn opt_ints(&self, key: &str) -> Result<Option<Vec<i64>>> {
        match self.options.get(key) {
            None => Ok(None),
            Some(Value::Array(a)) => {
                a.iter().map(|x| x.as_i64().ok_or_else(|| Error::Parse(format!("{key} must hold integers")))).collect::<Result<Vec<_>>>().map(Some)
            }
            Some(_) => Err(Error::Parse(format!("{key} must be a list of integers"))),
        }
    }
}
