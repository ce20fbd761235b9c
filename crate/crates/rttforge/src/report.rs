//! Structured verification results.

use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub check: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_zero: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Value>,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub details: Map<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Report>,
}

impl Report {
    fn base(check: &str, passed: bool) -> Report {
        Report {
            check: check.to_string(),
            passed,
            exact_zero: None,
            residual: None,
            tol: None,
            window: None,
            details: Map::new(),
            children: Vec::new(),
        }
    }

    /// An exact residual: passes iff it is zero.
    pub fn exact(check: &str, zero: bool) -> Report {
        let mut r = Report::base(check, zero);
        r.exact_zero = Some(zero);
        r
    }

    /// A numeric residual compared against `tol`.
    pub fn numeric(check: &str, residual: f64, tol: f64) -> Report {
        let mut r = Report::base(check, residual.is_finite() && residual <= tol);
        r.residual = Some(residual);
        r.tol = Some(tol);
        r
    }

    /// A plain boolean outcome.
    pub fn flag(check: &str, passed: bool) -> Report {
        Report::base(check, passed)
    }

    /// Passes iff every child passes.
    pub fn all(check: &str, children: Vec<Report>) -> Report {
        let mut r = Report::base(check, children.iter().all(|c| c.passed));
        r.children = children;
        r
    }

    pub fn with_window(mut self, w: Value) -> Report {
        self.window = Some(w);
        self
    }

    pub fn detail(mut self, key: &str, v: impl Into<Value>) -> Report {
        self.details.insert(key.to_string(), v.into());
        self
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).unwrap_or_else(|_| json!({"check": self.check, "passed": self.passed}))
    }

    /// One line per leaf, indented by depth.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        self.summary_into(&mut out, 0);
        out
    }

    fn summary_into(&self, out: &mut String, depth: usize) {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        let extra = match (self.exact_zero, self.residual) {
            (Some(z), _) => format!(" exact_zero={z}"),
            (None, Some(r)) => format!(" residual={r:.3e}"),
            _ => String::new(),
        };
        out.push_str(&format!("{}{} {}{}\n", "  ".repeat(depth), tag, self.check, extra));
        for c in &self.children {
            c.summary_into(out, depth + 1);
        }
    }
}
