//! Scenario report: per-stage results, named quantities, golden checks and
//! diagnostics. Serialized with sorted keys so output is deterministic.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::symcore::Expr;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Stage {
    Ok { data: Value },
    Skipped { reason: String },
    Error { message: String },
}

impl Stage {
    pub fn is_ok(&self) -> bool {
        matches!(self, Stage::Ok { .. })
    }

    pub fn data(&self) -> Option<&Value> {
        match self {
            Stage::Ok { data } => Some(data),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Quantity {
    Expr { expr: Expr, text: String },
    Text(String),
    Number(f64),
}

impl Serialize for Quantity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Quantity::Expr { text, .. } => s.serialize_str(text),
            Quantity::Text(t) => s.serialize_str(t),
            Quantity::Number(x) => s.serialize_f64(*x),
        }
    }
}

impl Quantity {
    pub fn text(&self) -> String {
        match self {
            Quantity::Expr { text, .. } => text.clone(),
            Quantity::Text(t) => t.clone(),
            Quantity::Number(x) => format!("{x:e}"),
        }
    }

    pub fn expr(&self) -> Option<&Expr> {
        match self {
            Quantity::Expr { expr, .. } => Some(expr),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GoldenResult {
    pub quantity: String,
    pub expected: String,
    pub computed: Option<String>,
    pub anchor: String,
    pub passed: bool,
    pub detail: String,
}

/// A computed value next to a recorded claim.
#[derive(Clone, Debug, Serialize)]
pub struct Diagnostic {
    pub quantity: String,
    pub computed: Option<String>,
    pub claimed: String,
    pub agrees: bool,
    pub anchor: String,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario: String,
    pub description: String,
    pub stages: BTreeMap<String, Stage>,
    pub quantities: BTreeMap<String, Quantity>,
    pub goldens: Vec<GoldenResult>,
    pub diagnostics: Vec<Diagnostic>,
    pub metadata: BTreeMap<String, String>,
}

impl Report {
    pub fn new(scenario: &str, description: &str) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            scenario: scenario.to_string(),
            description: description.to_string(),
            stages: BTreeMap::new(),
            quantities: BTreeMap::new(),
            goldens: Vec::new(),
            diagnostics: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.get(name)
    }

    pub fn quantity(&self, name: &str) -> Option<&Quantity> {
        self.quantities.get(name)
    }

    pub fn expr(&self, name: &str) -> Option<&Expr> {
        self.quantities.get(name).and_then(Quantity::expr)
    }

    pub fn goldens_passed(&self) -> bool {
        self.goldens.iter().all(|g| g.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario: {}", self.scenario);
        if !self.description.is_empty() {
            let _ = writeln!(out, "  {}", self.description);
        }
        let _ = writeln!(out, "\nstages:");
        for (name, st) in &self.stages {
            let line = match st {
                Stage::Ok { .. } => "ok".to_string(),
                Stage::Skipped { reason } => format!("skipped ({reason})"),
                Stage::Error { message } => format!("error: {message}"),
            };
            let _ = writeln!(out, "  {name:<18} {line}");
        }
        let _ = writeln!(out, "\nquantities:");
        for (name, q) in &self.quantities {
            let _ = writeln!(out, "  {name} = {}", q.text());
        }
        if !self.goldens.is_empty() {
            let passed = self.goldens.iter().filter(|g| g.passed).count();
            let _ = writeln!(out, "\ngoldens: {passed}/{} passed", self.goldens.len());
            for g in &self.goldens {
                let mark = if g.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    out,
                    "  [{mark}] {} = {}  ({})",
                    g.quantity, g.expected, g.anchor
                );
                if !g.passed {
                    let _ = writeln!(
                        out,
                        "         computed: {}",
                        g.computed.as_deref().unwrap_or("<missing>")
                    );
                    if !g.detail.is_empty() {
                        let _ = writeln!(out, "         {}", g.detail);
                    }
                }
            }
        }
        if !self.diagnostics.is_empty() {
            let _ = writeln!(out, "\ndiagnostics:");
            for d in &self.diagnostics {
                let verdict = if d.agrees { "agrees" } else { "DISAGREES" };
                let _ = writeln!(
                    out,
                    "  {}: computed {} vs recorded claim {} -> {verdict}",
                    d.quantity,
                    d.computed.as_deref().unwrap_or("<missing>"),
                    d.claimed
                );
                if !d.note.is_empty() {
                    let _ = writeln!(out, "    {}", d.note);
                }
            }
        }
        if !self.metadata.is_empty() {
            let _ = writeln!(out, "\nmetadata:");
            for (k, v) in &self.metadata {
                let _ = writeln!(out, "  {k}: {v}");
            }
        }
        out
    }
}
