//! Scenario files (TOML). See `docs/scenario-format.md` for the full format.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::NumericScenario;
use crate::symcore::{
    parse, Bindings, Expr, PhaseSpace, SymError, SymbolId, SymbolTable, SymbolTableBuilder,
};

pub const BUILTIN: &[(&str, &str)] = &[
    (
        "combined-trap-with-flux",
        include_str!("../fixtures/combined-trap-with-flux.toml"),
    ),
    (
        "spectator-off",
        include_str!("../fixtures/spectator-off.toml"),
    ),
    ("flux-off", include_str!("../fixtures/flux-off.toml")),
];

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid scenario file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("in `{field}`: {source}")]
    Expr { field: String, source: SymError },
    #[error("{0}")]
    Invalid(String),
}

type Result<T> = std::result::Result<T, ScenarioError>;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub symbols: SymbolsSection,
    #[serde(default)]
    pub aliases: BTreeMap<String, String>,
    #[serde(default)]
    pub presentation: BTreeMap<String, String>,
    pub model: ModelSection,
    pub gauge: Option<GaugeSection>,
    pub numeric: Option<NumericSection>,
    #[serde(default)]
    pub golden: Vec<Golden>,
    #[serde(default)]
    pub claim: Vec<Claim>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolsSection {
    pub coordinates: Vec<String>,
    pub momenta: Vec<String>,
    /// velocity name → coordinate name
    pub velocities: BTreeMap<String, String>,
    /// Parameters assumed strictly positive.
    pub parameters: Vec<String>,
    #[serde(default)]
    pub signed_parameters: Vec<String>,
    /// Names of the reduced canonical pair, coordinate first.
    pub reduced: [String; 2],
    #[serde(default = "default_hbar")]
    pub hbar: String,
}

fn default_hbar() -> String {
    "hbar".into()
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub lagrangian: String,
    /// Optional cross-check of the Legendre transform.
    pub hamiltonian: Option<String>,
    pub limit_level: String,
    pub angular_momentum: String,
    /// Variables kept independent in the reduction; default all coordinates.
    pub independent: Option<Vec<String>>,
    #[serde(default = "default_max_gen")]
    pub max_generations: usize,
    /// Parameters set to zero for the flux-independence check of the
    /// mechanical-momentum brackets.
    #[serde(default)]
    pub flux_parameters: Vec<String>,
}

fn default_max_gen() -> usize {
    5
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSection {
    pub gradient: Vec<String>,
    pub winding: String,
    /// `q/c`, the coupling of the gauge function to the momenta.
    pub coupling: String,
    /// Vector potential expected to be gauged away.
    pub potential: Vec<String>,
    /// Expected Hamiltonian after the transformation.
    pub expected_hamiltonian: Option<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NumericSection {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub omega_c: f64,
    #[serde(default = "half")]
    pub omega_p: f64,
    #[serde(default = "default_sectors")]
    pub sectors: Vec<i64>,
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default = "default_grid")]
    pub grid: usize,
    pub r_max: Option<f64>,
    pub hard_wall: Option<f64>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    pub trajectory: Option<TrajectorySection>,
    pub secular: Option<SecularSection>,
}

fn default_alpha() -> f64 {
    0.25
}
fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn default_sectors() -> Vec<i64> {
    vec![-1, 0, 1]
}
fn default_levels() -> usize {
    3
}
fn default_grid() -> usize {
    2000
}
fn default_tolerance() -> f64 {
    1e-5
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySection {
    pub dt: f64,
    pub periods: f64,
    pub initial: [f64; 4],
    #[serde(default = "default_stride")]
    pub stride: usize,
}

fn default_stride() -> usize {
    1000
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SecularSection {
    pub ratios: Vec<f64>,
    #[serde(default = "default_secular_periods")]
    pub secular_periods: f64,
}

fn default_secular_periods() -> f64 {
    400.0
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Golden {
    pub quantity: String,
    pub expected: String,
    #[serde(default)]
    pub anchor: String,
    /// Present for numeric goldens.
    pub tolerance: Option<f64>,
}

/// A claimed value recorded for comparison; disagreement is reported, not
/// treated as failure.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Claim {
    pub quantity: String,
    pub claimed: String,
    #[serde(default)]
    pub anchor: String,
    #[serde(default)]
    pub note: String,
}

/// Symbol table and derived objects shared by every stage.
#[derive(Clone, Debug)]
pub struct Context {
    pub table: Arc<SymbolTable>,
    pub phase_space: PhaseSpace,
    pub reduced: (SymbolId, SymbolId),
    pub hbar: Expr,
    pub independent: Vec<SymbolId>,
    pub presentation: Bindings,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Scenario> {
        Ok(toml::from_str(text)?)
    }

    pub fn builtin(name: &str) -> Option<Scenario> {
        BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| Scenario::from_toml(text).expect("built-in fixture parses"))
    }

    pub fn builtin_names() -> Vec<&'static str> {
        BUILTIN.iter().map(|(n, _)| *n).collect()
    }

    /// A built-in fixture name or a path to a scenario file.
    pub fn load(spec: &str) -> Result<Scenario> {
        if let Some(s) = Scenario::builtin(spec) {
            return Ok(s);
        }
        let path = Path::new(spec);
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: spec.to_string(),
            source,
        })?;
        Scenario::from_toml(&text)
    }

    pub fn context(&self) -> Result<Context> {
        let s = &self.symbols;
        let err = |field: &str| {
            let field = field.to_string();
            move |source| ScenarioError::Expr { field, source }
        };
        let mut b = SymbolTableBuilder::new();
        for q in &s.coordinates {
            b.coordinate(q).map_err(err("symbols.coordinates"))?;
        }
        for p in &s.momenta {
            b.momentum(p).map_err(err("symbols.momenta"))?;
        }
        for (v, q) in &s.velocities {
            b.velocity(v, q).map_err(err("symbols.velocities"))?;
        }
        b.coordinate(&s.reduced[0])
            .map_err(err("symbols.reduced"))?;
        b.momentum(&s.reduced[1]).map_err(err("symbols.reduced"))?;
        for p in &s.parameters {
            b.parameter(p, true).map_err(err("symbols.parameters"))?;
        }
        for p in &s.signed_parameters {
            b.parameter(p, false)
                .map_err(err("symbols.signed_parameters"))?;
        }
        for (name, def) in &self.aliases {
            b.alias(name, def)
                .map_err(err(&format!("aliases.{name}")))?;
        }
        let table = b.build().map_err(err("aliases"))?;
        if s.coordinates.len() != s.momenta.len() {
            return Err(ScenarioError::Invalid(
                "coordinates and momenta differ in number".into(),
            ));
        }
        let pairs = s
            .coordinates
            .iter()
            .zip(&s.momenta)
            .map(|(q, p)| {
                (
                    table.lookup(q).expect("registered"),
                    table.lookup(p).expect("registered"),
                )
            })
            .collect();
        let phase_space = PhaseSpace::new(pairs).map_err(err("symbols"))?;
        let reduced = (
            table.lookup(&s.reduced[0]).expect("registered"),
            table.lookup(&s.reduced[1]).expect("registered"),
        );
        let hbar = parse(&s.hbar, &table).map_err(err("symbols.hbar"))?;
        let independent = match &self.model.independent {
            None => phase_space.coordinates(),
            Some(names) => names
                .iter()
                .map(|n| table.get(n).map_err(err("model.independent")))
                .collect::<Result<_>>()?,
        };
        let mut presentation = Bindings::new();
        for (name, def) in &self.presentation {
            let field = format!("presentation.{name}");
            let id = table.get(name).map_err(err(&field))?;
            presentation.insert(id, parse(def, &table).map_err(err(&field))?);
        }
        Ok(Context {
            table,
            phase_space,
            reduced,
            hbar,
            independent,
            presentation,
        })
    }

    pub fn numeric_scenario(&self) -> NumericScenario {
        match &self.numeric {
            Some(n) => NumericScenario {
                alpha: n.alpha,
                omega_c: n.omega_c,
                omega_p: n.omega_p,
            },
            None => NumericScenario::default(),
        }
    }
}

impl Context {
    pub fn parse(&self, field: &str, text: &str) -> Result<Expr> {
        parse(text, &self.table).map_err(|source| ScenarioError::Expr {
            field: field.to_string(),
            source,
        })
    }

    /// Applies the presentation rewrites (e.g. writing a frequency through a
    /// flux). Falls back to the input if a rewrite is singular.
    pub fn present(&self, e: &Expr) -> Expr {
        if self.presentation.is_empty() {
            return e.clone();
        }
        e.substitute(&self.presentation)
            .unwrap_or_else(|_| e.clone())
    }
}
