//! Experiment configuration: a versioned JSON document, validated field by field so that every
//! violation is reported at once.

use std::fmt;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use rumor_core::dist::{parse_continuous_tail, Law, SequenceLaw};
use rumor_core::tree::TreeSpec;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Analyze,
    Simulate,
    Sweep,
    Xval,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Xval => "xval",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Fireworks,
    Reverse,
    Cone,
    Disk,
    ReverseCone,
    EnvFireworks,
    EnvReverse,
    EnvCone,
    MarkovCoverage,
    BooleanCoverage,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Fireworks => "fireworks",
            Model::Reverse => "reverse",
            Model::Cone => "cone",
            Model::Disk => "disk",
            Model::ReverseCone => "reverse_cone",
            Model::EnvFireworks => "env_fireworks",
            Model::EnvReverse => "env_reverse",
            Model::EnvCone => "env_cone",
            Model::MarkovCoverage => "markov_coverage",
            Model::BooleanCoverage => "boolean_coverage",
        }
    }

    fn on_tree(self) -> bool {
        matches!(self, Model::Cone | Model::Disk | Model::ReverseCone | Model::EnvCone)
    }

    fn on_line(self) -> bool {
        matches!(self, Model::Fireworks | Model::Reverse | Model::EnvFireworks | Model::EnvReverse)
    }

    fn with_stations(self) -> bool {
        matches!(self, Model::EnvFireworks | Model::EnvReverse | Model::EnvCone)
    }

    fn coverage(self) -> bool {
        matches!(self, Model::MarkovCoverage | Model::BooleanCoverage)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}` (expected csv or json)")),
        }
    }
}

/// Markov-chain coverage of ℕ: transition probabilities and the cover-length law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkovSpec {
    pub p01: f64,
    pub p10: f64,
    pub rho: String,
}

/// Poisson Boolean model on `ℝ^d_+`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BooleanSpec {
    pub lambda: f64,
    /// Continuous tail `P(ρ > x)`, e.g. `pow:2,1`.
    pub tail: String,
    #[serde(default = "one")]
    pub d: u32,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepField {
    Radius,
    Stations,
    Substrate,
    Horizon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    Analyze,
    Simulate,
    Xval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub field: SweepField,
    /// Grid values; each is substituted for `{}` in `template` when one is given.
    pub grid: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<String>,
    #[serde(default = "default_mode")]
    pub mode: SweepMode,
}

fn default_mode() -> SweepMode {
    SweepMode::Simulate
}

impl Sweep {
    /// Literal for grid point `i`.
    pub fn literal(&self, i: usize) -> String {
        let raw = match &self.grid[i] {
            Value::String(s) => s.clone(),
            v => v.to_string(),
        };
        match &self.template {
            Some(t) => t.replace("{}", &raw),
            None => raw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub command: Command,
    pub model: Model,
    pub substrate: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_sequence: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stations: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stations_sequence: Option<String>,
    pub horizon: u64,
    pub trials: u64,
    pub master_seed: u64,
    pub tolerance: f64,
    pub eps_residual: f64,
    pub max_vertices: u64,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub markov: Option<MarkovSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boolean: Option<BooleanSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

/// One schema violation, located by a JSON path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<Violation>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} configuration error(s):", self.0.len())?;
        for v in &self.0 {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

const FIELDS: &[&str] = &[
    "schema",
    "command",
    "model",
    "substrate",
    "radius",
    "radius_sequence",
    "stations",
    "stations_sequence",
    "horizon",
    "trials",
    "master_seed",
    "tolerance",
    "eps_residual",
    "max_vertices",
    "format",
    "markov",
    "boolean",
    "sweep",
];

struct Reader<'a> {
    obj: &'a Map<String, Value>,
    errors: Vec<Violation>,
}

impl Reader<'_> {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(Violation { path: path.into(), message: message.into() });
    }

    fn opt<T: DeserializeOwned>(&mut self, key: &str) -> Option<T> {
        let v = self.obj.get(key)?;
        match T::deserialize(v) {
            Ok(t) => Some(t),
            Err(e) => {
                self.push(format!("$.{key}"), e.to_string());
                None
            }
        }
    }

    fn required<T: DeserializeOwned>(&mut self, key: &str) -> Option<T> {
        if !self.obj.contains_key(key) {
            self.push(format!("$.{key}"), "missing required field");
            return None;
        }
        self.opt(key)
    }
}

/// Parses and validates a configuration. `command` overrides (or supplies) the command field;
/// a conflicting value in the document is reported as a violation.
pub fn parse_config(text: &str, command: Option<Command>) -> Result<ExperimentConfig, ConfigErrors> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| ConfigErrors(vec![Violation { path: "$".into(), message: format!("invalid JSON: {e}") }]))?;
    let Value::Object(obj) = &value else {
        return Err(ConfigErrors(vec![Violation { path: "$".into(), message: "expected a JSON object".into() }]));
    };
    let mut r = Reader { obj, errors: Vec::new() };
    for key in obj.keys() {
        if !FIELDS.contains(&key.as_str()) {
            r.push(format!("$.{key}"), "unknown field");
        }
    }
    let schema: Option<u32> = r.required("schema");
    if let Some(s) = schema {
        if s != SCHEMA {
            r.push("$.schema", format!("unsupported schema {s} (expected {SCHEMA})"));
        }
    }
    let doc_command: Option<Command> = r.opt("command");
    let command = match (doc_command, command) {
        (Some(a), Some(b)) if a != b => {
            r.push("$.command", format!("`{}` conflicts with the requested `{}`", a.as_str(), b.as_str()));
            None
        }
        (a, b) => b.or(a),
    };
    if command.is_none() && !obj.contains_key("command") {
        r.push("$.command", "missing required field");
    }
    let model: Option<Model> = r.required("model");
    let substrate: Option<String> = r.opt("substrate");
    let cfg = ExperimentConfig {
        schema: SCHEMA,
        command: command.unwrap_or(Command::Analyze),
        model: model.unwrap_or(Model::Fireworks),
        substrate: substrate.unwrap_or_else(|| "line".into()),
        radius: r.opt("radius"),
        radius_sequence: r.opt("radius_sequence"),
        stations: r.opt("stations"),
        stations_sequence: r.opt("stations_sequence"),
        horizon: r.opt("horizon").unwrap_or(1000),
        trials: r.opt("trials").unwrap_or(10_000),
        master_seed: r.opt("master_seed").unwrap_or(0),
        tolerance: r.opt("tolerance").unwrap_or(1e-12),
        eps_residual: r.opt("eps_residual").unwrap_or(rumor_core::sim::DEFAULT_EPS_RESIDUAL),
        max_vertices: r.opt("max_vertices").unwrap_or(10_000_000),
        format: r.opt("format").unwrap_or_default(),
        markov: r.opt("markov"),
        boolean: r.opt("boolean"),
        sweep: r.opt("sweep"),
    };
    let mut errors = r.errors;
    if model.is_some() && command.is_some() {
        errors.extend(cfg.violations());
    }
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigErrors(errors))
    }
}

fn violation(path: &str, message: impl Into<String>) -> Violation {
    Violation { path: path.into(), message: message.into() }
}

impl ExperimentConfig {
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Semantic checks on an already typed configuration.
    pub fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let m = self.model;
        if self.trials == 0 {
            v.push(violation("$.trials", "must be at least 1"));
        }
        if self.horizon == 0 {
            v.push(violation("$.horizon", "must be at least 1"));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            v.push(violation("$.tolerance", "must lie in (0, 1)"));
        }
        if !(self.eps_residual > 0.0 && self.eps_residual < 1.0) {
            v.push(violation("$.eps_residual", "must lie in (0, 1)"));
        }
        if m.on_line() || m.coverage() {
            if self.substrate != "line" {
                v.push(violation("$.substrate", format!("model {} runs on `line`", m.as_str())));
            }
        } else if m.on_tree() {
            if let Err(e) = self.substrate.parse::<TreeSpec>() {
                v.push(violation("$.substrate", e.to_string()));
            }
        }
        if !m.coverage() {
            match (&self.radius, &self.radius_sequence) {
                (None, None) => v.push(violation("$.radius", "missing required field")),
                (Some(_), Some(_)) => v.push(violation("$.radius_sequence", "give either radius or radius_sequence")),
                _ => {}
            }
        }
        if let Some(r) = &self.radius {
            if let Err(e) = r.parse::<Law>() {
                v.push(violation("$.radius", e.to_string()));
            }
        }
        if let Some(s) = &self.radius_sequence {
            if !matches!(m, Model::Fireworks | Model::Reverse | Model::EnvFireworks) {
                v.push(violation("$.radius_sequence", format!("not supported for model {}", m.as_str())));
            }
            if let Err(e) = s.parse::<SequenceLaw>() {
                v.push(violation("$.radius_sequence", e.to_string()));
            }
        }
        if m.with_stations() {
            match (&self.stations, &self.stations_sequence) {
                (None, None) => v.push(violation("$.stations", "missing required field")),
                (Some(_), Some(_)) => v.push(violation("$.stations_sequence", "give either stations or stations_sequence")),
                _ => {}
            }
            if self.stations_sequence.is_some() != self.radius_sequence.is_some() {
                v.push(violation("$.stations_sequence", "sequences must be given for both stations and radius"));
            }
        } else {
            if self.stations.is_some() {
                v.push(violation("$.stations", format!("model {} has no stations", m.as_str())));
            }
            if self.stations_sequence.is_some() {
                v.push(violation("$.stations_sequence", format!("model {} has no stations", m.as_str())));
            }
        }
        if let Some(s) = &self.stations {
            if let Err(e) = s.parse::<Law>() {
                v.push(violation("$.stations", e.to_string()));
            }
        }
        if let Some(s) = &self.stations_sequence {
            if let Err(e) = s.parse::<SequenceLaw>() {
                v.push(violation("$.stations_sequence", e.to_string()));
            }
        }
        match (m, &self.markov) {
            (Model::MarkovCoverage, None) => v.push(violation("$.markov", "missing required field")),
            (Model::MarkovCoverage, Some(mk)) => {
                for (name, p) in [("p01", mk.p01), ("p10", mk.p10)] {
                    if !(p > 0.0 && p < 1.0) {
                        v.push(violation(&format!("$.markov.{name}"), "must lie in (0, 1)"));
                    }
                }
                if let Err(e) = mk.rho.parse::<Law>() {
                    v.push(violation("$.markov.rho", e.to_string()));
                }
            }
            (_, Some(_)) => v.push(violation("$.markov", format!("model {} takes no markov block", m.as_str()))),
            _ => {}
        }
        match (m, &self.boolean) {
            (Model::BooleanCoverage, None) => v.push(violation("$.boolean", "missing required field")),
            (Model::BooleanCoverage, Some(b)) => {
                if !(b.lambda > 0.0) {
                    v.push(violation("$.boolean.lambda", "must be positive"));
                }
                if b.d == 0 {
                    v.push(violation("$.boolean.d", "must be at least 1"));
                }
                if let Err(e) = parse_continuous_tail(&b.tail) {
                    v.push(violation("$.boolean.tail", e.to_string()));
                }
            }
            (_, Some(_)) => v.push(violation("$.boolean", format!("model {} takes no boolean block", m.as_str()))),
            _ => {}
        }
        match (self.command, &self.sweep) {
            (Command::Sweep, None) => v.push(violation("$.sweep", "missing required field")),
            (Command::Sweep, Some(sw)) => {
                if sw.grid.is_empty() {
                    v.push(violation("$.sweep.grid", "must not be empty"));
                }
                for i in 0..sw.grid.len() {
                    match self.at_grid_point(i) {
                        Ok(c) => {
                            for e in c.violations() {
                                v.push(violation(&format!("$.sweep.grid[{i}]"), format!("{}: {}", e.path, e.message)));
                            }
                        }
                        Err(e) => v.push(violation(&format!("$.sweep.grid[{i}]"), e)),
                    }
                }
            }
            (_, Some(_)) => v.push(violation("$.sweep", "only the sweep command takes a sweep block")),
            _ => {}
        }
        v
    }

    /// The configuration of grid point `i`, run with the sweep's mode.
    pub fn at_grid_point(&self, i: usize) -> Result<ExperimentConfig, String> {
        let sw = self.sweep.as_ref().ok_or("no sweep block")?;
        let lit = sw.literal(i);
        let mut c = self.clone();
        c.sweep = None;
        c.command = match sw.mode {
            SweepMode::Analyze => Command::Analyze,
            SweepMode::Simulate => Command::Simulate,
            SweepMode::Xval => Command::Xval,
        };
        match sw.field {
            SweepField::Radius => c.radius = Some(lit),
            SweepField::Stations => c.stations = Some(lit),
            SweepField::Substrate => c.substrate = lit,
            SweepField::Horizon => c.horizon = lit.parse().map_err(|_| format!("horizon `{lit}` is not an integer"))?,
        }
        Ok(c)
    }

    /// Compact `key=value` list of the model parameters.
    pub fn params(&self) -> String {
        let mut p = Vec::new();
        for (k, v) in [
            ("radius", &self.radius),
            ("radius_sequence", &self.radius_sequence),
            ("stations", &self.stations),
            ("stations_sequence", &self.stations_sequence),
        ] {
            if let Some(v) = v {
                p.push(format!("{k}={v}"));
            }
        }
        if let Some(m) = &self.markov {
            p.push(format!("p01={};p10={};rho={}", m.p01, m.p10, m.rho));
        }
        if let Some(b) = &self.boolean {
            p.push(format!("lambda={};tail={};d={}", b.lambda, b.tail, b.d));
        }
        p.join(";")
    }

    pub fn radius_law(&self) -> Option<Law> {
        self.radius.as_deref().map(|r| r.parse().expect("validated"))
    }

    pub fn stations_law(&self) -> Option<Law> {
        self.stations.as_deref().map(|r| r.parse().expect("validated"))
    }

    pub fn radius_seq(&self) -> Option<SequenceLaw> {
        self.radius_sequence.as_deref().map(|r| r.parse().expect("validated"))
    }

    pub fn stations_seq(&self) -> Option<SequenceLaw> {
        self.stations_sequence.as_deref().map(|r| r.parse().expect("validated"))
    }

    pub fn tree(&self) -> Option<TreeSpec> {
        self.substrate.parse().ok()
    }
}
