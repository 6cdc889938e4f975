//! Scenario runner: resolves a configuration, runs one experiment against
//! the library and writes a versioned JSON report, CSV metric tables and
//! SVG plots.

mod scenarios;
pub mod svg;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use svg::Plot;

/// Version of the report layout written by [`write_artifacts`].
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "LIE_EXPAND_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    BchOrder,
    SynthWord,
    NongrowthAp,
    GrowthSu2,
    SumProductGenerate,
    CommutatorCoverage,
    LinearizeDemo,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::BchOrder,
        Scenario::SynthWord,
        Scenario::NongrowthAp,
        Scenario::GrowthSu2,
        Scenario::SumProductGenerate,
        Scenario::CommutatorCoverage,
        Scenario::LinearizeDemo,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::BchOrder => "bch-order",
            Scenario::SynthWord => "synth-word",
            Scenario::NongrowthAp => "nongrowth-ap",
            Scenario::GrowthSu2 => "growth-su2",
            Scenario::SumProductGenerate => "sum-product-generate",
            Scenario::CommutatorCoverage => "commutator-coverage",
            Scenario::LinearizeDemo => "linearize-demo",
        }
    }

    /// Whether the scenario draws random samples and so needs a seed.
    pub fn is_randomized(&self) -> bool {
        matches!(
            self,
            Scenario::BchOrder
                | Scenario::GrowthSu2
                | Scenario::SumProductGenerate
                | Scenario::CommutatorCoverage
                | Scenario::LinearizeDemo
        )
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Scenario::ALL.iter().map(|c| c.name()).collect();
            Error::Config(format!("unknown scenario '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

/// Experiment knobs. Unset fields take per-scenario defaults; a field the
/// scenario does not use is rejected.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub backend: Option<String>,
    pub s: Option<usize>,
    pub ell: Option<usize>,
    pub d: Option<usize>,
    pub kappa: Option<f64>,
    pub delta: Option<f64>,
    pub r: Option<f64>,
    pub rho: Option<f64>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub samples: Option<usize>,
    pub noise: Option<f64>,
    pub max_points: Option<u64>,
    pub region_radius: Option<f64>,
}

impl Params {
    /// Names of the fields that are set.
    fn set_fields(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        macro_rules! check {
            ($($f:ident),*) => { $(if self.$f.is_some() { out.push(stringify!($f)); })* };
        }
        check!(backend, s, ell, d, kappa, delta, r, rho, k, seed, points, samples, noise, max_points, region_radius);
        out
    }

    /// Overlays the fields set in `other`.
    pub fn merge(&mut self, other: &Params) {
        macro_rules! take {
            ($($f:ident),*) => { $(if other.$f.is_some() { self.$f = other.$f.clone(); })* };
        }
        take!(backend, s, ell, d, kappa, delta, r, rho, k, seed, points, samples, noise, max_points, region_radius);
    }
}

/// A scenario with its parameters, as read from `--config`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario, params: Params) -> Self {
        ScenarioConfig { scenario, params, out: None }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Checks the parameters against the scenario's schema.
    pub fn validate(&self) -> Result<()> {
        let allowed = scenarios::allowed_params(self.scenario);
        if let Some(bad) = self.params.set_fields().into_iter().find(|f| !allowed.contains(f)) {
            return Err(Error::Config(format!(
                "parameter '{bad}' does not apply to {} (accepted: {})",
                self.scenario,
                allowed.join(", ")
            )));
        }
        scenarios::resolve(self).map(|_| ())
    }
}

/// One scalar result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub units: String,
    /// What the value is compared against.
    pub tolerance: String,
}

impl Metric {
    pub fn new(name: &str, value: f64, units: &str, tolerance: &str) -> Self {
        Metric { name: name.into(), value, units: units.into(), tolerance: tolerance.into() }
    }
}

/// A named numeric table written as CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Everything a scenario produces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub version: String,
    pub scenario: Scenario,
    /// Parameters after defaults were filled in.
    pub config: BTreeMap<String, Value>,
    pub metrics: Vec<Metric>,
    pub tables: Vec<Table>,
    /// Stages whose output hit a budget cap.
    pub truncated: Vec<String>,
    /// `false` when a stage was truncated or the run stopped early.
    pub complete: bool,
    pub error: Option<String>,
    pub wall_clock_seconds: f64,
    pub artifacts: Vec<String>,
    #[serde(skip)]
    pub plots: Vec<Plot>,
}

impl RunReport {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == name).map(|m| m.value)
    }

    /// The metrics as CSV; identical across reruns with the same config.
    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("name,value,units,tolerance\n");
        for m in &self.metrics {
            out.push_str(&format!("{},{},{},{}\n", m.name, m.value, csv_field(&m.units), csv_field(&m.tolerance)));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Accumulated output of a scenario body.
#[derive(Default)]
pub(crate) struct Outcome {
    pub metrics: Vec<Metric>,
    pub tables: Vec<Table>,
    pub plots: Vec<Plot>,
    pub truncated: Vec<String>,
}

impl Outcome {
    pub fn metric(&mut self, name: &str, value: f64, units: &str, tolerance: &str) {
        self.metrics.push(Metric::new(name, value, units, tolerance));
    }
}

/// Runs a validated scenario. Invalid configurations are errors; a budget
/// cap hit during the run yields a report with `complete = false` and the
/// error message, holding whatever was measured before.
pub fn run(config: &ScenarioConfig) -> Result<RunReport> {
    config.validate()?;
    let resolved = scenarios::resolve(config)?;
    let start = Instant::now();
    let mut outcome = Outcome::default();
    let result = scenarios::execute(config.scenario, &resolved, &mut outcome);
    let error = match result {
        Ok(()) => None,
        Err(Error::ResourceLimit(msg)) => Some(format!("resource limit exceeded: {msg}")),
        Err(e) => return Err(e),
    };
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: config.scenario,
        config: resolved.to_map(),
        complete: error.is_none() && outcome.truncated.is_empty(),
        metrics: outcome.metrics,
        tables: outcome.tables,
        truncated: outcome.truncated,
        error,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        artifacts: Vec::new(),
        plots: outcome.plots,
    })
}

/// Output formats selected by `--emit`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    Json,
    Csv,
    Svg,
}

impl FromStr for Emit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Emit::Json),
            "csv" => Ok(Emit::Csv),
            "svg" => Ok(Emit::Svg),
            other => Err(Error::Config(format!("unknown output format '{other}' (expected json, csv or svg)"))),
        }
    }
}

/// Writes the selected artifacts into `dir` and records their names in the
/// report. CSV output is `metrics.csv` plus one file per table.
pub fn write_artifacts(report: &mut RunReport, dir: &Path, emit: &[Emit]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let put = |written: &mut Vec<PathBuf>, name: String, body: String| -> Result<()> {
        let path = dir.join(&name);
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    if emit.contains(&Emit::Csv) {
        put(&mut written, "metrics.csv".into(), report.metrics_csv())?;
        for t in &report.tables {
            put(&mut written, format!("{}.csv", t.name), t.to_csv())?;
        }
    }
    if emit.contains(&Emit::Svg) {
        for p in &report.plots {
            put(&mut written, format!("{}.svg", p.name), p.render())?;
        }
    }
    if emit.contains(&Emit::Json) {
        let mut names: Vec<String> =
            written.iter().filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned())).collect();
        names.push("report.json".into());
        report.artifacts = names;
        put(&mut written, "report.json".into(), serde_json::to_string_pretty(report)? + "\n")?;
    } else {
        report.artifacts =
            written.iter().filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned())).collect();
    }
    Ok(written)
}

pub fn read_report(path: &Path) -> Result<RunReport> {
    let text = fs::read_to_string(path)?;
    let report: RunReport = serde_json::from_str(&text)?;
    if report.schema_version != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "{} has schema version {}, expected {SCHEMA_VERSION}",
            path.display(),
            report.schema_version
        )));
    }
    Ok(report)
}

/// Aligns reports of one scenario into a CSV with one row per report:
/// the configuration keys, then every metric seen, in first-seen order.
pub fn compare(reports: &[RunReport]) -> Result<String> {
    let first = reports.first().ok_or_else(|| Error::usage("nothing to compare"))?;
    if let Some(other) = reports.iter().find(|r| r.scenario != first.scenario) {
        return Err(Error::usage(format!("cannot compare {} with {}", first.scenario, other.scenario)));
    }
    let mut keys: Vec<&String> = reports.iter().flat_map(|r| r.config.keys()).collect();
    keys.sort();
    keys.dedup();
    let mut metrics: Vec<&str> = Vec::new();
    for m in reports.iter().flat_map(|r| &r.metrics) {
        if !metrics.contains(&m.name.as_str()) {
            metrics.push(&m.name);
        }
    }
    let mut out: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
    out.extend(metrics.iter().map(|m| m.to_string()));
    out.push("complete".into());
    let mut text = out.join(",") + "\n";
    for r in reports {
        let mut row: Vec<String> = keys
            .iter()
            .map(|k| match r.config.get(*k) {
                Some(Value::String(s)) => csv_field(s),
                Some(v) => v.to_string(),
                None => String::new(),
            })
            .collect();
        row.extend(metrics.iter().map(|m| r.metric(m).map(|v| v.to_string()).unwrap_or_default()));
        row.push(r.complete.to_string());
        text.push_str(&row.join(","));
        text.push('\n');
    }
    Ok(text)
}

/// Installs the global thread pool, sized by [`THREADS_ENV`] when set.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot size the thread pool: {e}")))
}
