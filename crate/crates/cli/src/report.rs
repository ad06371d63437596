//! Reports and deterministic JSON output.

use std::io;

use plsigma::lattice::ConvergenceStudy;
use plsigma::DefectReport;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};

use crate::config::ModelConfig;

pub const TOOL: &str = "plsigma";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: Vec<String>,
    pub pass: bool,
}

impl Summary {
    pub fn of(reports: &[DefectReport]) -> Self {
        let failed: Vec<String> = reports.iter().filter(|r| !r.pass).map(|r| r.check_name.clone()).collect();
        Self {
            checks: reports.len(),
            passed: reports.len() - failed.len(),
            pass: failed.is_empty(),
            failed,
        }
    }
}

/// ε̃-sweep of the variation probe on the finest grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeSweep {
    pub nodes: usize,
    pub eps_tilde: Vec<f64>,
    pub solution: Vec<f64>,
    pub solution_slope: f64,
    pub non_solution: Vec<f64>,
    pub non_solution_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub model: String,
    pub config_hash: String,
    pub seed: u64,
    pub reports: Vec<DefectReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceStudy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeSweep>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &str, config: &ModelConfig, seed: u64, reports: Vec<DefectReport>) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command: command.into(),
            model: config.name.clone(),
            config_hash: config_hash(config),
            seed,
            summary: Summary::of(&reports),
            reports,
            convergence: None,
            probe: None,
        }
    }
}

/// Pretty JSON with floats as `{:.16e}` (17 significant digits) and
/// non-finite values as `null`.
struct ExactFloats(PrettyFormatter<'static>);

impl Formatter for ExactFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Float in the report format, for CSV cells.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

/// SHA-256 of the config as serialized by [`to_json`].
pub fn config_hash(config: &ModelConfig) -> String {
    Sha256::digest(to_json(config).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
