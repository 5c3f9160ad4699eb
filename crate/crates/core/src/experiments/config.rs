//! TOML experiment files. Layout:
//!
//! ```toml
//! schema = 1
//! output_dir = "results"          # optional, relative to the file
//!
//! [[experiment]]
//! name = "hat-bound"
//! kind = "bound_kantorovich"
//! kernel = "bspline:2"
//! function = ["hat2d", "corpus:1"]
//! P = ["1,2", "2,2"]
//! w = [1, 2, 4, 8]
//! ```
//!
//! Optional keys per experiment: `Phi`, `lambda`, `dims`, `slack`,
//! `threshold`, `wrong_constant`, `radius`, `output`, `nodes` (`"default"` or
//! `"reduced"`) and `quadrature = { rule, order, cells_per_unit }`.

use std::collections::HashSet;
use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};
use crate::norms::{ExponentVector, OrliczVector};
use crate::numerics::{QuadratureSpec, Rule};
use crate::operators::NodePolicy;

use super::{ExperimentKind, ExperimentSpec};

pub const SCHEMA_VERSION: i64 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub experiments: Vec<ExperimentSpec>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    schema: Option<Spanned<i64>>,
    output_dir: Option<String>,
    #[serde(default)]
    experiment: Vec<Spanned<RawExperiment>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    rule: String,
    order: Option<usize>,
    cells_per_unit: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    name: String,
    kind: Spanned<String>,
    kernel: Spanned<OneOrMany<String>>,
    function: Option<Spanned<OneOrMany<String>>>,
    #[serde(rename = "P")]
    p: Option<Spanned<OneOrMany<String>>>,
    #[serde(rename = "Phi")]
    phi: Option<Spanned<OneOrMany<String>>>,
    w: Option<Spanned<Vec<f64>>>,
    lambda: Option<f64>,
    dims: Option<Vec<usize>>,
    slack: Option<f64>,
    threshold: Option<f64>,
    #[serde(default)]
    wrong_constant: bool,
    radius: Option<usize>,
    output: Option<String>,
    nodes: Option<Spanned<String>>,
    quadrature: Option<Spanned<RawQuadrature>>,
}

/// Maps byte offsets to 1-based line numbers.
struct Lines<'a>(&'a str);

impl Lines<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        let end = span.start.min(self.0.len());
        self.0[..end].bytes().filter(|&b| b == b'\n').count() + 1
    }

    fn err(&self, span: Range<usize>, message: impl Into<String>) -> Error {
        Error::Config {
            line: self.line(span),
            message: message.into(),
        }
    }

    /// Re-tag an error from a value parser with the line of the value.
    fn at<T>(&self, span: Range<usize>, r: Result<T>) -> Result<T> {
        r.map_err(|e| self.err(span, e.to_string()))
    }
}

fn quadrature(lines: &Lines, raw: Spanned<RawQuadrature>) -> Result<QuadratureSpec> {
    let span = raw.span();
    let raw = raw.into_inner();
    let cells = raw.cells_per_unit.unwrap_or(QuadratureSpec::default().cells_per_unit());
    let rule = match (raw.rule.as_str(), raw.order) {
        ("midpoint", None) => Rule::Midpoint,
        ("simpson", None) => Rule::Simpson,
        ("gauss_legendre", order) => Rule::GaussLegendre(order.unwrap_or(5)),
        ("midpoint" | "simpson", Some(_)) => return Err(lines.err(span, format!("rule '{}' takes no order", raw.rule))),
        (other, _) => {
            return Err(lines.err(span, format!("unknown rule '{other}' (known: midpoint, simpson, gauss_legendre)")))
        }
    };
    lines.at(span, QuadratureSpec::new(rule, cells))
}

fn experiment(lines: &Lines, raw: Spanned<RawExperiment>, out_dir: &Path) -> Result<ExperimentSpec> {
    let table = raw.span();
    let raw = raw.into_inner();
    let kind = lines.at(raw.kind.span(), raw.kind.get_ref().parse::<ExperimentKind>())?;
    let output = out_dir.join(raw.output.unwrap_or_else(|| format!("{}.csv", raw.name)));
    let mut spec = ExperimentSpec::new(raw.name, kind, output);
    spec.kernels = raw.kernel.into_inner().into_vec();
    if let Some(f) = raw.function {
        spec.functions = f.into_inner().into_vec();
    }
    if let Some(p) = raw.p {
        let span = p.span();
        spec.exponents = lines.at(span, p.into_inner().into_vec().iter().map(|s| s.parse::<ExponentVector>()).collect())?;
    }
    if let Some(phi) = raw.phi {
        let span = phi.span();
        spec.phis = lines.at(span, phi.into_inner().into_vec().iter().map(|s| s.parse::<OrliczVector>()).collect())?;
    }
    if let Some(w) = raw.w {
        spec.w_values = w.into_inner();
    }
    if let Some(l) = raw.lambda {
        spec.lambda = l;
    }
    if let Some(d) = raw.dims {
        spec.dims = d;
    }
    if let Some(s) = raw.slack {
        spec.slack = s;
    }
    spec.threshold = raw.threshold;
    spec.wrong_constant = raw.wrong_constant;
    spec.radius = raw.radius;
    if let Some(n) = raw.nodes {
        spec.nodes = match n.get_ref().as_str() {
            "default" => NodePolicy::default(),
            "reduced" => NodePolicy::reduced(),
            other => return Err(lines.err(n.span(), format!("unknown node policy '{other}' (known: default, reduced)"))),
        };
    }
    if let Some(q) = raw.quadrature {
        spec.quadrature = quadrature(lines, q)?;
    }
    lines.at(table, spec.validate())?;
    Ok(spec)
}

/// Parses a config; relative output paths are resolved against `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<Config> {
    let lines = Lines(text);
    let raw: RawFile = toml::from_str(text).map_err(|e| Error::Config {
        line: e.span().map_or(1, |s| lines.line(s)),
        message: e.message().trim().to_string(),
    })?;
    match &raw.schema {
        None => return Err(lines.err(0..0, "missing 'schema' key")),
        Some(s) if *s.get_ref() != SCHEMA_VERSION => {
            return Err(lines.err(s.span(), format!("unsupported schema {} (expected {SCHEMA_VERSION})", s.get_ref())))
        }
        Some(_) => {}
    }
    let out_dir = base_dir.join(raw.output_dir.unwrap_or_default());
    let mut names = HashSet::new();
    let mut outputs = HashSet::new();
    let mut experiments = Vec::with_capacity(raw.experiment.len());
    for e in raw.experiment {
        let span = e.span();
        let spec = experiment(&lines, e, &out_dir)?;
        if !names.insert(spec.name.clone()) {
            return Err(lines.err(span, format!("duplicate experiment name '{}'", spec.name)));
        }
        if !outputs.insert(spec.output.clone()) {
            return Err(lines.err(span, format!("output '{}' is written twice", spec.output.display())));
        }
        experiments.push(spec);
    }
    Ok(Config { experiments })
}

pub fn load_config(path: &Path) -> Result<Config> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_else(PathBuf::new);
    parse_config(&text, &base)
}
