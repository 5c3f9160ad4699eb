//! Experiment reports and their CSV form: `# key: value` metadata lines, a
//! header row, then one row per record. Numbers carry 17 significant digits
//! and infinities are written as `inf`.

use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Duration;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Num(f64),
    Text(String),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Num(v) => Some(*v),
            Value::Text(_) => None,
        }
    }

    fn parse(s: &str) -> Value {
        match s {
            "inf" => Value::Num(f64::INFINITY),
            "-inf" => Value::Num(f64::NEG_INFINITY),
            "nan" => Value::Num(f64::NAN),
            _ => match s.parse::<f64>() {
                Ok(v) => Value::Num(v),
                Err(_) => Value::Text(s.to_string()),
            },
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(v) if v.is_nan() => f.write_str("nan"),
            Value::Num(v) if v.is_infinite() => f.write_str(if *v > 0.0 { "inf" } else { "-inf" }),
            Value::Num(v) => write!(f, "{v:.16e}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

/// A table plus metadata. A report with failures is still written, with
/// `# status: FAILED` and one `# failure:` line per violated check.
#[derive(Clone, Debug, Default)]
pub struct ExperimentReport {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub metadata: Vec<(String, String)>,
    pub failures: Vec<String>,
    /// Not serialised, so that reruns produce identical files.
    pub wallclock: Duration,
}

impl PartialEq for ExperimentReport {
    fn eq(&self, other: &Self) -> bool {
        self.columns == other.columns
            && self.metadata == other.metadata
            && self.failures == other.failures
            && self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| {
                a.len() == b.len()
                    && a.iter().zip(b).all(|(x, y)| match (x, y) {
                        (Value::Num(p), Value::Num(q)) => p == q || (p.is_nan() && q.is_nan()),
                        _ => x == y,
                    })
            })
    }
}

impl ExperimentReport {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl fmt::Display) {
        self.metadata.push((key.to_string(), one_line(&value.to_string())));
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn fail(&mut self, message: impl Into<String>) {
        self.failures.push(one_line(&message.into()));
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Numeric entries of column `name`.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }
}

fn one_line(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn to_csv_string(report: &ExperimentReport) -> Result<String> {
    let mut out = String::new();
    for (k, v) in &report.metadata {
        out.push_str(&format!("# {k}: {v}\r\n"));
    }
    out.push_str(&format!("# status: {}\r\n", if report.passed() { "pass" } else { "FAILED" }));
    for f in &report.failures {
        out.push_str(&format!("# failure: {f}\r\n"));
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(&report.columns).map_err(|e| Error::Csv(e.to_string()))?;
    for row in &report.rows {
        w.write_record(row.iter().map(Value::to_string)).map_err(|e| Error::Csv(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Error::Csv(e.to_string()))?;
    out.push_str(&String::from_utf8(body).map_err(|e| Error::Csv(e.to_string()))?);
    Ok(out)
}

/// Write `report` to `path` via a temporary file and a rename, so a crash
/// never leaves a partial file under the final name.
pub fn write_csv(report: &ExperimentReport, path: &Path) -> Result<()> {
    let text = to_csv_string(report)?;
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = Path::new(&tmp);
    fs::write(tmp, text).map_err(|e| io_err(path, e))?;
    fs::rename(tmp, path).map_err(|e| io_err(path, e))
}

pub fn parse_csv(text: &str) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::default();
    let mut body_start = 0;
    for line in text.split_inclusive('\n') {
        let Some(meta) = line.strip_prefix("# ") else {
            break;
        };
        body_start += line.len();
        let meta = meta.trim_end_matches(['\r', '\n']);
        let (k, v) = meta
            .split_once(": ")
            .ok_or_else(|| Error::Csv(format!("malformed metadata line '{meta}'")))?;
        match k {
            "status" => {}
            "failure" => report.failures.push(v.to_string()),
            _ => report.metadata.push((k.to_string(), v.to_string())),
        }
    }
    let mut r = csv::ReaderBuilder::new().from_reader(text[body_start..].as_bytes());
    report.columns = r
        .headers()
        .map_err(|e| Error::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
        report.rows.push(rec.iter().map(Value::parse).collect());
    }
    Ok(report)
}

pub fn read_csv(path: &Path) -> Result<ExperimentReport> {
    parse_csv(&fs::read_to_string(path).map_err(|e| io_err(path, e))?)
}
