//! Experiment runners: convergence sweeps of `‖K_w f - f‖` over `w`, bound
//! ratio tables, kernel certification, and their CSV reports.

mod config;
mod report;
mod runners;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::functions::{corpus, known_labels, lookup, TestFunction};
use crate::kernels::{parse_kernel, ProductKernel};
use crate::norms::{ExponentVector, OrliczVector};
use crate::numerics::QuadratureSpec;
use crate::operators::NodePolicy;

pub use config::{load_config, parse_config, Config, SCHEMA_VERSION};
pub use report::{parse_csv, read_csv, to_csv_string, write_csv, ExperimentReport, Value};
pub use runners::{eventually_decreasing, run};

/// `w = 1, 2, 4, …, 64`.
pub const DEFAULT_W: [f64; 7] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
pub const DEFAULT_SLACK: f64 = 1e-3;
/// Allowed growth between consecutive errors once `w >= MONOTONE_FROM_W`.
pub const MONOTONE_FACTOR: f64 = 1.05;
pub const MONOTONE_FROM_W: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    ConvergenceLebesgue,
    ConvergenceOrliczModular,
    BoundGeneralized,
    BoundKantorovich,
    BoundOrlicz,
    KernelCertify,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::ConvergenceLebesgue,
        ExperimentKind::ConvergenceOrliczModular,
        ExperimentKind::BoundGeneralized,
        ExperimentKind::BoundKantorovich,
        ExperimentKind::BoundOrlicz,
        ExperimentKind::KernelCertify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ConvergenceLebesgue => "convergence_lebesgue",
            ExperimentKind::ConvergenceOrliczModular => "convergence_orlicz_modular",
            ExperimentKind::BoundGeneralized => "bound_generalized",
            ExperimentKind::BoundKantorovich => "bound_kantorovich",
            ExperimentKind::BoundOrlicz => "bound_orlicz",
            ExperimentKind::KernelCertify => "kernel_certify",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "convergence_orlicz" {
            return Ok(ExperimentKind::ConvergenceOrliczModular);
        }
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let known: Vec<&str> = Self::ALL.iter().map(|k| k.name()).collect();
            Error::InvalidArgument(format!("unknown experiment kind '{s}' (known: {})", known.join(", ")))
        })
    }
}

/// One experiment. Fields irrelevant to `kind` are ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub kind: ExperimentKind,
    /// One id, except for certification, which accepts several.
    pub kernels: Vec<String>,
    /// Dimensions to certify each kernel in.
    pub dims: Vec<usize>,
    /// Corpus labels; `corpus:<n>` stands for every member of dimension `n`.
    pub functions: Vec<String>,
    pub exponents: Vec<ExponentVector>,
    pub phis: Vec<OrliczVector>,
    pub w_values: Vec<f64>,
    pub lambda: f64,
    /// Rule for norms of `f` and for cell averages.
    pub quadrature: QuadratureSpec,
    /// Nodes on which operator outputs are integrated.
    pub nodes: NodePolicy,
    pub slack: f64,
    /// Largest admissible final error of a convergence sweep.
    pub threshold: Option<f64>,
    /// Replace the bound constant by `m₀^{1-1/pₙ}` (drop `‖χ‖₁^{1/pₙ}`).
    pub wrong_constant: bool,
    /// Lattice radius override for certification.
    pub radius: Option<usize>,
    pub output: PathBuf,
}

impl ExperimentSpec {
    pub fn new(name: impl Into<String>, kind: ExperimentKind, output: impl Into<PathBuf>) -> Self {
        Self {
            name: name.into(),
            kind,
            kernels: Vec::new(),
            dims: vec![1],
            functions: Vec::new(),
            exponents: Vec::new(),
            phis: Vec::new(),
            w_values: DEFAULT_W.to_vec(),
            lambda: 1.0,
            quadrature: QuadratureSpec::default(),
            nodes: NodePolicy::default(),
            slack: DEFAULT_SLACK,
            threshold: None,
            wrong_constant: false,
            radius: None,
            output: output.into(),
        }
    }

    /// The corpus members named by `functions`, in order.
    pub fn resolve_functions(&self) -> Result<Vec<TestFunction>> {
        let mut out = Vec::new();
        for label in &self.functions {
            match label.strip_prefix("corpus:") {
                Some(n) => {
                    let n: usize = n.trim().parse().map_err(|_| unknown_function(label))?;
                    out.extend(corpus(n)?);
                }
                None => out.push(lookup(label)?),
            }
        }
        Ok(out)
    }

    /// The single kernel of a non-certification experiment, in dimension `n`.
    pub fn product_kernel(&self, n: usize) -> Result<ProductKernel> {
        match self.kernels.as_slice() {
            [id] => parse_kernel(id, n, false)?.into_product(),
            _ => Err(Error::InvalidArgument(format!(
                "experiment '{}' needs exactly one kernel, got {}",
                self.name,
                self.kernels.len()
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Error::InvalidArgument(format!("experiment '{}': {m}", self.name));
        if self.w_values.is_empty() {
            return Err(invalid("w list is empty".into()));
        }
        if self.w_values.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(invalid(format!("w values must be positive, got {:?}", self.w_values)));
        }
        if self.w_values.windows(2).any(|p| p[1] <= p[0]) {
            return Err(invalid(format!("w values must be strictly increasing, got {:?}", self.w_values)));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(invalid(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.slack >= 0.0) {
            return Err(invalid(format!("slack must be nonnegative, got {}", self.slack)));
        }
        if self.kind == ExperimentKind::KernelCertify {
            if self.kernels.is_empty() {
                return Err(invalid("no kernels to certify".into()));
            }
            for id in &self.kernels {
                let mut any = false;
                for &d in &self.dims {
                    match parse_kernel(id, d, false) {
                        Ok(_) => any = true,
                        Err(Error::ArityMismatch { .. }) if id.starts_with("bochner-riesz") => {}
                        Err(e) => return Err(e),
                    }
                }
                if !any {
                    return Err(invalid(format!("kernel '{id}' fits none of the dimensions {:?}", self.dims)));
                }
            }
            return Ok(());
        }
        let fs = self.resolve_functions()?;
        if fs.is_empty() {
            return Err(invalid("no functions".into()));
        }
        let lebesgue = matches!(
            self.kind,
            ExperimentKind::ConvergenceLebesgue | ExperimentKind::BoundGeneralized | ExperimentKind::BoundKantorovich
        );
        let arities: Vec<usize> = if lebesgue {
            self.exponents.iter().map(ExponentVector::len).collect()
        } else {
            self.phis.iter().map(OrliczVector::len).collect()
        };
        // every function needs a vector of its arity and every vector a function
        for f in &fs {
            self.product_kernel(f.arity())?;
            if let Some(&found) = arities.iter().find(|_| !arities.contains(&f.arity())) {
                return Err(Error::ArityMismatch {
                    expected: f.arity(),
                    found,
                });
            }
        }
        if let Some(&found) = arities.iter().find(|&&a| !fs.iter().any(|f| f.arity() == a)) {
            return Err(Error::ArityMismatch {
                expected: fs[0].arity(),
                found,
            });
        }
        match self.kind {
            ExperimentKind::ConvergenceLebesgue if fs.len() != 1 || self.exponents.len() != 1 => {
                Err(invalid("a Lebesgue convergence sweep needs one function and one P".into()))
            }
            ExperimentKind::ConvergenceOrliczModular if fs.len() != 1 || self.phis.len() != 1 => {
                Err(invalid("an Orlicz convergence sweep needs one function and one Phi".into()))
            }
            ExperimentKind::BoundGeneralized | ExperimentKind::BoundKantorovich if self.exponents.is_empty() => {
                Err(invalid("no exponent vectors".into()))
            }
            ExperimentKind::BoundOrlicz if self.phis.is_empty() => Err(invalid("no Orlicz vectors".into())),
            _ => Ok(()),
        }
    }
}

fn unknown_function(label: &str) -> Error {
    Error::UnknownFunction {
        label: label.to_string(),
        known: format!("{}, corpus:<n>", known_labels().join(", ")),
    }
}
