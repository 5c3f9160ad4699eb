//! Generalized sampling `S_w f(x) = Σ f(k/w) χ(wx - k)` and Kantorovich
//! `K_w f(x) = Σ χ(wx - k) w^n ∫_{I_k} f` operators for tensor-product kernels.
//!
//! Both are `Σ_k c_k χ(wx - k)` for a finite coefficient window (the corpus
//! functions have compact support), so pointwise and grid evaluation share
//! the coefficient code and differ only in how the kernel sum is contracted.

mod bounds;
mod grid;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::functions::{average_spec, cell_average, TestFunction};
use crate::kernels::{ProductKernel, TruncationPolicy, UnivariateKernel};
use crate::norms::LatticeArray;
use crate::numerics::QuadratureSpec;

pub use bounds::{
    generalized_bound_check, kantorovich_bound_check, kernel_constants, modular_inequality_check,
    orlicz_norm_bound_check, sample_seminorm, tail_constant, tail_integral, BoundCheck, KernelConstants,
};
pub use grid::{apply_on_grid, apply_on_nodes, axis_nodes, operator_samples, NodePolicy, OperatorSamples};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Which {
    Generalized,
    Kantorovich,
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Which::Generalized => "generalized",
            Which::Kantorovich => "kantorovich",
        })
    }
}

impl FromStr for Which {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "generalized" | "S" => Ok(Which::Generalized),
            "kantorovich" | "K" => Ok(Which::Kantorovich),
            other => Err(Error::InvalidArgument(format!(
                "unknown operator '{other}', expected generalized or kantorovich"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorConfig {
    pub kernel: ProductKernel,
    pub w: f64,
    pub trunc: TruncationPolicy,
    pub average_quadrature: QuadratureSpec,
}

impl OperatorConfig {
    pub fn new(kernel: ProductKernel, w: f64) -> Result<Self> {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidArgument(format!("sampling rate w must be positive, got {w}")));
        }
        Ok(Self {
            kernel,
            w,
            trunc: TruncationPolicy::default(),
            average_quadrature: QuadratureSpec::default(),
        })
    }

    pub fn with_truncation(mut self, trunc: TruncationPolicy) -> Self {
        self.trunc = trunc;
        self
    }

    pub fn with_average_quadrature(mut self, q: QuadratureSpec) -> Self {
        self.average_quadrature = q;
        self
    }

    pub fn with_rate(&self, w: f64) -> Result<Self> {
        Ok(Self {
            w,
            ..Self::new(self.kernel.clone(), w)?
        }
        .with_truncation(self.trunc)
        .with_average_quadrature(self.average_quadrature))
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    fn check_arity(&self, f: &TestFunction) -> Result<()> {
        if f.arity() == self.dim() {
            Ok(())
        } else {
            Err(Error::ArityMismatch {
                expected: self.dim(),
                found: f.arity(),
            })
        }
    }
}

/// Range of `u = wx - k` over which a kernel factor is summed.
#[derive(Clone, Copy, Debug)]
pub(crate) struct KernelWindow {
    lo: f64,
    hi: f64,
}

impl KernelWindow {
    pub(crate) fn of(k: &UnivariateKernel, trunc: &TruncationPolicy) -> Self {
        match k.support() {
            Some(iv) => Self { lo: iv.lo(), hi: iv.hi() },
            None => {
                let r = trunc.effective_radius(k);
                Self { lo: -r, hi: r }
            }
        }
    }

    /// Lattice indices `k` with `wx - k` inside the window.
    pub(crate) fn indices(&self, wx: f64) -> (i64, i64) {
        ((wx - self.hi).ceil() as i64, (wx - self.lo).floor() as i64)
    }

    pub(crate) fn lo(&self) -> f64 {
        self.lo
    }

    pub(crate) fn hi(&self) -> f64 {
        self.hi
    }
}

/// Lattice indices, per axis, whose coefficient can be nonzero.
pub fn coefficient_window(cfg: &OperatorConfig, f: &TestFunction, which: Which) -> (Vec<i64>, Vec<usize>) {
    lattice_window(cfg.w, f, which)
}

pub(crate) fn lattice_window(w: f64, f: &TestFunction, which: Which) -> (Vec<i64>, Vec<usize>) {
    f.support()
        .axes()
        .iter()
        .map(|iv| {
            // one extra index on each side absorbs rounding in w·lo, w·hi
            let (lo, hi) = match which {
                Which::Generalized => ((w * iv.lo()).ceil() as i64 - 1, (w * iv.hi()).floor() as i64 + 1),
                Which::Kantorovich => ((w * iv.lo()).floor() as i64 - 1, (w * iv.hi()).ceil() as i64),
            };
            (lo, (hi - lo + 1) as usize)
        })
        .unzip()
}

/// Cell averages shared between calls, keyed by function label, lattice
/// point, rate and quadrature. Labels must identify functions uniquely.
#[derive(Debug, Default)]
pub struct AverageCache {
    map: RwLock<HashMap<CacheKey, f64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct CacheKey {
    label: String,
    k: Vec<i64>,
    w_bits: u64,
    q: QuadratureSpec,
}

impl AverageCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.map.write().expect("cache lock").clear();
    }

    fn get_or_compute(&self, f: &TestFunction, k: &[i64], w: f64, q: &QuadratureSpec) -> Result<f64> {
        let key = CacheKey {
            label: f.label().to_string(),
            k: k.to_vec(),
            w_bits: w.to_bits(),
            q: *q,
        };
        if let Some(&v) = self.map.read().expect("cache lock").get(&key) {
            return Ok(v);
        }
        let v = cell_average(f, k, w, q)?;
        // concurrent writers store the same deterministic value
        self.map.write().expect("cache lock").insert(key, v);
        Ok(v)
    }
}

fn coefficient(
    cfg: &OperatorConfig,
    f: &TestFunction,
    which: Which,
    k: &[i64],
    q: &QuadratureSpec,
    cache: Option<&AverageCache>,
) -> Result<f64> {
    match which {
        Which::Generalized => {
            let x: Vec<f64> = k.iter().map(|&ki| ki as f64 / cfg.w).collect();
            Ok(f.eval(&x))
        }
        Which::Kantorovich => match cache {
            Some(c) => c.get_or_compute(f, k, cfg.w, q),
            None => cell_average(f, k, cfg.w, q),
        },
    }
}

/// Samples `f(k/w)` or cell averages over the coefficient window.
pub fn coefficients(cfg: &OperatorConfig, f: &TestFunction, which: Which, cache: Option<&AverageCache>) -> Result<LatticeArray> {
    cfg.check_arity(f)?;
    let (origin, shape) = coefficient_window(cfg, f, which);
    let q = average_spec(f, cfg.w, &cfg.average_quadrature);
    LatticeArray::from_fn(origin, shape, |k| coefficient(cfg, f, which, k, &q, cache))
}

fn apply_pointwise(cfg: &OperatorConfig, f: &TestFunction, x: &[f64], which: Which, cache: Option<&AverageCache>) -> Result<f64> {
    cfg.check_arity(f)?;
    if x.len() != cfg.dim() {
        return Err(Error::ArityMismatch {
            expected: cfg.dim(),
            found: x.len(),
        });
    }
    let (origin, shape) = coefficient_window(cfg, f, which);
    let q = average_spec(f, cfg.w, &cfg.average_quadrature);
    // per axis: the admissible k and the kernel factor at wx - k
    let mut ranges = Vec::with_capacity(x.len());
    for (i, factor) in cfg.kernel.factors().iter().enumerate() {
        let wx = cfg.w * x[i];
        let (klo, khi) = KernelWindow::of(factor, &cfg.trunc).indices(wx);
        let lo = klo.max(origin[i]);
        let hi = khi.min(origin[i] + shape[i] as i64 - 1);
        if lo > hi {
            return Ok(0.0);
        }
        let values: Vec<f64> = (lo..=hi).map(|k| factor.eval(wx - k as f64)).collect();
        ranges.push((lo, values));
    }
    let mut idx = vec![0usize; ranges.len()];
    let mut k = vec![0i64; ranges.len()];
    let mut acc = 0.0;
    'outer: loop {
        let mut weight = 1.0;
        for (a, (lo, values)) in ranges.iter().enumerate() {
            weight *= values[idx[a]];
            k[a] = lo + idx[a] as i64;
        }
        if weight != 0.0 {
            let c = coefficient(cfg, f, which, &k, &q, cache)?;
            acc += c * weight;
        }
        for (a, (_, values)) in ranges.iter().enumerate() {
            idx[a] += 1;
            if idx[a] < values.len() {
                continue 'outer;
            }
            idx[a] = 0;
        }
        break;
    }
    Ok(acc)
}

/// `S_w f(x)`, summed over `k` with `wx - k` in the kernel window.
pub fn generalized_apply(cfg: &OperatorConfig, f: &TestFunction, x: &[f64]) -> Result<f64> {
    apply_pointwise(cfg, f, x, Which::Generalized, None)
}

/// `K_w f(x)`, summed over `k` with `wx - k` in the kernel window.
pub fn kantorovich_apply(cfg: &OperatorConfig, f: &TestFunction, x: &[f64]) -> Result<f64> {
    apply_pointwise(cfg, f, x, Which::Kantorovich, None)
}

/// Pointwise evaluation reusing (and filling) `cache`.
pub fn apply_cached(cfg: &OperatorConfig, f: &TestFunction, x: &[f64], which: Which, cache: &AverageCache) -> Result<f64> {
    apply_pointwise(cfg, f, x, which, Some(cache))
}
