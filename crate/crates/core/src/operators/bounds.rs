//! Operator-norm and modular bounds, the sample seminorm, and the tail
//! constant `L(ε, c)` beyond which translated kernels carry less than `ε`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::functions::TestFunction;
use crate::kernels::{absolute_moment, univariate_l1_norm, Kernel, ProductKernel, TruncationPolicy, UnivariateKernel, DEFAULT_PROBES};
use crate::norms::{
    luxemburg_norm_of_samples, mixed_lebesgue_norm, mixed_modular_of_samples, mixed_norm_of_samples, weighted_sequence_norm,
    ExponentVector, ExtendedReal, LatticeArray, OrliczVector, Samples,
};
use crate::numerics::{integrate_1d, Interval, QuadratureSpec};

use super::grid::{operator_samples, NodePolicy};
use super::{lattice_window, AverageCache, OperatorConfig, Which};

/// `m₀(χ)` and `‖χ‖₁` of a tensor kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelConstants {
    pub m0: f64,
    pub l1: f64,
    pub dim: usize,
}

impl KernelConstants {
    /// `m₀^{1 - 1/p} ‖χ‖₁^{1/p}`, the constant of both Lebesgue bounds.
    pub fn lebesgue(&self, p_last: f64) -> f64 {
        self.m0.powf(1.0 - 1.0 / p_last) * self.l1.powf(1.0 / p_last)
    }

    /// `m₀^n`.
    pub fn m0_pow_n(&self) -> f64 {
        self.m0.powi(self.dim as i32)
    }

    /// `‖χ‖₁ / m₀^n`.
    pub fn modular_factor(&self) -> f64 {
        self.l1 / self.m0_pow_n()
    }
}

fn factor_constants(k: &UnivariateKernel) -> Result<(f64, f64)> {
    static CACHE: OnceLock<Mutex<HashMap<String, (f64, f64)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let id = k.id();
    if let Some(&v) = cache.lock().expect("constants lock").get(&id) {
        return Ok(v);
    }
    let single: Kernel = ProductKernel::new(vec![k.clone()])?.into();
    let m0 = absolute_moment(&single, 0.0, &TruncationPolicy::certifying(&single), DEFAULT_PROBES)?;
    let l1 = univariate_l1_norm(k, &TruncationPolicy::default())?;
    cache.lock().expect("constants lock").insert(id, (m0, l1));
    Ok((m0, l1))
}

/// Both constants factorise over the axes of a product kernel. `m₀` is taken
/// at the certification radius, where its lattice tail is below 1e-6.
pub fn kernel_constants(k: &ProductKernel) -> Result<KernelConstants> {
    let mut m0 = 1.0;
    let mut l1 = 1.0;
    for f in k.factors() {
        let (a, b) = factor_constants(f)?;
        m0 *= a;
        l1 *= b;
    }
    Ok(KernelConstants { m0, l1, dim: k.dim() })
}

/// One evaluated inequality `lhs <= rhs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// The right-hand side is 0 or infinite, so the inequality says nothing.
    pub vacuous: bool,
    /// Both sides vanish (`f ≡ 0`); the ratio is reported as 0.
    pub degenerate: bool,
}

impl BoundCheck {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let degenerate = lhs == 0.0 && rhs == 0.0;
        let vacuous = !degenerate && (rhs == 0.0 || rhs.is_infinite());
        let ratio = if degenerate { 0.0 } else { lhs / rhs };
        Self {
            lhs,
            rhs,
            ratio,
            vacuous,
            degenerate,
        }
    }

    pub fn passes(&self, slack: f64) -> bool {
        self.vacuous || self.degenerate || self.ratio <= 1.0 + slack
    }
}

/// `‖f(k/w)‖_{ℓ^P̄_w}` over the lattice points in the support of `f`.
pub fn sample_seminorm(f: &TestFunction, w: f64, p: &ExponentVector) -> Result<f64> {
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::InvalidArgument(format!("sampling rate w must be positive, got {w}")));
    }
    let (origin, shape) = lattice_window(w, f, Which::Generalized);
    let a = LatticeArray::from_fn(origin, shape, |k| {
        let x: Vec<f64> = k.iter().map(|&ki| ki as f64 / w).collect();
        Ok(f.eval(&x))
    })?;
    weighted_sequence_norm(&a, p, w)
}

/// `‖K_w f‖_P̄` against `m₀^{1-1/pₙ}‖χ‖₁^{1/pₙ}‖f‖_P̄`.
pub fn kantorovich_bound_check(
    cfg: &OperatorConfig,
    consts: &KernelConstants,
    f: &TestFunction,
    p: &ExponentVector,
    policy: &NodePolicy,
    q: &QuadratureSpec,
) -> Result<BoundCheck> {
    let s = operator_samples(cfg, f, Which::Kantorovich, policy, None)?;
    let lhs = mixed_norm_of_samples(&s.output, p)?;
    let rhs = consts.lebesgue(p.last()) * mixed_lebesgue_norm(f, p, q)?;
    Ok(BoundCheck::new(lhs, rhs))
}

/// `‖S_w f‖_P̄` against `m₀^{1-1/pₙ}‖χ‖₁^{1/pₙ}‖f(k/w)‖_{ℓ^P̄_w}`.
pub fn generalized_bound_check(
    cfg: &OperatorConfig,
    consts: &KernelConstants,
    f: &TestFunction,
    p: &ExponentVector,
    policy: &NodePolicy,
) -> Result<BoundCheck> {
    let s = operator_samples(cfg, f, Which::Generalized, policy, None)?;
    let lhs = mixed_norm_of_samples(&s.output, p)?;
    let rhs = consts.lebesgue(p.last()) * sample_seminorm(f, cfg.w, p)?;
    Ok(BoundCheck::new(lhs, rhs))
}

/// `I^Φ̄(λ K_w f)` against `(‖χ‖₁/m₀^n)·I^Φ̄(λ m₀^n f)`.
#[allow(clippy::too_many_arguments)]
pub fn modular_inequality_check(
    phi: &OrliczVector,
    cfg: &OperatorConfig,
    consts: &KernelConstants,
    f: &TestFunction,
    lambda: f64,
    policy: &NodePolicy,
    q: &QuadratureSpec,
    cache: Option<&AverageCache>,
) -> Result<BoundCheck> {
    let s = operator_samples(cfg, f, Which::Kantorovich, policy, cache)?;
    let rhs_modular = mixed_modular_of_samples(phi, &Samples::from_function(f, q).scaled(lambda * consts.m0_pow_n()))?;
    let ExtendedReal::Finite(rhs_modular) = rhs_modular else {
        return Err(Error::VacuousBound);
    };
    let lhs = mixed_modular_of_samples(phi, &s.output.scaled(lambda))?.to_f64();
    Ok(BoundCheck::new(lhs, consts.modular_factor() * rhs_modular))
}

/// `‖K_w f‖_Φ̄` against `m₀^n ‖f‖_Φ̄`.
pub fn orlicz_norm_bound_check(
    phi: &OrliczVector,
    cfg: &OperatorConfig,
    consts: &KernelConstants,
    f: &TestFunction,
    policy: &NodePolicy,
    q: &QuadratureSpec,
    tol: f64,
) -> Result<BoundCheck> {
    let s = operator_samples(cfg, f, Which::Kantorovich, policy, None)?;
    let norm_f = luxemburg_norm_of_samples(phi, &Samples::from_function(f, q), tol)?.to_f64();
    let lhs = luxemburg_norm_of_samples(phi, &s.output, tol)?.to_f64();
    Ok(BoundCheck::new(lhs, consts.m0_pow_n() * norm_f))
}

fn abs_integral(k: &UnivariateKernel, a: f64, b: f64) -> Result<f64> {
    let iv = Interval::new(a, b)?;
    let part = match k.support() {
        Some(s) => match s.intersect(&iv) {
            Some(p) => p,
            None => return Ok(0.0),
        },
        None => iv,
    };
    integrate_1d(|x| k.eval(x).abs(), &part, &QuadratureSpec::default())
}

fn factor_masses(k: &ProductKernel) -> Result<Vec<f64>> {
    k.factors().iter().map(|f| univariate_l1_norm(f, &TruncationPolicy::default())).collect()
}

/// `∫_{‖x‖∞ > L} w^n |χ(wx - k)| dx`, i.e. the mass of `|χ|` outside the box
/// `∏ [-wL - k_i, wL - k_i]`.
pub fn tail_integral(kernel: &ProductKernel, k: &[i64], w: f64, l: f64) -> Result<f64> {
    if k.len() != kernel.dim() {
        return Err(Error::ArityMismatch {
            expected: kernel.dim(),
            found: k.len(),
        });
    }
    let total: f64 = factor_masses(kernel)?.iter().product();
    let mut inside = 1.0;
    for (f, &ki) in kernel.factors().iter().zip(k) {
        inside *= abs_integral(f, -w * l - ki as f64, w * l - ki as f64)?;
    }
    Ok((total - inside).max(0.0))
}

const MAX_TAIL_RADIUS: f64 = (1u64 << 30) as f64;

/// `L = c + R` where `R` is the first power of two with
/// `∫_{‖u‖∞ > R} |χ| < ε`. Then for every `w >= 1` and `‖k‖∞ <= wc` the box
/// `‖wx - k‖∞ <= wR` lies inside `‖x‖∞ <= L`, so the tail at `L` is below `ε`.
pub fn tail_constant(kernel: &ProductKernel, c: f64, eps: f64) -> Result<f64> {
    if !(c >= 0.0 && eps > 0.0) {
        return Err(Error::InvalidArgument(format!("tail constant needs c >= 0 and eps > 0, got {c}, {eps}")));
    }
    let masses = factor_masses(kernel)?;
    let total: f64 = masses.iter().product();
    let mut r = 1.0;
    loop {
        let mut inside = 1.0;
        for f in kernel.factors() {
            inside *= abs_integral(f, -r, r)?;
        }
        let tail = (total - inside).max(0.0);
        if tail < eps {
            return Ok(c + r);
        }
        if r >= MAX_TAIL_RADIUS {
            return Err(Error::InsufficientTruncation {
                radius: r as usize,
                tail,
                tolerance: eps,
            });
        }
        r *= 2.0;
    }
}
