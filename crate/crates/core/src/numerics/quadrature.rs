//! Composite quadrature on intervals and tensor grids.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// A finite, non-degenerate interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "interval requires finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Symmetric interval `[-r, r]`.
    pub fn symmetric(r: f64) -> Result<Self> {
        Self::new(-r, r)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Whether the two intervals overlap on a set of positive length.
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }

    /// Interval grown by `by` on both sides.
    pub fn inflate(&self, by: f64) -> Self {
        Self {
            lo: self.lo - by,
            hi: self.hi + by,
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(Interval { lo, hi })
    }
}

/// The per-cell rule of a composite quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Midpoint,
    Simpson,
    GaussLegendre(usize),
}

/// Composite rule plus resolution, in cells per unit length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadratureSpec {
    rule: Rule,
    cells_per_unit: usize,
}

pub const MAX_GAUSS_ORDER: usize = 16;

impl Default for QuadratureSpec {
    /// Gauss–Legendre of order 5 on 8 cells per unit length.
    fn default() -> Self {
        Self {
            rule: Rule::GaussLegendre(5),
            cells_per_unit: 8,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rule: Rule, cells_per_unit: usize) -> Result<Self> {
        if cells_per_unit == 0 {
            return Err(Error::InvalidArgument(
                "cells_per_unit must be at least 1".into(),
            ));
        }
        if let Rule::GaussLegendre(order) = rule {
            if !(2..=MAX_GAUSS_ORDER).contains(&order) {
                return Err(Error::InvalidArgument(format!(
                    "Gauss-Legendre order {order} outside [2, {MAX_GAUSS_ORDER}]"
                )));
            }
        }
        Ok(Self {
            rule,
            cells_per_unit,
        })
    }

    pub fn midpoint(cells_per_unit: usize) -> Result<Self> {
        Self::new(Rule::Midpoint, cells_per_unit)
    }

    pub fn simpson(cells_per_unit: usize) -> Result<Self> {
        Self::new(Rule::Simpson, cells_per_unit)
    }

    pub fn gauss_legendre(order: usize, cells_per_unit: usize) -> Result<Self> {
        Self::new(Rule::GaussLegendre(order), cells_per_unit)
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    pub fn cells_per_unit(&self) -> usize {
        self.cells_per_unit
    }

    /// Same rule at a different resolution.
    pub fn with_cells_per_unit(&self, cells_per_unit: usize) -> Self {
        Self {
            rule: self.rule,
            cells_per_unit: cells_per_unit.max(1),
        }
    }

    /// Number of composite cells used on `iv`.
    pub fn cell_count(&self, iv: &Interval) -> usize {
        // the small offset keeps e.g. 8.000000000001 from rounding up to 9
        let raw = iv.length() * self.cells_per_unit as f64 - 1e-9;
        (raw.ceil() as usize).max(1)
    }

    /// Nodes and weights of the composite rule on `iv`, in increasing node
    /// order. Simpson cells share their end nodes.
    pub fn nodes(&self, iv: &Interval) -> (Vec<f64>, Vec<f64>) {
        let cells = self.cell_count(iv);
        let h = iv.length() / cells as f64;
        let cell_lo = |c: usize| iv.lo + h * c as f64;
        match self.rule {
            Rule::Midpoint => {
                let nodes = (0..cells).map(|c| cell_lo(c) + 0.5 * h).collect();
                (nodes, vec![h; cells])
            }
            Rule::Simpson => {
                let mut nodes = Vec::with_capacity(2 * cells + 1);
                let mut weights = Vec::with_capacity(2 * cells + 1);
                nodes.push(iv.lo);
                weights.push(h / 6.0);
                for c in 0..cells {
                    nodes.push(cell_lo(c) + 0.5 * h);
                    weights.push(4.0 * h / 6.0);
                    if c + 1 == cells {
                        nodes.push(iv.hi);
                        weights.push(h / 6.0);
                    } else {
                        nodes.push(cell_lo(c + 1));
                        weights.push(2.0 * h / 6.0);
                    }
                }
                (nodes, weights)
            }
            Rule::GaussLegendre(order) => {
                let (ref_nodes, ref_weights) = gauss_legendre_reference(order);
                let mut nodes = Vec::with_capacity(cells * order);
                let mut weights = Vec::with_capacity(cells * order);
                for c in 0..cells {
                    let mid = cell_lo(c) + 0.5 * h;
                    for (t, wt) in ref_nodes.iter().zip(ref_weights) {
                        nodes.push(mid + 0.5 * h * t);
                        weights.push(0.5 * h * wt);
                    }
                }
                (nodes, weights)
            }
        }
    }
}

/// Composite-rule approximation of the integral of `f` over `iv`.
pub fn integrate_1d<F>(f: F, iv: &Interval, q: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (nodes, weights) = q.nodes(iv);
    let mut acc = 0.0;
    for (&x, &wt) in nodes.iter().zip(&weights) {
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::NonFiniteIntegrand { node: x });
        }
        acc += wt * y;
    }
    Ok(acc)
}

/// Tensor-product quadrature of `f` over the box `ivs[0] × … × ivs[n-1]`.
pub fn integrate_box<F>(f: F, ivs: &[Interval], q: &QuadratureSpec) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let axes: Vec<(Vec<f64>, Vec<f64>)> = ivs.iter().map(|iv| q.nodes(iv)).collect();
    let mut point = vec![0.0; ivs.len()];
    let mut idx = vec![0usize; ivs.len()];
    let mut acc = 0.0;
    if axes.iter().any(|(n, _)| n.is_empty()) {
        return Ok(0.0);
    }
    loop {
        let mut wt = 1.0;
        for (axis, &i) in idx.iter().enumerate() {
            point[axis] = axes[axis].0[i];
            wt *= axes[axis].1[i];
        }
        let y = f(&point);
        if !y.is_finite() {
            return Err(Error::NonFiniteIntegrand { node: point[0] });
        }
        acc += wt * y;
        // odometer increment, axis 0 fastest
        let mut axis = 0;
        loop {
            if axis == idx.len() {
                return Ok(acc);
            }
            idx[axis] += 1;
            if idx[axis] < axes[axis].0.len() {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` for `2 <= order <= 16`.
pub fn gauss_legendre_reference(order: usize) -> (&'static [f64], &'static [f64]) {
    static TABLE: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    let table = TABLE.get_or_init(|| (0..=MAX_GAUSS_ORDER).map(legendre_roots).collect());
    let (n, w) = &table[order];
    (n, w)
}

fn legendre_roots(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n < 2 {
        return (Vec::new(), Vec::new());
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let step = p / d;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn constant_simpson_four_cells() {
        let q = QuadratureSpec::simpson(4).unwrap();
        let v = integrate_1d(|_| 1.0, &unit(), &q).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauss3_integrates_quadratic_exactly() {
        let q = QuadratureSpec::gauss_legendre(3, 1).unwrap();
        let v = integrate_1d(|x| x * x, &unit(), &q).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        // degree 5 is the exactness limit of a 3-point rule
        let v5 = integrate_1d(|x| x.powi(5), &unit(), &q).unwrap();
        assert!((v5 - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_weights_sum_to_two() {
        for order in 2..=MAX_GAUSS_ORDER {
            let (n, w) = gauss_legendre_reference(order);
            assert_eq!(n.len(), order);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "order {order}: {s}");
            // exact for x^(2 order - 2)
            let m: f64 = n.iter().zip(w).map(|(x, w)| w * x.powi(2 * order as i32 - 2)).sum();
            assert!((m - 2.0 / (2 * order - 1) as f64).abs() < 1e-13);
        }
    }

    #[test]
    fn sinc_squared_integral_approaches_two_pi() {
        use crate::numerics::sinc;
        // ∫ sinc²(x/2π) dx = 2π, truncation error ~ 2/(π² R)·π ... shrinks like 1/R
        let q = QuadratureSpec::default();
        let mut prev_err = f64::INFINITY;
        for r in [50.0, 200.0, 800.0] {
            let iv = Interval::symmetric(r).unwrap();
            let v = integrate_1d(|x| sinc(x / (2.0 * std::f64::consts::PI)).powi(2), &iv, &q)
                .unwrap();
            let err = (v - 2.0 * std::f64::consts::PI).abs();
            assert!(err < prev_err);
            // tail of 4π²/(π² x²)·sin² ≈ 4/R on both sides
            assert!(err < 4.5 / r, "R={r}: err {err}");
            prev_err = err;
        }
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let q = QuadratureSpec::midpoint(2).unwrap();
        let err = integrate_1d(|x| if x > 0.5 { f64::NAN } else { 0.0 }, &unit(), &q).unwrap_err();
        match err {
            Error::NonFiniteIntegrand { node } => assert!((node - 0.75).abs() < 1e-15),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn refinement_reduces_error_until_exact() {
        let exact = 1.0 / 5.0;
        let mut prev = f64::INFINITY;
        for cells in [1, 2, 4, 8, 16] {
            let q = QuadratureSpec::simpson(cells).unwrap();
            let err = (integrate_1d(|x| x.powi(4), &unit(), &q).unwrap() - exact).abs();
            assert!(err < prev);
            prev = err;
        }
        let q = QuadratureSpec::midpoint(1).unwrap();
        let q2 = q.with_cells_per_unit(2);
        let e1 = (integrate_1d(|x| x * x, &unit(), &q).unwrap() - 1.0 / 3.0).abs();
        let e2 = (integrate_1d(|x| x * x, &unit(), &q2).unwrap() - 1.0 / 3.0).abs();
        assert!((e1 / e2 - 4.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(QuadratureSpec::gauss_legendre(1, 4).is_err());
        assert!(QuadratureSpec::gauss_legendre(17, 4).is_err());
        assert!(QuadratureSpec::midpoint(0).is_err());
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn box_integral_of_separable_polynomial() {
        let ivs = [unit(), Interval::new(-1.0, 2.0).unwrap()];
        let v = integrate_box(|p| p[0] * p[1] * p[1], &ivs, &QuadratureSpec::default()).unwrap();
        // (1/2)·((8 + 1)/3)
        assert!((v - 1.5).abs() < 1e-13);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn integration_is_linear(a in -5.0f64..5.0, b in -5.0f64..5.0, s in 0.1f64..3.0) {
                let iv = Interval::new(-1.0, 2.0).unwrap();
                let q = QuadratureSpec::default();
                let f = |x: f64| (s * x).sin();
                let g = |x: f64| (-x * x).exp();
                let i_f = integrate_1d(f, &iv, &q).unwrap();
                let i_g = integrate_1d(g, &iv, &q).unwrap();
                let i_c = integrate_1d(|x| a * f(x) + b * g(x), &iv, &q).unwrap();
                let bound = 1e-12 * (a.abs() * i_f.abs() + b.abs() * i_g.abs())
                    + 1e-14 * (a.abs() + b.abs());
                prop_assert!((i_c - a * i_f - b * i_g).abs() <= bound);
            }
        }
    }
}
