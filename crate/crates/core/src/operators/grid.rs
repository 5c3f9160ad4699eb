//! Batch evaluation on tensor node sets. The kernel sum separates into one
//! banded matrix per axis, so `Σ_k c_k ∏ χ_i(w x_i - k_i)` on a tensor grid
//! is a sequence of mode products with the coefficient array.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functions::{BoxDomain, TestFunction};
use crate::norms::{eval_tensor, GridFunction, LatticeArray, Samples};
use crate::numerics::{gauss_legendre_reference, Interval};

use super::{coefficient_window, coefficients, AverageCache, KernelWindow, OperatorConfig, Which};

/// Nonzero band of each row of `M[x, k] = χ(wx - k)`.
struct AxisMatrix {
    /// `(first column, values)` per row.
    rows: Vec<(usize, Vec<f64>)>,
}

impl AxisMatrix {
    fn new(cfg: &OperatorConfig, axis: usize, nodes: &[f64], origin: i64, len: usize) -> Self {
        let factor = &cfg.kernel.factors()[axis];
        let window = KernelWindow::of(factor, &cfg.trunc);
        let last = origin + len as i64 - 1;
        let rows = nodes
            .iter()
            .map(|&x| {
                let wx = cfg.w * x;
                let (klo, khi) = window.indices(wx);
                let lo = klo.max(origin);
                let hi = khi.min(last);
                if lo > hi {
                    return (0, Vec::new());
                }
                let values = (lo..=hi).map(|k| factor.eval(wx - k as f64)).collect();
                ((lo - origin) as usize, values)
            })
            .collect();
        Self { rows }
    }
}

/// Replace axis `axis` (length `shape[axis]`) of `t` by the rows of `m`.
fn mode_product(t: &[f64], shape: &[usize], axis: usize, m: &AxisMatrix) -> Vec<f64> {
    let inner: usize = shape[..axis].iter().product();
    let k = shape[axis];
    let n = m.rows.len();
    let mut out = vec![0.0; t.len() / k * n];
    out.par_chunks_mut(inner).enumerate().for_each(|(block, dst)| {
        let (o, r) = (block / n, block % n);
        let src = &t[o * inner * k..(o + 1) * inner * k];
        let (start, values) = &m.rows[r];
        for (j, &v) in values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let col = &src[(start + j) * inner..(start + j + 1) * inner];
            for (d, &s) in dst.iter_mut().zip(col) {
                *d += v * s;
            }
        }
    });
    out
}

/// `Σ_k a_k χ(wx - k)` on the tensor product of `axes`, axis 0 fastest.
pub fn apply_on_nodes(cfg: &OperatorConfig, a: &LatticeArray, axes: &[Vec<f64>]) -> Result<Vec<f64>> {
    if a.dim() != cfg.dim() || axes.len() != cfg.dim() {
        return Err(Error::ArityMismatch {
            expected: cfg.dim(),
            found: axes.len(),
        });
    }
    let mut shape = a.shape().to_vec();
    let mut t = a.values().to_vec();
    for (axis, nodes) in axes.iter().enumerate() {
        let m = AxisMatrix::new(cfg, axis, nodes, a.origin()[axis], a.shape()[axis]);
        t = mode_product(&t, &shape, axis, &m);
        shape[axis] = nodes.len();
    }
    Ok(t)
}

/// Operator values on the uniform grid of `pts_per_axis` points per axis
/// over `out_box`; coefficients are computed once and reused for every point.
pub fn apply_on_grid(
    cfg: &OperatorConfig,
    f: &TestFunction,
    out_box: &BoxDomain,
    pts_per_axis: usize,
    which: Which,
    cache: Option<&AverageCache>,
) -> Result<GridFunction> {
    if out_box.dim() != cfg.dim() {
        return Err(Error::ArityMismatch {
            expected: cfg.dim(),
            found: out_box.dim(),
        });
    }
    if pts_per_axis < 2 {
        return Err(Error::InvalidArgument("grid needs at least 2 points per axis".into()));
    }
    let a = coefficients(cfg, f, which, cache)?;
    let axes: Vec<Vec<f64>> = (0..cfg.dim()).map(|i| GridFunction::axis_points(out_box, pts_per_axis, i)).collect();
    GridFunction::new(out_box.clone(), pts_per_axis, apply_on_nodes(cfg, &a, &axes)?)
}

/// Composite Gauss–Legendre node sets on which operator outputs are
/// integrated. Panels are aligned to multiples of their width so that the
/// lattice breakpoints `k/w` (and half-lattice ones) fall on panel edges.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodePolicy {
    /// Panels per lattice cell `1/w` near the support of `f`.
    pub panels_per_cell: usize,
    /// Upper bound on the panel width near the support.
    pub max_panel: f64,
    /// Gauss–Legendre order per panel.
    pub order: usize,
    /// Cap, in lattice units, on how far past the coefficient window the
    /// output region extends for non-compact kernels.
    pub footprint_cap: f64,
}

impl Default for NodePolicy {
    fn default() -> Self {
        Self {
            panels_per_cell: 2,
            max_panel: 0.125,
            order: 5,
            footprint_cap: f64::INFINITY,
        }
    }
}

impl NodePolicy {
    /// Coarser nodes and a footprint of 8 lattice units, for `n = 3`.
    pub fn reduced() -> Self {
        Self {
            panels_per_cell: 1,
            max_panel: 0.25,
            order: 5,
            footprint_cap: 8.0,
        }
    }
}

/// Panel edges: multiples of `h` inside `[a, b]`, plus both ends.
fn aligned_edges(a: f64, b: f64, h: f64, edges: &mut Vec<f64>) {
    edges.push(a);
    let first = (a / h).ceil() as i64;
    let last = (b / h).floor() as i64;
    for j in first..=last {
        edges.push(j as f64 * h);
    }
    edges.push(b);
}

/// Nodes and weights along `axis` covering the support of `f` and of the
/// operator output.
pub fn axis_nodes(cfg: &OperatorConfig, f: &TestFunction, which: Which, axis: usize, policy: &NodePolicy) -> Result<(Vec<f64>, Vec<f64>)> {
    let w = cfg.w;
    let supp = f.support().axes()[axis];
    let (origin, shape) = coefficient_window(cfg, f, which);
    let (kmin, kmax) = (origin[axis] as f64, (origin[axis] + shape[axis] as i64 - 1) as f64);
    let factor = &cfg.kernel.factors()[axis];
    let window = KernelWindow::of(factor, &cfg.trunc);
    let compact = factor.support().is_some();
    let (lo_ext, hi_ext) = if compact {
        (window.lo(), window.hi())
    } else {
        (window.lo().max(-policy.footprint_cap), window.hi().min(policy.footprint_cap))
    };
    let region = Interval::new(((kmin + lo_ext) / w).min(supp.lo()), ((kmax + hi_ext) / w).max(supp.hi()))?;
    let h = (1.0 / (policy.panels_per_cell as f64 * w)).min(policy.max_panel);
    let mut edges = Vec::new();
    if compact {
        aligned_edges(region.lo(), region.hi(), h, &mut edges);
    } else {
        // fine panels near the support, lattice-cell panels in the tails
        let core = Interval::new((supp.lo() - 2.0 / w).max(region.lo()), (supp.hi() + 2.0 / w).min(region.hi()))?;
        let h_tail = (1.0 / w).min(1.0);
        aligned_edges(region.lo(), core.lo(), h_tail, &mut edges);
        aligned_edges(core.lo(), core.hi(), h, &mut edges);
        aligned_edges(core.hi(), region.hi(), h_tail, &mut edges);
    }
    edges.push(supp.lo());
    edges.push(supp.hi());
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|b, a| *b - *a < 1e-12 * (1.0 + a.abs()));

    let (ref_nodes, ref_weights) = gauss_legendre_reference(policy.order);
    let mut nodes = Vec::with_capacity(edges.len() * policy.order);
    let mut weights = Vec::with_capacity(edges.len() * policy.order);
    for pair in edges.windows(2) {
        let (mid, half) = (0.5 * (pair[0] + pair[1]), 0.5 * (pair[1] - pair[0]));
        for (t, wt) in ref_nodes.iter().zip(ref_weights) {
            nodes.push(mid + half * t);
            weights.push(half * wt);
        }
    }
    Ok((nodes, weights))
}

/// Operator output together with `f` itself on a shared node set: the
/// carriers of `‖·‖_P̄`, `I^Φ̄` and the error `K_w f - f`.
pub struct OperatorSamples {
    pub output: Samples,
    pub input: Samples,
}

impl OperatorSamples {
    pub fn error(&self) -> Samples {
        Samples {
            values: self.output.values.iter().zip(&self.input.values).map(|(a, b)| a - b).collect(),
            weights: self.output.weights.clone(),
        }
    }
}

pub fn operator_samples(
    cfg: &OperatorConfig,
    f: &TestFunction,
    which: Which,
    policy: &NodePolicy,
    cache: Option<&AverageCache>,
) -> Result<OperatorSamples> {
    let (axes, weights): (Vec<_>, Vec<_>) = (0..cfg.dim())
        .map(|i| axis_nodes(cfg, f, which, i, policy))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let a = coefficients(cfg, f, which, cache)?;
    let output = apply_on_nodes(cfg, &a, &axes)?;
    let input = eval_tensor(f, &axes);
    Ok(OperatorSamples {
        output: Samples {
            values: output,
            weights: weights.clone(),
        },
        input: Samples { values: input, weights },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{lookup, Smoothness};
    use crate::kernels::parse_kernel;
    use crate::norms::{mixed_norm_of_samples, ExponentVector};
    use crate::operators::{generalized_apply, kantorovich_apply};

    fn cfg(id: &str, n: usize, w: f64) -> OperatorConfig {
        OperatorConfig::new(parse_kernel(id, n, false).unwrap().into_product().unwrap(), w).unwrap()
    }

    #[test]
    fn grid_matches_pointwise() {
        for (id, label, w) in [("bspline:2", "hat2d", 3.0), ("bspline:3", "box2d", 2.0), ("fejer*bspline:1", "bump2d", 1.5)] {
            let c = cfg(id, 2, w);
            let f = lookup(label).unwrap();
            let out = BoxDomain::cube(-1.7, 2.1, 2).unwrap();
            for which in [Which::Generalized, Which::Kantorovich] {
                let g = apply_on_grid(&c, &f, &out, 9, which, None).unwrap();
                let axes: Vec<Vec<f64>> = (0..2).map(|i| GridFunction::axis_points(&out, 9, i)).collect();
                for (flat, &v) in g.values().iter().enumerate() {
                    let x = [axes[0][flat % 9], axes[1][flat / 9]];
                    let p = match which {
                        Which::Generalized => generalized_apply(&c, &f, &x).unwrap(),
                        Which::Kantorovich => kantorovich_apply(&c, &f, &x).unwrap(),
                    };
                    assert!((v - p).abs() < 1e-13, "{id} {label} {which} at {x:?}: {v} vs {p}");
                }
            }
        }
    }

    #[test]
    fn constant_grid_is_one() {
        let f = TestFunction::new("one", BoxDomain::cube(-5.0, 5.0, 2).unwrap(), Smoothness::Smooth, |_| 1.0);
        let c = cfg("bspline:2", 2, 4.0);
        let g = apply_on_grid(&c, &f, &BoxDomain::cube(-1.0, 1.0, 2).unwrap(), 17, Which::Kantorovich, None).unwrap();
        assert!(g.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn grid_error_shrinks_with_w() {
        let f = lookup("hat1d").unwrap();
        let out = BoxDomain::cube(-1.5, 1.5, 1).unwrap();
        let truth = GridFunction::sample(&f, &out, 301).unwrap();
        let mut prev = f64::INFINITY;
        for w in [2.0, 4.0, 8.0, 16.0] {
            let g = apply_on_grid(&cfg("bspline:2", 1, w), &f, &out, 301, Which::Kantorovich, None).unwrap();
            let err = g.sub(&truth).unwrap().max_abs();
            assert!(err < prev, "w={w}: {err} vs {prev}");
            prev = err;
        }
    }

    #[test]
    fn smooth_samples_and_averages_agree() {
        let f = lookup("bump2d").unwrap();
        let c = cfg("bspline:2", 2, 64.0);
        let out = BoxDomain::cube(-1.2, 1.2, 2).unwrap();
        let s = apply_on_grid(&c, &f, &out, 65, Which::Generalized, None).unwrap();
        let k = apply_on_grid(&c, &f, &out, 65, Which::Kantorovich, None).unwrap();
        assert!(s.sub(&k).unwrap().max_abs() < 0.05);
    }

    #[test]
    fn nodes_integrate_exactly_and_cover_output() {
        // bspline(2) output of hat1d is piecewise linear on the half-lattice
        let f = lookup("hat1d").unwrap();
        let c = cfg("bspline:2", 1, 4.0);
        let (nodes, weights) = axis_nodes(&c, &f, Which::Kantorovich, 0, &NodePolicy::default()).unwrap();
        assert!(nodes[0] > -1.6 && *nodes.last().unwrap() < 1.6);
        let total: f64 = weights.iter().sum();
        assert!((total - (nodes.last().unwrap() - nodes[0])).abs() < 0.1);
        let s = operator_samples(&c, &f, Which::Kantorovich, &NodePolicy::default(), None).unwrap();
        // ∫K_w f = ∫f for a partition of unity
        let p1 = ExponentVector::new(vec![1.0]).unwrap();
        assert!((mixed_norm_of_samples(&s.output, &p1).unwrap() - 1.0).abs() < 1e-13);
        assert!((mixed_norm_of_samples(&s.input, &p1).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn fejer_region_capped() {
        let f = lookup("hat1d").unwrap();
        let c = cfg("fejer", 1, 2.0);
        let (full, _) = axis_nodes(&c, &f, Which::Kantorovich, 0, &NodePolicy::default()).unwrap();
        let (capped, _) = axis_nodes(&c, &f, Which::Kantorovich, 0, &NodePolicy::reduced()).unwrap();
        assert!(full.last().unwrap() > &150.0);
        assert!(capped.last().unwrap() < &6.0);
    }
}
