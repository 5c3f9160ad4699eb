//! Partition of unity, absolute moments, L¹ norms and the Fourier-side
//! criterion, all by truncated sums or direct quadrature.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{integrate_1d, Interval, QuadratureSpec};

use super::{Kernel, RadialKernel, TruncationPolicy, UnivariateKernel};

pub const DEFAULT_PROBES: usize = 257;
pub const DEFAULT_KMAX: usize = 4;
/// Half-width of the quadrature window for transforms of non-compact kernels;
/// a second pass at twice the width extrapolates the tail.
pub const FOURIER_RADIUS: f64 = 1024.0;

/// Uniform probe grid `{j / per_axis : 0 <= j < per_axis}^n` on `[0,1)^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeGrid {
    per_axis: usize,
}

impl Default for ProbeGrid {
    fn default() -> Self {
        Self {
            per_axis: DEFAULT_PROBES,
        }
    }
}

impl ProbeGrid {
    pub fn new(per_axis: usize) -> Result<Self> {
        if per_axis == 0 {
            return Err(Error::InvalidArgument("probe grid needs at least one point".into()));
        }
        Ok(Self { per_axis })
    }

    pub fn per_axis(&self) -> usize {
        self.per_axis
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.per_axis).map(|j| j as f64 / self.per_axis as f64).collect()
    }

    /// All grid points, axis 0 varying fastest.
    pub fn points(&self, dim: usize) -> Vec<Vec<f64>> {
        let c = self.coords();
        let total = self.per_axis.pow(dim as u32);
        (0..total)
            .map(|mut idx| {
                (0..dim)
                    .map(|_| {
                        let v = c[idx % self.per_axis];
                        idx /= self.per_axis;
                        v
                    })
                    .collect()
            })
            .collect()
    }
}

/// `Σ_{|k| <= r} g(χ(u - k))·|u - k|^α`, summed from the outside in.
fn axis_sum(k: &UnivariateKernel, u: f64, r: usize, alpha: f64, absolute: bool) -> f64 {
    let term = |j: i64| {
        let d = u - j as f64;
        let v = k.eval(d);
        let v = if absolute { v.abs() } else { v };
        if alpha == 0.0 || v == 0.0 {
            v
        } else {
            v * d.abs().powf(alpha)
        }
    };
    let mut acc = 0.0;
    for j in (1..=r as i64).rev() {
        acc += term(j) + term(-j);
    }
    acc + term(0)
}

/// `Σ_{|k_i| <= radii_i} g(χ(u - k))·‖u - k‖₂^α` over the lattice box.
pub fn lattice_sum(k: &Kernel, u: &[f64], radii: &[usize], alpha: f64, absolute: bool) -> f64 {
    let n = k.dim();
    debug_assert_eq!(u.len(), n);
    if let (Kernel::Product(p), true) = (k, alpha == 0.0) {
        return p
            .factors()
            .iter()
            .zip(u)
            .zip(radii)
            .map(|((f, &ui), &r)| axis_sum(f, ui, r, 0.0, absolute))
            .product();
    }
    if n == 1 {
        if let Kernel::Product(p) = k {
            return axis_sum(&p.factors()[0], u[0], radii[0], alpha, absolute);
        }
    }
    let mut idx: Vec<i64> = radii.iter().map(|&r| -(r as i64)).collect();
    let mut d = vec![0.0; n];
    let mut acc = 0.0;
    loop {
        for i in 0..n {
            d[i] = u[i] - idx[i] as f64;
        }
        let v = k.eval(&d);
        let v = if absolute { v.abs() } else { v };
        acc += if alpha == 0.0 || v == 0.0 {
            v
        } else {
            v * d.iter().map(|x| x * x).sum::<f64>().sqrt().powf(alpha)
        };
        let mut axis = 0;
        loop {
            if axis == n {
                return acc;
            }
            idx[axis] += 1;
            if idx[axis] <= radii[axis] as i64 {
                break;
            }
            idx[axis] = -(radii[axis] as i64);
            axis += 1;
        }
    }
}

fn max_of(values: impl ParallelIterator<Item = f64>) -> f64 {
    values.reduce(|| 0.0, f64::max)
}

/// `max_u |Σ_k χ(u - k) - 1|` over explicit probe points.
pub fn partition_of_unity_defect(k: &Kernel, trunc: &TruncationPolicy, probes: &[Vec<f64>]) -> f64 {
    let radii = k.lattice_radii(trunc);
    max_of(probes.par_iter().map(|u| (lattice_sum(k, u, &radii, 0.0, false) - 1.0).abs()))
}

type TableKey = (String, usize, usize, bool);

/// `Σ_k g(χ(u - k))` over the probe coordinates, memoised: certification
/// asks for the same long Fejér sums in several dimensions and for both the
/// signed and the absolute variant, which coincide for nonnegative factors.
fn axis_table(f: &UnivariateKernel, r: usize, grid: ProbeGrid, absolute: bool) -> Arc<Vec<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<TableKey, Arc<Vec<f64>>>>> = OnceLock::new();
    let absolute = absolute && !f.is_nonnegative();
    let key = (f.id(), r, grid.per_axis(), absolute);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("table lock").get(&key) {
        return Arc::clone(t);
    }
    let table: Arc<Vec<f64>> = Arc::new(grid.coords().par_iter().map(|&u| axis_sum(f, u, r, 0.0, absolute)).collect());
    cache.lock().expect("table lock").insert(key, Arc::clone(&table));
    table
}

/// Per-axis sums on the tensor probe grid; `None` for radial kernels.
fn axis_tables(k: &Kernel, trunc: &TruncationPolicy, grid: ProbeGrid, absolute: bool) -> Option<Vec<Arc<Vec<f64>>>> {
    let p = k.as_product()?;
    Some(
        p.factors()
            .iter()
            .map(|f| axis_table(f, trunc.lattice_radius(f), grid, absolute))
            .collect(),
    )
}

/// Max of `g(∏ table_i[j_i])` over every index tuple.
fn max_over_products(tables: &[Arc<Vec<f64>>], g: impl Fn(f64) -> f64) -> f64 {
    let n = tables.len();
    let mut idx = vec![0usize; n];
    let mut best: f64 = 0.0;
    loop {
        let prod: f64 = idx.iter().zip(tables).map(|(&i, t)| t[i]).product();
        best = best.max(g(prod));
        let mut axis = 0;
        loop {
            if axis == n {
                return best;
            }
            idx[axis] += 1;
            if idx[axis] < tables[axis].len() {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

/// Partition defect on a tensor probe grid. Product kernels factor, so only
/// one-dimensional sums are evaluated.
pub fn partition_of_unity_defect_on_grid(k: &Kernel, trunc: &TruncationPolicy, grid: ProbeGrid) -> f64 {
    match axis_tables(k, trunc, grid, false) {
        Some(tables) => max_over_products(&tables, |s| (s - 1.0).abs()),
        None => partition_of_unity_defect(k, trunc, &grid.points(k.dim())),
    }
}

fn check_moment_decay(k: &Kernel, alpha: f64) -> Result<()> {
    match k {
        Kernel::Product(p) => {
            for f in p.factors() {
                let decay = f.decay_exponent();
                if decay <= alpha + 1.0 {
                    return Err(Error::MomentMayDiverge { alpha, decay, dim: 1 });
                }
            }
        }
        Kernel::Radial(r) => {
            let decay = r.decay_exponent();
            if decay <= alpha + r.dim() as f64 {
                return Err(Error::MomentMayDiverge {
                    alpha,
                    decay,
                    dim: r.dim(),
                });
            }
        }
    }
    Ok(())
}

/// `m_α(χ) = sup_u Σ_k |χ(u - k)|·‖u - k‖₂^α`, maximised over the probe grid
/// with `probe_resolution` points per axis. Grid maxima are lower bounds of
/// the supremum.
pub fn absolute_moment(k: &Kernel, alpha: f64, trunc: &TruncationPolicy, probe_resolution: usize) -> Result<f64> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("moment order must be >= 0, got {alpha}")));
    }
    check_moment_decay(k, alpha)?;
    let grid = ProbeGrid::new(probe_resolution)?;
    if alpha == 0.0 {
        if let Some(tables) = axis_tables(k, trunc, grid, true) {
            // all entries are nonnegative, so the max of products is the product of maxima
            return Ok(tables.iter().map(|t| t.iter().copied().fold(0.0, f64::max)).product());
        }
    }
    let radii = k.lattice_radii(trunc);
    let points = grid.points(k.dim());
    Ok(max_of(points.par_iter().map(|u| lattice_sum(k, u, &radii, alpha, true))))
}

/// Quadrature plus tail for `∫ g` over `R` when `|g| <= A|x|^{-d}`: the
/// integral over `[-R, R]` and `[-2R, 2R]` is extrapolated assuming a tail
/// proportional to `R^{1-d}`.
fn extrapolated_integral<F>(g: F, centre: f64, r: f64, decay: f64, q: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let inner = integrate_1d(&g, &Interval::new(centre - r, centre + r)?, q)?;
    let outer = integrate_1d(&g, &Interval::new(centre - 2.0 * r, centre - r)?, q)?
        + integrate_1d(&g, &Interval::new(centre + r, centre + 2.0 * r)?, q)?;
    let wide = inner + outer;
    Ok(wide + outer / (2f64.powf(decay - 1.0) - 1.0))
}

fn centre_of(k: &UnivariateKernel) -> f64 {
    match k.family() {
        super::Family::Custom { shift, .. } => shift.round(),
        _ => 0.0,
    }
}

/// `∫ |χ|`, exact on the support for compact kernels; otherwise quadrature on
/// `[-R, R]` with `R = radius_terms` plus tail extrapolation.
pub fn univariate_l1_norm(k: &UnivariateKernel, trunc: &TruncationPolicy) -> Result<f64> {
    let q = QuadratureSpec::default();
    if let Some(iv) = k.support() {
        return integrate_1d(|x| k.eval(x).abs(), &iv, &q);
    }
    let r = trunc.radius_terms() as f64;
    let tail = k.tail_mass(r);
    if !(tail <= trunc.tail_tolerance()) {
        return Err(Error::InsufficientTruncation {
            radius: trunc.radius_terms(),
            tail,
            tolerance: trunc.tail_tolerance(),
        });
    }
    extrapolated_integral(|x| k.eval(x).abs(), centre_of(k), r, k.decay_exponent(), &q)
}

fn unit_sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 4.0 * PI,
    }
}

fn radial_l1_norm(k: &RadialKernel, trunc: &TruncationPolicy) -> Result<f64> {
    check_moment_decay(&Kernel::Radial(k.clone()), 0.0)?;
    let d = k.dim() as f64;
    let excess = k.decay_exponent() - d;
    let (a, r0) = k.envelope();
    let r = (trunc.radius_terms() as f64).max(r0);
    let area = unit_sphere_area(k.dim());
    let tail = area * a * r.powf(-excess) / excess;
    if !(tail <= trunc.tail_tolerance()) {
        return Err(Error::InsufficientTruncation {
            radius: trunc.radius_terms(),
            tail,
            tolerance: trunc.tail_tolerance(),
        });
    }
    let q = QuadratureSpec::default();
    let g = |s: f64| k.eval_radius(s).abs() * s.powi(k.dim() as i32 - 1);
    let inner = integrate_1d(g, &Interval::new(0.0, r)?, &q)?;
    let outer = integrate_1d(g, &Interval::new(r, 2.0 * r)?, &q)?;
    Ok(area * (inner + outer + outer / (2f64.powf(excess) - 1.0)))
}

/// `‖χ‖₁`; for product kernels the product of the factor norms.
pub fn kernel_l1_norm(k: &Kernel, trunc: &TruncationPolicy) -> Result<f64> {
    match k {
        Kernel::Product(p) => p.factors().iter().map(|f| univariate_l1_norm(f, trunc)).product(),
        Kernel::Radial(r) => radial_l1_norm(r, trunc),
    }
}

fn fourier_spec(v: f64) -> QuadratureSpec {
    QuadratureSpec::default().with_cells_per_unit(8 + (2.0 * v.abs()).ceil() as usize)
}

/// `χ̂(v) = ∫ χ(u) e^{-ivu} du` as `(re, im)`.
pub fn fourier_transform(k: &UnivariateKernel, v: f64) -> Result<(f64, f64)> {
    let q = fourier_spec(v);
    let re = |x: f64| k.eval(x) * (v * x).cos();
    let im = |x: f64| -k.eval(x) * (v * x).sin();
    match k.support() {
        Some(iv) => Ok((integrate_1d(re, &iv, &q)?, integrate_1d(im, &iv, &q)?)),
        None => {
            let d = k.decay_exponent();
            let c = centre_of(k);
            Ok((
                extrapolated_integral(re, c, FOURIER_RADIUS, d, &q)?,
                extrapolated_integral(im, c, FOURIER_RADIUS, d, &q)?,
            ))
        }
    }
}

fn criterion_from(transform: impl Fn(f64) -> Result<(f64, f64)>, kmax: usize) -> Result<f64> {
    let (re0, im0) = transform(0.0)?;
    let mut defect = ((re0 - 1.0).powi(2) + im0 * im0).sqrt();
    // real kernels: |χ̂(-v)| = |χ̂(v)|
    for j in 1..=kmax {
        let (re, im) = transform(2.0 * PI * j as f64)?;
        defect = defect.max(re.hypot(im));
    }
    Ok(defect)
}

/// `max(|χ̂(0) - 1|, max_{1 <= |j| <= kmax} |χ̂(2πj)|)`.
pub fn fourier_criterion_defect(k: &UnivariateKernel, kmax: usize) -> Result<f64> {
    if !k.is_integrable() {
        return Err(Error::InvalidArgument(format!("kernel '{}' is not integrable", k.id())));
    }
    criterion_from(|v| fourier_transform(k, v), kmax)
}

/// Fourier criterion for a one-dimensional Bochner–Riesz kernel, whose
/// transform is real and even.
pub fn radial_fourier_criterion_defect(k: &RadialKernel, kmax: usize) -> Result<f64> {
    if k.dim() != 1 {
        return Err(Error::UnsupportedDimension(k.dim()));
    }
    criterion_from(
        |v| {
            let q = fourier_spec(v);
            // the tail oscillates with mean zero; an infinite exponent turns
            // the extrapolation off
            let re = extrapolated_integral(
                |x| k.eval_radius(x) * (v * x).cos(),
                0.0,
                FOURIER_RADIUS,
                f64::INFINITY,
                &q,
            )?;
            Ok((re, 0.0))
        },
        kmax,
    )
}

/// Fourier criterion of a multivariate kernel: `|χ̂(0) - 1|` and `|χ̂(2πj)|`
/// over `0 < ‖j‖∞ <= kmax`. Product transforms factorise, so the maximum
/// over `j` is taken factor by factor.
pub fn kernel_fourier_defect(k: &Kernel, kmax: usize) -> Result<f64> {
    match k {
        Kernel::Radial(r) => radial_fourier_criterion_defect(r, kmax),
        Kernel::Product(p) => {
            let mut at_zero = Vec::with_capacity(p.dim());
            let mut off_zero = Vec::with_capacity(p.dim());
            for f in p.factors() {
                if !f.is_integrable() {
                    return Err(Error::InvalidArgument(format!("kernel '{}' is not integrable", f.id())));
                }
                let (re, im) = fourier_transform(f, 0.0)?;
                at_zero.push((re, im));
                let mut m: f64 = 0.0;
                for j in 1..=kmax {
                    let (re, im) = fourier_transform(f, 2.0 * PI * j as f64)?;
                    m = m.max(re.hypot(im));
                }
                off_zero.push(m);
            }
            // χ̂(0) = ∏ χ̂_i(0) as a complex product
            let (re0, im0) = at_zero.iter().fold((1.0, 0.0), |(a, b), &(c, d)| (a * c - b * d, a * d + b * c));
            let mut defect = (re0 - 1.0).hypot(im0);
            for i in 0..p.dim() {
                let rest: f64 = (0..p.dim())
                    .filter(|&l| l != i)
                    .map(|l| at_zero[l].0.hypot(at_zero[l].1).max(off_zero[l]))
                    .product();
                defect = defect.max(off_zero[i] * rest);
            }
            Ok(defect)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::ProductKernel;

    fn bspline(m: u32, n: usize) -> Kernel {
        ProductKernel::replicate(UnivariateKernel::bspline(m).unwrap(), n).unwrap().into()
    }

    fn fejer(n: usize) -> Kernel {
        ProductKernel::replicate(UnivariateKernel::fejer(), n).unwrap().into()
    }

    #[test]
    fn probe_grid_layout() {
        let g = ProbeGrid::new(3).unwrap();
        let pts = g.points(2);
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[1], vec![1.0 / 3.0, 0.0]);
        assert_eq!(pts[3], vec![0.0, 1.0 / 3.0]);
        assert!(ProbeGrid::new(0).is_err());
    }

    #[test]
    fn bspline_partitions_are_exact() {
        let t = TruncationPolicy::default().with_radius(2);
        let probes = ProbeGrid::default().points(1);
        assert!(partition_of_unity_defect(&bspline(2, 1), &t, &probes) < 1e-15);
        let t3 = TruncationPolicy::default().with_radius(3);
        assert!(partition_of_unity_defect_on_grid(&bspline(3, 2), &t3, ProbeGrid::default()) < 1e-14);
        for m in 1..=6 {
            assert!(partition_of_unity_defect_on_grid(&bspline(m, 1), &t, ProbeGrid::default()) < 1e-13);
        }
    }

    #[test]
    fn grid_and_pointwise_agree() {
        let t = TruncationPolicy::default().with_radius(40);
        let k: Kernel = ProductKernel::new(vec![UnivariateKernel::fejer(), UnivariateKernel::bspline(3).unwrap()])
            .unwrap()
            .into();
        let grid = ProbeGrid::new(9).unwrap();
        let a = partition_of_unity_defect_on_grid(&k, &t, grid);
        let b = partition_of_unity_defect(&k, &t, &grid.points(2));
        assert!((a - b).abs() < 1e-14, "{a} {b}");
    }

    #[test]
    fn fejer_partition_tail() {
        let probes = ProbeGrid::default().points(1);
        let d200 = partition_of_unity_defect(&fejer(1), &TruncationPolicy::default().with_radius(200), &probes);
        let d2000 = partition_of_unity_defect(&fejer(1), &TruncationPolicy::default().with_radius(2000), &probes);
        assert!(d200 < 1e-2);
        // the tail behaves like 1/radius
        assert!(d2000 < d200 / 5.0, "{d200} {d2000}");
        assert!(d2000 > 0.0);
    }

    #[test]
    fn moments_of_hat() {
        let t = TruncationPolicy::default();
        let m0 = absolute_moment(&bspline(2, 1), 0.0, &t, DEFAULT_PROBES).unwrap();
        assert!((m0 - 1.0).abs() < 1e-15);
        let m1 = absolute_moment(&bspline(2, 1), 1.0, &t, DEFAULT_PROBES).unwrap();
        // sup of 2u(1-u) is 1/2 at u = 1/2, which the odd grid misses by O(1/257²)
        let grid_max = (0..DEFAULT_PROBES)
            .map(|j| {
                let u = j as f64 / DEFAULT_PROBES as f64;
                2.0 * u * (1.0 - u)
            })
            .fold(0.0, f64::max);
        assert!((m1 - grid_max).abs() < 1e-15);
        assert!(m1 <= 0.5 && m1 > 0.5 - 1e-4);
    }

    #[test]
    fn moment_monotone_for_compact_kernels() {
        let t = TruncationPolicy::default();
        for m in 1..=4 {
            let k = bspline(m, 2);
            let r = m as f64 / 2.0 * 2f64.sqrt();
            let m0 = absolute_moment(&k, 0.0, &t, 33).unwrap();
            for alpha in [0.5, 1.0, 2.0] {
                let ma = absolute_moment(&k, alpha, &t, 33).unwrap();
                assert!(ma <= r.powf(alpha) * m0 + 1e-12);
            }
        }
    }

    #[test]
    fn moment_divergence_detected() {
        let t = TruncationPolicy::default();
        let err = absolute_moment(&fejer(1), 1.0, &t, 17).unwrap_err();
        assert!(err.to_string().starts_with("moment may diverge"));
        assert!(absolute_moment(&fejer(1), 0.5, &t.with_radius(64), 17).is_ok());
    }

    #[test]
    fn l1_norms() {
        let t = TruncationPolicy::default();
        for m in 1..=6 {
            assert!((kernel_l1_norm(&bspline(m, 1), &t).unwrap() - 1.0).abs() < 1e-12);
        }
        let f = kernel_l1_norm(&fejer(1), &t).unwrap();
        assert!((f - 1.0).abs() < 1e-7, "{f}");
        let j = univariate_l1_norm(&UnivariateKernel::jackson(1.0, 2).unwrap(), &t).unwrap();
        assert!((j - 1.0).abs() < 1e-9, "{j}");
        let mixed: Kernel = ProductKernel::new(vec![UnivariateKernel::fejer(), UnivariateKernel::bspline(2).unwrap()])
            .unwrap()
            .into();
        let prod = kernel_l1_norm(&mixed, &t).unwrap();
        assert!((prod - f).abs() <= 1e-12 * f);
        let scaled = UnivariateKernel::custom(0.5, 0.0, UnivariateKernel::bspline(3).unwrap()).unwrap();
        assert!((univariate_l1_norm(&scaled, &t).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn l1_norm_reports_short_radius() {
        let t = TruncationPolicy::new(10, 1e-3).unwrap();
        let err = kernel_l1_norm(&fejer(1), &t).unwrap_err();
        assert!(err.to_string().starts_with("insufficient truncation radius"));
    }

    #[test]
    fn radial_l1_norm_dominates_integral() {
        let k = RadialKernel::new(1.0, 1).unwrap();
        let t = TruncationPolicy::new(2048, 1e-3).unwrap();
        let l1 = kernel_l1_norm(&Kernel::Radial(k), &t).unwrap();
        assert!(l1 > 1.0 && l1 < 2.0, "{l1}");
    }

    #[test]
    fn bspline_transform_matches_closed_form() {
        for m in 1..=4 {
            let k = UnivariateKernel::bspline(m).unwrap();
            for v in [0.3, 1.0, 2.5, 7.0] {
                let (re, im) = fourier_transform(&k, v).unwrap();
                let expected = crate::numerics::sinc(v / (2.0 * PI)).powi(m as i32);
                assert!((re - expected).abs() < 1e-12, "m={m} v={v}");
                assert!(im.abs() < 1e-12);
            }
            assert!(fourier_criterion_defect(&k, DEFAULT_KMAX).unwrap() < 1e-12);
        }
    }

    #[test]
    fn fejer_transform_is_triangle() {
        let k = UnivariateKernel::fejer();
        for v in [0.0, 0.5, 1.5, 3.0] {
            let (re, _) = fourier_transform(&k, v).unwrap();
            let tri = (1.0 - v / PI).max(0.0);
            assert!((re - tri).abs() < 1e-6, "v={v}: {re} vs {tri}");
        }
        assert!(fourier_criterion_defect(&k, DEFAULT_KMAX).unwrap() < 1e-6);
    }

    #[test]
    fn product_fourier_defect_factorises() {
        let b = bspline(2, 2);
        assert!(kernel_fourier_defect(&b, DEFAULT_KMAX).unwrap() < 1e-9);
        // a factor with mass 2 fails at the origin; brute force over j in [-2, 2]^2 agrees
        let scaled = UnivariateKernel::custom(2.0, 0.0, UnivariateKernel::bspline(2).unwrap()).unwrap();
        let fej = UnivariateKernel::fejer();
        let k: Kernel = ProductKernel::new(vec![scaled.clone(), fej.clone()]).unwrap().into();
        let d = kernel_fourier_defect(&k, 2).unwrap();
        let mut brute: f64 = 0.0;
        for j0 in -2i32..=2 {
            for j1 in -2i32..=2 {
                let (a, b) = fourier_transform(&scaled, 2.0 * PI * j0 as f64).unwrap();
                let (c, e) = fourier_transform(&fej, 2.0 * PI * j1 as f64).unwrap();
                let (re, im) = (a * c - b * e, a * e + b * c);
                let v = if j0 == 0 && j1 == 0 { (re - 1.0).hypot(im) } else { re.hypot(im) };
                brute = brute.max(v);
            }
        }
        assert!((d - brute).abs() < 1e-9, "{d} vs {brute}");
        assert!((d - 1.0).abs() < 1e-6);
    }

    #[test]
    fn shifted_box_passes_by_modulus() {
        let k = UnivariateKernel::custom(1.0, 0.5, UnivariateKernel::bspline(1).unwrap()).unwrap();
        let (re, im) = fourier_transform(&k, PI).unwrap();
        // B̂₁(π) = sinc(1/2) = 2/π, times the phase e^{-iπ/2}
        assert!(re.abs() < 1e-12);
        assert!((im + 2.0 / PI).abs() < 1e-12);
        assert!(fourier_criterion_defect(&k, DEFAULT_KMAX).unwrap() < 1e-12);
    }

    #[test]
    fn radial_transform_criterion() {
        let k = RadialKernel::new(1.0, 1).unwrap();
        assert!(radial_fourier_criterion_defect(&k, 2).unwrap() < 1e-6);
        assert!(radial_fourier_criterion_defect(&RadialKernel::new(1.0, 2).unwrap(), 2).is_err());
    }

    #[test]
    fn sinc_rejected() {
        assert!(fourier_criterion_defect(&UnivariateKernel::sinc_demo(), 2).is_err());
    }
}
