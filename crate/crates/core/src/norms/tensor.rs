//! Tensor carriers for norm computations. Every layout stores axis 0 fastest.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functions::{BoxDomain, TestFunction};
use crate::numerics::QuadratureSpec;

/// Values on a finite lattice window `origin + [0, shape)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeArray {
    origin: Vec<i64>,
    shape: Vec<usize>,
    values: Vec<f64>,
}

impl LatticeArray {
    pub fn new(origin: Vec<i64>, shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if origin.len() != shape.len() || origin.is_empty() {
            return Err(Error::InvalidArgument("lattice window needs matching, nonempty origin and shape".into()));
        }
        let len: usize = shape.iter().product();
        if len != values.len() {
            return Err(Error::InvalidArgument(format!(
                "lattice window of shape {shape:?} needs {len} values, got {}",
                values.len()
            )));
        }
        Ok(Self { origin, shape, values })
    }

    /// Fill the window by evaluating `g` at every lattice point.
    pub fn from_fn<G>(origin: Vec<i64>, shape: Vec<usize>, g: G) -> Result<Self>
    where
        G: Fn(&[i64]) -> Result<f64> + Sync,
    {
        let n = shape.len();
        let len: usize = shape.iter().product();
        let values = (0..len)
            .into_par_iter()
            .map(|flat| {
                let k = unflatten(flat, &shape, &origin);
                debug_assert_eq!(k.len(), n);
                g(&k)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(origin, shape, values)
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn origin(&self) -> &[i64] {
        &self.origin
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, k: &[i64]) -> f64 {
        let mut flat = 0;
        let mut stride = 1;
        for ((&ki, &o), &s) in k.iter().zip(&self.origin).zip(&self.shape) {
            let i = ki - o;
            if i < 0 || i as usize >= s {
                return 0.0;
            }
            flat += i as usize * stride;
            stride *= s;
        }
        self.values[flat]
    }

    pub fn map(&self, g: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| g(v)).collect(),
            ..self.clone()
        }
    }
}

fn unflatten(mut flat: usize, shape: &[usize], origin: &[i64]) -> Vec<i64> {
    shape
        .iter()
        .zip(origin)
        .map(|(&s, &o)| {
            let i = flat % s;
            flat /= s;
            o + i as i64
        })
        .collect()
}

/// Values on the uniform tensor grid of `pts_per_axis` points per axis,
/// endpoints included.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    domain: BoxDomain,
    pts_per_axis: usize,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(domain: BoxDomain, pts_per_axis: usize, values: Vec<f64>) -> Result<Self> {
        if pts_per_axis < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 points per axis".into()));
        }
        let len = pts_per_axis.pow(domain.dim() as u32);
        if values.len() != len {
            return Err(Error::InvalidArgument(format!(
                "grid of {pts_per_axis}^{} points needs {len} values, got {}",
                domain.dim(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid values must be finite, found {bad}")));
        }
        Ok(Self {
            domain,
            pts_per_axis,
            values,
        })
    }

    /// Coordinates of axis `axis`.
    pub fn axis_points(domain: &BoxDomain, pts_per_axis: usize, axis: usize) -> Vec<f64> {
        let iv = domain.axes()[axis];
        let h = iv.length() / (pts_per_axis - 1) as f64;
        (0..pts_per_axis)
            .map(|i| if i + 1 == pts_per_axis { iv.hi() } else { iv.lo() + i as f64 * h })
            .collect()
    }

    /// Evaluate `f` on the grid.
    pub fn sample(f: &TestFunction, domain: &BoxDomain, pts_per_axis: usize) -> Result<Self> {
        if f.arity() != domain.dim() {
            return Err(Error::ArityMismatch {
                expected: f.arity(),
                found: domain.dim(),
            });
        }
        if pts_per_axis < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 points per axis".into()));
        }
        let axes: Vec<Vec<f64>> = (0..domain.dim()).map(|a| Self::axis_points(domain, pts_per_axis, a)).collect();
        let values = eval_tensor(f, &axes);
        Self::new(domain.clone(), pts_per_axis, values)
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn pts_per_axis(&self) -> usize {
        self.pts_per_axis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn map(&self, g: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| g(v)).collect(),
            ..self.clone()
        }
    }

    /// `self - other` on a shared grid.
    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.domain != other.domain || self.pts_per_axis != other.pts_per_axis {
            return Err(Error::InvalidArgument("grid functions live on different grids".into()));
        }
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
            ..self.clone()
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Trapezoid weights of every axis.
    pub fn trapezoid_weights(&self) -> Vec<Vec<f64>> {
        self.domain
            .axes()
            .iter()
            .map(|iv| {
                let h = iv.length() / (self.pts_per_axis - 1) as f64;
                let mut w = vec![h; self.pts_per_axis];
                w[0] = 0.5 * h;
                w[self.pts_per_axis - 1] = 0.5 * h;
                w
            })
            .collect()
    }
}

/// `f` on the tensor product of `axes`, axis 0 fastest.
pub(crate) fn eval_tensor(f: &TestFunction, axes: &[Vec<f64>]) -> Vec<f64> {
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let len: usize = shape.iter().product();
    let inner = shape[0];
    (0..len / inner)
        .into_par_iter()
        .flat_map_iter(|outer| {
            let mut point = vec![0.0; axes.len()];
            let mut rest = outer;
            for (a, ax) in axes.iter().enumerate().skip(1) {
                point[a] = ax[rest % ax.len()];
                rest /= ax.len();
            }
            axes[0]
                .iter()
                .map(|&x0| {
                    point[0] = x0;
                    f.eval(&point)
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Values with per-axis integration weights: the common input of every
/// iterated norm and modular.
#[derive(Clone, Debug)]
pub struct Samples {
    pub values: Vec<f64>,
    pub weights: Vec<Vec<f64>>,
}

impl Samples {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Quadrature nodes of `q` over the support box of `f`.
    pub fn from_function(f: &TestFunction, q: &QuadratureSpec) -> Self {
        let (nodes, weights): (Vec<_>, Vec<_>) = f.support().axes().iter().map(|iv| q.nodes(iv)).unzip();
        Self {
            values: eval_tensor(f, &nodes),
            weights,
        }
    }

    pub fn from_grid(g: &GridFunction) -> Self {
        Self {
            values: g.values.clone(),
            weights: g.trapezoid_weights(),
        }
    }

    /// Every lattice point carries weight `1/w` on every axis.
    pub fn from_lattice(a: &LatticeArray, w: f64) -> Self {
        Self {
            values: a.values.clone(),
            weights: a.shape.iter().map(|&s| vec![1.0 / w; s]).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| c * v).collect(),
            weights: self.weights.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

/// `x^p` with the common integer cases spelled out.
#[inline]
pub(crate) fn pow(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x * x
    } else {
        x.powf(p)
    }
}

/// Iterated reduction: `cur ← first(|v|)`, then for every axis `a` in turn
/// `cur ← Σ_i weights[a][i] · step(a, cur_i)` with `step(0, x) = x`.
pub(crate) fn iterated_reduce<F, G>(s: &Samples, first: F, step: G) -> f64
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(usize, f64) -> f64 + Sync,
{
    let mut cur: Vec<f64> = s.values.par_iter().map(|v| first(v.abs())).collect();
    for (axis, w) in s.weights.iter().enumerate() {
        let len = w.len();
        cur = cur
            .par_chunks(len)
            .map(|chunk| {
                chunk
                    .iter()
                    .zip(w)
                    .map(|(&x, &wt)| if x == 0.0 { 0.0 } else { wt * step(axis, x) })
                    .sum::<f64>()
            })
            .collect();
    }
    debug_assert_eq!(cur.len(), 1);
    cur[0]
}
