//! Functions to be reconstructed: evaluation rules on `R^n` with a bounding
//! box outside which they vanish, plus the built-in corpus.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{integrate_box, Interval, QuadratureSpec};

/// Axis-aligned box `∏ [lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDomain {
    axes: Vec<Interval>,
}

impl BoxDomain {
    pub fn new(axes: Vec<Interval>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidArgument("box needs at least one axis".into()));
        }
        Ok(Self { axes })
    }

    /// `[lo, hi]^n`.
    pub fn cube(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(vec![Interval::new(lo, hi)?; n])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Interval] {
        &self.axes
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.axes.iter().zip(x).all(|(iv, &v)| iv.contains(v))
    }

    pub fn volume(&self) -> f64 {
        self.axes.iter().map(Interval::length).product()
    }

    pub fn inflate(&self, by: f64) -> Self {
        Self {
            axes: self.axes.iter().map(|iv| iv.inflate(by)).collect(),
        }
    }

    /// Positive-measure intersection, if any.
    pub fn intersect(&self, other: &BoxDomain) -> Option<BoxDomain> {
        let axes = self
            .axes
            .iter()
            .zip(&other.axes)
            .map(|(a, b)| a.intersect(b))
            .collect::<Option<Vec<_>>>()?;
        Some(BoxDomain { axes })
    }

    /// Smallest box containing both.
    pub fn hull(&self, other: &BoxDomain) -> BoxDomain {
        let axes = self
            .axes
            .iter()
            .zip(&other.axes)
            .map(|(a, b)| Interval::new(a.lo().min(b.lo()), a.hi().max(b.hi())).expect("hull of valid intervals"))
            .collect();
        BoxDomain { axes }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Smoothness {
    Smooth,
    Lipschitz,
    Discontinuous,
}

pub type EvalRule = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A real function on `R^n` that vanishes outside `support`.
#[derive(Clone)]
pub struct TestFunction {
    arity: usize,
    rule: EvalRule,
    support: BoxDomain,
    smoothness: Smoothness,
    label: String,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("label", &self.label)
            .field("arity", &self.arity)
            .field("support", &self.support)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

impl TestFunction {
    pub fn new<F>(label: impl Into<String>, support: BoxDomain, smoothness: Smoothness, rule: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            arity: support.dim(),
            rule: Arc::new(rule),
            support,
            smoothness,
            label: label.into(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn support(&self) -> &BoxDomain {
        &self.support
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.arity);
        if self.support.contains(x) {
            (self.rule)(x)
        } else {
            0.0
        }
    }

    pub fn scaled(&self, c: f64) -> TestFunction {
        let rule = self.rule.clone();
        TestFunction {
            rule: Arc::new(move |x| c * rule(x)),
            label: format!("{}*{}", fmt_num(c), self.label),
            ..self.clone()
        }
    }

    /// Pointwise sum; the support is the hull of both supports.
    pub fn add(&self, other: &TestFunction) -> Result<TestFunction> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        let (a, b) = (self.clone(), other.clone());
        let smoothness = match (self.smoothness, other.smoothness) {
            (Smoothness::Smooth, Smoothness::Smooth) => Smoothness::Smooth,
            (Smoothness::Discontinuous, _) | (_, Smoothness::Discontinuous) => Smoothness::Discontinuous,
            _ => Smoothness::Lipschitz,
        };
        Ok(TestFunction::new(
            format!("{}+{}", self.label, other.label),
            self.support.hull(&other.support),
            smoothness,
            move |x| a.eval(x) + b.eval(x),
        ))
    }

    /// Piecewise constant on the uniform `cells_per_axis^n` partition of
    /// `domain`; `values` is laid out with axis 0 fastest. Cells are
    /// half-open on the right except at the far edge.
    pub fn piecewise_constant(label: impl Into<String>, domain: BoxDomain, cells_per_axis: usize, values: Vec<f64>) -> Result<Self> {
        let n = domain.dim();
        if cells_per_axis == 0 || values.len() != cells_per_axis.pow(n as u32) {
            return Err(Error::InvalidArgument(format!(
                "piecewise constant function needs {}^{n} values, got {}",
                cells_per_axis,
                values.len()
            )));
        }
        let axes = domain.axes().to_vec();
        Ok(TestFunction::new(label, domain, Smoothness::Discontinuous, move |x| {
            let mut idx = 0;
            let mut stride = 1;
            for (iv, &v) in axes.iter().zip(x) {
                let t = ((v - iv.lo()) / iv.length() * cells_per_axis as f64).floor() as usize;
                idx += t.min(cells_per_axis - 1) * stride;
                stride *= cells_per_axis;
            }
            values[idx]
        }))
    }
}

fn fmt_num(c: f64) -> String {
    format!("{c}")
}

fn hat(x: &[f64]) -> f64 {
    x.iter().map(|v| (1.0 - v.abs()).max(0.0)).product()
}

fn bump(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 < 1.0 {
        (1.0 / (r2 - 1.0)).exp()
    } else {
        0.0
    }
}

fn half_open_unit_box(x: &[f64]) -> f64 {
    if x.iter().all(|&v| (0.0..1.0).contains(&v)) {
        1.0
    } else {
        0.0
    }
}

pub const SEP_SCALE: f64 = 2.0;

/// Factor of the separable corpus member on axis `i`: `cos²(πt/2)` on even
/// axes, `(1 - t²)²` on odd ones, both on `[-1, 1]`.
pub fn sep_factor(i: usize, t: f64) -> f64 {
    if t.abs() > 1.0 {
        return 0.0;
    }
    if i % 2 == 0 {
        let c = (0.5 * PI * t).cos();
        c * c
    } else {
        let s = 1.0 - t * t;
        s * s
    }
}

pub const CORPUS_FAMILIES: &[&str] = &["hat", "bump", "box", "const", "sep"];

fn corpus_member(family: &str, n: usize) -> Result<TestFunction> {
    let label = format!("{family}{n}d");
    let unit = BoxDomain::cube(-1.0, 1.0, n)?;
    Ok(match family {
        "hat" => TestFunction::new(label, unit, Smoothness::Lipschitz, hat),
        "bump" => TestFunction::new(label, unit, Smoothness::Smooth, bump),
        "box" => TestFunction::new(label, BoxDomain::cube(0.0, 1.0, n)?, Smoothness::Discontinuous, half_open_unit_box),
        "const" => TestFunction::new(label, unit, Smoothness::Discontinuous, |_| 1.0),
        "sep" => TestFunction::new(label, unit, Smoothness::Lipschitz, |x: &[f64]| {
            SEP_SCALE * x.iter().enumerate().map(|(i, &t)| sep_factor(i, t)).product::<f64>()
        }),
        _ => unreachable!(),
    })
}

/// The built-in functions of arity `n ∈ {1, 2, 3}`:
/// `hat` = `∏ (1 - |x_i|)_+`, `bump` = `exp(1/(‖x‖² - 1))` on the unit ball,
/// `box` = indicator of `[0,1)^n`, `const` = 1 on `[-1,1]^n`, and
/// `sep` = `2 ∏ g_i(x_i)` with the factors of [`sep_factor`].
pub fn corpus(n: usize) -> Result<Vec<TestFunction>> {
    if !(1..=3).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    CORPUS_FAMILIES.iter().map(|f| corpus_member(f, n)).collect()
}

pub fn known_labels() -> Vec<String> {
    (1..=3).flat_map(|n| CORPUS_FAMILIES.iter().map(move |f| format!("{f}{n}d"))).collect()
}

/// Corpus member by label, e.g. `hat1d`, `bump2d`, `sep3d`.
pub fn lookup(label: &str) -> Result<TestFunction> {
    let label = label.trim();
    let unknown = || Error::UnknownFunction {
        label: label.to_string(),
        known: known_labels().join(", "),
    };
    let stem = label.strip_suffix('d').ok_or_else(unknown)?;
    let split = stem.len().checked_sub(1).ok_or_else(unknown)?;
    if !stem.is_char_boundary(split) {
        return Err(unknown());
    }
    let (family, n) = stem.split_at(split);
    let n: usize = n.parse().map_err(|_| unknown())?;
    if !(1..=3).contains(&n) || !CORPUS_FAMILIES.contains(&family) {
        return Err(unknown());
    }
    corpus_member(family, n)
}

/// The lattice cell `∏ [k_j/w, (k_j+1)/w]`.
pub fn lattice_cell(k: &[i64], w: f64) -> BoxDomain {
    let axes = k
        .iter()
        .map(|&kj| Interval::new(kj as f64 / w, (kj + 1) as f64 / w).expect("w > 0"))
        .collect();
    BoxDomain { axes }
}

/// `w^n ∫_{cell} f`, integrating only over the part of the cell inside the
/// support box; exactly 0 when that part has measure zero.
pub fn cell_average(f: &TestFunction, k: &[i64], w: f64, q: &QuadratureSpec) -> Result<f64> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::InvalidArgument(format!("w must be positive, got {w}")));
    }
    if k.len() != f.arity() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            found: k.len(),
        });
    }
    let cell = lattice_cell(k, w);
    let Some(part) = cell.intersect(f.support()) else {
        return Ok(0.0);
    };
    let integral = integrate_box(|x| f.eval(x), part.axes(), q)?;
    Ok(w.powi(f.arity() as i32) * integral)
}

/// Quadrature for cell averages of `f` at rate `w`: midpoint with 16 cells
/// per lattice cell for discontinuous `f`, `base` otherwise.
pub fn average_spec(f: &TestFunction, w: f64, base: &QuadratureSpec) -> QuadratureSpec {
    match f.smoothness() {
        Smoothness::Discontinuous => {
            QuadratureSpec::midpoint((16.0 * w).ceil().max(16.0) as usize).expect("positive cell count")
        }
        _ => *base,
    }
}
