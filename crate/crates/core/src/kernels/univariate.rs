//! Univariate kernel families.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{binomial, integrate_1d, sinc, Interval, QuadratureSpec};

pub const MAX_BSPLINE_ORDER: u32 = 20;
pub const MAX_JACKSON_M: u32 = 10;

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Fejer,
    Jackson { beta: f64, m: u32 },
    BSpline { m: u32 },
    /// `scale · base(x - shift)`.
    Custom {
        scale: f64,
        shift: f64,
        base: Box<UnivariateKernel>,
    },
    /// `sinc` itself. Not integrable; only constructible through the demo
    /// switch of the registry.
    Sinc,
}

/// Decay envelope `|χ(x)| <= coeff · |x|^-exponent`, valid for
/// `|x| >= from`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Envelope {
    pub coeff: f64,
    pub exponent: f64,
    pub from: f64,
}

impl Envelope {
    /// `∫_{|x| > r} coeff |x|^-exponent dx`; infinite when the envelope is
    /// not integrable.
    pub fn tail_mass(&self, r: f64) -> f64 {
        if self.exponent <= 1.0 {
            return f64::INFINITY;
        }
        let r = r.max(self.from);
        2.0 * self.coeff * r.powf(1.0 - self.exponent) / (self.exponent - 1.0)
    }

    /// Smallest radius at which `tail_mass` drops to `tol`.
    pub fn radius_for(&self, tol: f64) -> f64 {
        if self.exponent <= 1.0 {
            return f64::INFINITY;
        }
        let r = (2.0 * self.coeff / ((self.exponent - 1.0) * tol)).powf(1.0 / (self.exponent - 1.0));
        r.max(self.from)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnivariateKernel {
    family: Family,
    support: Option<Interval>,
    envelope: Option<Envelope>,
    normalization: f64,
}

impl UnivariateKernel {
    pub fn fejer() -> Self {
        Self {
            family: Family::Fejer,
            support: None,
            envelope: Some(Envelope {
                coeff: 2.0 / (PI * PI),
                exponent: 2.0,
                from: 0.0,
            }),
            normalization: 0.5,
        }
    }

    pub fn jackson(beta: f64, m: u32) -> Result<Self> {
        let c = jackson_normalization(beta, m)?;
        Ok(Self {
            family: Family::Jackson { beta, m },
            support: None,
            envelope: Some(Envelope {
                coeff: c * (2.0 * beta * m as f64).powi(2 * m as i32),
                exponent: 2.0 * m as f64,
                from: 0.0,
            }),
            normalization: c,
        })
    }

    pub fn bspline(m: u32) -> Result<Self> {
        if !(1..=MAX_BSPLINE_ORDER).contains(&m) {
            return Err(Error::InvalidArgument(format!(
                "B-spline order must be in 1..={MAX_BSPLINE_ORDER}, got {m}"
            )));
        }
        let half = m as f64 / 2.0;
        Ok(Self {
            family: Family::BSpline { m },
            support: Some(Interval::symmetric(half)?),
            envelope: None,
            normalization: 1.0 / factorial(m - 1),
        })
    }

    pub fn custom(scale: f64, shift: f64, base: UnivariateKernel) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0 && shift.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "custom kernel needs a positive scale and finite shift, got scale={scale} shift={shift}"
            )));
        }
        let support = match base.support {
            Some(iv) => Some(Interval::new(iv.lo() + shift, iv.hi() + shift)?),
            None => None,
        };
        // |x - shift| >= |x|/2 once |x| >= 2|shift|
        let envelope = base.envelope.map(|e| Envelope {
            coeff: scale * e.coeff * 2f64.powf(e.exponent),
            exponent: e.exponent,
            from: e.from.max(2.0 * shift.abs()),
        });
        Ok(Self {
            family: Family::Custom {
                scale,
                shift,
                base: Box::new(base),
            },
            support,
            envelope,
            normalization: scale,
        })
    }

    pub fn sinc_demo() -> Self {
        Self {
            family: Family::Sinc,
            support: None,
            envelope: Some(Envelope {
                coeff: 1.0 / PI,
                exponent: 1.0,
                from: 0.0,
            }),
            normalization: 1.0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.family {
            Family::Fejer => eval_fejer(x),
            Family::Jackson { beta, m } => jackson_shape(*beta, *m, x) * self.normalization,
            Family::BSpline { m } => eval_bspline(*m, x),
            Family::Custom { scale, shift, base } => scale * base.eval(x - shift),
            Family::Sinc => sinc(x),
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn support(&self) -> Option<Interval> {
        self.support
    }

    /// `max |x|` over the support.
    pub fn support_radius(&self) -> Option<f64> {
        self.support.map(|iv| iv.lo().abs().max(iv.hi().abs()))
    }

    pub fn envelope(&self) -> Option<Envelope> {
        self.envelope
    }

    /// Infinite for compactly supported kernels.
    pub fn decay_exponent(&self) -> f64 {
        match (self.support, self.envelope) {
            (Some(_), _) => f64::INFINITY,
            (None, Some(e)) => e.exponent,
            (None, None) => unreachable!("non-compact kernel without envelope"),
        }
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn is_nonnegative(&self) -> bool {
        match &self.family {
            Family::Custom { base, .. } => base.is_nonnegative(),
            Family::Sinc => false,
            _ => true,
        }
    }

    pub fn is_integrable(&self) -> bool {
        self.support.is_some() || self.decay_exponent() > 1.0
    }

    /// Bound on `∫_{|x| > r} |χ|`.
    pub fn tail_mass(&self, r: f64) -> f64 {
        match (self.support_radius(), self.envelope) {
            (Some(s), _) => {
                if r >= s {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            (None, Some(e)) => e.tail_mass(r),
            (None, None) => f64::INFINITY,
        }
    }

    /// Registry id that parses back to this kernel.
    pub fn id(&self) -> String {
        match &self.family {
            Family::Fejer => "fejer".into(),
            Family::Jackson { beta, m } => format!("jackson:b={beta},m={m}"),
            Family::BSpline { m } => format!("bspline:{m}"),
            Family::Custom { scale, shift, base } => {
                let mut id = base.id();
                if *shift != 0.0 {
                    id = format!("shifted:{shift}:{id}");
                }
                if *scale != 1.0 {
                    id = format!("scaled:{scale}:{id}");
                }
                id
            }
            Family::Sinc => "sinc".into(),
        }
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// `½ sinc²(x/2)`.
pub fn eval_fejer(x: f64) -> f64 {
    let s = sinc(0.5 * x);
    0.5 * s * s
}

/// Centered B-spline of order `m` (degree `m - 1`), `m <= 20`.
///
/// Powers `(x)_+^0` are read as 1 for `x > 0` and 0 otherwise, which places
/// the support of `B_1` on `(-1/2, 1/2]`.
pub fn eval_bspline(m: u32, t: f64) -> f64 {
    let half = m as f64 / 2.0;
    if t <= -half || t > half {
        return 0.0;
    }
    // the sum is even for m >= 2; the left half has fewer, smaller terms
    let t = if m >= 2 { -t.abs() } else { t };
    let deg = m as i32 - 1;
    let mut acc = 0.0;
    for j in 0..=m {
        let base = half + t - j as f64;
        if base <= 0.0 {
            break;
        }
        let term = binomial(m, j) as f64 * base.powi(deg);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc / factorial(m - 1)
}

fn jackson_shape(beta: f64, m: u32, x: f64) -> f64 {
    sinc(x / (2.0 * beta * m as f64 * PI)).powi(2 * m as i32)
}

/// `C_{β,m}` with `∫ C_{β,m} sinc^{2m}(x/(2βmπ)) dx = 1`.
pub fn eval_jackson(beta: f64, m: u32, x: f64) -> Result<f64> {
    Ok(jackson_normalization(beta, m)? * jackson_shape(beta, m, x))
}

/// Reciprocal of `∫ sinc^{2m}(x/(2βmπ)) dx`.
///
/// With `t = x/(2βmπ)` this is `2βmπ ∫ sinc^{2m}(t) dt`. The integral is
/// taken over `[-T, T]` for integer `T`, plus the tail `∫_{|t|>T}` with
/// `sin^{2m}(πt)` replaced by its mean `C(2m,m)/4^m`; the residual of that
/// replacement is `O(T^{-2m-1})`. `T` doubles until successive estimates
/// agree to 1e-12 relative.
pub fn jackson_normalization(beta: f64, m: u32) -> Result<f64> {
    if !(beta.is_finite() && beta >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "Jackson kernel needs beta >= 1, got {beta}"
        )));
    }
    if !(1..=MAX_JACKSON_M).contains(&m) {
        return Err(Error::InvalidArgument(format!(
            "Jackson kernel needs 1 <= m <= {MAX_JACKSON_M}, got {m}"
        )));
    }
    let p = 2 * m as i32;
    let mean = binomial(2 * m, m) as f64 / 4f64.powi(m as i32);
    let tail = |t: f64| 2.0 * mean / (PI.powi(p) * (p - 1) as f64 * t.powi(p - 1));
    let q = QuadratureSpec::default();
    let shape = |t: f64| sinc(t).powi(p);

    let mut t = 16.0;
    let mut body = 2.0 * integrate_1d(shape, &Interval::new(0.0, t)?, &q)?;
    let mut prev = body + tail(t);
    let mut estimate = prev;
    for _ in 0..16 {
        body += 2.0 * integrate_1d(shape, &Interval::new(t, 2.0 * t)?, &q)?;
        t *= 2.0;
        estimate = body + tail(t);
        if (estimate - prev).abs() <= 1e-12 * estimate {
            break;
        }
        prev = estimate;
    }
    Ok(1.0 / (2.0 * beta * m as f64 * PI * estimate))
}
