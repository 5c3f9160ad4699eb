//! Extended-valued Orlicz functions, scalar and mixed modulars, Luxemburg
//! norms and the Δ2 probe.

use std::cmp::Ordering;
use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::functions::TestFunction;
use crate::numerics::{bisect_monotone, QuadratureSpec, BISECTION_TOL};

use super::tensor::{iterated_reduce, pow, GridFunction, Samples};

/// A nonnegative real or `∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    pub fn from_f64(v: f64) -> Self {
        if v.is_infinite() && v > 0.0 {
            ExtendedReal::Infinity
        } else {
            ExtendedReal::Finite(v)
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v,
            ExtendedReal::Infinity => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::Infinity => None,
        }
    }
}

impl std::ops::Add for ExtendedReal {
    type Output = ExtendedReal;

    fn add(self, rhs: ExtendedReal) -> ExtendedReal {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::from_f64(a + b),
            _ => ExtendedReal::Infinity,
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OrliczFamily {
    /// `u^p`, `p >= 1`.
    Power(f64),
    /// `u^r`, `r >= 1`; the exponent ratios `p_i/p_{i-1}` of a mixed norm.
    Ratio(f64),
    /// `u·log(e + u)`.
    XLogE,
    /// `exp(u^a) - 1`, `a >= 1`.
    Exp(f64),
    /// `e^u - u - 1`.
    ExpLinear,
    /// `0` on `[0, b]`, `∞` beyond.
    Threshold(f64),
    /// `(u - 1)·[u >= 1]`.
    ReluShift,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrliczFunction {
    family: OrliczFamily,
}

pub const KNOWN_ORLICZ: &[&str] = &["power:<p>", "ratio:<r>", "xloge", "exp:<a>", "expl", "threshold:<b>", "relu"];

impl OrliczFunction {
    pub fn new(family: OrliczFamily) -> Result<Self> {
        let ok = match family {
            OrliczFamily::Power(p) | OrliczFamily::Ratio(p) => p.is_finite() && p >= 1.0,
            // exp(u^a) - 1 is not convex near 0 for a < 1
            OrliczFamily::Exp(a) => a.is_finite() && a >= 1.0,
            OrliczFamily::Threshold(b) => b.is_finite() && b > 0.0,
            OrliczFamily::XLogE | OrliczFamily::ExpLinear | OrliczFamily::ReluShift => true,
        };
        if !ok {
            return Err(Error::InvalidArgument(format!("invalid Orlicz parameters {family:?}")));
        }
        Ok(Self { family })
    }

    pub fn power(p: f64) -> Result<Self> {
        Self::new(OrliczFamily::Power(p))
    }

    pub fn family(&self) -> OrliczFamily {
        self.family
    }

    /// Families that vanish on a nontrivial interval.
    pub fn is_degenerate(&self) -> bool {
        matches!(self.family, OrliczFamily::Threshold(_) | OrliczFamily::ReluShift)
    }

    /// Closed-form answer to whether the family satisfies Δ2.
    pub fn delta2_analytic(&self) -> bool {
        matches!(self.family, OrliczFamily::Power(_) | OrliczFamily::Ratio(_) | OrliczFamily::XLogE)
    }

    /// `φ(u)` for `u >= 0`; `∞` is returned as `f64::INFINITY`.
    pub fn eval(&self, u: f64) -> f64 {
        debug_assert!(u >= 0.0);
        match self.family {
            OrliczFamily::Power(p) | OrliczFamily::Ratio(p) => pow(u, p),
            OrliczFamily::XLogE => {
                if u == 0.0 {
                    0.0
                } else {
                    u * (E + u).ln()
                }
            }
            OrliczFamily::Exp(a) => u.powf(a).exp_m1(),
            OrliczFamily::ExpLinear => {
                if u < 1e-3 {
                    // e^u - 1 - u by its series, avoiding cancellation
                    u * u * (0.5 + u * (1.0 / 6.0 + u / 24.0))
                } else {
                    u.exp_m1() - u
                }
            }
            OrliczFamily::Threshold(b) => {
                if u <= b {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            OrliczFamily::ReluShift => (u - 1.0).max(0.0),
        }
    }

    pub fn eval_extended(&self, u: f64) -> ExtendedReal {
        ExtendedReal::from_f64(self.eval(u))
    }

    pub fn id(&self) -> String {
        match self.family {
            OrliczFamily::Power(p) => format!("power:{p}"),
            OrliczFamily::Ratio(r) => format!("ratio:{r}"),
            OrliczFamily::XLogE => "xloge".into(),
            OrliczFamily::Exp(a) => format!("exp:{a}"),
            OrliczFamily::ExpLinear => "expl".into(),
            OrliczFamily::Threshold(b) => format!("threshold:{b}"),
            OrliczFamily::ReluShift => "relu".into(),
        }
    }
}

impl FromStr for OrliczFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let unknown = || Error::UnknownOrlicz {
            id: s.to_string(),
            known: KNOWN_ORLICZ.join(", "),
        };
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a.trim().parse::<f64>().map_err(|_| unknown())?)),
            None => (s, None),
        };
        let family = match (head, arg) {
            ("power", Some(p)) => OrliczFamily::Power(p),
            ("ratio", Some(r)) => OrliczFamily::Ratio(r),
            ("xloge" | "xlogx", None) => OrliczFamily::XLogE,
            ("exp", Some(a)) => OrliczFamily::Exp(a),
            ("expl", None) => OrliczFamily::ExpLinear,
            ("threshold", Some(b)) => OrliczFamily::Threshold(b),
            ("relu", None) => OrliczFamily::ReluShift,
            _ => return Err(unknown()),
        };
        Self::new(family)
    }
}

/// `Φ̄ = (φ₁, …, φₙ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrliczVector {
    phis: Vec<OrliczFunction>,
}

impl OrliczVector {
    pub fn new(phis: Vec<OrliczFunction>) -> Result<Self> {
        if phis.is_empty() {
            return Err(Error::InvalidArgument("Orlicz vector needs at least one entry".into()));
        }
        Ok(Self { phis })
    }

    /// `(u^{p₁}, u^{p₂/p₁}, …)`, whose Luxemburg norm is `‖·‖_P̄`.
    pub fn from_exponents(p: &[f64]) -> Result<Self> {
        let mut phis = Vec::with_capacity(p.len());
        for (i, &pi) in p.iter().enumerate() {
            phis.push(if i == 0 {
                OrliczFunction::new(OrliczFamily::Power(pi))?
            } else {
                OrliczFunction::new(OrliczFamily::Ratio(pi / p[i - 1]))?
            });
        }
        Self::new(phis)
    }

    pub fn len(&self) -> usize {
        self.phis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phis.is_empty()
    }

    pub fn phis(&self) -> &[OrliczFunction] {
        &self.phis
    }

    pub fn ids(&self) -> Vec<String> {
        self.phis.iter().map(OrliczFunction::id).collect()
    }
}

impl FromStr for OrliczVector {
    type Err = Error;

    /// Comma-separated ids, e.g. `power:1,ratio:2`.
    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.split(',').map(str::parse).collect::<Result<Vec<_>>>()?)
    }
}

fn check_arity(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::ArityMismatch { expected, found })
    }
}

/// `I^Φ̄` of weighted samples: integrate `φ₁(|f|)` along axis 1, apply `φ₂`,
/// integrate along axis 2, and so on.
pub fn mixed_modular_of_samples(phi: &OrliczVector, s: &Samples) -> Result<ExtendedReal> {
    check_arity(phi.len(), s.dim())?;
    let phis = phi.phis();
    let total = iterated_reduce(s, |u| phis[0].eval(u), |axis, x| if axis == 0 { x } else { phis[axis].eval(x) });
    Ok(ExtendedReal::from_f64(total))
}

/// Scalar modular `I^φ(f) = ∫ φ(|f|)` over the support box.
pub fn modular(phi: &OrliczFunction, f: &TestFunction, q: &QuadratureSpec) -> Result<ExtendedReal> {
    check_arity(1, f.arity())?;
    mixed_modular_of_samples(&OrliczVector::new(vec![*phi])?, &Samples::from_function(f, q))
}

pub fn mixed_modular(phi: &OrliczVector, f: &TestFunction, q: &QuadratureSpec) -> Result<ExtendedReal> {
    check_arity(phi.len(), f.arity())?;
    mixed_modular_of_samples(phi, &Samples::from_function(f, q))
}

pub fn mixed_modular_grid(phi: &OrliczVector, g: &GridFunction) -> Result<ExtendedReal> {
    mixed_modular_of_samples(phi, &Samples::from_grid(g))
}

/// `inf{λ > 0 : I^Φ̄(f/λ) <= 1}` by bisection; `∞` when no λ up to the
/// doubling limit works.
pub fn luxemburg_norm_of_samples(phi: &OrliczVector, s: &Samples, tol: f64) -> Result<ExtendedReal> {
    check_arity(phi.len(), s.dim())?;
    if s.is_zero() {
        return Ok(ExtendedReal::Finite(0.0));
    }
    let g = |lambda: f64| {
        mixed_modular_of_samples(phi, &s.scaled(1.0 / lambda))
            .map(ExtendedReal::to_f64)
            .unwrap_or(f64::INFINITY)
    };
    match bisect_monotone(g, 1.0, 1e-8, 1.0, tol) {
        Ok(lambda) => Ok(ExtendedReal::Finite(lambda)),
        Err(Error::Unbracketed { hi, .. }) if g(hi) > 1.0 => Ok(ExtendedReal::Infinity),
        Err(Error::Unbracketed { .. }) => Err(Error::NormUnderflow),
        Err(e) => Err(e),
    }
}

pub fn luxemburg_norm(phi: &OrliczVector, f: &TestFunction, q: &QuadratureSpec, tol: f64) -> Result<ExtendedReal> {
    check_arity(phi.len(), f.arity())?;
    luxemburg_norm_of_samples(phi, &Samples::from_function(f, q), tol)
}

pub fn luxemburg_norm_grid(phi: &OrliczVector, g: &GridFunction, tol: f64) -> Result<ExtendedReal> {
    luxemburg_norm_of_samples(phi, &Samples::from_grid(g), tol)
}

pub const DEFAULT_LUXEMBURG_TOL: f64 = BISECTION_TOL;

/// Outcome of probing `φ(2u)/φ(u)` on a grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Delta2Report {
    pub max_ratio: ExtendedReal,
    /// Ratios strictly increasing across the top decade of the grid.
    pub growth_trend: bool,
    pub satisfied_on_grid: bool,
    /// Closed-form verdict for the family, independent of the grid.
    pub analytic: bool,
}

/// Geometric grid of `per_decade` points per decade on `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let steps = (decades * per_decade as f64).round() as usize;
    (0..=steps).map(|i| lo * 10f64.powf(i as f64 / per_decade as f64)).collect()
}

/// `u` grid used when none is given: 1e-6 to 1e6, ten points per decade.
pub fn default_delta2_grid() -> Vec<f64> {
    geometric_grid(1e-6, 1e6, 10)
}

pub fn delta2_probe(phi: &OrliczFunction, u_grid: &[f64]) -> Result<Delta2Report> {
    let mut ratios = Vec::with_capacity(u_grid.len());
    for &u in u_grid {
        let a = phi.eval(u);
        let b = phi.eval(2.0 * u);
        let r = if a == 0.0 {
            if !phi.is_degenerate() {
                return Err(Error::PositivityViolated { u });
            }
            if b == 0.0 {
                continue;
            }
            f64::INFINITY
        } else if a.is_infinite() {
            1.0
        } else {
            b / a
        };
        ratios.push((u, r));
    }
    let max_ratio = ratios.iter().map(|&(_, r)| r).fold(0.0, f64::max);
    let top = u_grid.last().copied().unwrap_or(1.0) / 10.0;
    let tail: Vec<f64> = ratios.iter().filter(|&&(u, _)| u >= top).map(|&(_, r)| r).collect();
    let growth_trend = tail.len() >= 2 && tail.windows(2).all(|w| w[1] > w[0]) && tail[tail.len() - 1] > tail[0] * (1.0 + 1e-6);
    let max_ratio = ExtendedReal::from_f64(max_ratio);
    Ok(Delta2Report {
        max_ratio,
        growth_trend,
        satisfied_on_grid: max_ratio.is_finite() && !growth_trend,
        analytic: phi.delta2_analytic(),
    })
}

/// `max(0, φ(mean |f|) - mean φ(|f|))` over the support box, using the same
/// quadrature nodes for both means.
pub fn jensen_check(phi: &OrliczFunction, f: &TestFunction, q: &QuadratureSpec) -> Result<f64> {
    let s = Samples::from_function(f, q);
    let volume = f.support().volume();
    let mean = iterated_reduce(&s, |u| u, |_, x| x) / volume;
    let mean_phi = iterated_reduce(&s, |u| phi.eval(u), |_, x| x) / volume;
    Ok((phi.eval(mean) - mean_phi).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{corpus, lookup, BoxDomain, Smoothness};
    use crate::norms::lebesgue::{mixed_lebesgue_norm, ExponentVector};
    use proptest::prelude::*;

    fn scaled_box(c: f64, n: usize) -> TestFunction {
        lookup(&format!("box{n}d")).unwrap().scaled(c)
    }

    fn phi(id: &str) -> OrliczFunction {
        id.parse().unwrap()
    }

    #[test]
    fn scalar_modular_examples() {
        let q = QuadratureSpec::default();
        assert!((modular(&phi("power:2"), &scaled_box(3.0, 1), &q).unwrap().to_f64() - 9.0).abs() < 1e-13);
        assert_eq!(modular(&phi("power:2"), &scaled_box(0.0, 1), &q).unwrap(), ExtendedReal::Finite(0.0));
        assert_eq!(modular(&phi("threshold:1"), &scaled_box(2.0, 1), &q).unwrap(), ExtendedReal::Infinity);
    }

    #[test]
    fn mixed_modular_examples() {
        let q = QuadratureSpec::default();
        let pair = OrliczVector::from_exponents(&[1.0, 2.0]).unwrap();
        let v = mixed_modular(&pair, &scaled_box(1.0, 2), &q).unwrap().to_f64();
        assert!((v - 1.0).abs() < 1e-14);
        let c = 2.5;
        let v = mixed_modular(&"power:1,power:2".parse().unwrap(), &scaled_box(c, 2), &q).unwrap().to_f64();
        assert!((v - c * c).abs() < 1e-13);
        assert_eq!(mixed_modular(&pair, &scaled_box(0.0, 2), &q).unwrap(), ExtendedReal::Finite(0.0));
    }

    #[test]
    fn power_family_matches_mixed_norm() {
        let q = QuadratureSpec::default();
        for (n, p) in [(1, vec![2.0]), (2, vec![1.0, 2.0]), (2, vec![2.0, 3.0]), (3, vec![1.0, 2.0, 3.0])] {
            let pv = ExponentVector::new(p.clone()).unwrap();
            let phis = OrliczVector::from_exponents(&p).unwrap();
            for f in corpus(n).unwrap() {
                let norm = mixed_lebesgue_norm(&f, &pv, &q).unwrap();
                let m = mixed_modular(&phis, &f, &q).unwrap().to_f64();
                assert!((m - norm.powf(pv.last())).abs() <= 1e-8 * m.max(1e-300), "{} {p:?}", f.label());
                let l = luxemburg_norm(&phis, &f, &q, 1e-12).unwrap().to_f64();
                assert!((l - norm).abs() <= 1e-6 * norm, "{}: {l} vs {norm}", f.label());
            }
        }
    }

    #[test]
    fn luxemburg_examples() {
        let q = QuadratureSpec::default();
        let tol = DEFAULT_LUXEMBURG_TOL;
        let l2 = OrliczVector::new(vec![phi("power:2")]).unwrap();
        assert!((luxemburg_norm(&l2, &scaled_box(3.0, 1), &q, tol).unwrap().to_f64() - 3.0).abs() <= tol);
        assert_eq!(luxemburg_norm(&l2, &scaled_box(0.0, 1), &q, tol).unwrap(), ExtendedReal::Finite(0.0));
        let th = OrliczVector::new(vec![phi("threshold:1")]).unwrap();
        assert!((luxemburg_norm(&th, &scaled_box(2.0, 1), &q, tol).unwrap().to_f64() - 2.0).abs() <= tol);
        let hat = OrliczVector::new(vec![phi("power:2")]).unwrap();
        let v = luxemburg_norm(&hat, &lookup("hat1d").unwrap(), &q, tol).unwrap().to_f64();
        assert!((v - (2.0f64 / 3.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn luxemburg_infinite_when_modular_never_small() {
        // a grid whose "measure" is so large that no λ up to 2^60 brings the modular under 1
        let d = BoxDomain::cube(0.0, 1e30, 1).unwrap();
        let g = GridFunction::new(d, 2, vec![1.0, 1.0]).unwrap();
        let l1 = OrliczVector::new(vec![phi("power:1")]).unwrap();
        assert_eq!(luxemburg_norm_grid(&l1, &g, 1e-10).unwrap(), ExtendedReal::Infinity);
    }

    #[test]
    fn norm_definition_consistency() {
        let q = QuadratureSpec::default();
        for ids in ["xloge", "exp:1", "power:3", "expl"] {
            let v = OrliczVector::new(vec![phi(ids)]).unwrap();
            for f in corpus(1).unwrap() {
                let norm = luxemburg_norm(&v, &f, &q, 1e-12).unwrap().to_f64();
                assert!(norm > 0.0);
                let m = mixed_modular(&v, &f.scaled(1.0 / norm), &q).unwrap().to_f64();
                assert!(m <= 1.0 + 1e-8, "{ids} {}: {m}", f.label());
            }
        }
    }

    #[test]
    fn delta2_examples() {
        let grid = default_delta2_grid();
        assert_eq!(grid.len(), 121);
        for p in [1.0, 2.0, 3.5] {
            let r = delta2_probe(&OrliczFunction::power(p).unwrap(), &grid).unwrap();
            assert!(r.satisfied_on_grid && r.analytic);
            assert!((r.max_ratio.to_f64() - 2f64.powf(p)).abs() < 1e-12);
        }
        let e = delta2_probe(&phi("expl"), &grid).unwrap();
        assert!(!e.satisfied_on_grid && !e.analytic);
        let x = delta2_probe(&phi("xloge"), &grid).unwrap();
        assert!(x.satisfied_on_grid);
        assert!(x.max_ratio.to_f64() < 3.0);
        let t = delta2_probe(&phi("threshold:1"), &grid).unwrap();
        assert!(!t.satisfied_on_grid);
        let r = delta2_probe(&phi("relu"), &grid).unwrap();
        assert!(r.max_ratio.to_f64() > 1e3);
    }

    #[test]
    fn growth_trend_on_bounded_grid() {
        // exp(u) - 1 stays finite up to u = 100, but the ratio keeps growing
        let grid = geometric_grid(1e-3, 100.0, 10);
        let r = delta2_probe(&phi("exp:1"), &grid).unwrap();
        assert!(r.max_ratio.is_finite());
        assert!(r.growth_trend && !r.satisfied_on_grid);
    }

    #[test]
    fn parse_ids() {
        for id in ["power:2", "ratio:1.5", "xloge", "exp:1", "expl", "threshold:1", "relu"] {
            assert_eq!(phi(id).id(), id);
        }
        assert!(matches!("nosuch".parse::<OrliczFunction>(), Err(Error::UnknownOrlicz { .. })));
        assert!("power:0.5".parse::<OrliczFunction>().is_err());
        assert!("exp:0.5".parse::<OrliczFunction>().is_err());
        assert!("power".parse::<OrliczFunction>().is_err());
        assert_eq!("power:1,ratio:2".parse::<OrliczVector>().unwrap().len(), 2);
    }

    #[test]
    fn jensen_examples() {
        let q = QuadratureSpec::default();
        let c = lookup("const2d").unwrap().scaled(1.7);
        assert_eq!(jensen_check(&phi("power:2"), &c, &q).unwrap(), 0.0);
        assert!(jensen_check(&phi("power:2"), &lookup("hat1d").unwrap(), &q).unwrap() <= 1e-10);
    }

    const NONDEGENERATE: [&str; 6] = ["power:1", "power:2.5", "ratio:1.5", "xloge", "exp:1", "expl"];

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn jensen_on_piecewise_constant(values in proptest::collection::vec(0.0f64..3.0, 16), which in 0usize..6) {
            let d = BoxDomain::cube(-1.0, 2.0, 1).unwrap();
            let f = TestFunction::piecewise_constant("pc", d, 16, values).unwrap();
            let defect = jensen_check(&phi(NONDEGENERATE[which]), &f, &QuadratureSpec::midpoint(16).unwrap()).unwrap();
            prop_assert!(defect <= 1e-10);
        }

        #[test]
        fn family_axioms(a in 0.0f64..50.0, b in 0.0f64..50.0, t in 0.0f64..1.0, which in 0usize..6) {
            let f = phi(NONDEGENERATE[which]);
            prop_assert_eq!(f.eval(0.0), 0.0);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(f.eval(lo) <= f.eval(hi));
            let mid = t * a + (1.0 - t) * b;
            let chord = t * f.eval(a) + (1.0 - t) * f.eval(b);
            prop_assert!(f.eval(mid) <= chord * (1.0 + 1e-12) + 1e-300);
            if a > 0.0 {
                prop_assert!(f.eval(a) > 0.0);
            }
        }

        #[test]
        fn modular_axioms(i in 0usize..5, j in 0usize..5, g in 0.0f64..1.0, which in 0usize..6, s in 0.1f64..2.0) {
            let q = QuadratureSpec::default();
            let c = corpus(2).unwrap();
            let v = OrliczVector::new(vec![phi(NONDEGENERATE[which]), phi("power:1.5")]).unwrap();
            let f = c[i].scaled(s);
            let h = c[j].scaled(s);
            let m = |x: &TestFunction| mixed_modular(&v, x, &q).unwrap().to_f64();
            prop_assert!((m(&f) - m(&f.scaled(-1.0))).abs() <= 1e-12 * m(&f));
            let combo = f.scaled(g).add(&h.scaled(1.0 - g)).unwrap();
            prop_assert!(m(&combo) <= (m(&f) + m(&h)) * (1.0 + 1e-10) + 1e-12);
            // α ↦ I(αf) nondecreasing
            let mut prev = 0.0;
            for k in 0..8 {
                let cur = m(&f.scaled(0.25 * k as f64));
                prop_assert!(cur >= prev * (1.0 - 1e-12));
                prev = cur;
            }
        }
    }

    #[test]
    fn modular_vanishes_only_for_zero() {
        let v = OrliczVector::new(vec![phi("xloge"), phi("power:2")]).unwrap();
        let d = BoxDomain::cube(0.0, 1.0, 2).unwrap();
        let zero = GridFunction::new(d.clone(), 3, vec![0.0; 9]).unwrap();
        assert_eq!(mixed_modular_grid(&v, &zero).unwrap(), ExtendedReal::Finite(0.0));
        let mut vals = vec![0.0; 9];
        vals[4] = 1e-3;
        let bump = GridFunction::new(d, 3, vals).unwrap();
        assert!(mixed_modular_grid(&v, &bump).unwrap().to_f64() > 0.0);
    }

    #[test]
    fn smoothness_irrelevant_for_modular() {
        let f = TestFunction::new("sq", BoxDomain::cube(0.0, 1.0, 1).unwrap(), Smoothness::Smooth, |x: &[f64]| x[0]);
        let m = modular(&phi("power:2"), &f, &QuadratureSpec::default()).unwrap().to_f64();
        assert!((m - 1.0 / 3.0).abs() < 1e-14);
    }
}
