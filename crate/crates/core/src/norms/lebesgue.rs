//! Mixed-norm Lebesgue norms and mixed sequence norms.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::functions::TestFunction;
use crate::numerics::QuadratureSpec;

use super::tensor::{iterated_reduce, pow, GridFunction, LatticeArray, Samples};

/// `P̄ = (p₁, …, pₙ)` with finite `p_i >= 1`. The standard constructor also
/// requires `p₁ <= … <= pₙ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentVector {
    p: Vec<f64>,
    ordered: bool,
}

impl ExponentVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        let v = Self::unordered(p)?;
        if !v.ordered {
            return Err(Error::InvalidExponents(format!(
                "exponents must be non-decreasing, got {v}"
            )));
        }
        Ok(v)
    }

    /// Accepts any order; only norm evaluation is meaningful for such vectors.
    pub fn unordered(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidExponents("at least one exponent is required".into()));
        }
        if let Some(bad) = p.iter().find(|&&x| !(x.is_finite() && x >= 1.0)) {
            return Err(Error::InvalidExponents(format!(
                "exponents must be finite and >= 1, got {bad}"
            )));
        }
        let ordered = p.windows(2).all(|w| w[0] <= w[1]);
        Ok(Self { p, ordered })
    }

    /// Like [`FromStr`], without the order requirement.
    pub fn parse_unordered(s: &str) -> Result<Self> {
        Self::unordered(parse_list(s)?)
    }

    /// `(p, …, p)` of length `n`.
    pub fn constant(p: f64, n: usize) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn last(&self) -> f64 {
        self.p[self.p.len() - 1]
    }

    pub fn is_ordered(&self) -> bool {
        self.ordered
    }

    /// Error unless non-decreasing; used by every bound check.
    pub fn require_ordered(&self) -> Result<()> {
        if self.ordered {
            Ok(())
        } else {
            Err(Error::InvalidExponents(format!(
                "bound checks need non-decreasing exponents, got {self}"
            )))
        }
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.p.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Parses `"1,2"` or `"(1, 2)"`, enforcing the order.
impl FromStr for ExponentVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(parse_list(s)?)
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidExponents(format!("cannot parse exponent '{}'", x.trim())))
        })
        .collect()
}

fn check_arity(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::ArityMismatch { expected, found })
    }
}

/// `(Σ_n w (… (Σ_1 w |a|^{p₁})^{p₂/p₁} …))^{1/pₙ}` for weighted samples.
pub fn mixed_norm_of_samples(s: &Samples, p: &ExponentVector) -> Result<f64> {
    check_arity(p.len(), s.dim())?;
    let pv = p.as_slice();
    let first = pv[0];
    let total = iterated_reduce(
        s,
        |x| pow(x, first),
        |axis, x| if axis == 0 { x } else { pow(x, pv[axis] / pv[axis - 1]) },
    );
    Ok(total.powf(1.0 / p.last()))
}

/// `‖f‖_P̄` by iterated quadrature over the support box, innermost axis
/// first.
pub fn mixed_lebesgue_norm(f: &TestFunction, p: &ExponentVector, q: &QuadratureSpec) -> Result<f64> {
    check_arity(p.len(), f.arity())?;
    mixed_norm_of_samples(&Samples::from_function(f, q), p)
}

/// `‖g‖_P̄` of grid values with trapezoid weights.
pub fn mixed_lebesgue_norm_grid(g: &GridFunction, p: &ExponentVector) -> Result<f64> {
    check_arity(p.len(), g.dim())?;
    mixed_norm_of_samples(&Samples::from_grid(g), p)
}

/// `‖a‖_{ℓ^P̄_w}`: every level of the nested sum carries a factor `1/w`.
pub fn weighted_sequence_norm(a: &LatticeArray, p: &ExponentVector, w: f64) -> Result<f64> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::InvalidArgument(format!("w must be positive, got {w}")));
    }
    check_arity(p.len(), a.dim())?;
    mixed_norm_of_samples(&Samples::from_lattice(a, w), p)
}

/// `‖a‖_{ℓ^P̄}`.
pub fn sequence_norm(a: &LatticeArray, p: &ExponentVector) -> Result<f64> {
    weighted_sequence_norm(a, p, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{corpus, lookup, sep_factor, BoxDomain, Smoothness, SEP_SCALE};
    use crate::numerics::{integrate_1d, integrate_box, Interval};
    use proptest::prelude::*;

    fn ev(p: &[f64]) -> ExponentVector {
        ExponentVector::new(p.to_vec()).unwrap()
    }

    fn indicator(hi0: f64, hi1: f64) -> TestFunction {
        let d = BoxDomain::new(vec![Interval::new(0.0, hi0).unwrap(), Interval::new(0.0, hi1).unwrap()]).unwrap();
        TestFunction::new("ind", d, Smoothness::Discontinuous, |_| 1.0)
    }

    #[test]
    fn exponent_vector_rules() {
        assert!(ExponentVector::new(vec![1.0, 2.0]).is_ok());
        assert!(ExponentVector::new(vec![2.0, 1.0]).is_err());
        assert!(!ExponentVector::unordered(vec![2.0, 1.0]).unwrap().is_ordered());
        assert!(ExponentVector::new(vec![0.5]).is_err());
        assert!(ExponentVector::new(vec![f64::INFINITY]).is_err());
        assert!(ExponentVector::new(vec![]).is_err());
        assert_eq!("1, 2".parse::<ExponentVector>().unwrap(), ev(&[1.0, 2.0]));
        assert_eq!("(1,2,3)".parse::<ExponentVector>().unwrap().to_string(), "(1,2,3)");
        let err = "2,1".parse::<ExponentVector>().unwrap_err();
        assert!(err.to_string().contains("non-decreasing"));
    }

    #[test]
    fn indicator_examples() {
        let q = QuadratureSpec::default();
        let a = mixed_lebesgue_norm(&indicator(1.0, 1.0), &ev(&[1.0, 2.0]), &q).unwrap();
        assert!((a - 1.0).abs() < 1e-14);
        let b = mixed_lebesgue_norm(&indicator(2.0, 1.0), &ev(&[1.0, 2.0]), &q).unwrap();
        assert!((b - 2.0).abs() < 1e-14);
        assert!(mixed_lebesgue_norm(&indicator(1.0, 1.0), &ev(&[1.0]), &q).is_err());
    }

    #[test]
    fn sequence_examples() {
        let unit = LatticeArray::new(vec![0, 0], vec![1, 1], vec![1.0]).unwrap();
        assert!((weighted_sequence_norm(&unit, &ev(&[1.0, 1.0]), 2.0).unwrap() - 0.25).abs() < 1e-15);
        for p in [[1.0, 1.0], [1.0, 3.0], [2.5, 4.0]] {
            assert!((weighted_sequence_norm(&unit, &ev(&p), 1.0).unwrap() - 1.0).abs() < 1e-15);
        }
        let pair = LatticeArray::new(vec![0], vec![2], vec![3.0, 4.0]).unwrap();
        assert!((sequence_norm(&pair, &ev(&[2.0])).unwrap() - 5.0).abs() < 1e-14);
        let ones = LatticeArray::new(vec![0, 0], vec![2, 2], vec![1.0; 4]).unwrap();
        assert!((sequence_norm(&ones, &ev(&[1.0, 2.0])).unwrap() - 8f64.sqrt()).abs() < 1e-14);
        let doubled = ones.map(|v| 2.0 * v);
        assert!((sequence_norm(&doubled, &ev(&[1.0, 2.0])).unwrap() - 2.0 * 8f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn hat_l2_norm() {
        let v = mixed_lebesgue_norm(&lookup("hat1d").unwrap(), &ev(&[2.0]), &QuadratureSpec::default()).unwrap();
        assert!((v - (2.0f64 / 3.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn constant_exponent_matches_direct_quadrature() {
        let q = QuadratureSpec::default();
        for n in 1..=3 {
            for f in corpus(n).unwrap() {
                for p in [1.0, 2.0, 3.5] {
                    let mixed = mixed_lebesgue_norm(&f, &ExponentVector::constant(p, n).unwrap(), &q).unwrap();
                    let direct = integrate_box(|x| f.eval(x).abs().powf(p), f.support().axes(), &q)
                        .unwrap()
                        .powf(1.0 / p);
                    assert!((mixed - direct).abs() <= 1e-12 * direct, "{} p={p}", f.label());
                }
            }
        }
    }

    #[test]
    fn separable_factorisation() {
        // ‖c ∏ g_i‖_P̄ = c ∏ ‖g_i‖_{p_i}, each factor by its own 1-D quadrature
        let q = QuadratureSpec::default().with_cells_per_unit(32);
        let unit = Interval::symmetric(1.0).unwrap();
        for (n, p) in [(2, vec![1.0, 2.0]), (2, vec![2.0, 2.0]), (3, vec![1.0, 2.0, 3.0]), (3, vec![1.5, 1.5, 4.0])] {
            let f = lookup(&format!("sep{n}d")).unwrap();
            let oracle: f64 = SEP_SCALE
                * (0..n)
                    .map(|i| {
                        integrate_1d(|t| sep_factor(i, t).powf(p[i]), &unit, &q).unwrap().powf(1.0 / p[i])
                    })
                    .product::<f64>();
            let v = mixed_lebesgue_norm(&f, &ev(&p), &QuadratureSpec::default()).unwrap();
            assert!((v - oracle).abs() <= 1e-8 * oracle, "n={n} {p:?}: {v} vs {oracle}");
        }
    }

    #[test]
    fn grid_norm_converges_to_quadrature() {
        let f = lookup("bump2d").unwrap();
        let p = ev(&[1.0, 2.0]);
        let exact = mixed_lebesgue_norm(&f, &p, &QuadratureSpec::default()).unwrap();
        let g = GridFunction::sample(&f, f.support(), 513).unwrap();
        let approx = mixed_lebesgue_norm_grid(&g, &p).unwrap();
        assert!((approx - exact).abs() < 1e-6 * exact);
    }

    proptest! {
        #[test]
        fn homogeneity(c in -5.0f64..5.0, p1 in 1.0f64..3.0, dp in 0.0f64..2.0) {
            let f = lookup("sep2d").unwrap();
            let p = ev(&[p1, p1 + dp]);
            let q = QuadratureSpec::default();
            let a = mixed_lebesgue_norm(&f.scaled(c), &p, &q).unwrap();
            let b = mixed_lebesgue_norm(&f, &p, &q).unwrap();
            prop_assert!((a - c.abs() * b).abs() <= 1e-12 * (1.0 + a));
        }

        #[test]
        fn triangle_inequality(i in 0usize..5, j in 0usize..5, a in -2.0f64..2.0, p1 in 1.0f64..3.0, dp in 0.0f64..2.0) {
            let c = corpus(2).unwrap();
            let f = c[i].scaled(a);
            let g = &c[j];
            let p = ev(&[p1, p1 + dp]);
            let q = QuadratureSpec::default();
            let sum = f.add(g).unwrap();
            let lhs = mixed_lebesgue_norm(&sum, &p, &q).unwrap();
            let rhs = mixed_lebesgue_norm(&f, &p, &q).unwrap() + mixed_lebesgue_norm(g, &p, &q).unwrap();
            prop_assert!(lhs <= rhs + 1e-9);
        }

        #[test]
        fn monotone_on_grids(seed in proptest::collection::vec(0.0f64..1.0, 25), p1 in 1.0f64..3.0, dp in 0.0f64..2.0) {
            let d = BoxDomain::cube(0.0, 1.0, 2).unwrap();
            let g = GridFunction::new(d.clone(), 5, seed.clone()).unwrap();
            let bigger = GridFunction::new(d, 5, seed.iter().map(|v| v + 0.1 * v * v).collect()).unwrap();
            let p = ev(&[p1, p1 + dp]);
            prop_assert!(mixed_lebesgue_norm_grid(&g, &p).unwrap() <= mixed_lebesgue_norm_grid(&bigger, &p).unwrap() + 1e-12);
        }
    }
}
