//! Reconstruction kernels: univariate families, tensor products, the
//! Bochner–Riesz kernel, and numerical checks of the partition-of-unity,
//! moment and Fourier conditions.

mod conditions;
mod product;
mod radial;
mod registry;
mod univariate;

pub use conditions::{
    absolute_moment, fourier_criterion_defect, fourier_transform, kernel_fourier_defect, kernel_l1_norm,
    lattice_sum, partition_of_unity_defect, partition_of_unity_defect_on_grid,
    radial_fourier_criterion_defect, univariate_l1_norm, ProbeGrid, DEFAULT_KMAX,
    DEFAULT_PROBES, FOURIER_RADIUS,
};
pub use product::ProductKernel;
pub use radial::{eval_bochner_riesz, RadialKernel, MAX_RADIAL_DIM};
pub use registry::{parse_kernel, parse_univariate, KNOWN_KERNELS};
pub use univariate::{
    eval_bspline, eval_fejer, eval_jackson, jackson_normalization, Envelope, Family,
    UnivariateKernel, MAX_BSPLINE_ORDER, MAX_JACKSON_M,
};

use crate::error::{Error, Result};

/// A multivariate kernel on `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub enum Kernel {
    Product(ProductKernel),
    Radial(RadialKernel),
}

impl Kernel {
    pub fn dim(&self) -> usize {
        match self {
            Kernel::Product(k) => k.dim(),
            Kernel::Radial(k) => k.dim(),
        }
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        match self {
            Kernel::Product(k) => k.eval(u),
            Kernel::Radial(k) => k.eval(u),
        }
    }

    pub fn id(&self) -> String {
        match self {
            Kernel::Product(k) => k.id(),
            Kernel::Radial(k) => k.id(),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            Kernel::Product(k) => k.is_nonnegative(),
            Kernel::Radial(_) => false,
        }
    }

    pub fn as_product(&self) -> Option<&ProductKernel> {
        match self {
            Kernel::Product(k) => Some(k),
            Kernel::Radial(_) => None,
        }
    }

    /// The sampling operators are implemented for tensor-product kernels only.
    pub fn into_product(self) -> Result<ProductKernel> {
        match self {
            Kernel::Product(k) => Ok(k),
            Kernel::Radial(k) => Err(Error::InvalidArgument(format!(
                "'{}' is not a tensor-product kernel; the sampling operators need one",
                k.id()
            ))),
        }
    }

    /// Lattice radius per axis for sums `Σ_k χ(u - k)` with `u ∈ [0,1)^n`.
    pub fn lattice_radii(&self, trunc: &TruncationPolicy) -> Vec<usize> {
        match self {
            Kernel::Product(k) => k.factors().iter().map(|f| trunc.lattice_radius(f)).collect(),
            Kernel::Radial(k) => vec![trunc.radius_terms(); k.dim()],
        }
    }
}

impl From<ProductKernel> for Kernel {
    fn from(k: ProductKernel) -> Self {
        Kernel::Product(k)
    }
}

impl From<RadialKernel> for Kernel {
    fn from(k: RadialKernel) -> Self {
        Kernel::Radial(k)
    }
}

/// Cut-off for the infinite lattice sums.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    radius_terms: usize,
    tail_tolerance: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            radius_terms: 512,
            tail_tolerance: 1e-3,
        }
    }
}

/// Budget for the envelope bound on the partition tail when choosing a
/// certification radius; leaves headroom under a 1e-6 defect target.
const CERTIFY_TAIL: f64 = 8e-7;
const MAX_CERTIFY_RADIUS: usize = 1 << 22;

impl TruncationPolicy {
    pub fn new(radius_terms: usize, tail_tolerance: f64) -> Result<Self> {
        if radius_terms == 0 || !(tail_tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "truncation needs radius >= 1 and tolerance > 0, got {radius_terms}, {tail_tolerance}"
            )));
        }
        Ok(Self {
            radius_terms,
            tail_tolerance,
        })
    }

    pub fn radius_terms(&self) -> usize {
        self.radius_terms
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    pub fn with_radius(&self, radius_terms: usize) -> Self {
        Self {
            radius_terms: radius_terms.max(1),
            ..*self
        }
    }

    /// Lattice radius of one axis for `u ∈ [0,1)`: every nonzero term for
    /// compact kernels, `radius_terms` otherwise.
    pub fn lattice_radius(&self, k: &UnivariateKernel) -> usize {
        match k.support_radius() {
            Some(s) => s.ceil() as usize + 1,
            None => self.radius_terms,
        }
    }

    /// Cut-off `R` for `|wx - k| <= R` in the operators: the exact support
    /// radius, or where the decay envelope integrates below `tail_tolerance`
    /// (capped at `radius_terms`).
    pub fn effective_radius(&self, k: &UnivariateKernel) -> f64 {
        match (k.support_radius(), k.envelope()) {
            (Some(s), _) => s,
            (None, Some(e)) => e.radius_for(self.tail_tolerance).min(self.radius_terms as f64),
            (None, None) => self.radius_terms as f64,
        }
    }

    /// Policy used for certification of `k`, see [`certification_radius`].
    pub fn certifying(k: &Kernel) -> Self {
        let radius = match k {
            Kernel::Product(p) => p.factors().iter().map(certification_radius).max().unwrap_or(1),
            Kernel::Radial(r) => match r.dim() {
                1 => 4096,
                2 => 128,
                _ => 32,
            },
        };
        Self::default().with_radius(radius)
    }
}

/// Documented lattice radius for certifying a univariate family: the exact
/// support for compact kernels; otherwise the smallest power of two (at
/// least 512) for which the envelope bounds the lattice tail by 8e-7.
/// Fejér lands on 2^19, Jackson(1,2) on 512.
pub fn certification_radius(k: &UnivariateKernel) -> usize {
    if k.support().is_some() {
        return TruncationPolicy::default().lattice_radius(k);
    }
    let Some(env) = k.envelope().filter(|e| e.exponent > 1.0) else {
        return TruncationPolicy::default().radius_terms();
    };
    let mut r = 512usize;
    while r < MAX_CERTIFY_RADIUS && env.tail_mass((r - 1) as f64) > CERTIFY_TAIL {
        r *= 2;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certification_radii() {
        assert_eq!(certification_radius(&UnivariateKernel::fejer()), 1 << 19);
        assert_eq!(certification_radius(&UnivariateKernel::jackson(1.0, 2).unwrap()), 512);
        assert_eq!(certification_radius(&UnivariateKernel::bspline(3).unwrap()), 3);
    }

    #[test]
    fn effective_radius() {
        let t = TruncationPolicy::default();
        assert_eq!(t.effective_radius(&UnivariateKernel::bspline(4).unwrap()), 2.0);
        let r = t.effective_radius(&UnivariateKernel::fejer());
        // 2·(2/π²)/R = 1e-3
        assert!((r - 4000.0 / std::f64::consts::PI.powi(2)).abs() < 1e-9);
        let tight = TruncationPolicy::new(64, 1e-3).unwrap();
        assert_eq!(tight.effective_radius(&UnivariateKernel::fejer()), 64.0);
    }

    #[test]
    fn policy_validation() {
        assert!(TruncationPolicy::new(0, 1e-3).is_err());
        assert!(TruncationPolicy::new(4, 0.0).is_err());
        assert!(TruncationPolicy::new(4, f64::NAN).is_err());
    }

    #[test]
    fn radial_is_not_a_product() {
        let k: Kernel = RadialKernel::new(1.0, 1).unwrap().into();
        assert!(k.clone().into_product().is_err());
        assert!(k.as_product().is_none());
    }
}
