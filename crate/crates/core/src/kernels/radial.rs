use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{bessel_hankel, bessel_j_scaled, gamma, BESSEL_MAX_ARG};

pub const MAX_RADIAL_DIM: usize = 3;

/// Bochner–Riesz kernel
/// `B(x) = 2^γ Γ(γ+1) (2π)^{-d/2} ‖x‖^{-(d/2+γ)} J_{d/2+γ}(‖x‖)`,
/// whose Fourier transform is `(1 - |ξ|²)_+^γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialKernel {
    gamma: f64,
    dim: usize,
    prefactor: f64,
}

impl RadialKernel {
    pub fn new(gamma_: f64, dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_RADIAL_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !(gamma_.is_finite() && gamma_ > 0.0 && gamma_ <= 40.0) {
            return Err(Error::InvalidArgument(format!(
                "Bochner-Riesz kernel needs 0 < gamma <= 40, got {gamma_}"
            )));
        }
        let prefactor = 2f64.powf(gamma_) * gamma(gamma_ + 1.0) / (2.0 * PI).powf(dim as f64 / 2.0);
        Ok(Self {
            gamma: gamma_,
            dim,
            prefactor,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> f64 {
        self.dim as f64 / 2.0 + self.gamma
    }

    pub fn decay_exponent(&self) -> f64 {
        self.order() + 0.5
    }

    /// `(A, r₀)` with `|B(x)| <= A ‖x‖^{-decay}` for `‖x‖ >= r₀`.
    pub fn envelope(&self) -> (f64, f64) {
        let nu = self.order();
        // |J_ν(r)| <= sqrt(2/(πr)) (1 + small) well past the turning point
        (1.1 * self.prefactor * (2.0 / PI).sqrt(), (2.0 * nu * nu).max(10.0))
    }

    pub fn eval_radius(&self, r: f64) -> f64 {
        let nu = self.order();
        let r = r.abs();
        if r > BESSEL_MAX_ARG {
            self.prefactor * bessel_hankel(nu, r) / r.powf(nu)
        } else {
            // order <= 41.5 and r within range, so this cannot fail
            self.prefactor * bessel_j_scaled(nu, r).expect("argument inside Bessel range")
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.eval_radius(r)
    }

    pub fn id(&self) -> String {
        format!("bochner-riesz:g={},d={}", self.gamma, self.dim)
    }
}

/// Bochner–Riesz evaluation at a point, `dim = x.len()`.
pub fn eval_bochner_riesz(k: &RadialKernel, x: &[f64]) -> Result<f64> {
    if x.len() != k.dim {
        return Err(Error::ArityMismatch {
            expected: k.dim,
            found: x.len(),
        });
    }
    Ok(k.eval(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_1d, Interval, QuadratureSpec};

    #[test]
    fn origin_value() {
        // B(0) = Γ(γ+1) 2^γ / ((2π)^{d/2} 2^ν Γ(ν+1))
        let k = RadialKernel::new(1.0, 1).unwrap();
        let expected = 2.0 / (2.0 * PI).sqrt() / (2f64.powf(1.5) * gamma(2.5));
        assert!((k.eval(&[0.0]) - expected).abs() < 1e-15);
        // ∫ (1-ξ²) dξ / (2π) over [-1,1] = (4/3)/(2π)
        assert!((k.eval(&[0.0]) - 4.0 / 3.0 / (2.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn unit_integral_dim_one() {
        let k = RadialKernel::new(1.0, 1).unwrap();
        let q = QuadratureSpec::default();
        // the tail oscillates like cos(r)/r², so it is O(1/R²)
        let body = 2.0 * integrate_1d(|x| k.eval_radius(x), &Interval::new(0.0, 2000.0).unwrap(), &q).unwrap();
        assert!((body - 1.0).abs() < 1e-5, "{body}");
    }

    #[test]
    fn envelope_holds_at_large_radius() {
        for (g, d) in [(1.0, 1), (1.0, 2), (2.0, 3), (0.5, 1)] {
            let k = RadialKernel::new(g, d).unwrap();
            let (a, r0) = k.envelope();
            for i in 0..5000 {
                let r = r0 + i as f64 * 0.731;
                assert!(k.eval_radius(r).abs() <= a * r.powf(-k.decay_exponent()), "g={g} d={d} r={r}");
            }
            let far = 2e4;
            assert!(k.eval_radius(far).abs() <= a * far.powf(-k.decay_exponent()));
        }
    }

    #[test]
    fn radial_symmetry() {
        let k = RadialKernel::new(1.5, 2).unwrap();
        assert_eq!(k.eval(&[3.0, 4.0]), k.eval(&[5.0, 0.0]));
        assert_eq!(k.eval(&[3.0, 4.0]), k.eval(&[-4.0, 3.0]));
        let k3 = RadialKernel::new(1.0, 3).unwrap();
        assert!((k3.eval(&[1.0, 2.0, 2.0]) - k3.eval(&[0.0, 3.0, 0.0])).abs() < 1e-16);
    }

    #[test]
    fn unsupported_dimension() {
        assert!(matches!(RadialKernel::new(1.0, 4), Err(Error::UnsupportedDimension(4))));
        assert!(RadialKernel::new(0.0, 1).is_err());
        let k = RadialKernel::new(1.0, 2).unwrap();
        assert!(eval_bochner_riesz(&k, &[1.0]).is_err());
    }
}
