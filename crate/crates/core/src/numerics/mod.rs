//! Shared numerical primitives: composite quadrature, root bracketing and
//! special functions. Everything here is a pure function of its inputs.

mod quadrature;
mod roots;
mod special;

pub use quadrature::{
    gauss_legendre_reference, integrate_1d, integrate_box, Interval, QuadratureSpec, Rule,
    MAX_GAUSS_ORDER,
};
pub use roots::{bisect_monotone, DEFAULT_TOL as BISECTION_TOL};
pub(crate) use special::bessel_hankel;
pub use special::{bessel_j, bessel_j_scaled, binomial, sinc, BESSEL_MAX_ARG, BESSEL_MAX_ORDER};
pub use statrs::function::gamma::gamma;
