//! Mixed Lebesgue norms, weighted lattice norms and Orlicz modulars.
//!
//! All of them are iterated reductions over tensor samples: axis 0 is
//! integrated first, the last axis last.

mod lebesgue;
mod orlicz;
mod tensor;

pub use lebesgue::{
    mixed_lebesgue_norm, mixed_lebesgue_norm_grid, mixed_norm_of_samples, sequence_norm, weighted_sequence_norm,
    ExponentVector,
};
pub use orlicz::{
    default_delta2_grid, delta2_probe, geometric_grid, jensen_check, luxemburg_norm, luxemburg_norm_grid,
    luxemburg_norm_of_samples, mixed_modular, mixed_modular_grid, mixed_modular_of_samples, modular, Delta2Report,
    ExtendedReal, OrliczFamily, OrliczFunction, OrliczVector, DEFAULT_LUXEMBURG_TOL, KNOWN_ORLICZ,
};
pub(crate) use tensor::eval_tensor;
pub use tensor::{GridFunction, LatticeArray, Samples};
