pub mod error;
pub mod functions;
pub mod kernels;
pub mod norms;
pub mod numerics;
pub mod experiments;
pub mod operators;

pub use error::{Error, Result};
