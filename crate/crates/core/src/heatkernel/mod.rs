//! Scalar heat kernels on the quotient orbifolds, their lift to `X`, and
//! Gaussian bound verification.

pub mod bounds;
pub mod field;
pub mod oracle;
pub mod parametrix;
pub mod revolution;
pub mod sharp;
pub mod successive;

pub use bounds::{verify_bounds, BoundReport};
pub use field::{KernelField, KernelOptions, TransversalKernel};
pub use parametrix::Parametrix;
pub use sharp::{sharp_convolve, SharpQuadrature, SharpResult};
