//! Both sides of the index theorem: the Monte-Carlo McKean–Singer supertrace
//! and the Chern–Weil integral, with Fourier components along the action.

pub mod density;
pub mod fourier;
pub mod geometric;
pub mod mckean;
pub mod report;
pub mod symmetry;

pub use density::{
    supertrace_density, supertrace_density_at, DensityEstimate, Estimator, IndexSetup,
};
pub use fourier::{descended_degree, descended_twist, FourierProjector};
pub use geometric::{chern_weil_forms, geometric_index, index_density_m, ChernWeil};
pub use mckean::{mckean_singer_index, IndexEstimate};
pub use report::{IndexReport, Verdict};
pub use symmetry::{kernel_symmetry_check, Section, SymmetryReport};
