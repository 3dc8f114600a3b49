//! Numerical laboratory for the transversal index of S¹-manifolds.
//!
//! Two routes to the same integer are computed on a catalog of model spaces:
//!
//! * the analytic side, a Monte-Carlo Feynman–Kac estimate of the supertrace
//!   of the twisted Dirac heat kernel along Brownian bridges on the quotient
//!   orbifold `M = X/S¹`, and
//! * the geometric side, `(p/2π) ∫_X Â(𝓗) ∧ ch ξ ∧ ω₀` by Chern–Weil quadrature.
//!
//! Module map:
//!
//! | module        | contents                                                        |
//! |---------------|-----------------------------------------------------------------|
//! | [`clifford`]  | spin representations, `D*A`, supertrace, spin exponentials      |
//! | [`geometry`]  | catalog spaces, orbifold charts, distances, transport, twists   |
//! | [`heatkernel`]| parametrix, ♯-convolution, successive approximation, bounds     |
//! | [`stochastic`]| seeded random walks and bridges, Feynman–Kac transport factors |
//! | [`index`]     | Fourier projection, supertrace density, both index sides        |
//! | [`config`]    | experiment configuration shared with the CLI                    |
//!
//! Conventions used everywhere:
//!
//! * Clifford multiplication satisfies `c(v)² = −|v|²`.
//! * The chirality operator is `Γ = i^ℓ c(e₁)…c(e_n)`, so that
//!   `str(c(e₁)…c(e_n)) = (−2i)^ℓ`; for `n = 2`, `str(c(e₁)c(e₂)) = −2i`.
//! * Heat semigroups are generated by `½Δ`; kernels carry the `(2πt)^{-n/2}`
//!   Gaussian prefactor.
//! * Scalar curvature of the round sphere of radius `r` is `2/r²`.
//! * Twist curvature `F` is skew-Hermitian and `ch ξ = rk ξ + (i/2π) tr F + …`.

pub mod clifford;
pub mod config;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod heatkernel;
pub mod index;
pub mod stochastic;

pub use error::{Error, Result};
pub use exec::Exec;

/// Complex scalar used for all spinor/twist fiber arithmetic.
pub type C64 = num_complex::Complex64;
