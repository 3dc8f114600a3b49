//! Brownian paths and bridges on the quotient surface, together with the
//! Feynman–Kac factors carried along them.

pub mod estimates;
pub mod feynman_kac;
pub mod rng;
pub mod transport;
pub mod walk;

pub use estimates::{
    bridge_distance_samples, distance_bound, DistanceSample, DISTANCE_CHECKPOINTS,
};
pub use feynman_kac::{feynman_kac_scalar, feynman_kac_solve, FkEstimate, FkSetup, MeanEstimate};
pub use rng::{PathRng, RandomSource};
pub use transport::{evolve_transport, TransportState};
pub use walk::{exit_time, sample_bridge, sample_path, BridgePath, Fault, PathOptions};
