//! McKean–Singer index `∫_X str p_X(t,u,u) du` reduced to the principal
//! stratum of `M`.

use std::f64::consts::PI;

use serde::Serialize;

use super::density::{supertrace_density_at, DensityEstimate, IndexSetup};
use crate::error::Result;
use crate::geometry::Point;
use crate::stochastic::RandomSource;

#[derive(Clone, Debug, Serialize)]
pub struct IndexEstimate {
    pub value: f64,
    pub stderr: f64,
    /// Total number of bridges.
    pub n: usize,
    pub t: f64,
    pub density: Vec<DensityEstimate>,
    pub relocated_nodes: usize,
}

/// Moves a node off the singular strata (cone points carry no measure).
fn principal_node(setup: &IndexSetup, x: &Point) -> (Point, bool) {
    if setup.space.is_principal(x) {
        return (*x, false);
    }
    let step = 1e-3 * setup.space.base.injectivity_floor();
    let y = setup.space.base.exp_polar(x, step, 0.3).unwrap_or(*x);
    (y, true)
}

/// Quadrature of `I(t,x)` over `M` with `order` nodes per axis and
/// `paths` bridges in total (split evenly over the nodes).
pub fn mckean_singer_index(
    setup: &IndexSetup,
    t: f64,
    order: usize,
    paths: usize,
    source: RandomSource,
) -> Result<IndexEstimate> {
    let nodes = setup.space.base.quadrature(order);
    let mut per = (paths / nodes.len()).max(2);
    if setup.antithetic {
        per -= per % 2;
    }
    let mut value = 0.0;
    let mut var = 0.0;
    let mut density = Vec::with_capacity(nodes.len());
    let mut relocated = 0;
    for (i, (x, w)) in nodes.iter().enumerate() {
        let (x, moved) = principal_node(setup, x);
        relocated += moved as usize;
        // The fiber integral supplies the orbit length; p_X carries 1/2π.
        let weight = w * setup.space.orbit_length(&x) / (2.0 * PI);
        let d = supertrace_density_at(setup, t, &x, per, (i * per) as u64, source)?;
        value += weight * d.value;
        var += (weight * d.stderr).powi(2);
        density.push(d);
    }
    Ok(IndexEstimate {
        value,
        stderr: var.sqrt(),
        n: per * nodes.len(),
        t,
        density,
        relocated_nodes: relocated,
    })
}
