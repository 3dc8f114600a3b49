//! Chern–Weil side: `(p/2π)∫_X Â(𝓗) ∧ ch ξ ∧ ω₀` and the densities `I_m`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::geometry::{Point, SOneSpace, TwistBundle};

/// Descended curvature forms at a point of `M`, as coefficients of the area
/// form (degree 2) or scalars (degree 0).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChernWeil {
    pub ahat0: f64,
    /// `Â` has no degree-2 part on a surface.
    pub ahat2: f64,
    pub ch0: f64,
    pub ch2: f64,
    /// `dω₀` against the area form.
    pub domega0: f64,
}

pub fn chern_weil_forms(space: &SOneSpace, twist: &TwistBundle, x: &Point) -> ChernWeil {
    ChernWeil {
        ahat0: 1.0,
        ahat2: 0.0,
        ch0: twist.rank() as f64,
        ch2: twist.ch2(x),
        domega0: space.contact_curvature(x),
    }
}

impl ChernWeil {
    /// Top-degree part of `Â ∧ ch ξ ∧ e^{−m dω₀/2π}`.
    pub fn top(&self, m: i64) -> f64 {
        let e2 = -(m as f64) * self.domega0 / (2.0 * PI);
        self.ahat0 * self.ch2 + self.ahat2 * self.ch0 + self.ahat0 * self.ch0 * e2
    }
}

/// Default base quadrature order for the geometric side.
pub const DEFAULT_ORDER: usize = 24;

/// `I_m` integrated over `X`; zero unless `p | m`.
pub fn index_density_m(space: &SOneSpace, twist: &TwistBundle, m: i64, order: usize) -> f64 {
    let p = space.p as i64;
    if m.rem_euclid(p) != 0 {
        return 0.0;
    }
    // The fiber integral of ω₀ over a principal orbit is its length 2π/p.
    let pref = space.p as f64 / (2.0 * PI);
    space
        .base
        .quadrature(order)
        .iter()
        .map(|(x, w)| w * space.orbit_length(x) * chern_weil_forms(space, twist, x).top(m))
        .sum::<f64>()
        * pref
}

pub fn geometric_index(space: &SOneSpace, twist: &TwistBundle, order: usize) -> f64 {
    index_density_m(space, twist, 0, order)
}
