//! Time–space convolution `(A♯B)(t,x,y) = ∫₀ᵗ ∫_M A(t−s,x,z) B(s,z,y) dz ds`.
//!
//! Time is integrated after the substitution `s = t sin²θ`, which clusters
//! nodes at both ends where one factor concentrates.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::quad::{gauss_legendre, gauss_legendre_on};
use crate::geometry::{Point, Surface};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SharpQuadrature {
    /// Gauss–Legendre nodes in `θ ∈ [0, π/2]`.
    pub time_nodes: usize,
    /// Per-axis order of the surface product rule.
    pub space_order: usize,
    /// Requested absolute accuracy.
    pub tol: f64,
}

impl Default for SharpQuadrature {
    fn default() -> Self {
        SharpQuadrature {
            time_nodes: 16,
            space_order: 24,
            tol: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SharpResult {
    pub value: f64,
    /// Difference against a rule of roughly half the resolution.
    pub error_estimate: f64,
    pub converged: bool,
}

/// `s`-nodes and weights for `∫₀ᵗ ds` under `s = t sin²θ`.
pub fn time_rule(t: f64, n: usize) -> Vec<(f64, f64)> {
    gauss_legendre_on(0.0, 0.5 * PI, n)
        .into_iter()
        .map(|(th, w)| {
            let (s, c) = th.sin_cos();
            (t * s * s, w * 2.0 * t * s * c)
        })
        .collect()
}

fn sharp_raw<A, B>(
    a: &A,
    b: &B,
    surface: &Surface,
    t: f64,
    x: &Point,
    y: &Point,
    nt: usize,
    ns: usize,
) -> f64
where
    A: Fn(f64, &Point, &Point) -> f64,
    B: Fn(f64, &Point, &Point) -> f64,
{
    let space = surface.quadrature(ns);
    let mut total = 0.0;
    for (s, ws) in time_rule(t, nt) {
        if s <= 0.0 || s >= t {
            continue;
        }
        let inner: f64 = space
            .iter()
            .map(|(z, wz)| wz * a(t - s, x, z) * b(s, z, y))
            .sum();
        total += ws * inner;
    }
    total
}

/// Generic ♯ with a fixed product rule over the surface.
pub fn sharp_convolve<A, B>(
    a: A,
    b: B,
    surface: &Surface,
    t: f64,
    x: &Point,
    y: &Point,
    quad: &SharpQuadrature,
) -> Result<SharpResult>
where
    A: Fn(f64, &Point, &Point) -> f64,
    B: Fn(f64, &Point, &Point) -> f64,
{
    if t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    let fine = sharp_raw(&a, &b, surface, t, x, y, quad.time_nodes, quad.space_order);
    let coarse = sharp_raw(
        &a,
        &b,
        surface,
        t,
        x,
        y,
        (quad.time_nodes / 2).max(2),
        (quad.space_order / 2).max(2),
    );
    let err = (fine - coarse).abs();
    Ok(SharpResult {
        value: fine,
        error_estimate: err,
        converged: err <= quad.tol,
    })
}

/// Unit-sphere distance beyond which [`ZonalRule`] doubles its time nodes.
pub const FAR_ZONE: f64 = 2.4;

/// Quadrature for zonal (distance-only) kernels on the unit sphere.
#[derive(Clone, Debug)]
pub struct ZonalRule {
    time: Vec<(f64, f64)>,
    /// Doubled time rule for pairs past [`FAR_ZONE`], where the parametrix
    /// is cut off and the value is carried by the convolution alone.
    time_far: Vec<(f64, f64)>,
    panel: Vec<(f64, f64)>,
    beta: Vec<(f64, f64)>,
}

impl ZonalRule {
    pub fn new(time_nodes: usize, panel_nodes: usize, beta_nodes: usize) -> Self {
        ZonalRule {
            time: gauss_legendre_on(0.0, 0.5 * PI, time_nodes),
            time_far: gauss_legendre_on(0.0, 0.5 * PI, 2 * time_nodes),
            panel: gauss_legendre(panel_nodes),
            beta: gauss_legendre_on(0.0, PI, beta_nodes),
        }
    }

    /// `∫₀ᵗ ds ∫_{S²} a(t−s, d(x,z)) b(s, d(z,y)) dz` for `d = d(x, y)`.
    ///
    /// The polar grid is centred at whichever endpoint carries the more
    /// concentrated factor, with geometrically graded radial panels.
    pub fn convolve<A, B>(&self, a: &A, b: &B, t: f64, d: f64) -> f64
    where
        A: Fn(f64, f64) -> f64,
        B: Fn(f64, f64) -> f64,
    {
        let (sd, cd) = d.sin_cos();
        let mut total = 0.0;
        let time = if d >= FAR_ZONE {
            &self.time_far
        } else {
            &self.time
        };
        for &(th, wth) in time {
            let (sn, cs) = th.sin_cos();
            let s = t * sn * sn;
            let ws = wth * 2.0 * t * sn * cs;
            if s <= 0.0 || s >= t {
                continue;
            }
            let near = s.min(t - s);
            let center_at_x = t - s < s;
            let sigma = near.sqrt();
            let mut lo = 0.0;
            let mut width = 0.75 * sigma;
            let mut inner = 0.0;
            while lo < PI {
                let hi = (lo + width).min(PI);
                let (m, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                for &(xa, wa) in &self.panel {
                    let alpha = m + h * xa;
                    let (sa, ca) = alpha.sin_cos();
                    let local = if center_at_x {
                        a(t - s, alpha)
                    } else {
                        b(s, alpha)
                    };
                    if local == 0.0 {
                        continue;
                    }
                    let mut ring = 0.0;
                    for &(beta, wb) in &self.beta {
                        let cdel = (ca * cd + sa * sd * beta.cos()).clamp(-1.0, 1.0);
                        let delta = cdel.acos();
                        let other = if center_at_x {
                            b(s, delta)
                        } else {
                            a(t - s, delta)
                        };
                        ring += wb * other;
                    }
                    inner += wa * h * sa * local * 2.0 * ring;
                }
                lo = hi;
                if lo > 2.0 * sigma {
                    width *= 2.0;
                }
            }
            total += ws * inner;
        }
        total
    }
}

impl Default for ZonalRule {
    fn default() -> Self {
        ZonalRule::new(24, 8, 48)
    }
}
