//! Orbifold charts `(Ũ, G, π)` for the catalog surfaces.
//!
//! Every chart lifts points of `M` to a round or flat cover `Ũ` on which a
//! finite cyclic group acts by rotations (or trivially). Distances in `Ũ` are
//! closed-form, so orbifold distances reduce to a minimum over `|G|` images.

use std::f64::consts::PI;

use serde::Serialize;

use super::surface::{from_sph, unit_angle, Point, Surface, Vec3};
use crate::error::{Error, Result};

/// Smooth radial bump: `1` for `d ≤ inner`, `0` for `d ≥ outer`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bump {
    pub inner: f64,
    pub outer: f64,
}

impl Bump {
    pub fn new(inner: f64, outer: f64) -> Self {
        Bump { inner, outer }
    }

    /// `1 − h(s)` with the C^∞ transition `h(s) = e^{−1/s}/(e^{−1/s} + e^{−1/(1−s)})`.
    pub fn eval(&self, d: f64) -> f64 {
        self.eval_with_derivs(d).0
    }

    /// Value and first two derivatives in `d`.
    pub fn eval_with_derivs(&self, d: f64) -> (f64, f64, f64) {
        if d <= self.inner {
            return (1.0, 0.0, 0.0);
        }
        if d >= self.outer {
            return (0.0, 0.0, 0.0);
        }
        let w = self.outer - self.inner;
        let s = (d - self.inner) / w;
        // a = e^{-1/s}, b = e^{-1/(1-s)}, h = a/(a+b)
        let g = |s: f64| (-1.0 / s).exp();
        let dg = |s: f64| (-1.0 / s).exp() / (s * s);
        let ddg = |s: f64| (-1.0 / s).exp() * (1.0 - 2.0 * s) / s.powi(4);
        let (a, da, dda) = (g(s), dg(s), ddg(s));
        let (b, db, ddb) = (g(1.0 - s), -dg(1.0 - s), ddg(1.0 - s));
        let den = a + b;
        let h = a / den;
        let num = da * b - a * db;
        let dh = num / (den * den);
        let ddh = ((dda * b - a * ddb) * den - 2.0 * num * (da + db)) / den.powi(3);
        (1.0 - h, -dh / w, -ddh / (w * w))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartCover {
    /// `ℝ²` modulo the torus lattice (or `ℝ` modulo the circle length).
    Flat,
    /// Round sphere of the given radius; points of `M` are already unit vectors.
    Sphere { radius: f64 },
    /// Round unit cap over a surface of revolution `(r, φ) ↦ (r, φ/q)`.
    RevolutionCap { q: u32 },
    /// Chart without a closed-form distance (middle of the teardrop).
    Opaque,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbifoldChart {
    pub name: &'static str,
    /// Center of the chart as a point of `M`.
    pub center: Point,
    /// Domain radius around the center.
    pub radius: f64,
    /// Order of the cyclic group `G_α` (rotations about the chart axis).
    pub group_order: u32,
    pub cover: ChartCover,
    /// Cut-off `ψ_α` around the center.
    pub psi: Bump,
    /// Near-point radius `ε_α`.
    pub near_radius: f64,
}

fn rot_z(angle: f64, v: &Vec3) -> Vec3 {
    let (s, c) = angle.sin_cos();
    Vec3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z)
}

impl OrbifoldChart {
    /// Lifts a point of `M` to the cover `Ũ`.
    pub fn lift(&self, x: &Point) -> Vec3 {
        match self.cover {
            ChartCover::RevolutionCap { q } => {
                let r = if self.center.x > 1.0 { PI - x.x } else { x.x };
                from_sph(r, x.y / q as f64)
            }
            _ => *x,
        }
    }

    /// The group `G_α` applied to a lifted point.
    pub fn act(&self, j: u32, v: &Vec3) -> Vec3 {
        if self.group_order <= 1 {
            return *v;
        }
        match self.cover {
            ChartCover::Flat | ChartCover::Opaque => *v,
            _ => {
                let axis_flip = if self.lift(&self.center).z < 0.0 {
                    -1.0
                } else {
                    1.0
                };
                rot_z(axis_flip * 2.0 * PI * j as f64 / self.group_order as f64, v)
            }
        }
    }

    /// Geodesic distance in `Ũ`.
    pub fn cover_distance(&self, a: &Vec3, b: &Vec3, surface: &Surface) -> Result<f64> {
        match self.cover {
            ChartCover::Flat => Ok(surface.cover_distance(a, b)),
            ChartCover::Sphere { radius } => Ok(radius * unit_angle(a, b)),
            ChartCover::RevolutionCap { .. } => Ok(unit_angle(a, b)),
            ChartCover::Opaque => Err(Error::Unsupported(
                "chart distance",
                "an opaque chart".into(),
            )),
        }
    }

    fn check_domain(&self, x: &Point, surface: &Surface) -> Result<()> {
        let c = self.lift(&self.center);
        let d = self.cover_distance(&c, &self.lift(x), surface)?;
        if d > self.radius + 1e-12 {
            return Err(Error::OutsideChart {
                distance: d,
                radius: self.radius,
            });
        }
        Ok(())
    }

    /// `min_γ d_Ũ(x̃, γỹ)` together with the minimizing group index `γ₀`
    /// (the lowest index among ties).
    pub fn orbifold_distance(&self, x: &Point, y: &Point, surface: &Surface) -> Result<(f64, u32)> {
        self.check_domain(x, surface)?;
        self.check_domain(y, surface)?;
        let (xt, yt) = (self.lift(x), self.lift(y));
        let mut best = (f64::INFINITY, 0);
        for j in 0..self.group_order.max(1) {
            let d = self.cover_distance(&xt, &self.act(j, &yt), surface)?;
            if d < best.0 - 1e-13 {
                best = (d, j);
            }
        }
        Ok(best)
    }

    pub fn contains(&self, x: &Point, surface: &Surface) -> bool {
        self.check_domain(x, surface).is_ok()
    }
}

/// Atlas of a catalog surface together with its partition of unity.
pub fn atlas(surface: &Surface) -> Vec<OrbifoldChart> {
    let floor = surface.injectivity_floor();
    match *surface {
        Surface::Circle { .. } | Surface::Torus { .. } => vec![OrbifoldChart {
            name: "closure",
            center: Vec3::zeros(),
            radius: f64::INFINITY,
            group_order: 1,
            cover: ChartCover::Flat,
            psi: Bump::new(f64::INFINITY, f64::INFINITY),
            near_radius: 0.25 * floor,
        }],
        Surface::Sphere { radius, q } => {
            let mut v = vec![OrbifoldChart {
                name: "closure",
                center: Vec3::z(),
                radius: PI * radius,
                group_order: q,
                cover: ChartCover::Sphere { radius },
                psi: Bump::new(f64::INFINITY, f64::INFINITY),
                near_radius: 0.25 * floor,
            }];
            if q > 1 {
                for (name, c) in [("north-cone", Vec3::z()), ("south-cone", -Vec3::z())] {
                    v.push(OrbifoldChart {
                        name,
                        center: c,
                        radius: 0.5 * PI * radius,
                        group_order: q,
                        cover: ChartCover::Sphere { radius },
                        psi: Bump::new(0.3 * PI * radius, 0.45 * PI * radius),
                        near_radius: 0.25 * floor,
                    });
                }
            }
            v
        }
        Surface::Revolution(rev) => {
            let a = rev.north_cap();
            let b = rev.south_cap();
            vec![
                OrbifoldChart {
                    name: "cone",
                    center: Vec3::zeros(),
                    radius: a,
                    group_order: rev.q,
                    cover: ChartCover::RevolutionCap { q: rev.q },
                    psi: Bump::new(0.5 * a, 0.9 * a),
                    near_radius: 0.25 * floor,
                },
                OrbifoldChart {
                    name: "belt",
                    center: Vec3::new(0.5 * (a + b), 0.0, 0.0),
                    radius: 0.5 * (b - a) + 0.3,
                    group_order: 1,
                    cover: ChartCover::Opaque,
                    psi: Bump::new(0.5 * (b - a), 0.5 * (b - a) + 0.25),
                    near_radius: 0.25 * floor,
                },
                OrbifoldChart {
                    name: "south-cap",
                    center: Vec3::new(PI, 0.0, 0.0),
                    radius: PI - b,
                    group_order: 1,
                    cover: ChartCover::RevolutionCap { q: 1 },
                    psi: Bump::new(0.5 * (PI - b), 0.9 * (PI - b)),
                    near_radius: 0.25 * floor,
                },
            ]
        }
    }
}

/// Partition of unity `ρ_α` subordinate to [`atlas`], evaluated at `x`.
pub fn partition_of_unity(surface: &Surface, x: &Point) -> Vec<f64> {
    match *surface {
        Surface::Sphere { radius, q } if q > 1 => {
            // closure chart gets nothing; the two cone charts split at the equator
            let theta = x.z.clamp(-1.0, 1.0).acos() * radius;
            let w = Bump::new(0.4 * PI * radius, 0.6 * PI * radius).eval(theta);
            vec![0.0, w, 1.0 - w]
        }
        Surface::Revolution(rev) => {
            let a = rev.north_cap();
            let b = rev.south_cap();
            let north = Bump::new(0.6 * a, 0.95 * a).eval(x.x);
            let south = 1.0 - Bump::new(b + 0.05 * (PI - b), b + 0.4 * (PI - b)).eval(x.x);
            vec![north, 1.0 - north - south, south]
        }
        _ => vec![1.0],
    }
}
