//! Closed-form model surfaces: the quotient orbifolds `M` of the catalog.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Point of `M` in model coordinates.
///
/// * circle: `(x, 0, 0)`
/// * torus: `(x, y, 0)`, any representative (lattice images are handled by
///   every consumer, so walks may keep unwrapped coordinates)
/// * sphere / football: unit vector; the metric is scaled by the radius
/// * surface of revolution: `(r, φ, 0)` with `r ∈ [0, π]`
pub type Point = Vec3;

/// Orthonormal frame, stored as ambient vectors.
pub type Frame = [Vec3; 2];

/// Profile `f(r)` of the teardrop metric `dr² + f(r)² dφ²` on `r ∈ [0, π]`.
///
/// `f = sin(r)·w(r)` where `w` climbs from `1/q` (cone of angle `2π/q` at
/// `r = 0`) to `1` (smooth round cap at `r = π`) through a quintic smoothstep
/// on `[a, b]`. Both caps outside `[a, b]` are exactly round.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Revolution {
    pub q: u32,
    pub a: f64,
    pub b: f64,
}

impl Revolution {
    pub fn teardrop(q: u32) -> Self {
        Revolution { q, a: 0.9, b: 2.2 }
    }

    /// Rotationally symmetric quotient `S²/Z_q`, used to cross-check the
    /// revolution solver against the image-sum football kernel.
    pub fn football(q: u32) -> Self {
        Revolution {
            q,
            a: 10.0,
            b: 11.0,
        }
    }

    fn weight(&self, r: f64) -> (f64, f64, f64) {
        let lo = 1.0 / self.q as f64;
        let span = self.b - self.a;
        let s = ((r - self.a) / span).clamp(0.0, 1.0);
        if s <= 0.0 {
            return (lo, 0.0, 0.0);
        }
        if s >= 1.0 {
            return (1.0, 0.0, 0.0);
        }
        let h = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
        let dh = 30.0 * s * s * (1.0 - s) * (1.0 - s) / span;
        let ddh = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (span * span);
        let c = 1.0 - lo;
        (lo + c * h, c * dh, c * ddh)
    }

    /// `(f, f', f'')` at `r`.
    pub fn profile(&self, r: f64) -> (f64, f64, f64) {
        let (w, dw, ddw) = self.weight(r);
        let (s, c) = r.sin_cos();
        (s * w, c * w + s * dw, -s * w + 2.0 * c * dw + s * ddw)
    }

    /// Gaussian curvature `−f''/f`, with its limits at the tips.
    pub fn gauss_curvature(&self, r: f64) -> f64 {
        if r <= self.a.min(PI) || r >= self.b {
            return 1.0;
        }
        let (f, _, ddf) = self.profile(r);
        -ddf / f
    }

    /// Cone angle at `r = 0` is `2π/q`.
    pub fn cone_order(&self) -> u32 {
        self.q
    }

    pub fn north_cap(&self) -> f64 {
        self.a.min(PI)
    }

    pub fn south_cap(&self) -> f64 {
        self.b.min(PI)
    }

    /// `∫ f dr` over `[0, π]` times `2π`.
    pub fn area(&self) -> f64 {
        let nodes = crate::geometry::quad::gauss_legendre(256);
        let mut s = 0.0;
        for (x, w) in nodes {
            let r = 0.5 * PI * (x + 1.0);
            s += w * 0.5 * PI * self.profile(r).0;
        }
        2.0 * PI * s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Surface {
    Circle {
        length: f64,
    },
    Torus {
        l1: f64,
        l2: f64,
    },
    /// Round sphere of the given radius modulo rotations by `2π/q` about the
    /// z-axis (`q = 1`: the sphere itself; `q > 1`: the football `S²/Z_q`).
    Sphere {
        radius: f64,
        q: u32,
    },
    Revolution(Revolution),
}

fn rot_z(angle: f64, v: &Vec3) -> Vec3 {
    let (s, c) = angle.sin_cos();
    Vec3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z)
}

/// Spherical coordinates `(θ, φ)` of a unit vector.
pub fn sph_coords(x: &Vec3) -> (f64, f64) {
    (x.z.clamp(-1.0, 1.0).acos(), x.y.atan2(x.x))
}

pub fn from_sph(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(st * cp, st * sp, ct)
}

/// Angle between unit vectors, accurate at both ends.
pub fn unit_angle(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

fn wrap(x: f64, l: f64) -> f64 {
    x - l * (x / l).round()
}

impl Surface {
    pub fn dim(&self) -> usize {
        match self {
            Surface::Circle { .. } => 1,
            _ => 2,
        }
    }

    pub fn volume(&self) -> f64 {
        match *self {
            Surface::Circle { length } => length,
            Surface::Torus { l1, l2 } => l1 * l2,
            Surface::Sphere { radius, q } => 4.0 * PI * radius * radius / q as f64,
            Surface::Revolution(rev) => rev.area(),
        }
    }

    pub fn scalar_curvature(&self, x: &Point) -> f64 {
        match *self {
            Surface::Circle { .. } | Surface::Torus { .. } => 0.0,
            Surface::Sphere { radius, .. } => 2.0 / (radius * radius),
            Surface::Revolution(rev) => 2.0 * rev.gauss_curvature(x.x),
        }
    }

    /// Lower bound for the injectivity radius used to bound walk steps.
    pub fn injectivity_floor(&self) -> f64 {
        match *self {
            Surface::Circle { length } => 0.5 * length,
            Surface::Torus { l1, l2 } => 0.5 * l1.min(l2),
            Surface::Sphere { radius, q } => PI * radius / q as f64,
            Surface::Revolution(rev) => 0.5 * rev.north_cap(),
        }
    }

    /// Order of the local group at `x`.
    pub fn isotropy(&self, x: &Point) -> u32 {
        match *self {
            Surface::Sphere { q, .. } if q > 1 && (x.x * x.x + x.y * x.y) < 1e-24 => q,
            Surface::Revolution(rev) if x.x <= 1e-12 => rev.q,
            _ => 1,
        }
    }

    /// Geodesic distance on the covering model (no group images).
    pub fn cover_distance(&self, x: &Point, y: &Point) -> f64 {
        match *self {
            Surface::Circle { length } => wrap(y.x - x.x, length).abs(),
            Surface::Torus { l1, l2 } => {
                let dx = wrap(y.x - x.x, l1);
                let dy = wrap(y.y - x.y, l2);
                dx.hypot(dy)
            }
            Surface::Sphere { radius, .. } => radius * unit_angle(x, y),
            Surface::Revolution(_) => f64::NAN,
        }
    }

    /// Group images of `y` used by orbifold distances and kernels.
    pub fn images(&self, y: &Point) -> Vec<Point> {
        match *self {
            Surface::Sphere { q, .. } if q > 1 => (0..q)
                .map(|j| rot_z(2.0 * PI * j as f64 / q as f64, y))
                .collect(),
            _ => vec![*y],
        }
    }

    /// Orbifold distance `min_γ d(x, γy)`.
    ///
    /// On the teardrop this is only available where it is known in closed
    /// form: pairs on a common meridian, and pairs inside one round cap.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        match *self {
            Surface::Revolution(rev) => revolution_distance(&rev, x, y),
            _ => Ok(self
                .images(y)
                .iter()
                .map(|g| self.cover_distance(x, g))
                .fold(f64::INFINITY, f64::min)),
        }
    }

    /// Reference oriented frame at `x`: `(e_x, e_y)` on the torus,
    /// `(e_θ, e_φ)` on spheres (with `φ = 0` at the poles).
    pub fn reference_frame(&self, x: &Point) -> Frame {
        match self {
            Surface::Sphere { .. } => {
                let (theta, phi) = sph_coords(x);
                let phi = if x.x == 0.0 && x.y == 0.0 { 0.0 } else { phi };
                let (st, ct) = theta.sin_cos();
                let (sp, cp) = phi.sin_cos();
                [Vec3::new(ct * cp, ct * sp, -st), Vec3::new(-sp, cp, 0.0)]
            }
            _ => [Vec3::x(), Vec3::y()],
        }
    }

    /// Moves `x` along the geodesic with initial velocity `v` (ambient,
    /// metric units, `|v|` = length travelled) and parallel-transports `frame`.
    pub fn exp_transport(&self, x: &Point, frame: &Frame, v: &Vec3) -> Result<(Point, Frame)> {
        let len = v.norm();
        let floor = self.injectivity_floor();
        if len > floor {
            return Err(Error::StepTooLarge { length: len, floor });
        }
        match *self {
            Surface::Circle { .. } => Ok((Vec3::new(x.x + v.x, 0.0, 0.0), *frame)),
            Surface::Torus { .. } => Ok((x + v, *frame)),
            Surface::Sphere { radius, .. } => {
                if len == 0.0 {
                    return Ok((*x, *frame));
                }
                let a = len / radius;
                let u = v / len;
                let (sa, ca) = a.sin_cos();
                let mut y = x * ca + u * sa;
                y /= y.norm();
                let shift = u * (1.0 - ca) + x * sa;
                let mut f = [
                    frame[0] - shift * frame[0].dot(&u),
                    frame[1] - shift * frame[1].dot(&u),
                ];
                // Re-project onto T_y to stop rounding drift.
                for w in f.iter_mut() {
                    *w -= y * w.dot(&y);
                }
                Ok((y, f))
            }
            Surface::Revolution(_) => {
                Err(Error::Unsupported("random walks", "the teardrop".into()))
            }
        }
    }

    /// Folds a point into the fundamental domain `φ ∈ [0, 2π/q)` of the
    /// football, rotating the frame with it. Returns the rotation angle used.
    pub fn fold(&self, x: &mut Point, frame: &mut Frame) -> f64 {
        match *self {
            Surface::Sphere { q, .. } if q > 1 => {
                let sector = 2.0 * PI / q as f64;
                let phi = x.y.atan2(x.x).rem_euclid(2.0 * PI);
                let j = (phi / sector).floor();
                if j == 0.0 {
                    return 0.0;
                }
                let ang = -j * sector;
                *x = rot_z(ang, x);
                frame[0] = rot_z(ang, &frame[0]);
                frame[1] = rot_z(ang, &frame[1]);
                ang
            }
            _ => 0.0,
        }
    }

    /// Initial velocity of the minimal geodesic from `x` to the nearest
    /// image of `y`.
    pub fn log_map(&self, x: &Point, y: &Point) -> Result<Vec3> {
        match *self {
            Surface::Circle { length } => Ok(Vec3::new(wrap(y.x - x.x, length), 0.0, 0.0)),
            Surface::Torus { l1, l2 } => {
                Ok(Vec3::new(wrap(y.x - x.x, l1), wrap(y.y - x.y, l2), 0.0))
            }
            Surface::Sphere { radius, .. } => {
                let best = self
                    .images(y)
                    .into_iter()
                    .min_by(|a, b| unit_angle(x, a).total_cmp(&unit_angle(x, b)))
                    .unwrap_or(*y);
                let ang = unit_angle(x, &best);
                let perp = best - x * x.dot(&best);
                let n = perp.norm();
                if n == 0.0 {
                    return Ok(Vec3::zeros());
                }
                Ok(perp / n * (ang * radius))
            }
            Surface::Revolution(_) => Err(Error::Unsupported("log map", "the teardrop".into())),
        }
    }

    /// Point at metric distance `dist` from `x` in direction `angle`
    /// measured from the reference frame.
    pub fn exp_polar(&self, x: &Point, dist: f64, angle: f64) -> Result<Point> {
        let f = self.reference_frame(x);
        let v = (f[0] * angle.cos() + f[1] * angle.sin()) * dist;
        if let Surface::Sphere { radius, .. } = *self {
            let a = dist / radius;
            if v.norm() == 0.0 {
                return Ok(*x);
            }
            let u = v / v.norm();
            return Ok((x * a.cos() + u * a.sin()).normalize());
        }
        Ok(self.exp_transport(x, &f, &v)?.0)
    }

    /// Product quadrature over `M` with `order` nodes per axis.
    pub fn quadrature(&self, order: usize) -> Vec<(Point, f64)> {
        match *self {
            Surface::Circle { length } => (0..order)
                .map(|i| {
                    (
                        Vec3::new((i as f64 + 0.5) * length / order as f64, 0.0, 0.0),
                        length / order as f64,
                    )
                })
                .collect(),
            Surface::Torus { l1, l2 } => {
                let w = l1 * l2 / (order * order) as f64;
                let mut out = Vec::with_capacity(order * order);
                for i in 0..order {
                    for j in 0..order {
                        let x = (i as f64 + 0.5) * l1 / order as f64;
                        let y = (j as f64 + 0.5) * l2 / order as f64;
                        out.push((Vec3::new(x, y, 0.0), w));
                    }
                }
                out
            }
            Surface::Sphere { radius, q } => {
                let sector = 2.0 * PI / q as f64;
                let nphi = (2 * order / q as usize).max(4);
                let mut out = Vec::new();
                for (z, wz) in crate::geometry::quad::gauss_legendre(order) {
                    for j in 0..nphi {
                        let phi = (j as f64 + 0.5) * sector / nphi as f64;
                        let s = (1.0 - z * z).sqrt();
                        out.push((
                            Vec3::new(s * phi.cos(), s * phi.sin(), z),
                            wz * sector / nphi as f64 * radius * radius,
                        ));
                    }
                }
                out
            }
            Surface::Revolution(rev) => {
                let nphi = 2 * order;
                let mut out = Vec::new();
                for (x, wr) in crate::geometry::quad::gauss_legendre(order) {
                    let r = 0.5 * PI * (x + 1.0);
                    let f = rev.profile(r).0;
                    for j in 0..nphi {
                        let phi = (j as f64 + 0.5) * 2.0 * PI / nphi as f64;
                        out.push((
                            Vec3::new(r, phi, 0.0),
                            wr * 0.5 * PI * f * 2.0 * PI / nphi as f64,
                        ));
                    }
                }
                out
            }
        }
    }
}

fn revolution_distance(rev: &Revolution, x: &Point, y: &Point) -> Result<f64> {
    let (r1, r2) = (x.x, y.x);
    let dphi = wrap(y.y - x.y, 2.0 * PI).abs();
    if dphi < 1e-14 || r1 <= 1e-14 || r2 <= 1e-14 {
        return Ok((r1 - r2).abs());
    }
    let q = rev.q as f64;
    // Inside a round cap the distance is spherical, after unfolding.
    if r1.max(r2) <= 0.5 * rev.north_cap() {
        let a = from_sph(r1, 0.0);
        let b = from_sph(r2, dphi / q);
        return Ok(unit_angle(&a, &b));
    }
    let s = PI - rev.south_cap();
    if r1.min(r2) >= PI - 0.5 * s {
        let a = from_sph(r1, 0.0);
        let b = from_sph(r2, dphi);
        return Ok(unit_angle(&a, &b));
    }
    Err(Error::Unsupported(
        "closed-form distance for this pair",
        "the teardrop".into(),
    ))
}
