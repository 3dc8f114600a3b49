//! Twist bundles `ξ → M` with their connections and curvature.
//!
//! Curvature is skew-Hermitian. For the catalog line bundles the connection
//! one-form is written in one global gauge:
//!
//! * monopole of degree `k` on the sphere of radius `ρ`:
//!   `A = −iBρ²(1 − cos θ) dφ`, `B = k/(2ρ²)` (singular only at the south pole,
//!   where the gauge jump is `e^{2πik} = 1`);
//! * constant field of Chern number `c` on the torus (Landau gauge on the
//!   universal cover): `A = −iBx dy`, `B = 2πc/(L₁L₂)`, with sections obeying
//!   `s(x + L₁, y) = e^{iBL₁y} s(x, y)`.
//!
//! In both cases `F = dA = −iB·vol`, so `(i/2π) tr F` integrates to the degree.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::space::SOneSpace;
use super::surface::{sph_coords, unit_angle, Point, Surface, Vec3};
use crate::clifford::CMat;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TwistKind {
    /// Product bundle `M × ℂ^rank` with the flat connection.
    Trivial { rank: usize },
    /// Degree-`k` line bundle `O(k)` over a round sphere.
    Monopole { k: i64 },
    /// Line bundle of Chern number `c` with constant curvature on a torus.
    Magnetic { c: i64 },
}

impl TwistKind {
    /// Catalog default twist of degree `k` for the given space.
    pub fn of_degree(space: &SOneSpace, k: i64) -> Self {
        match space.base {
            Surface::Torus { .. } => TwistKind::Magnetic { c: k },
            Surface::Sphere { q: 1, .. } => TwistKind::Monopole { k },
            _ => TwistKind::Trivial { rank: 1 },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistBundle {
    pub kind: TwistKind,
    #[serde(skip)]
    base: Surface,
    /// Constant field strength `B` (curvature `F₁₂ = −iB`).
    pub field: f64,
}

impl TwistBundle {
    pub fn new(kind: TwistKind, base: &Surface) -> Result<Self> {
        let field = match (kind, *base) {
            (TwistKind::Trivial { rank }, _) => {
                if rank == 0 {
                    return Err(Error::InvalidConfig("twist rank must be positive".into()));
                }
                0.0
            }
            (TwistKind::Monopole { k }, Surface::Sphere { radius, q: 1 }) => {
                k as f64 / (2.0 * radius * radius)
            }
            (TwistKind::Magnetic { c }, Surface::Torus { l1, l2 }) => {
                2.0 * PI * c as f64 / (l1 * l2)
            }
            (TwistKind::Monopole { .. }, _) => {
                return Err(Error::Unsupported("monopole twist", format!("{base:?}")));
            }
            (TwistKind::Magnetic { .. }, _) => {
                return Err(Error::Unsupported("magnetic twist", format!("{base:?}")));
            }
        };
        Ok(TwistBundle {
            kind,
            base: *base,
            field,
        })
    }

    pub fn trivial(base: &Surface) -> Self {
        TwistBundle {
            kind: TwistKind::Trivial { rank: 1 },
            base: *base,
            field: 0.0,
        }
    }

    pub fn rank(&self) -> usize {
        match self.kind {
            TwistKind::Trivial { rank } => rank,
            _ => 1,
        }
    }

    /// Integer degree `∫_M (i/2π) tr F`, as declared.
    pub fn degree(&self) -> i64 {
        match self.kind {
            TwistKind::Trivial { .. } => 0,
            TwistKind::Monopole { k } => k,
            TwistKind::Magnetic { c } => c,
        }
    }

    pub fn is_abelian(&self) -> bool {
        true
    }

    /// `F(e₁, e₂)` in an oriented orthonormal frame at `x`.
    pub fn curvature(&self, _x: &Point) -> CMat {
        CMat::identity(self.rank(), self.rank()) * Complex64::new(0.0, -self.field)
    }

    /// Chart coordinates used by [`Self::connection`]: `(θ, φ)` on spheres,
    /// `(x, y)` on the torus.
    pub fn coordinates(&self, x: &Point) -> [f64; 2] {
        match self.base {
            Surface::Sphere { .. } => {
                let (t, p) = sph_coords(x);
                [t, p]
            }
            _ => [x.x, x.y],
        }
    }

    /// Area density `√det g` in the coordinates of [`Self::coordinates`].
    pub fn area_density(&self, u: [f64; 2]) -> f64 {
        match self.base {
            Surface::Sphere { radius, .. } => radius * radius * u[0].sin(),
            _ => 1.0,
        }
    }

    /// Connection coefficients `(A₁, A₂)` of `A = A₁du¹ + A₂du²` (scalars
    /// times the identity of the fiber).
    pub fn connection(&self, u: [f64; 2]) -> [Complex64; 2] {
        match self.base {
            Surface::Sphere { radius, .. } => [
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -self.field * radius * radius * (1.0 - u[0].cos())),
            ],
            _ => [
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -self.field * u[0]),
            ],
        }
    }

    /// `F₁₂ = (∂₁A₂ − ∂₂A₁ + [A₁, A₂])/√det g` by central differences.
    pub fn curvature_from_connection(&self, u: [f64; 2]) -> Complex64 {
        let h = 1e-5;
        let d1 = (self.connection([u[0] + h, u[1]])[1] - self.connection([u[0] - h, u[1]])[1])
            / (2.0 * h);
        let d2 = (self.connection([u[0], u[1] + h])[0] - self.connection([u[0], u[1] - h])[0])
            / (2.0 * h);
        // Coefficients are scalar, so the bracket vanishes.
        (d1 - d2) / self.area_density(u)
    }

    /// Parallel transport `exp(−∫A)` along the geodesic segment leaving
    /// `from` with velocity `v` (torus points unwrapped).
    pub fn segment_transport(&self, from: &Point, v: &Vec3) -> Complex64 {
        if self.field == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        match self.base {
            Surface::Sphere { radius, .. } => {
                let a = *from;
                let len = v.norm() / radius;
                if len == 0.0 {
                    return Complex64::new(1.0, 0.0);
                }
                let u = v / v.norm();
                let b = (a * len.cos() + u * len.sin()).normalize();
                let omega = signed_solid_angle(&Vec3::z(), &a, &b);
                Complex64::from_polar(1.0, self.field * radius * radius * omega)
            }
            _ => Complex64::from_polar(1.0, self.field * (from.x + 0.5 * v.x) * v.y),
        }
    }

    /// Identification of the fiber at an unwrapped torus point with the
    /// fiber at its reduced representative: returns `(reduced, Φ⁻¹)` such
    /// that values transported to `end` map to the reduced trivialization by
    /// multiplication with `Φ⁻¹`.
    pub fn closure(&self, end: &Point) -> (Point, Complex64) {
        match self.base {
            Surface::Torus { l1, l2 } => {
                let m = (end.x / l1).floor();
                let n = (end.y / l2).floor();
                let red = Vec3::new(end.x - m * l1, end.y - n * l2, 0.0);
                let phase = Complex64::from_polar(1.0, -self.field * l1 * m * red.y);
                (red, phase)
            }
            _ => (*end, Complex64::new(1.0, 0.0)),
        }
    }

    /// Degree-2 part of `ch ξ` against the area form: `(i/2π) tr F₁₂`.
    pub fn ch2(&self, x: &Point) -> f64 {
        let f = self.curvature(x);
        (Complex64::i() * f.trace() / (2.0 * PI)).re
    }
}

/// Oriented solid angle of the geodesic triangle `(a, b, c)` on the unit
/// sphere (positive when counter-clockwise seen from outside).
pub fn signed_solid_angle(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let num = a.dot(&b.cross(c));
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * num.atan2(den)
}

/// Geodesic distance helper re-exported for twist tests.
pub fn angle(a: &Vec3, b: &Vec3) -> f64 {
    unit_angle(a, b)
}
