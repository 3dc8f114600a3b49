//! Gaussian parametrix `H^(m) = Σ_γ η (2πt)^{-n/2} e^{−d²/2t} (u₀ + … + t^m u_m)`.
//!
//! Flat models (circle, torus) need no cut-off: their closure chart is the
//! universal cover and the lattice-image sum of Gaussians is already the
//! exact kernel. On spheres the coefficients are radial functions of the
//! distance `d`:
//!
//! * `u₀ = √(d / sin d)`
//! * `u₁ = ½ u₀(d) · (1/d) ∫₀^d h(r) dr`, `h = u₀⁻¹ Δu₀ = g² + g' + g cot r`,
//!   `g = ½(1/r − cot r)`; the factor `½` comes from the `½Δ` convention.
//!
//! All zonal quantities are computed on the unit sphere; radius `ρ` enters
//! through `p_ρ(t, d) = ρ⁻² p₁(t/ρ², d/ρ)`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::chart::Bump;
use crate::geometry::quad::gauss_legendre_on;
use crate::geometry::{Point, Surface};

/// Image terms whose Gaussian factor falls below this fraction of the
/// leading term are dropped.
pub const IMAGE_CUTOFF: f64 = 1e-16;

/// Cut-off `η` of the sphere parametrix in unit-sphere distance.
pub const SPHERE_CUTOFF: Bump = Bump {
    inner: 2.6,
    outer: 3.0,
};

/// `h(r) = u₀⁻¹ Δu₀` on the unit sphere.
pub fn transport_source(r: f64) -> f64 {
    if r < 0.1 {
        let r2 = r * r;
        return 1.0 / 3.0 + r2 / 60.0 + r2 * r2 / 378.0;
    }
    let cot = 1.0 / r.tan();
    let g = 0.5 * (1.0 / r - cot);
    let dg = 0.5 * (1.0 / r.sin().powi(2) - 1.0 / (r * r));
    g * g + dg + g * cot
}

/// `(u₀, u₀', Δu₀)` on the unit sphere.
pub fn u0_sphere(d: f64) -> (f64, f64, f64) {
    if d < 1e-4 {
        let d2 = d * d;
        return (1.0 + d2 / 12.0, d / 6.0, 1.0 / 3.0);
    }
    let u = (d / d.sin()).sqrt();
    let g = 0.5 * (1.0 / d - 1.0 / d.tan());
    (u, u * g, u * transport_source(d))
}

/// Tabulated `u₁` with first derivative and radial Laplacian on `[0, D_MAX]`.
#[derive(Debug)]
pub struct SphereCoefficients {
    step: f64,
    u1: Vec<f64>,
    du1: Vec<f64>,
    lap_u1: Vec<f64>,
}

const D_MAX: f64 = 3.05;
const TABLE_CELLS: usize = 8192;

impl SphereCoefficients {
    pub fn new() -> Self {
        let step = D_MAX / TABLE_CELLS as f64;
        let extra = 4;
        let n = TABLE_CELLS + 1 + extra;
        // Cumulative ∫₀^d h by 6-point Gauss–Legendre per cell.
        let mut integral = vec![0.0; n];
        for i in 1..n {
            let a = (i - 1) as f64 * step;
            let cell: f64 = gauss_legendre_on(a, a + step, 6)
                .iter()
                .map(|(r, w)| w * transport_source(*r))
                .sum();
            integral[i] = integral[i - 1] + cell;
        }
        let big_u1: Vec<f64> = (0..n)
            .map(|i| {
                let d = i as f64 * step;
                if i == 0 {
                    1.0 / 3.0
                } else {
                    u0_sphere(d).0 * integral[i] / d
                }
            })
            .collect();
        let u1: Vec<f64> = big_u1.iter().map(|v| 0.5 * v).collect();
        // u₁ is even in d: mirror for the stencil at the origin.
        let at = |i: isize| u1[i.unsigned_abs()];
        let mut du1 = vec![0.0; TABLE_CELLS + 1];
        let mut lap_u1 = vec![0.0; TABLE_CELLS + 1];
        for i in 0..=TABLE_CELLS {
            let k = i as isize;
            let d1 = (at(k - 2) - 8.0 * at(k - 1) + 8.0 * at(k + 1) - at(k + 2)) / (12.0 * step);
            let d2 = (-at(k - 2) + 16.0 * at(k - 1) - 30.0 * at(k) + 16.0 * at(k + 1) - at(k + 2))
                / (12.0 * step * step);
            let d = i as f64 * step;
            du1[i] = d1;
            lap_u1[i] = if i == 0 { 2.0 * d2 } else { d2 + d1 / d.tan() };
        }
        let mut u1 = u1;
        u1.truncate(TABLE_CELLS + 1);
        SphereCoefficients {
            step,
            u1,
            du1,
            lap_u1,
        }
    }

    fn lerp(&self, table: &[f64], d: f64) -> f64 {
        let x = (d / self.step).clamp(0.0, TABLE_CELLS as f64);
        let i = (x.floor() as usize).min(TABLE_CELLS - 1);
        let f = x - i as f64;
        table[i] * (1.0 - f) + table[i + 1] * f
    }

    /// Cubic Hermite interpolation of `u₁` from values and slopes.
    fn hermite(&self, d: f64) -> f64 {
        let x = (d / self.step).clamp(0.0, TABLE_CELLS as f64);
        let i = (x.floor() as usize).min(TABLE_CELLS - 1);
        let f = x - i as f64;
        let (f2, f3) = (f * f, f * f * f);
        let h00 = 2.0 * f3 - 3.0 * f2 + 1.0;
        let h10 = f3 - 2.0 * f2 + f;
        let h01 = -2.0 * f3 + 3.0 * f2;
        let h11 = f3 - f2;
        h00 * self.u1[i]
            + h10 * self.step * self.du1[i]
            + h01 * self.u1[i + 1]
            + h11 * self.step * self.du1[i + 1]
    }

    /// `(u₁, u₁', Δu₁)` at unit-sphere distance `d`.
    pub fn u1(&self, d: f64) -> (f64, f64, f64) {
        (
            self.hermite(d),
            self.lerp(&self.du1, d),
            self.lerp(&self.lap_u1, d),
        )
    }
}

impl Default for SphereCoefficients {
    fn default() -> Self {
        Self::new()
    }
}

/// Parametrix on a catalog surface.
#[derive(Clone, Debug)]
pub struct Parametrix {
    surface: Surface,
    order: usize,
    coeffs: Option<Arc<SphereCoefficients>>,
}

fn gaussian(t: f64, d: f64, n: usize) -> f64 {
    (-d * d / (2.0 * t)).exp() / (2.0 * PI * t).powf(0.5 * n as f64)
}

impl Parametrix {
    pub fn new(surface: &Surface, order: usize) -> Result<Self> {
        if order > 1 {
            return Err(Error::InvalidConfig(format!(
                "parametrix order {order} not available (0 or 1)"
            )));
        }
        let coeffs = match surface {
            Surface::Sphere { .. } => Some(Arc::new(SphereCoefficients::new())),
            Surface::Revolution(_) => {
                return Err(Error::Unsupported(
                    "Gaussian parametrix",
                    "the teardrop".into(),
                ));
            }
            _ => None,
        };
        Ok(Parametrix {
            surface: *surface,
            order,
            coeffs,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn surface(&self) -> &Surface {
        &self.surface
    }

    /// Coefficient `u_j(x, y)` for the dominant (nearest) image.
    pub fn coefficient(&self, j: usize, x: &Point, y: &Point) -> Result<f64> {
        match self.surface {
            Surface::Sphere { radius, .. } => {
                let d = self.surface.distance(x, y)? / radius;
                Ok(match j {
                    0 => u0_sphere(d).0,
                    1 => self.coeffs.as_ref().map(|c| c.u1(d).0).unwrap_or(0.0) / (radius * radius),
                    _ => 0.0,
                })
            }
            _ => Ok(if j == 0 { 1.0 } else { 0.0 }),
        }
    }

    /// Radial unit-sphere parametrix `η G (u₀ + t u₁)`.
    pub fn zonal(&self, t: f64, d: f64) -> f64 {
        let eta = SPHERE_CUTOFF.eval(d);
        if eta == 0.0 {
            return 0.0;
        }
        let (u0, _, _) = u0_sphere(d);
        let mut u = u0;
        if self.order >= 1 {
            if let Some(c) = &self.coeffs {
                u += t * c.u1(d).0;
            }
        }
        eta * gaussian(t, d, 2) * u
    }

    /// `R = (∂_t − ½Δ) H` for the unit-sphere zonal parametrix.
    pub fn zonal_residual(&self, t: f64, d: f64) -> f64 {
        let (eta, deta, ddeta) = SPHERE_CUTOFF.eval_with_derivs(d);
        if eta == 0.0 && deta == 0.0 {
            return 0.0;
        }
        let g = gaussian(t, d, 2);
        if g == 0.0 {
            return 0.0;
        }
        let (u0, du0, lap0) = u0_sphere(d);
        let (mut u, mut du, lap_top, tm) = (u0, du0, lap0, 1.0);
        let (lap_top, tm) = if self.order >= 1 {
            let c = self.coeffs.as_ref().expect("sphere coefficients");
            let (u1, du1, lap1) = c.u1(d);
            u += t * u1;
            du += t * du1;
            (lap1, t)
        } else {
            (lap_top, tm)
        };
        let f = g * u;
        let df = g * (du - d / t * u);
        let lap_eta = if d < 1e-12 {
            2.0 * ddeta
        } else {
            ddeta + deta / d.tan()
        };
        -0.5 * tm * g * lap_top * eta - 0.5 * lap_eta * f - deta * df
    }

    pub fn eval(&self, t: f64, x: &Point, y: &Point) -> Result<f64> {
        if t <= 0.0 || t.is_nan() {
            return Err(Error::NonPositiveTime(t));
        }
        Ok(match self.surface {
            Surface::Circle { length } => flat_image_sum(t, &[(y.x - x.x, length)]),
            Surface::Torus { l1, l2 } => flat_image_sum(t, &[(y.x - x.x, l1), (y.y - x.y, l2)]),
            Surface::Sphere { radius, .. } => {
                let tu = t / (radius * radius);
                let ds: Vec<f64> = self
                    .surface
                    .images(y)
                    .iter()
                    .map(|g| self.surface.cover_distance(x, g) / radius)
                    .collect();
                let lead = ds.iter().cloned().fold(f64::INFINITY, f64::min);
                ds.iter()
                    .filter(|&&d| (d * d - lead * lead) / (2.0 * tu) < -IMAGE_CUTOFF.ln())
                    .map(|&d| self.zonal(tu, d))
                    .sum::<f64>()
                    / (radius * radius)
            }
            Surface::Revolution(_) => unreachable!("rejected at construction"),
        })
    }
}

/// `Π_k Σ_m (2πt)^{-1/2} e^{−(Δ_k + mL_k)²/2t}`, truncated at [`IMAGE_CUTOFF`].
pub fn flat_image_sum(t: f64, axes: &[(f64, f64)]) -> f64 {
    let reach = 2.0 * t * (-IMAGE_CUTOFF.ln());
    let mut prod = 1.0;
    for &(delta, len) in axes {
        let d0 = delta - len * (delta / len).round();
        let mut s = 0.0;
        let m_max = ((reach.sqrt() + len) / len).ceil() as i64;
        for m in -m_max..=m_max {
            let d = d0 + m as f64 * len;
            let excess = (d * d - d0 * d0) / (2.0 * t);
            if excess < -IMAGE_CUTOFF.ln() {
                s += (-d * d / (2.0 * t)).exp();
            }
        }
        prod *= s / (2.0 * PI * t).sqrt();
    }
    prod
}
