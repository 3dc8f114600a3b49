//! Evaluable heat kernels `p_M` on the catalog surfaces.

use std::f64::consts::PI;
use std::sync::Arc;

use super::parametrix::{flat_image_sum, Parametrix, IMAGE_CUTOFF};
use super::revolution::RevolutionKernel;
use super::successive::ZonalSeries;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{Point, SOneSpace, Surface, Vec3, XPoint};

/// Kernel values below this are treated as zero when taking logarithms.
pub const KERNEL_FLOOR: f64 = 1e-300;

/// Relative accuracy floor of the spectral kernel against its diagonal.
pub const SPECTRAL_RESOLUTION: f64 = 1e-12;

#[derive(Clone, Debug)]
enum Inner {
    /// Lattice-image Gaussian sum; exact on flat models.
    Flat,
    Zonal(Arc<ZonalSeries>),
    Spectral(Arc<RevolutionKernel>),
}

#[derive(Clone, Copy, Debug)]
pub struct KernelOptions {
    /// Unit-sphere time up to which the second correction is tabulated.
    pub horizon: f64,
    pub exec: Exec,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions {
            horizon: 1.0,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct KernelField {
    surface: Surface,
    inner: Inner,
    depth: usize,
    order: usize,
    /// Number of group elements acting trivially (the ineffective isotropy).
    multiplicity: f64,
}

impl KernelField {
    /// `H^(m) − H^(m)♯R + …` truncated after `depth` corrections.
    pub fn successive_approximation(param: &Parametrix, depth: usize) -> Self {
        Self::with_options(param, depth, KernelOptions::default())
    }

    pub fn with_options(param: &Parametrix, depth: usize, opts: KernelOptions) -> Self {
        let inner = match param.surface() {
            Surface::Sphere { .. } => Inner::Zonal(Arc::new(ZonalSeries::new(
                param.clone(),
                depth,
                opts.horizon,
                opts.exec,
            ))),
            _ => Inner::Flat,
        };
        KernelField {
            surface: *param.surface(),
            inner,
            depth,
            order: param.order(),
            multiplicity: 1.0,
        }
    }

    /// Spectral kernel of a surface of revolution.
    pub fn spectral(surface: &Surface, cells: usize, t_min: f64, exec: Exec) -> Result<Self> {
        match surface {
            Surface::Revolution(rev) => Ok(KernelField {
                surface: *surface,
                inner: Inner::Spectral(Arc::new(RevolutionKernel::new(*rev, cells, t_min, exec))),
                depth: 0,
                order: 0,
                multiplicity: 1.0,
            }),
            _ => Err(Error::Unsupported(
                "spectral revolution kernel",
                format!("{surface:?}"),
            )),
        }
    }

    /// Orbifold kernel of `M = X/S¹`, counting ineffective isotropy.
    pub fn for_space(space: &SOneSpace, depth: usize, opts: KernelOptions) -> Result<Self> {
        let mut k = match space.base {
            Surface::Revolution(_) => Self::spectral(&space.base, 300, 0.01, opts.exec)?,
            _ => Self::with_options(&Parametrix::new(&space.base, 1)?, depth, opts),
        };
        k.multiplicity = space.p as f64;
        Ok(k)
    }

    pub fn surface(&self) -> &Surface {
        &self.surface
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn multiplicity(&self) -> f64 {
        self.multiplicity
    }

    /// Same kernel truncated at a different depth (shares tables).
    pub fn at_depth(&self, depth: usize) -> Self {
        let inner = match &self.inner {
            Inner::Zonal(z) if z.depth() != depth => {
                let p =
                    Parametrix::new(&self.surface, self.order).expect("surface accepted before");
                Inner::Zonal(Arc::new(ZonalSeries::new(
                    p,
                    depth,
                    z.horizon(),
                    Exec::default(),
                )))
            }
            other => other.clone(),
        };
        KernelField {
            inner,
            depth,
            ..self.clone()
        }
    }

    fn zonal_images(&self, x: &Point, y: &Point, radius: f64, t: f64) -> Vec<f64> {
        let ds: Vec<f64> = self
            .surface
            .images(y)
            .iter()
            .map(|g| self.surface.cover_distance(x, g) / radius)
            .collect();
        let lead = ds.iter().cloned().fold(f64::INFINITY, f64::min);
        ds.into_iter()
            .filter(|&d| (d * d - lead * lead) / (2.0 * t) < -IMAGE_CUTOFF.ln())
            .collect()
    }

    /// Per-term contributions `[H, −H♯R, +H♯R♯R]` (image sums included).
    pub fn terms(&self, t: f64, x: &Point, y: &Point) -> Vec<f64> {
        match (&self.inner, self.surface) {
            (Inner::Zonal(z), Surface::Sphere { radius, .. }) => {
                let tu = t / (radius * radius);
                let mut acc = vec![0.0; self.depth + 1];
                for d in self.zonal_images(x, y, radius, tu) {
                    for (a, v) in acc.iter_mut().zip(z.terms(tu, d)) {
                        *a += self.multiplicity * v / (radius * radius);
                    }
                }
                acc
            }
            _ => {
                let mut v = vec![0.0; self.depth + 1];
                v[0] = self.eval(t, x, y);
                v
            }
        }
    }

    pub fn eval(&self, t: f64, x: &Point, y: &Point) -> f64 {
        let v = match (&self.inner, self.surface) {
            (Inner::Flat, Surface::Circle { length }) => flat_image_sum(t, &[(y.x - x.x, length)]),
            (Inner::Flat, Surface::Torus { l1, l2 }) => {
                flat_image_sum(t, &[(y.x - x.x, l1), (y.y - x.y, l2)])
            }
            (Inner::Zonal(z), Surface::Sphere { radius, .. }) => {
                let tu = t / (radius * radius);
                self.zonal_images(x, y, radius, tu)
                    .into_iter()
                    .map(|d| z.eval(tu, d))
                    .sum::<f64>()
                    / (radius * radius)
            }
            (Inner::Spectral(k), _) => k.eval(t, x, y),
            _ => f64::NAN,
        };
        self.multiplicity * v
    }

    /// Smallest value `p(t, x, ·)` resolves: 0 for the analytic kernels,
    /// [`SPECTRAL_RESOLUTION`] of the diagonal for the spectral solver,
    /// whose truncated eigen-sum is only accurate in absolute terms.
    pub fn resolution(&self, t: f64, x: &Point) -> f64 {
        match &self.inner {
            Inner::Spectral(_) => SPECTRAL_RESOLUTION * self.eval(t, x, x).abs(),
            _ => 0.0,
        }
    }

    /// `∫_M p(t, x, y) f(y) dy` by the surface product rule.
    pub fn apply<F: Fn(&Point) -> f64>(&self, t: f64, x: &Point, f: F, order: usize) -> f64 {
        self.surface
            .quadrature(order)
            .iter()
            .map(|(y, w)| w * self.eval(t, x, y) * f(y))
            .sum()
    }

    /// Transversal kernel on `X`: `p_X(t,u,v) = p_M(t,πu,πv)/2π`.
    pub fn lift_to_x(&self) -> TransversalKernel {
        TransversalKernel { base: self.clone() }
    }

    fn displaced(&self, x: &Point, dir: usize, eps: f64) -> Result<Point> {
        self.surface.exp_polar(
            x,
            eps.abs(),
            if dir == 0 { 0.0 } else { 0.5 * PI } + if eps < 0.0 { PI } else { 0.0 },
        )
    }

    /// `∇_x ln p(t, x, y)` by central differences along the reference frame.
    pub fn log_gradient(&self, t: f64, x: &Point, y: &Point) -> Result<Vec3> {
        if t <= 0.0 {
            return Err(Error::NonPositiveTime(t));
        }
        let p0 = self.eval(t, x, y);
        if !(p0 > KERNEL_FLOOR) {
            return Err(Error::KernelFloor { value: p0, t });
        }
        let eps = 1e-4 * t.sqrt().min(1.0);
        let frame = self.surface.reference_frame(x);
        let mut g = Vec3::zeros();
        for (i, e) in frame.iter().enumerate() {
            let plus = self.eval(t, &self.displaced(x, i, eps)?, y);
            let minus = self.eval(t, &self.displaced(x, i, -eps)?, y);
            if !(plus > KERNEL_FLOOR && minus > KERNEL_FLOOR) {
                return Err(Error::KernelFloor {
                    value: plus.min(minus),
                    t,
                });
            }
            g += e * ((plus.ln() - minus.ln()) / (2.0 * eps));
        }
        Ok(g)
    }

    /// `∂_t p − ½Δ_x p` by finite differences in normal coordinates.
    pub fn heat_residual(&self, t: f64, x: &Point, y: &Point) -> Result<(f64, f64)> {
        let ht = 1e-4 * t;
        let dt = (self.eval(t + ht, x, y) - self.eval(t - ht, x, y)) / (2.0 * ht);
        let eps = 2e-3 * t.sqrt();
        let mut lap = -4.0 * self.eval(t, x, y);
        for dir in 0..2 {
            for s in [eps, -eps] {
                lap += self.eval(t, &self.displaced(x, dir, s)?, y);
            }
        }
        lap /= eps * eps;
        Ok((dt - 0.5 * lap, dt))
    }
}

/// `p_X(t, u, v) = (1/2π) p_M(t, πu, πv)`.
#[derive(Clone, Debug)]
pub struct TransversalKernel {
    base: KernelField,
}

impl TransversalKernel {
    pub fn eval(&self, t: f64, u: &XPoint, v: &XPoint) -> f64 {
        self.base.eval(t, &u.base, &v.base) / (2.0 * PI)
    }

    pub fn base(&self) -> &KernelField {
        &self.base
    }
}
