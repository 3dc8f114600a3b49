//! Geodesic random walks and Doob-drift bridges on the quotient surface.

use serde::{Deserialize, Serialize};

use super::rng::PathRng;
use crate::error::{Error, Result};
use crate::geometry::{Frame, Point, Surface, Vec3};
use crate::heatkernel::KernelField;

/// Number of redraws allowed for a single oversized increment.
const MAX_REDRAWS: usize = 100;

/// Deliberate faults for negative-control runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Fault {
    #[default]
    None,
    /// Extra constant drift `b₁e₁ + b₂e₂` in the current frame.
    ConstantDrift { b: [f64; 2] },
    /// Bridge drift with the wrong sign (the endpoint snap is kept).
    NegatedBridgeDrift,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathOptions {
    /// Step size; `None` means `T/200`.
    pub h: Option<f64>,
    pub fault: Fault,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions {
            h: None,
            fault: Fault::None,
        }
    }
}

impl PathOptions {
    pub fn steps(&self, t: f64) -> usize {
        let h = self.h.unwrap_or(t / 200.0);
        ((t / h).ceil() as usize).max(1)
    }
}

/// A sampled path `x₀, …, x_K` with frames; torus points are unwrapped.
#[derive(Clone, Debug)]
pub struct BridgePath {
    pub times: Vec<f64>,
    pub points: Vec<Point>,
    pub frames: Vec<Frame>,
    /// Tangent step `v_k` taken from `points[k]` (metric length).
    pub steps: Vec<Vec3>,
    /// Rotation applied by the orbifold fold after step `k`.
    pub folds: Vec<f64>,
    pub start: Point,
    pub end: Option<Point>,
    pub max_drift: f64,
    pub redraws: usize,
}

impl BridgePath {
    fn new(x: &Point, frame: Frame, capacity: usize) -> Self {
        BridgePath {
            times: Vec::with_capacity(capacity + 1),
            points: Vec::with_capacity(capacity + 1),
            frames: Vec::with_capacity(capacity + 1),
            steps: Vec::with_capacity(capacity),
            folds: Vec::with_capacity(capacity),
            start: *x,
            end: None,
            max_drift: 0.0,
            redraws: 0,
        }
        .pushed(0.0, *x, frame)
    }

    fn pushed(mut self, t: f64, x: Point, f: Frame) -> Self {
        self.times.push(t);
        self.points.push(x);
        self.frames.push(f);
        self
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn last(&self) -> &Point {
        self.points.last().expect("paths start with a point")
    }

    pub fn last_frame(&self) -> &Frame {
        self.frames.last().expect("paths start with a frame")
    }

    /// `Σ |Δx|²` using metric step lengths.
    pub fn quadratic_variation(&self) -> f64 {
        self.steps.iter().map(|v| v.norm_squared()).sum()
    }

    fn advance(&mut self, surface: &Surface, v: Vec3, dt: f64) -> Result<()> {
        let (x, f) = (*self.last(), *self.last_frame());
        let (mut y, mut g) = surface.exp_transport(&x, &f, &v)?;
        let fold = surface.fold(&mut y, &mut g);
        let t = self.duration() + dt;
        self.steps.push(v);
        self.folds.push(fold);
        self.times.push(t);
        self.points.push(y);
        self.frames.push(g);
        Ok(())
    }
}

fn frame_vector(f: &Frame, a: f64, b: f64) -> Vec3 {
    f[0] * a + f[1] * b
}

fn gaussian_step(
    surface: &Surface,
    f: &Frame,
    drift: Vec3,
    var: f64,
    rng: &mut PathRng,
    redraws: &mut usize,
) -> Result<Vec3> {
    let floor = surface.injectivity_floor();
    let sh = var.sqrt();
    for _ in 0..MAX_REDRAWS {
        let v = drift + frame_vector(f, sh * rng.normal(), sh * rng.normal());
        if v.norm() <= floor {
            return Ok(v);
        }
        *redraws += 1;
    }
    Err(Error::StepTooLarge {
        length: f64::INFINITY,
        floor,
    })
}

fn fault_drift(fault: Fault, f: &Frame, h: f64) -> Vec3 {
    match fault {
        Fault::ConstantDrift { b } => frame_vector(f, b[0] * h, b[1] * h),
        _ => Vec3::zeros(),
    }
}

/// Unconditioned Brownian motion (generator `½Δ`) started at `x`.
pub fn sample_path(
    surface: &Surface,
    x: &Point,
    t: f64,
    opts: &PathOptions,
    rng: &mut PathRng,
) -> Result<BridgePath> {
    if t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    let k = opts.steps(t);
    let h = t / k as f64;
    let mut path = BridgePath::new(x, surface.reference_frame(x), k);
    let mut redraws = 0;
    for _ in 0..k {
        let f = *path.last_frame();
        let v = gaussian_step(
            surface,
            &f,
            fault_drift(opts.fault, &f, h),
            h,
            rng,
            &mut redraws,
        )?;
        path.advance(surface, v, h)?;
    }
    path.redraws = redraws;
    Ok(path)
}

/// Brownian bridge from `x` to `y` over `[0, t]` by the Doob drift
/// `∇ ln p(t − s, ·, y)`; the last step lands exactly on `y`.
///
/// The noise of each step has the conditional variance `h(t−s−h)/(t−s)`
/// of a Gaussian bridge rather than `h`; plain Euler overshoots the spread
/// near the endpoint by a relative `ln K / K`.
pub fn sample_bridge(
    surface: &Surface,
    kernel: &KernelField,
    x: &Point,
    y: &Point,
    t: f64,
    opts: &PathOptions,
    rng: &mut PathRng,
) -> Result<BridgePath> {
    if t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    let k = opts.steps(t);
    let h = t / k as f64;
    let mut path = BridgePath::new(x, surface.reference_frame(x), k);
    let mut redraws = 0;
    let sign = if opts.fault == Fault::NegatedBridgeDrift {
        -1.0
    } else {
        1.0
    };
    for i in 0..k - 1 {
        let here = *path.last();
        let f = *path.last_frame();
        let grad = kernel.log_gradient(t - i as f64 * h, &here, y)?;
        path.max_drift = path.max_drift.max(grad.norm());
        let drift = grad * (sign * h) + fault_drift(opts.fault, &f, h);
        let rest = t - i as f64 * h;
        let v = gaussian_step(surface, &f, drift, h * (rest - h) / rest, rng, &mut redraws)?;
        path.advance(surface, v, h)?;
    }
    let v = surface.log_map(path.last(), y)?;
    path.advance(surface, v, h)?;
    path.end = Some(*y);
    path.redraws = redraws;
    Ok(path)
}

/// First exit time from the geodesic ball `B_r(x)`, with the Brownian-bridge
/// crossing correction between grid times. Returns `None` if the walk stays
/// inside until `t_max`.
pub fn exit_time(
    surface: &Surface,
    x: &Point,
    r: f64,
    h: f64,
    t_max: f64,
    rng: &mut PathRng,
) -> Result<Option<f64>> {
    let mut here = *x;
    let mut frame = surface.reference_frame(x);
    let mut t = 0.0;
    let mut redraws = 0;
    let mut gap = r;
    while t < t_max {
        let v = gaussian_step(surface, &frame, Vec3::zeros(), h, rng, &mut redraws)?;
        let (y, g) = surface.exp_transport(&here, &frame, &v)?;
        t += h;
        let d = surface.distance(x, &y)?;
        if d >= r {
            return Ok(Some(t));
        }
        let next_gap = r - d;
        if rng.uniform() < (-2.0 * gap * next_gap / h).exp() {
            return Ok(Some(t - 0.5 * h));
        }
        gap = next_gap;
        here = y;
        frame = g;
    }
    Ok(None)
}
