//! Empirical Gaussian sandwich and gradient bounds with fitted constants.
//!
//! Constants are fitted on training samples, widened by a declared margin,
//! and then checked on held-out samples. A violation is any held-out sample
//! outside the widened bound.

use std::f64::consts::PI;

use serde::Serialize;

use super::field::KernelField;
use crate::exec::Exec;
use crate::geometry::quad::gauss_legendre_on;
use crate::geometry::{Point, Surface};

/// Default widening factor applied to fitted constants.
pub const DEFAULT_MARGIN: f64 = 1.25;

#[derive(Clone, Debug, Serialize)]
pub struct ChainRecord {
    pub t: f64,
    pub distance: f64,
    /// Number `N` of geodesic legs; balls sit at the `N − 1` interior points.
    pub legs: usize,
    pub kernel: f64,
    /// `∫…∫ Π p(t/N, z_{i−1}, z_i) dz₁…dz_{N−1}` over the balls.
    pub ball_integral: f64,
    /// `C₁^N (N/t)^{nN/2} e^{−d²/2t} ∫…∫ e^{−f/2t}` with the hinged energy
    /// `f = N Σ d²(z_{i−1}, z_i) − d²(x, y)`.
    pub hinged_bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub c1: f64,
    pub c2: f64,
    /// Lower constant fitted on near pairs only (used by the chain).
    pub c1_near: f64,
    pub margin: f64,
    pub near_radius: f64,
    pub samples: usize,
    /// Pairs skipped because the kernel cannot resolve them (or have no
    /// computable distance).
    pub unresolved: usize,
    pub holdout: usize,
    pub violations: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub positive: bool,
    pub chain: Vec<ChainRecord>,
    pub chain_violations: usize,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.chain_violations == 0 && self.positive
    }
}

/// `p t^{n/2} e^{d²/2t}`.
fn gaussian_ratio(p: f64, t: f64, d: f64, n: usize) -> f64 {
    p * t.powf(0.5 * n as f64) * (d * d / (2.0 * t)).exp()
}

struct Sample {
    t: f64,
    x: Point,
    y: Point,
    d: f64,
    p: f64,
    ratio: f64,
}

/// Fits `C₁, C₂` with `C₁ t^{-n/2}e^{−d²/2t} ≤ p ≤ C₂ t^{-n/2}e^{−d²/2t}` on
/// `train` and checks every `holdout` sample; distant pairs are additionally
/// tested against the hinged-energy chain where the surface has an
/// exponential map.
#[allow(clippy::too_many_arguments)]
pub fn verify_bounds(
    kernel: &KernelField,
    surface: &Surface,
    t_grid: &[f64],
    train: &[(Point, Point)],
    holdout: &[(Point, Point)],
    near_radius: f64,
    margin: f64,
    exec: Exec,
) -> BoundReport {
    let n = surface.dim();
    let jobs: Vec<(bool, f64, Point, Point)> = t_grid
        .iter()
        .flat_map(|&t| {
            let a = train.iter().map(move |(x, y)| (true, t, *x, *y));
            a.chain(holdout.iter().map(move |(x, y)| (false, t, *x, *y)))
        })
        .collect();
    let samples: Vec<Option<(bool, Sample)>> = exec.map(jobs.len(), |i| {
        let (fit, t, x, y) = jobs[i];
        let d = surface.distance(&x, &y).ok()?;
        let p = kernel.eval(t, &x, &y);
        if p <= kernel.resolution(t, &x) {
            return None;
        }
        Some((
            fit,
            Sample {
                t,
                x,
                y,
                d,
                p,
                ratio: gaussian_ratio(p, t, d, n),
            },
        ))
    });
    let unresolved = samples.iter().filter(|s| s.is_none()).count();
    let (train, hold): (Vec<_>, Vec<_>) = samples.into_iter().flatten().partition(|(fit, _)| *fit);
    let train: Vec<Sample> = train.into_iter().map(|(_, s)| s).collect();
    let hold: Vec<Sample> = hold.into_iter().map(|(_, s)| s).collect();
    let positive = train.iter().chain(&hold).all(|s| s.p > 0.0);
    let train: Vec<&Sample> = train.iter().collect();
    let hold: Vec<&Sample> = hold.iter().collect();
    let fmin = |v: &[&Sample]| v.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min);
    let fmax = |v: &[&Sample]| v.iter().map(|s| s.ratio).fold(0.0, f64::max);
    let c1 = fmin(&train) / margin;
    let c2 = fmax(&train) * margin;
    let near_train: Vec<&Sample> = train
        .iter()
        .copied()
        .filter(|s| s.d < near_radius)
        .collect();
    let c1_near = if near_train.is_empty() {
        c1
    } else {
        fmin(&near_train) / margin
    };
    let violations = hold.iter().filter(|s| s.ratio < c1 || s.ratio > c2).count();

    let base = kernel.at_depth(0);
    let distant: Vec<&Sample> = hold
        .iter()
        .copied()
        .filter(|s| s.d >= near_radius)
        .collect();
    let chain: Vec<Option<ChainRecord>> = exec.map(distant.len(), |i| {
        let s = distant[i];
        hinged_chain(
            &base,
            surface,
            s.t,
            &s.x,
            &s.y,
            s.d,
            s.p,
            c1_near,
            near_radius,
        )
    });
    let chain: Vec<ChainRecord> = chain.into_iter().flatten().collect();
    let chain_violations = chain.iter().filter(|c| !c.holds).count();

    BoundReport {
        c1,
        c2,
        c1_near,
        margin,
        near_radius,
        samples: train.len() + hold.len(),
        unresolved,
        holdout: hold.len(),
        violations,
        min_ratio: fmin(&hold).min(fmin(&train)),
        max_ratio: fmax(&hold).max(fmax(&train)),
        positive,
        chain,
        chain_violations,
    }
}

/// Largest number of legs tried before a pair is skipped.
const MAX_LEGS: usize = 48;

#[allow(clippy::too_many_arguments)]
fn hinged_chain(
    kernel: &KernelField,
    surface: &Surface,
    t: f64,
    x: &Point,
    y: &Point,
    d: f64,
    p: f64,
    c1: f64,
    near_radius: f64,
) -> Option<ChainRecord> {
    // Legs of length at most near/2 with balls of radius seg/4, so every
    // hop between neighbouring balls stays a near pair.
    let legs = ((2.0 * d / near_radius).ceil() as usize).max(2);
    if legs > MAX_LEGS || d <= 0.0 {
        return None;
    }
    let seg = d / legs as f64;
    let delta = 0.25 * seg;
    let v = surface.log_map(x, y).ok()?;
    let frame = surface.reference_frame(x);
    let mut balls: Vec<Vec<(Point, f64)>> = Vec::with_capacity(legs - 1);
    for i in 1..legs {
        let w = surface
            .exp_transport(x, &frame, &(v * (i as f64 / legs as f64)))
            .ok()?
            .0;
        let mut ball = Vec::with_capacity(32);
        for (r, wr) in gauss_legendre_on(0.0, delta, 4) {
            let jac = match surface {
                Surface::Sphere { radius, .. } => radius * (r / radius).sin(),
                _ => r,
            };
            for k in 0..8 {
                let ang = 2.0 * PI * (k as f64 + 0.5) / 8.0;
                ball.push((
                    surface.exp_polar(&w, r, ang).ok()?,
                    wr * jac * 2.0 * PI / 8.0,
                ));
            }
        }
        balls.push(ball);
    }

    // Transfer through the balls: ∫…∫ Π g(z_{i−1}, z_i) over all balls.
    let tau = t / legs as f64;
    let chain = |g: &dyn Fn(&Point, &Point) -> f64| -> f64 {
        let mut acc: Vec<f64> = balls[0].iter().map(|(z, wz)| wz * g(x, z)).collect();
        for pair in balls.windows(2) {
            acc = pair[1]
                .iter()
                .map(|(z, wz)| {
                    wz * pair[0]
                        .iter()
                        .zip(&acc)
                        .map(|((u, _), a)| a * g(u, z))
                        .sum::<f64>()
                })
                .collect();
        }
        balls[legs - 2]
            .iter()
            .zip(&acc)
            .map(|((z, _), a)| a * g(z, y))
            .sum()
    };
    let ball = chain(&|a, b| kernel.eval(tau, a, b));
    let gauss = chain(&|a, b| {
        let r = surface.distance(a, b).unwrap_or(f64::INFINITY);
        (-(legs as f64) * r * r / (2.0 * t)).exp()
    });
    let n = surface.dim() as f64;
    let lf = legs as f64;
    let bound = (lf * c1.ln() + 0.5 * n * lf * (lf / t).ln()).exp() * gauss;
    Some(ChainRecord {
        t,
        distance: d,
        legs,
        kernel: p,
        ball_integral: ball,
        hinged_bound: bound,
        holds: p >= ball && ball >= bound,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub constant: f64,
    pub margin: f64,
    pub train_max: f64,
    pub holdout_max: f64,
    pub samples: usize,
    pub violations: usize,
}

/// Fits `C` in `value ≤ C·scale` on alternating halves. Each sample is
/// `(value, scale, slack)`; a held-out sample violates the bound when
/// `value − slack > C·scale` (use `slack = 3σ` for Monte-Carlo values).
pub fn fit_upper_constant(samples: &[(f64, f64, f64)], margin: f64) -> FitReport {
    let ratio = |s: &(f64, f64, f64)| s.0 / s.1;
    let train_max = samples.iter().step_by(2).map(ratio).fold(0.0, f64::max);
    let holdout_max = samples
        .iter()
        .skip(1)
        .step_by(2)
        .map(ratio)
        .fold(0.0, f64::max);
    let constant = train_max * margin;
    let violations = samples
        .iter()
        .skip(1)
        .step_by(2)
        .filter(|s| s.0 - s.2 > constant * s.1)
        .count();
    FitReport {
        constant,
        margin,
        train_max,
        holdout_max,
        samples: samples.len(),
        violations,
    }
}

/// Gradient estimate `|∇ ln p(T,x,y)| ≤ C (d/T + 1/√T)` over a sweep.
pub fn gradient_bound(
    kernel: &KernelField,
    surface: &Surface,
    horizons: &[f64],
    pairs: &[(Point, Point)],
    margin: f64,
) -> FitReport {
    let mut samples = Vec::new();
    for &tt in horizons {
        for (x, y) in pairs {
            let (Ok(g), Ok(d)) = (kernel.log_gradient(tt, x, y), surface.distance(x, y)) else {
                continue;
            };
            samples.push((g.norm(), d / tt + 1.0 / tt.sqrt(), 0.0));
        }
    }
    fit_upper_constant(&samples, margin)
}
