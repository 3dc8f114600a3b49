//! Fitted-constant check of the bridge distance estimate
//! `E d(X_s, y)² ≤ C (d(x,y)² + min{s, T−s})`.

use serde::Serialize;

use super::feynman_kac::MeanEstimate;
use super::rng::RandomSource;
use super::walk::{sample_bridge, PathOptions};
use crate::error::Result;
use crate::exec::Exec;
use crate::geometry::{Point, Surface};
use crate::heatkernel::bounds::{fit_upper_constant, FitReport};
use crate::heatkernel::KernelField;

/// Interior times per bridge at which the distance is recorded.
pub const DISTANCE_CHECKPOINTS: usize = 7;

#[derive(Clone, Debug, Serialize)]
pub struct DistanceSample {
    pub horizon: f64,
    pub s: f64,
    pub distance: f64,
    pub mean_sq: MeanEstimate,
}

/// Step index of checkpoint `j` on a path of `k` steps.
fn checkpoint(k: usize, j: usize) -> usize {
    (j * k + (DISTANCE_CHECKPOINTS + 1) / 2) / (DISTANCE_CHECKPOINTS + 1)
}

/// Mean squared distance to the endpoint at `DISTANCE_CHECKPOINTS` evenly
/// spaced interior times, for every pair and horizon.
#[allow(clippy::too_many_arguments)]
pub fn bridge_distance_samples(
    surface: &Surface,
    drift: &KernelField,
    horizons: &[f64],
    pairs: &[(Point, Point)],
    paths: usize,
    opts: &PathOptions,
    source: RandomSource,
    exec: Exec,
) -> Result<Vec<DistanceSample>> {
    let mut out = Vec::new();
    for (hi, &horizon) in horizons.iter().enumerate() {
        for (pi, (x, y)) in pairs.iter().enumerate() {
            let distance = surface.distance(x, y)?;
            let src = source.fork((hi * pairs.len() + pi) as u64);
            let runs = exec.map(paths, |i| -> Result<Vec<f64>> {
                let path = sample_bridge(
                    surface,
                    drift,
                    x,
                    y,
                    horizon,
                    opts,
                    &mut src.stream(i as u64),
                )?;
                (1..=DISTANCE_CHECKPOINTS)
                    .map(|j| {
                        Ok(surface
                            .distance(&path.points[checkpoint(path.len(), j)], y)?
                            .powi(2))
                    })
                    .collect()
            });
            let runs: Vec<Vec<f64>> = runs.into_iter().collect::<Result<_>>()?;
            for j in 0..DISTANCE_CHECKPOINTS {
                let xs: Vec<f64> = runs.iter().map(|r| r[j]).collect();
                let k = opts.steps(horizon);
                let s = horizon * checkpoint(k, j + 1) as f64 / k as f64;
                out.push(DistanceSample {
                    horizon,
                    s,
                    distance,
                    mean_sq: MeanEstimate::from_samples(&xs),
                });
            }
        }
    }
    Ok(out)
}

/// Fits `C` over the samples, allowing each held-out mean a 3σ slack.
pub fn distance_bound(samples: &[DistanceSample], margin: f64) -> FitReport {
    let rows: Vec<(f64, f64, f64)> = samples
        .iter()
        .map(|d| {
            let scale = d.distance * d.distance + d.s.min(d.horizon - d.s);
            (d.mean_sq.mean, scale, 3.0 * d.mean_sq.stderr)
        })
        .collect();
    fit_upper_constant(&rows, margin)
}
