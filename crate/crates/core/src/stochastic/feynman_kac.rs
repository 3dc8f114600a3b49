//! Monte-Carlo Feynman–Kac representation `θ(t,x) = E_x[R M τ θ₀(X_t)]`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::rng::RandomSource;
use super::transport::evolve_transport;
use super::walk::{sample_path, PathOptions};
use crate::clifford::SpinRep;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{Point, Surface, TwistBundle};

/// Fraction of invalid paths above which an estimate is rejected.
pub const MAX_INVALID_FRACTION: f64 = 0.01;

/// Mean and standard error of a real sample, in input order.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl MeanEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return MeanEstimate {
                mean: f64::NAN,
                stderr: f64::INFINITY,
                n,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            f64::INFINITY
        };
        MeanEstimate {
            mean,
            stderr: (var / n as f64).sqrt() * small_sample_widening(n),
            n,
        }
    }

    /// `|mean − target| ≤ k·stderr`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr
    }
}

/// Ratio of the Student-t and normal 97.5% quantiles, so that `±1.96·se`
/// keeps its nominal coverage on small samples.
fn small_sample_widening(n: usize) -> f64 {
    if n >= 200 || n < 2 {
        return 1.0;
    }
    StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .map(|d| d.inverse_cdf(0.975) / 1.959_964)
        .unwrap_or(1.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct FkEstimate {
    pub re: Vec<MeanEstimate>,
    pub im: Vec<MeanEstimate>,
    pub invalid: usize,
    pub redraws: usize,
    /// Whether every component reached the requested tolerance.
    pub converged: bool,
}

impl FkEstimate {
    pub fn value(&self) -> DVector<Complex64> {
        DVector::from_iterator(
            self.re.len(),
            self.re
                .iter()
                .zip(&self.im)
                .map(|(a, b)| Complex64::new(a.mean, b.mean)),
        )
    }

    pub fn max_stderr(&self) -> f64 {
        self.re
            .iter()
            .chain(&self.im)
            .map(|e| e.stderr)
            .fold(0.0, f64::max)
    }
}

/// Shared inputs of a Feynman–Kac run.
#[derive(Clone, Copy)]
pub struct FkSetup<'a> {
    pub surface: &'a Surface,
    pub spin: &'a SpinRep,
    pub twist: &'a TwistBundle,
    pub paths: usize,
    pub opts: PathOptions,
    pub source: RandomSource,
    pub exec: Exec,
    /// Target standard error; `None` accepts any.
    pub tolerance: Option<f64>,
}

/// Evaluates `θ(t, x)` for an invariant initial section `θ₀` given in the
/// reference trivialization of `Δ ⊗ ξ`.
pub fn feynman_kac_solve<F>(setup: &FkSetup, theta0: F, t: f64, x: &Point) -> Result<FkEstimate>
where
    F: Fn(&Point) -> DVector<Complex64> + Sync,
{
    let dim = setup.spin.dim() * setup.twist.rank();
    let per_path: Vec<Result<Option<(DVector<Complex64>, usize)>>> =
        setup.exec.map(setup.paths, |i| {
            let mut rng = setup.source.stream(i as u64);
            let path = sample_path(setup.surface, x, t, &setup.opts, &mut rng)?;
            let st = evolve_transport(&path, setup.spin, setup.twist, setup.surface, 0)?;
            if !st.valid {
                return Ok(None);
            }
            let (end, _) = setup.twist.closure(path.last());
            let v = theta0(&end);
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            Ok(Some((
                (&st.m * &st.tau) * v * Complex64::new(st.r, 0.0),
                path.redraws,
            )))
        });
    let mut values = Vec::with_capacity(setup.paths);
    let (mut invalid, mut redraws) = (0, 0);
    for r in per_path {
        match r? {
            Some((v, d)) => {
                values.push(v);
                redraws += d;
            }
            None => invalid += 1,
        }
    }
    if invalid as f64 > MAX_INVALID_FRACTION * setup.paths as f64 {
        return Err(Error::TooManyInvalidPaths {
            invalid,
            total: setup.paths,
        });
    }
    let comp = |f: &dyn Fn(&Complex64) -> f64| -> Vec<MeanEstimate> {
        (0..dim)
            .map(|c| {
                MeanEstimate::from_samples(&values.iter().map(|v| f(&v[c])).collect::<Vec<_>>())
            })
            .collect()
    };
    let re = comp(&|z| z.re);
    let im = comp(&|z| z.im);
    let mut est = FkEstimate {
        re,
        im,
        invalid,
        redraws,
        converged: true,
    };
    est.converged = setup.tolerance.is_none_or(|tol| est.max_stderr() <= tol);
    Ok(est)
}

/// Scalar specialization (`R·M ≡ 1`, no fiber): `E_x f(X_t)`.
pub fn feynman_kac_scalar<F>(
    surface: &Surface,
    f: F,
    t: f64,
    x: &Point,
    paths: usize,
    opts: &PathOptions,
    source: RandomSource,
    exec: Exec,
) -> Result<MeanEstimate>
where
    F: Fn(&Point) -> f64 + Sync,
{
    let vals: Vec<Result<f64>> = exec.map(paths, |i| {
        let mut rng = source.stream(i as u64);
        Ok(f(sample_path(surface, x, t, opts, &mut rng)?.last()))
    });
    let vals: Result<Vec<f64>> = vals.into_iter().collect();
    Ok(MeanEstimate::from_samples(&vals?))
}
