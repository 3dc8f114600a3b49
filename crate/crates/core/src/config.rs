//! Experiment configuration shared by the library drivers and the CLI.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::space::catalog_by_name;
use crate::geometry::{CatalogParams, SOneSpace};
use crate::index::Estimator;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub space: String,
    pub params: CatalogParams,
    /// Twist degree (`k` on spheres, Chern number `c` on the torus).
    pub twist: i64,
    pub t: f64,
    pub paths: usize,
    /// Path step; `None` means `t/200`.
    pub h: Option<f64>,
    /// Circle quadrature nodes for Fourier projections.
    pub fourier_nodes: usize,
    /// No default: runs must be seeded explicitly.
    pub seed: Option<u64>,
    /// Base quadrature order for the index integral.
    pub order: usize,
    /// `(start, end, count)` for kernel tables.
    pub t_grid: Option<(f64, f64, usize)>,
    pub exec: Exec,
    pub estimator: Estimator,
    /// Antithetic path pairs in the index estimator.
    pub antithetic: bool,
    /// Output directory; the CLI falls back to `SONE_INDEX_OUT`, then `./out`.
    pub out: Option<String>,
    pub suite: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            space: "hopf".into(),
            params: CatalogParams::default(),
            twist: 0,
            t: 0.05,
            paths: 100_000,
            h: None,
            fourier_nodes: 32,
            seed: None,
            order: 4,
            t_grid: None,
            exec: Exec::default(),
            estimator: Estimator::Full,
            antithetic: false,
            out: None,
            suite: None,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "`{name}` must be positive, got {v}"
        )))
    }
}

impl ExperimentConfig {
    /// Full validation for Monte-Carlo runs (the seed is mandatory).
    pub fn validate(&self) -> Result<()> {
        self.seed()?;
        self.validate_unseeded()
    }

    /// Validation for deterministic runs that draw no random numbers.
    pub fn validate_unseeded(&self) -> Result<()> {
        self.params.validate()?;
        self.space()?;
        positive("t", self.t)?;
        if let Some(h) = self.h {
            positive("h", h)?;
            if h > self.t {
                return Err(Error::InvalidConfig(format!(
                    "`h` = {h} exceeds `t` = {}",
                    self.t
                )));
            }
        }
        for (name, v) in [
            ("paths", self.paths),
            ("fourier_nodes", self.fourier_nodes),
            ("order", self.order),
        ] {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("`{name}` must be positive")));
            }
        }
        if self.fourier_nodes < 4 {
            return Err(Error::InvalidConfig(
                "`fourier_nodes` must be at least 4".into(),
            ));
        }
        if let Some((a, b, n)) = self.t_grid {
            positive("t_grid start", a)?;
            if !(b >= a) || n == 0 {
                return Err(Error::InvalidConfig(format!(
                    "`t_grid` {a}:{b}:{n} is not an increasing grid"
                )));
            }
        }
        if let Estimator::Truncated { order: 0 } = self.estimator {
            return Err(Error::InvalidConfig(
                "truncated estimator needs a positive order".into(),
            ));
        }
        if let Exec::Threads(0) = self.exec {
            return Err(Error::InvalidConfig(
                "`exec` thread count must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::InvalidConfig("`seed` is required".into()))
    }

    pub fn space(&self) -> Result<SOneSpace> {
        catalog_by_name(&self.space, self.params)
    }

    /// Grid points of `t_grid`, or just `t`.
    pub fn times(&self) -> Vec<f64> {
        match self.t_grid {
            Some((a, _, 1)) => vec![a],
            Some((a, b, n)) => (0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect(),
            None => vec![self.t],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_is_mandatory() {
        let c = ExperimentConfig::default();
        assert!(c.validate().is_err());
        let c = ExperimentConfig { seed: Some(1), ..c };
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_numbers() {
        let base = ExperimentConfig {
            seed: Some(1),
            ..Default::default()
        };
        assert!(ExperimentConfig {
            t: -1.0,
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(ExperimentConfig {
            space: "klein".into(),
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(ExperimentConfig {
            t_grid: Some((0.5, 0.1, 3)),
            ..base
        }
        .validate()
        .is_err());
    }
}
