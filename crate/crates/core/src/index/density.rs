//! Pointwise supertrace density `I(t,x) = E_{x,x;t}[R str(M τ)] p_M(t,x,x)`.

use serde::{Deserialize, Serialize};

use crate::clifford::{build_spin_rep, SpinRep};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{Point, SOneSpace, TwistBundle};
use crate::heatkernel::{KernelField, KernelOptions};
use crate::stochastic::feynman_kac::{MeanEstimate, MAX_INVALID_FRACTION};
use crate::stochastic::{evolve_transport, sample_bridge, PathOptions, RandomSource};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Estimator {
    /// `str(M τ)` with the exact factors.
    #[default]
    Full,
    /// `Σ_{i+j ≤ order} str(m_i (D*v)^j/j! ⊗ τ^ξ)`.
    Truncated { order: usize },
}

/// Everything a density or index run shares across paths.
#[derive(Clone, Debug)]
pub struct IndexSetup {
    pub space: SOneSpace,
    pub twist: TwistBundle,
    pub spin: SpinRep,
    /// Kernel supplying `p_M(t,x,x)` (with the ineffective multiplicity).
    pub kernel: KernelField,
    /// Kernel whose log-gradient drives the bridges.
    pub drift: KernelField,
    pub paths: PathOptions,
    pub estimator: Estimator,
    /// Pair paths `2i, 2i+1` with negated increments; error bars then come
    /// from the pair means.
    pub antithetic: bool,
    pub exec: Exec,
}

impl IndexSetup {
    /// Standard setup: depth-2 kernel for the diagonal, depth-0 parametrix
    /// for the bridge drift.
    pub fn new(space: SOneSpace, twist: TwistBundle, exec: Exec) -> Result<Self> {
        let kernel = KernelField::for_space(
            &space,
            2,
            KernelOptions {
                exec,
                ..Default::default()
            },
        )?;
        let drift = kernel.at_depth(0);
        let spin = build_spin_rep(space.base.dim())?;
        Ok(IndexSetup {
            space,
            twist,
            spin,
            kernel,
            drift,
            paths: PathOptions::default(),
            estimator: Estimator::Full,
            antithetic: false,
            exec,
        })
    }

    pub fn with_estimator(mut self, e: Estimator) -> Self {
        self.estimator = e;
        self
    }

    pub fn with_paths(mut self, p: PathOptions) -> Self {
        self.paths = p;
        self
    }

    pub fn with_antithetic(mut self, on: bool) -> Self {
        self.antithetic = on;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityEstimate {
    pub x: [f64; 3],
    pub t: f64,
    /// `I(t, x)`.
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
    pub invalid: usize,
    pub diagonal: f64,
    /// Largest `|str(m_i (D*v)^j)|` over `i + j < ℓ` seen on this node.
    pub cancellation_defect: f64,
}

/// Per-path values `Re[R str(Mτ)]` for paths `first .. first + n`.
fn path_values(
    setup: &IndexSetup,
    t: f64,
    x: &Point,
    first: u64,
    n: usize,
    source: RandomSource,
) -> Result<(Vec<f64>, usize, f64)> {
    let dyson = match setup.estimator {
        Estimator::Full => 0,
        Estimator::Truncated { order } => order,
    };
    let surface = &setup.space.base;
    let out: Vec<Result<Option<(f64, f64)>>> = setup.exec.map(n, |i| {
        let index = first + i as u64;
        let mut rng = if setup.antithetic {
            source.antithetic_stream(index)
        } else {
            source.stream(index)
        };
        let path = sample_bridge(surface, &setup.drift, x, x, t, &setup.paths, &mut rng)?;
        let st = evolve_transport(&path, &setup.spin, &setup.twist, surface, dyson)?;
        if !st.valid {
            return Ok(None);
        }
        let (s, defect) = match setup.estimator {
            Estimator::Full => (st.supertrace(&setup.spin)?, 0.0),
            Estimator::Truncated { order } => (
                st.truncated_supertrace(&setup.spin, order)?,
                st.cancellation_defect(&setup.spin)?,
            ),
        };
        Ok(Some((st.r * s.re, defect)))
    });
    let mut vals: Vec<Option<f64>> = Vec::with_capacity(n);
    let mut defect = 0.0f64;
    for r in out {
        let r = r?;
        if let Some((_, d)) = r {
            defect = defect.max(d);
        }
        vals.push(r.map(|(v, _)| v));
    }
    let invalid = vals.iter().filter(|v| v.is_none()).count();
    if invalid as f64 > MAX_INVALID_FRACTION * n as f64 {
        return Err(Error::TooManyInvalidPaths { invalid, total: n });
    }
    let vals = if setup.antithetic {
        // A pair with an invalid member is dropped whole.
        vals.chunks(2)
            .filter_map(|c| match c {
                [Some(a), Some(b)] => Some(0.5 * (a + b)),
                _ => None,
            })
            .collect()
    } else {
        vals.into_iter().flatten().collect()
    };
    Ok((vals, invalid, defect))
}

/// `I(t, x)` from `n` bridges using path streams `first ..`.
pub fn supertrace_density_at(
    setup: &IndexSetup,
    t: f64,
    x: &Point,
    n: usize,
    first: u64,
    source: RandomSource,
) -> Result<DensityEstimate> {
    if !setup.space.is_principal(x) {
        return Err(Error::InvalidConfig(format!(
            "density node {x:?} is not in the principal stratum"
        )));
    }
    if setup.antithetic && (n % 2 == 1 || first % 2 == 1) {
        return Err(Error::InvalidConfig(
            "antithetic runs need an even path count and offset".into(),
        ));
    }
    let (vals, invalid, defect) = path_values(setup, t, x, first, n, source)?;
    let diag = setup.kernel.eval(t, x, x);
    let e = MeanEstimate::from_samples(&vals);
    Ok(DensityEstimate {
        x: [x.x, x.y, x.z],
        t,
        value: e.mean * diag,
        stderr: e.stderr * diag,
        n: n - invalid,
        invalid,
        diagonal: diag,
        cancellation_defect: defect,
    })
}

pub fn supertrace_density(
    setup: &IndexSetup,
    t: f64,
    x: &Point,
    n: usize,
    source: RandomSource,
) -> Result<DensityEstimate> {
    supertrace_density_at(setup, t, x, n, 0, source)
}
