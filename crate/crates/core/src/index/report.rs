//! Paired analytic/geometric results with a verdict.

use serde::{Deserialize, Serialize};

use super::mckean::IndexEstimate;
use crate::geometry::{CatalogParams, TwistKind};

/// Distance to the nearest integer tolerated on the geometric side.
pub const INTEGER_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct Analytic {
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
    pub t: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Geometric {
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexReport {
    pub space: String,
    pub params: CatalogParams,
    pub twist: TwistKind,
    pub analytic: Analytic,
    pub geometric: Geometric,
    pub nearest_integer: i64,
    pub verdict: Verdict,
    pub seed: u64,
    pub version: String,
}

impl IndexReport {
    pub fn new(
        space: &str,
        params: CatalogParams,
        twist: TwistKind,
        est: &IndexEstimate,
        geometric: f64,
        seed: u64,
    ) -> Self {
        let nearest = geometric.round();
        let ok = (est.value - geometric).abs() <= 3.0 * est.stderr
            && (geometric - nearest).abs() <= INTEGER_TOL;
        IndexReport {
            space: space.to_string(),
            params,
            twist,
            analytic: Analytic {
                value: est.value,
                stderr: est.stderr,
                n: est.n,
                t: est.t,
            },
            geometric: Geometric { value: geometric },
            nearest_integer: nearest as i64,
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}
