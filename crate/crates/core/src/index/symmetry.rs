//! Self-adjointness of the twisted heat operator, probed through its matrix
//! on a small test-section basis.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use super::density::IndexSetup;
use crate::error::Result;
use crate::geometry::Point;
use crate::stochastic::{evolve_transport, sample_path, RandomSource};

pub type Section<'a> = &'a (dyn Fn(&Point) -> DVector<Complex64> + Sync);

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    /// `A_ij = ⟨φ_i, P(t) φ_j⟩` as `[re, im]`.
    pub matrix: Vec<Vec<[f64; 2]>>,
    /// `‖A − A*‖_F`.
    pub asymmetry: f64,
    /// Root-sum-square of the standard errors of the entries of `A − A*`.
    pub pooled_stderr: f64,
    pub ratio: f64,
    pub paths: usize,
}

impl SymmetryReport {
    pub fn symmetric(&self, k: f64) -> bool {
        self.asymmetry <= k * self.pooled_stderr
    }
}

pub fn kernel_symmetry_check(
    setup: &IndexSetup,
    t: f64,
    basis: &[Section],
    order: usize,
    paths_per_node: usize,
    source: RandomSource,
) -> Result<SymmetryReport> {
    let b = basis.len();
    let surface = &setup.space.base;
    let nodes: Vec<(Point, f64)> = surface
        .quadrature(order)
        .into_iter()
        .filter(|(x, _)| setup.space.is_principal(x))
        .collect();
    let mut a = vec![vec![Complex64::new(0.0, 0.0); b]; b];
    // Variances of re/im of A_ij − conj(A_ji), accumulated over nodes.
    let mut var = vec![vec![[0.0f64; 2]; b]; b];
    for (node, (x, w)) in nodes.iter().enumerate() {
        let first = (node * paths_per_node) as u64;
        let per_path: Vec<Result<Vec<Complex64>>> = setup.exec.map(paths_per_node, |p| {
            let mut rng = source.stream(first + p as u64);
            let path = sample_path(surface, x, t, &setup.paths, &mut rng)?;
            let st = evolve_transport(&path, &setup.spin, &setup.twist, surface, 0)?;
            let (end, _) = setup.twist.closure(path.last());
            let op = &st.m * &st.tau * Complex64::new(st.r, 0.0);
            let images: Vec<DVector<Complex64>> = basis.iter().map(|phi| &op * phi(&end)).collect();
            let here: Vec<DVector<Complex64>> = basis.iter().map(|phi| phi(x)).collect();
            let mut out = Vec::with_capacity(b * b);
            for hi in &here {
                for img in &images {
                    out.push(hi.dotc(img));
                }
            }
            Ok(out)
        });
        let per_path: Vec<Vec<Complex64>> = per_path.into_iter().collect::<Result<_>>()?;
        let n = per_path.len() as f64;
        for i in 0..b {
            for j in 0..b {
                let mean: Complex64 = per_path.iter().map(|v| v[i * b + j]).sum::<Complex64>() / n;
                a[i][j] += mean * w;
                let diffs: Vec<Complex64> = per_path
                    .iter()
                    .map(|v| v[i * b + j] - v[j * b + i].conj())
                    .collect();
                let dm: Complex64 = diffs.iter().sum::<Complex64>() / n;
                let vr = diffs.iter().map(|d| (d.re - dm.re).powi(2)).sum::<f64>() / (n - 1.0) / n;
                let vi = diffs.iter().map(|d| (d.im - dm.im).powi(2)).sum::<f64>() / (n - 1.0) / n;
                var[i][j][0] += w * w * vr;
                var[i][j][1] += w * w * vi;
            }
        }
    }
    let mut asym = 0.0;
    let mut pooled = 0.0;
    for i in 0..b {
        for j in 0..b {
            if i == j {
                // Only the imaginary part of a diagonal entry is constrained.
                asym += (2.0 * a[i][i].im).powi(2);
                pooled += var[i][i][1];
            } else {
                asym += (a[i][j] - a[j][i].conj()).norm_sqr();
                pooled += var[i][j][0] + var[i][j][1];
            }
        }
    }
    let (asymmetry, pooled_stderr) = (asym.sqrt(), pooled.sqrt());
    Ok(SymmetryReport {
        matrix: a
            .iter()
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect(),
        asymmetry,
        pooled_stderr,
        ratio: asymmetry / pooled_stderr,
        paths: paths_per_node * nodes.len(),
    })
}
