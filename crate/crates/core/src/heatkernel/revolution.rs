//! Spectral heat kernel of a surface of revolution `dr² + f(r)² dφ²`.
//!
//! Separating `u = a(r) e^{imφ}` reduces `½Δ` to the radial operators
//! `½[(1/f)(f a')' − m²a/f²]`. Each is discretized by vertex-centred finite
//! volumes on `r_i = iπ/N` (faces carry `f`, cells carry `∫f`), symmetrized
//! and diagonalized. Tips where `f = 0` need no boundary condition for
//! `m = 0`; for `m ≠ 0` the radial factor vanishes there.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::exec::Exec;
use crate::geometry::quad::gauss_legendre_on;
use crate::geometry::{Point, Revolution};

#[derive(Debug)]
struct Mode {
    m: usize,
    /// Index of the first unknown node (0 for `m = 0`, else 1).
    first: usize,
    /// Eigenvalues of `½Δ_m` (non-positive), ascending in magnitude.
    lambda: Vec<f64>,
    /// `psi[k][i]`: normalized eigenfunction `k` at unknown node `first + i`.
    psi: Vec<Vec<f64>>,
}

#[derive(Debug)]
pub struct RevolutionKernel {
    rev: Revolution,
    cells: usize,
    t_min: f64,
    modes: Vec<Mode>,
}

impl RevolutionKernel {
    /// Solver accurate for `t ≥ t_min`; modes whose weight at `t_min` falls
    /// below `1e−16` are discarded.
    pub fn new(rev: Revolution, cells: usize, t_min: f64, exec: Exec) -> Self {
        let h = PI / cells as f64;
        let f = |r: f64| rev.profile(r).0;
        let cell_int = |i: usize, g: &dyn Fn(f64) -> f64| -> f64 {
            let a = (i as f64 - 0.5).max(0.0) * h;
            let b = ((i as f64 + 0.5) * h).min(PI);
            gauss_legendre_on(a, b, 6)
                .iter()
                .map(|(r, w)| w * g(*r))
                .sum()
        };
        let volume: Vec<f64> = (0..=cells).map(|i| cell_int(i, &f)).collect();
        let inv_f: Vec<f64> = (0..=cells)
            .map(|i| cell_int(i, &|r| 1.0 / f(r).max(1e-300)))
            .collect();
        let flux: Vec<f64> = (0..cells).map(|i| f((i as f64 + 0.5) * h) / h).collect();
        let cutoff = 2.0 * 16.0 * 10f64.ln() / t_min;

        let build = |m: usize| -> Option<Mode> {
            let first = if m == 0 { 0 } else { 1 };
            let last = if m == 0 { cells } else { cells - 1 };
            let n = last - first + 1;
            let mut a = DMatrix::<f64>::zeros(n, n);
            let m2 = (m * m) as f64;
            for i in first..=last {
                let k = i - first;
                let left = if i > 0 { flux[i - 1] } else { 0.0 };
                let right = if i < cells { flux[i] } else { 0.0 };
                let diag = -(left + right) - m2 * inv_f[i];
                a[(k, k)] = 0.5 * diag / volume[i];
                if i < last {
                    let off = 0.5 * right / (volume[i] * volume[i + 1]).sqrt();
                    a[(k, k + 1)] = off;
                    a[(k + 1, k)] = off;
                }
            }
            let eig = SymmetricEigen::new(a);
            let mut order: Vec<usize> = (0..n).filter(|&k| -eig.eigenvalues[k] < cutoff).collect();
            if order.is_empty() {
                return None;
            }
            order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
            let lambda = order.iter().map(|&k| eig.eigenvalues[k]).collect();
            let psi = order
                .iter()
                .map(|&k| {
                    (0..n)
                        .map(|i| eig.eigenvectors[(i, k)] / volume[first + i].sqrt())
                        .collect()
                })
                .collect();
            Some(Mode {
                m,
                first,
                lambda,
                psi,
            })
        };

        // Mode m is negligible once its ground state decays below the cutoff;
        // the ground state grows like m²/max f², so a generous bound suffices.
        let fmax = (0..=cells).map(|i| f(i as f64 * h)).fold(0.0, f64::max);
        let m_max = ((cutoff / 0.5).sqrt() * fmax).ceil() as usize + 2;
        let modes: Vec<Mode> = exec.map(m_max + 1, build).into_iter().flatten().collect();
        RevolutionKernel {
            rev,
            cells,
            t_min,
            modes,
        }
    }

    pub fn revolution(&self) -> &Revolution {
        &self.rev
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    /// Grid kernel between nodes `i` and `j` with angular offset `dphi`.
    fn node_kernel(&self, t: f64, i: usize, j: usize, dphi: f64) -> f64 {
        let mut total = 0.0;
        for mode in &self.modes {
            if i < mode.first
                || j < mode.first
                || i - mode.first >= mode.psi[0].len()
                || j - mode.first >= mode.psi[0].len()
            {
                continue;
            }
            let (a, b) = (i - mode.first, j - mode.first);
            let mut s = 0.0;
            for (lam, psi) in mode.lambda.iter().zip(&mode.psi) {
                s += (lam * t).exp() * psi[a] * psi[b];
            }
            let weight = if mode.m == 0 {
                1.0
            } else {
                2.0 * (mode.m as f64 * dphi).cos()
            };
            total += weight * s;
        }
        total / (2.0 * PI)
    }

    /// `p(t, x, y)` for `x = (r, φ)`, bilinear in the node grid.
    pub fn eval(&self, t: f64, x: &Point, y: &Point) -> f64 {
        let h = PI / self.cells as f64;
        let dphi = y.y - x.y;
        let loc = |r: f64| {
            let u = (r / h).clamp(0.0, self.cells as f64);
            let i = (u.floor() as usize).min(self.cells - 1);
            (i, u - i as f64)
        };
        let (i, fi) = loc(x.x);
        let (j, fj) = loc(y.x);
        let mut v = 0.0;
        for (a, wa) in [(i, 1.0 - fi), (i + 1, fi)] {
            if wa == 0.0 {
                continue;
            }
            for (b, wb) in [(j, 1.0 - fj), (j + 1, fj)] {
                if wb == 0.0 {
                    continue;
                }
                v += wa * wb * self.node_kernel(t, a, b, dphi);
            }
        }
        v
    }
}
