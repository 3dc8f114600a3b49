//! Feynman–Kac factors along a sampled path: the inverse parallel transport
//! `τ` on spinors ⊗ twist, the curvature factor `M`, and `R = exp(−⅛∫S)`.

use num_complex::Complex64;

use super::walk::BridgePath;
use crate::clifford::{dstar, max_abs, spin_exp, supertrace_twisted, CMat, SkewMatrix, SpinRep};
use crate::error::Result;
use crate::geometry::{Surface, TwistBundle};

/// Unitarity defect beyond which a path is flagged invalid.
pub const UNITARITY_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct TransportState {
    /// `τ = spin_exp(v) ⊗ τ^ξ` on `Δ ⊗ ξ` (layout `kron(spin, twist)`).
    pub tau: CMat,
    pub m: CMat,
    pub r: f64,
    /// Generator of the spinor part: rotation by the frame holonomy angle.
    pub v: SkewMatrix,
    /// Twist part of `τ` (inverse transport along the path).
    pub twist: CMat,
    /// Dyson terms `m_i` of `M` (`m_0 = I`, `Σ m_i = M` up to truncation).
    pub m_terms: Vec<CMat>,
    pub valid: bool,
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Angle `α` with `f[0] = cos α·g[0] + sin α·g[1]`.
fn frame_angle(f: &[crate::geometry::Vec3; 2], g: &[crate::geometry::Vec3; 2]) -> f64 {
    f[0].dot(&g[1]).atan2(f[0].dot(&g[0]))
}

/// Integrates the factors along `path`. `dyson` is the number of Dyson terms
/// beyond `m_0` kept in `m_terms`.
pub fn evolve_transport(
    path: &BridgePath,
    spin: &SpinRep,
    twist: &TwistBundle,
    surface: &Surface,
    dyson: usize,
) -> Result<TransportState> {
    let rank = twist.rank();
    let dim = spin.dim() * rank;
    let end = *path.last();

    // Scalar factor by the trapezoid rule.
    let mut integral = 0.0;
    for k in 0..path.len() {
        let dt = path.times[k + 1] - path.times[k];
        integral += 0.5
            * dt
            * (surface.scalar_curvature(&path.points[k])
                + surface.scalar_curvature(&path.points[k + 1]));
    }
    let r = (-integral / 8.0).exp();

    // Twist transport: forward product, then invert.
    let mut phase = Complex64::new(1.0, 0.0);
    for (x, v) in path.points.iter().zip(&path.steps) {
        phase *= twist.segment_transport(x, v);
    }
    let (_, closure) = twist.closure(&end);
    phase *= closure;
    let twist_tau = CMat::identity(rank, rank) * phase.inv();

    // Spinor transport from the frame holonomy at the endpoint.
    let alpha = frame_angle(path.last_frame(), &surface.reference_frame(&end));
    let v = SkewMatrix::plane(spin.n(), 0, 1, alpha);
    let spin_tau = spin_exp(&v, spin, 0)?.full;
    let tau = kron(&spin_tau, &twist_tau);

    // Curvature ODE dM/ds = M Ω(s), Ω = −½ c₁c₂ ⊗ F₁₂ in the moving frame.
    let c12 = spin.pair(0, 1);
    let omega: Vec<CMat> = path
        .points
        .iter()
        .map(|x| kron(c12, &twist.curvature(x)) * Complex64::new(-0.5, 0.0))
        .collect();
    let mut terms = vec![CMat::identity(dim, dim)];
    terms.extend((0..dyson).map(|_| CMat::zeros(dim, dim)));
    let mut m = CMat::identity(dim, dim);
    for k in 0..path.len() {
        let h = Complex64::new(path.times[k + 1] - path.times[k], 0.0);
        let (oa, ob) = (&omega[k], &omega[k + 1]);
        let om = (oa + ob) * Complex64::new(0.5, 0.0);
        m = rk4(&m, oa, &om, ob, h);
        // Graded system: m_i' = m_{i−1} Ω with the same stages.
        if dyson > 0 {
            terms = rk4_graded(&terms, oa, &om, ob, h);
        }
    }
    let defect = max_abs(&(tau.adjoint() * &tau - CMat::identity(dim, dim)));
    Ok(TransportState {
        tau,
        m,
        r,
        v,
        twist: twist_tau,
        m_terms: terms,
        valid: defect <= UNITARITY_TOL && r.is_finite(),
    })
}

fn rk4(m: &CMat, oa: &CMat, om: &CMat, ob: &CMat, h: Complex64) -> CMat {
    let half = h * 0.5;
    let k1 = m * oa;
    let k2 = (m + &k1 * half) * om;
    let k3 = (m + &k2 * half) * om;
    let k4 = (m + &k3 * h) * ob;
    m + (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * (h / 6.0)
}

fn rk4_graded(m: &[CMat], oa: &CMat, om: &CMat, ob: &CMat, h: Complex64) -> Vec<CMat> {
    let rhs = |s: &[CMat], o: &CMat| -> Vec<CMat> {
        let mut out = vec![CMat::zeros(o.nrows(), o.ncols())];
        out.extend(s[..s.len() - 1].iter().map(|x| x * o));
        out
    };
    let axpy = |s: &[CMat], k: &[CMat], a: Complex64| -> Vec<CMat> {
        s.iter().zip(k).map(|(x, y)| x + y * a).collect()
    };
    let half = h * 0.5;
    let k1 = rhs(m, oa);
    let k2 = rhs(&axpy(m, &k1, half), om);
    let k3 = rhs(&axpy(m, &k2, half), om);
    let k4 = rhs(&axpy(m, &k3, h), ob);
    (0..m.len())
        .map(|i| {
            &m[i] + (&k1[i] + (&k2[i] + &k3[i]) * Complex64::new(2.0, 0.0) + &k4[i]) * (h / 6.0)
        })
        .collect()
}

impl TransportState {
    /// `str(M τ)` on the twisted spinor fiber.
    pub fn supertrace(&self, spin: &SpinRep) -> Result<Complex64> {
        supertrace_twisted(&(&self.m * &self.tau), spin, self.twist.nrows())
    }

    fn spinor_powers(&self, spin: &SpinRep, order: usize) -> Result<Vec<CMat>> {
        let d = dstar(&self.v, spin)?;
        let mut out = vec![CMat::identity(spin.dim(), spin.dim())];
        for j in 1..=order {
            let next = &out[j - 1] * &d / Complex64::new(j as f64, 0.0);
            out.push(next);
        }
        Ok(out)
    }

    /// `Σ_{i+j ≤ order} str(m_i (D*v)^j/j! ⊗ τ^ξ)`.
    pub fn truncated_supertrace(&self, spin: &SpinRep, order: usize) -> Result<Complex64> {
        let pows = self.spinor_powers(spin, order)?;
        let rank = self.twist.nrows();
        let mut s = Complex64::new(0.0, 0.0);
        for (i, mi) in self.m_terms.iter().enumerate().take(order + 1) {
            for pj in pows.iter().take(order + 1 - i) {
                s += supertrace_twisted(&(mi * kron(pj, &self.twist)), spin, rank)?;
            }
        }
        Ok(s)
    }

    /// Largest `|str(m_i (D*v)^j ⊗ τ^ξ)|` over `i + j < ℓ`.
    pub fn cancellation_defect(&self, spin: &SpinRep) -> Result<f64> {
        let ell = spin.n() / 2;
        let pows = self.spinor_powers(spin, ell)?;
        let rank = self.twist.nrows();
        let mut worst: f64 = 0.0;
        for (i, mi) in self.m_terms.iter().enumerate().take(ell) {
            for pj in pows.iter().take(ell - i) {
                worst = worst
                    .max(supertrace_twisted(&(mi * kron(pj, &self.twist)), spin, rank)?.norm());
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::build_spin_rep;
    use crate::geometry::{TwistKind, Vec3};
    use crate::heatkernel::{KernelField, Parametrix};
    use crate::stochastic::{sample_bridge, sample_path, PathOptions, RandomSource};

    fn torus() -> Surface {
        Surface::Torus {
            l1: 2.0 * std::f64::consts::PI,
            l2: 2.0 * std::f64::consts::PI,
        }
    }

    #[test]
    fn flat_trivial_factors_are_identity() {
        let s = torus();
        let spin = build_spin_rep(2).unwrap();
        let tw = TwistBundle::trivial(&s);
        let mut rng = RandomSource::new(3).stream(0);
        let path = sample_path(
            &s,
            &Vec3::new(1.0, 2.0, 0.0),
            0.3,
            &PathOptions::default(),
            &mut rng,
        )
        .unwrap();
        let st = evolve_transport(&path, &spin, &tw, &s, 2).unwrap();
        let id = CMat::identity(2, 2);
        assert!(max_abs(&(&st.tau - &id)) < 1e-8);
        assert!(max_abs(&(&st.m - &id)) < 1e-8);
        assert!((st.r - 1.0).abs() < 1e-12);
        assert!(st.valid);
    }

    #[test]
    fn magnetic_curvature_factor_matches_closed_form() {
        let s = torus();
        let spin = build_spin_rep(2).unwrap();
        let tw = TwistBundle::new(TwistKind::Magnetic { c: 2 }, &s).unwrap();
        let t = 0.2;
        let mut rng = RandomSource::new(5).stream(1);
        let path = sample_path(
            &s,
            &Vec3::new(1.0, 2.0, 0.0),
            t,
            &PathOptions::default(),
            &mut rng,
        )
        .unwrap();
        let st = evolve_transport(&path, &spin, &tw, &s, 3).unwrap();
        let exact = crate::clifford::expm(
            &(kron(spin.pair(0, 1), &tw.curvature(&Vec3::zeros())) * Complex64::new(-0.5 * t, 0.0)),
        );
        assert!(max_abs(&(&st.m - &exact)) < 1e-10);
        let dev = max_abs(&(&st.m - CMat::identity(2, 2)));
        assert!(dev <= 0.5 * tw.field * t * 1.05, "{dev}");
        let dyson: CMat = st.m_terms.iter().sum();
        assert!(max_abs(&(&dyson - &st.m)) < 1e-5);
    }

    #[test]
    fn sphere_loop_transport_is_unitary_and_cancels() {
        let s = Surface::Sphere { radius: 1.0, q: 1 };
        let spin = build_spin_rep(2).unwrap();
        let tw = TwistBundle::new(TwistKind::Monopole { k: 1 }, &s).unwrap();
        let kernel = KernelField::successive_approximation(&Parametrix::new(&s, 1).unwrap(), 0);
        let x = Vec3::new(0.6, 0.0, 0.8);
        let src = RandomSource::new(11);
        let start = std::time::Instant::now();
        for i in 0..50 {
            let path = sample_bridge(
                &s,
                &kernel,
                &x,
                &x,
                0.05,
                &PathOptions::default(),
                &mut src.stream(i),
            )
            .unwrap();
            assert!(s.distance(path.last(), &x).unwrap() < 1e-12);
            let st = evolve_transport(&path, &spin, &tw, &s, 3).unwrap();
            assert!(st.valid);
            assert!(st.r <= (0.05 * 2.0 / 8.0f64).exp());
            assert!(st.cancellation_defect(&spin).unwrap() < 1e-12);
            let full = st.supertrace(&spin).unwrap();
            let trunc = st.truncated_supertrace(&spin, 3).unwrap();
            assert!((full - trunc).norm() < 1e-5, "{full} {trunc}");
        }
        eprintln!("50 hopf bridges: {:?}", start.elapsed());
    }
}
