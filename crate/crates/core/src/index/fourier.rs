//! Fourier components `Ω_m` of sections over `X` along the circle action.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{SOneSpace, TwistBundle, TwistKind, XPoint};

/// Trapezoidal projector onto `Ω_m = {θ : θ(u·e^{iζ}) = e^{−imζ}θ(u)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FourierProjector {
    /// Number of circle nodes `K`.
    pub nodes: usize,
}

impl Default for FourierProjector {
    fn default() -> Self {
        FourierProjector { nodes: 32 }
    }
}

impl FourierProjector {
    pub fn new(nodes: usize) -> Result<Self> {
        if nodes < 4 {
            return Err(Error::InvalidConfig(format!(
                "circle quadrature needs at least 4 nodes, got {nodes}"
            )));
        }
        Ok(FourierProjector { nodes })
    }

    /// Largest `|m|` the rule separates from zero.
    pub fn resolved_modes(&self) -> usize {
        self.nodes / 2 - 1
    }

    /// `θ_m(u) = (1/2π)∫ θ(u·e^{iζ}) e^{imζ} dζ` at one point.
    pub fn component<F>(&self, section: &F, m: i64, u: &XPoint) -> Result<DVector<Complex64>>
    where
        F: Fn(&XPoint) -> DVector<Complex64>,
    {
        if self.nodes < 4 * (m.unsigned_abs() as usize + 1) {
            return Err(Error::InvalidConfig(format!(
                "K = {} too small for mode {m}",
                self.nodes
            )));
        }
        let k = self.nodes;
        let mut acc: Option<DVector<Complex64>> = None;
        for j in 0..k {
            let zeta = 2.0 * PI * j as f64 / k as f64;
            let w = Complex64::from_polar(1.0 / k as f64, m as f64 * zeta);
            let v = section(&u.act(zeta)) * w;
            acc = Some(match acc {
                Some(a) => a + v,
                None => v,
            });
        }
        Ok(acc.expect("at least four nodes"))
    }

    /// Projected section `u ↦ θ_m(u)`.
    pub fn project<'a, F>(
        &'a self,
        section: &'a F,
        m: i64,
    ) -> impl Fn(&XPoint) -> DVector<Complex64> + 'a
    where
        F: Fn(&XPoint) -> DVector<Complex64>,
    {
        move |u| {
            self.component(section, m, u)
                .expect("mode checked against K by caller")
        }
    }
}

/// Degree of the line bundle on `M` whose sections are the `Ω_m` part of
/// the pulled-back twist: `k + m·e/p`.
pub fn descended_degree(space: &SOneSpace, twist: &TwistBundle, m: i64) -> f64 {
    twist.degree() as f64 + m as f64 * space.euler / space.p as f64
}

/// The twist on `M` realizing `Ω_m`; only integral degrees descend.
pub fn descended_twist(space: &SOneSpace, twist: &TwistBundle, m: i64) -> Result<TwistBundle> {
    let d = descended_degree(space, twist, m);
    if (d - d.round()).abs() > 1e-12 {
        return Err(Error::Unsupported(
            "non-integral descended degree",
            format!("{d}"),
        ));
    }
    let kind = match twist.kind {
        TwistKind::Trivial { rank } if d == 0.0 => TwistKind::Trivial { rank },
        _ => TwistKind::of_degree(space, d.round() as i64),
    };
    TwistBundle::new(kind, &space.base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::surface::from_sph;

    fn mode(m: i64) -> impl Fn(&XPoint) -> DVector<Complex64> {
        move |u: &XPoint| {
            let f = 1.0 + u.base.z;
            DVector::from_vec(vec![
                Complex64::from_polar(f, -(m as f64) * u.fiber),
                Complex64::new(0.5 * f, 0.0),
            ])
        }
    }

    #[test]
    fn invariant_input_is_unchanged() {
        let p = FourierProjector::default();
        let s = mode(0);
        let u = XPoint::new(from_sph(0.4, 1.0), 0.7);
        assert!((p.component(&s, 0, &u).unwrap() - s(&u)).norm() < 1e-12);
    }

    #[test]
    fn nonzero_mode_is_annihilated() {
        let p = FourierProjector::new(12).unwrap();
        let s = mode(2);
        let u = XPoint::new(from_sph(1.1, 0.2), 2.5);
        let v = p.component(&s, 0, &u).unwrap();
        assert!((v[0]).norm() < 1e-12);
        // The second component is invariant and survives.
        assert!((v[1] - s(&u)[1]).norm() < 1e-12);
    }

    #[test]
    fn too_few_nodes_rejected() {
        let p = FourierProjector::new(8).unwrap();
        assert!(p
            .component(&mode(0), 2, &XPoint::new(from_sph(1.0, 0.0), 0.0))
            .is_err());
    }
}
