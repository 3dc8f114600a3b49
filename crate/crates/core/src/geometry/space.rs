//! Catalog of S¹-spaces `X` together with their quotients `M = X/S¹`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::chart::{atlas, OrbifoldChart};
use super::surface::{Point, Revolution, Surface, Vec3};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    FlatTorus,
    Hopf,
    HopfP2,
    Lens,
    Teardrop,
    Football,
}

impl SpaceKind {
    pub const ALL: [SpaceKind; 6] = [
        SpaceKind::FlatTorus,
        SpaceKind::Hopf,
        SpaceKind::HopfP2,
        SpaceKind::Lens,
        SpaceKind::Teardrop,
        SpaceKind::Football,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::FlatTorus => "flat-torus",
            SpaceKind::Hopf => "hopf",
            SpaceKind::HopfP2 => "hopf-p2",
            SpaceKind::Lens => "lens-q",
            SpaceKind::Teardrop => "teardrop-q",
            SpaceKind::Football => "football-q",
        }
    }

    /// Spaces on which only scalar-kernel tests are meaningful.
    pub fn scalar_only(self) -> bool {
        matches!(self, SpaceKind::Teardrop | SpaceKind::Football)
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        SpaceKind::ALL
            .into_iter()
            .find(|k| k.name() == s || k.name().trim_end_matches("-q") == s)
            .ok_or_else(|| Error::UnknownSpace(s.to_string()))
    }
}

/// Free parameters of catalog entries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CatalogParams {
    /// Isotropy order (teardrop, football) or lens order.
    pub q: u32,
    /// Radius of the base sphere.
    pub radius: f64,
    /// Torus side lengths.
    pub l1: f64,
    pub l2: f64,
}

impl Default for CatalogParams {
    fn default() -> Self {
        CatalogParams {
            q: 3,
            radius: 1.0,
            l1: 2.0 * PI,
            l2: 2.0 * PI,
        }
    }
}

impl CatalogParams {
    pub fn validate(&self) -> Result<()> {
        if self.q < 1 {
            return Err(Error::InvalidConfig("q must be at least 1".into()));
        }
        for (name, v) in [("radius", self.radius), ("l1", self.l1), ("l2", self.l2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Point of `X` in a local slice trivialization: a base point and a fiber
/// angle on which `e^{iζ}` acts by translation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XPoint {
    pub base: Point,
    pub fiber: f64,
}

impl XPoint {
    pub fn new(base: Point, fiber: f64) -> Self {
        XPoint { base, fiber }
    }

    /// `e^{iζ}·u`.
    pub fn act(&self, zeta: f64) -> Self {
        XPoint {
            base: self.base,
            fiber: (self.fiber + zeta).rem_euclid(2.0 * PI),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SOneSpace {
    pub kind: SpaceKind,
    pub params: CatalogParams,
    pub base: Surface,
    /// Weights `(w₁, w₂)` of the action on `S³ ⊂ ℂ²`; `None` for non-`S³` models.
    pub weights: Option<[f64; 2]>,
    /// Least isotropy order.
    pub p: u32,
    /// Euler number of the circle bundle after reparametrizing the action to
    /// be effective, so that `∫_M dω₀ = −2π·euler/p`.
    pub euler: f64,
    #[serde(skip)]
    atlas: Vec<OrbifoldChart>,
}

pub fn catalog(kind: SpaceKind, params: CatalogParams) -> Result<SOneSpace> {
    params.validate()?;
    let q = params.q;
    let sphere = Surface::Sphere {
        radius: params.radius,
        q: 1,
    };
    let (base, weights, p, euler) = match kind {
        SpaceKind::FlatTorus => (
            Surface::Torus {
                l1: params.l1,
                l2: params.l2,
            },
            None,
            1,
            0.0,
        ),
        SpaceKind::Hopf => (sphere, Some([1.0, 1.0]), 1, 1.0),
        SpaceKind::HopfP2 => (sphere, Some([2.0, 2.0]), 2, 1.0),
        SpaceKind::Lens => (sphere, Some([1.0 / q as f64, 1.0 / q as f64]), 1, q as f64),
        SpaceKind::Teardrop => {
            if q < 2 {
                return Err(Error::InvalidConfig("teardrop needs q >= 2".into()));
            }
            (
                Surface::Revolution(Revolution::teardrop(q)),
                Some([1.0, q as f64]),
                1,
                1.0 / q as f64,
            )
        }
        SpaceKind::Football => {
            if q < 2 {
                return Err(Error::InvalidConfig("football needs q >= 2".into()));
            }
            (
                Surface::Sphere {
                    radius: params.radius,
                    q,
                },
                None,
                1,
                0.0,
            )
        }
    };
    Ok(SOneSpace {
        kind,
        params,
        base,
        weights,
        p,
        euler,
        atlas: atlas(&base),
    })
}

pub fn catalog_by_name(name: &str, params: CatalogParams) -> Result<SOneSpace> {
    catalog(name.parse()?, params)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl SOneSpace {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn atlas(&self) -> &[OrbifoldChart] {
        &self.atlas
    }

    /// Order of the local group of `M` at `x` (effective part only).
    pub fn local_group_order(&self, x: &Point) -> u32 {
        self.base.isotropy(x)
    }

    /// `|H_u|` for any `u` over `x`, including the ineffective part.
    pub fn isotropy(&self, x: &Point) -> u32 {
        self.local_group_order(x) * self.p
    }

    /// Points whose local group is trivial.
    pub fn is_principal(&self, x: &Point) -> bool {
        self.local_group_order(x) == 1
    }

    /// Length of the orbit over `x`, measured by `ω₀`.
    pub fn orbit_length(&self, x: &Point) -> f64 {
        2.0 * PI / self.isotropy(x) as f64
    }

    /// Coefficient of `dω₀` against the area form of `M`.
    pub fn contact_curvature(&self, _x: &Point) -> f64 {
        -2.0 * PI * self.euler / (self.p as f64 * self.base.volume())
    }

    /// Stabilizer order of `z ∈ S³` under `θ ↦ (e^{iw₁θ}z₁, e^{iw₂θ}z₂)`.
    ///
    /// For integer weights the solutions of `e^{iw_jθ}z_j = z_j` over the
    /// nonzero coordinates form `(2π/g)ℤ` with `g` the gcd of those weights.
    /// For the lens space the action is the Hopf flow at speed `1/q` on
    /// `S³/Z_q`, and `e^{iθ/q}z = ζz` with `ζ^q = 1` forces `θ ∈ 2πℤ`.
    pub fn s3_stabilizer(&self, z: [Complex64; 2]) -> Result<u32> {
        let w = self
            .weights
            .ok_or(Error::Unsupported("S³ model", self.name().into()))?;
        if self.kind == SpaceKind::Lens {
            return Ok(1);
        }
        let mut g = 0u64;
        for (zj, wj) in z.iter().zip(w) {
            if zj.norm() > 1e-12 {
                g = gcd(g, wj.round().abs() as u64);
            }
        }
        Ok(g.max(1) as u32)
    }

    /// Orbit generator `T` at `z ∈ S³`.
    pub fn s3_generator(&self, z: [Complex64; 2]) -> Result<[Complex64; 2]> {
        let w = self
            .weights
            .ok_or(Error::Unsupported("S³ model", self.name().into()))?;
        let i = Complex64::i();
        Ok([i * w[0] * z[0], i * w[1] * z[1]])
    }

    /// `ω₀ = g(T, ·)/g(T, T)` for the round metric on `S³`, as a covector in
    /// `ℝ⁴ ≅ ℂ²` paired by `Re⟨·,·⟩`.
    pub fn s3_contact_form(&self, z: [Complex64; 2]) -> Result<[Complex64; 2]> {
        let t = self.s3_generator(z)?;
        let n2 = t[0].norm_sqr() + t[1].norm_sqr();
        Ok([t[0] / n2, t[1] / n2])
    }

    /// Number of points where the orbit through `z` meets the slice
    /// `{z₂ ∈ ℝ_{>0}}` through the exceptional orbit, counted by scanning.
    pub fn slice_hits(&self, z: [Complex64; 2], samples: usize) -> Result<usize> {
        let w = self
            .weights
            .ok_or(Error::Unsupported("S³ model", self.name().into()))?;
        let arg = |theta: f64| (Complex64::from_polar(1.0, w[1] * theta) * z[1]).arg();
        let mut hits = 0;
        let mut prev = arg(0.0);
        for k in 1..=samples {
            let cur = arg(2.0 * PI * k as f64 / samples as f64);
            // upward crossing of arg = 0 (not the ±π wrap)
            if prev < 0.0 && cur >= 0.0 && (cur - prev) < PI {
                hits += 1;
            }
            prev = cur;
        }
        Ok(hits)
    }

    /// Image of `z ∈ S³` in `M`.
    pub fn s3_project(&self, z: [Complex64; 2]) -> Result<Point> {
        match self.kind {
            SpaceKind::Hopf | SpaceKind::HopfP2 | SpaceKind::Lens => {
                let c = z[0] * z[1].conj();
                Ok(Vec3::new(
                    2.0 * c.re,
                    2.0 * c.im,
                    z[0].norm_sqr() - z[1].norm_sqr(),
                ))
            }
            SpaceKind::Teardrop => {
                let r = 2.0 * z[0].norm().atan2(z[1].norm());
                let phi = (z[0].powu(self.params.q) * z[1].conj())
                    .arg()
                    .rem_euclid(2.0 * PI);
                Ok(Vec3::new(r, phi, 0.0))
            }
            _ => Err(Error::Unsupported("S³ model", self.name().into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_s3(rng: &mut ChaCha8Rng) -> [Complex64; 2] {
        let v: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        [
            Complex64::new(v[0] / n, v[1] / n),
            Complex64::new(v[2] / n, v[3] / n),
        ]
    }

    #[test]
    fn names_round_trip() {
        for k in SpaceKind::ALL {
            assert_eq!(k.name().parse::<SpaceKind>().unwrap(), k);
        }
        assert!("klein".parse::<SpaceKind>().is_err());
    }

    #[test]
    fn isotropy_profiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = CatalogParams::default();
        let hopf = catalog(SpaceKind::Hopf, p).unwrap();
        let hopf2 = catalog(SpaceKind::HopfP2, p).unwrap();
        let tear = catalog(SpaceKind::Teardrop, p).unwrap();
        for _ in 0..100 {
            let z = random_s3(&mut rng);
            assert_eq!(hopf.s3_stabilizer(z).unwrap(), 1);
            assert_eq!(hopf2.s3_stabilizer(z).unwrap(), 2);
            assert_eq!(tear.s3_stabilizer(z).unwrap(), 1);
        }
        let exceptional = [Complex64::new(0.0, 0.0), Complex64::new(0.6, 0.8)];
        assert_eq!(tear.s3_stabilizer(exceptional).unwrap(), 3);
        let x = tear.s3_project(exceptional).unwrap();
        assert_eq!(tear.isotropy(&x), 3);
        assert_eq!(hopf2.p, 2);
        assert!((hopf2.orbit_length(&Vec3::z()) - PI).abs() < 1e-15);
    }

    #[test]
    fn contact_form_is_dual_to_orbits() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pair =
            |a: [Complex64; 2], b: [Complex64; 2]| (a[0].conj() * b[0] + a[1].conj() * b[1]).re;
        for kind in [
            SpaceKind::Hopf,
            SpaceKind::HopfP2,
            SpaceKind::Lens,
            SpaceKind::Teardrop,
        ] {
            let s = catalog(kind, CatalogParams::default()).unwrap();
            for _ in 0..50 {
                let z = random_s3(&mut rng);
                let t = s.s3_generator(z).unwrap();
                let w = s.s3_contact_form(z).unwrap();
                assert!((pair(w, t) - 1.0).abs() < 1e-12);
                // a horizontal vector: tangent to S³ and orthogonal to T
                let r = random_s3(&mut rng);
                let mut h = [r[0] - z[0] * pair(z, r), r[1] - z[1] * pair(z, r)];
                let tt = pair(t, t);
                let c = pair(t, h) / tt;
                h = [h[0] - t[0] * c, h[1] - t[1] * c];
                assert!(pair(w, h).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn generic_teardrop_orbit_meets_slice_q_times() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for q in [2, 3, 5] {
            let s = catalog(
                SpaceKind::Teardrop,
                CatalogParams {
                    q,
                    ..Default::default()
                },
            )
            .unwrap();
            for _ in 0..10 {
                let z = random_s3(&mut rng);
                assert_eq!(s.slice_hits(z, 20_000).unwrap(), q as usize);
            }
        }
    }

    #[test]
    fn projection_is_orbit_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = catalog(SpaceKind::Teardrop, CatalogParams::default()).unwrap();
        let z = random_s3(&mut rng);
        let w = s.weights.unwrap();
        let moved = [
            z[0] * Complex64::from_polar(1.0, w[0] * 0.7),
            z[1] * Complex64::from_polar(1.0, w[1] * 0.7),
        ];
        let (a, b) = (s.s3_project(z).unwrap(), s.s3_project(moved).unwrap());
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn football_has_cone_points_at_the_poles() {
        let s = catalog(
            SpaceKind::Football,
            CatalogParams {
                q: 2,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(s.isotropy(&Vec3::z()), 2);
        assert_eq!(s.isotropy(&(-Vec3::z())), 2);
        assert!(s.is_principal(&Vec3::x()));
    }
}
