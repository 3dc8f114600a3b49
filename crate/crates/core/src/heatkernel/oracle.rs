//! Independent closed-form heat kernels (generator `½Δ`) used as references.

use std::f64::consts::PI;

/// Wrapped Gaussian on a circle of the given length.
pub fn circle(t: f64, dx: f64, length: f64) -> f64 {
    let mut s = 0.0;
    let reach = (40.0 * t).sqrt() / length + 1.0;
    let kmax = reach.ceil() as i64;
    for k in -kmax..=kmax {
        let d = dx + k as f64 * length;
        s += (-d * d / (2.0 * t)).exp();
    }
    s / (2.0 * PI * t).sqrt()
}

/// Flat torus kernel as a product of two wrapped Gaussians.
pub fn torus(t: f64, dx: f64, dy: f64, l1: f64, l2: f64) -> f64 {
    circle(t, dx, l1) * circle(t, dy, l2)
}

/// Unit-sphere kernel by its Legendre expansion
/// `Σ_l (2l+1) e^{−l(l+1)t/2} P_l(cos d) / 4π`.
///
/// Loses relative accuracy once the value falls below about `1e−10` of the
/// diagonal, through cancellation between terms.
pub fn sphere_legendre(t: f64, d: f64) -> f64 {
    let x = d.cos();
    let (mut p0, mut p1) = (1.0, x);
    let mut s = 1.0 + 3.0 * (-t).exp() * x;
    let mut l = 1usize;
    loop {
        let lf = l as f64;
        let p2 = ((2.0 * lf + 1.0) * x * p1 - lf * p0) / (lf + 1.0);
        l += 1;
        let lf = l as f64;
        let w = (2.0 * lf + 1.0) * (-lf * (lf + 1.0) * t / 2.0).exp();
        s += w * p2;
        p0 = p1;
        p1 = p2;
        if w < 1e-18 * s.abs().max(1e-300) || l > 20_000 {
            break;
        }
    }
    s / (4.0 * PI)
}

/// Unit-sphere kernel from McKean's integral over windings,
/// `√2 e^{t/8} (2πt)^{-3/2} Σ_k (−1)^k ∫_d^π u e^{−u²/2t} (cos d − cos s)^{-1/2} ds`
/// with `u = s + 2πk`. The integrand has one sign, so the value keeps its
/// relative accuracy out to the antipode.
pub fn sphere_mckean(t: f64, d: f64) -> f64 {
    let d = d.clamp(0.0, PI);
    let span = PI - d;
    if span < 1e-12 {
        return sphere_mckean(t, PI - 1e-9);
    }
    // s = d + (π − d)w² removes the inverse square-root endpoint.
    let panels = 64;
    let mut total = 0.0;
    for k in 0..panels {
        let (a, b) = (k as f64 / panels as f64, (k + 1) as f64 / panels as f64);
        for (w, ww) in crate::geometry::quad::gauss_legendre_on(a, b, 16) {
            let s = d + span * w * w;
            let ds = 2.0 * span * w;
            let den = (2.0 * ((s + d) / 2.0).sin() * ((s - d) / 2.0).sin()).sqrt();
            if den == 0.0 {
                continue;
            }
            let mut g = 0.0;
            for j in -3i32..=3 {
                let u = s + 2.0 * PI * j as f64;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                g += sign * u * (-u * u / (2.0 * t)).exp();
            }
            total += ww * ds * g / den;
        }
    }
    2f64.sqrt() * (t / 8.0).exp() * (2.0 * PI * t).powf(-1.5) * total
}

/// Kernel on a sphere of radius `rho` via scaling.
pub fn sphere(t: f64, d: f64, rho: f64) -> f64 {
    sphere_mckean(t / (rho * rho), d / rho) / (rho * rho)
}

/// Largest distance at which [`sphere_legendre`] is trusted at time `t`:
/// the Gaussian factor `e^{−d²/2t}` must stay above `1e−8`.
pub fn sphere_resolvable_distance(t: f64) -> f64 {
    (2.0 * t * 1e8f64.ln()).sqrt().min(2.5)
}
