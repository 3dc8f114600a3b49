//! Quadrature nodes shared across modules.

use gauss_quad::legendre::GaussLegendre;

/// Gauss–Legendre nodes and weights on `[−1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    if n < 2 {
        return vec![(0.0, 2.0)];
    }
    let rule = GaussLegendre::new(n).expect("degree checked above");
    let mut v: Vec<(f64, f64)> = rule.into_iter().collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    gauss_legendre(n)
        .into_iter()
        .map(|(x, w)| (m + h * x, h * w))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let s: f64 = gauss_legendre_on(0.0, 2.0, 5)
            .iter()
            .map(|(x, w)| w * x.powi(9))
            .sum();
        assert!((s - 2f64.powi(10) / 10.0).abs() < 1e-11);
    }
}
