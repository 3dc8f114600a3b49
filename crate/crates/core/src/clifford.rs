//! Complex spin representation of `Cl(ℝⁿ)` for even `n`.
//!
//! Generators are built from Pauli blocks, `c(e_{2k−1}) = i·σ₃^{⊗(k−1)} ⊗ σ₁ ⊗ I`,
//! `c(e_{2k}) = i·σ₃^{⊗(k−1)} ⊗ σ₂ ⊗ I`, so that `c(e_j)² = −I` and every
//! product `c(e_{2k−1})c(e_{2k})` is diagonal. The grading `Γ = i^ℓ c(e₁)…c(e_n)`
//! is then diagonal with entries `±1`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug)]
pub struct SpinRep {
    n: usize,
    dim: usize,
    generators: Vec<CMat>,
    /// Diagonal of Γ (each entry ±1).
    grading: Vec<f64>,
    /// `pairs[i*n + j] = c(e_i)c(e_j)`, cached for `dstar`.
    pairs: Vec<CMat>,
}

fn kron_all(factors: &[CMat]) -> CMat {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| acc.kronecker(f))
}

/// Builds the spin representation for even `n` in `2..=8`.
pub fn build_spin_rep(n: usize) -> Result<SpinRep> {
    if n % 2 != 0 {
        return Err(Error::InvalidDimension {
            n,
            reason: "spin representation needs even n",
        });
    }
    if !(2..=8).contains(&n) {
        return Err(Error::InvalidDimension {
            n,
            reason: "supported range is 2..=8",
        });
    }
    let l = n / 2;
    let id2 = CMat::identity(2, 2);
    let s1 = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let s2 = CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
    let s3 = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);

    let mut generators = Vec::with_capacity(n);
    for k in 0..l {
        for sigma in [&s1, &s2] {
            let factors: Vec<CMat> = (0..l)
                .map(|j| match j.cmp(&k) {
                    std::cmp::Ordering::Less => s3.clone(),
                    std::cmp::Ordering::Equal => sigma.clone(),
                    std::cmp::Ordering::Greater => id2.clone(),
                })
                .collect();
            generators.push(kron_all(&factors) * I);
        }
    }
    let dim = 1usize << l;
    let mut gamma = CMat::identity(dim, dim) * I.powu(l as u32);
    for g in &generators {
        gamma *= g;
    }
    let grading: Vec<f64> = (0..dim).map(|i| gamma[(i, i)].re).collect();
    debug_assert!(gamma.iter().enumerate().all(|(idx, z)| {
        let (r, c) = (idx % dim, idx / dim);
        if r == c {
            (z.re.abs() - 1.0).abs() < 1e-14 && z.im.abs() < 1e-14
        } else {
            z.norm() < 1e-14
        }
    }));

    let mut pairs = Vec::with_capacity(n * n);
    for a in &generators {
        for b in &generators {
            pairs.push(a * b);
        }
    }
    Ok(SpinRep {
        n,
        dim,
        generators,
        grading,
        pairs,
    })
}

impl SpinRep {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total spinor dimension `2^{n/2}`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_dim(&self) -> usize {
        self.dim / 2
    }

    pub fn generator(&self, i: usize) -> &CMat {
        &self.generators[i]
    }

    pub fn generators(&self) -> &[CMat] {
        &self.generators
    }

    /// `c(e_i)c(e_j)`.
    pub fn pair(&self, i: usize, j: usize) -> &CMat {
        &self.pairs[i * self.n + j]
    }

    pub fn grading_diag(&self) -> &[f64] {
        &self.grading
    }

    pub fn grading(&self) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dim,
            self.grading.iter().map(|&g| Complex64::new(g, 0.0)),
        ))
    }

    /// Clifford multiplication by a real vector.
    pub fn clifford(&self, v: &[f64]) -> CMat {
        let mut out = CMat::zeros(self.dim, self.dim);
        for (g, &x) in self.generators.iter().zip(v) {
            out += g * Complex64::new(x, 0.0);
        }
        out
    }
}

/// Real antisymmetric matrix, an element of `so(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix(DMatrix<f64>);

impl SkewMatrix {
    /// Accepts only exactly antisymmetric input.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let defect = (&m + m.transpose()).amax();
        if defect != 0.0 {
            return Err(Error::NotSkew { defect });
        }
        Ok(SkewMatrix(m))
    }

    /// Antisymmetrizes `m`, i.e. returns `(m − mᵀ)/2`.
    pub fn skew_part(m: &DMatrix<f64>) -> Self {
        let mut a = (m - m.transpose()) * 0.5;
        for i in 0..a.nrows() {
            a[(i, i)] = 0.0;
            for j in 0..i {
                a[(i, j)] = -a[(j, i)];
            }
        }
        SkewMatrix(a)
    }

    pub fn zeros(n: usize) -> Self {
        SkewMatrix(DMatrix::zeros(n, n))
    }

    /// `θ (e₂⊗e₁ − e₁⊗e₂)`: the generator of rotation by `θ` in the `e₁e₂` plane.
    pub fn plane(n: usize, i: usize, j: usize, theta: f64) -> Self {
        let mut a = DMatrix::zeros(n, n);
        a[(j, i)] = theta;
        a[(i, j)] = -theta;
        SkewMatrix(a)
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        SkewMatrix(&self.0 * s)
    }

    pub fn commutator(&self, other: &SkewMatrix) -> SkewMatrix {
        SkewMatrix::skew_part(&(&self.0 * &other.0 - &other.0 * &self.0))
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

/// `D*A = ¼ Σ_{ij} a_ij c(e_i)c(e_j)`.
///
/// With `c(v)² = −|v|²` this satisfies `[D*A, c(w)] = −c(Aw)`, so
/// `exp(D*A) c(w) exp(−D*A) = c(e^{−A}w)` and `A ↦ D*A` reverses brackets:
/// `[D*A, D*B] = D*[B, A]`.
pub fn dstar(a: &SkewMatrix, rep: &SpinRep) -> Result<CMat> {
    let n = rep.n();
    if a.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.n(),
        });
    }
    let mut out = CMat::zeros(rep.dim(), rep.dim());
    for i in 0..n {
        for j in 0..n {
            let aij = a.0[(i, j)];
            if aij != 0.0 {
                out += rep.pair(i, j) * Complex64::new(0.25 * aij, 0.0);
            }
        }
    }
    Ok(out)
}

/// `tr(Γ·op)`: trace over `Δ⁺` minus trace over `Δ⁻`.
pub fn supertrace(op: &CMat, rep: &SpinRep) -> Result<Complex64> {
    if op.nrows() != rep.dim() || op.ncols() != rep.dim() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim(),
            got: op.nrows(),
        });
    }
    Ok(rep
        .grading
        .iter()
        .enumerate()
        .map(|(i, &g)| op[(i, i)] * g)
        .sum())
}

/// Supertrace on `Δ ⊗ ξ` with the grading `Γ ⊗ I`; `op` is laid out as
/// `kron(spin, twist)`.
pub fn supertrace_twisted(op: &CMat, rep: &SpinRep, rank: usize) -> Result<Complex64> {
    let d = rep.dim() * rank;
    if op.nrows() != d || op.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: op.nrows(),
        });
    }
    let mut s = ZERO;
    for (a, &g) in rep.grading.iter().enumerate() {
        for b in 0..rank {
            let i = a * rank + b;
            s += op[(i, i)] * g;
        }
    }
    Ok(s)
}

#[derive(Clone, Debug)]
pub struct SpinExp {
    /// `Σ_{k ≤ order} (D*A)^k / k!`
    pub truncated: CMat,
    pub full: CMat,
}

/// Truncated exponential series of `D*A` together with the full exponential.
pub fn spin_exp(a: &SkewMatrix, rep: &SpinRep, order: usize) -> Result<SpinExp> {
    let d = dstar(a, rep)?;
    let mut truncated = CMat::identity(rep.dim(), rep.dim());
    let mut term = truncated.clone();
    for k in 1..=order {
        term = &term * &d / Complex64::new(k as f64, 0.0);
        truncated += &term;
    }
    Ok(SpinExp {
        truncated,
        full: expm(&d),
    })
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * n as f64;
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / Complex64::new(2f64.powi(squarings), 0.0);
    let mut out = CMat::identity(n, n);
    let mut term = out.clone();
    for k in 1..=18 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        out += &term;
    }
    for _ in 0..squarings {
        out = &out * &out;
    }
    out
}

/// Entrywise maximum modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_skew(n: usize, rng: &mut ChaCha8Rng, integer: bool) -> SkewMatrix {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = if integer {
                    rng.random_range(-3i32..=3) as f64
                } else {
                    rng.random_range(-1.0..1.0)
                };
                m[(i, j)] = v;
                m[(j, i)] = -v;
            }
        }
        SkewMatrix::new(m).unwrap()
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(build_spin_rep(3).is_err());
        assert!(build_spin_rep(0).is_err());
        assert!(build_spin_rep(10).is_err());
    }

    #[test]
    fn defining_relations() {
        for n in [2, 4, 6, 8] {
            let rep = build_spin_rep(n).unwrap();
            assert_eq!(rep.dim(), 1 << (n / 2));
            let gamma = rep.grading();
            for i in 0..n {
                for j in 0..n {
                    let ac = rep.pair(i, j) + rep.pair(j, i);
                    let expect = if i == j { -2.0 } else { 0.0 };
                    let defect = max_abs(
                        &(ac - CMat::identity(rep.dim(), rep.dim()) * Complex64::new(expect, 0.0)),
                    );
                    assert!(defect < 1e-14, "n={n} i={i} j={j}");
                }
                let anti = &gamma * rep.generator(i) + rep.generator(i) * &gamma;
                assert!(max_abs(&anti) < 1e-14);
            }
            let plus = rep.grading_diag().iter().filter(|&&g| g > 0.0).count();
            assert_eq!(plus, rep.half_dim());
        }
    }

    #[test]
    fn two_dimensional_orientation() {
        let rep = build_spin_rep(2).unwrap();
        let s = supertrace(rep.pair(0, 1), &rep).unwrap();
        assert!((s - Complex64::new(0.0, -2.0)).norm() < 1e-15);
        assert_eq!(rep.grading_diag(), &[1.0, -1.0]);
    }

    #[test]
    fn top_form_supertrace() {
        for n in [2, 4, 6] {
            let rep = build_spin_rep(n).unwrap();
            let mut p = CMat::identity(rep.dim(), rep.dim());
            for g in rep.generators() {
                p *= g;
            }
            let l = (n / 2) as u32;
            let expect = Complex64::new(0.0, -2.0).powu(l);
            assert!((supertrace(&p, &rep).unwrap() - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn dstar_reverses_brackets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 4, 6] {
            let rep = build_spin_rep(n).unwrap();
            for _ in 0..20 {
                let a = random_skew(n, &mut rng, true);
                let b = random_skew(n, &mut rng, true);
                let da = dstar(&a, &rep).unwrap();
                let db = dstar(&b, &rep).unwrap();
                let lhs = &da * &db - &db * &da;
                let rhs = dstar(&b.commutator(&a), &rep).unwrap();
                assert!(max_abs(&(lhs - rhs)) < 1e-12);
            }
        }
    }

    #[test]
    fn dstar_conjugates_clifford_by_minus_a() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rep = build_spin_rep(4).unwrap();
        let a = random_skew(4, &mut rng, false);
        let u = spin_exp(&a, &rep, 0).unwrap().full;
        let uinv = spin_exp(&a.scale(-1.0), &rep, 0).unwrap().full;
        let w = [0.3, -1.2, 0.7, 0.1];
        let rot = expm(&a.matrix().map(|x| Complex64::new(-x, 0.0)));
        let rw: Vec<f64> = (0..4)
            .map(|i| (0..4).map(|j| rot[(i, j)].re * w[j]).sum())
            .collect();
        let lhs = &u * rep.clifford(&w) * &uinv;
        assert!(max_abs(&(lhs - rep.clifford(&rw))) < 1e-12);
    }

    #[test]
    fn short_products_have_zero_supertrace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2, 4, 6] {
            let rep = build_spin_rep(n).unwrap();
            let l = n / 2;
            for _ in 0..200 {
                let k = rng.random_range(0..l);
                let mut p = CMat::identity(rep.dim(), rep.dim());
                for _ in 0..k {
                    p *= dstar(&random_skew(n, &mut rng, false), &rep).unwrap();
                }
                assert!(supertrace(&p, &rep).unwrap().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_and_generators_are_supertraceless() {
        let rep = build_spin_rep(4).unwrap();
        assert!(supertrace(&CMat::identity(4, 4), &rep).unwrap().norm() < 1e-15);
        for g in rep.generators() {
            assert!(supertrace(g, &rep).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn full_turn_is_minus_identity() {
        let rep = build_spin_rep(2).unwrap();
        let a = SkewMatrix::plane(2, 0, 1, 2.0 * std::f64::consts::PI);
        let u = spin_exp(&a, &rep, 0).unwrap().full;
        assert!(max_abs(&(u + CMat::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn spin_exp_is_unitary_and_truncation_converges() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rep = build_spin_rep(4).unwrap();
        let a = random_skew(4, &mut rng, false);
        let e = spin_exp(&a, &rep, 2).unwrap();
        let defect = &e.full.adjoint() * &e.full - CMat::identity(4, 4);
        assert!(max_abs(&defect) < 1e-12);
        // Error of the order-2 truncation scales like |A|³.
        let errs: Vec<f64> = (0..4)
            .map(|k| {
                let s = a.scale(0.5f64.powi(k + 2));
                let e = spin_exp(&s, &rep, 2).unwrap();
                max_abs(&(e.full - e.truncated))
            })
            .collect();
        for w in errs.windows(2) {
            let slope = (w[0] / w[1]).log2();
            assert!((slope - 3.0).abs() < 0.2, "slope {slope}");
        }
    }

    #[test]
    fn skew_validation() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!(SkewMatrix::new(m).is_ok());
        let bad = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(SkewMatrix::new(bad).is_err());
    }
}
