//! Seeded random inputs. Every sample draws from its own ChaCha stream, so a
//! sample depends only on `(seed, family, index)` and not on evaluation order.

use calderon_core::elliptic1d::OperatorSpec1D;
use calderon_core::linalg::{self, CMat};
use calderon_core::poly::{Mat, MatPoly};
use calderon_core::scale::{FourierScale, ScaleOperator};
use calderon_core::Result;
use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sample families; each gets a disjoint range of ChaCha streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Idempotent = 1,
    LineSampling = 2,
    ProjectorPair = 3,
    EllipticSpec = 4,
    PolynomialPair = 5,
    ScaleOperator = 6,
}

pub fn stream(seed: u64, family: Family, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(((family as u64) << 40) | index);
    r
}

/// Symmetric bounded variate, the mean of four uniforms on `[-2, 2]`.
pub fn centered(r: &mut ChaCha8Rng) -> f64 {
    (0..4).map(|_| r.random_range(-1.0..1.0)).sum::<f64>() / 2.0
}

pub fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat<f64> {
    DMatrix::from_fn(rows, cols, |_, _| Complex::new(centered(r), centered(r)))
}

/// Hermitian positive definite with spectrum in roughly `[0.5, 4]`.
pub fn random_gram(r: &mut ChaCha8Rng, n: usize) -> CMat<f64> {
    let b = random_matrix(r, n, n) * Complex::new(0.6 / (n as f64).sqrt(), 0.0);
    let mut g = b.adjoint() * &b;
    for i in 0..n {
        g[(i, i)] += Complex::new(0.5, 0.0);
    }
    (&g + g.adjoint()) * Complex::new(0.5, 0.0)
}

/// `I + E` with `||E|| = spread < 1`.
pub fn random_invertible(r: &mut ChaCha8Rng, n: usize, spread: f64) -> CMat<f64> {
    let e = random_matrix(r, n, n);
    let norm = linalg::spectral_norm(&e).max(1e-12);
    CMat::identity(n, n) + e * Complex::new(spread / norm, 0.0)
}

/// `S diag(1,..,1,0,..,0) S^{-1}`; the first `rank` columns of `S` span its image.
pub fn idempotent_from(s: &CMat<f64>, rank: usize) -> Option<CMat<f64>> {
    let n = s.nrows();
    let mut d = CMat::zeros(n, n);
    for i in 0..rank {
        d[(i, i)] = Complex::new(1.0, 0.0);
    }
    Some(s * d * s.clone().try_inverse()?)
}

/// An idempotent sample with the data needed to check it.
#[derive(Debug, Clone)]
pub struct IdempotentSample {
    pub dim: usize,
    pub rank: usize,
    /// Gram matrix of the inner product; `None` for the standard one.
    pub gram: Option<CMat<f64>>,
    /// Columns `0..rank` span the image.
    pub frame: CMat<f64>,
    pub table: CMat<f64>,
}

/// Odd indices use a random Gram matrix, even ones the standard product.
pub fn idempotent(seed: u64, index: u64, dim_min: usize, dim_max: usize) -> IdempotentSample {
    let mut r = stream(seed, Family::Idempotent, index);
    let dim = r.random_range(dim_min..=dim_max);
    let rank = r.random_range(0..=dim);
    let gram = (index % 2 == 1).then(|| random_gram(&mut r, dim));
    let frame = random_invertible(&mut r, dim, 0.8);
    let table = idempotent_from(&frame, rank).expect("I + E with ||E|| < 1 is invertible");
    IdempotentSample {
        dim,
        rank,
        gram,
        frame,
        table,
    }
}

/// Two idempotents of equal rank, the second a perturbation of the first.
#[derive(Debug, Clone)]
pub struct ProjectorPair {
    pub dim: usize,
    pub rank: usize,
    pub gram: Option<CMat<f64>>,
    pub perturbation: f64,
    pub base: CMat<f64>,
    pub moved: CMat<f64>,
}

pub fn projector_pair(seed: u64, index: u64, dim_max: usize) -> ProjectorPair {
    let mut r = stream(seed, Family::ProjectorPair, index);
    loop {
        let dim = r.random_range(2..=dim_max);
        let rank = r.random_range(0..=dim);
        let gram = (index % 2 == 1).then(|| random_gram(&mut r, dim));
        let perturbation = 10f64.powf(r.random_range(-6.0..-0.5));
        let s0 = random_invertible(&mut r, dim, 0.6);
        let s1 = &s0 + random_matrix(&mut r, dim, dim) * Complex::new(perturbation, 0.0);
        if let (Some(base), Some(moved)) = (idempotent_from(&s0, rank), idempotent_from(&s1, rank)) {
            return ProjectorPair {
                dim,
                rank,
                gram,
                perturbation,
                base,
                moved,
            };
        }
    }
}

fn random_poly(r: &mut ChaCha8Rng, rows: usize, cols: usize, degree: usize, scale: f64) -> MatPoly<f64> {
    let coeffs = (0..=degree)
        .map(|_| Mat {
            rows,
            cols,
            data: (0..rows * cols)
                .map(|_| Complex::new(scale * r.random_range(-1.0..1.0), scale * r.random_range(-1.0..1.0)))
                .collect(),
        })
        .collect();
    MatPoly::from_coeffs(rows, cols, coeffs).expect("consistent shapes")
}

/// Elliptic operator of order `1..=3` on `C^1` or `C^2` with quadratic lower
/// order coefficients and leading coefficient `c I + small`, `|c| >= 1`.
pub fn elliptic_spec(seed: u64, index: u64) -> Result<OperatorSpec1D<f64>> {
    let mut r = stream(seed, Family::EllipticSpec, index);
    let d = r.random_range(1..=3usize);
    let m = r.random_range(1..=2usize);
    let mut coeffs: Vec<MatPoly<f64>> = (0..d).map(|_| random_poly(&mut r, m, m, 2, 1.0)).collect();
    let sign = if r.random_bool(0.5) { 1.0 } else { -1.0 };
    let lead = MatPoly::scalar(m, &[Complex::new(sign * r.random_range(1.0..2.0), r.random_range(-0.5..0.5))])
        .add(&random_poly(&mut r, m, m, 1, 0.2));
    coeffs.push(lead);
    let spec = OperatorSpec1D::new(d, m, coeffs)?;
    spec.ellipticity::<f64>()?;
    Ok(spec)
}

/// Pairs of `C^m`-valued polynomials of degree at most 5.
pub fn polynomial_pairs(seed: u64, index: u64, m: usize, count: usize) -> Vec<(MatPoly<f64>, MatPoly<f64>)> {
    let mut r = stream(seed, Family::PolynomialPair, index);
    (0..count)
        .map(|_| {
            let (du, dv) = (r.random_range(0..=5), r.random_range(0..=5));
            (random_poly(&mut r, m, 1, du, 1.0), random_poly(&mut r, m, 1, dv, 1.0))
        })
        .collect()
}

/// Hermitian operator with cutoff drawn from `0..=k_max`, a duality level in
/// `(0, level_range]` and `triples` sorted level triples in `[-level_range, level_range]`.
#[derive(Debug, Clone)]
pub struct ScaleSample {
    pub op: ScaleOperator<f64>,
    pub t: f64,
    pub triples: Vec<[f64; 3]>,
}

pub fn scale_sample(
    seed: u64,
    index: u64,
    k_max: usize,
    fiber: usize,
    triples: usize,
    level_range: f64,
) -> Result<ScaleSample> {
    let mut r = stream(seed, Family::ScaleOperator, index);
    let scale = FourierScale::new(r.random_range(0..=k_max), fiber)?;
    let a = random_matrix(&mut r, scale.dim(), scale.dim());
    let h = (&a + a.adjoint()) * Complex::new(0.5, 0.0);
    let op = ScaleOperator::new(scale, h, true)?;
    let t = level_range * (1.0 - r.random_range(0.0..1.0));
    let mut out = Vec::with_capacity(triples);
    while out.len() < triples {
        let mut v = [0.0; 3].map(|_| r.random_range(-level_range..level_range));
        v.sort_by(f64::total_cmp);
        if v[0] < v[1] && v[1] < v[2] {
            out.push(v);
        }
    }
    Ok(ScaleSample { op, t, triples: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_depend_only_on_seed_and_index() {
        let a = idempotent(5, 17, 2, 20);
        let b = idempotent(5, 17, 2, 20);
        assert_eq!(a.table, b.table);
        assert_ne!(idempotent(6, 17, 2, 20).table, a.table);
        assert_eq!(elliptic_spec(1, 3).unwrap(), elliptic_spec(1, 3).unwrap());
    }

    #[test]
    fn idempotents_are_idempotent() {
        for i in 0..20 {
            let s = idempotent(1, i, 2, 10);
            let p = &s.table;
            assert!(linalg::spectral_norm(&(p * p - p)) < 1e-10);
            assert_eq!(s.gram.is_some(), i % 2 == 1);
        }
    }

    #[test]
    fn scale_triples_are_sorted() {
        let s = scale_sample(1, 0, 4, 1, 5, 3.0).unwrap();
        assert_eq!(s.triples.len(), 5);
        assert!(s.t > 0.0 && s.t <= 3.0);
        assert!(s.triples.iter().all(|v| v[0] < v[1] && v[1] < v[2]));
    }
}
