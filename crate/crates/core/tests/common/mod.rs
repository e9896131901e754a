#![allow(dead_code)]

use calderon_core::linalg::CMat;
use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_like(rng: &mut ChaCha8Rng) -> f64 {
    // sum of uniforms: cheap, symmetric, bounded
    (0..4).map(|_| rng.random_range(-1.0..1.0)).sum::<f64>() / 2.0
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat<f64> {
    DMatrix::from_fn(rows, cols, |_, _| Complex::new(gaussian_like(rng), gaussian_like(rng)))
}

/// Hermitian positive definite with eigenvalues in roughly [0.5, 4].
pub fn random_gram(rng: &mut ChaCha8Rng, n: usize) -> CMat<f64> {
    let b = random_matrix(rng, n, n) * Complex::new(0.6 / (n as f64).sqrt(), 0.0);
    let mut g = b.adjoint() * &b;
    for i in 0..n {
        g[(i, i)] += Complex::new(0.5, 0.0);
    }
    (&g + g.adjoint()) * Complex::new(0.5, 0.0)
}

/// Well-conditioned invertible matrix `I + E` with `||E|| < 1`.
pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize, spread: f64) -> CMat<f64> {
    let e = random_matrix(rng, n, n);
    let norm = calderon_core::linalg::spectral_norm(&e).max(1e-12);
    CMat::identity(n, n) + e * Complex::new(spread / norm, 0.0)
}

/// `S diag(1,..,1,0,..,0) S^{-1}` with the first `rank` columns of `S` spanning the image.
pub fn idempotent_from(s: &CMat<f64>, rank: usize) -> CMat<f64> {
    let n = s.nrows();
    let mut d = CMat::zeros(n, n);
    for i in 0..rank {
        d[(i, i)] = Complex::new(1.0, 0.0);
    }
    s * d * s.clone().try_inverse().expect("invertible")
}

/// Orthogonal projector onto `span(x)` in the inner product `(u, v) = v^H G u`,
/// `X (X^H G X)^{-1} X^H G`, computed without the library.
pub fn weighted_projector(x: &CMat<f64>, g: &CMat<f64>) -> CMat<f64> {
    if x.ncols() == 0 {
        return CMat::zeros(x.nrows(), x.nrows());
    }
    let inner = (x.adjoint() * g * x).try_inverse().expect("independent columns");
    x * inner * x.adjoint() * g
}

/// Hermitian square root of a positive definite matrix via its eigen-decomposition.
pub fn hermitian_sqrt(g: &CMat<f64>, power: f64) -> CMat<f64> {
    let eig = g.clone().symmetric_eigen();
    let d = CMat::from_diagonal(&eig.eigenvalues.map(|l| Complex::new(l.powf(power), 0.0)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// `||A||` in the `G`-weighted operator norm, `||G^{1/2} A G^{-1/2}||_2`,
/// from the largest eigenvalue of the Hermitian Gram matrix.
pub fn weighted_norm(a: &CMat<f64>, g: &CMat<f64>) -> f64 {
    let b = hermitian_sqrt(g, 0.5) * a * hermitian_sqrt(g, -0.5);
    spectral_norm_eig(&b)
}

pub fn spectral_norm_eig(b: &CMat<f64>) -> f64 {
    let h = b.adjoint() * b;
    let h = (&h + h.adjoint()) * Complex::new(0.5, 0.0);
    h.symmetric_eigen().eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l)).sqrt()
}
