//! Reference values computed without the library routines they check:
//! eigen-decompositions instead of SVD, closed-form projectors, sampling, and
//! Bessel power series.

use calderon_core::elliptic1d::OperatorSpec1D;
use calderon_core::linalg::CMat;
use num_complex::Complex;
use rand_chacha::ChaCha8Rng;

use crate::corpus::random_matrix;

/// Orthogonal projector onto `span(x)` for `(u, v) = v^H G u`: `X (X^H G X)^{-1} X^H G`.
pub fn weighted_projector(x: &CMat<f64>, g: &CMat<f64>) -> Option<CMat<f64>> {
    if x.ncols() == 0 {
        return Some(CMat::zeros(x.nrows(), x.nrows()));
    }
    let inner = (x.adjoint() * g * x).try_inverse()?;
    Some(x * inner * x.adjoint() * g)
}

/// `G^power` for Hermitian positive definite `G`.
pub fn hermitian_power(g: &CMat<f64>, power: f64) -> CMat<f64> {
    let eig = g.clone().symmetric_eigen();
    let d = CMat::from_diagonal(&eig.eigenvalues.map(|l| Complex::new(l.powf(power), 0.0)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Largest singular value from the top eigenvalue of `B^H B`.
pub fn spectral_norm_eig(b: &CMat<f64>) -> f64 {
    let h = b.adjoint() * b;
    let h = (&h + h.adjoint()) * Complex::new(0.5, 0.0);
    h.symmetric_eigen().eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l)).max(0.0).sqrt()
}

/// `||G^{1/2} A G^{-1/2}||`.
pub fn weighted_norm(a: &CMat<f64>, g: &CMat<f64>) -> f64 {
    spectral_norm_eig(&(hermitian_power(g, 0.5) * a * hermitian_power(g, -0.5)))
}

/// Extremes of `dist(u, N) / |u|` over the columns of `m` and `samples`
/// random combinations of them. The maximum bounds the one-sided gap
/// `δ(M, N)` from below; when `M ∩ N = 0` the minimum bounds `γ(M, N)` from above.
pub fn sampled_distance_ratios(
    m: &CMat<f64>,
    n: &CMat<f64>,
    g: &CMat<f64>,
    samples: usize,
    r: &mut ChaCha8Rng,
) -> Option<(f64, f64)> {
    let pn = weighted_projector(n, g)?;
    let norm = |u: &CMat<f64>| (u.adjoint() * g * u)[(0, 0)].re.max(0.0).sqrt();
    let k = m.ncols();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for trial in 0..k + samples {
        let c = if trial < k {
            let mut e = CMat::zeros(k, 1);
            e[(trial, 0)] = Complex::new(1.0, 0.0);
            e
        } else {
            random_matrix(r, k, 1)
        };
        let u = m * c;
        let len = norm(&u);
        if len > 1e-12 {
            let ratio = norm(&(&u - &pn * &u)) / len;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    Some((lo, hi))
}

/// `J_n(x)`, or `I_n(x)` when `modified`, from the power series.
pub fn bessel(n: u32, x: f64, modified: bool) -> f64 {
    let half = x / 2.0;
    let mut term = half.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for j in 1..300 {
        let j = f64::from(j);
        term *= half * half / (j * (j + f64::from(n)));
        if !modified {
            term = -term;
        }
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Outward DtN value of mode `k` of `-Δ - b` on the unit disk.
pub fn free_disk_dtn(k: u32, b: f64) -> f64 {
    if b == 0.0 {
        f64::from(k)
    } else if b > 0.0 {
        let rho = b.sqrt();
        f64::from(k) - rho * bessel(k + 1, rho, false) / bessel(k, rho, false)
    } else {
        let rho = (-b).sqrt();
        f64::from(k) + rho * bessel(k + 1, rho, true) / bessel(k, rho, true)
    }
}

/// First positive zero of `J_0`, by bisection on `[2, 3]`.
pub fn first_zero_j0() -> f64 {
    let (mut a, mut b) = (2.0f64, 3.0f64);
    while b - a > 1e-15 {
        let mid = 0.5 * (a + b);
        if bessel(0, a, false) * bessel(0, mid, false) <= 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

/// `i^d (-1)^{d-1-k} a_d(x) (i ξ)^d` with `ξ = 1` at `x = 0` and `ξ = -1` at
/// `x = 1`: the skew-diagonal entry `(k, d-1-k)` of the Green's form.
pub fn skew_diagonal(spec: &OperatorSpec1D<f64>, endpoint: usize, k: usize) -> CMat<f64> {
    let d = spec.order();
    let xi = if endpoint == 0 { 1.0 } else { -1.0 };
    let i = Complex::new(0.0, 1.0);
    let symbol = spec.coeff(d).eval(endpoint as f64) * (i * xi).powu(d as u32);
    let sign = if (d - 1 - k) % 2 == 0 { 1.0 } else { -1.0 };
    symbol * (i.powu(d as u32) * sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_values() {
        assert!((bessel(0, 1.0, false) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel(1, 2.0, false) - 0.576_724_807_756_873_4).abs() < 1e-15);
        assert!((bessel(0, 1.0, true) - 1.266_065_877_752_008_4).abs() < 1e-15);
        assert!((first_zero_j0() - 2.404_825_557_695_773).abs() < 1e-14);
    }

    #[test]
    fn harmonic_limit_of_dtn() {
        for k in 0..6 {
            assert!((free_disk_dtn(k, 0.0) - f64::from(k)).abs() < 1e-15);
        }
    }

    #[test]
    fn weighted_projector_is_idempotent_and_g_selfadjoint() {
        let mut r = crate::corpus::stream(1, crate::corpus::Family::LineSampling, 0);
        let g = crate::corpus::random_gram(&mut r, 5);
        let x = random_matrix(&mut r, 5, 2);
        let p = weighted_projector(&x, &g).unwrap();
        assert!(spectral_norm_eig(&(&p * &p - &p)) < 1e-12);
        assert!(spectral_norm_eig(&(&g * &p - p.adjoint() * &g)) < 1e-12);
    }
}
