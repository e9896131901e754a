//! Dense complex linear algebra helpers around a one-sided Jacobi SVD.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::scalar::{re, Real};

pub type CMat<T> = DMatrix<Complex<T>>;
pub type CVec<T> = DVector<Complex<T>>;

pub fn identity<T: Real>(n: usize) -> CMat<T> {
    CMat::identity(n, n)
}

/// Thin singular value decomposition `A V = U Σ` from one-sided Jacobi.
///
/// `sigma` has one entry per column of `A` (descending), `u` holds the
/// normalized columns of `A V` (zero where `sigma` vanishes) and `v` is the
/// full unitary `n x n` factor, so null vectors are available directly.
#[derive(Debug, Clone)]
pub struct JacobiSvd<T: Real> {
    pub sigma: Vec<T>,
    pub u: CMat<T>,
    pub v: CMat<T>,
}

const MAX_SWEEPS: usize = 80;

pub fn jacobi_svd<T: Real>(a: &CMat<T>) -> JacobiSvd<T> {
    let (m, n) = (a.nrows(), a.ncols());
    let mut w = a.clone();
    let mut v: CMat<T> = identity(n);
    jacobi_sweeps(&mut w, Some(&mut v));
    let mut order: Vec<(T, usize)> = (0..n)
        .map(|j| (w.column(j).iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt(), j))
        .collect();
    order.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut u = CMat::zeros(m, n);
    let mut vs = CMat::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (k, &(s, j)) in order.iter().enumerate() {
        sigma.push(s);
        if s > T::zero() {
            u.set_column(k, &(w.column(j) * re(T::one() / s)));
        }
        vs.set_column(k, &v.column(j));
    }
    JacobiSvd { sigma, u, v: vs }
}

/// Two distinct columns `p < q` of a column-major buffer with `m` rows.
fn column_pair<T>(data: &mut [T], m: usize, p: usize, q: usize) -> (&mut [T], &mut [T]) {
    let (left, right) = data.split_at_mut(q * m);
    (&mut left[p * m..(p + 1) * m], &mut right[..m])
}

/// Rotates `x, y <- x c - y φ s, x s + y φ c`.
fn rotate<T: Real>(x: &mut [Complex<T>], y: &mut [Complex<T>], c: T, s: T, phase: Complex<T>) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (xa, yb) = (*a, *b * phase);
        *a = Complex::new(xa.re * c - yb.re * s, xa.im * c - yb.im * s);
        *b = Complex::new(xa.re * s + yb.re * c, xa.im * s + yb.im * c);
    }
}

/// Orthogonalizes the columns of `w` in place; the rotations are accumulated
/// into `v` when given.
fn jacobi_sweeps<T: Real>(w: &mut CMat<T>, mut v: Option<&mut CMat<T>>) {
    let (m, n) = (w.nrows(), w.ncols());
    let eps = T::default_epsilon();
    let data = w.as_mut_slice();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (x, y) = column_pair(data, m, p, q);
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let (mut gre, mut gim) = (T::zero(), T::zero());
                for (a, b) in x.iter().zip(y.iter()) {
                    alpha += a.re * a.re + a.im * a.im;
                    beta += b.re * b.re + b.im * b.im;
                    // conj(a) * b
                    gre += a.re * b.re + a.im * b.im;
                    gim += a.re * b.im - a.im * b.re;
                }
                let gabs = (gre * gre + gim * gim).sqrt();
                if gabs == T::zero() || gabs <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // phase so that the off-diagonal entry becomes real and positive
                let phase = Complex::new(gre / gabs, -gim / gabs);
                let zeta = (beta - alpha) / (gabs + gabs);
                let t = zeta.signum_or_one() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(x, y, c, s, phase);
                if let Some(v) = v.as_deref_mut() {
                    let (vx, vy) = column_pair(v.as_mut_slice(), n, p, q);
                    rotate(vx, vy, c, s, phase);
                }
            }
        }
        if !rotated {
            break;
        }
    }
}

/// Singular values of a matrix with at least as many rows as columns.
fn tall_singular_values<T: Real>(a: &CMat<T>) -> Vec<T> {
    let mut w = a.clone();
    jacobi_sweeps(&mut w, None);
    let mut sigma: Vec<T> = w
        .column_iter()
        .map(|c| c.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt())
        .collect();
    sigma.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sigma
}

trait SignumOrOne {
    fn signum_or_one(self) -> Self;
}

impl<T: Real> SignumOrOne for T {
    fn signum_or_one(self) -> Self {
        if self < T::zero() {
            -T::one()
        } else {
            T::one()
        }
    }
}

/// Singular values in descending order (`min(rows, cols)` of them).
pub fn singular_values<T: Real>(m: &CMat<T>) -> Vec<T> {
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return Vec::new();
    }
    let mut sv = if m.ncols() <= m.nrows() {
        tall_singular_values(m)
    } else {
        tall_singular_values(&m.adjoint())
    };
    sv.truncate(k);
    sv
}

/// Spectral norm (largest singular value). Zero for empty matrices.
pub fn spectral_norm<T: Real>(m: &CMat<T>) -> T {
    singular_values(m).first().copied().unwrap_or_else(T::zero)
}

/// Smallest of the `min(rows, cols)` singular values.
pub fn smallest_singular_value<T: Real>(m: &CMat<T>) -> Option<T> {
    singular_values(m).last().copied()
}

fn cutoff<T: Real>(sigma: &[T], rel_tol: T) -> T {
    let smax = sigma.first().copied().unwrap_or_else(T::zero);
    rel_tol * smax.max(T::one())
}

/// Orthonormal basis of the column space, dropping singular values below
/// `rel_tol * max(1, sigma_max)`.
pub fn column_space<T: Real>(m: &CMat<T>, rel_tol: T) -> CMat<T> {
    let n = m.nrows();
    if m.ncols() == 0 || n == 0 {
        return CMat::zeros(n, 0);
    }
    let svd = jacobi_svd(m);
    let cut = cutoff(&svd.sigma, rel_tol);
    let keep = svd.sigma.iter().take_while(|&&s| s > cut).count().min(n);
    svd.u.columns(0, keep).into_owned()
}

/// Orthonormal basis of the null space of `m`, with the same cutoff as
/// [`column_space`].
pub fn null_space<T: Real>(m: &CMat<T>, rel_tol: T) -> CMat<T> {
    let n = m.ncols();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return identity(n);
    }
    let svd = jacobi_svd(m);
    let cut = cutoff(&svd.sigma, rel_tol);
    let rank = svd.sigma.iter().take_while(|&&s| s > cut).count().min(m.nrows());
    svd.v.columns(rank, n - rank).into_owned()
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns `q` in `C^n`.
pub fn complement<T: Real>(q: &CMat<T>) -> CMat<T> {
    let n = q.nrows();
    let r = q.ncols();
    if r == 0 {
        return identity(n);
    }
    if r >= n {
        return CMat::zeros(n, 0);
    }
    let svd = jacobi_svd(&q.adjoint());
    svd.v.columns(r, n - r).into_owned()
}

pub fn hstack<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((0, a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    out
}

/// Hermitian defect `max |m_ij - conj(m_ji)|`.
pub fn hermitian_defect<T: Real>(m: &CMat<T>) -> T {
    let mut worst = T::zero();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max(nalgebra::ComplexField::modulus(m[(i, j)] - m[(j, i)].conj()));
        }
    }
    worst
}

pub fn from_real<T: Real>(rows: usize, cols: usize, data_row_major: &[f64]) -> CMat<T> {
    CMat::from_fn(rows, cols, |i, j| re(T::lit(data_row_major[i * cols + j])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_rank_one() {
        let m: CMat<f64> = from_real(2, 3, &[1.0, 1.0, 0.0, 2.0, 2.0, 0.0]);
        let ns = null_space(&m, 1e-10);
        assert_eq!(ns.ncols(), 2);
        assert!(spectral_norm(&(&m * &ns)) < 1e-12);
    }

    #[test]
    fn complement_dimensions() {
        let q: CMat<f64> = from_real(3, 1, &[1.0, 0.0, 0.0]);
        let c = complement(&q);
        assert_eq!(c.ncols(), 2);
        assert!(spectral_norm(&(q.adjoint() * &c)) < 1e-14);
        assert_eq!(complement(&CMat::<f64>::zeros(3, 0)).ncols(), 3);
    }

    #[test]
    fn jacobi_recomposes_rank_one_2x2() {
        let b = 1e-3;
        let m: CMat<f64> = from_real(2, 2, &[1.0 + 0.3 * b, b, 0.0, 0.0]);
        let svd = jacobi_svd(&m);
        let sig = CMat::from_diagonal(&CVec::from_iterator(2, svd.sigma.iter().map(|&s| re(s))));
        assert!(spectral_norm(&(&svd.u * sig * svd.v.adjoint() - &m)) < 1e-14);
        let ns = null_space(&m, 1e-10);
        assert!(spectral_norm(&(&m * &ns)) < 1e-15);
    }

    #[test]
    fn complex_phases_are_handled() {
        let m = CMat::<f64>::from_fn(3, 3, |i, j| {
            Complex::new((i + 2 * j) as f64 * 0.3 - 0.5, (i as f64 - j as f64) * 0.7)
        });
        let svd = jacobi_svd(&m);
        let sig = CMat::from_diagonal(&CVec::from_iterator(3, svd.sigma.iter().map(|&s| re(s))));
        assert!(spectral_norm(&(&svd.u * sig * svd.v.adjoint() - &m)) < 1e-13);
        let vv = svd.v.adjoint() * &svd.v - identity::<f64>(3);
        assert!(vv.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn empty_matrices_have_zero_norm() {
        assert_eq!(spectral_norm(&CMat::<f64>::zeros(4, 0)), 0.0);
        assert_eq!(column_space(&CMat::<f64>::zeros(4, 0), 1e-8).ncols(), 0);
    }
}
