use num_complex::Complex;
use num_traits::ToPrimitive;

use super::{boundary_jets, OperatorSpec1D};
use crate::error::{LabError, Result};
use crate::linalg::{self, CMat};
use crate::poly::{binomial, int, Mat, MatPoly, Ring};
use crate::quadrature::gauss_legendre;
use crate::scalar::Real;

/// Boundary form `J` with `(Au, v) - (u, A^t v) = (J rho u, rho v)`, where
/// `rho` takes inward jets of order `< d` at both endpoints.
///
/// Each endpoint carries a `dm x dm` matrix whose `(k, j)` block of size
/// `m x m` pairs the `j`-th jet of `u` with the `k`-th jet of `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct GreensMatrix<R> {
    pub d: usize,
    pub m: usize,
    /// Endpoint `0` then endpoint `1`.
    pub blocks: [Mat<R>; 2],
}

impl<R: Ring> GreensMatrix<R> {
    /// The `m x m` entry `(k, j)` at `endpoint` (0 or 1).
    pub fn entry(&self, endpoint: usize, k: usize, j: usize) -> Mat<R> {
        let m = self.m;
        let b = &self.blocks[endpoint];
        let mut out = Mat::zeros(m, m);
        for r in 0..m {
            for c in 0..m {
                out.set(r, c, b.get(k * m + r, j * m + c).clone());
            }
        }
        out
    }

    /// Whether every entry with `k + j > d - 1` vanishes.
    pub fn is_upper_skew_triangular(&self) -> bool {
        (0..2).all(|e| {
            (0..self.d).all(|k| (0..self.d).all(|j| k + j < self.d || self.entry(e, k, j).is_zero()))
        })
    }
}

impl<R: Ring + ToPrimitive> GreensMatrix<R> {
    /// `2dm x 2dm` block-diagonal matrix acting on jet vectors.
    pub fn boundary_matrix<T: Real>(&self) -> CMat<T> {
        let n = self.d * self.m;
        let mut out = CMat::zeros(2 * n, 2 * n);
        for (e, b) in self.blocks.iter().enumerate() {
            out.view_mut((e * n, e * n), (n, n)).copy_from(&b.to_cmat::<T>());
        }
        out
    }
}

/// Green's form of `A` from symbolic integration by parts, exact in `R`.
///
/// Fails when a skew-diagonal entry is numerically singular.
pub fn greens_matrix<R: Ring + ToPrimitive>(spec: &OperatorSpec1D<R>) -> Result<GreensMatrix<R>> {
    let (d, m) = (spec.order(), spec.fiber_dim());
    let n = d * m;
    // raw[p][q]: coefficient of v^{(p)H} (.) u^{(q)} in the boundary term at x
    let mut raw = vec![vec![MatPoly::zero(m, m); d]; d];
    for (j, a) in spec.coeffs().iter().enumerate().skip(1) {
        for l in 0..j {
            let q = j - 1 - l;
            let sign: i64 = if l % 2 == 0 { 1 } else { -1 };
            for (p, row) in raw.iter_mut().enumerate().take(l + 1) {
                let c = Complex::new(int::<R>(sign * binomial(l, p)), R::zero());
                row[q] = row[q].add(&a.nth_derivative(l - p).scale(&c));
            }
        }
    }
    let mut blocks = [Mat::zeros(n, n), Mat::zeros(n, n)];
    for p in 0..d {
        for q in 0..d {
            let at0 = raw[p][q].eval_exact(&R::zero());
            let at1 = raw[p][q].eval_exact(&R::one());
            // the boundary term is evaluated as [.]_0^1, and jets at 1 carry (-1)^k
            let s0 = Complex::new(-R::one(), R::zero());
            let s1 = Complex::new(if (p + q) % 2 == 0 { R::one() } else { -R::one() }, R::zero());
            let (e0, e1) = (at0.scale(&s0), at1.scale(&s1));
            for r in 0..m {
                for c in 0..m {
                    blocks[0].set(p * m + r, q * m + c, e0.get(r, c).clone());
                    blocks[1].set(p * m + r, q * m + c, e1.get(r, c).clone());
                }
            }
        }
    }
    let g = GreensMatrix { d, m, blocks };
    for e in 0..2 {
        for k in 0..d {
            let s = linalg::singular_values(&g.entry(e, k, d - 1 - k).to_cmat::<f64>());
            if !(s[s.len() - 1] > 1e-12 * s[0].max(1.0)) {
                return Err(LabError::NotElliptic(format!(
                    "Green's form entry ({k}, {}) at endpoint {e} is singular",
                    d - 1 - k
                )));
            }
        }
    }
    Ok(g)
}

/// `|(Au, v) - (u, A^t v) - (J rho u, rho v)|` for `m x 1` polynomials `u`, `v`,
/// with Gauss–Legendre quadrature exact for the integrands.
pub fn greens_identity_residual<T: Real, R: Ring + ToPrimitive>(
    spec: &OperatorSpec1D<R>,
    u: &MatPoly<R>,
    v: &MatPoly<R>,
) -> Result<T> {
    let m = spec.fiber_dim();
    for w in [u, v] {
        if w.rows != m || w.cols != 1 {
            return Err(LabError::Dimension {
                expected: m,
                got: w.rows,
            });
        }
    }
    let adj = spec.formal_adjoint();
    let au = spec.apply_poly(u);
    let atv = adj.apply_poly(v);
    let deg = |p: &MatPoly<R>| p.degree().unwrap_or(0);
    let total = (deg(&au) + deg(v)).max(deg(u) + deg(&atv));
    let (nodes, weights) = gauss_legendre::<T>(total / 2 + 1);
    let mut lhs = Complex::new(T::zero(), T::zero());
    for (&x, &w) in nodes.iter().zip(&weights) {
        let (aux, vx, ux, atvx) = (au.eval(x), v.eval(x), u.eval(x), atv.eval(x));
        let term = (vx.adjoint() * aux)[(0, 0)] - (atvx.adjoint() * ux)[(0, 0)];
        lhs += term * w;
    }
    let g = greens_matrix(spec)?;
    let ju = g.boundary_matrix::<T>() * boundary_jets::<T, R>(spec.order(), u);
    let rv = boundary_jets::<T, R>(spec.order(), v);
    let rhs = (rv.adjoint() * ju)[(0, 0)];
    Ok((lhs - rhs).norm_sqr().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn table(g: &GreensMatrix<f64>, e: usize) -> Vec<f64> {
        g.blocks[e].data.iter().map(|z| z.re).collect()
    }

    #[test]
    fn minus_second_derivative_block() {
        let a = OperatorSpec1D::constant_scalar(1, &[0.0, 0.0, -1.0]).unwrap();
        let g = greens_matrix(&a).unwrap();
        assert_eq!(table(&g, 0), vec![0.0, 1.0, -1.0, 0.0]);
        assert_eq!(table(&g, 1), vec![0.0, 1.0, -1.0, 0.0]);
        assert!(g.is_upper_skew_triangular());
    }

    #[test]
    fn first_order_signs() {
        // (a u', v) - (u, -(a v)') = a u v |_0^1, inward: -a at 0, +a at 1
        let a = OperatorSpec1D::constant_scalar(1, &[0.0, 3.0]).unwrap();
        let g = greens_matrix(&a).unwrap();
        assert_eq!(table(&g, 0), vec![-3.0]);
        assert_eq!(table(&g, 1), vec![3.0]);
    }

    #[test]
    fn closed_form_pairing() {
        // A = -d^2, u = x, v = 1: (Au, v) = 0, (u, A v) = 0, and the boundary term is 0
        let a = OperatorSpec1D::constant_scalar(1, &[0.0, 0.0, -1.0]).unwrap();
        let u = MatPoly::scalar(1, &[c(0.0), c(1.0)]);
        let v = MatPoly::scalar(1, &[c(1.0)]);
        let r: f64 = greens_identity_residual(&a, &u, &v).unwrap();
        assert!(r < 1e-12);
        // u = x^2, v = x: (Au, v) = -1, (u, Av) = 0; boundary term must be -1
        let u = MatPoly::scalar(1, &[c(0.0), c(0.0), c(1.0)]);
        let v = MatPoly::scalar(1, &[c(0.0), c(1.0)]);
        let r: f64 = greens_identity_residual(&a, &u, &v).unwrap();
        assert!(r < 1e-12);
    }

    #[test]
    fn compactly_supported_pair_has_no_boundary_term() {
        // u = v = x^3 (1 - x)^3 vanish to order 3 at both ends
        let bump = MatPoly::scalar(1, &[c(0.0), c(0.0), c(0.0), c(1.0), c(-3.0), c(3.0), c(-1.0)]);
        let a = OperatorSpec1D::new(
            3,
            1,
            vec![
                MatPoly::scalar(1, &[c(1.0), c(2.0)]),
                MatPoly::scalar(1, &[Complex::new(0.0, 1.0)]),
                MatPoly::scalar(1, &[c(0.5), c(0.0), c(1.0)]),
                MatPoly::scalar(1, &[c(2.0), c(0.3)]),
            ],
        )
        .unwrap();
        let jets: crate::linalg::CVec<f64> = boundary_jets(3, &bump);
        assert!(jets.iter().all(|z| z.norm() < 1e-15));
        let r: f64 = greens_identity_residual(&a, &bump, &bump).unwrap();
        assert!(r < 1e-12);
    }
}
