//! Gap, angular distance, sums and intersections.

use super::{check_tol, Subspace};
use crate::error::{LabError, Result};
use crate::linalg::{self, CMat, CVec};
use crate::scalar::Real;

/// Component of the whitened columns of `x` orthogonal to `n`.
fn residual_against<T: Real>(x: &CMat<T>, n: &Subspace<T>) -> CMat<T> {
    let q = n.whitened_basis();
    if q.ncols() == 0 {
        return x.clone();
    }
    x - q * (q.adjoint() * x)
}

/// One-sided gap `delta(M, N) = sup_{u in M, |u| = 1} dist(u, N)`.
pub fn gap_delta<T: Real>(m: &Subspace<T>, n: &Subspace<T>) -> Result<T> {
    m.ensure_same_space(n)?;
    if m.is_zero() {
        return Ok(T::zero());
    }
    let r = residual_against(m.whitened_basis(), n);
    Ok(linalg::spectral_norm(&r).min(T::one()))
}

/// Symmetric gap `max(delta(M, N), delta(N, M))`.
pub fn gap_hat<T: Real>(m: &Subspace<T>, n: &Subspace<T>) -> Result<T> {
    Ok(gap_delta(m, n)?.max(gap_delta(n, m)?))
}

/// Principal cosines with the corresponding principal vectors of `M`
/// (whitened coordinates), largest cosine first.
fn principal_pairs<T: Real>(m: &Subspace<T>, n: &Subspace<T>) -> Vec<(T, CVec<T>)> {
    if m.is_zero() || n.is_zero() {
        return Vec::new();
    }
    let qm = m.whitened_basis();
    let cross = qm.adjoint() * n.whitened_basis();
    let svd = cross.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut out: Vec<(T, CVec<T>)> = svd
        .singular_values
        .iter()
        .enumerate()
        .map(|(i, &c)| (c.min(T::one()), qm * u.column(i)))
        .collect();
    out.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    out
}

fn intersect_unchecked<T: Real>(m: &Subspace<T>, n: &Subspace<T>, tol: T) -> Subspace<T> {
    let space = m.space();
    let vecs: Vec<CVec<T>> = principal_pairs(m, n)
        .into_iter()
        .filter(|(c, _)| *c > T::one() - tol)
        .map(|(_, v)| v)
        .collect();
    let mut stacked = CMat::zeros(space.dim(), vecs.len());
    for (j, v) in vecs.iter().enumerate() {
        stacked.set_column(j, v);
    }
    Subspace::from_whitened(space, linalg::column_space(&stacked, tol))
}

fn sum_unchecked<T: Real>(m: &Subspace<T>, n: &Subspace<T>, tol: T) -> Subspace<T> {
    let stacked = linalg::hstack(m.whitened_basis(), n.whitened_basis());
    Subspace::from_whitened(m.space(), linalg::column_space(&stacked, tol))
}

fn check_dimension_identity<T: Real>(
    m: &Subspace<T>,
    n: &Subspace<T>,
    s: &Subspace<T>,
    i: &Subspace<T>,
) -> Result<()> {
    if m.rank() + n.rank() == s.rank() + i.rank() {
        Ok(())
    } else {
        Err(LabError::IllConditionedRank {
            dm: m.rank(),
            dn: n.rank(),
            sum: s.rank(),
            int: i.rank(),
        })
    }
}

/// `M + N` with singular values of the stacked bases below `tol` discarded.
pub fn sum<T: Real>(m: &Subspace<T>, n: &Subspace<T>, tol: T) -> Result<Subspace<T>> {
    check_tol(tol)?;
    m.ensure_same_space(n)?;
    let s = sum_unchecked(m, n, tol);
    let i = intersect_unchecked(m, n, tol);
    check_dimension_identity(m, n, &s, &i)?;
    Ok(s)
}

/// `M ∩ N`: principal vectors whose principal cosine exceeds `1 - tol`.
pub fn intersect<T: Real>(m: &Subspace<T>, n: &Subspace<T>, tol: T) -> Result<Subspace<T>> {
    check_tol(tol)?;
    m.ensure_same_space(n)?;
    let s = sum_unchecked(m, n, tol);
    let i = intersect_unchecked(m, n, tol);
    check_dimension_identity(m, n, &s, &i)?;
    Ok(i)
}

/// Angular distance `gamma(M, N)`.
///
/// Equal to 1 when `M ⊆ N`. Otherwise the smallest singular value of
/// `(I - Π_N)` restricted to `M ⊖ (M ∩ N)`; since `M ∩ N ⊆ N`,
/// `dist(u, N)` only sees the component of `u` orthogonal to the intersection.
pub fn gamma<T: Real>(m: &Subspace<T>, n: &Subspace<T>, tol: T) -> Result<T> {
    check_tol(tol)?;
    m.ensure_same_space(n)?;
    if gap_delta(m, n)? <= tol {
        return Ok(T::one());
    }
    let inter = intersect_unchecked(m, n, tol);
    let reduced = residual_against(m.whitened_basis(), &inter);
    let reduced = linalg::column_space(&reduced, tol);
    if reduced.ncols() == 0 {
        return Ok(T::one());
    }
    let r = residual_against(&reduced, n);
    let g = linalg::smallest_singular_value(&r).unwrap_or_else(T::one);
    Ok(g.min(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_real;
    use crate::subspace::InnerSpace;

    fn line(space: &std::sync::Arc<InnerSpace<f64>>, v: &[f64]) -> Subspace<f64> {
        Subspace::span_default(space, &from_real(v.len(), 1, v)).unwrap()
    }

    /// Brute-force sup/inf of dist(u, N) over a sampled unit circle of a 2D line pair.
    fn sampled_line_gap(theta: f64) -> f64 {
        // M = span{(1,0)}, N = span{(cos t, sin t)}; M's unit sphere is {±e1} up to phase.
        let u = [1.0, 0.0];
        let n = [theta.cos(), theta.sin()];
        let dot = u[0] * n[0] + u[1] * n[1];
        let r = [u[0] - dot * n[0], u[1] - dot * n[1]];
        (r[0] * r[0] + r[1] * r[1]).sqrt()
    }

    #[test]
    fn gap_of_zero_subspace_is_zero() {
        let space = InnerSpace::<f64>::standard(3);
        let n = line(&space, &[1.0, 2.0, 3.0]);
        assert_eq!(gap_delta(&Subspace::zero(&space), &n).unwrap(), 0.0);
        assert!(gap_delta(&n, &n).unwrap() < 1e-15);
    }

    #[test]
    fn gap_between_axis_and_diagonal() {
        let space = InnerSpace::<f64>::standard(2);
        let m = line(&space, &[1.0, 0.0]);
        let n = line(&space, &[1.0, 1.0]);
        let expected = sampled_line_gap(std::f64::consts::FRAC_PI_4);
        assert!((gap_delta(&m, &n).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gap_hat_line_in_plane() {
        let space = InnerSpace::<f64>::standard(3);
        let m = line(&space, &[1.0, 0.0, 0.0]);
        let n = Subspace::span_default(&space, &from_real(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]))
            .unwrap();
        assert!(gap_delta(&m, &n).unwrap() < 1e-15);
        assert!((gap_hat(&m, &n).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_subset_is_one() {
        let space = InnerSpace::<f64>::standard(3);
        let m = line(&space, &[1.0, 1.0, 0.0]);
        let n = Subspace::span_default(&space, &from_real(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]))
            .unwrap();
        assert_eq!(gamma(&m, &n, 1e-8).unwrap(), 1.0);
        assert_eq!(gamma(&Subspace::zero(&space), &n, 1e-8).unwrap(), 1.0);
    }

    #[test]
    fn gamma_plane_vs_tilted_plane() {
        // M = span{e1, e2}, N = span{e2, (e1 + e3)/√2}; reduces to dist(e1, N) = √2/2.
        let space = InnerSpace::<f64>::standard(3);
        let m = Subspace::span_default(&space, &from_real(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]))
            .unwrap();
        let n = Subspace::span_default(&space, &from_real(3, 2, &[0.0, 1.0, 1.0, 0.0, 0.0, 1.0]))
            .unwrap();
        // sampling oracle over M ⊖ (M∩N) = span{e1} is a single direction
        let e1 = [1.0, 0.0, 0.0];
        let b = [1.0 / 2f64.sqrt(), 0.0, 1.0 / 2f64.sqrt()];
        let d = e1[0] * b[0];
        let oracle = ((1.0 - d * b[0]).powi(2) + (d * b[2]).powi(2)).sqrt();
        let g = gamma(&m, &n, 1e-8).unwrap();
        assert!((g - oracle).abs() < 1e-12, "{g} vs {oracle}");
        assert!((g - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sum_and_intersection_of_coordinate_planes() {
        let space = InnerSpace::<f64>::standard(3);
        let m = Subspace::span_default(&space, &from_real(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]))
            .unwrap();
        let n = Subspace::span_default(&space, &from_real(3, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]))
            .unwrap();
        let i = intersect(&m, &n, 1e-8).unwrap();
        assert_eq!(i.rank(), 1);
        let e2 = line(&space, &[0.0, 1.0, 0.0]);
        assert!(gap_hat(&i, &e2).unwrap() < 1e-12);
        assert_eq!(sum(&m, &n, 1e-8).unwrap().rank(), 3);
    }

    #[test]
    fn orthogonal_axes() {
        let space = InnerSpace::<f64>::standard(2);
        let m = line(&space, &[1.0, 0.0]);
        let n = line(&space, &[0.0, 1.0]);
        assert_eq!(intersect(&m, &n, 1e-8).unwrap().rank(), 0);
        assert_eq!(sum(&m, &n, 1e-8).unwrap().rank(), 2);
        let self_int = intersect(&m, &m, 1e-8).unwrap();
        assert!(gap_hat(&self_int, &m).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_bad_tolerance_and_mixed_spaces() {
        let a = InnerSpace::<f64>::standard(2);
        let b = InnerSpace::<f64>::with_gram(from_real(2, 2, &[2.0, 0.0, 0.0, 1.0]), "w").unwrap();
        let m = line(&a, &[1.0, 0.0]);
        let n = line(&b, &[1.0, 0.0]);
        assert!(matches!(gap_delta(&m, &n), Err(LabError::SpaceMismatch)));
        assert!(matches!(sum(&m, &m, -1.0), Err(LabError::BadTolerance(_))));
    }
}
