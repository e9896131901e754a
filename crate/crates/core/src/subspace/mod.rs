//! Subspace geometry in finite-dimensional weighted inner-product spaces.
//!
//! A weighted space carries a Hermitian positive-definite Gram matrix `G`
//! with `<u, v> = v^H G u`. Internally every computation is carried out in
//! whitened coordinates `y = L^H x` where `G = L L^H`; there the inner
//! product is the standard one and gaps reduce to singular values of
//! projected orthonormal bases.

mod estimates;
mod family;
mod gap;

use std::sync::Arc;

use nalgebra::Cholesky;

use crate::error::{LabError, Result};
use crate::linalg::{self, CMat, CVec};
use crate::scalar::Real;

pub use estimates::{
    neubauer_gamma_bound, orthogonalize_projector, projector_gap_vs_norm,
    projector_norm_estimate, ort_identity_residuals, surjection_gap_comparison, LinearMap,
    OrtResiduals, SurjectionComparison,
};
pub use family::{
    family_continuity_experiment, graph_intersection_gap, FamilyContinuityReport, FamilyRow,
    GraphGapReport, GraphGapRow,
};
pub use gap::{gamma, gap_delta, gap_hat, intersect, sum};

/// Default relative singular-value cutoff for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Idempotency tolerance for [`Projector`], relative to `max(1, ||P||)^2`.
pub const IDEMPOTENCY_TOL: f64 = 1e-9;

/// A finite-dimensional complex space with inner product `<u, v> = v^H G u`.
#[derive(Debug, Clone)]
pub struct InnerSpace<T: Real> {
    label: String,
    gram: CMat<T>,
    /// Lower Cholesky factor `L`, `G = L L^H`.
    chol: CMat<T>,
    /// `L^{-1}`.
    chol_inv: CMat<T>,
}

impl<T: Real> InnerSpace<T> {
    /// Standard inner product on `C^dim`.
    pub fn standard(dim: usize) -> Arc<Self> {
        let id = linalg::identity(dim);
        Arc::new(Self {
            label: format!("C^{dim}"),
            gram: id.clone(),
            chol: id.clone(),
            chol_inv: id,
        })
    }

    pub fn with_gram(gram: CMat<T>, label: impl Into<String>) -> Result<Arc<Self>> {
        let n = gram.nrows();
        if gram.ncols() != n {
            return Err(LabError::Dimension {
                expected: n,
                got: gram.ncols(),
            });
        }
        if n == 0 {
            return Err(LabError::Invalid("inner space must have positive dimension".into()));
        }
        let scale = linalg::spectral_norm(&gram).max(T::one());
        let tol = T::lit(1e-12).max(T::default_epsilon() * T::lit(100.0)) * scale;
        let defect = linalg::hermitian_defect(&gram);
        if defect > tol {
            return Err(LabError::NotPositiveDefinite(format!(
                "Hermitian defect {defect}"
            )));
        }
        let sym = (&gram + gram.adjoint()) * crate::scalar::re(T::lit(0.5));
        let lambda_min = nalgebra::SymmetricEigen::new(sym.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(T::max_value().unwrap_or_else(T::one), |a, b| a.min(b));
        if !(lambda_min > T::zero()) {
            return Err(LabError::NotPositiveDefinite(format!(
                "smallest eigenvalue {lambda_min}"
            )));
        }
        let chol = Cholesky::new(sym.clone())
            .ok_or_else(|| LabError::NotPositiveDefinite("Cholesky failed".into()))?;
        let l = chol.l();
        let l_inv = l
            .clone()
            .try_inverse()
            .ok_or_else(|| LabError::NotPositiveDefinite("singular factor".into()))?;
        Ok(Arc::new(Self {
            label: label.into(),
            gram: sym,
            chol: l,
            chol_inv: l_inv,
        }))
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn gram(&self) -> &CMat<T> {
        &self.gram
    }

    pub fn same_as(&self, other: &Self) -> bool {
        std::ptr::eq(self, other) || self.gram == other.gram
    }

    pub fn inner(&self, u: &CVec<T>, v: &CVec<T>) -> num_complex::Complex<T> {
        (v.adjoint() * &self.gram * u)[(0, 0)]
    }

    pub fn norm(&self, u: &CVec<T>) -> T {
        self.inner(u, u).re.max(T::zero()).sqrt()
    }

    /// Coordinates in which the inner product becomes the standard one.
    pub fn whiten(&self, x: &CMat<T>) -> CMat<T> {
        self.chol.adjoint() * x
    }

    pub fn unwhiten(&self, y: &CMat<T>) -> CMat<T> {
        self.chol_inv.adjoint() * y
    }

    /// Operator `a` expressed in whitened coordinates, `L^H a L^{-H}`.
    pub fn whiten_operator(&self, a: &CMat<T>) -> CMat<T> {
        self.chol.adjoint() * a * self.chol_inv.adjoint()
    }

    pub fn unwhiten_operator(&self, a: &CMat<T>) -> CMat<T> {
        self.chol_inv.adjoint() * a * self.chol.adjoint()
    }

    /// Operator norm induced by the weighted inner product.
    pub fn op_norm(&self, a: &CMat<T>) -> T {
        linalg::spectral_norm(&self.whiten_operator(a))
    }

    /// Adjoint with respect to the weighted inner product, `G^{-1} a^H G`.
    pub fn adjoint(&self, a: &CMat<T>) -> CMat<T> {
        let w = self.whiten_operator(a);
        self.unwhiten_operator(&w.adjoint())
    }
}

fn check_tol<T: Real>(tol: T) -> Result<()> {
    if tol > T::zero() {
        Ok(())
    } else {
        Err(LabError::BadTolerance(tol.to_f64_lossy()))
    }
}

/// A linear subspace given by a basis orthonormal in its space's inner product.
#[derive(Debug, Clone)]
pub struct Subspace<T: Real> {
    space: Arc<InnerSpace<T>>,
    basis: CMat<T>,
    white: CMat<T>,
}

impl<T: Real> Subspace<T> {
    pub fn zero(space: &Arc<InnerSpace<T>>) -> Self {
        let n = space.dim();
        Self {
            space: space.clone(),
            basis: CMat::zeros(n, 0),
            white: CMat::zeros(n, 0),
        }
    }

    pub fn whole(space: &Arc<InnerSpace<T>>) -> Self {
        let n = space.dim();
        Self::from_whitened(space, linalg::identity(n))
    }

    /// Span of the columns of `vectors`, rank decided with relative cutoff `tol`.
    pub fn span(space: &Arc<InnerSpace<T>>, vectors: &CMat<T>, tol: T) -> Result<Self> {
        check_tol(tol)?;
        if vectors.nrows() != space.dim() {
            return Err(LabError::Dimension {
                expected: space.dim(),
                got: vectors.nrows(),
            });
        }
        let w = linalg::column_space(&space.whiten(vectors), tol);
        Ok(Self::from_whitened(space, w))
    }

    pub fn span_default(space: &Arc<InnerSpace<T>>, vectors: &CMat<T>) -> Result<Self> {
        Self::span(space, vectors, T::lit(DEFAULT_RANK_TOL))
    }

    /// Builds a subspace from an already orthonormal basis in whitened coordinates.
    pub(crate) fn from_whitened(space: &Arc<InnerSpace<T>>, white: CMat<T>) -> Self {
        Self {
            space: space.clone(),
            basis: space.unwhiten(&white),
            white,
        }
    }

    pub fn space(&self) -> &Arc<InnerSpace<T>> {
        &self.space
    }

    /// Basis with `basis^H G basis = I`.
    pub fn basis(&self) -> &CMat<T> {
        &self.basis
    }

    pub fn whitened_basis(&self) -> &CMat<T> {
        &self.white
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    /// `||basis^H G basis - I||`, the orthonormality defect.
    pub fn orthonormality_defect(&self) -> T {
        let r = self.rank();
        let g = self.basis.adjoint() * self.space.gram() * &self.basis;
        linalg::spectral_norm(&(g - linalg::identity::<T>(r)))
    }

    /// Orthogonal projector onto this subspace in whitened coordinates.
    pub(crate) fn white_projector(&self) -> CMat<T> {
        &self.white * self.white.adjoint()
    }

    /// The orthogonal (self-adjoint) projector onto this subspace.
    pub fn orthogonal_projector(&self) -> Projector<T> {
        Projector {
            space: self.space.clone(),
            table: self.space.unwhiten_operator(&self.white_projector()),
        }
    }

    /// Orthogonal complement inside the ambient space.
    pub fn orthogonal_complement(&self) -> Self {
        Self::from_whitened(&self.space, linalg::complement(&self.white))
    }

    pub(crate) fn ensure_same_space(&self, other: &Self) -> Result<()> {
        if self.space.same_as(&other.space) {
            Ok(())
        } else {
            Err(LabError::SpaceMismatch)
        }
    }
}

/// A bounded idempotent operator on an [`InnerSpace`].
#[derive(Debug, Clone)]
pub struct Projector<T: Real> {
    space: Arc<InnerSpace<T>>,
    table: CMat<T>,
}

impl<T: Real> Projector<T> {
    /// Wraps `table` after checking `||P^2 - P|| <= 1e-9 max(1, ||P||)^2`.
    pub fn new(space: &Arc<InnerSpace<T>>, table: CMat<T>) -> Result<Self> {
        let n = space.dim();
        if table.nrows() != n || table.ncols() != n {
            return Err(LabError::Dimension {
                expected: n,
                got: table.nrows().max(table.ncols()),
            });
        }
        let p = Self {
            space: space.clone(),
            table,
        };
        let defect = p.idempotency_defect();
        let scale = p.op_norm().max(T::one());
        let tol = T::lit(IDEMPOTENCY_TOL).max(T::default_epsilon() * T::lit(1e3));
        if defect > tol * scale * scale {
            return Err(LabError::NotIdempotent(defect.to_f64_lossy()));
        }
        Ok(p)
    }

    pub fn zero(space: &Arc<InnerSpace<T>>) -> Self {
        let n = space.dim();
        Self {
            space: space.clone(),
            table: CMat::zeros(n, n),
        }
    }

    pub fn space(&self) -> &Arc<InnerSpace<T>> {
        &self.space
    }

    pub fn table(&self) -> &CMat<T> {
        &self.table
    }

    pub fn into_table(self) -> CMat<T> {
        self.table
    }

    pub fn idempotency_defect(&self) -> T {
        self.space
            .op_norm(&(&self.table * &self.table - &self.table))
    }

    pub fn op_norm(&self) -> T {
        self.space.op_norm(&self.table)
    }

    /// Weighted adjoint `P^t`.
    pub fn adjoint_table(&self) -> CMat<T> {
        self.space.adjoint(&self.table)
    }

    pub fn self_adjointness_defect(&self) -> T {
        self.space.op_norm(&(self.adjoint_table() - &self.table))
    }

    pub fn image(&self, tol: T) -> Result<Subspace<T>> {
        Subspace::span(&self.space, &self.table, tol)
    }

    /// `ker P = im (I - P)`.
    pub fn kernel(&self, tol: T) -> Result<Subspace<T>> {
        let n = self.space.dim();
        Subspace::span(&self.space, &(linalg::identity::<T>(n) - &self.table), tol)
    }

    /// Complementary projector `I - P`.
    pub fn complementary(&self) -> Self {
        let n = self.space.dim();
        Self {
            space: self.space.clone(),
            table: linalg::identity::<T>(n) - &self.table,
        }
    }

    pub(crate) fn ensure_same_space(&self, other: &Self) -> Result<()> {
        if self.space.same_as(&other.space) {
            Ok(())
        } else {
            Err(LabError::SpaceMismatch)
        }
    }
}

/// One member of a parameter family.
#[derive(Debug, Clone)]
pub struct FamilySample<T: Real, S> {
    pub parameter: T,
    pub value: S,
}

/// Fails unless parameters are strictly increasing.
pub fn check_family_order<T: Real, S>(family: &[FamilySample<T, S>]) -> Result<()> {
    if family
        .windows(2)
        .all(|w| w[0].parameter < w[1].parameter)
    {
        Ok(())
    } else {
        Err(LabError::NonMonotoneFamily)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_real;

    #[test]
    fn rejects_non_hermitian_gram() {
        let g: CMat<f64> = from_real(2, 2, &[2.0, 1.0, 0.0, 2.0]);
        assert!(matches!(
            InnerSpace::with_gram(g, "bad"),
            Err(LabError::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn rejects_indefinite_gram() {
        let g: CMat<f64> = from_real(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(InnerSpace::with_gram(g, "indef").is_err());
    }

    #[test]
    fn weighted_basis_is_orthonormal() {
        let g: CMat<f64> = from_real(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, 2.0]);
        let space = InnerSpace::with_gram(g, "w").unwrap();
        let v: CMat<f64> = from_real(3, 2, &[1.0, 0.0, 1.0, 1.0, 0.0, 1.0]);
        let s = Subspace::span_default(&space, &v).unwrap();
        assert_eq!(s.rank(), 2);
        assert!(s.orthonormality_defect() < 1e-12);
        let p = s.orthogonal_projector();
        assert!(p.self_adjointness_defect() < 1e-12);
        assert!(p.idempotency_defect() < 1e-12);
    }

    #[test]
    fn projector_rejects_non_idempotent() {
        let space = InnerSpace::<f64>::standard(2);
        let t = from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(
            Projector::new(&space, t),
            Err(LabError::NotIdempotent(_))
        ));
    }

    #[test]
    fn span_rejects_nonpositive_tol() {
        let space = InnerSpace::<f64>::standard(2);
        let v = from_real(2, 1, &[1.0, 0.0]);
        assert!(matches!(
            Subspace::span(&space, &v, 0.0),
            Err(LabError::BadTolerance(_))
        ));
    }

    #[test]
    fn family_order_is_checked() {
        let fam = vec![
            FamilySample { parameter: 0.0f64, value: () },
            FamilySample { parameter: 0.0, value: () },
        ];
        assert!(check_family_order(&fam).is_err());
    }
}
