//! Projector orthogonalization and operator-norm estimates for projector families.

use std::sync::Arc;

use super::{check_tol, gamma, gap_delta, gap_hat, InnerSpace, Projector, Subspace};
use crate::error::{LabError, Result};
use crate::linalg::{self, CMat};
use crate::scalar::Real;

/// Orthogonalized projector `C C^t (C C^t + (I - C^t)(I - C))^{-1}`, with `^t`
/// the adjoint in the ambient inner product.
///
/// The result is the self-adjoint idempotent with the same image as `C`.
pub fn orthogonalize_projector<T: Real>(c: &Projector<T>) -> Result<Projector<T>> {
    let space = c.space();
    let n = space.dim();
    let id = linalg::identity::<T>(n);
    let ct = c.adjoint_table();
    let cc = c.table() * &ct;
    let normalizer = &cc + (&id - &ct) * (&id - c.table());
    let inv = normalizer
        .try_inverse()
        .ok_or(LabError::SingularNormalizer)?;
    Projector::new(space, cc * inv)
}

/// Residuals of the three algebraic identities together with self-adjointness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrtResiduals<T> {
    /// `||Q^2 - Q||`
    pub idempotent: T,
    /// `||C Q - Q||`
    pub left: T,
    /// `||Q C - C||`
    pub right: T,
    /// `||Q^t - Q||`
    pub self_adjoint: T,
}

impl<T: Real> OrtResiduals<T> {
    pub fn max(&self) -> T {
        self.idempotent
            .max(self.left)
            .max(self.right)
            .max(self.self_adjoint)
    }
}

pub fn ort_identity_residuals<T: Real>(
    c: &Projector<T>,
    q: &Projector<T>,
) -> Result<OrtResiduals<T>> {
    c.ensure_same_space(q)?;
    let s = c.space();
    let (ct, qt) = (c.table(), q.table());
    Ok(OrtResiduals {
        idempotent: s.op_norm(&(qt * qt - qt)),
        left: s.op_norm(&(ct * qt - qt)),
        right: s.op_norm(&(qt * ct - ct)),
        self_adjoint: q.self_adjointness_defect(),
    })
}

/// `(delta_hat(im P, im Q), ||P - Q||)`; the first never exceeds the second.
pub fn projector_gap_vs_norm<T: Real>(
    p: &Projector<T>,
    q: &Projector<T>,
    tol: T,
) -> Result<(T, T)> {
    p.ensure_same_space(q)?;
    let g = gap_hat(&p.image(tol)?, &q.image(tol)?)?;
    let d = p.space().op_norm(&(p.table() - q.table()));
    Ok((g, d))
}

/// Right-hand side of
/// `||P_b - P_b0|| <= (||P_b0|| + 1)(d1 + d2)(1/γ(im P_b, ker P_b) + 1/γ(ker P_b, im P_b))`
/// with `d1 = δ(im P_b, im P_b0)` and `d2 = δ(ker P_b, ker P_b0)`.
pub fn projector_norm_estimate<T: Real>(
    p_b: &Projector<T>,
    p_b0: &Projector<T>,
    tol: T,
) -> Result<T> {
    p_b.ensure_same_space(p_b0)?;
    let (im_b, ker_b) = (p_b.image(tol)?, p_b.kernel(tol)?);
    let (im_0, ker_0) = (p_b0.image(tol)?, p_b0.kernel(tol)?);
    let d1 = gap_delta(&im_b, &im_0)?;
    let d2 = gap_delta(&ker_b, &ker_0)?;
    let g_ik = gamma(&im_b, &ker_b, tol)?;
    let g_ki = gamma(&ker_b, &im_b, tol)?;
    if g_ik <= T::zero() || g_ki <= T::zero() {
        return Err(LabError::DegenerateGamma);
    }
    Ok((p_b0.op_norm() + T::one()) * (d1 + d2) * (T::one() / g_ik + T::one() / g_ki))
}

/// Lower bound `γ(im P_b, ker P_b) >= (γ0 - d1 γ0 - d1 - d2) / (1 + d2)`;
/// `None` when the numerator is not positive.
pub fn neubauer_gamma_bound<T: Real>(gamma0: T, delta1: T, delta2: T) -> Result<Option<T>> {
    for (name, v) in [("gamma0", gamma0), ("delta1", delta1), ("delta2", delta2)] {
        if !(v >= T::zero()) {
            return Err(LabError::NegativeInput {
                name,
                value: v.to_f64_lossy(),
            });
        }
    }
    let numerator = gamma0 - delta1 * gamma0 - delta1 - delta2;
    if numerator > T::zero() {
        Ok(Some(numerator / (T::one() + delta2)))
    } else {
        Ok(None)
    }
}

/// Linear map between two weighted spaces.
#[derive(Debug, Clone)]
pub struct LinearMap<T: Real> {
    pub domain: Arc<InnerSpace<T>>,
    pub codomain: Arc<InnerSpace<T>>,
    pub matrix: CMat<T>,
}

impl<T: Real> LinearMap<T> {
    pub fn new(
        domain: &Arc<InnerSpace<T>>,
        codomain: &Arc<InnerSpace<T>>,
        matrix: CMat<T>,
    ) -> Result<Self> {
        if matrix.nrows() != codomain.dim() || matrix.ncols() != domain.dim() {
            return Err(LabError::Dimension {
                expected: codomain.dim() * domain.dim(),
                got: matrix.nrows() * matrix.ncols(),
            });
        }
        Ok(Self {
            domain: domain.clone(),
            codomain: codomain.clone(),
            matrix,
        })
    }

    /// Matrix in whitened coordinates of both spaces.
    pub fn whitened(&self) -> CMat<T> {
        self.codomain
            .whiten(&(&self.matrix * self.domain.unwhiten(&linalg::identity(self.domain.dim()))))
    }

    pub fn kernel(&self, tol: T) -> Subspace<T> {
        Subspace::from_whitened(&self.domain, linalg::null_space(&self.whitened(), tol))
    }

    pub fn image_of(&self, m: &Subspace<T>, tol: T) -> Result<Subspace<T>> {
        if !m.space().same_as(&self.domain) {
            return Err(LabError::SpaceMismatch);
        }
        Subspace::span(&self.codomain, &(&self.matrix * m.basis()), tol)
    }

    /// Preimage of `w` under the map.
    pub fn preimage(&self, w: &Subspace<T>, tol: T) -> Result<Subspace<T>> {
        if !w.space().same_as(&self.codomain) {
            return Err(LabError::SpaceMismatch);
        }
        let a = self.whitened();
        let q = w.whitened_basis();
        let residual = &a - q * (q.adjoint() * &a);
        Ok(Subspace::from_whitened(
            &self.domain,
            linalg::null_space(&residual, tol),
        ))
    }

    pub fn rank(&self, tol: T) -> usize {
        linalg::column_space(&self.whitened(), tol).ncols()
    }
}

/// Constants and gaps for a surjection `p` and subspaces `M, N ⊇ ker p`.
///
/// `c = σ_max/σ_min` and `cbar = σ_min/σ_max` of the map induced on the
/// quotient by `ker p`; then `cbar δ(M,N) <= δ(pM,pN) <= c δ(M,N)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurjectionComparison<T> {
    pub cbar: T,
    pub c: T,
    pub gap_mn: T,
    pub gap_pm_pn: T,
    pub sigma_min: T,
    pub sigma_max: T,
}

impl<T: Real> SurjectionComparison<T> {
    /// Checks the sandwich with relative slack `eps`.
    pub fn sandwich_holds(&self, eps: T) -> bool {
        self.cbar * self.gap_mn <= self.gap_pm_pn + eps
            && self.gap_pm_pn <= self.c * self.gap_mn + eps
    }
}

pub fn surjection_gap_comparison<T: Real>(
    p: &LinearMap<T>,
    m: &Subspace<T>,
    n: &Subspace<T>,
    tol: T,
) -> Result<SurjectionComparison<T>> {
    check_tol(tol)?;
    m.ensure_same_space(n)?;
    if !m.space().same_as(&p.domain) {
        return Err(LabError::SpaceMismatch);
    }
    if p.rank(tol) != p.codomain.dim() {
        return Err(LabError::Precondition("map is not surjective".into()));
    }
    let ker = p.kernel(tol);
    let contain_tol = T::lit(1e3) * tol;
    if gap_delta(&ker, m)? > contain_tol || gap_delta(&ker, n)? > contain_tol {
        return Err(LabError::Precondition(
            "kernel of the surjection is not contained in both subspaces".into(),
        ));
    }
    let sv = linalg::singular_values(&p.whitened());
    let rank = p.codomain.dim();
    let sigma_max = sv[0];
    let sigma_min = sv[rank - 1];
    let pm = p.image_of(m, tol)?;
    let pn = p.image_of(n, tol)?;
    Ok(SurjectionComparison {
        cbar: sigma_min / sigma_max,
        c: sigma_max / sigma_min,
        gap_mn: gap_delta(m, n)?,
        gap_pm_pn: gap_delta(&pm, &pn)?,
        sigma_min,
        sigma_max,
    })
}
