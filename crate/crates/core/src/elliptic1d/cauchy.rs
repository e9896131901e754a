use std::sync::Arc;

use num_complex::Complex;
use num_traits::ToPrimitive;

use super::{greens_matrix, OperatorSpec1D};
use crate::error::{LabError, Result};
use crate::linalg::{self, CMat};
use crate::ode::{dopri5, OdeOptions};
use crate::poly::Ring;
use crate::scalar::Real;
use crate::subspace::{gap_hat, InnerSpace, Projector, Subspace, DEFAULT_RANK_TOL};

/// Orthogonality tolerance between `Λ(A)` and `J^H Λ(A^t)`.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;
/// Gap tolerance between `ker C(A)` and `J^H Λ(A^t)`.
pub const KERNEL_GAP_TOL: f64 = 1e-8;

/// Solutions of `Au = 0` started from the canonical jets at `0`.
///
/// Column `i` of `at_zero` and `at_one` holds `(u, u', .., u^{(d-1)})` of the
/// `i`-th solution, stacked as `k * m + component`, in plain `d/dx` derivatives.
#[derive(Debug, Clone)]
pub struct KernelBasis<T: Real> {
    pub d: usize,
    pub m: usize,
    pub at_zero: CMat<T>,
    pub at_one: CMat<T>,
}

impl<T: Real> KernelBasis<T> {
    pub fn len(&self) -> usize {
        self.at_zero.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `2dm x dm` matrix whose columns are the inward jets of the basis.
    pub fn traces(&self) -> CMat<T> {
        let n = self.d * self.m;
        let mut out = CMat::zeros(2 * n, self.len());
        out.view_mut((0, 0), (n, self.len())).copy_from(&self.at_zero);
        let mut one = self.at_one.clone();
        for k in (1..self.d).step_by(2) {
            for c in 0..self.m {
                one.row_mut(k * self.m + c).neg_mut();
            }
        }
        out.view_mut((n, 0), (n, self.len())).copy_from(&one);
        out
    }
}

/// Transports plain-derivative jets (columns of `initial`) of solutions of
/// `Au = 0` from `x0` to `x1`.
pub fn transport<T: Real, R: Ring + ToPrimitive>(
    spec: &OperatorSpec1D<R>,
    x0: T,
    x1: T,
    initial: &CMat<T>,
) -> Result<CMat<T>> {
    let (d, m) = (spec.order(), spec.fiber_dim());
    let n = d * m;
    if initial.nrows() != n {
        return Err(LabError::Dimension {
            expected: n,
            got: initial.nrows(),
        });
    }
    let cols = initial.ncols();
    let y0: Vec<Complex<T>> = initial.iter().copied().collect();
    let mut failure = None;
    let rhs = |x: T, y: &[Complex<T>], dy: &mut [Complex<T>]| {
        let coeff: Vec<CMat<T>> = spec.coeffs().iter().map(|a| a.eval(x)).collect();
        let lead_inv = match coeff[d].clone().try_inverse() {
            Some(inv) => inv,
            None => {
                failure = Some(x);
                dy.fill(Complex::new(T::lit(f64::NAN), T::lit(f64::NAN)));
                return;
            }
        };
        // column-major state: entry (row, col) at col * n + row
        for c in 0..cols {
            let col = &y[c * n..(c + 1) * n];
            let out = &mut dy[c * n..(c + 1) * n];
            out[..n - m].copy_from_slice(&col[m..]);
            let mut acc = linalg::CVec::<T>::zeros(m);
            for (j, a) in coeff.iter().enumerate().take(d) {
                let uj = linalg::CVec::from_column_slice(&col[j * m..(j + 1) * m]);
                acc += a * uj;
            }
            let top = -(&lead_inv * acc);
            out[n - m..].copy_from_slice(top.as_slice());
        }
    };
    let result = dopri5(rhs, x0, x1, &y0, &OdeOptions::default());
    if let Some(x) = failure {
        return Err(LabError::NotElliptic(format!("leading coefficient singular at x = {x}")));
    }
    let (y, _) = result?;
    Ok(CMat::from_column_slice(n, cols, &y))
}

/// The `dm` solutions of `Au = 0` with canonical initial jets at `0`.
pub fn kernel_basis<T: Real, R: Ring + ToPrimitive>(spec: &OperatorSpec1D<R>) -> Result<KernelBasis<T>> {
    spec.ellipticity::<T>()?;
    let n = spec.order() * spec.fiber_dim();
    let at_zero = linalg::identity::<T>(n);
    let at_one = transport(spec, T::zero(), T::one(), &at_zero)?;
    Ok(KernelBasis {
        d: spec.order(),
        m: spec.fiber_dim(),
        at_zero,
        at_one,
    })
}

/// Standard inner product on the `2dm` jets of the two-point boundary.
pub fn boundary_space<T: Real, R: Ring>(spec: &OperatorSpec1D<R>) -> Arc<InnerSpace<T>> {
    InnerSpace::standard(spec.boundary_dim())
}

/// `Λ(A)`: inward jets of all solutions of `Au = 0`, a `dm`-dimensional subspace of `C^{2dm}`.
pub fn cauchy_data_space<T: Real, R: Ring + ToPrimitive>(spec: &OperatorSpec1D<R>) -> Result<Subspace<T>> {
    let basis = kernel_basis::<T, R>(spec)?;
    let space = boundary_space(spec);
    let lambda = Subspace::span(&space, &basis.traces(), T::lit(DEFAULT_RANK_TOL))?;
    let dm = spec.order() * spec.fiber_dim();
    if lambda.rank() != dm {
        return Err(LabError::Precondition(format!(
            "Cauchy data space has dimension {} instead of {dm}",
            lambda.rank()
        )));
    }
    Ok(lambda)
}

/// Orthogonalized Calderón projection: the orthogonal projector onto `Λ(A)`.
pub fn calderon_projector<T: Real, R: Ring + ToPrimitive>(spec: &OperatorSpec1D<R>) -> Result<Projector<T>> {
    Ok(cauchy_data_space::<T, R>(spec)?.orthogonal_projector())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport<T> {
    /// Largest `|(f, J^H g)|` over orthonormal bases of `Λ(A)` and `J^H Λ(A^t)`.
    pub orthogonality: T,
    pub dim_cauchy: usize,
    pub dim_adjoint_image: usize,
    pub boundary_dim: usize,
    /// `δ̂(ker C(A), J^H Λ(A^t))`.
    pub kernel_gap: T,
}

impl<T: Real> DecompositionReport<T> {
    pub fn passes(&self) -> bool {
        self.orthogonality <= T::lit(ORTHOGONALITY_TOL)
            && self.dim_cauchy + self.dim_adjoint_image == self.boundary_dim
            && self.kernel_gap <= T::lit(KERNEL_GAP_TOL)
    }
}

/// Checks `C^{2dm} = Λ(A) ⊕ J^H Λ(A^t)` as an orthogonal sum.
pub fn orthogonal_decomposition_check<T: Real, R: Ring + ToPrimitive>(
    spec: &OperatorSpec1D<R>,
) -> Result<DecompositionReport<T>> {
    let lambda = cauchy_data_space::<T, R>(spec)?;
    let lambda_adj = cauchy_data_space::<T, R>(&spec.formal_adjoint())?;
    let j = greens_matrix(spec)?.boundary_matrix::<T>();
    let space = lambda.space().clone();
    let image = Subspace::span(&space, &(j.adjoint() * lambda_adj.basis()), T::lit(DEFAULT_RANK_TOL))?;
    let cross = image.basis().adjoint() * lambda.basis();
    let orthogonality = cross.iter().fold(T::zero(), |acc, z| acc.max(z.norm_sqr().sqrt()));
    let kernel = lambda.orthogonal_projector().kernel(T::lit(DEFAULT_RANK_TOL))?;
    Ok(DecompositionReport {
        orthogonality,
        dim_cauchy: lambda.rank(),
        dim_adjoint_image: image.rank(),
        boundary_dim: spec.boundary_dim(),
        kernel_gap: gap_hat(&kernel, &image)?,
    })
}

/// Dimension of the inner solutions, those with vanishing jets at both ends.
///
/// Also integrates the zero jet and fails if the trajectory leaves `1e-10`.
pub fn minimal_kernel_check<T: Real, R: Ring + ToPrimitive>(spec: &OperatorSpec1D<R>) -> Result<usize> {
    let basis = kernel_basis::<T, R>(spec)?;
    let n = spec.order() * spec.fiber_dim();
    let zero = transport(spec, T::zero(), T::one(), &CMat::zeros(n, 1))?;
    let drift = linalg::spectral_norm(&zero);
    if drift > T::lit(1e-10) {
        return Err(LabError::Integrator(format!("zero jet drifted to {:e}", drift.to_f64_lossy())));
    }
    let inner = linalg::null_space(&basis.traces(), T::lit(DEFAULT_RANK_TOL));
    Ok(inner.ncols())
}
