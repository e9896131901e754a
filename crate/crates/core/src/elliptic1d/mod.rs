//! Elliptic ODE systems on `[0, 1]` with polynomial matrix coefficients:
//! formal adjoints, Green's form, boundary jets, Cauchy data spaces and
//! their orthogonalized Calderón projections.
//!
//! Boundary jets are taken along the inward normal, `+d/dx` at `0` and
//! `-d/dx` at `1`. A jet vector in `C^{2dm}` has index
//! `endpoint * d * m + k * m + component`.
//!
//! The boundary of `[0, 1]` is two points, so the boundary Laplacian vanishes
//! and the homogenized and adjusted objects coincide with the plain ones.

mod cauchy;
mod green;
mod sweep;

pub use cauchy::*;
pub use green::*;
pub use sweep::*;

use num_complex::Complex;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::{self, CMat, CVec};
use crate::poly::{binomial, int, Mat, MatPoly, Ring};
use crate::scalar::Real;

/// Number of sample points used when a property of the coefficients is
/// checked over `[0, 1]`.
pub const COEFFICIENT_GRID: usize = 65;

/// Largest accepted condition number of the leading coefficient.
pub const MAX_LEADING_CONDITION: f64 = 1e10;

/// `A = sum_j a_j(x) (d/dx)^j` acting on `C^m`-valued functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "SpecDocument<R>",
    into = "SpecDocument<R>",
    bound(serialize = "R: Ring + Serialize", deserialize = "R: Ring + Deserialize<'de>")
)]
pub struct OperatorSpec1D<R: Ring> {
    d: usize,
    m: usize,
    coeffs: Vec<MatPoly<R>>,
}

/// Serialized layout: `coeffs[j][power][row][col] = [re, im]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecDocument<R> {
    pub d: usize,
    pub m: usize,
    pub coeffs: Vec<Vec<Vec<Vec<[R; 2]>>>>,
}

impl<R: Ring> TryFrom<SpecDocument<R>> for OperatorSpec1D<R> {
    type Error = LabError;

    fn try_from(doc: SpecDocument<R>) -> Result<Self> {
        let m = doc.m;
        let mut coeffs = Vec::with_capacity(doc.coeffs.len());
        for (j, table) in doc.coeffs.into_iter().enumerate() {
            let mut mats = Vec::with_capacity(table.len());
            for (p, rows) in table.into_iter().enumerate() {
                if rows.len() != m || rows.iter().any(|r| r.len() != m) {
                    return Err(LabError::Invalid(format!(
                        "coefficient {j}, power {p}: expected a {m}x{m} table"
                    )));
                }
                let data = rows
                    .into_iter()
                    .flatten()
                    .map(|[re, im]| Complex::new(re, im))
                    .collect();
                mats.push(Mat { rows: m, cols: m, data });
            }
            coeffs.push(MatPoly::from_coeffs(m, m, mats)?);
        }
        Self::new(doc.d, m, coeffs)
    }
}

impl<R: Ring> From<OperatorSpec1D<R>> for SpecDocument<R> {
    fn from(spec: OperatorSpec1D<R>) -> Self {
        let m = spec.m;
        let coeffs = spec
            .coeffs
            .into_iter()
            .map(|p| {
                p.coeffs
                    .into_iter()
                    .map(|c| {
                        (0..m)
                            .map(|i| {
                                (0..m)
                                    .map(|k| {
                                        let z = c.get(i, k).clone();
                                        [z.re, z.im]
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self { d: spec.d, m, coeffs }
    }
}

impl<R: Ring> OperatorSpec1D<R> {
    /// `coeffs[j]` is the `m x m` coefficient of the `j`-th derivative.
    pub fn new(d: usize, m: usize, coeffs: Vec<MatPoly<R>>) -> Result<Self> {
        if d == 0 || m == 0 {
            return Err(LabError::Invalid(format!("need d >= 1 and m >= 1, got d = {d}, m = {m}")));
        }
        if coeffs.len() != d + 1 {
            return Err(LabError::Invalid(format!(
                "order {d} needs {} coefficients, got {}",
                d + 1,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| c.rows != m || c.cols != m) {
            return Err(LabError::Invalid(format!("coefficients must be {m}x{m}")));
        }
        if coeffs[d].is_zero() {
            return Err(LabError::NotElliptic("leading coefficient vanishes identically".into()));
        }
        Ok(Self { d, m, coeffs })
    }

    /// Scalar operator `sum_j c_j (d/dx)^j` with constant coefficients on `C^m`.
    pub fn constant_scalar(m: usize, c: &[R]) -> Result<Self> {
        let coeffs = c
            .iter()
            .map(|v| MatPoly::scalar(m, &[Complex::new(v.clone(), R::zero())]))
            .collect::<Vec<_>>();
        Self::new(c.len().saturating_sub(1), m, coeffs)
    }

    pub fn order(&self) -> usize {
        self.d
    }

    pub fn fiber_dim(&self) -> usize {
        self.m
    }

    /// Dimension `2dm` of the boundary jet space.
    pub fn boundary_dim(&self) -> usize {
        2 * self.d * self.m
    }

    pub fn coeffs(&self) -> &[MatPoly<R>] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &MatPoly<R> {
        &self.coeffs[j]
    }

    /// `A + b q(x)` where `q` is an `m x m` polynomial added to `a_0`.
    pub fn with_zeroth_order(&self, q: &MatPoly<R>, b: &R) -> Result<Self> {
        if q.rows != self.m || q.cols != self.m {
            return Err(LabError::Dimension {
                expected: self.m,
                got: q.rows,
            });
        }
        let mut coeffs = self.coeffs.clone();
        coeffs[0] = coeffs[0].add(&q.scale(&Complex::new(b.clone(), R::zero())));
        Self::new(self.d, self.m, coeffs)
    }

    /// `A u` for an `m x 1` polynomial `u`, exactly.
    pub fn apply_poly(&self, u: &MatPoly<R>) -> MatPoly<R> {
        let mut out = MatPoly::zero(self.m, u.cols);
        let mut du = u.clone();
        for a in &self.coeffs {
            out = out.add(&a.mul(&du));
            du = du.derivative();
        }
        out
    }

    /// Formal adjoint `A^t v = sum_j (-1)^j (a_j^H v)^{(j)}`, expanded by Leibniz.
    pub fn formal_adjoint(&self) -> Self {
        let mut coeffs = vec![MatPoly::zero(self.m, self.m); self.d + 1];
        for (j, a) in self.coeffs.iter().enumerate() {
            let ah = a.adjoint();
            let sign: i64 = if j % 2 == 0 { 1 } else { -1 };
            for (p, slot) in coeffs.iter_mut().enumerate().take(j + 1) {
                let c = sign * binomial(j, p);
                let term = ah
                    .nth_derivative(j - p)
                    .scale(&Complex::new(int::<R>(c), R::zero()));
                *slot = slot.add(&term);
            }
        }
        Self {
            d: self.d,
            m: self.m,
            coeffs,
        }
    }

    /// Maps every coefficient through `f`, e.g. to convert exact tables to floats.
    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S + Copy) -> OperatorSpec1D<S> {
        OperatorSpec1D {
            d: self.d,
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| c.map(f)).collect(),
        }
    }
}

impl<R: Ring + ToPrimitive> OperatorSpec1D<R> {
    /// `sum_j a_j(x) u^{(j)}(x)` given the derivatives `jets[j] = u^{(j)}(x)`.
    pub fn apply_at<T: Real>(&self, x: T, jets: &[CVec<T>]) -> Result<CVec<T>> {
        if jets.len() != self.d + 1 {
            return Err(LabError::Dimension {
                expected: self.d + 1,
                got: jets.len(),
            });
        }
        let mut out = CVec::zeros(self.m);
        for (a, u) in self.coeffs.iter().zip(jets) {
            if u.len() != self.m {
                return Err(LabError::Dimension {
                    expected: self.m,
                    got: u.len(),
                });
            }
            out += a.eval(x) * u;
        }
        Ok(out)
    }

    /// `a_d(x) (i xi)^d`.
    pub fn principal_symbol<T: Real>(&self, x: T, xi: T) -> CMat<T> {
        let ixi = Complex::new(T::zero(), xi);
        let mut factor = Complex::new(T::one(), T::zero());
        for _ in 0..self.d {
            factor *= ixi;
        }
        self.coeffs[self.d].eval(x) * factor
    }

    /// Largest condition number of `a_d(x)` over an even grid of `[0, 1]`;
    /// fails when it exceeds [`MAX_LEADING_CONDITION`].
    pub fn ellipticity<T: Real>(&self) -> Result<T> {
        let mut worst = T::one();
        for i in 0..COEFFICIENT_GRID {
            let x = T::count(i) / T::count(COEFFICIENT_GRID - 1);
            let s = linalg::singular_values(&self.coeffs[self.d].eval(x));
            let (hi, lo) = (s[0], s[s.len() - 1]);
            let cond = if lo > T::zero() { hi / lo } else { T::max_value().unwrap_or(hi) };
            if !(cond <= T::lit(MAX_LEADING_CONDITION)) {
                return Err(LabError::NotElliptic(format!(
                    "leading coefficient has condition number {:e} at x = {x}", cond.to_f64_lossy()
                )));
            }
            worst = worst.max(cond);
        }
        Ok(worst)
    }

    /// `sup_x max_j ||a_j(x) - b_j(x)||` over the coefficient grid.
    pub fn coefficient_distance<T: Real>(&self, other: &Self) -> Result<T> {
        if (self.d, self.m) != (other.d, other.m) {
            return Err(LabError::Invalid("operators of different shape".into()));
        }
        let mut sup = T::zero();
        for i in 0..COEFFICIENT_GRID {
            let x = T::count(i) / T::count(COEFFICIENT_GRID - 1);
            for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
                sup = sup.max(linalg::spectral_norm(&(a.eval(x) - b.eval(x))));
            }
        }
        Ok(sup)
    }

    pub fn to_real<T: Real + Ring>(&self) -> OperatorSpec1D<T> {
        self.map(|r| T::lit(r.to_f64().unwrap_or(f64::NAN)))
    }
}

/// Inward jets `(u, u', .., u^{(d-1)})` at `0` and `(u, -u', .., (-1)^{d-1} u^{(d-1)})`
/// at `1` of an `m x 1` polynomial, as a vector in `C^{2dm}`.
pub fn boundary_jets<T: Real, R: Ring + ToPrimitive>(d: usize, u: &MatPoly<R>) -> CVec<T> {
    let m = u.rows;
    let mut out = CVec::zeros(2 * d * m);
    let mut du = u.clone();
    for k in 0..d {
        let at0 = du.eval(T::zero());
        let at1 = du.eval(T::one());
        let sign = if k % 2 == 0 { T::one() } else { -T::one() };
        for c in 0..m {
            out[k * m + c] = at0[(c, 0)];
            out[d * m + k * m + c] = at1[(c, 0)] * sign;
        }
        du = du.derivative();
    }
    out
}
