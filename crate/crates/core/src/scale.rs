//! Truncated Sobolev scale on the circle.
//!
//! Sections are finite Fourier series with modes `-K..=K` and `fiber`
//! components per mode. The level-`s` norm is `sum (1+k^2)^s |c_k|^2`, and
//! operators are dense tables over (mode, component) pairs. On this
//! truncation the duality and interpolation statements for order-0 operators
//! are exact finite-dimensional facts, with interpolation constant 1 for the
//! diagonal generator `Φ = (Δ + 1)^{1/2}`.

use crate::error::{LabError, Result};
use crate::linalg::{self, CMat, CVec};
use crate::scalar::{re, Real};
use crate::subspace::{check_family_order, FamilySample};
use num_complex::Complex;

/// Modes `-K..=K`, `fiber` components each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FourierScale {
    pub k_max: usize,
    pub fiber: usize,
}

impl FourierScale {
    pub fn new(k_max: usize, fiber: usize) -> Result<Self> {
        if fiber == 0 {
            return Err(LabError::Invalid("fiber must be positive".into()));
        }
        Ok(Self { k_max, fiber })
    }

    pub fn dim(&self) -> usize {
        (2 * self.k_max + 1) * self.fiber
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let k = self.k_max as i64;
        -k..=k
    }

    pub fn index(&self, mode: i64, component: usize) -> usize {
        debug_assert!(mode.unsigned_abs() as usize <= self.k_max && component < self.fiber);
        ((mode + self.k_max as i64) as usize) * self.fiber + component
    }

    /// Mode of a flat index.
    pub fn mode_of(&self, index: usize) -> i64 {
        (index / self.fiber) as i64 - self.k_max as i64
    }

    /// `(1 + k^2)^s`.
    pub fn weight<T: Real>(&self, s: T, mode: i64) -> T {
        weight(s, mode)
    }

    /// Diagonal of `W^s` with `W = diag((1+k^2)^{1/2})`, the isometry `H^s -> H^0`.
    pub(crate) fn half_weights<T: Real>(&self, s: T) -> Vec<T> {
        (0..self.dim())
            .map(|i| weight(s / T::lit(2.0), self.mode_of(i)))
            .collect()
    }
}

pub fn weight<T: Real>(s: T, mode: i64) -> T {
    let k = T::lit(mode as f64);
    (T::one() + k * k).powf(s)
}

/// A finitely supported section of the scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleSection<T: Real> {
    pub scale: FourierScale,
    pub coeffs: CVec<T>,
}

impl<T: Real> ScaleSection<T> {
    pub fn new(scale: FourierScale, coeffs: CVec<T>) -> Result<Self> {
        if coeffs.len() != scale.dim() {
            return Err(LabError::Dimension {
                expected: scale.dim(),
                got: coeffs.len(),
            });
        }
        Ok(Self { scale, coeffs })
    }

    pub fn zero(scale: FourierScale) -> Self {
        Self {
            scale,
            coeffs: CVec::zeros(scale.dim()),
        }
    }

    /// Section with a single nonzero coefficient.
    pub fn single(scale: FourierScale, mode: i64, component: usize, value: Complex<T>) -> Self {
        let mut u = Self::zero(scale);
        u.coeffs[scale.index(mode, component)] = value;
        u
    }

    /// `||u||_s`.
    pub fn norm(&self, s: T) -> T {
        self.coeffs
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, c)| {
                acc + weight(s, self.scale.mode_of(i)) * c.norm_sqr()
            })
            .sqrt()
    }
}

/// `||u||_s`.
pub fn norm_s<T: Real>(u: &ScaleSection<T>, s: T) -> T {
    u.norm(s)
}

/// Mode-wise L² pairing `sum c_k conj(d_k)`, the `H^s x H^{-s}` duality.
pub fn pairing<T: Real>(u: &ScaleSection<T>, v: &ScaleSection<T>) -> Result<Complex<T>> {
    if u.scale != v.scale {
        return Err(LabError::SpaceMismatch);
    }
    Ok(u.coeffs
        .iter()
        .zip(v.coeffs.iter())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b.conj()))
}

/// `sup_v |<u, v>| / ||v||_{-s}`, evaluated at the maximizer `v = W^{2s} u`.
pub fn dual_norm<T: Real>(u: &ScaleSection<T>, s: T) -> T {
    let mut v = u.clone();
    for (i, c) in v.coeffs.iter_mut().enumerate() {
        *c *= re(weight(s, u.scale.mode_of(i)));
    }
    let denom = v.norm(-s);
    if denom == T::zero() {
        return T::zero();
    }
    pairing(u, &v).expect("same scale").norm_sqr().sqrt() / denom
}

/// A dense operator on the truncated scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleOperator<T: Real> {
    pub scale: FourierScale,
    pub table: CMat<T>,
    /// The level-0 extension is self-adjoint.
    pub selfadjoint_at_0: bool,
}

impl<T: Real> ScaleOperator<T> {
    /// Wraps `table`; when `selfadjoint_at_0` is set the table must be
    /// Hermitian to `1e-12` (relative to its size).
    pub fn new(scale: FourierScale, table: CMat<T>, selfadjoint_at_0: bool) -> Result<Self> {
        let n = scale.dim();
        if table.nrows() != n || table.ncols() != n {
            return Err(LabError::Dimension {
                expected: n,
                got: table.nrows().max(table.ncols()),
            });
        }
        if selfadjoint_at_0 {
            let tol = T::lit(1e-12).max(T::default_epsilon() * T::lit(100.0))
                * linalg::spectral_norm(&table).max(T::one());
            let defect = linalg::hermitian_defect(&table);
            if defect > tol {
                return Err(LabError::Invalid(format!(
                    "operator flagged self-adjoint has Hermitian defect {defect}"
                )));
            }
        }
        Ok(Self {
            scale,
            table,
            selfadjoint_at_0,
        })
    }

    pub fn identity(scale: FourierScale) -> Self {
        Self {
            scale,
            table: linalg::identity(scale.dim()),
            selfadjoint_at_0: true,
        }
    }

    pub fn diagonal(scale: FourierScale, diag: &[Complex<T>]) -> Result<Self> {
        if diag.len() != scale.dim() {
            return Err(LabError::Dimension {
                expected: scale.dim(),
                got: diag.len(),
            });
        }
        let selfadjoint = diag.iter().all(|z| z.im == T::zero());
        Ok(Self {
            scale,
            table: CMat::from_diagonal(&CVec::from_column_slice(diag)),
            selfadjoint_at_0: selfadjoint,
        })
    }

    pub fn apply(&self, u: &ScaleSection<T>) -> Result<ScaleSection<T>> {
        if u.scale != self.scale {
            return Err(LabError::SpaceMismatch);
        }
        ScaleSection::new(self.scale, &self.table * &u.coeffs)
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.scale != other.scale {
            return Err(LabError::SpaceMismatch);
        }
        Ok(Self {
            scale: self.scale,
            table: &self.table * &other.table,
            selfadjoint_at_0: false,
        })
    }

    /// `self - other`; self-adjoint when both are.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.scale != other.scale {
            return Err(LabError::SpaceMismatch);
        }
        Ok(Self {
            scale: self.scale,
            table: &self.table - &other.table,
            selfadjoint_at_0: self.selfadjoint_at_0 && other.selfadjoint_at_0,
        })
    }

    /// Conjugate `W^s T W^{-s}`: the level-`s` operator seen on `H^0`.
    pub fn conjugated(&self, s: T) -> CMat<T> {
        let w = self.scale.half_weights(s);
        CMat::from_fn(self.table.nrows(), self.table.ncols(), |i, j| {
            self.table[(i, j)] * re(w[i] / w[j])
        })
    }
}

/// `Φ^s`: multiplies mode `k` by `(1+k^2)^{s/2}`.
pub fn phi_multiplier<T: Real>(scale: FourierScale, s: T) -> ScaleOperator<T> {
    let diag: Vec<Complex<T>> = scale.half_weights(s).into_iter().map(re).collect();
    ScaleOperator::diagonal(scale, &diag).expect("dimension matches")
}

/// `Φ_d = diag(Φ^{(d-1)/2}, Φ^{(d-3)/2}, ..., Φ^{(1-d)/2})` across `d` jet
/// components; the scale's fiber is split into `d` equal jet blocks.
pub fn homogenizer<T: Real>(scale: FourierScale, d: usize) -> Result<ScaleOperator<T>> {
    homogenizer_power(scale, d, T::one())
}

pub fn homogenizer_inverse<T: Real>(scale: FourierScale, d: usize) -> Result<ScaleOperator<T>> {
    homogenizer_power(scale, d, -T::one())
}

fn homogenizer_power<T: Real>(
    scale: FourierScale,
    d: usize,
    sign: T,
) -> Result<ScaleOperator<T>> {
    if d == 0 || scale.fiber % d != 0 {
        return Err(LabError::Invalid(format!(
            "fiber {} is not a multiple of the order {d}",
            scale.fiber
        )));
    }
    let block = scale.fiber / d;
    let diag: Vec<Complex<T>> = (0..scale.dim())
        .map(|i| {
            let jet = (i % scale.fiber) / block;
            let exponent = T::lit((d as f64 - 1.0 - 2.0 * jet as f64) / 4.0) * sign;
            re(weight(exponent, scale.mode_of(i)))
        })
        .collect();
    ScaleOperator::diagonal(scale, &diag)
}

/// `||T||_{s,s}`: largest singular value of `W^s T W^{-s}`.
pub fn operator_norm<T: Real>(op: &ScaleOperator<T>, s: T) -> T {
    linalg::spectral_norm(&op.conjugated(s))
}

/// `(||T||_{-t}, ||T||_t)` for an operator self-adjoint at level 0.
pub fn duality_check<T: Real>(op: &ScaleOperator<T>, t: T) -> Result<(T, T)> {
    if !op.selfadjoint_at_0 {
        return Err(LabError::Precondition(
            "duality requires a self-adjoint level-0 extension".into(),
        ));
    }
    if !(t >= T::zero()) {
        return Err(LabError::NegativeInput {
            name: "t",
            value: t.to_f64_lossy(),
        });
    }
    Ok((operator_norm(op, -t), operator_norm(op, t)))
}

fn check_triple<T: Real>(s0: T, s: T, s1: T) -> Result<()> {
    if s0 < s && s < s1 {
        Ok(())
    } else {
        Err(LabError::Precondition(format!(
            "need s0 < s < s1, got ({s0}, {s}, {s1})"
        )))
    }
}

/// `(||T||_s, ||T||_{s1}^{(s-s0)/(s1-s0)} ||T||_{s0}^{(s1-s)/(s1-s0)})`.
pub fn interpolation_check<T: Real>(op: &ScaleOperator<T>, s0: T, s: T, s1: T) -> Result<(T, T)> {
    check_triple(s0, s, s1)?;
    let lhs = operator_norm(op, s);
    let rhs = interpolate(operator_norm(op, s0), operator_norm(op, s1), s0, s, s1);
    Ok((lhs, rhs))
}

/// `a1^{(s-s0)/(s1-s0)} a0^{(s1-s)/(s1-s0)}` with `0^0 = 1`.
fn interpolate<T: Real>(a0: T, a1: T, s0: T, s: T, s1: T) -> T {
    let w1 = (s - s0) / (s1 - s0);
    let w0 = (s1 - s) / (s1 - s0);
    if a0 == T::zero() || a1 == T::zero() {
        return T::zero();
    }
    a1.powf(w1) * a0.powf(w0)
}

/// `(||u||_s, ||u||_{s1}^{1-θ} ||u||_{s0}^θ)` with `θ = (s1-s)/(s1-s0)`.
pub fn vector_interpolation_check<T: Real>(
    u: &ScaleSection<T>,
    s0: T,
    s: T,
    s1: T,
) -> Result<(T, T)> {
    check_triple(s0, s, s1)?;
    Ok((u.norm(s), interpolate(u.norm(s0), u.norm(s1), s0, s, s1)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferRow<T> {
    pub parameter: T,
    pub s: T,
    /// `||T_b - T_b0||_s`
    pub norm: T,
    /// Interpolation of the endpoint norms at `±t`.
    pub bound: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport<T> {
    pub b0: T,
    pub t: T,
    pub rows: Vec<TransferRow<T>>,
    /// Worst `| ||Δ||_t - ||Δ||_{-t} |` over the family.
    pub duality_residual: T,
    /// Whether every member is self-adjoint at level 0, so that the duality
    /// residual is an assertion rather than an observation.
    pub duality_asserted: bool,
}

impl<T: Real> TransferReport<T> {
    pub fn max_violation(&self) -> T {
        self.rows
            .iter()
            .map(|r| r.norm - r.bound)
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn column(&self, s: T) -> Vec<&TransferRow<T>> {
        self.rows.iter().filter(|r| r.s == s).collect()
    }
}

/// Tabulates `||T_b - T_b0||_s` for `s` on a uniform grid of `levels` points in `[-t, t]`.
pub fn continuity_transfer_experiment<T: Real>(
    family: &[FamilySample<T, ScaleOperator<T>>],
    base: &FamilySample<T, ScaleOperator<T>>,
    t: T,
    levels: usize,
) -> Result<TransferReport<T>> {
    check_family_order(family)?;
    if !(t > T::zero()) || levels < 2 {
        return Err(LabError::Precondition("need t > 0 and at least two levels".into()));
    }
    let grid: Vec<T> = (0..levels)
        .map(|i| -t + (t + t) * T::count(i) / T::count(levels - 1))
        .collect();
    let mut rows = Vec::new();
    let mut duality_residual = T::zero();
    let mut asserted = base.value.selfadjoint_at_0;
    for sample in family {
        let diff = sample.value.difference(&base.value)?;
        asserted &= sample.value.selfadjoint_at_0;
        let lo = operator_norm(&diff, -t);
        let hi = operator_norm(&diff, t);
        duality_residual = duality_residual.max((hi - lo).abs());
        for &s in &grid {
            let norm = operator_norm(&diff, s);
            let bound = if s == -t {
                lo
            } else if s == t {
                hi
            } else {
                interpolate(lo, hi, -t, s, t)
            };
            rows.push(TransferRow {
                parameter: sample.parameter,
                s,
                norm,
                bound,
            });
        }
    }
    Ok(TransferReport {
        b0: base.parameter,
        t,
        rows,
        duality_residual,
        duality_asserted: asserted,
    })
}
