use num_traits::ToPrimitive;

use super::{cauchy_data_space, OperatorSpec1D};
use crate::error::{LabError, Result};
use crate::poly::Ring;
use crate::scalar::Real;
use crate::subspace::{gap_hat, projector_norm_estimate, DEFAULT_RANK_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub parameter: T,
    /// `|b - b0|`.
    pub distance: T,
    /// `sup_x max_j ||a_j(b)(x) - a_j(b0)(x)||`.
    pub coefficient_distance: T,
    /// `δ̂(Λ(A_b), Λ(A_b0))`.
    pub gap: T,
    /// `||C(A_b) - C(A_b0)||`.
    pub projector_distance: T,
    /// Right-hand side of the projector estimate; never below `projector_distance`.
    pub estimate: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport<T> {
    pub b0: T,
    pub rows: Vec<SweepRow<T>>,
    /// Least-squares slope of `projector_distance` against `distance`.
    pub lipschitz_fit: T,
    /// Largest `projector_distance / distance` over rows with `b != b0`.
    pub max_ratio: T,
}

impl<T: Real> SweepReport<T> {
    /// Whether, on each side of `b0`, the projector distance never decreases
    /// as `|b - b0|` grows (up to `slack`), and vanishes at `b0` (up to `slack`).
    pub fn monotone_to_zero(&self, slack: T) -> bool {
        let at_base = self
            .rows
            .iter()
            .filter(|r| r.distance == T::zero())
            .all(|r| r.projector_distance <= slack);
        let side_ok = |above: bool| {
            let mut rows: Vec<&SweepRow<T>> = self
                .rows
                .iter()
                .filter(|r| r.distance > T::zero() && (r.parameter > self.b0) == above)
                .collect();
            rows.sort_by(|a, b| {
                a.distance
                    .partial_cmp(&b.distance)
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            rows.windows(2)
                .all(|w| w[1].projector_distance + slack >= w[0].projector_distance)
        };
        at_base && side_ok(true) && side_ok(false)
    }

    /// Whether `projector_distance <= estimate` in every row.
    pub fn estimate_holds(&self) -> bool {
        self.rows.iter().all(|r| r.projector_distance <= r.estimate)
    }

    /// Largest projector distance among rows with `|b - b0| <= radius`.
    pub fn sup_within(&self, radius: T) -> T {
        self.rows
            .iter()
            .filter(|r| r.distance <= radius)
            .fold(T::zero(), |acc, r| acc.max(r.projector_distance))
    }
}

/// Continuity of `b -> C(A_b)` at `b0` along `grid`.
pub fn family_sweep_1d<T, R, F>(family: F, b0: T, grid: &[T]) -> Result<SweepReport<T>>
where
    T: Real,
    R: Ring + ToPrimitive,
    F: Fn(T) -> Result<OperatorSpec1D<R>>,
{
    if grid.is_empty() {
        return Err(LabError::Invalid("empty parameter grid".into()));
    }
    let tol = T::lit(DEFAULT_RANK_TOL);
    let base = family(b0)?;
    let lambda0 = cauchy_data_space::<T, R>(&base)?;
    let p0 = lambda0.orthogonal_projector();
    let mut rows = Vec::with_capacity(grid.len());
    for &b in grid {
        let spec = family(b)?;
        let lambda = cauchy_data_space::<T, R>(&spec)?;
        let p = lambda.orthogonal_projector();
        rows.push(SweepRow {
            parameter: b,
            distance: (b - b0).abs(),
            coefficient_distance: spec.coefficient_distance(&base)?,
            gap: gap_hat(&lambda, &lambda0)?,
            projector_distance: p.space().op_norm(&(p.table() - p0.table())),
            estimate: projector_norm_estimate(&p, &p0, tol)?,
        });
    }
    let (mut sxy, mut sxx, mut max_ratio) = (T::zero(), T::zero(), T::zero());
    for r in rows.iter().filter(|r| r.distance > T::zero()) {
        sxy += r.distance * r.projector_distance;
        sxx += r.distance * r.distance;
        max_ratio = max_ratio.max(r.projector_distance / r.distance);
    }
    let lipschitz_fit = if sxx > T::zero() { sxy / sxx } else { T::zero() };
    Ok(SweepReport {
        b0,
        rows,
        lipschitz_fit,
        max_ratio,
    })
}
