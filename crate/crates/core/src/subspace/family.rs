//! Continuity experiments for parameter families of subspaces.

use super::{
    check_family_order, check_tol, gap_hat, intersect, sum, FamilySample, LinearMap, Subspace,
};
use crate::error::{LabError, Result};
use crate::linalg;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRow<T> {
    pub parameter: T,
    pub distance: T,
    pub intersection_dim: usize,
    pub gap_intersection: T,
    pub gap_sum: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyContinuityReport<T> {
    pub b0: T,
    pub base_intersection_dim: usize,
    /// Whether `dim(M_b ∩ N_b)` is the same at every sample.
    pub intersection_dim_constant: bool,
    pub rows: Vec<FamilyRow<T>>,
}

impl<T: Real> FamilyContinuityReport<T> {
    /// Largest intersection and sum gaps over samples with `|b - b0| <= radius`.
    pub fn sup_within(&self, radius: T) -> (T, T) {
        self.rows
            .iter()
            .filter(|r| r.distance <= radius)
            .fold((T::zero(), T::zero()), |(a, b), r| {
                (a.max(r.gap_intersection), b.max(r.gap_sum))
            })
    }
}

/// Gaps of `M_b ∩ N_b` and `M_b + N_b` against their values at `b0`.
///
/// A non-constant intersection dimension is recorded in the report rather
/// than treated as an error.
pub fn family_continuity_experiment<T: Real>(
    family: &[FamilySample<T, (Subspace<T>, Subspace<T>)>],
    b0: &FamilySample<T, (Subspace<T>, Subspace<T>)>,
    tol: T,
) -> Result<FamilyContinuityReport<T>> {
    check_tol(tol)?;
    check_family_order(family)?;
    let (m0, n0) = &b0.value;
    let i0 = intersect(m0, n0, tol)?;
    let s0 = sum(m0, n0, tol)?;
    let mut rows = Vec::with_capacity(family.len());
    for sample in family {
        let (m, n) = &sample.value;
        let i = intersect(m, n, tol)?;
        let s = sum(m, n, tol)?;
        rows.push(FamilyRow {
            parameter: sample.parameter,
            distance: (sample.parameter - b0.parameter).abs(),
            intersection_dim: i.rank(),
            gap_intersection: gap_hat(&i, &i0)?,
            gap_sum: gap_hat(&s, &s0)?,
        });
    }
    let constant = rows.iter().all(|r| r.intersection_dim == i0.rank());
    Ok(FamilyContinuityReport {
        b0: b0.parameter,
        base_intersection_dim: i0.rank(),
        intersection_dim_constant: constant,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphGapRow<T> {
    pub parameter: T,
    pub distance: T,
    pub preimage_dim: usize,
    pub gap: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphGapReport<T> {
    pub b0: T,
    pub kernel_dim: usize,
    pub rows: Vec<GraphGapRow<T>>,
}

/// `δ̂(ker A_b0, A_b^{-1}(W))` along a family of maps, where `W` must be a
/// complement of `im A_b0` in the codomain.
pub fn graph_intersection_gap<T: Real>(
    family: &[FamilySample<T, LinearMap<T>>],
    base: &FamilySample<T, LinearMap<T>>,
    w: &Subspace<T>,
    tol: T,
) -> Result<GraphGapReport<T>> {
    check_tol(tol)?;
    check_family_order(family)?;
    let a0 = &base.value;
    if !w.space().same_as(&a0.codomain) {
        return Err(LabError::SpaceMismatch);
    }
    let image0 = Subspace::from_whitened(
        &a0.codomain,
        linalg::column_space(&a0.whitened(), tol),
    );
    let total = sum(&image0, w, tol)?;
    let common = intersect(&image0, w, tol)?;
    if total.rank() != a0.codomain.dim() || !common.is_zero() {
        return Err(LabError::Precondition(format!(
            "W is not a complement of im A_b0 (dim sum {}, dim intersection {})",
            total.rank(),
            common.rank()
        )));
    }
    let ker0 = a0.kernel(tol);
    let mut rows = Vec::with_capacity(family.len());
    for sample in family {
        if !sample.value.domain.same_as(&a0.domain) {
            return Err(LabError::SpaceMismatch);
        }
        let pre = sample.value.preimage(w, tol)?;
        rows.push(GraphGapRow {
            parameter: sample.parameter,
            distance: (sample.parameter - base.parameter).abs(),
            preimage_dim: pre.rank(),
            gap: gap_hat(&ker0, &pre)?,
        });
    }
    Ok(GraphGapReport {
        b0: base.parameter,
        kernel_dim: ker0.rank(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_real, CMat};
    use crate::scalar::re;
    use crate::subspace::InnerSpace;

    #[test]
    fn constant_family_has_zero_gaps() {
        let space = InnerSpace::<f64>::standard(3);
        let m = Subspace::span_default(&space, &from_real(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]))
            .unwrap();
        let n = Subspace::span_default(&space, &from_real(3, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]))
            .unwrap();
        let fam: Vec<_> = (0..4)
            .map(|i| FamilySample {
                parameter: i as f64,
                value: (m.clone(), n.clone()),
            })
            .collect();
        let r = family_continuity_experiment(&fam, &fam[0], 1e-8).unwrap();
        assert!(r.intersection_dim_constant);
        assert!(r.rows.iter().all(|x| x.gap_intersection < 1e-14 && x.gap_sum < 1e-14));
    }

    #[test]
    fn whole_codomain_is_not_a_complement() {
        let space = InnerSpace::<f64>::standard(2);
        let a = LinearMap::new(&space, &space, from_real(2, 2, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        let base = FamilySample { parameter: 0.0, value: a };
        let w = Subspace::whole(&space);
        assert!(matches!(
            graph_intersection_gap(std::slice::from_ref(&base), &base, &w, 1e-8),
            Err(LabError::Precondition(_))
        ));
    }

    #[test]
    fn invertible_map_and_trivial_w() {
        let space = InnerSpace::<f64>::standard(2);
        let a = LinearMap::new(&space, &space, from_real(2, 2, &[2.0, 1.0, 0.0, 1.0])).unwrap();
        let base = FamilySample { parameter: 0.0, value: a };
        let r = graph_intersection_gap(std::slice::from_ref(&base), &base, &Subspace::zero(&space), 1e-8)
            .unwrap();
        assert_eq!(r.kernel_dim, 0);
        assert_eq!(r.rows[0].gap, 0.0);
    }

    #[test]
    fn rank_one_perturbation_gap_is_linear() {
        let space = InnerSpace::<f64>::standard(2);
        let a0: CMat<f64> = from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let e: CMat<f64> = from_real(2, 2, &[0.3, 1.0, -0.7, 0.5]);
        let w = Subspace::span_default(&space, &from_real(2, 1, &[0.0, 1.0])).unwrap();
        let fam: Vec<_> = [1e-1, 1e-2, 1e-3]
            .iter()
            .rev()
            .map(|&b| FamilySample {
                parameter: b,
                value: LinearMap::new(&space, &space, &a0 + &e * re(b)).unwrap(),
            })
            .collect();
        let base = FamilySample {
            parameter: 0.0,
            value: LinearMap::new(&space, &space, a0.clone()).unwrap(),
        };
        let r = graph_intersection_gap(&fam, &base, &w, 1e-10).unwrap();
        for row in &r.rows {
            assert_eq!(row.preimage_dim, 1);
            assert!(row.gap <= 2.0 * row.distance, "{row:?}");
        }
    }
}
