//! `-Δ + V(r) - b` on the unit disk, decoupled into angular Fourier modes.
//!
//! Mode `k` of a solution is `u(r) e^{ikθ}` with
//! `-(u'' + u'/r - k² u/r²) + (V - b) u = 0`. Its Cauchy data on the circle
//! are the value and the inward normal derivative `-u'(1)`; after
//! homogenization by `((1+k²)^{1/4}, (1+k²)^{-1/4})` both entries live in the
//! same Sobolev order, and the mode contributes one line in `C²`.
//!
//! The `H^s` inner product restricted to one mode is `(1+k²)^s` times the
//! standard one, so per-mode projectors, norms and gaps do not depend on `s`.
//! The routines below still compute them in the weighted geometry, which
//! turns that independence into a checked quantity.

use num_complex::Complex;

use crate::error::{LabError, Result};
use crate::linalg::{self, CMat, CVec};
use crate::ode::{dopri5, OdeOptions};
use crate::scalar::{re, Real};
use crate::scale::weight;
use crate::subspace::{gap_hat, InnerSpace, Subspace, DEFAULT_RANK_TOL};

/// Radius at which the regular solution is started from its series.
pub const START_RADIUS: f64 = 1e-6;

/// `|u(1)| / |(u(1), u'(1))|` below which a mode is reported as a pole.
pub const POLE_TOL: f64 = 1e-9;

/// Constant `c` of the tail bound `c |Δ| / (K + 1)` for modes `|k| > K`.
pub const TAIL_CONSTANT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialOperatorSpec<T> {
    /// Coefficients of `V` in powers of `r`.
    pub potential: Vec<T>,
    pub b: T,
    /// Angular modes `-K..=K` are resolved.
    pub k_max: usize,
}

impl<T: Real> RadialOperatorSpec<T> {
    pub fn new(potential: Vec<T>, b: T, k_max: usize) -> Result<Self> {
        if potential.iter().chain([&b]).any(|v| !v.is_finite()) {
            return Err(LabError::Invalid("potential and shift must be finite".into()));
        }
        Ok(Self {
            potential,
            b,
            k_max,
        })
    }

    /// Real coefficients make the operator formally self-adjoint.
    pub fn is_formally_selfadjoint(&self) -> bool {
        true
    }

    pub fn with_shift(&self, b: T) -> Self {
        Self { b, ..self.clone() }
    }

    pub fn potential_at(&self, r: T) -> T {
        self.potential.iter().rev().fold(T::zero(), |acc, &c| acc * r + c)
    }

    /// `sup_{0<=r<=1} |V(r) - b|` bounded by the coefficient sum.
    fn shifted_potential_bound(&self) -> T {
        let mut sum = (self.potential.first().copied().unwrap_or_else(T::zero) - self.b).abs();
        for c in self.potential.iter().skip(1) {
            sum += c.abs();
        }
        sum
    }
}

/// Boundary value and outward radial derivative of the regular solution of
/// mode `k`, scaled so that `|(value, derivative)| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialTrace<T> {
    pub value: T,
    pub derivative: T,
}

impl<T: Real> RadialTrace<T> {
    pub fn is_pole(&self) -> bool {
        self.value.abs() <= T::lit(POLE_TOL)
    }

    /// Outward Dirichlet-to-Neumann value `u'(1) / u(1)`, `None` at a pole.
    pub fn dtn(&self) -> Option<T> {
        (!self.is_pole()).then(|| self.derivative / self.value)
    }
}

/// Regular solution of mode `k`, written as `u = r^{|k|} y` with
/// `y'' + (2|k|+1) y' / r = (V - b) y` and started at [`START_RADIUS`] from
/// `y = 1 + (V(0) - b) r² / (4|k| + 4)`.
pub fn radial_solution<T: Real>(k: i64, spec: &RadialOperatorSpec<T>) -> Result<RadialTrace<T>> {
    if k.unsigned_abs() as usize > spec.k_max {
        return Err(LabError::Precondition(format!("mode {k} exceeds the cutoff {}", spec.k_max)));
    }
    let n = T::count(k.unsigned_abs() as usize);
    let eps = T::lit(START_RADIUS);
    let v0 = spec.potential.first().copied().unwrap_or_else(T::zero);
    let a2 = (v0 - spec.b) / (T::lit(4.0) * n + T::lit(4.0));
    let y0 = [re(T::one() + a2 * eps * eps), re(T::lit(2.0) * a2 * eps)];
    let friction = T::lit(2.0) * n + T::one();
    let (y, _) = dopri5(
        |r: T, y: &[Complex<T>], dy: &mut [Complex<T>]| {
            let q = spec.potential_at(r) - spec.b;
            dy[0] = y[1];
            dy[1] = y[0] * q - y[1] * (friction / r);
        },
        eps,
        T::one(),
        &y0,
        &OdeOptions::default(),
    )?;
    let value = y[0].re;
    let derivative = n * y[0].re + y[1].re;
    let scale = (value * value + derivative * derivative).sqrt();
    if !(scale > T::lit(1e-13)) {
        return Err(LabError::Integrator(format!(
            "mode {k}: boundary value and derivative both vanish"
        )));
    }
    Ok(RadialTrace {
        value: value / scale,
        derivative: derivative / scale,
    })
}

/// One angular mode of the Cauchy data.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeModel<T: Real> {
    pub k: i64,
    pub trace: RadialTrace<T>,
    /// Outward DtN value, `None` at a pole.
    pub dtn: Option<T>,
    /// Unit vector spanning the homogenized Cauchy data of the mode.
    pub homogenized_line: CVec<T>,
}

/// Homogenized inward Cauchy data `((1+k²)^{1/4} u(1), -(1+k²)^{-1/4} u'(1))`,
/// normalized; `(0, 1)` at a pole.
pub fn homogenized_line<T: Real>(k: i64, trace: &RadialTrace<T>) -> CVec<T> {
    if trace.is_pole() {
        return CVec::from_vec(vec![re(T::zero()), re(T::one())]);
    }
    let quarter = T::lit(0.25);
    let v = weight(quarter, k) * trace.value;
    let dn = -weight(-quarter, k) * trace.derivative;
    // orient so the normal-derivative entry is non-negative (a pole then gives (0, 1))
    let sign = if dn < T::zero() { -T::one() } else { T::one() };
    let norm = (v * v + dn * dn).sqrt();
    CVec::from_vec(vec![re(sign * v / norm), re(sign * dn / norm)])
}

/// Mode models for `k = -K..=K`.
pub fn dtn_map<T: Real>(spec: &RadialOperatorSpec<T>) -> Result<Vec<ModeModel<T>>> {
    let kk = spec.k_max as i64;
    let mut traces = Vec::with_capacity(spec.k_max + 1);
    for n in 0..=kk {
        traces.push(radial_solution(n, spec)?);
    }
    Ok((-kk..=kk)
        .map(|k| {
            let trace = traces[k.unsigned_abs() as usize];
            ModeModel {
                k,
                trace,
                dtn: trace.dtn(),
                homogenized_line: homogenized_line(k, &trace),
            }
        })
        .collect())
}

/// Per-mode orthogonal projectors onto the homogenized Cauchy data lines.
#[derive(Debug, Clone)]
pub struct CalderonBlocks<T: Real> {
    pub spec: RadialOperatorSpec<T>,
    pub modes: Vec<ModeModel<T>>,
    /// `blocks[i]` belongs to `modes[i]`.
    pub blocks: Vec<CMat<T>>,
}

impl<T: Real> CalderonBlocks<T> {
    pub fn k_max(&self) -> usize {
        self.spec.k_max
    }

    pub fn block(&self, k: i64) -> &CMat<T> {
        &self.blocks[(k + self.spec.k_max as i64) as usize]
    }

    /// Orthogonal projector of mode `k` computed in the `H^s` inner product.
    pub fn block_in_scale(&self, k: i64, s: T) -> Result<CMat<T>> {
        let line = &self.modes[(k + self.spec.k_max as i64) as usize].homogenized_line;
        let space = mode_space(k, s)?;
        let sub = Subspace::span(&space, &CMat::from_columns(std::slice::from_ref(line)), T::lit(DEFAULT_RANK_TOL))?;
        Ok(sub.orthogonal_projector().into_table())
    }

    /// Bound on the block differences for modes `|k| > K` between `self` and
    /// `other`: `c (|b - b'| + sup |V - V'|) / (K + 1)`.
    ///
    /// Valid when `sup |V - b| <= (K + 1)²` for both operators, which makes
    /// every unresolved mode free of Dirichlet eigenvalues.
    pub fn truncation_tail_bound(&self, other: &Self) -> Result<T> {
        let kk = T::count(self.spec.k_max.min(other.spec.k_max) + 1);
        for s in [&self.spec, &other.spec] {
            if s.shifted_potential_bound() > kk * kk {
                return Err(LabError::Precondition(format!(
                    "cutoff {} too small for the potential and shift",
                    s.k_max
                )));
            }
        }
        let len = self.spec.potential.len().max(other.spec.potential.len());
        let mut dv = T::zero();
        for i in 0..len {
            let a = self.spec.potential.get(i).copied().unwrap_or_else(T::zero);
            let b = other.spec.potential.get(i).copied().unwrap_or_else(T::zero);
            dv += (a - b).abs();
        }
        Ok(T::lit(TAIL_CONSTANT) * ((self.spec.b - other.spec.b).abs() + dv) / kk)
    }

    /// Block-wise difference `self - other`.
    pub fn difference(&self, other: &Self) -> Result<Vec<CMat<T>>> {
        if self.spec.k_max != other.spec.k_max {
            return Err(LabError::Dimension {
                expected: self.spec.k_max,
                got: other.spec.k_max,
            });
        }
        Ok(self.blocks.iter().zip(&other.blocks).map(|(a, b)| a - b).collect())
    }
}

/// `C²` with inner product `(1+k²)^s` times the standard one.
fn mode_space<T: Real>(k: i64, s: T) -> Result<std::sync::Arc<InnerSpace<T>>> {
    let w = re(weight(s, k));
    InnerSpace::with_gram(linalg::identity::<T>(2) * w, format!("H^{s} mode {k}"))
}

pub fn calderon_blocks<T: Real>(spec: &RadialOperatorSpec<T>) -> Result<CalderonBlocks<T>> {
    let modes = dtn_map(spec)?;
    let blocks = modes
        .iter()
        .map(|m| &m.homogenized_line * m.homogenized_line.adjoint())
        .collect();
    Ok(CalderonBlocks {
        spec: spec.clone(),
        modes,
        blocks,
    })
}

/// `sup_k ||ΔC_k||` in the `H^s` operator norm; `blocks[i]` is mode `i - K`.
pub fn operator_norm_s_blockdiag<T: Real>(blocks: &[CMat<T>], s: T) -> Result<T> {
    if blocks.len() % 2 != 1 {
        return Err(LabError::Invalid("expected blocks for modes -K..=K".into()));
    }
    let kk = (blocks.len() / 2) as i64;
    let mut sup = T::zero();
    for (i, b) in blocks.iter().enumerate() {
        let space = mode_space(i as i64 - kk, s)?;
        sup = sup.max(space.op_norm(b));
    }
    Ok(sup)
}

/// `δ̂` between the truncated Cauchy data spaces of two operators in the
/// `H^s` geometry: the largest per-mode line gap.
pub fn gap_s<T: Real>(a: &CalderonBlocks<T>, b: &CalderonBlocks<T>, s: T) -> Result<T> {
    if a.k_max() != b.k_max() {
        return Err(LabError::Dimension {
            expected: a.k_max(),
            got: b.k_max(),
        });
    }
    let tol = T::lit(DEFAULT_RANK_TOL);
    let mut sup = T::zero();
    for (ma, mb) in a.modes.iter().zip(&b.modes) {
        let space = mode_space(ma.k, s)?;
        let la = Subspace::span(&space, &CMat::from_columns(std::slice::from_ref(&ma.homogenized_line)), tol)?;
        let lb = Subspace::span(&space, &CMat::from_columns(std::slice::from_ref(&mb.homogenized_line)), tol)?;
        sup = sup.max(gap_hat(&la, &lb)?);
    }
    Ok(sup)
}

/// Smallest `b` in `[lo, hi]` with `u(1) = 0` for mode `k`, by bisection on
/// the sign of the boundary value; `u(1)` must change sign on the bracket.
pub fn locate_dirichlet_eigenvalue<T: Real>(
    potential: &[T],
    k: i64,
    lo: T,
    hi: T,
    tol: T,
) -> Result<T> {
    let kk = k.unsigned_abs() as usize;
    let value = |b: T| -> Result<T> {
        let spec = RadialOperatorSpec::new(potential.to_vec(), b, kk)?;
        Ok(radial_solution(k, &spec)?.value)
    };
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (value(a)?, value(b)?);
    if fa * fb > T::zero() {
        return Err(LabError::Precondition(format!(
            "mode {k}: boundary value does not change sign on [{lo}, {hi}]"
        )));
    }
    while b - a > tol {
        let mid = (a + b) / T::lit(2.0);
        let fm = value(mid)?;
        if fm == T::zero() {
            return Ok(mid);
        }
        if fa * fm < T::zero() {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Ok((a + b) / T::lit(2.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingRow<T> {
    pub b: T,
    pub s: T,
    /// `||C(b) - C(b0)||_{s,s}` over the resolved modes.
    pub norm_distance: T,
    /// `δ̂_s` between the Cauchy data spaces at `b` and `b0`.
    pub gap: T,
    /// Whether some resolved mode is at a pole for this `b`.
    pub pole_mode_flag: bool,
    /// Outward DtN value of the pole mode at `b`, `None` when it is a pole itself.
    pub pole_mode_dtn: Option<T>,
    /// Bound on the contribution of the unresolved modes.
    pub tail_bound: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingReport<T> {
    pub b0: T,
    pub pole_mode: i64,
    pub rows: Vec<CrossingRow<T>>,
}

impl<T: Real> CrossingReport<T> {
    /// Largest difference between norms at the same `b` across the `s` values.
    pub fn s_spread(&self) -> T {
        let mut spread = T::zero();
        for r in &self.rows {
            for q in self.rows.iter().filter(|q| q.b == r.b) {
                spread = spread.max((r.norm_distance - q.norm_distance).abs());
            }
        }
        spread
    }

    /// Largest `norm_distance / |b - b0|` over rows with `b != b0`.
    pub fn max_ratio(&self) -> T {
        self.rows
            .iter()
            .filter(|r| r.b != self.b0)
            .fold(T::zero(), |acc, r| acc.max(r.norm_distance / (r.b - self.b0).abs()))
    }
}

/// `||C(A - bI) - C(A - b0 I)||_{s,s}` along `grid` for each `s`, where `b0`
/// is a Dirichlet eigenvalue of mode `pole_mode`.
pub fn eigenvalue_crossing_experiment<T: Real>(
    potential: &[T],
    b0: T,
    pole_mode: i64,
    k_max: usize,
    grid: &[T],
    s_list: &[T],
) -> Result<CrossingReport<T>> {
    if grid.is_empty() || s_list.is_empty() {
        return Err(LabError::Invalid("empty grid or s list".into()));
    }
    let base_spec = RadialOperatorSpec::new(potential.to_vec(), b0, k_max)?;
    let base = calderon_blocks(&base_spec)?;
    let mut rows = Vec::with_capacity(grid.len() * s_list.len());
    for &b in grid {
        let cur = calderon_blocks(&base_spec.with_shift(b))?;
        let diff = cur.difference(&base)?;
        let tail = cur.truncation_tail_bound(&base)?;
        let pole_mode_flag = cur.modes.iter().any(|m| m.dtn.is_none());
        let pole_mode_dtn = cur.modes[(pole_mode + k_max as i64) as usize].dtn;
        for &s in s_list {
            rows.push(CrossingRow {
                b,
                s,
                norm_distance: operator_norm_s_blockdiag(&diff, s)?,
                gap: gap_s(&cur, &base, s)?,
                pole_mode_flag,
                pole_mode_dtn,
                tail_bound: tail,
            });
        }
    }
    Ok(CrossingReport {
        b0,
        pole_mode,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free(b: f64, k_max: usize) -> RadialOperatorSpec<f64> {
        RadialOperatorSpec::new(vec![], b, k_max).unwrap()
    }

    #[test]
    fn harmonic_modes() {
        let spec = free(0.0, 8);
        for m in dtn_map(&spec).unwrap() {
            assert!((m.dtn.unwrap() - m.k.abs() as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn inward_conversion() {
        // u = r^2: u(1) = 1, u'(1) = 2, inward derivative -2
        let t = RadialTrace {
            value: 1.0 / 5f64.sqrt(),
            derivative: 2.0 / 5f64.sqrt(),
        };
        let line = homogenized_line(2, &t);
        let a = 5f64.powf(0.25);
        let expected = [a, -2.0 / a];
        let norm = (expected[0] * expected[0] + expected[1] * expected[1]).sqrt();
        // oriented so the second entry is non-negative
        assert!((line[0].re + expected[0] / norm).abs() < 1e-15);
        assert!((line[1].re + expected[1] / norm).abs() < 1e-15);
    }

    #[test]
    fn pole_line_is_vertical() {
        let t = RadialTrace {
            value: 0.0,
            derivative: -1.0,
        };
        assert_eq!(t.dtn(), None);
        let line = homogenized_line(0, &t);
        assert_eq!((line[0].re, line[1].re), (0.0, 1.0));
    }

    #[test]
    fn blocks_are_orthogonal_projectors_in_every_scale() {
        let c = calderon_blocks(&RadialOperatorSpec::new(vec![0.5, 0.0, 1.0], 3.0, 6).unwrap()).unwrap();
        for k in -6..=6i64 {
            let p = c.block(k);
            assert!(linalg::spectral_norm(&(p * p - p)) < 1e-12);
            assert!(linalg::hermitian_defect(p) < 1e-12);
            for s in [-1.0, 0.0, 1.0] {
                let q = c.block_in_scale(k, s).unwrap();
                assert!(linalg::spectral_norm(&(q - p)) < 1e-12);
            }
        }
    }

    #[test]
    fn norm_and_gap_examples() {
        let a = calderon_blocks(&free(0.0, 5)).unwrap();
        let same = a.difference(&a).unwrap();
        assert_eq!(operator_norm_s_blockdiag(&same, 1.0).unwrap(), 0.0);
        assert!(gap_s(&a, &a, 0.0).unwrap() < 1e-15);

        let b = calderon_blocks(&free(0.1, 5)).unwrap();
        let diff = b.difference(&a).unwrap();
        // closed form: sup_k |sin(angle between the lines)|
        let mut expected = 0.0f64;
        for (ma, mb) in a.modes.iter().zip(&b.modes) {
            let (u, v) = (&ma.homogenized_line, &mb.homogenized_line);
            let sin = (u[0].re * v[1].re - u[1].re * v[0].re).abs();
            expected = expected.max(sin);
        }
        for s in [-1.0, 0.0, 1.0] {
            let n = operator_norm_s_blockdiag(&diff, s).unwrap();
            let g = gap_s(&b, &a, s).unwrap();
            assert!((n - expected).abs() < 1e-12, "s={s}");
            assert!((g - expected).abs() < 1e-12, "s={s}");
        }
        assert!(expected > 0.0);
        let c = calderon_blocks(&free(0.05, 5)).unwrap();
        assert!(gap_s(&c, &a, 0.0).unwrap() < expected);
    }

    #[test]
    fn single_perturbed_mode() {
        let a = calderon_blocks(&free(0.0, 3)).unwrap();
        let mut diff = a.difference(&a).unwrap();
        diff[4] = linalg::from_real(2, 2, &[0.0, 0.3, 0.3, 0.0]);
        assert!((operator_norm_s_blockdiag(&diff, 1.0).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn tail_bound_dominates_unresolved_modes() {
        // compare resolved modes just past a small cutoff with the bound for that cutoff
        let k_cut = 4;
        for (b, b2) in [(0.0, 0.1), (5.0, 5.8), (-3.0, 2.0), (20.0, 24.0)] {
            let wide_a = calderon_blocks(&free(b, 40)).unwrap();
            let wide_b = calderon_blocks(&free(b2, 40)).unwrap();
            let bound = calderon_blocks(&free(b, k_cut))
                .unwrap()
                .truncation_tail_bound(&calderon_blocks(&free(b2, k_cut)).unwrap())
                .unwrap();
            for k in (k_cut as i64 + 1)..=40 {
                let d = linalg::spectral_norm(&(wide_a.block(k) - wide_b.block(k)));
                assert!(d <= bound, "b={b}, b'={b2}, k={k}: {d} > {bound}");
            }
        }
        assert!(calderon_blocks(&free(30.0, 4))
            .unwrap()
            .truncation_tail_bound(&calderon_blocks(&free(0.0, 4)).unwrap())
            .is_err());
    }

    #[test]
    fn mode_cutoff_is_enforced() {
        assert!(radial_solution(4, &free(0.0, 3)).is_err());
    }
}
