//! The experiments behind each CLI command and acceptance criterion.
//!
//! Each returns an [`Outcome`]: deterministic tables, plots built from them,
//! and the inequalities it checked. Samples are processed in parallel and
//! collected in index order.

use anyhow::{Context, Result};
use calderon_core::disk2d::{
    self, calderon_blocks, eigenvalue_crossing_experiment, locate_dirichlet_eigenvalue, RadialOperatorSpec,
};
use calderon_core::elliptic1d::{
    family_sweep_1d, greens_identity_residual, greens_matrix, minimal_kernel_check, orthogonal_decomposition_check,
    OperatorSpec1D, SpecDocument,
};
use calderon_core::linalg::{self, CMat};
use calderon_core::poly::MatPoly;
use calderon_core::scale::{duality_check, interpolation_check, ScaleOperator};
use calderon_core::subspace::{
    gamma, gap_hat, orthogonalize_projector, ort_identity_residuals, projector_gap_vs_norm, projector_norm_estimate,
    InnerSpace, Projector, Subspace, DEFAULT_RANK_TOL,
};
use calderon_core::InnerSpace64;
use num_complex::Complex;
use rayon::prelude::*;
use std::sync::Arc;

use crate::config::{DiskConfig, ScaleConfig, SubspaceConfig, SweepConfig, VerifyConfig};
use crate::corpus::{self, Family};
use crate::oracles;
use crate::report::{Assertion, Outcome, Plot, Table};

/// Identities of the orthogonalization and agreement with the projector oracle.
pub const ORT_IDENTITY_TOL: f64 = 1e-9;
pub const ORT_ORACLE_TOL: f64 = 1e-8;
pub const LINE_GAP_TOL: f64 = 1e-10;
/// Rounding allowance when comparing a projector distance with its estimate.
pub const ESTIMATE_ROUNDING: f64 = 1e-12;
pub const SKEW_DIAGONAL_TOL: f64 = 1e-10;
pub const GREEN_RESIDUAL_TOL: f64 = 1e-9;
pub const ORTHOGONALITY_TOL: f64 = 1e-9;
pub const KERNEL_GAP_TOL: f64 = 1e-8;
/// Per-refinement decrease of the 1D projector distance, and its bound at the finest step.
pub const REFINEMENT_FACTOR: f64 = 5.0;
pub const FINEST_STEP_BOUND: f64 = 1e-2;
/// Monotonicity slack of the sweep tables.
pub const SWEEP_SLACK: f64 = 1e-9;
pub const HARMONIC_DTN_TOL: f64 = 1e-9;
pub const HARMONIC_DTN_MODES: usize = 50;
pub const BESSEL_DTN_TOL: f64 = 1e-8;
/// Slope bound of the crossing experiment and the radius it applies on.
pub const CROSSING_SLOPE: f64 = 10.0;
pub const CROSSING_RADIUS: f64 = 0.1;
/// `|λ|` must exceed this within `POLE_WINDOW` of the eigenvalue.
pub const POLE_DTN_FLOOR: f64 = 1e3;
pub const POLE_WINDOW: f64 = 1e-3;
pub const S_SPREAD_TOL: f64 = 1e-12;
pub const POLE_BLOCK_TOL: f64 = 1e-6;
pub const LOCATE_TOL: f64 = 1e-12;
/// Relative tolerance of `||T||_{-t} = ||T||_t` and of the level norm against its oracle.
pub const DUALITY_TOL: f64 = 1e-10;
pub const NORM_ORACLE_TOL: f64 = 1e-9;
/// Rounding allowance on the interpolation constant 1.
pub const INTERPOLATION_ROUNDING: f64 = 1e-12;

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

fn space_of(gram: &Option<CMat<f64>>, dim: usize) -> Result<Arc<InnerSpace64>> {
    Ok(match gram {
        Some(g) => InnerSpace::with_gram(g.clone(), "random gram")?,
        None => InnerSpace::standard(dim),
    })
}

/// Orthogonalization of random idempotents against the weighted-projector oracle.
pub fn ort_identities(cfg: &SubspaceConfig, seed: u64) -> Result<Outcome> {
    if cfg.dim_min < 1 || cfg.dim_min > cfg.dim_max {
        anyhow::bail!("need 1 <= dim_min <= dim_max");
    }
    let rows: Vec<(corpus::IdempotentSample, f64, f64)> = (0..cfg.idempotents as u64)
        .into_par_iter()
        .map(|i| {
            let s = corpus::idempotent(seed, i, cfg.dim_min, cfg.dim_max);
            let space = space_of(&s.gram, s.dim)?;
            let c = Projector::new(&space, s.table.clone())?;
            let q = orthogonalize_projector(&c)?;
            let residual = ort_identity_residuals(&c, &q)?.max();
            let g = s.gram.clone().unwrap_or_else(|| CMat::identity(s.dim, s.dim));
            let oracle = oracles::weighted_projector(&s.frame.columns(0, s.rank).into_owned(), &g)
                .context("oracle frame is rank deficient")?;
            let distance = oracles::weighted_norm(&(q.table() - oracle), &g);
            Ok((s, residual, distance))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new("ort_identities", &["sample", "dim", "rank", "weighted", "identity_residual", "oracle_distance"]);
    for (i, (s, res, dist)) in rows.iter().enumerate() {
        t.push(vec![i.into(), s.dim.into(), s.rank.into(), s.gram.is_some().into(), (*res).into(), (*dist).into()]);
    }
    let assertions = vec![
        Assertion::at_most("ort_identity_residual", max_of(rows.iter().map(|r| r.1)), ORT_IDENTITY_TOL),
        Assertion::at_most("ort_oracle_distance", max_of(rows.iter().map(|r| r.2)), ORT_ORACLE_TOL),
    ];
    Ok(Outcome {
        tables: vec![t],
        plots: vec![],
        assertions,
    })
}

/// Two lines at angle `θ` in `C²`: `δ̂ = γ = sin θ`.
pub fn line_gaps(cfg: &SubspaceConfig, seed: u64) -> Result<Outcome> {
    let space = InnerSpace::<f64>::standard(2);
    let id = CMat::identity(2, 2);
    let mut t = Table::new("line_gaps", &["theta", "sin_theta", "gap_hat", "gamma", "sampled_gap", "sampled_gamma"]);
    let (mut err_gap, mut err_gamma, mut err_sampled, mut err_sampled_gamma) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (i, &theta) in cfg.angles.iter().enumerate() {
        let xm = linalg::from_real(2, 1, &[1.0, 0.0]);
        let xn = linalg::from_real(2, 1, &[theta.cos(), theta.sin()]);
        let m = Subspace::span_default(&space, &xm)?;
        let n = Subspace::span_default(&space, &xn)?;
        let d = gap_hat(&m, &n)?;
        let g = gamma(&m, &n, DEFAULT_RANK_TOL)?;
        let mut r = corpus::stream(seed, Family::LineSampling, i as u64);
        let (lo_mn, hi_mn) = oracles::sampled_distance_ratios(&xm, &xn, &id, 400, &mut r).context("oracle")?;
        let (_, hi_nm) = oracles::sampled_distance_ratios(&xn, &xm, &id, 400, &mut r).context("oracle")?;
        let sampled = hi_mn.max(hi_nm);
        let sin = theta.sin();
        err_gap = err_gap.max((d - sin).abs());
        err_gamma = err_gamma.max((g - sin).abs());
        err_sampled = err_sampled.max((d - sampled).abs());
        err_sampled_gamma = err_sampled_gamma.max((g - lo_mn).abs());
        t.push(vec![theta.into(), sin.into(), d.into(), g.into(), sampled.into(), lo_mn.into()]);
    }
    Ok(Outcome {
        tables: vec![t],
        plots: vec![],
        assertions: vec![
            Assertion::at_most("line_gap_vs_sine", err_gap, LINE_GAP_TOL),
            Assertion::at_most("line_gamma_vs_sine", err_gamma, LINE_GAP_TOL),
            Assertion::at_most("line_gap_vs_sampling", err_sampled, LINE_GAP_TOL),
            Assertion::at_most("line_gamma_vs_sampling", err_sampled_gamma, LINE_GAP_TOL),
        ],
    })
}

/// `||P_b - P_b0||` against the projector norm estimate on random pairs.
pub fn projector_estimates(cfg: &SubspaceConfig, seed: u64) -> Result<Outcome> {
    if cfg.pair_dim_max < 2 {
        anyhow::bail!("pair_dim_max must be at least 2");
    }
    let tol = DEFAULT_RANK_TOL;
    let rows: Vec<(corpus::ProjectorPair, f64, f64, f64)> = (0..cfg.projector_pairs as u64)
        .into_par_iter()
        .map(|i| {
            let p = corpus::projector_pair(seed, i, cfg.pair_dim_max);
            let space = space_of(&p.gram, p.dim)?;
            let p0 = Projector::new(&space, p.base.clone())?;
            let p1 = Projector::new(&space, p.moved.clone())?;
            let (gap, dist) = projector_gap_vs_norm(&p1, &p0, tol)?;
            let estimate = projector_norm_estimate(&p1, &p0, tol)?;
            Ok((p, gap, dist, estimate))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(
        "projector_estimates",
        &["sample", "dim", "rank", "weighted", "perturbation", "gap", "distance", "estimate"],
    );
    let (mut violations, mut gap_above_norm) = (0usize, 0usize);
    for (i, (p, gap, dist, est)) in rows.iter().enumerate() {
        if !(*dist <= est + ESTIMATE_ROUNDING) {
            violations += 1;
        }
        if !(*gap <= dist + ESTIMATE_ROUNDING) {
            gap_above_norm += 1;
        }
        t.push(vec![
            i.into(),
            p.dim.into(),
            p.rank.into(),
            p.gram.is_some().into(),
            p.perturbation.into(),
            (*gap).into(),
            (*dist).into(),
            (*est).into(),
        ]);
    }
    let plot = Plot::new("projector_estimates", "perturbation", "distance / estimate").from_table(
        &ratio_table(&rows.iter().map(|r| (r.0.perturbation, r.2 / r.3)).collect::<Vec<_>>()),
        "x",
        "y",
        None,
    );
    Ok(Outcome {
        tables: vec![t],
        plots: vec![plot],
        assertions: vec![
            Assertion::at_most("projector_estimate_violations", violations as f64, 0.0),
            Assertion::at_most("gap_above_projector_distance", gap_above_norm as f64, 0.0),
        ],
    })
}

fn ratio_table(points: &[(f64, f64)]) -> Table {
    let mut t = Table::new("points", &["x", "y"]);
    for &(x, y) in points.iter().filter(|p| p.1.is_finite()) {
        t.push(vec![x.into(), y.into()]);
    }
    t
}

/// Idempotents, line pairs and projector pairs together.
pub fn subspace_lab(cfg: &SubspaceConfig, seed: u64) -> Result<Outcome> {
    let mut out = ort_identities(cfg, seed)?;
    out.extend(line_gaps(cfg, seed)?);
    out.extend(projector_estimates(cfg, seed)?);
    Ok(out)
}

fn corpus_specs(cfg: &VerifyConfig, seed: u64) -> Result<Vec<OperatorSpec1D<f64>>> {
    (0..cfg.elliptic_specs as u64)
        .into_par_iter()
        .map(|i| Ok(corpus::elliptic_spec(seed, i)?))
        .collect()
}

/// Green's form skew-diagonal against the principal symbol, and the Green
/// identity on random polynomial pairs.
pub fn green_corpus(cfg: &VerifyConfig, seed: u64) -> Result<Outcome> {
    let specs = corpus_specs(cfg, seed)?;
    let rows: Vec<(f64, f64, bool)> = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let (d, m) = (spec.order(), spec.fiber_dim());
            let g = greens_matrix(spec)?;
            let mut skew = 0.0f64;
            for e in 0..2 {
                for k in 0..d {
                    let got = g.entry(e, k, d - 1 - k).to_cmat::<f64>();
                    skew = skew.max(oracles::spectral_norm_eig(&(got - oracles::skew_diagonal(spec, e, k))));
                }
            }
            let mut residual = 0.0f64;
            for (u, v) in corpus::polynomial_pairs(seed, i as u64, m, cfg.green_pairs) {
                residual = residual.max(greens_identity_residual::<f64, f64>(spec, &u, &v)?);
            }
            Ok((skew, residual, g.is_upper_skew_triangular()))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(
        "green_corpus",
        &["spec", "d", "m", "skew_diagonal_error", "green_residual", "upper_skew_triangular"],
    );
    for (i, (spec, r)) in specs.iter().zip(&rows).enumerate() {
        t.push(vec![i.into(), spec.order().into(), spec.fiber_dim().into(), r.0.into(), r.1.into(), r.2.into()]);
    }
    Ok(Outcome {
        tables: vec![t],
        plots: vec![],
        assertions: vec![
            Assertion::at_most("skew_diagonal_error", max_of(rows.iter().map(|r| r.0)), SKEW_DIAGONAL_TOL),
            Assertion::at_most("green_identity_residual", max_of(rows.iter().map(|r| r.1)), GREEN_RESIDUAL_TOL),
            Assertion::holds("green_form_upper_skew_triangular", rows.iter().all(|r| r.2)),
        ],
    })
}

/// `Λ(A) ⊥ J^H Λ(A^t)` with complementary dimensions, and the kernel of the
/// orthogonalized projection equal to `J^H Λ(A^t)`.
pub fn decomposition_corpus(cfg: &VerifyConfig, seed: u64) -> Result<Outcome> {
    let specs = corpus_specs(cfg, seed)?;
    let rows: Vec<_> = specs
        .par_iter()
        .map(|spec| {
            let rep = orthogonal_decomposition_check::<f64, f64>(spec)?;
            let inner = minimal_kernel_check::<f64, f64>(spec)?;
            Ok((rep, inner))
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(
        "decomposition_corpus",
        &["spec", "d", "m", "orthogonality", "dim_cauchy", "dim_adjoint_image", "boundary_dim", "kernel_gap", "inner_solutions"],
    );
    let mut dim_failures = 0usize;
    for (i, (spec, (rep, inner))) in specs.iter().zip(&rows).enumerate() {
        let dm = spec.order() * spec.fiber_dim();
        if rep.dim_cauchy != dm || rep.dim_adjoint_image != dm || rep.boundary_dim != 2 * dm {
            dim_failures += 1;
        }
        t.push(vec![
            i.into(),
            spec.order().into(),
            spec.fiber_dim().into(),
            rep.orthogonality.into(),
            rep.dim_cauchy.into(),
            rep.dim_adjoint_image.into(),
            rep.boundary_dim.into(),
            rep.kernel_gap.into(),
            (*inner).into(),
        ]);
    }
    Ok(Outcome {
        tables: vec![t],
        plots: vec![],
        assertions: vec![
            Assertion::at_most("cauchy_data_orthogonality", max_of(rows.iter().map(|r| r.0.orthogonality)), ORTHOGONALITY_TOL),
            Assertion::at_most("dimension_mismatches", dim_failures as f64, 0.0),
            Assertion::at_most("kernel_gap", max_of(rows.iter().map(|r| r.0.kernel_gap)), KERNEL_GAP_TOL),
            Assertion::at_most("inner_solution_dim", rows.iter().map(|r| r.1).max().unwrap_or(0) as f64, 0.0),
        ],
    })
}

fn sweep_family(cfg: &SweepConfig) -> Result<(OperatorSpec1D<f64>, MatPoly<f64>)> {
    let base = OperatorSpec1D::try_from(SpecDocument {
        d: cfg.d,
        m: cfg.m,
        coeffs: cfg.coeffs.clone(),
    })?;
    let q: Vec<Complex<f64>> = cfg.q.iter().map(|c| Complex::new(c[0], c[1])).collect();
    if q.is_empty() {
        anyhow::bail!("q must have at least one coefficient");
    }
    Ok((base, MatPoly::scalar(cfg.m, &q)))
}

/// Projector distance of `A + b q` from its value at `b0` on grids of
/// decreasing spacing.
pub fn sweep_1d(cfg: &SweepConfig, _seed: u64) -> Result<Outcome> {
    let (base, q) = sweep_family(cfg)?;
    if cfg.steps.is_empty() || cfg.points_per_side == 0 {
        anyhow::bail!("need at least one step and one point per side");
    }
    let family = |b: f64| base.with_zeroth_order(&q, &b);
    let p = cfg.points_per_side as i64;
    let reports = cfg
        .steps
        .par_iter()
        .map(|&h| {
            let grid: Vec<f64> = (-p..=p).map(|j| cfg.b0 + j as f64 * h).collect();
            Ok(family_sweep_1d(family, cfg.b0, &grid)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(
        "sweep_1d",
        &["step", "b", "distance", "coefficient_distance", "gap", "projector_distance", "estimate"],
    );
    let mut assertions = Vec::new();
    let mut nearest = Vec::new();
    for (&h, rep) in cfg.steps.iter().zip(&reports) {
        for r in &rep.rows {
            t.push(vec![
                h.into(),
                r.parameter.into(),
                r.distance.into(),
                r.coefficient_distance.into(),
                r.gap.into(),
                r.projector_distance.into(),
                r.estimate.into(),
            ]);
        }
        assertions.push(Assertion::holds(format!("monotone_to_zero_step_{h:e}"), rep.monotone_to_zero(SWEEP_SLACK)));
        assertions.push(Assertion::holds(format!("estimate_holds_step_{h:e}"), rep.estimate_holds()));
        nearest.push(rep.sup_within(h * 1.5));
    }
    for (i, w) in nearest.windows(2).enumerate() {
        assertions.push(Assertion::at_least(
            format!("refinement_factor_{:e}_to_{:e}", cfg.steps[i], cfg.steps[i + 1]),
            w[0] / w[1],
            REFINEMENT_FACTOR,
        ));
    }
    let finest = *nearest.last().unwrap_or(&f64::NAN);
    assertions.push(Assertion::at_most("distance_at_finest_step", finest, FINEST_STEP_BOUND));
    let plots = vec![
        Plot::new("sweep_1d_projector_distance", "b", "projector distance").from_table(&t, "b", "projector_distance", Some("step")),
        Plot::new("sweep_1d_gap", "b", "gap").from_table(&t, "b", "gap", Some("step")),
    ];
    Ok(Outcome {
        tables: vec![t],
        plots,
        assertions,
    })
}

/// DtN values of the free disk against closed forms and the Bessel oracle.
pub fn disk_dtn(_seed: u64) -> Result<Outcome> {
    let mut t = Table::new("disk_dtn", &["k", "b", "dtn", "oracle"]);
    let harmonic = disk2d::dtn_map(&RadialOperatorSpec::new(vec![], 0.0, HARMONIC_DTN_MODES)?)?;
    let mut harmonic_err = 0.0f64;
    for m in &harmonic {
        let v = m.dtn.unwrap_or(f64::NAN);
        harmonic_err = max_of([harmonic_err, (v - m.k.abs() as f64).abs()]);
        t.push(vec![m.k.into(), 0.0.into(), v.into(), (m.k.abs() as f64).into()]);
    }
    let shifted = disk2d::dtn_map(&RadialOperatorSpec::new(vec![], 4.0, 5)?)?;
    let mut bessel_err = 0.0f64;
    for m in shifted.iter().filter(|m| m.k >= 0) {
        let v = m.dtn.unwrap_or(f64::NAN);
        let oracle = oracles::free_disk_dtn(m.k as u32, 4.0);
        if m.k == 0 {
            bessel_err = (v - oracle).abs();
        }
        t.push(vec![m.k.into(), 4.0.into(), v.into(), oracle.into()]);
    }
    Ok(Outcome {
        tables: vec![t],
        plots: vec![],
        assertions: vec![
            Assertion::at_most("harmonic_dtn_error", harmonic_err, HARMONIC_DTN_TOL),
            Assertion::at_most("bessel_dtn_error", bessel_err, BESSEL_DTN_TOL),
        ],
    })
}

/// Base shift of the crossing experiment: given, or the located eigenvalue.
pub fn crossing_base(cfg: &DiskConfig) -> Result<f64> {
    match cfg.b {
        Some(b) => Ok(b),
        None => Ok(locate_dirichlet_eigenvalue(
            &cfg.potential,
            cfg.mode,
            cfg.bracket[0],
            cfg.bracket[1],
            LOCATE_TOL,
        )?),
    }
}

/// Calderón projection distance through a Dirichlet eigenvalue of the disk.
pub fn disk_crossing(cfg: &DiskConfig, _seed: u64) -> Result<Outcome> {
    if cfg.mode.unsigned_abs() as usize > cfg.k_max {
        anyhow::bail!("mode {} is not resolved with K = {}", cfg.mode, cfg.k_max);
    }
    let b0 = crossing_base(cfg)?;
    let grid: Vec<f64> = cfg.grid.iter().map(|h| b0 + h).collect();
    let rep = eigenvalue_crossing_experiment(&cfg.potential, b0, cfg.mode, cfg.k_max, &grid, &cfg.s_list)?;
    let mut t = Table::new("disk_crossing", &["b", "s", "norm_distance", "gap", "pole_mode_flag"]);
    let mut modes = Table::new("disk_crossing_modes", &["b", "offset", "pole_mode_dtn", "tail_bound"]);
    let (mut slope, mut dtn_floor, mut tail_ratio) = (0.0f64, f64::INFINITY, 0.0f64);
    for (i, r) in rep.rows.iter().enumerate() {
        t.push(vec![r.b.into(), r.s.into(), r.norm_distance.into(), r.gap.into(), r.pole_mode_flag.into()]);
        let h = (r.b - b0).abs();
        if h > 0.0 && h <= CROSSING_RADIUS {
            slope = max_of([slope, r.norm_distance / h]);
            tail_ratio = max_of([tail_ratio, r.tail_bound / r.norm_distance]);
        }
        if h > 0.0 && h <= POLE_WINDOW {
            dtn_floor = dtn_floor.min(r.pole_mode_dtn.map_or(f64::INFINITY, f64::abs));
        }
        if i % cfg.s_list.len() == 0 {
            modes.push(vec![
                r.b.into(),
                (r.b - b0).into(),
                r.pole_mode_dtn.unwrap_or(f64::INFINITY).into(),
                r.tail_bound.into(),
            ]);
        }
    }
    let base = calderon_blocks(&RadialOperatorSpec::new(cfg.potential.clone(), b0, cfg.k_max)?)?;
    let pole_projector = linalg::from_real::<f64>(2, 2, &[0.0, 0.0, 0.0, 1.0]);
    let pole_block_err = linalg::spectral_norm(&(base.block(cfg.mode) - pole_projector));
    let mut s_max_diff = 0.0f64;
    for &s in &cfg.s_list {
        for k in -(cfg.k_max as i64)..=cfg.k_max as i64 {
            let weighted = base.block_in_scale(k, s)?;
            s_max_diff = s_max_diff.max(linalg::spectral_norm(&(weighted - base.block(k))));
        }
    }
    let mut assertions = vec![
        Assertion::at_most("crossing_slope", slope, CROSSING_SLOPE),
        Assertion::at_most("s_spread", rep.s_spread(), S_SPREAD_TOL),
        Assertion::at_most("block_s_dependence", s_max_diff, S_SPREAD_TOL),
        Assertion::at_most("pole_block_distance", pole_block_err, POLE_BLOCK_TOL),
        Assertion::at_most("tail_to_norm_ratio", tail_ratio, 1.0),
    ];
    if dtn_floor.is_finite() || cfg.grid.iter().any(|h| *h != 0.0 && h.abs() <= POLE_WINDOW) {
        assertions.push(Assertion::at_least("pole_mode_dtn_near_b0", dtn_floor, POLE_DTN_FLOOR));
    }
    let plots = vec![
        Plot::new("disk_crossing_norm", "b", "norm distance").from_table(&t, "b", "norm_distance", Some("s")),
        Plot::new("disk_crossing_gap", "b", "gap").from_table(&t, "b", "gap", Some("s")),
    ];
    Ok(Outcome {
        tables: vec![t, modes],
        plots,
        assertions,
    })
}

/// Duality and interpolation of level norms for random Hermitian operators.
pub fn scale_lab(cfg: &ScaleConfig, seed: u64) -> Result<Outcome> {
    if cfg.fiber == 0 || cfg.triples == 0 || !(cfg.level_range > 0.0) {
        anyhow::bail!("need fiber >= 1, triples >= 1 and level_range > 0");
    }
    struct Row {
        k_max: usize,
        t: f64,
        minus: f64,
        plus: f64,
        oracle: f64,
        interp: Vec<([f64; 3], f64, f64)>,
    }
    let rows: Vec<Row> = (0..cfg.operators as u64)
        .into_par_iter()
        .map(|i| {
            let s = corpus::scale_sample(seed, i, cfg.k_max, cfg.fiber, cfg.triples, cfg.level_range)?;
            let (minus, plus) = duality_check(&s.op, s.t)?;
            let oracle = oracles::spectral_norm_eig(&level_conjugate(&s.op, s.t));
            let mut interp = Vec::with_capacity(s.triples.len());
            for v in &s.triples {
                let (lhs, rhs) = interpolation_check(&s.op, v[0], v[1], v[2])?;
                interp.push((*v, lhs, rhs));
            }
            Ok(Row {
                k_max: s.op.scale.k_max,
                t: s.t,
                minus,
                plus,
                oracle,
                interp,
            })
        })
        .collect::<Result<_>>()?;
    let mut duality = Table::new("scale_duality", &["sample", "k_max", "t", "norm_minus_t", "norm_plus_t", "oracle_plus_t"]);
    let mut interpolation = Table::new("scale_interpolation", &["sample", "s0", "s", "s1", "norm_s", "bound"]);
    let (mut dual_err, mut oracle_err, mut interp_ratio) = (0.0f64, 0.0f64, 0.0f64);
    for (i, r) in rows.iter().enumerate() {
        let scale = r.plus.max(1.0);
        dual_err = max_of([dual_err, (r.minus - r.plus).abs() / scale]);
        oracle_err = max_of([oracle_err, (r.plus - r.oracle).abs() / scale]);
        duality.push(vec![i.into(), r.k_max.into(), r.t.into(), r.minus.into(), r.plus.into(), r.oracle.into()]);
        for (v, lhs, rhs) in &r.interp {
            if *rhs > 0.0 {
                interp_ratio = max_of([interp_ratio, lhs / rhs]);
            } else if *lhs > 0.0 {
                interp_ratio = f64::INFINITY;
            }
            interpolation.push(vec![i.into(), v[0].into(), v[1].into(), v[2].into(), (*lhs).into(), (*rhs).into()]);
        }
    }
    Ok(Outcome {
        tables: vec![duality, interpolation],
        plots: vec![],
        assertions: vec![
            Assertion::at_most("duality_relative_residual", dual_err, DUALITY_TOL),
            Assertion::at_most("level_norm_vs_oracle", oracle_err, NORM_ORACLE_TOL),
            Assertion::at_most("interpolation_ratio", interp_ratio, 1.0 + INTERPOLATION_ROUNDING),
        ],
    })
}

/// `diag(w)^t T diag(w)^{-t}` with `w_k = (1+k^2)^{1/2}`, written out entrywise.
fn level_conjugate(op: &ScaleOperator<f64>, t: f64) -> CMat<f64> {
    let sc = op.scale;
    let w: Vec<f64> = (0..sc.dim())
        .map(|i| {
            let k = sc.mode_of(i) as f64;
            (1.0 + k * k).powf(t / 2.0)
        })
        .collect();
    CMat::from_fn(sc.dim(), sc.dim(), |i, j| op.table[(i, j)] * Complex::new(w[i] / w[j], 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_subspace_lab_passes() {
        let cfg = SubspaceConfig {
            idempotents: 20,
            projector_pairs: 20,
            ..SubspaceConfig::default()
        };
        let out = subspace_lab(&cfg, 3).unwrap();
        assert!(out.passed(), "{:?}", out.assertions);
        assert_eq!(out.tables[0].rows.len(), 20);
    }

    #[test]
    fn small_scale_lab_passes() {
        let cfg = ScaleConfig {
            operators: 10,
            k_max: 4,
            ..ScaleConfig::default()
        };
        let out = scale_lab(&cfg, 1).unwrap();
        assert!(out.passed(), "{:?}", out.assertions);
        assert_eq!(out.tables[1].rows.len(), 50);
    }

    #[test]
    fn shift_sweep_is_monotone() {
        // A_b = -d²/dx² + b on [0, 1]
        let cfg = SweepConfig {
            q: vec![[1.0, 0.0]],
            b0: 0.0,
            points_per_side: 3,
            ..SweepConfig::default()
        };
        let out = sweep_1d(&cfg, 1).unwrap();
        assert!(out.passed(), "{:?}", out.assertions);
        let t = &out.tables[0];
        assert_eq!(t.rows.len(), 3 * 7);
    }

    #[test]
    fn small_corpus_passes() {
        let cfg = VerifyConfig {
            elliptic_specs: 5,
            ..VerifyConfig::default()
        };
        assert!(green_corpus(&cfg, 2).unwrap().passed());
        assert!(decomposition_corpus(&cfg, 2).unwrap().passed());
    }

    #[test]
    fn crossing_with_coarse_grid() {
        let cfg = DiskConfig {
            k_max: 4,
            grid: vec![-0.1, -1e-4, 1e-4, 0.1],
            ..DiskConfig::default()
        };
        let out = disk_crossing(&cfg, 1).unwrap();
        assert!(out.passed(), "{:?}", out.assertions);
        assert_eq!(out.tables[0].rows.len(), 12);
        assert_eq!(out.tables[1].rows.len(), 4);
    }

    #[test]
    fn unresolved_pole_mode_is_rejected() {
        let cfg = DiskConfig {
            mode: 5,
            k_max: 3,
            ..DiskConfig::default()
        };
        assert!(disk_crossing(&cfg, 1).is_err());
    }
}
