use calderon_core::disk2d::*;
use calderon_core::linalg;
use proptest::prelude::*;

/// `J_n(x)` or, with `modified`, `I_n(x)` from the power series.
fn bessel(n: u32, x: f64, modified: bool) -> f64 {
    let half = x / 2.0;
    let mut term = half.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for m in 1..200 {
        let m = f64::from(m);
        term *= half * half / (m * (m + f64::from(n)));
        if !modified {
            term = -term;
        }
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Outward DtN of the free disk at shift `b`: `k + ρ J_{k+1}'...`, i.e.
/// `k - ρ J_{k+1}(ρ) / J_k(ρ)` for `b = ρ² > 0` and `k + ρ I_{k+1}(ρ) / I_k(ρ)` for `b = -ρ²`.
fn dtn_oracle(k: u32, b: f64) -> f64 {
    if b >= 0.0 {
        let rho = b.sqrt();
        f64::from(k) - rho * bessel(k + 1, rho, false) / bessel(k, rho, false)
    } else {
        let rho = (-b).sqrt();
        f64::from(k) + rho * bessel(k + 1, rho, true) / bessel(k, rho, true)
    }
}

fn first_zero_j0() -> f64 {
    let (mut a, mut b) = (2.0f64, 3.0f64);
    while b - a > 1e-15 {
        let mid = 0.5 * (a + b);
        if bessel(0, a, false) * bessel(0, mid, false) <= 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

fn free(b: f64, k_max: usize) -> RadialOperatorSpec<f64> {
    RadialOperatorSpec::new(vec![], b, k_max).unwrap()
}

#[test]
fn harmonic_dtn_up_to_fifty() {
    for m in dtn_map(&free(0.0, 50)).unwrap() {
        assert!((m.dtn.unwrap() - m.k.abs() as f64).abs() < 1e-9, "k = {}", m.k);
    }
}

#[test]
fn shifted_dtn_matches_bessel_ratio() {
    let lambda = radial_solution(0, &free(4.0, 0)).unwrap().dtn().unwrap();
    let oracle = -2.0 * bessel(1, 2.0, false) / bessel(0, 2.0, false);
    assert!((oracle + 5.1513).abs() < 1e-3);
    assert!((lambda - oracle).abs() < 1e-8, "{lambda} vs {oracle}");
}

#[test]
fn first_dirichlet_eigenvalue_is_a_pole() {
    let j01 = first_zero_j0();
    assert!((j01 - 2.404826).abs() < 1e-6);
    let b0 = locate_dirichlet_eigenvalue(&[], 0, 5.0, 6.5, 1e-12).unwrap();
    assert!((b0 - j01 * j01).abs() < 1e-10, "{b0} vs {}", j01 * j01);
    let at = radial_solution(0, &free(b0, 0)).unwrap();
    assert!(at.value.abs() < 1e-9);
    // approaching the pole, the homogenized line tends to span{(0, 1)}
    let mut last = f64::INFINITY;
    for h in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5] {
        let t = radial_solution(0, &free(b0 + h, 0)).unwrap();
        let line = homogenized_line(0, &t);
        let off = line[0].norm();
        assert!(off < last);
        last = off;
    }
    assert!(last < 1e-4);
}

#[test]
fn crossing_through_the_pole() {
    let b0 = locate_dirichlet_eigenvalue(&[], 0, 5.0, 6.5, 1e-12).unwrap();
    let grid: Vec<f64> = [-0.1, -0.03, -0.01, -1e-3, -1e-4, 0.0, 1e-4, 1e-3, 0.01, 0.03, 0.1]
        .iter()
        .map(|h| b0 + h)
        .collect();
    let rep = eigenvalue_crossing_experiment(&[], b0, 0, 20, &grid, &[-1.0, 0.0, 1.0]).unwrap();
    for r in &rep.rows {
        let h = (r.b - b0).abs();
        assert!(r.norm_distance <= 10.0 * h + 1e-12, "{r:?}");
        if h > 0.0 {
            assert!(r.tail_bound < r.norm_distance, "tail dominates at {r:?}");
        }
        if h > 0.0 && h <= 1e-3 {
            assert!(r.pole_mode_dtn.unwrap().abs() > 1e3);
        }
    }
    assert!(rep.s_spread() < 1e-12);
}

#[test]
fn poles_follow_dirichlet_eigenvalues_with_potential() {
    // V = 2 r^2: first mode-1 eigenvalue bracketed by sign change of u(1)
    let v = [0.0, 0.0, 2.0];
    let b1 = locate_dirichlet_eigenvalue(&v, 1, 10.0, 20.0, 1e-12).unwrap();
    let spec = RadialOperatorSpec::new(v.to_vec(), b1, 3).unwrap();
    let modes = dtn_map(&spec).unwrap();
    for m in &modes {
        assert_eq!(m.dtn.is_none(), m.k.abs() == 1, "k = {}", m.k);
    }
    // free-disk oracle: the potential raises the eigenvalue above j_{1,1}^2
    assert!(b1 > 3.8317f64.powi(2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dtn_matches_series(k in 0u32..=10, b in -30.0f64..30.0) {
        let spec = free(b, 10);
        let t = radial_solution(i64::from(k), &spec).unwrap();
        let oracle = dtn_oracle(k, b);
        // stay away from poles, where the relative error is meaningless
        prop_assume!(oracle.abs() < 1e3);
        let got = t.dtn().unwrap();
        prop_assert!((got - oracle).abs() <= 1e-8 * oracle.abs().max(1.0), "{got} vs {oracle}");
        let minus = radial_solution(-i64::from(k), &spec).unwrap().dtn().unwrap();
        prop_assert_eq!(minus, got);
    }

    #[test]
    fn regular_base_point_continuity(b0 in -5.0f64..5.0, s in -1.0f64..1.0) {
        let base = calderon_blocks(&free(b0, 10)).unwrap();
        let mut last = f64::INFINITY;
        for h in [1e-1, 1e-2, 1e-3] {
            let cur = calderon_blocks(&free(b0 + h, 10)).unwrap();
            let n = operator_norm_s_blockdiag(&cur.difference(&base).unwrap(), s).unwrap();
            prop_assert!(n < last);
            last = n;
        }
        prop_assert!(last < 1e-3);
        for k in -10..=10i64 {
            let p = base.block(k);
            prop_assert!(linalg::spectral_norm(&(p * p - p)) < 1e-10);
        }
    }
}
