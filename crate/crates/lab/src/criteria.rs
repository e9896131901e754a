//! The acceptance suite: ten criteria, each a timed experiment with a budget.

use std::time::Instant;

use anyhow::Result;

use crate::config::{DiskConfig, ScaleConfig, SubspaceConfig, SweepConfig, VerifyConfig};
use crate::experiments;
use crate::oracles;
use crate::report::{Assertion, CriterionSummary, Outcome, Report};

/// `(id, title, budget in seconds)`.
pub const CRITERIA: [(u32, &str, f64); 10] = [
    (1, "orthogonalized projection of random idempotents", 5.0),
    (2, "gap and angular distance of line pairs", 1.0),
    (3, "projector norm estimate on random pairs", 5.0),
    (4, "Green's form skew-diagonal and Green identity", 30.0),
    (5, "orthogonal decomposition of boundary data", 30.0),
    (6, "continuity of the 1D Calderón projection", 20.0),
    (7, "disk Dirichlet-to-Neumann values", 10.0),
    (8, "continuity through a Dirichlet eigenvalue", 20.0),
    (9, "duality and interpolation of level norms", 10.0),
    (10, "full suite deterministic and within budget", 120.0),
];

/// Criterion 8 adds the Bessel-zero check of the located eigenvalue.
pub const BESSEL_ZERO_TOL: f64 = 1e-10;

fn run_one(id: u32, cfg: &VerifyConfig, seed: u64) -> Result<Outcome> {
    match id {
        1 => experiments::ort_identities(&SubspaceConfig::default(), seed),
        2 => experiments::line_gaps(&SubspaceConfig::default(), seed),
        3 => experiments::projector_estimates(&SubspaceConfig::default(), seed),
        4 => experiments::green_corpus(cfg, seed),
        5 => experiments::decomposition_corpus(cfg, seed),
        6 => experiments::sweep_1d(&SweepConfig::default(), seed),
        7 => experiments::disk_dtn(seed),
        8 => {
            let disk = DiskConfig::default();
            let mut out = experiments::disk_crossing(&disk, seed)?;
            let j01 = oracles::first_zero_j0();
            let b0 = experiments::crossing_base(&disk)?;
            out.assertions.push(Assertion::at_most("eigenvalue_vs_bessel_zero", (b0 - j01 * j01).abs(), BESSEL_ZERO_TOL));
            Ok(out)
        }
        9 => experiments::scale_lab(&ScaleConfig::default(), seed),
        _ => anyhow::bail!("no criterion {id}"),
    }
}

fn summarize(id: u32, outcome: &Outcome, seconds: f64) -> CriterionSummary {
    let (_, title, budget) = CRITERIA[(id - 1) as usize];
    let mut assertions = outcome.assertions.clone();
    assertions.push(Assertion::at_most("runtime_seconds", seconds, budget));
    CriterionSummary {
        id,
        title: title.into(),
        pass: assertions.iter().all(|a| a.pass),
        runtime_seconds: seconds,
        budget_seconds: budget,
        assertions,
    }
}

/// Runs criterion `id` (1 to 9) and times it. An experiment error becomes a
/// failed assertion carrying the message.
pub fn run_criterion(id: u32, cfg: &VerifyConfig, seed: u64) -> (CriterionSummary, Outcome) {
    let start = Instant::now();
    let outcome = run_one(id, cfg, seed).unwrap_or_else(|e| Outcome {
        assertions: vec![Assertion::holds(format!("error: {e:#}"), false)],
        ..Outcome::default()
    });
    let seconds = start.elapsed().as_secs_f64();
    (summarize(id, &outcome, seconds), outcome)
}

fn csv_bytes(outcome: &Outcome, seed: u64) -> Vec<Vec<u8>> {
    outcome
        .tables
        .iter()
        .map(|t| t.to_csv("verify-all", seed).unwrap_or_default())
        .collect()
}

/// Criteria 1 to 9 in order, then criterion 10 over the whole run. Each
/// summary is handed to `progress` as soon as it is known.
pub fn verify(cfg: &VerifyConfig, seed: u64, mut progress: impl FnMut(&CriterionSummary)) -> Report {
    let start = Instant::now();
    let mut outcome = Outcome::default();
    let mut criteria = Vec::new();
    for id in 1..=9 {
        let (summary, out) = run_criterion(id, cfg, seed);
        progress(&summary);
        criteria.push(summary);
        outcome.extend(out);
    }
    let seconds = start.elapsed().as_secs_f64();
    let mut last = Outcome::default();
    last.assertions.push(Assertion::holds(
        "criteria_1_to_9_pass",
        criteria.iter().all(|c| c.pass),
    ));
    if cfg.determinism_check {
        let first = csv_bytes(&outcome, seed);
        let mut again = Outcome::default();
        for id in 1..=9 {
            again.extend(run_one(id, cfg, seed).unwrap_or_default());
        }
        last.assertions.push(Assertion::holds("csv_identical_on_rerun", first == csv_bytes(&again, seed)));
    }
    let summary = summarize(10, &last, seconds);
    progress(&summary);
    criteria.push(summary);
    Report {
        kind: "verify-all".into(),
        seed,
        outcome,
        criteria,
    }
}

/// `criterion N: PASS|FAIL (runtime / budget) title`.
pub fn status_line(c: &CriterionSummary) -> String {
    format!(
        "criterion {}: {} ({:.2} s / {:.0} s) {}",
        c.id,
        if c.pass { "PASS" } else { "FAIL" },
        c.runtime_seconds,
        c.budget_seconds,
        c.title
    )
}
