//! Prints one PASS/FAIL line per acceptance criterion and fails if any fails.

use std::process::ExitCode;

use calderon_lab::config::VerifyConfig;
use calderon_lab::criteria;

fn main() -> ExitCode {
    let report = criteria::verify(&VerifyConfig::default(), 1, |c| {
        println!("{}", criteria::status_line(c));
        for a in c.assertions.iter().filter(|a| !a.pass) {
            println!("    {}: {:e} {:?} {:e} (slack {:e})", a.name, a.lhs, a.relation, a.rhs, a.slack);
        }
    });
    assert_eq!(report.criteria.len(), 10);
    if report.passed() {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
