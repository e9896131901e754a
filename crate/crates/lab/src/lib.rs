//! Experiment runner for `calderon-core`: TOML configs, seeded corpora,
//! independent oracles, the acceptance suite, and CSV / JSON / SVG reports.

pub mod config;
pub mod corpus;
pub mod criteria;
pub mod experiments;
pub mod oracles;
pub mod report;

pub use report::{Assertion, Outcome, Report};
