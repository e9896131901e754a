//! TOML experiment configurations: flat keys, polynomials as nested arrays.
//!
//! Unknown keys are rejected, so a typo surfaces as a parse error naming the
//! key and its line instead of silently falling back to a default.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config {path}: {message}")]
    Parse { path: String, message: String },
    #[error("config {path}: kind `{found}` does not match the `{expected}` command")]
    Kind {
        path: String,
        expected: &'static str,
        found: String,
    },
}

/// A config section that belongs to one CLI command.
pub trait ExperimentConfig: DeserializeOwned + Default {
    const KIND: &'static str;

    fn kind_tag(&self) -> Option<&str>;
    fn seed(&self) -> Option<u64>;
}

/// Parses `text` (read from `path`, used in diagnostics only).
pub fn parse<C: ExperimentConfig>(text: &str, path: &str) -> Result<C, ConfigError> {
    let cfg: C = toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: path.to_string(),
        message: e.to_string(),
    })?;
    if let Some(kind) = cfg.kind_tag() {
        if kind != C::KIND {
            return Err(ConfigError::Kind {
                path: path.into(),
                expected: C::KIND,
                found: kind.into(),
            });
        }
    }
    Ok(cfg)
}

/// Reads and parses the file, or returns the defaults when `path` is `None`.
pub fn load<C: ExperimentConfig>(path: Option<&Path>) -> Result<C, ConfigError> {
    let Some(path) = path else {
        return Ok(C::default());
    };
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: shown.clone(),
        source,
    })?;
    parse(&text, &shown)
}

macro_rules! experiment_config {
    ($ty:ident, $kind:literal) => {
        impl ExperimentConfig for $ty {
            const KIND: &'static str = $kind;

            fn kind_tag(&self) -> Option<&str> {
                self.kind.as_deref()
            }

            fn seed(&self) -> Option<u64> {
                self.seed
            }
        }
    };
}

/// Random idempotents, line pairs and projector pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SubspaceConfig {
    pub kind: Option<String>,
    pub seed: Option<u64>,
    pub idempotents: usize,
    pub dim_min: usize,
    pub dim_max: usize,
    /// Angles of the line pairs, radians.
    pub angles: Vec<f64>,
    pub projector_pairs: usize,
    pub pair_dim_max: usize,
}

impl Default for SubspaceConfig {
    fn default() -> Self {
        use std::f64::consts::PI;
        Self {
            kind: None,
            seed: None,
            idempotents: 1000,
            dim_min: 2,
            dim_max: 20,
            angles: vec![PI / 12.0, PI / 6.0, PI / 4.0],
            projector_pairs: 1000,
            pair_dim_max: 12,
        }
    }
}
experiment_config!(SubspaceConfig, "subspace-random");

/// Random Hermitian operators on the truncated circle scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScaleConfig {
    pub kind: Option<String>,
    pub seed: Option<u64>,
    pub operators: usize,
    /// Largest mode cutoff; each operator draws its cutoff from `0..=k_max`.
    pub k_max: usize,
    pub fiber: usize,
    /// Random `(s0, s, s1)` triples per operator.
    pub triples: usize,
    /// Levels are drawn from `[-level_range, level_range]`.
    pub level_range: f64,
}

impl Default for ScaleConfig {
    fn default() -> Self {
        Self {
            kind: None,
            seed: None,
            operators: 1000,
            k_max: 16,
            fiber: 1,
            triples: 5,
            level_range: 3.0,
        }
    }
}
experiment_config!(ScaleConfig, "scale-random");

/// `A_b = A + b q(x)` on `[0, 1]` around `b0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub kind: Option<String>,
    pub seed: Option<u64>,
    /// Order of the base operator.
    pub d: usize,
    /// Fiber dimension.
    pub m: usize,
    /// Base operator coefficients `[j][power][row][col] = [re, im]`.
    pub coeffs: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
    /// Scalar multiplier `q`, `[power] = [re, im]`.
    pub q: Vec<[f64; 2]>,
    pub b0: f64,
    /// Grid spacings, coarse to fine.
    pub steps: Vec<f64>,
    /// Grid points on each side of `b0` per spacing.
    pub points_per_side: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            kind: None,
            seed: None,
            d: 2,
            m: 1,
            coeffs: vec![
                vec![vec![vec![[0.0, 0.0]]]],
                vec![vec![vec![[0.0, 0.0]]]],
                vec![vec![vec![[-1.0, 0.0]]]],
            ],
            q: vec![[1.0, 0.0], [1.0, 0.0], [0.0, 0.0], [-1.0, 0.0]],
            b0: 0.5,
            steps: vec![1e-1, 1e-2, 1e-3],
            points_per_side: 10,
        }
    }
}
experiment_config!(SweepConfig, "sweep-1d");

/// `-Δ + V(r) - b` on the unit disk through a Dirichlet eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiskConfig {
    pub kind: Option<String>,
    pub seed: Option<u64>,
    /// Coefficients of `V` in powers of `r`.
    #[serde(rename = "V")]
    pub potential: Vec<f64>,
    /// Base shift; located as a Dirichlet eigenvalue of `mode` in `bracket` when absent.
    pub b: Option<f64>,
    pub mode: i64,
    pub bracket: [f64; 2],
    #[serde(rename = "K")]
    pub k_max: usize,
    pub s_list: Vec<f64>,
    /// Offsets `b - b0`.
    pub grid: Vec<f64>,
}

impl Default for DiskConfig {
    fn default() -> Self {
        Self {
            kind: None,
            seed: None,
            potential: Vec::new(),
            b: None,
            mode: 0,
            bracket: [5.0, 6.5],
            k_max: 20,
            s_list: vec![-1.0, 0.0, 1.0],
            grid: vec![
                -0.1, -0.05, -0.03, -0.01, -3e-3, -1e-3, -1e-4, -1e-5, 0.0, 1e-5, 1e-4, 1e-3, 3e-3, 0.01,
                0.03, 0.05, 0.1,
            ],
        }
    }
}
experiment_config!(DiskConfig, "disk-crossing");

/// The full acceptance suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub kind: Option<String>,
    pub seed: Option<u64>,
    /// Size of the random elliptic operator corpus.
    pub elliptic_specs: usize,
    /// Random polynomial pairs per operator for the Green identity.
    pub green_pairs: usize,
    /// Run the suite a second time and compare the CSV bytes.
    pub determinism_check: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            kind: None,
            seed: None,
            elliptic_specs: 200,
            green_pairs: 3,
            determinism_check: true,
        }
    }
}
experiment_config!(VerifyConfig, "verify-all");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c: DiskConfig = parse("", "x.toml").unwrap();
        assert_eq!(c, DiskConfig::default());
    }

    #[test]
    fn keys_override_defaults() {
        let c: DiskConfig = parse("V = [0.0, 0.0, 2.0]\nK = 5\nmode = 1\n", "x.toml").unwrap();
        assert_eq!(c.potential, vec![0.0, 0.0, 2.0]);
        assert_eq!((c.k_max, c.mode), (5, 1));
    }

    #[test]
    fn nested_polynomials_parse() {
        let text = "d = 1\nm = 1\ncoeffs = [[[[[0.0, 0.0]]]], [[[[1.0, 0.0]]], [[[0.5, -0.5]]]]]\nq = [[1.0, 0.0]]\n";
        let c: SweepConfig = parse(text, "x.toml").unwrap();
        assert_eq!(c.coeffs[1][1][0][0], [0.5, -0.5]);
    }

    #[test]
    fn unknown_key_is_named_with_its_line() {
        let err = parse::<DiskConfig>("K = 3\nbogus = 1\n", "x.toml").unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn type_error_is_named_with_its_line() {
        let err = parse::<SweepConfig>("b0 = 0.5\nsteps = \"fine\"\n", "x.toml").unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("steps"), "{err}");
    }

    #[test]
    fn kind_must_match_command() {
        let err = parse::<DiskConfig>("kind = \"sweep-1d\"\n", "x.toml").unwrap_err();
        assert!(matches!(err, ConfigError::Kind { .. }));
        assert!(parse::<DiskConfig>("kind = \"disk-crossing\"\n", "x.toml").is_ok());
    }
}
