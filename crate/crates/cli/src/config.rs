//! Run configuration files: one document with `[quadrature]`, `[ensembles]`,
//! `[hunt]` and `[tolerances]` sections. TOML by default, JSON for `.json`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use traceineq::hunter::HuntConfig;
use traceineq::integral::QuadratureConfig;
use traceineq::report::parse_real;

use crate::error::CliError;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub quadrature: Option<QuadratureConfig>,
    pub ensembles: Option<EnsemblesSection>,
    pub hunt: Option<HuntConfig>,
    pub tolerances: Option<TolerancesSection>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsemblesSection {
    pub dims: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesSection {
    /// Relative-slack band for verdicts.
    pub verdict: Option<f64>,
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
    let text = read_text(path)?;
    let is_json = path.extension().is_some_and(|e| e == "json");
    let parsed = if is_json {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Comma-separated reals; `inf` allowed.
pub fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',').map(parse_real).collect()
}

/// `a..b` (inclusive) or a comma-separated list.
pub fn parse_dims(text: &str) -> Result<Vec<usize>, String> {
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|e| format!("invalid dimension `{s}`: {e}"))
    };
    if let Some((lo, hi)) = text.split_once("..") {
        let (lo, hi) = (parse(lo)?, parse(hi.trim_start_matches('='))?);
        if lo > hi {
            return Err(format!("empty range `{text}`"));
        }
        return Ok((lo..=hi).collect());
    }
    text.split(',').map(parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_and_lists() {
        assert_eq!(parse_dims("2..6").unwrap(), vec![2, 3, 4, 5, 6]);
        assert_eq!(parse_dims("3,5").unwrap(), vec![3, 5]);
        assert!(parse_dims("6..2").is_err());
        assert_eq!(parse_list("1,1.5,inf").unwrap(), vec![1.0, 1.5, f64::INFINITY]);
        assert!(parse_list("1,x").is_err());
    }

    #[test]
    fn toml_sections() {
        let text = r#"
            [quadrature]
            panels = 128
            [ensembles]
            dims = [2, 3]
            samples = 10
            [tolerances]
            verdict = 1e-9
            [hunt]
            inequality_id = "conjecture1"
            param_grid = { p = [1.1, 1.5] }
            dims = [2]
            ensemble_kind = "general_complex"
        "#;
        let cfg: ConfigFile = toml::from_str(text).unwrap();
        assert_eq!(cfg.quadrature.unwrap().panels, 128);
        assert_eq!(cfg.hunt.unwrap().param_grid["p"], vec![1.1, 1.5]);
        assert!(toml::from_str::<ConfigFile>("[bogus]\nx = 1").is_err());
    }
}
