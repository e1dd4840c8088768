use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use traceineq::suite::VerifyConfig;

use crate::config::read_text;
use crate::error::CliError;

/// Default output directory unless overridden.
pub const OUT_DIR_VAR: &str = "TRACEINEQ_OUT_DIR";

pub fn results_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("results"))
}

/// Written next to every results file; embeds the effective configuration.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub target: String,
    pub config_path: Option<String>,
    pub overrides: BTreeMap<String, String>,
    pub started_at: String,
    pub tool_version: String,
    pub results_path: String,
    pub effective_config: serde_json::Value,
    #[serde(default)]
    pub exit_code: Option<u8>,
    #[serde(default)]
    pub wall_time_seconds: Option<f64>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        target: &str,
        config_path: Option<&Path>,
        overrides: BTreeMap<String, String>,
        results_path: &Path,
        effective: &impl Serialize,
    ) -> Self {
        Self {
            command: command.to_string(),
            target: target.to_string(),
            config_path: config_path.map(|p| p.display().to_string()),
            overrides,
            started_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            results_path: results_path.display().to_string(),
            effective_config: serde_json::to_value(effective).expect("config serializes"),
            exit_code: None,
            wall_time_seconds: None,
        }
    }

    pub fn finish(mut self, code: u8, started: Instant) -> Self {
        self.exit_code = Some(code);
        self.wall_time_seconds = Some(started.elapsed().as_secs_f64());
        self
    }

    /// `<results>.manifest.json`.
    pub fn path_for(results: &Path) -> PathBuf {
        let mut name = results.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        results.with_file_name(name)
    }

    pub fn write(&self) -> Result<(), CliError> {
        let path = Self::path_for(Path::new(&self.results_path));
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, text + "\n").map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Verify configuration recorded in a manifest.
pub fn load_effective(path: &Path) -> Result<VerifyConfig, CliError> {
    let manifest: RunManifest = serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if manifest.command != "verify" {
        return Err(CliError::Config(format!(
            "{}: manifest is for `{}`, not verify",
            path.display(),
            manifest.command
        )));
    }
    serde_json::from_value(manifest.effective_config)
        .map_err(|e| CliError::Config(format!("{}: effective_config: {e}", path.display())))
}
